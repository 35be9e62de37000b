"""Command-line entry points.

    claimlens gen    write a seeded synthetic corpus (kb, schema, standard
                     questions, annotated cases)
    claimlens train  train tagger/question/negation models into a bundle
    claimlens run    replay a transcript through the pipeline, print events
    claimlens eval   run the experiment harness, print the metric tables
    claimlens serve  start the HTTP/WebSocket service
    claimlens check  gradient and invariant self-tests
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .. import __version__
from ..bundle import load_bundle, save_bundle, train_bundle
from ..config import ENV_DATA_DIR, data_dir, load_config
from ..corpus import (
    NoiseConfig,
    default_kb,
    default_schema,
    default_standard_questions,
    generate_corpus,
    load_corpus,
    load_kb,
    load_schema,
    load_transcript,
    save_corpus,
    save_kb,
    save_schema,
)
from ..corpus.generate import GeneratorConfig
from ..evalkit import ExperimentToggles, render_tables, run_experiment, save_report
from ..linking import build_index
from ..neural import TrainConfig
from ..segmentation import (
    StandardQuestionSet,
    load_standard_questions,
    save_standard_questions,
)
from ..tracker import PipelineConfig, SessionState, Tracker

MODE_FLAGS = {"single": "single", "mtl": "mtl", "adv": "adv_mtl", "all": "all"}


def _corpus_paths(root: Path):
    return root / "kb.jsonl", root / "schema.jsonl", root / "questions.jsonl", \
        root / "cases"


def _load_corpus_dir(root: Path):
    kb_path, schema_path, questions_path, cases_dir = _corpus_paths(root)
    kb = load_kb(kb_path)
    schema = load_schema(schema_path)
    sq = load_standard_questions(questions_path, schema)
    cases = load_corpus(cases_dir)
    return kb, schema, sq, cases


def cmd_gen(args) -> int:
    root = Path(args.out)
    kb = default_kb()
    schema = default_schema()
    sq = StandardQuestionSet.from_mapping(default_standard_questions(), schema)
    noise = NoiseConfig(char_error_rate=args.noise, seed=args.seed)
    cases = generate_corpus(schema, kb, args.n, args.negation_rate, noise,
                            seed=args.seed,
                            config=GeneratorConfig(topic_cycles=args.topic_cycles))
    kb_path, schema_path, questions_path, cases_dir = _corpus_paths(root)
    save_kb(kb_path, kb)
    save_schema(schema_path, schema)
    save_standard_questions(questions_path, sq)
    save_corpus(cases_dir, cases)
    spans = sum(len(c.gold_spans) for c in cases)
    print(f"wrote {len(cases)} dialogues ({spans} gold keywords) to {root}")
    return 0


def cmd_train(args) -> int:
    kb, schema, _sq, cases = _load_corpus_dir(Path(args.corpus))
    modes = ("single", "mtl", "adv_mtl") if args.mode == "all" \
        else (MODE_FLAGS[args.mode],)
    cfg = TrainConfig(learning_rate=args.lr, epochs=args.epochs,
                      batch_size=args.batch_size,
                      adversarial_lambda=args.adversarial_lambda, seed=args.seed)
    bundle = train_bundle(cases, kb, schema, cfg, modes=modes,
                          tagger_backend=args.tagger)
    save_bundle(args.out, bundle)
    print(f"trained modes {list(modes)} on {len(cases)} dialogues -> {args.out}")
    return 0


def _make_tracker(args, dst_enabled=True):
    kb = load_kb(args.kb) if args.kb else default_kb()
    schema = load_schema(args.schema) if args.schema else default_schema()
    sq = load_standard_questions(args.questions, schema) if args.questions \
        else StandardQuestionSet.from_mapping(default_standard_questions(), schema)
    bundle = load_bundle(args.bundle, kb)
    mode = MODE_FLAGS[args.mode] if args.mode != "all" else "adv_mtl"
    bundle.require(mode)
    tracker = Tracker(sq=sq, tagger=bundle.tagger, qid=bundle.qid[mode],
                      neg=bundle.neg, index=build_index(kb),
                      config=PipelineConfig(qid_mode=mode, dst_enabled=dst_enabled))
    return tracker, bundle, schema, sq, kb


def cmd_run(args) -> int:
    tracker, _bundle, _schema, _sq, _kb = _make_tracker(args, dst_enabled=not args.no_dst)
    dialogue = load_transcript(args.transcript)
    state = SessionState()
    for utt in dialogue.utterances:
        for event in tracker.process_utterance(state, utt):
            print(json.dumps({"seq": event.seq, "kind": event.kind.value,
                              "utterance_index": event.utterance_index,
                              **event.payload}, ensure_ascii=False))
    from ..tracker import snapshot
    snap = snapshot(state)
    print(json.dumps({"final_topic": snap.current_topic,
                      "confirmed": {k.value: [r["value"] for r in v]
                                    for k, v in snap.confirmed.items()},
                      "events": snap.event_count}, ensure_ascii=False))
    return 0


def cmd_eval(args) -> int:
    kb, schema, sq, cases = _load_corpus_dir(Path(args.corpus))
    bundle = load_bundle(args.bundle, kb)
    toggles = ExperimentToggles(dst_enabled=not args.no_dst,
                                baseline_enabled=not args.no_baseline)
    report = run_experiment(cases, bundle, schema, sq, build_index(kb), toggles)
    print(render_tables(report, schema))
    if args.report:
        save_report(args.report, report, schema)
        print(f"\nreport records written to {args.report}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .app import create_app
    from .core import SessionManager

    tracker_args = argparse.Namespace(bundle=args.bundle, kb=args.kb,
                                      schema=args.schema, questions=args.questions,
                                      mode=args.mode)
    _tracker, bundle, schema, sq, kb = _make_tracker(tracker_args)
    config = load_config(args.config) if args.config else None
    manager = SessionManager(bundle, schema, sq, build_index(kb),
                             data_dir=args.data_dir or data_dir(config),
                             config=PipelineConfig(
                                 qid_mode=MODE_FLAGS[args.mode]
                                 if args.mode != "all" else "adv_mtl"))
    app = create_app(manager, transcript_path=args.transcript)
    print(f"claimlens {__version__} serving on :{args.port} "
          f"(data dir {manager.data_dir}, override with {ENV_DATA_DIR})")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_check(args) -> int:
    import numpy as np

    from ..filtering.benchmark import make_skewed_benchmark
    from ..filtering.question import (
        QuestionClassifier,
        adversarial_objective,
        bce_objective,
        disc_objective,
    )
    from ..linking import link_span
    from ..extraction.bio import TaggedSpan
    from ..corpus.model import EntityType
    from ..neural import Vocabulary, finite_diff_check, softmax

    failures = 0

    def report(name: str, ok: bool, detail: str = "") -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
        failures += 0 if ok else 1

    train, _ = make_skewed_benchmark(0)
    examples = train[:8]
    vocab = Vocabulary.from_token_lists([e.tokens for e in examples])
    topics = sorted({e.topic for e in train})
    for mode, objective in (("single", bce_objective), ("mtl", bce_objective)):
        model = QuestionClassifier(mode, topics, vocab, dim=4, seed=1)
        err = finite_diff_check(objective(model, examples), model.store)
        report(f"gradients.{mode}", err < 1e-3, f"max rel err {err:.2e}")
    model = QuestionClassifier("adv_mtl", topics, vocab, dim=4, seed=1)
    err = finite_diff_check(adversarial_objective(model, examples, 1.0), model.store)
    report("gradients.adversarial", err < 1e-3, f"max rel err {err:.2e}")
    err = finite_diff_check(disc_objective(model, examples), model.store)
    report("gradients.discriminator", err < 1e-3, f"max rel err {err:.2e}")

    probs = softmax(np.random.default_rng(0).normal(0, 4, 7))
    report("softmax.normalized", abs(float(probs.sum()) - 1.0) < 1e-9)

    kb = default_kb()
    idx = build_index(kb)
    bad = 0
    for entry in kb:
        name = entry.canonical
        corrupted = name[:2] + name[3:] if len(name) > 4 else name + "x"
        r = link_span(TaggedSpan(etype=entry.etype, surface=corrupted, char_start=0,
                                 char_end=len(corrupted), utterance_index=0), idx)
        bad += r.entry_id != entry.id
    report("linking.single_edit_recovery", bad == 0, f"{bad} failures")

    print(f"\n{failures} failure(s)")
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="claimlens",
                                     description="dialogue information extraction")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic annotated corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--negation-rate", type=float, default=0.5)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--topic-cycles", type=int, default=1)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="train models into a bundle")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=sorted(MODE_FLAGS), default="all")
    p.add_argument("--tagger", choices=("gazetteer", "trainable"),
                   default="gazetteer")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--lr", type=float, default=0.25)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--adversarial-lambda", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("run", help="replay a transcript, print the event log")
    p.add_argument("--bundle", required=True)
    p.add_argument("--transcript", required=True)
    p.add_argument("--kb")
    p.add_argument("--schema")
    p.add_argument("--questions")
    p.add_argument("--mode", choices=sorted(MODE_FLAGS), default="adv")
    p.add_argument("--no-dst", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="run the experiment harness")
    p.add_argument("--corpus", required=True)
    p.add_argument("--bundle", required=True)
    p.add_argument("--report")
    p.add_argument("--no-dst", action="store_true")
    p.add_argument("--no-baseline", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="start the streaming service")
    p.add_argument("--bundle", required=True)
    p.add_argument("--port", type=int, default=8400)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--kb")
    p.add_argument("--schema")
    p.add_argument("--questions")
    p.add_argument("--transcript")
    p.add_argument("--mode", choices=sorted(MODE_FLAGS), default="adv")
    p.add_argument("--data-dir")
    p.add_argument("--config")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("check", help="gradient and invariant self-tests")
    p.set_defaults(func=cmd_check)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
