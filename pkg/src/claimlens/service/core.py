"""Session orchestration over the tracker.

One session owns one SessionState and one append-only persistence file.
Every inbound record (utterance or user action) is appended together with
the events it produced and flushed *before* any outbound message is
returned, so a crashed session can always be rebuilt by re-processing the
persisted inbound records through the deterministic pipeline.

Wire schema (one JSON object per message, `v` pins the format):

  inbound   {"kind": "utterance"|"action"|"resume", "seq": n, "payload": {...}}
  outbound  {"v": "claimlens-v1", "session_id": s, "seq": n,
             "kind": "ack"|"event"|"suggestions"|"snapshot"|"error",
             "payload": {...}}

Outbound sequence numbers are strictly increasing per session. Events
carry their tracker sequence number in the payload; clients resume with
{"kind": "resume", "payload": {"from_event_seq": n}} after a reconnect.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .. import EVENTS_HEADER
from ..bundle import ModelBundle
from ..corpus.model import CorpusError, ReportSchema, Speaker, Utterance
from ..linking import KbIndex
from ..recommend import RecommendError, suggest_for_field
from ..segmentation import StandardQuestionSet
from ..tracker import (
    PipelineConfig,
    SessionEvent,
    SessionState,
    Snapshot,
    Tracker,
    TrackerError,
    snapshot,
)

WIRE_VERSION = "claimlens-v1"


class ServiceError(ValueError):
    pass


@dataclass(frozen=True)
class WireMessage:
    session_id: str
    seq: int
    kind: str  # ack | event | suggestions | snapshot | error
    payload: dict

    def to_json(self) -> str:
        return json.dumps({"v": WIRE_VERSION, "session_id": self.session_id,
                           "seq": self.seq, "kind": self.kind,
                           "payload": self.payload}, ensure_ascii=False)


def _event_payload(event: SessionEvent) -> dict:
    return {"event_seq": event.seq, "event_kind": event.kind.value,
            "utterance_index": event.utterance_index, "data": event.payload}


def _snapshot_payload(snap: Snapshot) -> dict:
    return {
        "current_topic": snap.current_topic,
        "confirmed": {et.value: list(rows) for et, rows in snap.confirmed.items()},
        "pending_count": snap.pending_count,
        "event_count": snap.event_count,
    }


@dataclass
class Session:
    session_id: str
    state: SessionState
    log_path: Path
    log_file: object
    out_seq: int = 0

    def next_seq(self) -> int:
        seq = self.out_seq
        self.out_seq += 1
        return seq


class SessionManager:
    def __init__(self, bundle: ModelBundle, schema: ReportSchema,
                 sq: StandardQuestionSet, index: KbIndex, data_dir: str | Path,
                 config: PipelineConfig | None = None):
        self.config = config or PipelineConfig()
        bundle.require(self.config.qid_mode)
        if bundle.metadata.get("schema_topics") and \
                bundle.metadata["schema_topics"] != schema.topic_ids():
            raise ServiceError(
                "bundle/schema version mismatch: bundle was trained for topics "
                f"{bundle.metadata['schema_topics']}, schema has {schema.topic_ids()}")
        self.bundle = bundle
        self.schema = schema
        self.tracker = Tracker(sq=sq, tagger=bundle.tagger,
                               qid=bundle.qid[self.config.qid_mode],
                               neg=bundle.neg, index=index, config=self.config)
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._counter = 0

    # -- lifecycle --

    def open_session(self, session_id: str | None = None) -> str:
        if session_id is None:
            self._counter += 1
            session_id = f"sess-{self._counter:04d}"
        if session_id in self._sessions:
            raise ServiceError(f"session {session_id!r} is already open")
        log_path = self.data_dir / f"{session_id}.events"
        state = SessionState()
        if log_path.exists():
            state = self.replay_log(log_path)
            fh = log_path.open("a", encoding="utf-8")
        else:
            fh = log_path.open("w", encoding="utf-8")
            fh.write(EVENTS_HEADER + "\n")
            fh.flush()
        self._sessions[session_id] = Session(session_id=session_id, state=state,
                                             log_path=log_path, log_file=fh)
        return session_id

    def _session(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise ServiceError(f"unknown session {session_id!r}") from None

    def close_session(self, session_id: str) -> WireMessage:
        sess = self._session(session_id)
        final = WireMessage(session_id=session_id, seq=sess.next_seq(),
                            kind="snapshot",
                            payload=_snapshot_payload(snapshot(sess.state)))
        sess.log_file.flush()
        sess.log_file.close()
        del self._sessions[session_id]
        return final

    def open_sessions(self) -> list[str]:
        return list(self._sessions)

    # -- persistence --

    def _persist(self, sess: Session, inbound: dict,
                 events: list[SessionEvent]) -> None:
        """Write-ahead: inbound record plus its events, flushed before any
        outbound message leaves."""
        sess.log_file.write(json.dumps({"dir": "in", **inbound},
                                       ensure_ascii=False) + "\n")
        for event in events:
            sess.log_file.write(json.dumps(
                {"dir": "out", "kind": "event", **_event_payload(event)},
                ensure_ascii=False) + "\n")
        sess.log_file.flush()

    def replay_log(self, log_path: str | Path) -> SessionState:
        """Rebuild a session state by re-processing the persisted inbound
        records; determinism makes this equal to the pre-crash state."""
        lines = Path(log_path).read_text(encoding="utf-8").splitlines()
        if not lines or lines[0] != EVENTS_HEADER:
            raise ServiceError(f"{log_path}: missing {EVENTS_HEADER!r} header")
        state = SessionState()
        for line in lines[1:]:
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                continue  # torn tail write from a crash
            if rec.get("dir") != "in":
                continue
            if rec.get("kind") == "utterance":
                p = rec["payload"]
                utt = Utterance(index=p["index"], speaker=Speaker(p["speaker"]),
                                text=p["text"], timestamp_ms=p.get("timestamp_ms"))
                self.tracker.process_utterance(state, utt)
            elif rec.get("kind") == "action":
                self._apply_action(state, rec["payload"])
        return state

    def _apply_action(self, state: SessionState, action: dict) -> list[SessionEvent]:
        kind = action.get("type")
        if kind == "fill_field":
            suggestion = suggest_for_field(state, self.schema, action["field_id"])
            event = self.tracker.record_suggestion(state, action["field_id"],
                                                   list(suggestion.candidates))
            return [event]
        if kind == "confirm_keyword":
            return self.tracker.confirm_record(state, int(action["record_id"]))
        if kind == "reject_keyword":
            return self.tracker.reject_record(state, int(action["record_id"]))
        raise ServiceError(f"unknown action type {kind!r}")

    # -- inbound handling --

    def handle_transcript_event(self, session_id: str,
                                utt: Utterance) -> list[WireMessage]:
        sess = self._session(session_id)
        events = self.tracker.process_utterance(sess.state, utt)
        self._persist(sess, {"kind": "utterance",
                             "payload": {"index": utt.index,
                                         "speaker": utt.speaker.value,
                                         "text": utt.text,
                                         "timestamp_ms": utt.timestamp_ms}},
                      events)
        out = [WireMessage(session_id, sess.next_seq(), "event",
                           _event_payload(e)) for e in events]
        out.append(WireMessage(session_id, sess.next_seq(), "ack",
                               {"utterance_index": utt.index}))
        return out

    def handle_user_action(self, session_id: str, action: dict) -> list[WireMessage]:
        sess = self._session(session_id)
        out: list[WireMessage] = []
        if action.get("type") == "fill_field":
            suggestion = suggest_for_field(sess.state, self.schema,
                                           action["field_id"])
            event = self.tracker.record_suggestion(sess.state, action["field_id"],
                                                   list(suggestion.candidates))
            self._persist(sess, {"kind": "action", "payload": action}, [event])
            out.append(WireMessage(session_id, sess.next_seq(), "event",
                                   _event_payload(event)))
            out.append(WireMessage(session_id, sess.next_seq(), "suggestions",
                                   {"field_id": suggestion.field_id,
                                    "candidates": list(suggestion.candidates),
                                    "source": suggestion.source}))
        else:
            events = self._apply_action(sess.state, action)
            self._persist(sess, {"kind": "action", "payload": action}, events)
            out.extend(WireMessage(session_id, sess.next_seq(), "event",
                                   _event_payload(e)) for e in events)
        out.append(WireMessage(session_id, sess.next_seq(), "ack",
                               {"action": action.get("type")}))
        return out

    def handle_inbound(self, session_id: str, frame: dict) -> list[WireMessage]:
        """Dispatch one wire frame; errors come back as error messages."""
        sess = self._session(session_id)
        kind = frame.get("kind")
        try:
            if kind == "utterance":
                p = frame.get("payload", {})
                utt = Utterance(index=int(p["index"]), speaker=Speaker(p["speaker"]),
                                text=p["text"], timestamp_ms=p.get("timestamp_ms"))
                return self.handle_transcript_event(session_id, utt)
            if kind == "action":
                return self.handle_user_action(session_id, frame.get("payload", {}))
            if kind == "resume":
                from_seq = int(frame.get("payload", {}).get("from_event_seq", -1))
                return self.resume_events(session_id, from_seq)
            raise ServiceError(f"unknown inbound kind {kind!r}")
        except (ServiceError, TrackerError, RecommendError, CorpusError,
                KeyError, ValueError) as exc:
            return [WireMessage(session_id, sess.next_seq(), "error",
                                {"message": str(exc),
                                 "client_seq": frame.get("seq")})]

    def resume_events(self, session_id: str, from_event_seq: int) -> list[WireMessage]:
        sess = self._session(session_id)
        out = [WireMessage(session_id, sess.next_seq(), "event", _event_payload(e))
               for e in sess.state.events if e.seq > from_event_seq]
        out.append(WireMessage(session_id, sess.next_seq(), "snapshot",
                               _snapshot_payload(snapshot(sess.state))))
        return out

    def snapshot_message(self, session_id: str) -> WireMessage:
        sess = self._session(session_id)
        return WireMessage(session_id, sess.next_seq(), "snapshot",
                           _snapshot_payload(snapshot(sess.state)))
