import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { TranscriptReplayer } from "../src/replay.js";
import type { UtteranceRecord } from "../src/types.js";

function utterances(n: number): UtteranceRecord[] {
  return Array.from({ length: n }, (_v, i) => ({
    index: i,
    speaker: i % 2 === 0 ? "Assessor" : "Claimant",
    text: `turn ${i}`,
  }));
}

describe("TranscriptReplayer", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("plays on a timer and finishes", () => {
    const sent: number[] = [];
    const r = new TranscriptReplayer(utterances(3), (u) => sent.push(u.index), {
      intervalMs: 100,
    });
    let finished = false;
    r.onFinished = () => {
      finished = true;
    };
    r.play();
    vi.advanceTimersByTime(350);
    expect(sent).toEqual([0, 1, 2]);
    expect(finished).toBe(true);
    expect(r.isPlaying).toBe(false);
  });

  it("pause stops emission and play resumes where it left off", () => {
    const sent: number[] = [];
    const r = new TranscriptReplayer(utterances(4), (u) => sent.push(u.index), {
      intervalMs: 100,
    });
    r.play();
    vi.advanceTimersByTime(150);
    r.pause();
    vi.advanceTimersByTime(500);
    expect(sent).toEqual([0]);
    r.play();
    vi.advanceTimersByTime(320);
    expect(sent).toEqual([0, 1, 2, 3]);
  });

  it("speed multiplier shortens the interval", () => {
    const sent: number[] = [];
    const r = new TranscriptReplayer(utterances(4), (u) => sent.push(u.index), {
      intervalMs: 100,
    });
    r.setSpeed(2);
    r.play();
    vi.advanceTimersByTime(160);
    expect(sent).toEqual([0, 1, 2]);
  });

  it("step sends immediately while paused", () => {
    const sent: number[] = [];
    const r = new TranscriptReplayer(utterances(2), (u) => sent.push(u.index));
    r.step();
    r.step();
    r.step(); // past the end: no-op
    expect(sent).toEqual([0, 1]);
    expect(r.finished).toBe(true);
  });

  it("rejects nonpositive speeds", () => {
    const r = new TranscriptReplayer(utterances(1), () => undefined);
    expect(() => r.setSpeed(0)).toThrow();
  });
});
