import { describe, expect, it } from "vitest";

import { EventSequencer } from "../src/seq.js";
import type { EventPayload } from "../src/types.js";

function ev(seq: number): EventPayload {
  return {
    event_seq: seq,
    event_kind: "SuggestionMade",
    utterance_index: 0,
    data: {},
  };
}

describe("EventSequencer", () => {
  it("delivers in order", () => {
    const seen: number[] = [];
    const s = new EventSequencer((e) => seen.push(e.event_seq));
    [0, 1, 2].forEach((n) => s.push(ev(n)));
    expect(seen).toEqual([0, 1, 2]);
    expect(s.lastSeq).toBe(2);
  });

  it("buffers ahead-of-order deliveries", () => {
    const seen: number[] = [];
    const s = new EventSequencer((e) => seen.push(e.event_seq));
    s.push(ev(1));
    s.push(ev(2));
    expect(seen).toEqual([]);
    expect(s.bufferedCount).toBe(2);
    s.push(ev(0));
    expect(seen).toEqual([0, 1, 2]);
    expect(s.bufferedCount).toBe(0);
  });

  it("drops duplicates", () => {
    const seen: number[] = [];
    const s = new EventSequencer((e) => seen.push(e.event_seq));
    [0, 1, 0, 1, 2, 2].forEach((n) => s.push(ev(n)));
    expect(seen).toEqual([0, 1, 2]);
  });

  it("handles a resume replay without loss or duplication", () => {
    const seen: number[] = [];
    const s = new EventSequencer((e) => seen.push(e.event_seq));
    [0, 1, 2, 3].forEach((n) => s.push(ev(n)));
    // resume from lastSeq replays a tail overlap plus new events
    [2, 3, 4, 5].forEach((n) => s.push(ev(n)));
    expect(seen).toEqual([0, 1, 2, 3, 4, 5]);
  });
});
