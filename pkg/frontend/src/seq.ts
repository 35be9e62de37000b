// In-order event delivery with duplicate suppression and gap buffering.
//
// Tracker events carry their own monotone `event_seq`. The transport may
// re-deliver after a resume, or (in principle) deliver ahead of a gap;
// this buffer releases events strictly once, in sequence order, and
// reports the last delivered sequence for resume requests.

import type { EventPayload } from "./types.js";

export class EventSequencer {
  private lastDelivered = -1;
  private ahead = new Map<number, EventPayload>();

  constructor(private deliver: (event: EventPayload) => void) {}

  get lastSeq(): number {
    return this.lastDelivered;
  }

  /** Number of buffered out-of-order events (visible for diagnostics). */
  get bufferedCount(): number {
    return this.ahead.size;
  }

  push(event: EventPayload): void {
    const seq = event.event_seq;
    if (seq <= this.lastDelivered || this.ahead.has(seq)) {
      return; // duplicate
    }
    this.ahead.set(seq, event);
    this.drain();
  }

  private drain(): void {
    let next = this.lastDelivered + 1;
    while (this.ahead.has(next)) {
      const event = this.ahead.get(next)!;
      this.ahead.delete(next);
      this.lastDelivered = next;
      this.deliver(event);
      next += 1;
    }
  }

  /** Forget buffered lookahead (e.g. before a resume replay). */
  reset(): void {
    this.ahead.clear();
  }
}
