import { describe, expect, it } from "vitest";

import { DashboardStore } from "../src/store.js";
import type { EventPayload, KeywordPayload } from "../src/types.js";
import { eventFrames, loadScenario } from "./fixture.js";

function asEvent(frame: { payload: Record<string, unknown> }): EventPayload {
  return frame.payload as unknown as EventPayload;
}

describe("DashboardStore over the recorded scenario", () => {
  it("surfaces keyword cards only on confirmation events", () => {
    const fixture = loadScenario();
    const store = new DashboardStore();
    for (const frame of eventFrames(fixture)) {
      const event = asEvent(frame);
      store.applyEvent(event);
      const confirmedIds = new Set<number>();
      for (const cards of store.confirmedByType().values()) {
        for (const card of cards) confirmedIds.add(card.record.record_id);
      }
      // any visible confirmed card must have had a KeywordConfirmed event
      const confirmedSoFar = new Set(
        store.appliedEvents
          .filter((e) => e.event_kind === "KeywordConfirmed")
          .map((e) => (e.data as unknown as KeywordPayload).record_id),
      );
      for (const id of confirmedIds) {
        expect(confirmedSoFar.has(id)).toBe(true);
      }
    }
  });

  it("keeps tentative keywords out of the confirmed zone", () => {
    const fixture = loadScenario();
    const store = new DashboardStore();
    let sawTentativeOnly = false;
    for (const frame of eventFrames(fixture)) {
      const event = asEvent(frame);
      store.applyEvent(event);
      if (event.event_kind === "KeywordTentative") {
        const record = event.data as unknown as KeywordPayload;
        const values = [...store.confirmedByType().values()]
          .flat()
          .map((c) => c.record.value);
        expect(values).not.toContain(record.value);
        expect(store.pendingCards().map((c) => c.record.value)).toContain(
          record.value,
        );
        sawTentativeOnly = true;
      }
    }
    expect(sawTentativeOnly).toBe(true);
  });

  it("removes dropped keywords and keeps them for audit", () => {
    const fixture = loadScenario();
    const store = new DashboardStore();
    for (const frame of eventFrames(fixture)) store.applyEvent(asEvent(frame));
    const dropped = store.droppedLedger.map((r) => r.value);
    expect(dropped).toContain("Mercy General Hospital");
    const visible = [...store.confirmedByType().values()]
      .flat()
      .map((c) => c.record.value);
    expect(visible).not.toContain("Mercy General Hospital");
  });

  it("matches the final server snapshot after the reject round trip", () => {
    const fixture = loadScenario();
    const store = new DashboardStore();
    for (const frame of eventFrames(fixture)) store.applyEvent(asEvent(frame));
    const snapshotFrame = fixture.frames.find((f) => f.kind === "snapshot")!;
    const confirmed = snapshotFrame.payload.confirmed as Record<
      string,
      Array<{ value: string }>
    >;
    const groups = store.confirmedByType();
    for (const [etype, rows] of Object.entries(confirmed)) {
      const mine = (groups.get(etype as never) ?? []).map(
        (c) => c.record.value,
      );
      expect(mine).toEqual(rows.map((r) => r.value));
    }
    expect(store.droppedLedger.map((r) => r.value)).toContain(
      fixture.rejected_value,
    );
  });

  it("tracks topic bands on transcript rows", () => {
    const fixture = loadScenario();
    const store = new DashboardStore();
    const events = eventFrames(fixture);
    let cursor = 0;
    for (const utterance of fixture.utterances) {
      store.addUtterance(utterance);
      while (
        cursor < events.length &&
        asEvent(events[cursor]).utterance_index <= utterance.index
      ) {
        store.applyEvent(asEvent(events[cursor]));
        cursor += 1;
      }
    }
    expect(store.rows[0].utterance.speaker).toBe("Assessor");
    // the disease-history opener switches the band at utterance 0
    expect(store.rows[0].topic).toBe("disease_history");
  });
});

describe("optimistic actions", () => {
  function tentativeCardStore() {
    const fixture = loadScenario();
    const store = new DashboardStore();
    for (const frame of eventFrames(fixture)) {
      const event = asEvent(frame);
      store.applyEvent(event);
      if (event.event_kind === "KeywordTentative") break;
    }
    const pending = store.pendingCards();
    expect(pending.length).toBeGreaterThan(0);
    return { store, record: pending[0].record };
  }

  it("optimistic confirm flips the badge before the server answers", () => {
    const { store, record } = tentativeCardStore();
    expect(store.optimisticConfirm(record.record_id, 7)).toBe(true);
    const visible = [...store.confirmedByType().values()].flat();
    const card = visible.find((c) => c.record.record_id === record.record_id)!;
    expect(card.optimistic).toBe("confirm");
  });

  it("server rejection reverts the optimistic change with a notice", () => {
    const { store, record } = tentativeCardStore();
    store.optimisticConfirm(record.record_id, 7);
    store.revert(7, "record was dropped server-side");
    const visible = [...store.confirmedByType().values()].flat();
    expect(
      visible.some((c) => c.record.record_id === record.record_id),
    ).toBe(false);
    expect(store.pendingCards().some(
      (c) => c.record.record_id === record.record_id,
    )).toBe(true);
    expect(store.notices).toContain("record was dropped server-side");
  });

  it("optimistic reject hides the card until reconciled", () => {
    const { store, record } = tentativeCardStore();
    store.optimisticReject(record.record_id, 9);
    expect(
      store.pendingCards().some((c) => c.record.record_id === record.record_id),
    ).toBe(false);
    // authoritative drop arrives: the card is gone for good
    store.applyEvent({
      event_seq: 999,
      event_kind: "KeywordDropped",
      utterance_index: record.utterance_index,
      data: record as unknown as Record<string, unknown>,
    });
    store.acknowledge(9);
    expect(store.cards.has(record.record_id)).toBe(false);
  });
});
