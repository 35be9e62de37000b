// The dashboard view-model: a pure reducer over the ordered event stream
// plus the user's unacknowledged optimistic actions.
//
// Keyword cards live in two zones: "pending" (tentative, rendered muted,
// never offered in pickers) and "confirmed". A card surfaces in the
// confirmed zone only when a KeywordConfirmed event arrives (or the user
// optimistically confirms, pending server reconciliation); KeywordDropped
// removes it. Dropped records stay countable for audit but never render.

import type {
  EntityType,
  EventPayload,
  KeywordPayload,
  UtteranceRecord,
} from "./types.js";
import { ENTITY_TYPES } from "./types.js";

export type CardZone = "pending" | "confirmed";

export interface KeywordCard {
  record: KeywordPayload;
  zone: CardZone;
  optimistic: "confirm" | "reject" | null;
}

export interface TranscriptRow {
  utterance: UtteranceRecord;
  topic: string | null;
}

interface PendingAction {
  clientSeq: number;
  type: "confirm_keyword" | "reject_keyword";
  recordId: number;
  priorZone: CardZone;
}

export class DashboardStore {
  rows: TranscriptRow[] = [];
  currentTopic: string | null = null;
  cards = new Map<number, KeywordCard>();
  droppedLedger: KeywordPayload[] = [];
  notices: string[] = [];
  formValues = new Map<string, string>();
  appliedEvents: EventPayload[] = [];

  private pendingActions = new Map<number, PendingAction>();
  private listeners: Array<() => void> = [];

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  // -- transcript side (driven by the local replayer) --

  addUtterance(utterance: UtteranceRecord): void {
    this.rows.push({ utterance, topic: this.currentTopic });
    this.emit();
  }

  // -- server events --

  applyEvent(event: EventPayload): void {
    this.appliedEvents.push(event);
    switch (event.event_kind) {
      case "TopicChanged": {
        this.currentTopic = (event.data.topic_id as string | null) ?? null;
        const row = this.rows.find(
          (r) => r.utterance.index === event.utterance_index,
        );
        if (row) row.topic = this.currentTopic;
        break;
      }
      case "KeywordTentative": {
        const record = event.data as unknown as KeywordPayload;
        this.cards.set(record.record_id, {
          record,
          zone: "pending",
          optimistic: null,
        });
        break;
      }
      case "KeywordConfirmed": {
        const record = event.data as unknown as KeywordPayload;
        this.cards.set(record.record_id, {
          record,
          zone: "confirmed",
          optimistic: null,
        });
        break;
      }
      case "KeywordDropped": {
        const record = event.data as unknown as KeywordPayload;
        this.cards.delete(record.record_id);
        this.droppedLedger.push(record);
        break;
      }
      case "SuggestionMade":
        break;
    }
    this.emit();
  }

  // -- optimistic actions --

  optimisticConfirm(recordId: number, clientSeq: number): boolean {
    const card = this.cards.get(recordId);
    if (!card || card.zone !== "pending") return false;
    this.pendingActions.set(clientSeq, {
      clientSeq,
      type: "confirm_keyword",
      recordId,
      priorZone: card.zone,
    });
    card.zone = "confirmed";
    card.optimistic = "confirm";
    this.emit();
    return true;
  }

  optimisticReject(recordId: number, clientSeq: number): boolean {
    const card = this.cards.get(recordId);
    if (!card) return false;
    this.pendingActions.set(clientSeq, {
      clientSeq,
      type: "reject_keyword",
      recordId,
      priorZone: card.zone,
    });
    card.optimistic = "reject"; // hidden from render until reconciled
    this.emit();
    return true;
  }

  acknowledge(clientSeq: number): void {
    // the authoritative events arrive alongside the ack; the optimistic
    // flags were already cleared by applyEvent when the record updated
    this.pendingActions.delete(clientSeq);
    this.emit();
  }

  revert(clientSeq: number, message: string): void {
    const action = this.pendingActions.get(clientSeq);
    if (action) {
      const card = this.cards.get(action.recordId);
      if (card) {
        card.zone = action.priorZone;
        card.optimistic = null;
      }
      this.pendingActions.delete(clientSeq);
    }
    this.notices.push(message);
    this.emit();
  }

  // -- derived views --

  /** Confirmed cards per type, newest mention first, one per value. */
  confirmedByType(): Map<EntityType, KeywordCard[]> {
    const groups = new Map<EntityType, KeywordCard[]>();
    for (const etype of ENTITY_TYPES) groups.set(etype, []);
    const visible = [...this.cards.values()].filter(
      (c) => c.zone === "confirmed" && c.optimistic !== "reject",
    );
    visible.sort(
      (a, b) =>
        b.record.utterance_index - a.record.utterance_index ||
        b.record.record_id - a.record.record_id,
    );
    for (const card of visible) {
      const group = groups.get(card.record.etype)!;
      if (!group.some((c) => c.record.value === card.record.value)) {
        group.push(card);
      }
    }
    return groups;
  }

  pendingCards(): KeywordCard[] {
    return [...this.cards.values()].filter(
      (c) => c.zone === "pending" && c.optimistic !== "reject",
    );
  }

  /** Values that must never appear in a suggestion picker. */
  blockedSuggestionValues(): Set<string> {
    const blocked = new Set<string>();
    for (const card of this.cards.values()) {
      if (card.zone === "pending" || card.optimistic === "reject") {
        blocked.add(card.record.value);
      }
    }
    for (const dropped of this.droppedLedger) {
      // a later confirmed mention of the same value unblocks it
      const confirmedAgain = [...this.cards.values()].some(
        (c) => c.zone === "confirmed" && c.record.value === dropped.value,
      );
      if (!confirmedAgain) blocked.add(dropped.value);
    }
    return blocked;
  }

  setFormValue(fieldId: string, value: string): void {
    this.formValues.set(fieldId, value);
    this.emit();
  }
}
