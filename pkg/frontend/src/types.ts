// Wire schema of the claimlens service: one JSON object per frame.

export type EntityType = "Addr" | "Hos" | "Dis" | "Date" | "Exam";

export const ENTITY_TYPES: EntityType[] = ["Addr", "Hos", "Dis", "Date", "Exam"];

export type KeywordState = "Tentative" | "Confirmed" | "Dropped";

export interface KeywordPayload {
  record_id: number;
  value: string;
  etype: EntityType;
  topic: string | null;
  utterance_index: number;
  state: KeywordState;
  link_method: string;
  link_score: number;
  entry_id: string | null;
}

export type EventKind =
  | "TopicChanged"
  | "KeywordTentative"
  | "KeywordConfirmed"
  | "KeywordDropped"
  | "SuggestionMade";

export interface EventPayload {
  event_seq: number;
  event_kind: EventKind;
  utterance_index: number;
  data: Record<string, unknown>;
}

export interface OutboundFrame {
  v: string;
  session_id: string;
  seq: number;
  kind: "ack" | "event" | "suggestions" | "snapshot" | "error";
  payload: Record<string, unknown>;
}

export interface SuggestionsPayload {
  field_id: string;
  candidates: string[];
  source: string;
}

export interface UtteranceRecord {
  index: number;
  speaker: "Assessor" | "Claimant";
  text: string;
  timestamp_ms?: number;
}

export interface SchemaField {
  field_id: string;
  etype: EntityType;
}

export interface SchemaTopic {
  topic_id: string;
  display_name: string;
  fields: SchemaField[];
}

export function parseFrame(raw: string): OutboundFrame | null {
  try {
    const frame = JSON.parse(raw) as OutboundFrame;
    if (typeof frame !== "object" || frame === null) return null;
    if (typeof frame.kind !== "string" || typeof frame.seq !== "number") return null;
    return frame;
  } catch {
    return null;
  }
}
