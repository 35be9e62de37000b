// Suggestion picker: server candidates arrive most-recent-first and
// already confirmed-only; the client still caps at five, dedups, and
// refuses anything the store currently knows as tentative or dropped.

import type { DashboardStore } from "./store.js";
import type { SuggestionsPayload } from "./types.js";

export const MAX_PICKER_ITEMS = 5;

export interface PickerState {
  fieldId: string | null;
  candidates: string[];
}

export function emptyPicker(): PickerState {
  return { fieldId: null, candidates: [] };
}

export function openPicker(fieldId: string): PickerState {
  return { fieldId, candidates: [] };
}

export function applySuggestions(
  picker: PickerState,
  payload: SuggestionsPayload,
  store: DashboardStore,
): PickerState {
  if (picker.fieldId !== payload.field_id) return picker;
  const blocked = store.blockedSuggestionValues();
  const seen = new Set<string>();
  const candidates: string[] = [];
  for (const value of payload.candidates) {
    if (blocked.has(value) || seen.has(value)) continue;
    seen.add(value);
    candidates.push(value);
    if (candidates.length === MAX_PICKER_ITEMS) break;
  }
  return { fieldId: picker.fieldId, candidates };
}

export function pick(
  picker: PickerState,
  value: string,
  store: DashboardStore,
): PickerState {
  if (picker.fieldId !== null) {
    store.setFormValue(picker.fieldId, value);
  }
  return emptyPicker();
}
