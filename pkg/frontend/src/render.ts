// DOM layer: projects the store into the page. All decision logic lives
// in store/picker/seq; this file only draws.

import type { PickerState } from "./picker.js";
import type { DashboardStore, KeywordCard } from "./store.js";
import type { SchemaTopic } from "./types.js";
import { ENTITY_TYPES } from "./types.js";

const TOPIC_COLORS = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
                      "#edc948"];

export interface RenderTargets {
  transcript: HTMLElement;
  pendingZone: HTMLElement;
  cardColumns: HTMLElement;
  form: HTMLElement;
  notices: HTMLElement;
  status: HTMLElement;
}

export interface RenderCallbacks {
  onConfirm: (recordId: number) => void;
  onReject: (recordId: number) => void;
  onFillField: (fieldId: string) => void;
  onPick: (value: string) => void;
  onManualEntry: (fieldId: string, value: string) => void;
}

export function topicColor(topics: SchemaTopic[], topicId: string | null): string {
  if (topicId === null) return "#bbb";
  const index = topics.findIndex((t) => t.topic_id === topicId);
  return index >= 0 ? TOPIC_COLORS[index % TOPIC_COLORS.length] : "#bbb";
}

function cardNode(card: KeywordCard, callbacks: RenderCallbacks): HTMLElement {
  const div = document.createElement("div");
  div.className = `card ${card.zone}` +
    (card.optimistic ? " optimistic" : "");
  const value = document.createElement("span");
  value.className = "value";
  value.textContent = card.record.value;
  const badge = document.createElement("span");
  badge.className = "badge";
  badge.textContent = card.zone === "pending" ? "tentative" : "confirmed";
  div.append(value, badge);
  if (card.zone === "pending") {
    const confirm = document.createElement("button");
    confirm.textContent = "confirm";
    confirm.onclick = () => callbacks.onConfirm(card.record.record_id);
    div.append(confirm);
  }
  const reject = document.createElement("button");
  reject.textContent = "reject";
  reject.onclick = () => callbacks.onReject(card.record.record_id);
  div.append(reject);
  return div;
}

export function render(
  store: DashboardStore,
  picker: PickerState,
  topics: SchemaTopic[],
  targets: RenderTargets,
  callbacks: RenderCallbacks,
): void {
  targets.transcript.replaceChildren(
    ...store.rows.map((row) => {
      const div = document.createElement("div");
      div.className = `utterance ${row.utterance.speaker.toLowerCase()}`;
      div.style.borderLeft = `6px solid ${topicColor(topics, row.topic)}`;
      div.textContent = `${row.utterance.speaker}: ${row.utterance.text}`;
      return div;
    }),
  );
  targets.transcript.scrollTop = targets.transcript.scrollHeight;

  targets.pendingZone.replaceChildren(
    ...store.pendingCards().map((card) => cardNode(card, callbacks)),
  );

  const groups = store.confirmedByType();
  targets.cardColumns.replaceChildren(
    ...ENTITY_TYPES.map((etype) => {
      const column = document.createElement("div");
      column.className = "column";
      const head = document.createElement("h3");
      head.textContent = etype;
      column.append(head);
      for (const card of groups.get(etype) ?? []) {
        column.append(cardNode(card, callbacks));
      }
      return column;
    }),
  );

  targets.form.replaceChildren(
    ...topics.map((topic) => {
      const section = document.createElement("fieldset");
      const legend = document.createElement("legend");
      legend.textContent = topic.display_name;
      section.append(legend);
      for (const field of topic.fields) {
        const row = document.createElement("div");
        row.className = "field-row";
        const label = document.createElement("label");
        label.textContent = `${field.etype}: `;
        const input = document.createElement("input");
        input.value = store.formValues.get(field.field_id) ?? "";
        input.onchange = () =>
          callbacks.onManualEntry(field.field_id, input.value);
        const suggest = document.createElement("button");
        suggest.textContent = "suggest";
        suggest.onclick = () => callbacks.onFillField(field.field_id);
        row.append(label, input, suggest);
        if (picker.fieldId === field.field_id && picker.candidates.length) {
          const list = document.createElement("ul");
          list.className = "picker";
          for (const candidate of picker.candidates) {
            const item = document.createElement("li");
            const button = document.createElement("button");
            button.textContent = candidate;
            button.onclick = () => callbacks.onPick(candidate);
            item.append(button);
            list.append(item);
          }
          row.append(list);
        }
        section.append(row);
      }
      return section;
    }),
  );

  targets.notices.replaceChildren(
    ...store.notices.slice(-3).map((n) => {
      const div = document.createElement("div");
      div.className = "notice";
      div.textContent = n;
      return div;
    }),
  );
}
