// Bootstrap: open a session against the local service, wire the replayer,
// the WebSocket client, the store, and the render loop together.

import { ClaimlensClient } from "./client.js";
import { applySuggestions, emptyPicker, openPicker, pick } from "./picker.js";
import { TranscriptReplayer } from "./replay.js";
import { render, type RenderTargets } from "./render.js";
import { DashboardStore } from "./store.js";
import type { SchemaTopic, UtteranceRecord } from "./types.js";

const API = "";

async function getJson(path: string): Promise<any> {
  const response = await fetch(API + path);
  if (!response.ok) throw new Error(`${path}: ${response.status}`);
  return response.json();
}

function target(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function boot(): Promise<void> {
  const schema = await getJson("/schema");
  const topics: SchemaTopic[] = schema.topics;
  const transcript = await getJson("/transcript");
  const utterances: UtteranceRecord[] = transcript.utterances;
  const session = await fetch(API + "/sessions", { method: "POST" });
  const sessionId = (await session.json()).session_id;

  const store = new DashboardStore();
  let picker = emptyPicker();

  const targets: RenderTargets = {
    transcript: target("transcript"),
    pendingZone: target("pending"),
    cardColumns: target("cards"),
    form: target("report-form"),
    notices: target("notices"),
    status: target("status"),
  };

  const wsUrl =
    `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}` +
    `/ws/${sessionId}`;
  const client = new ClaimlensClient(
    wsUrl,
    {
      onEvent: (event) => store.applyEvent(event),
      onSuggestions: (payload) => {
        picker = applySuggestions(picker, payload, store);
        draw();
      },
      onError: (clientSeq, message) => {
        if (clientSeq !== null) store.revert(clientSeq, message);
      },
      onAck: () => undefined,
      onStatus: (status) => {
        targets.status.textContent = status;
        targets.status.className = `status ${status}`;
        if (status === "closed") {
          replayer.pause();
          setTimeout(() => client.connect(), 500);
        }
      },
    },
    (url) => new WebSocket(url) as unknown as import("./client.js").SocketLike,
  );

  const replayer = new TranscriptReplayer(utterances, (utterance) => {
    store.addUtterance(utterance);
    client.sendUtterance(utterance);
  });
  replayer.onProgress = (position, total) => {
    target("progress").textContent = `${position} / ${total}`;
  };

  const callbacks = {
    onConfirm: (recordId: number) => {
      const seq = client.nextClientSeq();
      if (store.optimisticConfirm(recordId, seq)) client.confirmKeyword(recordId);
    },
    onReject: (recordId: number) => {
      const seq = client.nextClientSeq();
      if (store.optimisticReject(recordId, seq)) client.rejectKeyword(recordId);
    },
    onFillField: (fieldId: string) => {
      picker = openPicker(fieldId);
      client.requestSuggestions(fieldId);
    },
    onPick: (value: string) => {
      picker = pick(picker, value, store);
      draw();
    },
    onManualEntry: (fieldId: string, value: string) => {
      store.setFormValue(fieldId, value);
    },
  };

  function draw(): void {
    render(store, picker, topics, targets, callbacks);
  }

  store.subscribe(draw);
  client.connect();
  draw();

  target("play").onclick = () => replayer.play();
  target("pause").onclick = () => replayer.pause();
  target("step").onclick = () => replayer.step();
  const speed = target("speed") as HTMLSelectElement;
  speed.onchange = () => replayer.setSpeed(Number(speed.value));
}

boot().catch((error) => {
  document.body.insertAdjacentHTML(
    "beforeend",
    `<pre class="boot-error">${String(error)}</pre>`,
  );
});
