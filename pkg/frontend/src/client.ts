// WebSocket client: frame dispatch, in-order event delivery through the
// sequencer, and reconnect-with-resume so an interrupted replay neither
// loses nor duplicates events. The socket constructor is injectable for
// tests.

import { EventSequencer } from "./seq.js";
import type { EventPayload, SuggestionsPayload, UtteranceRecord } from "./types.js";
import { parseFrame } from "./types.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientHandlers {
  onEvent: (event: EventPayload) => void;
  onSuggestions?: (payload: SuggestionsPayload) => void;
  onSnapshot?: (payload: Record<string, unknown>) => void;
  onAck?: (payload: Record<string, unknown>) => void;
  onError?: (clientSeq: number | null, message: string) => void;
  onStatus?: (status: "connecting" | "open" | "closed") => void;
}

export class ClaimlensClient {
  private socket: SocketLike | null = null;
  private clientSeq = 0;
  private hasConnectedBefore = false;
  readonly sequencer: EventSequencer;

  constructor(
    private wsUrl: string,
    private handlers: ClientHandlers,
    private socketFactory: SocketFactory,
  ) {
    this.sequencer = new EventSequencer(handlers.onEvent);
  }

  nextClientSeq(): number {
    this.clientSeq += 1;
    return this.clientSeq;
  }

  connect(): void {
    this.handlers.onStatus?.("connecting");
    const socket = this.socketFactory(this.wsUrl);
    this.socket = socket;
    socket.onopen = () => {
      this.handlers.onStatus?.("open");
      if (this.hasConnectedBefore) {
        // resume: replay everything after the last delivered event; the
        // sequencer drops whatever we already saw
        this.sequencer.reset();
        this.sendFrame("resume", { from_event_seq: this.sequencer.lastSeq });
      }
      this.hasConnectedBefore = true;
    };
    socket.onmessage = (event) => this.handleRaw(event.data);
    socket.onclose = () => {
      this.handlers.onStatus?.("closed");
      this.socket = null;
    };
  }

  disconnect(): void {
    this.socket?.close();
    this.socket = null;
  }

  get connected(): boolean {
    return this.socket !== null;
  }

  private sendFrame(kind: string, payload: Record<string, unknown>): number {
    if (!this.socket) throw new Error("not connected");
    const seq = this.nextClientSeq();
    this.socket.send(JSON.stringify({ kind, seq, payload }));
    return seq;
  }

  sendUtterance(utterance: UtteranceRecord): number {
    return this.sendFrame("utterance", { ...utterance });
  }

  requestSuggestions(fieldId: string): number {
    return this.sendFrame("action", { type: "fill_field", field_id: fieldId });
  }

  confirmKeyword(recordId: number): number {
    return this.sendFrame("action", {
      type: "confirm_keyword",
      record_id: recordId,
    });
  }

  rejectKeyword(recordId: number): number {
    return this.sendFrame("action", {
      type: "reject_keyword",
      record_id: recordId,
    });
  }

  handleRaw(raw: string): void {
    const frame = parseFrame(raw);
    if (!frame) return;
    switch (frame.kind) {
      case "event":
        this.sequencer.push(frame.payload as unknown as EventPayload);
        break;
      case "suggestions":
        this.handlers.onSuggestions?.(
          frame.payload as unknown as SuggestionsPayload,
        );
        break;
      case "snapshot":
        this.handlers.onSnapshot?.(frame.payload);
        break;
      case "ack":
        this.handlers.onAck?.(frame.payload);
        break;
      case "error": {
        const clientSeq = (frame.payload.client_seq as number | null) ?? null;
        this.handlers.onError?.(
          clientSeq,
          String(frame.payload.message ?? "unknown error"),
        );
        break;
      }
    }
  }
}
