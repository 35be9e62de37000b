// Transcript replayer: feeds recorded utterances to the service on a
// timer, with play/pause and a speed multiplier (the desk-scale stand-in
// for live speech recognition).

import type { UtteranceRecord } from "./types.js";

export interface ReplayOptions {
  intervalMs?: number;
}

export class TranscriptReplayer {
  private position = 0;
  private playing = false;
  private speed = 1;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private intervalMs: number;
  onProgress: ((position: number, total: number) => void) | null = null;
  onFinished: (() => void) | null = null;

  constructor(
    private utterances: UtteranceRecord[],
    private send: (utterance: UtteranceRecord) => void,
    options: ReplayOptions = {},
  ) {
    this.intervalMs = options.intervalMs ?? 800;
  }

  get isPlaying(): boolean {
    return this.playing;
  }

  get currentPosition(): number {
    return this.position;
  }

  get finished(): boolean {
    return this.position >= this.utterances.length;
  }

  play(): void {
    if (this.playing || this.finished) return;
    this.playing = true;
    this.schedule();
  }

  pause(): void {
    this.playing = false;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  setSpeed(multiplier: number): void {
    if (multiplier <= 0) throw new Error("speed must be positive");
    this.speed = multiplier;
  }

  /** Send the next utterance immediately (also used by the step button). */
  step(): void {
    if (this.finished) return;
    this.send(this.utterances[this.position]);
    this.position += 1;
    this.onProgress?.(this.position, this.utterances.length);
    if (this.finished) {
      this.pause();
      this.onFinished?.();
    }
  }

  private schedule(): void {
    if (!this.playing) return;
    this.timer = setTimeout(() => {
      if (!this.playing) return;
      this.step();
      this.schedule();
    }, this.intervalMs / this.speed);
  }
}
