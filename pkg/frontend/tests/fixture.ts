import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { OutboundFrame, UtteranceRecord } from "../src/types.js";

export interface ScenarioFixture {
  utterances: UtteranceRecord[];
  frames: OutboundFrame[];
  rejected_record_id: number;
  rejected_value: string;
}

export function loadScenario(): ScenarioFixture {
  const here = dirname(fileURLToPath(import.meta.url));
  const raw = readFileSync(join(here, "fixtures", "scenario_frames.json"), "utf-8");
  return JSON.parse(raw) as ScenarioFixture;
}

export function eventFrames(fixture: ScenarioFixture): OutboundFrame[] {
  return fixture.frames.filter((f) => f.kind === "event");
}
