/**
 * Readers for the engine's run outputs: timeseries.csv, target.csv and
 * events.json. The CSV schema is fixed; anything else is rejected so a
 * renderer never draws from a half-understood file.
 */
import { readFileSync } from "fs";
import path from "path";

export const TIMESERIES_HEADER =
  "t,agent,r,theta,gamma,delta,tgo,a_cmd,a_real,aT_hat,topo,x,y";

export interface Sample {
  t: number;
  r: number;
  theta: number;
  gamma: number;
  delta: number;
  tgo: number;
  aCmd: number;
  aReal: number;
  aHat: number;
  topo: number;
  x: number;
  y: number;
}

export interface RunData {
  agents: Sample[][]; // indexed by agent-1
  times: number[];
  topo: number[];
  target: { t: number; x: number; y: number }[];
  events: RunEvents;
}

export interface RunEvents {
  scenario: string;
  law: string;
  n: number;
  t_s: number;
  spread_tol: number;
  capture_radius: number;
  consensus_time: number | null;
  capture_times: (number | null)[];
  t_f: number | null;
  all_captured: boolean;
  pip: { x: number; y: number } | null;
}

export class SchemaError extends Error {}

function splitRows(text: string): string[] {
  return text.split("\n").filter((line) => line.length > 0);
}

export function readTimeseries(file: string): {
  agents: Sample[][];
  times: number[];
  topo: number[];
} {
  const rows = splitRows(readFileSync(file, "utf-8"));
  if (rows.length === 0 || rows[0] !== TIMESERIES_HEADER) {
    throw new SchemaError(
      `${file}: expected header "${TIMESERIES_HEADER}", got "${rows[0] ?? ""}"`,
    );
  }
  const agents: Sample[][] = [];
  const times: number[] = [];
  const topo: number[] = [];
  let lastT = Number.NEGATIVE_INFINITY;
  for (const row of rows.slice(1)) {
    const parts = row.split(",");
    if (parts.length !== 13) {
      throw new SchemaError(`${file}: row with ${parts.length} columns`);
    }
    const nums = parts.map(Number);
    if (nums.some(Number.isNaN)) {
      throw new SchemaError(`${file}: non-numeric cell in "${row}"`);
    }
    const agent = nums[1];
    const sample: Sample = {
      t: nums[0],
      r: nums[2],
      theta: nums[3],
      gamma: nums[4],
      delta: nums[5],
      tgo: nums[6],
      aCmd: nums[7],
      aReal: nums[8],
      aHat: nums[9],
      topo: nums[10],
      x: nums[11],
      y: nums[12],
    };
    while (agents.length < agent) agents.push([]);
    agents[agent - 1].push(sample);
    if (sample.t > lastT) {
      times.push(sample.t);
      topo.push(sample.topo);
      lastT = sample.t;
    }
  }
  if (agents.length === 0) {
    throw new SchemaError(`${file}: no data rows`);
  }
  return { agents, times, topo };
}

export function readTarget(file: string): { t: number; x: number; y: number }[] {
  const rows = splitRows(readFileSync(file, "utf-8"));
  if (rows[0] !== "t,x,y") {
    throw new SchemaError(`${file}: expected header "t,x,y"`);
  }
  return rows.slice(1).map((row) => {
    const [t, x, y] = row.split(",").map(Number);
    return { t, x, y };
  });
}

export function readEvents(file: string): RunEvents {
  const raw = JSON.parse(readFileSync(file, "utf-8"));
  for (const key of [
    "scenario", "law", "n", "t_s", "consensus_time", "capture_times",
    "t_f", "all_captured", "spread_tol", "capture_radius",
  ]) {
    if (!(key in raw)) {
      throw new SchemaError(`${file}: missing key "${key}"`);
    }
  }
  return raw as RunEvents;
}

export function readRun(dir: string): RunData {
  const series = readTimeseries(path.join(dir, "timeseries.csv"));
  const events = readEvents(path.join(dir, "events.json"));
  if (events.n !== series.agents.length) {
    throw new SchemaError(
      `${dir}: events.json says n=${events.n} but CSV has ${series.agents.length} agents`,
    );
  }
  return {
    ...series,
    target: readTarget(path.join(dir, "target.csv")),
    events,
  };
}
