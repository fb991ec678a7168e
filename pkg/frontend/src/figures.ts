/**
 * The four figure families rendered from a run directory: trajectories
 * with start/capture markers, time-to-go convergence with the deadline
 * line, look angles with accelerations, and the switching staircase.
 */
import { RunData } from "./data.js";
import { Axes, extentOf, Figure, PALETTE } from "./svg.js";

export type FigureKind = "trajectory" | "tgo" | "accel_look" | "switching";

export const FIGURE_KINDS: FigureKind[] = [
  "trajectory",
  "tgo",
  "accel_look",
  "switching",
];

const DEG = 180 / Math.PI;
const G = 9.81;

function agentLabels(n: number): string[] {
  return Array.from({ length: n }, (_, i) => `I${i + 1}`);
}

/** Truncate an agent's series at its capture instant (log is frozen after). */
function untilCapture(run: RunData, agent: number) {
  const cap = run.events.capture_times[agent];
  const series = run.agents[agent];
  if (cap == null) return series;
  return series.filter((s) => s.t <= cap + 1e-9);
}

export function renderTrajectory(run: RunData): string {
  const fig = new Figure(760, 600);
  const xs: number[] = [];
  const ys: number[] = [];
  for (let a = 0; a < run.agents.length; a++) {
    for (const s of untilCapture(run, a)) {
      xs.push(s.x);
      ys.push(s.y);
    }
  }
  for (const p of run.target) {
    xs.push(p.x);
    ys.push(p.y);
  }
  // equal scale so trajectories do not shear
  const xe = extentOf(xs);
  const ye = extentOf(ys);
  const span = Math.max(xe.max - xe.min, ye.max - ye.min);
  const grow = (e: { min: number; max: number }) => {
    const mid = (e.min + e.max) / 2;
    return { min: mid - span / 2, max: mid + span / 2 };
  };
  const ax = new Axes(70, 40, 640, 500, grow(xe), grow(ye));
  fig.axes(ax, "x [m]", "y [m]", `${run.events.scenario}: trajectories`);

  fig.polyline(
    ax,
    run.target.map((p) => p.x),
    run.target.map((p) => p.y),
    "#444",
    1.6,
    "6,4",
  );
  if (run.target.length > 0) {
    fig.circle(ax, run.target[0].x, run.target[0].y, "#444");
  }
  run.agents.forEach((_, a) => {
    const series = untilCapture(run, a);
    const color = PALETTE[a % PALETTE.length];
    fig.polyline(
      ax,
      series.map((s) => s.x),
      series.map((s) => s.y),
      color,
    );
    fig.square(ax, series[0].x, series[0].y, color);
    if (run.events.capture_times[a] != null) {
      const last = series[series.length - 1];
      fig.cross(ax, last.x, last.y, color);
    }
  });
  if (run.events.pip) {
    fig.circle(ax, run.events.pip.x, run.events.pip.y, "#000", 6);
    fig.add(
      `<text x="${ax.sx(run.events.pip.x) + 8}" y="${ax.sy(run.events.pip.y) - 6}" font-size="10">PIP</text>`,
    );
  }
  fig.legend(ax, agentLabels(run.agents.length), PALETTE);
  return fig.render();
}

export function renderTgo(run: RunData): string {
  const fig = new Figure(760, 540);
  const ts: number[] = [];
  const vals: number[] = [];
  for (let a = 0; a < run.agents.length; a++) {
    for (const s of untilCapture(run, a)) {
      ts.push(s.t);
      vals.push(s.tgo);
    }
  }
  const ax = new Axes(70, 40, 640, 440, extentOf(ts, 0.02), extentOf(vals));
  fig.axes(ax, "time [s]", "time-to-go [s]", `${run.events.scenario}: time-to-go`);
  run.agents.forEach((_, a) => {
    const series = untilCapture(run, a);
    fig.polyline(
      ax,
      series.map((s) => s.t),
      series.map((s) => s.tgo),
      PALETTE[a % PALETTE.length],
    );
  });
  fig.vline(ax, run.events.t_s, "#000", "7,4", `T_s = ${run.events.t_s} s`);
  if (run.events.consensus_time != null) {
    fig.vline(ax, run.events.consensus_time, "#888", "2,3", "consensus");
  }
  fig.legend(ax, agentLabels(run.agents.length), PALETTE);
  return fig.render();
}

export function renderAccelLook(run: RunData): string {
  const fig = new Figure(760, 640);
  const ts: number[] = [];
  const looks: number[] = [];
  const accels: number[] = [];
  for (let a = 0; a < run.agents.length; a++) {
    for (const s of untilCapture(run, a)) {
      ts.push(s.t);
      looks.push(s.delta * DEG);
      accels.push(s.aReal / G);
    }
  }
  const te = extentOf(ts, 0.02);
  const top = new Axes(70, 40, 640, 240, te, extentOf(looks));
  const bottom = new Axes(70, 350, 640, 240, te, extentOf(accels));
  fig.axes(top, "", "look angle [deg]", `${run.events.scenario}: look angles and accelerations`);
  fig.axes(bottom, "time [s]", "lateral acceleration [g]");
  run.agents.forEach((_, a) => {
    const series = untilCapture(run, a);
    const color = PALETTE[a % PALETTE.length];
    fig.polyline(top, series.map((s) => s.t), series.map((s) => s.delta * DEG), color);
    fig.polyline(bottom, series.map((s) => s.t), series.map((s) => s.aReal / G), color);
  });
  fig.legend(top, agentLabels(run.agents.length), PALETTE);
  return fig.render();
}

export function renderSwitching(run: RunData): string {
  const fig = new Figure(760, 640);
  const te = extentOf(run.times, 0.02);
  const maxTopo = Math.max(...run.topo, 1);
  const top = new Axes(70, 40, 640, 160, te, { min: 0.5, max: maxTopo + 0.5 });
  const bottom = new Axes(70, 280, 640, 300, te, {
    ...extentOf(
      run.agents.flatMap((_, a) => untilCapture(run, a).map((s) => s.delta * DEG)),
    ),
  });
  fig.axes(top, "", "active topology", `${run.events.scenario}: switching signal and look angles`);
  fig.axes(bottom, "time [s]", "look angle [deg]");
  // staircase: step-after between samples
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < run.times.length; i++) {
    if (i > 0) {
      xs.push(run.times[i]);
      ys.push(run.topo[i - 1]);
    }
    xs.push(run.times[i]);
    ys.push(run.topo[i]);
  }
  fig.polyline(top, xs, ys, "#000", 1.6);
  run.agents.forEach((_, a) => {
    const series = untilCapture(run, a);
    fig.polyline(
      bottom,
      series.map((s) => s.t),
      series.map((s) => s.delta * DEG),
      PALETTE[a % PALETTE.length],
    );
  });
  fig.legend(bottom, agentLabels(run.agents.length), PALETTE);
  return fig.render();
}

export function renderKind(run: RunData, kind: FigureKind): string {
  switch (kind) {
    case "trajectory":
      return renderTrajectory(run);
    case "tgo":
      return renderTgo(run);
    case "accel_look":
      return renderAccelLook(run);
    case "switching":
      return renderSwitching(run);
  }
}
