/** Minimal SVG plot scaffolding: linear axes, polylines, markers. */

export interface Extent {
  min: number;
  max: number;
}

export function extentOf(values: number[], pad = 0.05): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (!Number.isFinite(min) || !Number.isFinite(max)) {
    min = 0;
    max = 1;
  }
  if (min === max) {
    min -= 1;
    max += 1;
  }
  const span = max - min;
  return { min: min - pad * span, max: max + pad * span };
}

export class Axes {
  constructor(
    public x0: number,
    public y0: number,
    public width: number,
    public height: number,
    public xext: Extent,
    public yext: Extent,
  ) {}

  sx(v: number): number {
    return (
      this.x0 + ((v - this.xext.min) / (this.xext.max - this.xext.min)) * this.width
    );
  }

  sy(v: number): number {
    return (
      this.y0 +
      this.height -
      ((v - this.yext.min) / (this.yext.max - this.yext.min)) * this.height
    );
  }
}

function ticks(ext: Extent, count = 6): number[] {
  const raw = (ext.max - ext.min) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= raw) ?? raw;
  const out: number[] = [];
  for (let v = Math.ceil(ext.min / step) * step; v <= ext.max + 1e-12; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

function fmt(v: number): string {
  const a = Math.abs(v);
  if (a >= 10000) return v.toExponential(1);
  if (a >= 100 || Number.isInteger(v)) return v.toFixed(0);
  if (a >= 1) return v.toFixed(1);
  return v.toPrecision(2);
}

export const PALETTE = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export class Figure {
  parts: string[] = [];

  constructor(public width = 760, public height = 540) {}

  add(fragment: string): void {
    this.parts.push(fragment);
  }

  axes(ax: Axes, xlabel: string, ylabel: string, title?: string): void {
    const { x0, y0, width: w, height: h } = ax;
    this.add(
      `<rect x="${x0}" y="${y0}" width="${w}" height="${h}" fill="none" stroke="#333"/>`,
    );
    for (const v of ticks(ax.xext)) {
      const x = ax.sx(v);
      if (x < x0 - 1e-6 || x > x0 + w + 1e-6) continue;
      this.add(`<line x1="${x}" y1="${y0 + h}" x2="${x}" y2="${y0 + h + 4}" stroke="#333"/>`);
      this.add(
        `<text x="${x}" y="${y0 + h + 16}" font-size="10" text-anchor="middle">${fmt(v)}</text>`,
      );
    }
    for (const v of ticks(ax.yext)) {
      const y = ax.sy(v);
      if (y < y0 - 1e-6 || y > y0 + h + 1e-6) continue;
      this.add(`<line x1="${x0 - 4}" y1="${y}" x2="${x0}" y2="${y}" stroke="#333"/>`);
      this.add(
        `<text x="${x0 - 6}" y="${y + 3}" font-size="10" text-anchor="end">${fmt(v)}</text>`,
      );
    }
    this.add(
      `<text x="${x0 + w / 2}" y="${y0 + h + 32}" font-size="12" text-anchor="middle">${xlabel}</text>`,
    );
    this.add(
      `<text x="${x0 - 44}" y="${y0 + h / 2}" font-size="12" text-anchor="middle" transform="rotate(-90 ${x0 - 44} ${y0 + h / 2})">${ylabel}</text>`,
    );
    if (title) {
      this.add(
        `<text x="${x0 + w / 2}" y="${y0 - 8}" font-size="13" text-anchor="middle" font-weight="bold">${title}</text>`,
      );
    }
  }

  polyline(
    ax: Axes,
    xs: number[],
    ys: number[],
    color: string,
    width = 1.4,
    dash?: string,
  ): void {
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      const x = ax.sx(xs[i]);
      const y = ax.sy(ys[i]);
      if (Number.isFinite(x) && Number.isFinite(y)) {
        pts.push(`${x.toFixed(2)},${y.toFixed(2)}`);
      }
    }
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="${width}"${dashAttr}/>`,
    );
  }

  square(ax: Axes, x: number, y: number, color: string, size = 7): void {
    const cx = ax.sx(x);
    const cy = ax.sy(y);
    this.add(
      `<rect x="${(cx - size / 2).toFixed(2)}" y="${(cy - size / 2).toFixed(2)}" width="${size}" height="${size}" fill="none" stroke="${color}" stroke-width="1.5" class="marker-start"/>`,
    );
  }

  circle(ax: Axes, x: number, y: number, color: string, radius = 4): void {
    this.add(
      `<circle cx="${ax.sx(x).toFixed(2)}" cy="${ax.sy(y).toFixed(2)}" r="${radius}" fill="none" stroke="${color}" stroke-width="1.5" class="marker-target"/>`,
    );
  }

  cross(ax: Axes, x: number, y: number, color: string, size = 5): void {
    const cx = ax.sx(x);
    const cy = ax.sy(y);
    const d = size;
    this.add(
      `<g class="marker-capture" stroke="${color}" stroke-width="1.8">` +
        `<line x1="${cx - d}" y1="${cy - d}" x2="${cx + d}" y2="${cy + d}"/>` +
        `<line x1="${cx - d}" y1="${cy + d}" x2="${cx + d}" y2="${cy - d}"/></g>`,
    );
  }

  vline(ax: Axes, x: number, color: string, dash: string, label?: string): void {
    const sx = ax.sx(x);
    if (sx < ax.x0 || sx > ax.x0 + ax.width) return;
    this.add(
      `<line x1="${sx}" y1="${ax.y0}" x2="${sx}" y2="${ax.y0 + ax.height}" stroke="${color}" stroke-dasharray="${dash}" class="marker-vline"/>`,
    );
    if (label) {
      this.add(
        `<text x="${sx + 4}" y="${ax.y0 + 12}" font-size="10" fill="${color}">${label}</text>`,
      );
    }
  }

  legend(ax: Axes, labels: string[], colors: string[]): void {
    const x = ax.x0 + ax.width - 60;
    let y = ax.y0 + 14;
    for (let i = 0; i < labels.length; i++) {
      this.add(
        `<line x1="${x}" y1="${y - 4}" x2="${x + 18}" y2="${y - 4}" stroke="${colors[i]}" stroke-width="2"/>`,
      );
      this.add(`<text x="${x + 22}" y="${y}" font-size="11">${labels[i]}</text>`);
      y += 14;
    }
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}
