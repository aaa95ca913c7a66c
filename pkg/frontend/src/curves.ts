// Threshold-curve panel geometry: pure functions from curve data to SVG
// fragments, so the chart is testable without a browser.

import { CurvePoint, IterationCurve } from './api.js';

export interface ChartBox {
  width: number;
  height: number;
  pad: number;
}

export const DEFAULT_BOX: ChartBox = { width: 420, height: 240, pad: 30 };

const PALETTE = ['#3366cc', '#dc3912', '#109618', '#990099', '#ff9900', '#0099c6'];

export function toX(threshold: number, box: ChartBox): number {
  return box.pad + threshold * (box.width - 2 * box.pad);
}

export function toY(fraction: number, box: ChartBox): number {
  return box.height - box.pad - fraction * (box.height - 2 * box.pad);
}

export function polylinePoints(curve: CurvePoint[], box: ChartBox = DEFAULT_BOX): string {
  return curve
    .map((p) => `${toX(p.threshold, box).toFixed(1)},${toY(p.fraction, box).toFixed(1)}`)
    .join(' ');
}

/** Accepted fraction at the grid threshold nearest to the probe value
 * (used by the hover readout, e.g. at the 0.95 merge rule). */
export function nearestPoint(curve: CurvePoint[], threshold: number): CurvePoint | null {
  if (curve.length === 0) return null;
  let best = curve[0];
  for (const point of curve) {
    if (Math.abs(point.threshold - threshold) < Math.abs(best.threshold - threshold)) {
      best = point;
    }
  }
  return best;
}

export function isNonIncreasing(curve: CurvePoint[]): boolean {
  for (let i = 1; i < curve.length; i += 1) {
    if (curve[i].fraction > curve[i - 1].fraction + 1e-12) return false;
  }
  return true;
}

export function renderCurvesSvg(
  iterations: IterationCurve[],
  box: ChartBox = DEFAULT_BOX,
): string {
  if (iterations.length === 0) {
    return '<p class="empty">no trained model yet; curves appear after the first training run</p>';
  }
  const lines = iterations
    .map((entry, index) => {
      const color = PALETTE[index % PALETTE.length];
      return (
        `<polyline fill="none" stroke="${color}" stroke-width="1.5" ` +
        `data-iteration="${entry.iteration}" points="${polylinePoints(entry.curve, box)}" />`
      );
    })
    .join('');
  const legend = iterations
    .map((entry, index) => {
      const color = PALETTE[index % PALETTE.length];
      return `<span class="legend-item" style="color:${color}">iteration ${entry.iteration}</span>`;
    })
    .join(' ');
  const axes =
    `<line x1="${box.pad}" y1="${box.height - box.pad}" x2="${box.width - box.pad}" ` +
    `y2="${box.height - box.pad}" stroke="#888" />` +
    `<line x1="${box.pad}" y1="${box.pad}" x2="${box.pad}" y2="${box.height - box.pad}" stroke="#888" />`;
  return (
    `<svg viewBox="0 0 ${box.width} ${box.height}" role="img" aria-label="threshold curves">` +
    `${axes}${lines}</svg><div class="legend">${legend}</div>`
  );
}
