// Accuracy chart scene: the live "current" series plus any saved
// experiments toggled visible, all as screen-space polylines.

import type { SeriesPoint } from "./state.js";

export const CURRENT_LABEL = "current";
export const CURRENT_COLOR = "#d62758";
const SAVED_COLORS = ["#2f6fd0", "#2e9e60", "#8c5bd6", "#b8860b", "#5a6672", "#d06fb8"];

export interface ChartSeries {
  label: string;
  color: string;
  points: { x: number; y: number }[];
}

export interface ChartScene {
  series: ChartSeries[];
  yTicks: { y: number; label: string }[];
  xTicks: { x: number; label: string }[];
}

export function savedColor(index: number): string {
  return SAVED_COLORS[index % SAVED_COLORS.length];
}

export function buildChart(
  width: number,
  height: number,
  current: SeriesPoint[],
  saved: { name: string; series: number[] }[],
): ChartScene {
  const maxEpoch = Math.max(
    1,
    current.length ? current[current.length - 1].epoch : 0,
    ...saved.map((s) => s.series.length),
  );
  const toX = (epoch: number) => (epoch / maxEpoch) * (width - 8) + 4;
  const toY = (accuracy: number) => height - 4 - accuracy * (height - 8);

  const series: ChartSeries[] = saved.map((s, i) => ({
    label: s.name,
    color: savedColor(i),
    points: s.series.map((accuracy, k) => ({ x: toX(k + 1), y: toY(accuracy) })),
  }));
  series.push({
    label: CURRENT_LABEL,
    color: CURRENT_COLOR,
    points: current.map((p) => ({ x: toX(p.epoch), y: toY(p.accuracy) })),
  });
  const yTicks = [0, 0.25, 0.5, 0.75, 1].map((v) => ({ y: toY(v), label: v.toFixed(2) }));
  const xTicks = [0, Math.round(maxEpoch / 2), maxEpoch].map((epoch) => ({
    x: toX(epoch),
    label: String(epoch),
  }));
  return { series, yTicks, xTicks };
}
