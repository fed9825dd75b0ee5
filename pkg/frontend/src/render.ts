// Canvas painting; browser-only module (everything it draws comes from
// the pure scene builders).

import { buildChart } from "./chart.js";
import type { Viewport } from "./geometry.js";
import { buildScene, gridPixels } from "./scene.js";
import type { SeriesPoint } from "./state.js";
import type { Annotation, GridPayload, LabeledExample } from "./types.js";

export function drawSurface(
  canvas: HTMLCanvasElement,
  vp: Viewport,
  grid: GridPayload | null,
  train: LabeledExample[],
  test: LabeledExample[],
  annotations: Annotation[],
  draft: { originIndex: number; vector: [number, number] } | null,
  selectedIndex: number | null,
): void {
  const ctx = canvas.getContext("2d")!;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (grid) {
    const n = grid.resolution;
    const image = new ImageData(gridPixels(grid) as Uint8ClampedArray<ArrayBuffer>, n, n);
    const off = new OffscreenCanvas(n, n);
    off.getContext("2d")!.putImageData(image, 0, 0);
    ctx.imageSmoothingEnabled = true;
    ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
  }
  const scene = buildScene(vp, train, test, annotations, draft, selectedIndex);
  for (const mark of scene.points) {
    ctx.globalAlpha = mark.alpha;
    ctx.fillStyle = mark.color;
    ctx.beginPath();
    ctx.arc(mark.center.x, mark.center.y, mark.radius, 0, Math.PI * 2);
    ctx.fill();
    if (mark.selected) {
      ctx.globalAlpha = 1;
      ctx.strokeStyle = "#111";
      ctx.lineWidth = 2;
      ctx.stroke();
    }
  }
  ctx.globalAlpha = 1;
  for (const arrow of scene.arrows) {
    ctx.strokeStyle = arrow.color;
    ctx.fillStyle = arrow.color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(arrow.segment.from.x, arrow.segment.from.y);
    ctx.lineTo(arrow.segment.to.x, arrow.segment.to.y);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(arrow.segment.to.x, arrow.segment.to.y);
    ctx.lineTo(arrow.segment.head[0].x, arrow.segment.head[0].y);
    ctx.lineTo(arrow.segment.head[1].x, arrow.segment.head[1].y);
    ctx.closePath();
    ctx.fill();
  }
}

export function drawChart(
  canvas: HTMLCanvasElement,
  current: SeriesPoint[],
  saved: { name: string; series: number[] }[],
): void {
  const ctx = canvas.getContext("2d")!;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const scene = buildChart(width, height, current, saved);
  ctx.strokeStyle = "#ddd";
  ctx.fillStyle = "#888";
  ctx.font = "10px sans-serif";
  for (const tick of scene.yTicks) {
    ctx.beginPath();
    ctx.moveTo(0, tick.y);
    ctx.lineTo(width, tick.y);
    ctx.stroke();
    ctx.fillText(tick.label, 2, tick.y - 2);
  }
  for (const series of scene.series) {
    if (!series.points.length) continue;
    ctx.strokeStyle = series.color;
    ctx.lineWidth = series.label === "current" ? 2 : 1.4;
    ctx.beginPath();
    series.points.forEach((p, i) => (i ? ctx.lineTo(p.x, p.y) : ctx.moveTo(p.x, p.y)));
    ctx.stroke();
  }
  // legend, top-left
  let ly = 12;
  for (const series of scene.series) {
    ctx.fillStyle = series.color;
    ctx.fillRect(26, ly - 7, 14, 3);
    ctx.fillStyle = "#444";
    ctx.fillText(series.label, 44, ly - 2);
    ly += 12;
  }
}
