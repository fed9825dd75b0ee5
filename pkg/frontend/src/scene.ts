// Pure scene description for the decision-surface panel: everything the
// renderer paints, computed without touching the DOM so tests can check
// colors and geometry directly.

import {
  ARROW_LENGTH_PX,
  arrowSegment,
  toScreen,
  type ArrowSegment,
  type Viewport,
} from "./geometry.js";
import type { Annotation, GridPayload, LabeledExample } from "./types.js";

export const DRAFT_COLOR = "#1f9d2f"; // in-progress arrow: green
export const COMMITTED_COLOR = "#111111"; // stored arrows: black
export const CLASS_COLORS: [string, string] = ["#2f6fd0", "#e07b28"];

/** Monotone probability -> color ramp: the red channel rises with the
 * class-1 probability while the blue channel falls. */
export function probabilityColor(p: number): [number, number, number] {
  const r = Math.round(255 * p);
  const b = Math.round(255 * (1 - p));
  const g = Math.round(96 + 64 * (1 - Math.abs(2 * p - 1)));
  return [r, g, b];
}

export interface PointMark {
  center: { x: number; y: number };
  radius: number;
  color: string;
  alpha: number; // train solid, test transparent
  selected: boolean;
}

export interface ArrowMark {
  segment: ArrowSegment;
  color: string;
}

export interface Scene {
  points: PointMark[];
  arrows: ArrowMark[];
}

export function buildScene(
  vp: Viewport,
  train: LabeledExample[],
  test: LabeledExample[],
  annotations: Annotation[],
  draft: { originIndex: number; vector: [number, number] } | null,
  selectedIndex: number | null,
): Scene {
  const points: PointMark[] = [];
  test.forEach((e) => {
    points.push({
      center: toScreen(vp, e.x),
      radius: 4,
      color: CLASS_COLORS[e.y],
      alpha: 0.3,
      selected: false,
    });
  });
  train.forEach((e, i) => {
    points.push({
      center: toScreen(vp, e.x),
      radius: 5.5,
      color: CLASS_COLORS[e.y],
      alpha: 1.0,
      selected: i === selectedIndex,
    });
  });
  const arrows: ArrowMark[] = annotations.map((a) => ({
    segment: arrowSegment(vp, train[a.example_index].x, a.direction),
    color: COMMITTED_COLOR,
  }));
  if (draft && (draft.vector[0] !== 0 || draft.vector[1] !== 0)) {
    const length = Math.min(
      ARROW_LENGTH_PX * 2,
      Math.hypot(draft.vector[0] * vp.scaleX, draft.vector[1] * vp.scaleY),
    );
    arrows.push({
      segment: arrowSegment(vp, train[draft.originIndex].x, draft.vector, length),
      color: DRAFT_COLOR,
    });
  }
  return { points, arrows };
}

/** RGBA pixel buffer for the probability grid; row 0 of the payload is
 * y_min, which is the BOTTOM row on screen. */
export function gridPixels(grid: GridPayload): Uint8ClampedArray {
  const n = grid.resolution;
  const pixels = new Uint8ClampedArray(n * n * 4);
  for (let row = 0; row < n; row++) {
    const screenRow = n - 1 - row;
    for (let col = 0; col < n; col++) {
      const [r, g, b] = probabilityColor(grid.values[row][col]);
      const at = (screenRow * n + col) * 4;
      pixels[at] = r;
      pixels[at + 1] = g;
      pixels[at + 2] = b;
      pixels[at + 3] = 210;
    }
  }
  return pixels;
}
