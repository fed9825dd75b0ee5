// Data-space <-> screen-space mapping and arrow geometry. Screen y grows
// downward, so the viewport flips the vertical axis.

export interface Viewport {
  scaleX: number;
  scaleY: number;
  offsetX: number; // screen x of data x = 0
  offsetY: number; // screen y of data y = 0
}

export interface ScreenPoint {
  x: number;
  y: number;
}

export const ARROW_LENGTH_PX = 42;
export const ARROW_HEAD_PX = 7;
export const SNAP_RADIUS_PX = 14;

export function makeViewport(
  bounds: { x_min: number; x_max: number; y_min: number; y_max: number },
  width: number,
  height: number,
): Viewport {
  const scaleX = width / (bounds.x_max - bounds.x_min);
  const scaleY = height / (bounds.y_max - bounds.y_min);
  return {
    scaleX,
    scaleY,
    offsetX: -bounds.x_min * scaleX,
    offsetY: bounds.y_max * scaleY,
  };
}

/** Unit mapping with the standard vertical flip; used by tests. */
export function identityViewport(): Viewport {
  return { scaleX: 1, scaleY: 1, offsetX: 0, offsetY: 0 };
}

export function toScreen(vp: Viewport, p: [number, number]): ScreenPoint {
  return { x: vp.offsetX + p[0] * vp.scaleX, y: vp.offsetY - p[1] * vp.scaleY };
}

export function toData(vp: Viewport, s: ScreenPoint): [number, number] {
  return [(s.x - vp.offsetX) / vp.scaleX, (vp.offsetY - s.y) / vp.scaleY];
}

export interface ArrowSegment {
  from: ScreenPoint;
  to: ScreenPoint;
  head: [ScreenPoint, ScreenPoint];
}

/** Fixed-pixel-length arrow from a data point along a data-space
 * direction; the screen direction is the viewport image of the stored
 * vector. */
export function arrowSegment(
  vp: Viewport,
  origin: [number, number],
  direction: [number, number],
  lengthPx = ARROW_LENGTH_PX,
): ArrowSegment {
  const from = toScreen(vp, origin);
  const dx = direction[0] * vp.scaleX;
  const dy = -direction[1] * vp.scaleY;
  const norm = Math.hypot(dx, dy) || 1;
  const ux = dx / norm;
  const uy = dy / norm;
  const to = { x: from.x + ux * lengthPx, y: from.y + uy * lengthPx };
  const head: [ScreenPoint, ScreenPoint] = [
    {
      x: to.x - ARROW_HEAD_PX * (ux * 0.866 - uy * 0.5),
      y: to.y - ARROW_HEAD_PX * (uy * 0.866 + ux * 0.5),
    },
    {
      x: to.x - ARROW_HEAD_PX * (ux * 0.866 + uy * 0.5),
      y: to.y - ARROW_HEAD_PX * (uy * 0.866 - ux * 0.5),
    },
  ];
  return { from, to, head };
}

/** Index of the nearest training point within the snap radius, or null. */
export function nearestPointIndex(
  vp: Viewport,
  points: [number, number][],
  cursor: ScreenPoint,
  radiusPx = SNAP_RADIUS_PX,
): number | null {
  let best: number | null = null;
  let bestDist = radiusPx;
  points.forEach((p, i) => {
    const s = toScreen(vp, p);
    const dist = Math.hypot(s.x - cursor.x, s.y - cursor.y);
    if (dist <= bestDist) {
      best = i;
      bestDist = dist;
    }
  });
  return best;
}
