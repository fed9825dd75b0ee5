// Data-space <-> screen-space mapping and arrow geometry. Screen y grows
// downward, so the viewport flips the vertical axis.
export const ARROW_LENGTH_PX = 42;
export const ARROW_HEAD_PX = 7;
export const SNAP_RADIUS_PX = 14;
export function makeViewport(bounds, width, height) {
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
export function identityViewport() {
    return { scaleX: 1, scaleY: 1, offsetX: 0, offsetY: 0 };
}
export function toScreen(vp, p) {
    return { x: vp.offsetX + p[0] * vp.scaleX, y: vp.offsetY - p[1] * vp.scaleY };
}
export function toData(vp, s) {
    return [(s.x - vp.offsetX) / vp.scaleX, (vp.offsetY - s.y) / vp.scaleY];
}
/** Fixed-pixel-length arrow from a data point along a data-space
 * direction; the screen direction is the viewport image of the stored
 * vector. */
export function arrowSegment(vp, origin, direction, lengthPx = ARROW_LENGTH_PX) {
    const from = toScreen(vp, origin);
    const dx = direction[0] * vp.scaleX;
    const dy = -direction[1] * vp.scaleY;
    const norm = Math.hypot(dx, dy) || 1;
    const ux = dx / norm;
    const uy = dy / norm;
    const to = { x: from.x + ux * lengthPx, y: from.y + uy * lengthPx };
    const head = [
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
export function nearestPointIndex(vp, points, cursor, radiusPx = SNAP_RADIUS_PX) {
    let best = null;
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
