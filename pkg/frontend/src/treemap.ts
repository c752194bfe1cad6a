/** Squarified treemap layout. Pure geometry: given weighted items and a
 * viewport, produce rectangles whose areas are exactly proportional to the
 * weights. Rendering and interaction live in the views. */

export interface TreemapItem {
  id: string;
  /** file count for packages, 1 for files */
  size: number;
  /** null when the item is unannotated */
  colorKey: number | null;
  tooltip: string;
}

export interface TreemapRect extends TreemapItem {
  x: number;
  y: number;
  w: number;
  h: number;
}

interface Scaled {
  item: TreemapItem;
  area: number;
}

function worstAspect(areas: number[], side: number): number {
  const total = areas.reduce((a, b) => a + b, 0);
  const thickness = total / side;
  let worst = 1;
  for (const area of areas) {
    const span = area / thickness;
    worst = Math.max(worst, thickness / span, span / thickness);
  }
  return worst;
}

function layoutRow(
  row: Scaled[],
  x: number,
  y: number,
  w: number,
  h: number
): { rects: TreemapRect[]; rest: [number, number, number, number] } {
  const total = row.reduce((acc, s) => acc + s.area, 0);
  const rects: TreemapRect[] = [];
  if (w >= h) {
    // vertical strip on the left edge, cells stacked top to bottom
    const thickness = total / h;
    let pos = y;
    for (const s of row) {
      const span = s.area / thickness;
      rects.push({ ...s.item, x, y: pos, w: thickness, h: span });
      pos += span;
    }
    return { rects, rest: [x + thickness, y, w - thickness, h] };
  }
  // horizontal strip on the top edge, cells flowing left to right
  const thickness = total / w;
  let pos = x;
  for (const s of row) {
    const span = s.area / thickness;
    rects.push({ ...s.item, x: pos, y, w: span, h: thickness });
    pos += span;
  }
  return { rects, rest: [x, y + thickness, w, h - thickness] };
}

function squarify(
  items: Scaled[],
  x: number,
  y: number,
  w: number,
  h: number,
  out: TreemapRect[]
): void {
  if (items.length === 0) return;
  const side = Math.min(w, h);
  let row = [items[0]];
  let i = 1;
  while (i < items.length) {
    const current = worstAspect(row.map((s) => s.area), side);
    const extended = worstAspect([...row, items[i]].map((s) => s.area), side);
    if (extended > current) break;
    row.push(items[i]);
    i++;
  }
  const { rects, rest } = layoutRow(row, x, y, w, h);
  out.push(...rects);
  squarify(items.slice(i), ...rest, out);
}

/**
 * Lay `items` out inside a `width` x `height` viewport. Items with
 * non-positive size are rejected (every package has at least one file and
 * every file counts as one). Output order matches input order.
 */
export function computeTreemap(
  items: TreemapItem[],
  width: number,
  height: number
): TreemapRect[] {
  if (items.length === 0) return [];
  for (const item of items) {
    if (item.size <= 0) throw new Error(`treemap item ${item.id} has size ${item.size}`);
  }
  const total = items.reduce((acc, it) => acc + it.size, 0);
  const scale = (width * height) / total;
  const scaled: Scaled[] = items
    .map((item) => ({ item, area: item.size * scale }))
    .sort((a, b) => b.area - a.area);
  const out: TreemapRect[] = [];
  squarify(scaled, 0, 0, width, height, out);
  const order = new Map(items.map((it, i) => [it.id, i]));
  out.sort((a, b) => (order.get(a.id) ?? 0) - (order.get(b.id) ?? 0));
  return out;
}
