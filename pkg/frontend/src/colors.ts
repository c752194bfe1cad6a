/** Stable label colors: a pure function of the label id, so the same label
 * gets the same color in every view and every session. Unannotated items get
 * a reserved neutral grey that no label can collide with. */

export const UNANNOTATED_COLOR = '#b0b0b0';

// Golden-angle walk around the hue wheel keeps adjacent ids visually distinct.
const GOLDEN_ANGLE = 137.508;

export function labelColor(labelId: number): string {
  const hue = (labelId * GOLDEN_ANGLE) % 360;
  const lightness = 58 + (labelId % 3) * 6;
  return `hsl(${hue.toFixed(1)}, 62%, ${lightness}%)`;
}
