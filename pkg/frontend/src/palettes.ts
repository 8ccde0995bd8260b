import { Color } from "three";

/**
 * Color ramps per glyph palette. Each maps the scene document's scalar in
 * [0, 1] to a color; scalars outside the range are clamped. Glyph kinds stay
 * visually distinct: classes run blue to red with intensity, data files run
 * pale to saturated green, tables run lilac to purple, districts are stone
 * gray shaded by the scalar, neutral/binary are flat grays.
 */

const ramp = (lo: string, hi: string) => {
  const a = new Color(lo);
  const b = new Color(hi);
  return (t: number) => a.clone().lerp(b, clamp01(t));
};

const clamp01 = (t: number) => Math.min(Math.max(t, 0), 1);

const RAMPS: Record<string, (t: number) => Color> = {
  class: ramp("#4877d0", "#d04848"),
  data: ramp("#bfe3bf", "#2e8b57"),
  table: ramp("#cdb8e8", "#6a3bbf"),
  district: ramp("#8a8a92", "#6e6e76"),
  neutral: () => new Color("#9a9a9a"),
  binary: () => new Color("#707070"),
};

export const MOVE_ARC_COLOR = new Color("#e8c830");
export const ACCESS_LINE_COLOR = new Color("#7aa0c4");
export const HIGHLIGHT_COLOR = new Color("#ffd166");

export function paletteColor(palette: string, scalar: number): Color {
  const fn = RAMPS[palette] ?? RAMPS.neutral;
  return fn(scalar);
}
