/**
 * Rendering-scale helpers shared by the views.
 *
 * Circle radii in the attributes view encode frequency at cluster level
 * (area-proportional, so strictly monotone in frequency) and are uniform at
 * rule level, where presence is binary. Counts map onto a single-hue
 * sequential ramp whose lightest bucket is reserved for zero.
 */

import type { CellRole, Level } from "./types";

export const MAX_RADIUS = 8;
export const MIN_RADIUS = 1.5;

/** Radius for one attribute-matrix circle. Frequency is in [0, 1]. */
export function circleRadius(frequency: number, level: Level): number {
  if (level === "rule") return MAX_RADIUS; // all circles equal size
  if (!(frequency >= 0) || frequency > 1) {
    throw new RangeError(`frequency ${frequency} outside [0, 1]`);
  }
  if (frequency === 0) return 0;
  return MIN_RADIUS + (MAX_RADIUS - MIN_RADIUS) * Math.sqrt(frequency);
}

/**
 * Fill for an attribute circle: white antecedent, black consequent, and a
 * mid gray for cluster-level cells mixing both roles.
 */
export function circleFill(role: CellRole): string {
  switch (role) {
    case "antecedent":
      return "#ffffff";
    case "consequent":
      return "#000000";
    case "mixed":
      return "#9e9e9e";
  }
}

const RAMP_LIGHTEST: [number, number, number] = [239, 243, 255];
const RAMP_DARKEST: [number, number, number] = [8, 48, 107];

function hex(channel: number): string {
  return Math.round(channel).toString(16).padStart(2, "0");
}

/**
 * Sequential single-hue color for a count against the view's maximum.
 * Zero always takes the lightest bucket exactly; the rest of the domain is
 * offset away from it so any nonzero count is visibly darker.
 */
export function sequentialColor(count: number, max: number): string {
  if (count < 0 || max < 0) throw new RangeError("counts must be nonnegative");
  let t = 0;
  if (count > 0 && max > 0) {
    t = 0.15 + 0.85 * Math.min(count / max, 1);
  }
  const rgb = RAMP_LIGHTEST.map(
    (light, i) => light + (RAMP_DARKEST[i] - light) * t,
  );
  return `#${hex(rgb[0])}${hex(rgb[1])}${hex(rgb[2])}`;
}

/** The lightest ramp color, i.e. what zero-count cells and regions get. */
export function lightestColor(): string {
  return sequentialColor(0, 1);
}
