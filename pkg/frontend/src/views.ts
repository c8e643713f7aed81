/**
 * Pure view-model builders: payloads in, renderable cell/region lists out.
 * The row order always comes from the server payload untouched, so the
 * attributes view and the heatmap stay aligned row for row.
 */

import { circleFill, circleRadius, sequentialColor } from "./scales";
import type {
  AttributeMatrixPayload,
  HeatmapPayload,
  MapPayload,
} from "./types";

export interface AttributeCircle {
  row: string;
  column: string;
  radius: number;
  fill: string;
}

export interface HeatmapCell {
  row: string;
  sliceIndex: number;
  label: string;
  count: number;
  color: string;
}

export interface MapRegion {
  place: string;
  count: number;
  color: string;
}

/** Row order of any payload is exactly the server's order. */
export function rowOrder(payload: { rows: string[] }): string[] {
  return [...payload.rows];
}

export function attributeCircles(
  payload: AttributeMatrixPayload,
): AttributeCircle[] {
  return payload.cells.map((cell) => ({
    row: cell.row,
    column: cell.column,
    radius: circleRadius(cell.frequency, payload.level),
    fill: circleFill(cell.role),
  }));
}

export function heatmapCells(payload: HeatmapPayload): HeatmapCell[] {
  const max = Math.max(0, ...payload.counts.flat());
  const cells: HeatmapCell[] = [];
  payload.rows.forEach((row, r) => {
    payload.sliceIndices.forEach((sliceIndex, c) => {
      const count = payload.counts[r][c];
      cells.push({
        row,
        sliceIndex,
        label: payload.sliceLabels[c],
        count,
        color: sequentialColor(count, max),
      });
    });
  });
  return cells;
}

export function mapRegions(payload: MapPayload): MapRegion[] {
  const max = Math.max(0, ...Object.values(payload.places));
  return Object.entries(payload.places).map(([place, count]) => ({
    place,
    count,
    color: sequentialColor(count, max),
  }));
}
