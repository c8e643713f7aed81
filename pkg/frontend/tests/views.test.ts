import { describe, expect, it } from "vitest";

import { lightestColor, MAX_RADIUS } from "../src/scales";
import {
  attributeCircles,
  heatmapCells,
  mapRegions,
  rowOrder,
} from "../src/views";
import type {
  AttributeMatrixPayload,
  HeatmapPayload,
  MapPayload,
} from "../src/types";

import matrixClusters from "./fixtures/attribute-matrix.json";
import matrixRules from "./fixtures/attribute-matrix-rules.json";
import heatmapClusters from "./fixtures/heatmap.json";
import heatmapRules from "./fixtures/heatmap-rules.json";
import mapAll from "./fixtures/map-all.json";

const matrixC = matrixClusters as AttributeMatrixPayload;
const matrixR = matrixRules as AttributeMatrixPayload;
const heatC = heatmapClusters as HeatmapPayload;
const heatR = heatmapRules as HeatmapPayload;

describe("row order", () => {
  it("equals the payload order untouched", () => {
    expect(rowOrder(heatC)).toEqual(heatC.rows);
    expect(rowOrder(matrixC)).toEqual(matrixC.rows);
  });

  it("attributes and heatmap views agree for the same run", () => {
    expect(rowOrder(matrixC)).toEqual(rowOrder(heatC));
    expect(rowOrder(matrixR)).toEqual(rowOrder(heatR));
  });
});

describe("attribute circles", () => {
  it("cluster-level radii vary with frequency", () => {
    const radii = new Set(attributeCircles(matrixC).map((c) => c.radius));
    expect(radii.size).toBeGreaterThan(1);
  });

  it("rule-level radii are uniform", () => {
    for (const circle of attributeCircles(matrixR)) {
      expect(circle.radius).toBe(MAX_RADIUS);
    }
  });

  it("fills follow the cell role", () => {
    const circles = attributeCircles(matrixR);
    const byRole = new Map(
      matrixR.cells.map((cell, i) => [cell.role, circles[i].fill]),
    );
    if (byRole.has("antecedent")) expect(byRole.get("antecedent")).toBe("#ffffff");
    if (byRole.has("consequent")) expect(byRole.get("consequent")).toBe("#000000");
  });
});

describe("heatmap cells", () => {
  it("zero-count cells take the lightest color", () => {
    const cells = heatmapCells(heatR);
    const zeros = cells.filter((c) => c.count === 0);
    expect(zeros.length).toBeGreaterThan(0);
    for (const cell of zeros) {
      expect(cell.color).toBe(lightestColor());
    }
  });

  it("covers every row x slice pair with matching labels", () => {
    const cells = heatmapCells(heatC);
    expect(cells.length).toBe(heatC.rows.length * heatC.sliceLabels.length);
    const july = cells.find((c) => c.label === "2017-07");
    expect(july?.sliceIndex).toBe(18);
  });
});

describe("map regions", () => {
  it("zero-count regions take the lightest color bucket", () => {
    const payload: MapPayload = {
      places: { ...mapAll.places, Nowhere: 0 },
      total: mapAll.total,
    };
    const regions = mapRegions(payload);
    const nowhere = regions.find((r) => r.place === "Nowhere");
    expect(nowhere?.color).toBe(lightestColor());
    const busiest = regions.reduce((a, b) => (a.count >= b.count ? a : b));
    expect(busiest.color).not.toBe(lightestColor());
  });
});
