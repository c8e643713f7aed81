/**
 * Payload types for the /api/v1 backend. The frontend consumes these
 * shapes exclusively; nothing here reaches into server internals.
 */

export type Level = "cluster" | "rule";

export type ScatterMetric =
  | "ruleCount"
  | "meanLift"
  | "meanSupport"
  | "meanConfidence"
  | "meanOccurrences";

export interface DatasetReport {
  totalRows: number;
  keptRows: number;
  droppedNullRows: number;
  droppedUnparseableDateRows: number;
  unmatchedPlaces: string[];
}

export interface RunSummary {
  runId: string;
  status: "pending" | "mining" | "clustering" | "ready" | "failed";
  error?: string;
  summary?: {
    numRules: number;
    numClusters: number;
    modularity: number;
    numSlices: number;
  };
}

export type CellRole = "antecedent" | "consequent" | "mixed";

export interface AttributeMatrixCell {
  row: string;
  column: string;
  frequency: number;
  role: CellRole;
}

export interface AttributeMatrixPayload {
  level: Level;
  rows: string[];
  columns: string[];
  cells: AttributeMatrixCell[];
}

export interface HeatmapPayload {
  level: Level;
  rows: string[];
  sliceLabels: string[];
  sliceIndices: number[];
  counts: number[][];
}

export interface MapPayload {
  places: Record<string, number>;
  total: number;
}

export interface ScatterPayload {
  xMetric: ScatterMetric;
  yMetric: ScatterMetric;
  points: { cluster: number; x: number; y: number }[];
}

export interface ExplainSource {
  title: string;
  url: string;
}

export interface ExplainHypothesis {
  hypothesis: string;
  description: string;
  sources: ExplainSource[];
}

export interface ExplainPayload {
  hypotheses: ExplainHypothesis[];
}
