/**
 * View state for the coordinated views, advanced by a pure reducer.
 *
 * Invariants enforced here rather than in the components:
 *  - rule mode requires a selected cluster (the attributes and heatmap views
 *    only become rule-eligible once a cluster is picked);
 *  - switching back to cluster mode clears any rule selection;
 *  - dropping the cluster selection forces cluster mode.
 */

import type { Level, ScatterMetric } from "./types";

export interface ViewState {
  mode: Level;
  selectedCluster: number | null;
  selectedRule: string | null;
  sliceFilter: number[] | null;
  placeFilter: string[] | null;
  scatterAxes: { x: ScatterMetric; y: ScatterMetric };
}

export type ViewEvent =
  | { type: "select-cluster"; clusterId: number }
  | { type: "clear-cluster" }
  | { type: "set-mode"; mode: Level }
  | { type: "select-rule"; ruleKey: string }
  | { type: "clear-rule" }
  | { type: "toggle-slice"; sliceIndex: number }
  | { type: "clear-slice-filter" }
  | { type: "set-place-filter"; places: string[] | null }
  | { type: "set-scatter-axes"; x: ScatterMetric; y: ScatterMetric };

export function initialState(): ViewState {
  return {
    mode: "cluster",
    selectedCluster: null,
    selectedRule: null,
    sliceFilter: null,
    placeFilter: null,
    scatterAxes: { x: "ruleCount", y: "meanLift" },
  };
}

/** Pure transition function; never mutates the incoming state. */
export function reduce(state: ViewState, event: ViewEvent): ViewState {
  switch (event.type) {
    case "select-cluster": {
      if (state.selectedCluster === event.clusterId) return state;
      // A rule selection belongs to its cluster; changing cluster drops it.
      return { ...state, selectedCluster: event.clusterId, selectedRule: null };
    }
    case "clear-cluster":
      return {
        ...state,
        selectedCluster: null,
        selectedRule: null,
        mode: "cluster",
      };
    case "set-mode": {
      if (event.mode === state.mode) return state;
      if (event.mode === "rule" && state.selectedCluster === null) {
        return state; // rule mode requires a cluster selection
      }
      if (event.mode === "cluster") {
        return { ...state, mode: "cluster", selectedRule: null };
      }
      return { ...state, mode: "rule" };
    }
    case "select-rule": {
      if (state.mode !== "rule") return state;
      return { ...state, selectedRule: event.ruleKey };
    }
    case "clear-rule":
      return state.selectedRule === null
        ? state
        : { ...state, selectedRule: null };
    case "toggle-slice": {
      const current = state.sliceFilter ?? [];
      const next = current.includes(event.sliceIndex)
        ? current.filter((s) => s !== event.sliceIndex)
        : [...current, event.sliceIndex].sort((a, b) => a - b);
      return { ...state, sliceFilter: next.length ? next : null };
    }
    case "clear-slice-filter":
      return state.sliceFilter === null ? state : { ...state, sliceFilter: null };
    case "set-place-filter":
      return { ...state, placeFilter: event.places };
    case "set-scatter-axes":
      return { ...state, scatterAxes: { x: event.x, y: event.y } };
  }
}

/** The Explain button is only offered in rule mode with a rule picked. */
export function explainEnabled(state: ViewState): boolean {
  return state.mode === "rule" && state.selectedRule !== null;
}
