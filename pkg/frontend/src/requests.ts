/**
 * Translation from view state to backend request parameters. Keeping this
 * pure lets the linked-view wiring (heatmap click -> map refresh, etc.) be
 * tested without a browser or a server.
 */

import type { ViewState } from "./state";

/** Query parameters for the map view under the current selection. */
export function mapRequestParams(state: ViewState): URLSearchParams {
  const params = new URLSearchParams();
  if (state.mode === "rule" && state.selectedRule !== null) {
    params.set("ruleKey", state.selectedRule);
  } else if (state.selectedCluster !== null) {
    params.set("clusterId", String(state.selectedCluster));
  }
  if (state.sliceFilter !== null) {
    params.set("slices", state.sliceFilter.join(","));
  }
  return params;
}

/** Query parameters for the attributes and heatmap views. */
export function matrixRequestParams(state: ViewState): URLSearchParams {
  const params = new URLSearchParams();
  params.set("level", state.mode);
  if (state.mode === "rule" && state.selectedCluster !== null) {
    params.set("clusterId", String(state.selectedCluster));
  }
  return params;
}

/** Query parameters for the cluster scatterplot. */
export function scatterRequestParams(state: ViewState): URLSearchParams {
  const params = new URLSearchParams();
  params.set("xMetric", state.scatterAxes.x);
  params.set("yMetric", state.scatterAxes.y);
  return params;
}
