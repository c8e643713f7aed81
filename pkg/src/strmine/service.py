"""HTTP API over the mining pipeline: dataset upload, runs, and view payloads.

All routes live under /api/v1. Runs are immutable once ready; every read
endpoint is a pure function of the run state, so repeated calls return
identical payloads.
"""

from __future__ import annotations

import datetime as _dt
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

from fastapi import FastAPI, File, HTTPException, UploadFile
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from . import analytics, explain as explain_mod, ingest, pipeline
from .pipeline import RunArtifacts, RunConfig
from .store import Store, content_hash

SCATTER_METRICS = (
    "ruleCount",
    "meanLift",
    "meanSupport",
    "meanConfidence",
    "meanOccurrences",
)


def _error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status, detail={"code": code, "message": message})


class RunConfigBody(BaseModel):
    attributeColumns: list[str]
    startDate: _dt.date
    endDate: _dt.date
    granularity: str = "month"
    minSupport: float = 0.05
    minLift: float = 1.0
    resolution: float = 1.0
    seed: int = 0
    maxRuleLen: int = 5
    datasetNoun: str = "dataset"

    def to_config(self) -> RunConfig:
        try:
            return RunConfig(
                attribute_columns=tuple(self.attributeColumns),
                start_date=self.startDate,
                end_date=self.endDate,
                granularity=self.granularity,
                min_support=self.minSupport,
                min_lift=self.minLift,
                resolution=self.resolution,
                seed=self.seed,
                max_rule_len=self.maxRuleLen,
                dataset_noun=self.datasetNoun,
            )
        except Exception as exc:
            raise _error(400, "InvalidConfig", str(exc)) from None


class CreateRunBody(BaseModel):
    datasetId: str
    config: RunConfigBody


class ExplainBody(BaseModel):
    ruleKey: str
    places: list[str] | None = None
    sliceLabels: list[str] | None = None


@dataclass
class RunState:
    run_id: str
    dataset_id: str
    config: RunConfig
    status: str = "pending"  # pending|mining|clustering|ready|failed
    artifacts: RunArtifacts | None = None
    error: str | None = None


@dataclass
class AppState:
    store: Store
    provider: explain_mod.TextProvider | None = None
    runs: dict[str, RunState] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    executor: ThreadPoolExecutor = field(
        default_factory=lambda: ThreadPoolExecutor(max_workers=2)
    )


def _config_to_doc(body: RunConfigBody) -> dict:
    return json.loads(body.model_dump_json())


def _execute_run(state: AppState, run: RunState) -> None:
    try:
        record = state.store.get("dataset", run.dataset_id)
        if record is None:
            raise _error(404, "UnknownDataset", run.dataset_id)
        csv_bytes = Store.decode_bytes(record["events"])
        run.status = "mining"
        events, _, _ = ingest.parse_events_csv(
            csv_bytes, list(run.config.attribute_columns)
        )
        run.status = "clustering"
        run.artifacts = pipeline.run_pipeline(events, run.config)
        run.status = "ready"
    except Exception as exc:  # failed runs keep the diagnostic
        run.status = "failed"
        run.error = str(exc)


def create_app(
    data_dir: str,
    provider: explain_mod.TextProvider | None = None,
    synchronous: bool = False,
) -> FastAPI:
    """Build the API app. `synchronous` runs pipelines inline (tests)."""
    app = FastAPI(title="strmine")
    state = AppState(store=Store(data_dir), provider=provider)
    app.state.strmine = state

    def _run_or_404(run_id: str) -> RunState:
        run = state.runs.get(run_id)
        if run is None:
            record = state.store.get("run", run_id)
            if record is None:
                raise _error(404, "UnknownRun", run_id)
            # Restart path: recompute deterministically from stored inputs.
            run = RunState(
                run_id=run_id,
                dataset_id=record["datasetId"],
                config=RunConfigBody(**record["config"]).to_config(),
            )
            state.runs[run_id] = run
            _execute_run(state, run)
        return run

    def _ready_or_409(run_id: str) -> RunArtifacts:
        run = _run_or_404(run_id)
        if run.status == "failed":
            raise _error(500, "RunFailed", run.error or "run failed")
        if run.status != "ready" or run.artifacts is None:
            raise _error(409, "NotReady", f"run status is {run.status}")
        return run.artifacts

    @app.post("/api/v1/datasets", status_code=201)
    async def create_dataset(
        events: UploadFile = File(...), regions: UploadFile = File(...)
    ) -> dict:
        csv_bytes = await events.read()
        geojson_bytes = await regions.read()
        try:
            parsed_regions = ingest.parse_regions_geojson(geojson_bytes)
            # Upload-time report cleans over every attribute column; runs
            # re-ingest with their own selection.
            probe_events, descriptor, report = ingest.parse_events_csv(
                csv_bytes, []
            )
            report.unmatched_places = ingest.validate_region_coverage(
                probe_events, parsed_regions
            )
        except ingest.IngestError as exc:
            raise _error(400, type(exc).__name__, str(exc)) from None
        dataset_id = content_hash(csv_bytes, geojson_bytes)
        state.store.put(
            "dataset",
            dataset_id,
            {
                "events": Store.encode_bytes(csv_bytes),
                "regions": Store.encode_bytes(geojson_bytes),
                "descriptor": {
                    "columns": list(descriptor.columns),
                    "attributeColumns": list(descriptor.attribute_columns),
                    "rowCount": descriptor.row_count,
                    "dateColumn": descriptor.date_column,
                    "placeColumn": descriptor.place_column,
                },
                "report": {
                    "totalRows": report.total_rows,
                    "keptRows": report.kept_rows,
                    "droppedNullRows": report.dropped_null_rows,
                    "droppedUnparseableDateRows": report.dropped_unparseable_date_rows,
                    "unmatchedPlaces": sorted(report.unmatched_places),
                },
            },
        )
        record = state.store.get("dataset", dataset_id)
        assert record is not None
        return {
            "datasetId": dataset_id,
            "descriptor": record["descriptor"],
            "report": record["report"],
        }

    @app.get("/api/v1/datasets/{dataset_id}")
    def get_dataset(dataset_id: str) -> dict:
        record = state.store.get("dataset", dataset_id)
        if record is None:
            raise _error(404, "UnknownDataset", dataset_id)
        return {
            "datasetId": dataset_id,
            "descriptor": record["descriptor"],
            "report": record["report"],
        }

    @app.get("/api/v1/datasets/{dataset_id}/regions")
    def get_dataset_regions(dataset_id: str) -> Any:
        record = state.store.get("dataset", dataset_id)
        if record is None:
            raise _error(404, "UnknownDataset", dataset_id)
        return json.loads(Store.decode_bytes(record["regions"]))

    @app.post("/api/v1/runs", status_code=202)
    def create_run(body: CreateRunBody) -> dict:
        if state.store.get("dataset", body.datasetId) is None:
            raise _error(404, "UnknownDataset", body.datasetId)
        config = body.config.to_config()
        config_doc = _config_to_doc(body.config)
        run_id = content_hash(
            body.datasetId.encode(),
            json.dumps(config_doc, sort_keys=True).encode(),
        )
        with state.lock:
            existing = state.runs.get(run_id)
            if existing is None:
                run = RunState(run_id=run_id, dataset_id=body.datasetId, config=config)
                state.runs[run_id] = run
                state.store.put(
                    "run", run_id, {"datasetId": body.datasetId, "config": config_doc}
                )
                if synchronous:
                    _execute_run(state, run)
                else:
                    state.executor.submit(_execute_run, state, run)
        return {"runId": run_id}

    @app.get("/api/v1/runs/{run_id}")
    def get_run(run_id: str) -> dict:
        run = _run_or_404(run_id)
        out: dict[str, Any] = {"runId": run.run_id, "status": run.status}
        if run.error:
            out["error"] = run.error
        if run.artifacts is not None:
            out["summary"] = {
                "numRules": len(run.artifacts.rules),
                "numClusters": len(run.artifacts.clusters),
                "modularity": run.artifacts.partition.modularity,
                "numSlices": len(run.artifacts.slices),
            }
        return out

    @app.get("/api/v1/runs/{run_id}/artifact", response_class=PlainTextResponse)
    def get_artifact(run_id: str) -> str:
        artifacts = _ready_or_409(run_id)
        return pipeline.artifact_json(artifacts)

    def _cluster_members(artifacts: RunArtifacts, cluster_id: int):
        if cluster_id not in artifacts.clusters:
            raise _error(404, "UnknownCluster", str(cluster_id))
        keys = set(artifacts.clusters[cluster_id])
        return [cr for cr in artifacts.rules if cr.key in keys]

    @app.get("/api/v1/runs/{run_id}/attribute-matrix")
    def get_attribute_matrix(
        run_id: str, level: str = "cluster", clusterId: int | None = None
    ) -> dict:
        artifacts = _ready_or_409(run_id)
        if level == "cluster":
            clusters = {
                cid: _cluster_members(artifacts, cid) for cid in artifacts.clusters
            }
            matrix = analytics.attribute_matrix_clusters(
                clusters, artifacts.cluster_order
            )
        elif level == "rule":
            if clusterId is None:
                raise _error(400, "UnknownCluster", "rule level needs clusterId")
            members = _cluster_members(artifacts, clusterId)
            matrix = analytics.attribute_matrix_rules(
                members, artifacts.rule_orders[clusterId]
            )
        else:
            raise _error(400, "InvalidLevel", level)
        return {
            "level": level,
            "rows": list(matrix.rows),
            "columns": list(matrix.columns),
            "cells": [
                {
                    "row": row,
                    "column": column,
                    "frequency": cell.frequency,
                    "role": cell.role,
                }
                for (row, column), cell in sorted(matrix.cells.items())
            ],
        }

    @app.get("/api/v1/runs/{run_id}/heatmap")
    def get_heatmap(
        run_id: str, level: str = "cluster", clusterId: int | None = None
    ) -> dict:
        artifacts = _ready_or_409(run_id)
        labels = [s.label for s in artifacts.slices]
        if level == "cluster":
            rows = [str(cid) for cid in artifacts.cluster_order]
            counts = [
                artifacts.cluster_profiles[cid].slice_vector(artifacts.slices)
                for cid in artifacts.cluster_order
            ]
        elif level == "rule":
            if clusterId is None:
                raise _error(400, "UnknownCluster", "rule level needs clusterId")
            if clusterId not in artifacts.clusters:
                raise _error(404, "UnknownCluster", str(clusterId))
            rows = list(artifacts.rule_orders[clusterId])
            counts = [
                artifacts.rule_profiles[key].slice_vector(artifacts.slices)
                for key in rows
            ]
        else:
            raise _error(400, "InvalidLevel", level)
        return {
            "level": level,
            "rows": rows,
            "sliceLabels": labels,
            "sliceIndices": [s.index for s in artifacts.slices],
            "counts": counts,
        }

    @app.get("/api/v1/runs/{run_id}/map")
    def get_map(
        run_id: str,
        clusterId: int | None = None,
        ruleKey: str | None = None,
        slices: str | None = None,
    ) -> dict:
        artifacts = _ready_or_409(run_id)
        if ruleKey is not None:
            profile = artifacts.rule_profiles.get(ruleKey)
            if profile is None:
                raise _error(404, "UnknownRule", ruleKey)
        elif clusterId is not None:
            if clusterId not in artifacts.cluster_profiles:
                raise _error(404, "UnknownCluster", str(clusterId))
            profile = artifacts.cluster_profiles[clusterId]
        else:
            profile = artifacts.overall_profile
        if profile is None:
            return {"places": {}, "total": 0}
        if slices:
            try:
                wanted = {int(s) for s in slices.split(",")}
            except ValueError:
                raise _error(400, "InvalidSliceFilter", slices) from None
            places = {p: 0 for p in profile.place_totals}
            for (slice_index, place), count in profile.counts.items():
                if slice_index in wanted:
                    places[place] += count
        else:
            places = dict(profile.place_totals)
        places = dict(sorted(places.items()))
        return {"places": places, "total": sum(places.values())}

    @app.get("/api/v1/runs/{run_id}/scatter")
    def get_scatter(
        run_id: str, xMetric: str = "ruleCount", yMetric: str = "meanLift"
    ) -> dict:
        artifacts = _ready_or_409(run_id)
        for metric in (xMetric, yMetric):
            if metric not in SCATTER_METRICS:
                raise _error(400, "UnknownMetric", metric)

        def value(summary: analytics.ClusterSummary, metric: str) -> float:
            return {
                "ruleCount": summary.rule_count,
                "meanLift": summary.mean_lift,
                "meanSupport": summary.mean_support,
                "meanConfidence": summary.mean_confidence,
                "meanOccurrences": summary.mean_occurrences,
            }[metric]

        return {
            "xMetric": xMetric,
            "yMetric": yMetric,
            "points": [
                {
                    "cluster": cid,
                    "x": value(artifacts.summaries[cid], xMetric),
                    "y": value(artifacts.summaries[cid], yMetric),
                }
                for cid in sorted(artifacts.summaries)
            ],
        }

    @app.post("/api/v1/runs/{run_id}/explain")
    def post_explain(run_id: str, body: ExplainBody) -> dict:
        artifacts = _ready_or_409(run_id)
        rule = artifacts.rule_by_key(body.ruleKey)
        if rule is None:
            raise _error(404, "UnknownRule", body.ruleKey)
        if state.provider is None:
            raise _error(503, "ProviderUnavailable", "no text provider configured")
        req = explain_mod.select_default_context(
            rule,
            artifacts.rule_profiles[body.ruleKey],
            artifacts.slices,
            dataset_noun=artifacts.config.dataset_noun,
            locations=body.places,
            slice_labels=body.sliceLabels,
        )
        try:
            result = explain_mod.explain(req, state.provider)
        except explain_mod.ProviderUnavailable as exc:
            raise _error(503, "ProviderUnavailable", str(exc)) from None
        except (explain_mod.NotJson, explain_mod.WrongShape) as exc:
            raise _error(502, type(exc).__name__, str(exc)) from None
        return {
            "hypotheses": [
                {
                    "hypothesis": h.hypothesis,
                    "description": h.description,
                    "sources": [
                        {"title": s.title, "url": s.url} for s in h.sources
                    ],
                }
                for h in result.hypotheses
            ]
        }

    return app
