"""End-to-end run pipeline and its versioned JSON artifact.

slice -> mine -> merge -> collapse -> similarity graph -> communities ->
profiles -> summaries -> row orders. A run is a pure function of
(events, config), so fixed seeds give byte-identical artifacts.
"""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field
from typing import Sequence

from . import analytics, clustering, dedup, mining
from .analytics import ClusterSummary, RuleProfile
from .clustering import Partition
from .dedup import CanonicalRule
from .model import Event, TimeSlice

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    attribute_columns: tuple[str, ...]
    start_date: _dt.date
    end_date: _dt.date
    granularity: str = "month"
    min_support: float = 0.05
    min_lift: float = 1.0
    resolution: float = 1.0
    seed: int = 0
    max_rule_len: int = 5
    region_id_property: str = "name"
    dataset_noun: str = "dataset"

    def __post_init__(self) -> None:
        if self.start_date > self.end_date:
            raise ConfigError("start_date must not be after end_date")
        if not (0.0 < self.min_support <= 1.0):
            raise ConfigError("min_support must be in (0, 1]")
        if self.resolution <= 0.0:
            raise ConfigError("resolution must be positive")
        if self.granularity not in mining.GRANULARITIES:
            raise ConfigError(f"unknown granularity {self.granularity!r}")

    def mining_config(self) -> mining.MiningConfig:
        return mining.MiningConfig(
            min_support=self.min_support,
            min_lift=self.min_lift,
            max_rule_len=self.max_rule_len,
        )


@dataclass
class RunArtifacts:
    config: RunConfig
    slices: tuple[TimeSlice, ...]
    rules: list[CanonicalRule]  # ordered by canonical key
    partition: Partition
    clusters: dict[int, list[str]]  # cluster id -> member rule keys
    rule_profiles: dict[str, RuleProfile]
    cluster_profiles: dict[int, RuleProfile]
    summaries: dict[int, ClusterSummary]
    cluster_order: list[int]
    rule_orders: dict[int, list[str]] = field(default_factory=dict)
    overall_profile: RuleProfile | None = None  # all rules, distinct records

    def rule_by_key(self, key: str) -> CanonicalRule | None:
        for cr in self.rules:
            if cr.key == key:
                return cr
        return None


def run_pipeline(events: Sequence[Event], config: RunConfig) -> RunArtifacts:
    """Execute the full mining/clustering/analytics pipeline."""
    sliced = mining.slice_partition(
        events, config.start_date, config.end_date, config.granularity
    )
    per_slice = mining.mine_slices(sliced, config.mining_config())
    merged = dedup.merge_across_slices(per_slice)
    rules = dedup.collapse_superfluous(merged)

    graph = clustering.build_similarity_graph(rules)
    if rules:
        partition = clustering.louvain(graph, config.resolution, config.seed)
    else:
        partition = Partition(
            assignment={},
            resolution=config.resolution,
            seed=config.seed,
            modularity=0.0,
        )

    clusters: dict[int, list[str]] = {}
    members: dict[int, list[CanonicalRule]] = {}
    for node, cluster_id in sorted(partition.assignment.items()):
        clusters.setdefault(cluster_id, []).append(rules[node].key)
        members.setdefault(cluster_id, []).append(rules[node])

    rule_profiles = {
        cr.key: analytics.rule_profile(cr, events, sliced.slices) for cr in rules
    }
    cluster_profiles = {
        cid: analytics.cluster_profile(members[cid], events, sliced.slices)
        for cid in sorted(clusters)
    }
    summaries = {
        cid: analytics.cluster_summary(
            cid, members[cid], [rule_profiles[k] for k in clusters[cid]]
        )
        for cid in sorted(clusters)
    }

    cluster_series = {
        str(cid): cluster_profiles[cid].slice_vector(sliced.slices)
        for cid in sorted(clusters)
    }
    cluster_order = [int(c) for c in analytics.seriation_order(cluster_series)]
    rule_orders = {
        cid: analytics.seriation_order(
            {
                key: rule_profiles[key].slice_vector(sliced.slices)
                for key in clusters[cid]
            }
        )
        for cid in sorted(clusters)
    }

    overall = (
        analytics.cluster_profile(rules, events, sliced.slices) if rules else None
    )

    return RunArtifacts(
        config=config,
        slices=sliced.slices,
        rules=rules,
        partition=partition,
        clusters=clusters,
        rule_profiles=rule_profiles,
        cluster_profiles=cluster_profiles,
        summaries=summaries,
        cluster_order=cluster_order,
        rule_orders=rule_orders,
        overall_profile=overall,
    )


def _profile_dict(profile: RuleProfile) -> dict:
    return {
        "counts": [
            [slice_index, place, count]
            for (slice_index, place), count in sorted(profile.counts.items())
        ],
        "sliceTotals": {str(k): v for k, v in sorted(profile.slice_totals.items())},
        "placeTotals": dict(sorted(profile.place_totals.items())),
        "grandTotal": profile.grand_total,
    }


def artifact_dict(artifacts: RunArtifacts) -> dict:
    """JSON-serializable artifact; key order and content are deterministic."""
    cfg = artifacts.config
    cluster_of = {
        key: cid for cid, keys in artifacts.clusters.items() for key in keys
    }
    return {
        "schemaVersion": SCHEMA_VERSION,
        "config": {
            "attributeColumns": list(cfg.attribute_columns),
            "startDate": cfg.start_date.isoformat(),
            "endDate": cfg.end_date.isoformat(),
            "granularity": cfg.granularity,
            "minSupport": cfg.min_support,
            "minLift": cfg.min_lift,
            "resolution": cfg.resolution,
            "seed": cfg.seed,
            "maxRuleLen": cfg.max_rule_len,
        },
        "slices": [
            {
                "index": s.index,
                "label": s.label,
                "start": s.start.isoformat(),
                "end": s.end.isoformat(),
            }
            for s in artifacts.slices
        ],
        "rules": [
            {
                "key": cr.key,
                "antecedent": [it.render() for it in cr.rule.antecedent],
                "consequent": [it.render() for it in cr.rule.consequent],
                "presentSlices": list(cr.present_slices),
                "meanLift": cr.mean_lift,
                "meanSupport": cr.mean_support,
                "meanConfidence": cr.mean_confidence,
                "cluster": cluster_of[cr.key],
                "sliceMetrics": {
                    str(i): {
                        "support": m.support,
                        "confidence": m.confidence,
                        "lift": m.lift,
                    }
                    for i, m in sorted(cr.rule.slice_metrics.items())
                },
            }
            for cr in artifacts.rules
        ],
        "partition": {
            "resolution": artifacts.partition.resolution,
            "seed": artifacts.partition.seed,
            "modularity": artifacts.partition.modularity,
        },
        "clusters": [
            {
                "id": cid,
                "ruleKeys": artifacts.clusters[cid],
                "ruleCount": artifacts.summaries[cid].rule_count,
                "meanLift": artifacts.summaries[cid].mean_lift,
                "meanSupport": artifacts.summaries[cid].mean_support,
                "meanConfidence": artifacts.summaries[cid].mean_confidence,
                "meanOccurrences": artifacts.summaries[cid].mean_occurrences,
            }
            for cid in sorted(artifacts.clusters)
        ],
        "profiles": {
            "rules": {
                key: _profile_dict(artifacts.rule_profiles[key])
                for key in sorted(artifacts.rule_profiles)
            },
            "clusters": {
                str(cid): _profile_dict(artifacts.cluster_profiles[cid])
                for cid in sorted(artifacts.cluster_profiles)
            },
            "overall": (
                _profile_dict(artifacts.overall_profile)
                if artifacts.overall_profile is not None
                else None
            ),
        },
        "orders": {
            "clusters": artifacts.cluster_order,
            "rules": {
                str(cid): artifacts.rule_orders[cid]
                for cid in sorted(artifacts.rule_orders)
            },
        },
    }


def artifact_json(artifacts: RunArtifacts) -> str:
    return json.dumps(artifact_dict(artifacts), indent=2, sort_keys=True)
