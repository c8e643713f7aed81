"""Cross-slice rule merging and superfluous-variant collapsing.

Rules that reappear in several slices become one canonical rule carrying the
whole metric series. Variants that share the same union itemset but split it
differently are redundant; only the variant with the highest mean lift
survives.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Rule, canonical_rule_key, rule_union_itemset


class DedupError(Exception):
    pass


class ConflictingMetrics(DedupError):
    """Same rule key and slice with different metrics; upstream bug."""


@dataclass(frozen=True)
class CanonicalRule:
    """One rule identity with its full per-slice metric series."""

    rule: Rule
    key: str

    @property
    def present_slices(self) -> tuple[int, ...]:
        return tuple(sorted(self.rule.slice_metrics))

    @property
    def mean_lift(self) -> float:
        metrics = self.rule.slice_metrics
        return sum(m.lift for m in metrics.values()) / len(metrics)

    @property
    def mean_support(self) -> float:
        metrics = self.rule.slice_metrics
        return sum(m.support for m in metrics.values()) / len(metrics)

    @property
    def mean_confidence(self) -> float:
        metrics = self.rule.slice_metrics
        return sum(m.confidence for m in metrics.values()) / len(metrics)


def merge_across_slices(per_slice: dict[int, list[Rule]]) -> list[CanonicalRule]:
    """Merge per-slice rules with equal canonical keys into metric series.

    Output is ordered by canonical key for determinism.
    """
    merged: dict[str, Rule] = {}
    for slice_index in sorted(per_slice):
        for rule in per_slice[slice_index]:
            key = canonical_rule_key(rule)
            existing = merged.get(key)
            if existing is None:
                merged[key] = rule
                continue
            series = dict(existing.slice_metrics)
            for idx, metrics in rule.slice_metrics.items():
                if idx in series and series[idx] != metrics:
                    raise ConflictingMetrics(f"{key} slice {idx}")
                series[idx] = metrics
            merged[key] = Rule(
                antecedent=existing.antecedent,
                consequent=existing.consequent,
                slice_metrics=series,
            )
    return [
        CanonicalRule(rule=merged[key], key=key) for key in sorted(merged)
    ]


def collapse_superfluous(canon: list[CanonicalRule]) -> list[CanonicalRule]:
    """Keep one rule per union itemset: the one with the highest mean lift.

    Ties prefer the larger antecedent (more specific condition), then the
    lexicographically smallest key. Output ordered by canonical key.
    """
    groups: dict[tuple, list[CanonicalRule]] = {}
    for cr in canon:
        union = rule_union_itemset(cr.rule).items
        groups.setdefault(union, []).append(cr)
    kept = [
        min(
            group,
            key=lambda cr: (-cr.mean_lift, -len(cr.rule.antecedent), cr.key),
        )
        for group in groups.values()
    ]
    kept.sort(key=lambda cr: cr.key)
    return kept
