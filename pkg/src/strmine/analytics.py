"""Occurrence profiles, cluster summaries, seriation, and attribute matrices.

An occurrence of a rule is an event whose attributes contain the rule's full
union itemset; cluster profiles count distinct events that match at least one
member rule, never double counting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.cluster.hierarchy import leaves_list, linkage, optimal_leaf_ordering
from scipy.spatial.distance import pdist

from .dedup import CanonicalRule
from .model import Event, Item, ItemSet, TimeSlice, rule_union_itemset


class AnalyticsError(Exception):
    pass


class UnknownCluster(AnalyticsError):
    pass


@dataclass
class RuleProfile:
    """Occurrence counts per (time slice, place), with marginals."""

    rule_key: str
    counts: dict[tuple[int, str], int] = field(default_factory=dict)
    slice_totals: dict[int, int] = field(default_factory=dict)
    place_totals: dict[str, int] = field(default_factory=dict)
    grand_total: int = 0

    def slice_vector(self, slices: Sequence[TimeSlice]) -> list[int]:
        return [self.slice_totals.get(s.index, 0) for s in slices]


@dataclass(frozen=True)
class ClusterSummary:
    cluster_id: int
    rule_count: int
    mean_lift: float
    mean_support: float
    mean_confidence: float
    mean_occurrences: float


@dataclass(frozen=True)
class AttributeCell:
    frequency: float
    role: str  # antecedent | consequent | mixed


@dataclass(frozen=True)
class AttributeMatrix:
    rows: tuple[str, ...]  # cluster ids (as strings) or rule keys, display order
    columns: tuple[str, ...]  # rendered attribute-value pairs, canonical order
    cells: dict[tuple[str, str], AttributeCell]


def _profile_from_counts(
    rule_key: str, counts: dict[tuple[int, str], int]
) -> RuleProfile:
    profile = RuleProfile(rule_key=rule_key, counts=counts)
    for (slice_index, place), count in counts.items():
        profile.slice_totals[slice_index] = (
            profile.slice_totals.get(slice_index, 0) + count
        )
        profile.place_totals[place] = profile.place_totals.get(place, 0) + count
        profile.grand_total += count
    return profile


def rule_profile(
    rule: CanonicalRule, events: Iterable[Event], slices: Sequence[TimeSlice]
) -> RuleProfile:
    """Count, per (slice, place), the events containing the rule's union.

    Occurrences are counted in every slice, including slices where the rule
    was not generated.
    """
    union = rule_union_itemset(rule.rule)
    lookup = _slice_lookup(slices)
    counts: dict[tuple[int, str], int] = {}
    for event in events:
        idx = lookup(event.date)
        if idx is None or not union.issubset(event.attribs):
            continue
        cell = (idx, event.place)
        counts[cell] = counts.get(cell, 0) + 1
    return _profile_from_counts(rule.key, counts)


def cluster_profile(
    cluster: Sequence[CanonicalRule],
    events: Iterable[Event],
    slices: Sequence[TimeSlice],
) -> RuleProfile:
    """Distinct-record occurrence counts for a set of rules.

    An event counts once per cell if it matches the union itemset of at
    least one member rule.
    """
    if not cluster:
        raise AnalyticsError("cluster must be non-empty")
    unions = [rule_union_itemset(cr.rule) for cr in cluster]
    lookup = _slice_lookup(slices)
    counts: dict[tuple[int, str], int] = {}
    for event in events:
        idx = lookup(event.date)
        if idx is None:
            continue
        if any(u.issubset(event.attribs) for u in unions):
            cell = (idx, event.place)
            counts[cell] = counts.get(cell, 0) + 1
    key = "cluster:" + "|".join(sorted(cr.key for cr in cluster))
    return _profile_from_counts(key, counts)


def _slice_lookup(slices: Sequence[TimeSlice]):
    ordered = sorted(slices, key=lambda s: s.start)

    def lookup(date):
        lo, hi = 0, len(ordered) - 1
        while lo <= hi:
            mid = (lo + hi) // 2
            s = ordered[mid]
            if date < s.start:
                hi = mid - 1
            elif date > s.end:
                lo = mid + 1
            else:
                return s.index
        return None

    return lookup


def cluster_summary(
    cluster_id: int,
    members: Sequence[CanonicalRule],
    member_profiles: Sequence[RuleProfile],
) -> ClusterSummary:
    """Unweighted means of the member rules' own mean metrics and totals."""
    if not members:
        raise AnalyticsError("cluster must be non-empty")
    k = len(members)
    return ClusterSummary(
        cluster_id=cluster_id,
        rule_count=k,
        mean_lift=sum(cr.mean_lift for cr in members) / k,
        mean_support=sum(cr.mean_support for cr in members) / k,
        mean_confidence=sum(cr.mean_confidence for cr in members) / k,
        mean_occurrences=sum(p.grand_total for p in member_profiles) / k,
    )


def seriation_order(series: dict[str, Sequence[float]]) -> list[str]:
    """Row order placing rows with similar temporal profiles adjacent.

    Average-linkage hierarchical clustering on Euclidean distance between
    L2-normalized vectors, with leaves arranged to minimize the sum of
    adjacent distances. Rows with identical vectors stay in id order.
    """
    ids = sorted(series)
    if len(ids) <= 1:
        return ids
    normalized: dict[str, tuple[float, ...]] = {}
    for row_id in ids:
        v = np.asarray(series[row_id], dtype=float)
        norm = np.linalg.norm(v)
        normalized[row_id] = tuple(v / norm) if norm > 0 else tuple(v)
    # Collapse identical vectors so ties keep id order and distances stay
    # strictly informative for the linkage.
    groups: dict[tuple[float, ...], list[str]] = {}
    for row_id in ids:
        groups.setdefault(normalized[row_id], []).append(row_id)
    reps = [members[0] for members in groups.values()]
    if len(reps) == 1:
        return ids
    matrix = np.array([normalized[r] for r in reps])
    condensed = pdist(matrix, metric="euclidean")
    tree = linkage(condensed, method="average")
    order = leaves_list(optimal_leaf_ordering(tree, condensed))
    out: list[str] = []
    for rep_index in order:
        out.extend(groups[normalized[reps[rep_index]]])
    return out


def _item_roles(rules: Sequence[CanonicalRule]) -> dict[Item, tuple[int, set[str]]]:
    """Per item: number of member rules containing it, and the sides seen."""
    info: dict[Item, tuple[int, set[str]]] = {}
    for cr in rules:
        for item in cr.rule.antecedent:
            count, sides = info.get(item, (0, set()))
            info[item] = (count + 1, sides | {"antecedent"})
        for item in cr.rule.consequent:
            count, sides = info.get(item, (0, set()))
            info[item] = (count + 1, sides | {"consequent"})
    return info


def _role(sides: set[str]) -> str:
    return sides.pop() if len(sides) == 1 else "mixed"


def attribute_matrix_clusters(
    clusters: dict[int, Sequence[CanonicalRule]], row_order: Sequence[int]
) -> AttributeMatrix:
    """Cluster-level matrix: cell frequency is the fraction of the cluster's
    rules containing the item, on either side."""
    columns: set[Item] = set()
    cells: dict[tuple[str, str], AttributeCell] = {}
    for cluster_id in row_order:
        members = clusters[cluster_id]
        for item, (count, sides) in _item_roles(members).items():
            columns.add(item)
            cells[(str(cluster_id), item.render())] = AttributeCell(
                frequency=count / len(members), role=_role(sides)
            )
    return AttributeMatrix(
        rows=tuple(str(c) for c in row_order),
        columns=tuple(it.render() for it in sorted(columns)),
        cells=cells,
    )


def attribute_matrix_rules(
    members: Sequence[CanonicalRule], row_order: Sequence[str]
) -> AttributeMatrix:
    """Rule-level matrix: one row per rule, every present item at frequency 1."""
    by_key = {cr.key: cr for cr in members}
    columns: set[Item] = set()
    cells: dict[tuple[str, str], AttributeCell] = {}
    for key in row_order:
        cr = by_key[key]
        for item in cr.rule.antecedent:
            columns.add(item)
            cells[(key, item.render())] = AttributeCell(1.0, "antecedent")
        for item in cr.rule.consequent:
            columns.add(item)
            cells[(key, item.render())] = AttributeCell(1.0, "consequent")
    return AttributeMatrix(
        rows=tuple(row_order),
        columns=tuple(it.render() for it in sorted(columns)),
        cells=cells,
    )
