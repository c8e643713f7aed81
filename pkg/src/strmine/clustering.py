"""Rule-similarity graph construction and seeded Louvain clustering.

Similarity between two rules is the shared antecedent plus shared consequent
item count over the corresponding unions. The complete graph over those
similarities is partitioned by modularity maximization with a resolution
parameter; node visiting order is shuffled by a seeded RNG, so a fixed
(graph, resolution, seed) triple always yields the same partition.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .dedup import CanonicalRule
from .model import Rule


class ClusteringError(Exception):
    pass


class EmptyGraph(ClusteringError):
    pass


@dataclass(frozen=True)
class SimilarityGraph:
    """Complete weighted graph over rules; zero diagonal."""

    nodes: tuple[CanonicalRule, ...]
    weights: np.ndarray  # symmetric (n, n) float matrix in [0, 1]


@dataclass(frozen=True)
class Partition:
    assignment: dict[int, int]  # node id -> dense cluster id
    resolution: float
    seed: int
    modularity: float

    @property
    def num_clusters(self) -> int:
        return 1 + max(self.assignment.values())

    def clusters(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for node in sorted(self.assignment):
            out.setdefault(self.assignment[node], []).append(node)
        return out


def rule_similarity(r1: Rule, r2: Rule) -> float:
    """Shared items over union, counted separately per rule side."""
    num = r1.antecedent.intersection_size(r2.antecedent) + r1.consequent.intersection_size(r2.consequent)
    den = r1.antecedent.union_size(r2.antecedent) + r1.consequent.union_size(r2.consequent)
    return num / den


def build_similarity_graph(rules: list[CanonicalRule]) -> SimilarityGraph:
    """All pairwise similarities; zero-weight pairs stay as zero entries."""
    n = len(rules)
    weights = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            w = rule_similarity(rules[i].rule, rules[j].rule)
            weights[i, j] = weights[j, i] = w
    return SimilarityGraph(nodes=tuple(rules), weights=weights)


def modularity(
    graph: SimilarityGraph, assignment: dict[int, int], resolution: float
) -> float:
    """Weighted modularity with the resolution-scaled null model.

    Q = sum_c [ L_c/m - gamma * (k_c / 2m)^2 ], L_c the intra-community
    weight (each pair once), k_i the weighted degree.
    """
    w = graph.weights
    n = w.shape[0]
    m = w.sum() / 2.0
    if m == 0.0:
        return 0.0
    degrees = w.sum(axis=1)
    clusters: dict[int, list[int]] = {}
    for node in range(n):
        clusters.setdefault(assignment[node], []).append(node)
    q = 0.0
    for members in clusters.values():
        idx = np.array(members)
        l_c = w[np.ix_(idx, idx)].sum() / 2.0
        k_c = degrees[idx].sum()
        q += l_c / m - resolution * (k_c / (2.0 * m)) ** 2
    return float(q)


class _LevelGraph:
    """Adjacency for one Louvain level; self-loop weight counts twice in degree."""

    def __init__(self, n: int):
        self.n = n
        self.adj: list[dict[int, float]] = [{} for _ in range(n)]
        self.loops = [0.0] * n

    def add_edge(self, i: int, j: int, w: float) -> None:
        if i == j:
            self.loops[i] += w
        else:
            self.adj[i][j] = self.adj[i].get(j, 0.0) + w
            self.adj[j][i] = self.adj[j].get(i, 0.0) + w

    def degree(self, i: int) -> float:
        return sum(self.adj[i].values()) + 2.0 * self.loops[i]

    def total_weight(self) -> float:
        return sum(sum(a.values()) for a in self.adj) / 2.0 + sum(self.loops)


def _local_move(
    g: _LevelGraph,
    resolution: float,
    rng: random.Random,
    init: list[int] | None = None,
) -> tuple[list[int], bool]:
    community = list(init) if init is not None else list(range(g.n))
    degrees = [g.degree(i) for i in range(g.n)]
    comm_tot = [0.0] * g.n
    sizes = [0] * g.n
    for node, c in enumerate(community):
        comm_tot[c] += degrees[node]
        sizes[c] += 1
    m = g.total_weight()
    improved = False
    moved = True
    while moved:
        moved = False
        order = list(range(g.n))
        rng.shuffle(order)
        for node in order:
            current = community[node]
            # Weight from node to each neighboring community.
            links: dict[int, float] = {}
            for nbr, w in g.adj[node].items():
                c = community[nbr]
                links[c] = links.get(c, 0.0) + w
            comm_tot[current] -= degrees[node]
            sizes[current] -= 1
            community[node] = -1
            best_comm = current
            best_gain = links.get(current, 0.0) - resolution * degrees[
                node
            ] * comm_tot[current] / (2.0 * m)
            if sizes[current] > 0 and 0.0 > best_gain + 1e-12:
                # Splitting off into an empty community has zero gain, which
                # can beat rejoining a community the node only hurts.
                best_gain = 0.0
                best_comm = next(c for c in range(g.n) if sizes[c] == 0)
            for c in sorted(links):
                gain = links[c] - resolution * degrees[node] * comm_tot[c] / (2.0 * m)
                if gain > best_gain + 1e-12:
                    best_gain = gain
                    best_comm = c
            community[node] = best_comm
            comm_tot[best_comm] += degrees[node]
            sizes[best_comm] += 1
            if best_comm != current:
                moved = True
                improved = True
    return community, improved


def _aggregate(g: _LevelGraph, community: list[int]) -> tuple[_LevelGraph, list[int]]:
    labels = sorted(set(community))
    relabel = {c: i for i, c in enumerate(labels)}
    agg = _LevelGraph(len(labels))
    for i in range(g.n):
        ci = relabel[community[i]]
        agg.loops[ci] += g.loops[i]
        for j, w in g.adj[i].items():
            if j < i:
                continue
            cj = relabel[community[j]]
            if ci == cj:
                agg.loops[ci] += w
            else:
                agg.add_edge(ci, cj, w)
    return agg, [relabel[c] for c in community]


def _louvain_once(
    graph: SimilarityGraph, resolution: float, rng: random.Random
) -> dict[int, int]:
    n = graph.weights.shape[0]
    g = _LevelGraph(n)
    for i in range(n):
        for j in range(i + 1, n):
            w = float(graph.weights[i, j])
            if w > 0.0:
                g.add_edge(i, j, w)

    g0 = g
    node_comm = list(range(n))  # original node -> current top-level community
    if g.total_weight() > 0.0:
        while True:
            community, improved = _local_move(g, resolution, rng)
            if not improved:
                break
            g, community = _aggregate(g, community)
            node_comm = [community[c] for c in node_comm]
        # Refinement: single-node moves on the original graph from the final
        # partition, rescuing nodes locked inside aggregated super-nodes.
        while True:
            node_comm, improved = _local_move(g0, resolution, rng, init=node_comm)
            if not improved:
                break

    # Dense relabeling in node order.
    relabel: dict[int, int] = {}
    assignment: dict[int, int] = {}
    for node in range(n):
        c = node_comm[node]
        if c not in relabel:
            relabel[c] = len(relabel)
        assignment[node] = relabel[c]
    return assignment


def louvain(
    graph: SimilarityGraph,
    resolution: float = 1.0,
    seed: int = 0,
    restarts: int = 10,
) -> Partition:
    """Seeded Louvain community detection over the similarity graph.

    Each attempt alternates seeded local moves with graph aggregation until
    modularity stops improving; greedy runs are order-sensitive, so a fixed
    number of restarts with rng-derived visit orders are compared and the
    best-modularity partition kept. Deterministic for a fixed
    (graph, resolution, seed). Cluster ids are dense, numbered by first
    node appearance.
    """
    n = graph.weights.shape[0]
    if n == 0:
        raise EmptyGraph()
    if resolution <= 0.0:
        raise ClusteringError("resolution must be positive")
    rng = random.Random(seed)

    best_assignment: dict[int, int] | None = None
    best_q = -float("inf")
    for _ in range(max(1, restarts)):
        assignment = _louvain_once(graph, resolution, rng)
        q = modularity(graph, assignment, resolution)
        if q > best_q + 1e-12:
            best_q, best_assignment = q, assignment
    assert best_assignment is not None
    return Partition(
        assignment=best_assignment,
        resolution=resolution,
        seed=seed,
        modularity=modularity(graph, best_assignment, resolution),
    )
