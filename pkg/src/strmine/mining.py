"""Time slicing, FP-Growth frequent-itemset mining, and rule generation.

Mining runs per time slice. All metrics are computed from exact integer
counts with a single final division, so threshold comparisons and lift
symmetry are exact in floating point.
"""

from __future__ import annotations

import calendar
import datetime as _dt
from dataclasses import dataclass, field
from typing import Iterable

from .model import Item, ItemSet, Rule, SliceMetrics, TimeSlice
from .model import Event

GRANULARITIES = ("month", "week", "year")


class MiningError(Exception):
    pass


class InvalidRange(MiningError):
    pass


class NoTransactions(MiningError):
    pass


class ZeroAntecedentSupport(MiningError):
    pass


class ZeroSupport(MiningError):
    pass


@dataclass(frozen=True)
class SlicedDataset:
    slices: tuple[TimeSlice, ...]
    transactions: dict[int, list[ItemSet]]

    @property
    def slice_event_counts(self) -> dict[int, int]:
        return {i: len(txs) for i, txs in self.transactions.items()}


@dataclass(frozen=True)
class FrequentItemset:
    items: ItemSet
    support: float
    count: int


@dataclass(frozen=True)
class MiningConfig:
    min_support: float
    min_lift: float = 0.0
    max_rule_len: int = 5

    def __post_init__(self) -> None:
        if not (0.0 < self.min_support <= 1.0):
            raise MiningError(f"min_support must be in (0,1], got {self.min_support}")
        if self.max_rule_len < 2:
            raise MiningError("max_rule_len must be >= 2")


def _month_bounds(year: int, month: int) -> tuple[_dt.date, _dt.date]:
    last = calendar.monthrange(year, month)[1]
    return _dt.date(year, month, 1), _dt.date(year, month, last)


def _period_slices(
    start: _dt.date, end: _dt.date, granularity: str
) -> list[tuple[str, _dt.date, _dt.date]]:
    periods: list[tuple[str, _dt.date, _dt.date]] = []
    if granularity == "month":
        year, month = start.year, start.month
        while True:
            p_start, p_end = _month_bounds(year, month)
            periods.append((f"{year:04d}-{month:02d}", p_start, p_end))
            if p_end >= end:
                break
            year, month = (year + 1, 1) if month == 12 else (year, month + 1)
    elif granularity == "year":
        for year in range(start.year, end.year + 1):
            periods.append(
                (f"{year:04d}", _dt.date(year, 1, 1), _dt.date(year, 12, 31))
            )
    elif granularity == "week":
        # ISO weeks, Monday-based.
        cursor = start - _dt.timedelta(days=start.weekday())
        while cursor <= end:
            iso = cursor.isocalendar()
            periods.append(
                (
                    f"{iso.year:04d}-W{iso.week:02d}",
                    cursor,
                    cursor + _dt.timedelta(days=6),
                )
            )
            cursor += _dt.timedelta(days=7)
    else:
        raise MiningError(f"unknown granularity {granularity!r}")
    return periods


def slice_partition(
    events: Iterable[Event],
    start: _dt.date,
    end: _dt.date,
    granularity: str = "month",
) -> SlicedDataset:
    """Partition events in [start, end] into contiguous calendar slices.

    Slices follow calendar boundaries clipped to the configured range; empty
    slices are retained so the temporal axis has no gaps. Events outside the
    range are excluded.
    """
    if start > end:
        raise InvalidRange(f"start {start} after end {end}")
    slices: list[TimeSlice] = []
    for index, (label, p_start, p_end) in enumerate(
        _period_slices(start, end, granularity)
    ):
        slices.append(
            TimeSlice(
                index=index,
                label=label,
                start=max(p_start, start),
                end=min(p_end, end),
            )
        )
    transactions: dict[int, list[ItemSet]] = {s.index: [] for s in slices}
    lookup = _SliceLookup(slices)
    for event in events:
        idx = lookup.index_of(event.date)
        if idx is not None:
            transactions[idx].append(event.attribs)
    return SlicedDataset(slices=tuple(slices), transactions=transactions)


class _SliceLookup:
    """Date -> slice index lookup over contiguous ordered slices."""

    def __init__(self, slices: list[TimeSlice]):
        self._slices = slices

    def index_of(self, date: _dt.date) -> int | None:
        lo, hi = 0, len(self._slices) - 1
        while lo <= hi:
            mid = (lo + hi) // 2
            s = self._slices[mid]
            if date < s.start:
                hi = mid - 1
            elif date > s.end:
                lo = mid + 1
            else:
                return s.index
        return None


def min_count_for_support(min_support: float, n: int) -> int:
    """Smallest count c with c/n >= min_support under float division.

    Keeps the integer threshold exactly consistent with the fractional
    definition, avoiding ceil() rounding artifacts.
    """
    c = max(1, int(min_support * n))
    while c > 1 and (c - 1) / n >= min_support:
        c -= 1
    while c / n < min_support:
        c += 1
    return c


class _FPNode:
    __slots__ = ("item", "count", "parent", "children", "link")

    def __init__(self, item: int | None, parent: "_FPNode | None"):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children: dict[int, _FPNode] = {}
        self.link: _FPNode | None = None


class _FPTree:
    def __init__(self) -> None:
        self.root = _FPNode(None, None)
        self.heads: dict[int, _FPNode] = {}
        self.tails: dict[int, _FPNode] = {}

    def insert(self, path: list[int], count: int) -> None:
        node = self.root
        for item in path:
            child = node.children.get(item)
            if child is None:
                child = _FPNode(item, node)
                node.children[item] = child
                if item in self.tails:
                    self.tails[item].link = child
                else:
                    self.heads[item] = child
                self.tails[item] = child
            child.count += count
            node = child

    def prefix_paths(self, item: int) -> list[tuple[list[int], int]]:
        paths = []
        node = self.heads.get(item)
        while node is not None:
            path: list[int] = []
            parent = node.parent
            while parent is not None and parent.item is not None:
                path.append(parent.item)
                parent = parent.parent
            path.reverse()
            if path:
                paths.append((path, node.count))
            node = node.link
        return paths


def _fp_mine(
    tree: _FPTree,
    item_counts: dict[int, int],
    min_count: int,
    suffix: tuple[int, ...],
    out: dict[tuple[int, ...], int],
    order: dict[int, int],
) -> None:
    # Recurse over items least-frequent first (reverse of tree path order).
    for item in sorted(item_counts, key=lambda i: order[i], reverse=True):
        count = item_counts[item]
        itemset = tuple(sorted(suffix + (item,)))
        out[itemset] = count
        cond_paths = tree.prefix_paths(item)
        cond_counts: dict[int, int] = {}
        for path, c in cond_paths:
            for p_item in path:
                cond_counts[p_item] = cond_counts.get(p_item, 0) + c
        cond_counts = {i: c for i, c in cond_counts.items() if c >= min_count}
        if not cond_counts:
            continue
        cond_tree = _FPTree()
        for path, c in cond_paths:
            filtered = [i for i in path if i in cond_counts]
            filtered.sort(key=lambda i: order[i])
            if filtered:
                cond_tree.insert(filtered, c)
        _fp_mine(cond_tree, cond_counts, min_count, itemset, out, order)


def fp_growth(
    transactions: list[ItemSet], min_support: float
) -> list[FrequentItemset]:
    """All itemsets (size >= 1) with support >= min_support, with exact counts.

    Output order is canonical: by size, then lexicographic on rendered items.
    """
    if not transactions:
        raise NoTransactions()
    n = len(transactions)
    min_count = min_count_for_support(min_support, n)

    universe: list[Item] = sorted({it for tx in transactions for it in tx})
    index_of = {it: i for i, it in enumerate(universe)}
    counts: dict[int, int] = {}
    encoded: list[list[int]] = []
    for tx in transactions:
        row = [index_of[it] for it in tx]
        encoded.append(row)
        for i in row:
            counts[i] = counts.get(i, 0) + 1

    frequent1 = {i: c for i, c in counts.items() if c >= min_count}
    # Global order: most frequent first, item index as tie-break.
    order_list = sorted(frequent1, key=lambda i: (-frequent1[i], i))
    order = {item: rank for rank, item in enumerate(order_list)}

    tree = _FPTree()
    for row in encoded:
        path = sorted((i for i in row if i in frequent1), key=lambda i: order[i])
        if path:
            tree.insert(path, 1)

    mined: dict[tuple[int, ...], int] = {}
    _fp_mine(tree, frequent1, min_count, (), mined, order)

    results = [
        FrequentItemset(
            items=ItemSet.of(universe[i] for i in key),
            support=count / n,
            count=count,
        )
        for key, count in mined.items()
    ]
    results.sort(key=lambda f: (len(f.items), tuple(it.render() for it in f.items)))
    return results


def _proper_subsets(items: tuple[Item, ...]):
    n = len(items)
    for mask in range(1, (1 << n) - 1):
        yield tuple(items[i] for i in range(n) if mask >> i & 1)


def generate_rules(
    frequents: list[FrequentItemset],
    n_transactions: int,
    config: MiningConfig,
) -> list[Rule]:
    """Split every frequent itemset into all antecedent/consequent pairs.

    Emits X => Z\\X for each nonempty proper subset X when lift clears the
    configured minimum. Counterpart rules sharing a union are collapsed
    later, not here.
    """
    count_of = {f.items: f.count for f in frequents}
    n = n_transactions
    rules: list[Rule] = []
    for f in frequents:
        size = len(f.items)
        if size < 2 or size > config.max_rule_len:
            continue
        z_count = f.count
        for subset in _proper_subsets(f.items.items):
            antecedent = ItemSet.of(subset)
            consequent = ItemSet.of(set(f.items.items) - set(subset))
            x_count = count_of[antecedent]
            y_count = count_of[consequent]
            lift_value = (z_count * n) / (x_count * y_count)
            if lift_value < config.min_lift:
                continue
            rules.append(
                Rule(
                    antecedent=antecedent,
                    consequent=consequent,
                    slice_metrics={
                        0: SliceMetrics(
                            support=z_count / n,
                            confidence=z_count / x_count,
                            lift=lift_value,
                        )
                    },
                )
            )
    return rules


def mine_slice(
    transactions: list[ItemSet], slice_index: int, config: MiningConfig
) -> list[Rule]:
    """Rules for one slice with metrics keyed by that slice's index."""
    if not transactions:
        return []
    frequents = fp_growth(transactions, config.min_support)
    rules = generate_rules(frequents, len(transactions), config)
    return [
        Rule(
            antecedent=r.antecedent,
            consequent=r.consequent,
            slice_metrics={slice_index: r.slice_metrics[0]},
        )
        for r in rules
    ]


def mine_slices(sliced: SlicedDataset, config: MiningConfig) -> dict[int, list[Rule]]:
    """Per-slice mining over the whole partition; empty slices yield []."""
    return {
        s.index: mine_slice(sliced.transactions[s.index], s.index, config)
        for s in sliced.slices
    }


def support(itemset: ItemSet, transactions: list[ItemSet]) -> float:
    """Fraction of transactions containing the itemset."""
    if not transactions:
        raise NoTransactions()
    return sum(1 for t in transactions if itemset.issubset(t)) / len(transactions)


def confidence(rule: Rule, transactions: list[ItemSet]) -> float:
    """sup(X u Y) / sup(X), from integer counts."""
    if not transactions:
        raise NoTransactions()
    x_count = sum(1 for t in transactions if rule.antecedent.issubset(t))
    if x_count == 0:
        raise ZeroAntecedentSupport(rule.render())
    union = rule.antecedent.union(rule.consequent)
    z_count = sum(1 for t in transactions if union.issubset(t))
    return z_count / x_count


def lift(rule: Rule, transactions: list[ItemSet]) -> float:
    """sup(X u Y) / (sup(X) * sup(Y)), from integer counts."""
    if not transactions:
        raise NoTransactions()
    n = len(transactions)
    x_count = sum(1 for t in transactions if rule.antecedent.issubset(t))
    y_count = sum(1 for t in transactions if rule.consequent.issubset(t))
    if x_count == 0 or y_count == 0:
        raise ZeroSupport(rule.render())
    union = rule.antecedent.union(rule.consequent)
    z_count = sum(1 for t in transactions if union.issubset(t))
    return (z_count * n) / (x_count * y_count)
