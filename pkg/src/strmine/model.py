"""Shared domain vocabulary: items, itemsets, events, time slices, rules, regions.

Everything here is immutable after construction and safe to share across
threads. Canonical orderings and keys are defined once, in this module, and
every downstream stage relies on them.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping


class ModelError(ValueError):
    """Invalid construction of a core domain value."""


@dataclass(frozen=True, slots=True, order=True)
class Item:
    """One categorical attribute-value pair, e.g. Weather:Clear."""

    attribute: str
    value: str

    def __post_init__(self) -> None:
        if not self.attribute.strip() or not self.value.strip():
            raise ModelError(f"empty attribute or value in item {self!r}")
        object.__setattr__(self, "attribute", self.attribute.strip())
        object.__setattr__(self, "value", self.value.strip())

    def render(self) -> str:
        return f"{self.attribute}:{self.value}"

    @classmethod
    def parse(cls, text: str) -> "Item":
        """Inverse of render(); splits on the first ':'."""
        attribute, sep, value = text.partition(":")
        if not sep:
            raise ModelError(f"item text {text!r} has no ':' separator")
        return cls(attribute, value)


@dataclass(frozen=True, slots=True)
class ItemSet:
    """Duplicate-free set of items in canonical (attribute, value) order.

    At most one value per attribute: records are attribute vectors, so two
    values of the same attribute can never co-occur in one itemset.
    """

    items: tuple[Item, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(set(self.items)))
        attrs = [it.attribute for it in ordered]
        if len(set(attrs)) != len(attrs):
            raise ModelError(f"duplicate attribute in itemset {ordered!r}")
        object.__setattr__(self, "items", ordered)

    @classmethod
    def of(cls, items: Iterable[Item]) -> "ItemSet":
        return cls(tuple(items))

    def __iter__(self) -> Iterator[Item]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, item: Item) -> bool:
        return item in self.items

    def issubset(self, other: "ItemSet") -> bool:
        return set(self.items) <= set(other.items)

    def union(self, other: "ItemSet") -> "ItemSet":
        return ItemSet.of(set(self.items) | set(other.items))

    def intersection_size(self, other: "ItemSet") -> int:
        return len(set(self.items) & set(other.items))

    def union_size(self, other: "ItemSet") -> int:
        return len(set(self.items) | set(other.items))

    def attributes(self) -> set[str]:
        return {it.attribute for it in self.items}

    def render(self) -> str:
        return "{" + ", ".join(it.render() for it in self.items) + "}"


@dataclass(frozen=True, slots=True)
class Event:
    """One spatiotemporal record: when, where, and its categorical attributes."""

    date: _dt.date
    place: str
    attribs: ItemSet

    def __post_init__(self) -> None:
        if not self.place:
            raise ModelError("event place must be non-empty")


@dataclass(frozen=True, slots=True)
class TimeSlice:
    """One calendar period of the run's temporal axis (inclusive bounds)."""

    index: int
    label: str
    start: _dt.date
    end: _dt.date

    def __post_init__(self) -> None:
        if self.index < 0 or self.start > self.end:
            raise ModelError(f"bad time slice {self!r}")

    def contains(self, date: _dt.date) -> bool:
        return self.start <= date <= self.end


@dataclass(frozen=True, slots=True)
class SliceMetrics:
    """Rule quality metrics within one time slice."""

    support: float
    confidence: float
    lift: float


@dataclass(frozen=True, slots=True)
class Rule:
    """Association rule antecedent => consequent with per-slice metrics."""

    antecedent: ItemSet
    consequent: ItemSet
    slice_metrics: Mapping[int, SliceMetrics] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.antecedent.items or not self.consequent.items:
            raise ModelError("rule sides must be non-empty")
        if self.antecedent.attributes() & self.consequent.attributes():
            raise ModelError(
                f"rule sides share an attribute: "
                f"{self.antecedent.render()} => {self.consequent.render()}"
            )
        object.__setattr__(self, "slice_metrics", dict(self.slice_metrics))

    def render(self) -> str:
        return f"{self.antecedent.render()} => {self.consequent.render()}"


@dataclass(frozen=True)
class Region:
    """A named map region whose id matches PLACE values verbatim."""

    id: str
    geometry: Mapping[str, Any]
    display_name: str = ""


_ESCAPES = {"\\": "\\\\", ",": "\\,", "=": "\\="}


def _escape(text: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in text)


def _render_side(itemset: ItemSet) -> str:
    return ",".join(_escape(it.render()) for it in itemset)


def canonical_rule_key(rule: Rule) -> str:
    """Deterministic identity string for a rule.

    Equal keys iff identical (antecedent, consequent) as sets; invariant
    under item input order. ',' separates items, '=>' separates sides;
    both characters are backslash-escaped inside item text.
    """
    return f"{_render_side(rule.antecedent)}=>{_render_side(rule.consequent)}"


def rule_union_itemset(rule: Rule) -> ItemSet:
    """Antecedent plus consequent as one canonical itemset.

    Rules differing only by attribute placement map to the same union;
    this is the grouping key for collapsing superfluous variants.
    """
    return rule.antecedent.union(rule.consequent)
