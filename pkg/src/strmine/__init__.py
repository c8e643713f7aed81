"""Per-slice association rule mining, dedup, clustering, and analytics for
spatiotemporal categorical event data."""

from .model import (
    Event,
    Item,
    ItemSet,
    Region,
    Rule,
    SliceMetrics,
    TimeSlice,
    canonical_rule_key,
    rule_union_itemset,
)
from .pipeline import RunConfig, run_pipeline

__all__ = [
    "Event",
    "Item",
    "ItemSet",
    "Region",
    "Rule",
    "SliceMetrics",
    "TimeSlice",
    "canonical_rule_key",
    "rule_union_itemset",
    "RunConfig",
    "run_pipeline",
]

__version__ = "0.1.0"
