from __future__ import annotations

import datetime as _dt
import random

import pytest

from strmine.model import Event, Item, ItemSet


def items(*pairs: str) -> ItemSet:
    """Build an itemset from 'attr:value' strings."""
    return ItemSet.of(Item.parse(p) for p in pairs)


def single_letter_tx(*rows: str) -> list[ItemSet]:
    """Transactions from strings like 'abc': letter x becomes item x:1."""
    return [ItemSet.of(Item(ch, "1") for ch in row) for row in rows]


@pytest.fixture
def five_tx() -> list[ItemSet]:
    """The worked 5-transaction fixture: {a,b,c},{a,b},{a,c},{b,c},{a,b,c}."""
    return single_letter_tx("abc", "ab", "ac", "bc", "abc")


@pytest.fixture
def asym_tx() -> list[ItemSet]:
    """Asymmetric dedup fixture: [{a,b,c},{a,b,c},{a,b},{a},{a,c}]."""
    return single_letter_tx("abc", "abc", "ab", "a", "ac")


PLANTED_UNION = ("A:x", "B:y", "C:z")
PLANTED_MONTHS = {5, 6, 7, 17, 18, 19}  # Jun-Aug of both years, slice indices
PLANTED_PER_MONTH = 40
REGIONS = ["R1", "R2", "R3", "R4", "R5"]


def planted_events(seed: int = 7) -> list[Event]:
    """24-month synthetic dataset with a planted A:x,B:y,C:z co-occurrence.

    40 matching events per month in Jun-Aug of 2016 and 2017, all in region
    R1; background noise everywhere, never containing the full planted
    combination.
    """
    rng = random.Random(seed)
    values = {"A": ["x", "p", "q"], "B": ["y", "r", "s"], "C": ["z", "u", "v"]}
    events: list[Event] = []
    for month_index in range(24):
        year = 2016 + month_index // 12
        month = month_index % 12 + 1
        for _ in range(20):  # noise
            while True:
                combo = {a: rng.choice(vs) for a, vs in values.items()}
                if tuple(f"{a}:{v}" for a, v in sorted(combo.items())) != PLANTED_UNION:
                    break
            events.append(
                Event(
                    date=_dt.date(year, month, rng.randint(1, 28)),
                    place=rng.choice(REGIONS),
                    attribs=ItemSet.of(Item(a, v) for a, v in combo.items()),
                )
            )
        if month_index in PLANTED_MONTHS:
            for _ in range(PLANTED_PER_MONTH):
                events.append(
                    Event(
                        date=_dt.date(year, month, rng.randint(1, 28)),
                        place="R1",
                        attribs=items(*PLANTED_UNION),
                    )
                )
    return events


def planted_csv(seed: int = 7) -> bytes:
    """The planted dataset rendered as an event CSV."""
    lines = ["DATE,PLACE,A,B,C"]
    for e in planted_events(seed):
        row = {it.attribute: it.value for it in e.attribs}
        lines.append(f"{e.date.isoformat()},{e.place},{row['A']},{row['B']},{row['C']}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def regions_geojson(names: list[str] | None = None) -> bytes:
    import json

    names = names if names is not None else REGIONS
    features = []
    for i, name in enumerate(names):
        x = float(i)
        features.append(
            {
                "type": "Feature",
                "properties": {"name": name},
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [
                        [[x, 0.0], [x + 1.0, 0.0], [x + 1.0, 1.0], [x, 1.0], [x, 0.0]]
                    ],
                },
            }
        )
    return json.dumps({"type": "FeatureCollection", "features": features}).encode()
