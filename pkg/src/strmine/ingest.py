"""CSV event ingestion and GeoJSON region parsing with cleaning rules.

The event file must be UTF-8 CSV with a header containing DATE (YYYY-mm-dd)
and PLACE columns. Rows with null-marker values in any selected attribute
column (or in PLACE) are dropped, as are rows whose DATE does not parse
strictly. Region ids are matched against PLACE values verbatim: no trimming,
no case folding.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import re
from dataclasses import dataclass, field

from .model import Event, Item, ItemSet, Region

DATE_COLUMN = "DATE"
PLACE_COLUMN = "PLACE"

# "Unknown" is matched case-sensitively; the generic CSV null markers are not.
NULL_MARKERS_EXACT = frozenset({"", "Unknown"})
NULL_MARKERS_FOLDED = frozenset({"na", "n/a", "null"})

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


class IngestError(Exception):
    """Base class for dataset/region parsing failures."""


class MissingColumn(IngestError):
    def __init__(self, column: str):
        super().__init__(f"required column {column!r} is missing")
        self.column = column


class EmptyDataset(IngestError):
    def __init__(self) -> None:
        super().__init__("no usable event rows after cleaning")


class MalformedCsv(IngestError):
    pass


class NotFeatureCollection(IngestError):
    pass


class MissingIdProperty(IngestError):
    def __init__(self, feature_index: int, id_property: str):
        super().__init__(
            f"feature {feature_index} lacks the {id_property!r} property"
        )
        self.feature_index = feature_index


class DuplicateRegionId(IngestError):
    def __init__(self, region_id: str):
        super().__init__(f"duplicate region id {region_id!r}")
        self.region_id = region_id


@dataclass(frozen=True)
class DatasetDescriptor:
    columns: tuple[str, ...]
    attribute_columns: tuple[str, ...]
    row_count: int
    date_column: str = DATE_COLUMN
    place_column: str = PLACE_COLUMN


@dataclass
class IngestReport:
    total_rows: int = 0
    kept_rows: int = 0
    dropped_null_rows: int = 0
    dropped_unparseable_date_rows: int = 0
    unmatched_places: set[str] = field(default_factory=set)

    def check(self) -> None:
        assert self.total_rows == (
            self.kept_rows
            + self.dropped_null_rows
            + self.dropped_unparseable_date_rows
        )


def _is_null(value: str) -> bool:
    return value in NULL_MARKERS_EXACT or value.strip().lower() in NULL_MARKERS_FOLDED


def _parse_date(text: str) -> _dt.date | None:
    if not _DATE_RE.match(text):
        return None
    try:
        return _dt.date.fromisoformat(text)
    except ValueError:
        return None


def parse_events_csv(
    data: bytes, selected: list[str]
) -> tuple[list[Event], DatasetDescriptor, IngestReport]:
    """Parse the event CSV, keeping only clean rows over the selected columns.

    Returns the events in file order, a descriptor of the file schema, and a
    report whose totals reconcile exactly.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedCsv(f"not UTF-8: {exc}") from None
    try:
        reader = csv.DictReader(io.StringIO(text))
        header = reader.fieldnames
    except csv.Error as exc:
        raise MalformedCsv(str(exc)) from None
    if header is None:
        raise MalformedCsv("missing header row")
    for required in (DATE_COLUMN, PLACE_COLUMN, *selected):
        if required not in header:
            raise MissingColumn(required)

    attribute_columns = tuple(
        c for c in header if c not in (DATE_COLUMN, PLACE_COLUMN)
    )
    report = IngestReport()
    events: list[Event] = []
    for row in reader:
        if any(v is None for v in row.values()) or None in row:
            raise MalformedCsv(f"ragged row near line {reader.line_num}")
        report.total_rows += 1
        if _is_null(row[PLACE_COLUMN]) or any(_is_null(row[c]) for c in selected):
            report.dropped_null_rows += 1
            continue
        date = _parse_date(row[DATE_COLUMN])
        if date is None:
            report.dropped_unparseable_date_rows += 1
            continue
        report.kept_rows += 1
        events.append(
            Event(
                date=date,
                place=row[PLACE_COLUMN],
                attribs=ItemSet.of(Item(c, row[c]) for c in selected),
            )
        )
    report.check()
    if not events:
        raise EmptyDataset()
    descriptor = DatasetDescriptor(
        columns=tuple(header),
        attribute_columns=attribute_columns,
        row_count=report.total_rows,
    )
    return events, descriptor, report


def parse_regions_geojson(data: bytes, id_property: str = "name") -> list[Region]:
    """Parse an RFC 7946 FeatureCollection into Regions.

    Ids are taken verbatim from the configured feature property so they can
    be matched exactly against PLACE values.
    """
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise NotFeatureCollection(f"not parseable GeoJSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise NotFeatureCollection("top-level type must be FeatureCollection")
    regions: list[Region] = []
    seen: set[str] = set()
    for index, feature in enumerate(doc.get("features", [])):
        properties = feature.get("properties") or {}
        if id_property not in properties:
            raise MissingIdProperty(index, id_property)
        region_id = str(properties[id_property])
        if region_id in seen:
            raise DuplicateRegionId(region_id)
        seen.add(region_id)
        regions.append(
            Region(
                id=region_id,
                geometry=feature.get("geometry") or {},
                display_name=str(properties.get("displayName", region_id)),
            )
        )
    return regions


def validate_region_coverage(events: list[Event], regions: list[Region]) -> set[str]:
    """Distinct event places with no exactly-matching region id.

    Advisory: events with unmatched places still mine, they just cannot
    render on the map.
    """
    region_ids = {r.id for r in regions}
    return {e.place for e in events} - region_ids
