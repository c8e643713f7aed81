"""Command line driver: batch runs, dataset validation, reports, and serving."""

from __future__ import annotations

import datetime as _dt
import json
import sys
from pathlib import Path

import click

from . import ingest, pipeline, report


def _parse_date(_ctx, _param, value: str | None):
    if value is None:
        return None
    try:
        return _dt.date.fromisoformat(value)
    except ValueError:
        raise click.BadParameter(f"{value!r} is not YYYY-mm-dd") from None


@click.group()
def main() -> None:
    """Spatiotemporal association-rule mining and clustering."""


@main.command("run")
@click.option("--events", "events_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--regions", "regions_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--attributes", required=True, help="Comma-separated attribute columns to mine.")
@click.option("--start", callback=_parse_date, required=True)
@click.option("--end", callback=_parse_date, required=True)
@click.option("--granularity", type=click.Choice(["month", "week", "year"]), default="month")
@click.option("--min-support", type=float, default=0.05, show_default=True)
@click.option("--min-lift", type=float, default=1.0, show_default=True)
@click.option("--resolution", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-rule-len", type=int, default=5, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Artifact JSON path; stdout when absent.")
def cmd_run(
    events_path, regions_path, attributes, start, end, granularity,
    min_support, min_lift, resolution, seed, max_rule_len, out_path,
) -> None:
    """Mine, dedup, cluster, and profile; export the run artifact as JSON."""
    selected = [a for a in attributes.split(",") if a]
    try:
        config = pipeline.RunConfig(
            attribute_columns=tuple(selected),
            start_date=start,
            end_date=end,
            granularity=granularity,
            min_support=min_support,
            min_lift=min_lift,
            resolution=resolution,
            seed=seed,
            max_rule_len=max_rule_len,
        )
        events, _, ingest_report = ingest.parse_events_csv(
            Path(events_path).read_bytes(), selected
        )
        if regions_path:
            regions = ingest.parse_regions_geojson(Path(regions_path).read_bytes())
            unmatched = ingest.validate_region_coverage(events, regions)
            for place in sorted(unmatched):
                click.echo(f"warning: place {place!r} has no region", err=True)
        artifacts = pipeline.run_pipeline(events, config)
    except (ingest.IngestError, pipeline.ConfigError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(
        f"kept {ingest_report.kept_rows}/{ingest_report.total_rows} rows, "
        f"{len(artifacts.rules)} rules, {len(artifacts.clusters)} clusters",
        err=True,
    )
    text = pipeline.artifact_json(artifacts)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        click.echo(text)


@main.command("validate")
@click.option("--events", "events_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--regions", "regions_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--attributes", default="", help="Comma-separated columns to check for nulls.")
def cmd_validate(events_path, regions_path, attributes) -> None:
    """Check the event CSV (and optional region GeoJSON) and print a report."""
    selected = [a for a in attributes.split(",") if a]
    try:
        events, descriptor, ingest_report = ingest.parse_events_csv(
            Path(events_path).read_bytes(), selected
        )
        if regions_path:
            regions = ingest.parse_regions_geojson(Path(regions_path).read_bytes())
            ingest_report.unmatched_places = ingest.validate_region_coverage(
                events, regions
            )
    except ingest.IngestError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(
        json.dumps(
            {
                "columns": list(descriptor.columns),
                "attributeColumns": list(descriptor.attribute_columns),
                "totalRows": ingest_report.total_rows,
                "keptRows": ingest_report.kept_rows,
                "droppedNullRows": ingest_report.dropped_null_rows,
                "droppedUnparseableDateRows": ingest_report.dropped_unparseable_date_rows,
                "unmatchedPlaces": sorted(ingest_report.unmatched_places),
            },
            indent=2,
        )
    )
    for place in sorted(ingest_report.unmatched_places):
        click.echo(f"warning: place {place!r} has no region", err=True)


@main.command("report")
@click.option("--artifact", "artifact_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--regions", "regions_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
def cmd_report(artifact_path, regions_path, out_dir) -> None:
    """Render figures (heatmap, scatter, map) and CSVs from a run artifact."""
    artifact = json.loads(Path(artifact_path).read_text(encoding="utf-8"))
    regions_geojson = None
    if regions_path:
        regions_geojson = json.loads(Path(regions_path).read_text(encoding="utf-8"))
    produced = report.write_report(artifact, Path(out_dir), regions_geojson)
    for path in produced:
        click.echo(str(path), err=True)


@main.command("serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", default="./strmine-data", show_default=True)
@click.option("--llm-endpoint", envvar="STRMINE_LLM_ENDPOINT", default=None)
@click.option("--llm-key", envvar="STRMINE_LLM_KEY", default="")
@click.option("--llm-model", envvar="STRMINE_LLM_MODEL", default="gemini-2.0-flash")
def cmd_serve(port, host, data_dir, llm_endpoint, llm_key, llm_model) -> None:
    """Host the HTTP API."""
    import uvicorn

    from .explain import HttpProvider
    from .service import create_app

    provider = None
    if llm_endpoint:
        provider = HttpProvider(endpoint=llm_endpoint, api_key=llm_key, model=llm_model)
    app = create_app(data_dir, provider=provider)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
