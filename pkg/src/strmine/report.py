"""Static report rendering: matplotlib figures plus delimited summaries.

Consumes a run artifact document (see pipeline.artifact_dict) and writes a
temporal heatmap, a cluster scatterplot, and (when region geometry is
available) a choropleth of overall occurrence counts, next to CSV exports of
the same numbers.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def write_cluster_csv(artifact: dict, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "cluster",
                "ruleCount",
                "meanLift",
                "meanSupport",
                "meanConfidence",
                "meanOccurrences",
            ]
        )
        for c in artifact["clusters"]:
            writer.writerow(
                [
                    c["id"],
                    c["ruleCount"],
                    c["meanLift"],
                    c["meanSupport"],
                    c["meanConfidence"],
                    c["meanOccurrences"],
                ]
            )


def _heatmap_rows(artifact: dict) -> tuple[list[str], list[str], np.ndarray]:
    labels = [s["label"] for s in artifact["slices"]]
    order = artifact["orders"]["clusters"]
    rows = [str(cid) for cid in order]
    matrix = np.zeros((len(rows), len(labels)))
    for i, cid in enumerate(order):
        totals = artifact["profiles"]["clusters"][str(cid)]["sliceTotals"]
        for s in artifact["slices"]:
            matrix[i, s["index"]] = totals.get(str(s["index"]), 0)
    return rows, labels, matrix


def write_heatmap_csv(artifact: dict, path: Path) -> None:
    rows, labels, matrix = _heatmap_rows(artifact)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cluster", *labels])
        for row_id, values in zip(rows, matrix):
            writer.writerow([row_id, *[int(v) for v in values]])


def render_heatmap(artifact: dict, path: Path) -> None:
    rows, labels, matrix = _heatmap_rows(artifact)
    fig, ax = plt.subplots(
        figsize=(max(6, 0.3 * len(labels)), max(3, 0.4 * len(rows)))
    )
    im = ax.imshow(matrix, aspect="auto", cmap="Blues")
    ax.set_yticks(range(len(rows)), [f"cluster {r}" for r in rows])
    step = max(1, len(labels) // 24)
    ax.set_xticks(range(0, len(labels), step), labels[::step], rotation=90, fontsize=7)
    ax.set_xlabel("time slice")
    fig.colorbar(im, ax=ax, label="occurrences")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_scatter(artifact: dict, path: Path) -> None:
    clusters = artifact["clusters"]
    xs = [c["ruleCount"] for c in clusters]
    ys = [c["meanLift"] for c in clusters]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.scatter(xs, ys, s=60, alpha=0.8)
    for c, x, y in zip(clusters, xs, ys):
        ax.annotate(str(c["id"]), (x, y), textcoords="offset points", xytext=(4, 4))
    ax.set_xlabel("rule count")
    ax.set_ylabel("mean lift")
    ax.axhline(1.0, color="grey", linewidth=0.8, linestyle="--")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _polygons(geometry: dict):
    if geometry.get("type") == "Polygon":
        yield geometry["coordinates"]
    elif geometry.get("type") == "MultiPolygon":
        yield from geometry["coordinates"]


def render_map(artifact: dict, regions_geojson: dict, path: Path) -> None:
    """Choropleth of overall occurrence counts over the uploaded geometry."""
    overall = artifact["profiles"].get("overall") or {"placeTotals": {}}
    totals = overall["placeTotals"]
    vmax = max(totals.values(), default=0)
    cmap = plt.get_cmap("Blues")
    fig, ax = plt.subplots(figsize=(6, 6))
    for feature in regions_geojson.get("features", []):
        name = str((feature.get("properties") or {}).get("name", ""))
        count = totals.get(name, 0)
        color = cmap(0.08 + 0.92 * count / vmax) if vmax else cmap(0.08)
        for polygon in _polygons(feature.get("geometry") or {}):
            for ring in polygon[:1]:  # exterior ring only
                xs = [pt[0] for pt in ring]
                ys = [pt[1] for pt in ring]
                ax.fill(xs, ys, facecolor=color, edgecolor="black", linewidth=0.4)
    ax.set_aspect("equal")
    ax.set_axis_off()
    sm = plt.cm.ScalarMappable(cmap=cmap, norm=plt.Normalize(0, max(vmax, 1)))
    fig.colorbar(sm, ax=ax, shrink=0.7, label="occurrences")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report(
    artifact: dict, out_dir: Path, regions_geojson: dict | None = None
) -> list[Path]:
    """Write all figures and CSVs; returns the produced paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    produced = []
    targets = [
        (out_dir / "clusters.csv", lambda p: write_cluster_csv(artifact, p)),
        (out_dir / "heatmap.csv", lambda p: write_heatmap_csv(artifact, p)),
        (out_dir / "heatmap.png", lambda p: render_heatmap(artifact, p)),
        (out_dir / "scatter.png", lambda p: render_scatter(artifact, p)),
    ]
    if regions_geojson is not None:
        targets.append(
            (out_dir / "map.png", lambda p: render_map(artifact, regions_geojson, p))
        )
    for path, fn in targets:
        fn(path)
        produced.append(path)
    return produced
