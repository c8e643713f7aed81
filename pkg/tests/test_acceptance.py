"""Acceptance suite: one test per top-level criterion.

Each test prints a single [PASS]/[FAIL] line on the real stdout so the
verdicts survive pytest's output capture.
"""

from __future__ import annotations

import json
import random
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from strmine import analytics, clustering, dedup, explain, mining
from strmine.cli import main as cli_main
from strmine.model import Item, ItemSet, Rule, SliceMetrics
from conftest import (
    PLANTED_MONTHS,
    PLANTED_PER_MONTH,
    items,
    planted_csv,
    single_letter_tx,
)
import oracles
from test_explain import fars_request
from test_service import CONFIG, make_client, start_run, upload_dataset

DATA = Path(__file__).parent / "data"


_CAPTURE = None


@pytest.fixture(autouse=True)
def _verdict_capture(capfd):
    """Expose the capture fixture so verdicts reach the real stdout."""
    global _CAPTURE
    _CAPTURE = capfd
    yield
    _CAPTURE = None


def _emit(line: str) -> None:
    if _CAPTURE is not None:
        with _CAPTURE.disabled():
            print(line, flush=True)
    else:
        print(line, file=sys.__stdout__, flush=True)


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        _emit(f"[FAIL] {name}")
        raise
    _emit(f"[PASS] {name}")


def random_transactions(rng: random.Random) -> list[ItemSet]:
    """Random dataset over at most 12 distinct items."""
    universe: list[list[Item]] = []
    while sum(len(vs) for vs in universe) < 9:
        attr = chr(ord("a") + len(universe))
        universe.append([Item(attr, str(v)) for v in range(rng.randint(2, 3))])
    n = rng.randint(5, 500)
    transactions = []
    for _ in range(n):
        chosen = [
            rng.choice(values)
            for values in universe
            if rng.random() < rng.uniform(0.2, 0.9)
        ]
        transactions.append(ItemSet.of(chosen))
    return transactions


def random_rule(rng: random.Random) -> Rule:
    attrs = rng.sample("ABCDEF", rng.randint(2, 6))
    split = rng.randint(1, len(attrs) - 1)
    metrics = {0: SliceMetrics(0.1, 0.1, 1.0)}
    return Rule(
        antecedent=ItemSet.of(Item(a, str(rng.randint(1, 3))) for a in attrs[:split]),
        consequent=ItemSet.of(Item(a, str(rng.randint(1, 3))) for a in attrs[split:]),
        slice_metrics=metrics,
    )


def mine_single_slice(transactions: list[ItemSet], min_support: float) -> list[Rule]:
    config = mining.MiningConfig(min_support=min_support, min_lift=0.0)
    frequents = mining.fp_growth(transactions, min_support)
    return mining.generate_rules(frequents, len(transactions), config)


def test_mining_oracle_equivalence():
    with criterion("mining matches brute-force enumeration on 100 random datasets"):
        rng = random.Random(20160101)
        started = time.perf_counter()
        for trial in range(100):
            transactions = random_transactions(rng)
            min_support = rng.choice([0.05, 0.1, 0.3])
            mined = {
                f.items.items: f.count
                for f in mining.fp_growth(transactions, min_support)
            }
            expected = {
                combo: count
                for combo, count in oracles.apriori_bruteforce(
                    transactions, min_support
                ).items()
            }
            assert mined == expected, f"trial {trial} diverged from the oracle"
        assert time.perf_counter() - started < 30.0


def test_metric_exactness():
    with criterion("support/confidence/lift exact on worked fixtures, lift symmetric"):
        five = single_letter_tx("abc", "ab", "ac", "bc", "abc")
        rule = Rule(items("a:1"), items("b:1"), {0: SliceMetrics(0.0, 0.0, 0.0)})
        assert abs(mining.support(items("a:1", "b:1"), five) - 0.6) <= 1e-12
        assert abs(mining.confidence(rule, five) - 0.75) <= 1e-12
        assert abs(mining.lift(rule, five) - 0.9375) <= 1e-12

        for transactions in (five, single_letter_tx("abc", "abc", "ab", "a", "ac")):
            rules = mine_single_slice(transactions, 0.2)
            by_sides = {
                (r.antecedent.items, r.consequent.items): r.slice_metrics[0].lift
                for r in rules
            }
            for (ante, cons), lift_value in by_sides.items():
                assert by_sides[(cons, ante)] == lift_value  # exactly symmetric


def test_dedup_contract():
    with criterion("dedup keeps the max-mean-lift representative per union"):
        transactions = single_letter_tx("abc", "abc", "ab", "a", "ac")
        rules = mine_single_slice(transactions, 0.4)
        merged = dedup.merge_across_slices({0: rules})
        collapsed = dedup.collapse_superfluous(merged)

        full = {cr.key: cr for cr in collapsed}
        winner = full.get("a:1,b:1=>c:1")
        assert winner is not None, "expected the 10/9-lift representative"
        assert abs(winner.mean_lift - 10.0 / 9.0) <= 1e-12
        dropped_lifts = {
            cr.mean_lift
            for cr in merged
            if cr.rule.antecedent.union(cr.rule.consequent).render() == "{a:1, b:1, c:1}"
        }
        assert dropped_lifts == {1.0, 10.0 / 9.0}

        unions = [
            cr.rule.antecedent.union(cr.rule.consequent).items for cr in collapsed
        ]
        assert len(unions) == len(set(unions))  # injective on unions
        assert dedup.collapse_superfluous(collapsed) == collapsed  # idempotent


def test_similarity_properties():
    with criterion("similarity symmetric, in [0,1], identity iff 1, 2/3 case exact"):
        rng = random.Random(42)
        for _ in range(10_000):
            r1, r2 = random_rule(rng), random_rule(rng)
            s = clustering.rule_similarity(r1, r2)
            assert clustering.rule_similarity(r2, r1) == s
            assert 0.0 <= s <= 1.0
            same = r1.antecedent == r2.antecedent and r1.consequent == r2.consequent
            assert (s == 1.0) == same

        metrics = {0: SliceMetrics(0.1, 0.1, 1.0)}
        r1 = Rule(items("A:1", "B:1"), items("C:1"), metrics)
        r2 = Rule(items("A:1"), items("C:1"), metrics)
        assert clustering.rule_similarity(r1, r2) == 2.0 / 3.0


def test_louvain():
    with criterion("seeded Louvain: exact split, modularity check, near-optimal"):
        w = np.zeros((6, 6))
        for tri in ([0, 1, 2], [3, 4, 5]):
            for i in tri:
                for j in tri:
                    if i != j:
                        w[i, j] = 1.0
        w[2, 3] = w[3, 2] = 0.01
        graph = clustering.SimilarityGraph(nodes=(), weights=w)
        partition = clustering.louvain(graph, resolution=1.0, seed=0)
        groups = [sorted(members) for members in partition.clusters().values()]
        assert sorted(groups) == [[0, 1, 2], [3, 4, 5]]
        recomputed = oracles.modularity_of_partition(w, groups, 1.0)
        assert abs(partition.modularity - recomputed) <= 1e-12

        reruns = [clustering.louvain(graph, 1.0, seed=0) for _ in range(5)]
        assert all(p.assignment == partition.assignment for p in reruns)

        rng = random.Random(9)
        for _ in range(50):
            n = rng.randint(2, 8)
            m = np.zeros((n, n))
            for i in range(n):
                for j in range(i + 1, n):
                    if rng.random() < 0.7:
                        m[i, j] = m[j, i] = rng.random()
            g = clustering.SimilarityGraph(nodes=(), weights=m)
            p = clustering.louvain(g, resolution=1.0, seed=0)
            best_q, _ = oracles.best_partition_bruteforce(m, 1.0)
            assert p.modularity >= 0.95 * best_q - 1e-9


def test_end_to_end_planted_pattern(tmp_path):
    with criterion("planted 24-month pattern recovered end to end via the CLI"):
        events = tmp_path / "events.csv"
        events.write_bytes(planted_csv())
        out = tmp_path / "artifact.json"
        started = time.perf_counter()
        result = CliRunner().invoke(
            cli_main,
            [
                "run", "--events", str(events), "--attributes", "A,B,C",
                "--start", "2016-01-01", "--end", "2017-12-31",
                "--min-support", "0.3", "--min-lift", "1.05",
                "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert time.perf_counter() - started < 60.0

        artifact = json.loads(out.read_text())
        planted = [
            r
            for r in artifact["rules"]
            if sorted(r["antecedent"] + r["consequent"]) == ["A:x", "B:y", "C:z"]
        ]
        assert len(planted) == 1
        profile = artifact["profiles"]["rules"][planted[0]["key"]]
        for idx in range(24):
            expected = PLANTED_PER_MONTH if idx in PLANTED_MONTHS else 0
            assert profile["sliceTotals"].get(str(idx), 0) == expected
        assert profile["placeTotals"] == {
            "R1": PLANTED_PER_MONTH * len(PLANTED_MONTHS)
        }

        all_profiles = list(artifact["profiles"]["rules"].values())
        all_profiles += list(artifact["profiles"]["clusters"].values())
        if artifact["profiles"]["overall"]:
            all_profiles.append(artifact["profiles"]["overall"])
        for p in all_profiles:
            assert sum(p["sliceTotals"].values()) == p["grandTotal"]
            assert sum(p["placeTotals"].values()) == p["grandTotal"]


def test_seriation(tmp_path):
    with criterion("seriation groups seasons; heatmap and matrix share row order"):
        summer = [0.0, 0.0, 0.0, 0.0, 0.0, 10.0, 12.0, 11.0, 0.0, 0.0, 0.0, 0.0]
        winter = [9.0, 11.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 10.0, 12.0]
        series = {
            "s1": summer,
            "w1": winter,
            "s2": [v * 1.1 for v in summer],
            "w2": [v * 0.9 for v in winter],
        }
        order = analytics.seriation_order(series)
        assert abs(order.index("s1") - order.index("s2")) == 1
        assert abs(order.index("w1") - order.index("w2")) == 1
        best = oracles.min_adjacent_distance_orders(
            {k: np.asarray(v) for k, v in series.items()}
        )
        assert order in best or order[::-1] in best

        client = make_client(tmp_path)
        run_id = start_run(client, upload_dataset(client))
        heat = client.get(f"/api/v1/runs/{run_id}/heatmap").json()
        matrix = client.get(f"/api/v1/runs/{run_id}/attribute-matrix").json()
        assert json.dumps(heat["rows"]) == json.dumps(matrix["rows"])
        for row in heat["rows"]:
            params = {"level": "rule", "clusterId": int(row)}
            heat_r = client.get(f"/api/v1/runs/{run_id}/heatmap", params=params)
            matrix_r = client.get(
                f"/api/v1/runs/{run_id}/attribute-matrix", params=params
            )
            assert json.dumps(heat_r.json()["rows"]) == json.dumps(
                matrix_r.json()["rows"]
            )


def test_explain_golden_files():
    with criterion("prompt golden bytes, response parsing, canned provider run"):
        prompt = explain.build_prompt(fars_request())
        assert prompt == (DATA / "prompt_fars.txt").read_text(encoding="utf-8")
        assert "2016-01: 27" in prompt
        assert prompt.count("\n3. ") == 2

        doc = [
            {
                "hypothesis": "h",
                "description": "d",
                "sources": [{"title": "t", "url": "https://example.com/x"}],
            }
        ]
        parsed = explain.parse_explanation(json.dumps(doc))
        assert json.loads(explain.serialize_explanation(parsed)) == doc
        for bad in ('{"hypothesis": "h"}', '"just a string"'):
            try:
                explain.parse_explanation(bad)
            except explain.WrongShape:
                pass
            else:
                raise AssertionError(f"accepted non-array shape {bad!r}")

        provider = explain.CannedProvider(json.dumps(doc))
        result = explain.explain(fars_request(), provider)
        assert result == parsed
        assert provider.prompts == [prompt]


def test_service_determinism(tmp_path):
    with criterion("identical runs export byte-identical artifacts; reads idempotent"):
        artifacts = []
        run_ids = []
        for name in ("first", "second"):
            client = make_client(tmp_path / name)
            run_id = start_run(client, upload_dataset(client))
            run_ids.append(run_id)
            artifacts.append(client.get(f"/api/v1/runs/{run_id}/artifact").content)

            for path in (
                f"/api/v1/runs/{run_id}/artifact",
                f"/api/v1/runs/{run_id}/heatmap",
                f"/api/v1/runs/{run_id}/attribute-matrix",
                f"/api/v1/runs/{run_id}/map",
                f"/api/v1/runs/{run_id}/scatter",
            ):
                assert client.get(path).content == client.get(path).content
        assert run_ids[0] == run_ids[1]
        assert artifacts[0] == artifacts[1]
