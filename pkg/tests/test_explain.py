from __future__ import annotations

import json
from pathlib import Path

import pytest

from strmine import explain
from strmine.analytics import RuleProfile
from strmine.dedup import CanonicalRule
from strmine.model import Rule, SliceMetrics, TimeSlice, canonical_rule_key
from conftest import items

import datetime as _dt

DATA = Path(__file__).parent / "data"


def fars_request() -> explain.ExplainRequest:
    return explain.ExplainRequest(
        antecedent=items("LitCond:Daylight", "Weather:Clear"),
        consequent=items("Drunk:No"),
        locations=("Florida", "Texas"),
        series={
            "Florida": {"2016-01": 27, "2016-02": 44},
            "Texas": {"2016-01": 61, "2016-02": 52},
        },
        dataset_noun="vehicular accidents dataset",
    )


def month_slice(index: int, year: int, month: int) -> TimeSlice:
    import calendar

    return TimeSlice(
        index=index,
        label=f"{year:04d}-{month:02d}",
        start=_dt.date(year, month, 1),
        end=_dt.date(year, month, calendar.monthrange(year, month)[1]),
    )


class TestSelectDefaultContext:
    def make(self, place_counts: dict[str, int]) -> tuple[CanonicalRule, RuleProfile]:
        rule = Rule(items("A:x"), items("B:y"), {0: SliceMetrics(0.5, 0.5, 1.2)})
        cr = CanonicalRule(rule=rule, key=canonical_rule_key(rule))
        profile = RuleProfile(rule_key=cr.key)
        for place, count in place_counts.items():
            profile.counts[(0, place)] = count
            profile.place_totals[place] = count
            profile.grand_total += count
        profile.slice_totals[0] = profile.grand_total
        return cr, profile

    def test_top_three_by_count(self):
        cr, profile = self.make({"TX": 61, "FL": 27, "CA": 40, "NY": 5})
        req = explain.select_default_context(cr, profile, [month_slice(0, 2016, 1)])
        assert req.locations == ("TX", "CA", "FL")

    def test_fewer_than_three_nonzero(self):
        cr, profile = self.make({"TX": 3, "FL": 0})
        req = explain.select_default_context(cr, profile, [month_slice(0, 2016, 1)])
        assert req.locations == ("TX",)

    def test_user_selection_overrides(self):
        cr, profile = self.make({"TX": 61, "FL": 27})
        req = explain.select_default_context(
            cr, profile, [month_slice(0, 2016, 1)], locations=["FL"]
        )
        assert req.locations == ("FL",)

    def test_stable_under_place_permutation(self):
        cr, profile_a = self.make({"TX": 61, "FL": 27, "CA": 40})
        _, profile_b = self.make({"CA": 40, "TX": 61, "FL": 27})
        slices = [month_slice(0, 2016, 1)]
        assert explain.select_default_context(
            cr, profile_a, slices
        ) == explain.select_default_context(cr, profile_b, slices)

    def test_series_spans_full_range(self):
        cr, profile = self.make({"TX": 61})
        slices = [month_slice(0, 2016, 1), month_slice(1, 2016, 2)]
        req = explain.select_default_context(cr, profile, slices)
        assert req.series["TX"] == {"2016-01": 61, "2016-02": 0}


class TestBuildPrompt:
    def test_fars_golden(self):
        prompt = explain.build_prompt(fars_request())
        assert prompt == (DATA / "prompt_fars.txt").read_text(encoding="utf-8")

    def test_minimal_golden(self):
        req = explain.ExplainRequest(
            antecedent=items("A:x"),
            consequent=items("B:y"),
            locations=("R1",),
            series={"R1": {"2016-01": 3}},
        )
        assert explain.build_prompt(req) == (DATA / "prompt_minimal.txt").read_text(
            encoding="utf-8"
        )

    def test_duplicated_task_numbering(self):
        prompt = explain.build_prompt(fars_request())
        assert prompt.count("\n3. ") == 2

    def test_deterministic(self):
        assert explain.build_prompt(fars_request()) == explain.build_prompt(
            fars_request()
        )

    def test_empty_context(self):
        req = explain.ExplainRequest(
            antecedent=items("A:x"),
            consequent=items("B:y"),
            locations=(),
            series={},
        )
        with pytest.raises(explain.EmptyContext):
            explain.build_prompt(req)


class TestParseExplanation:
    def test_simple(self):
        e = explain.parse_explanation(
            '[{"hypothesis":"h","description":"d","sources":[]}]'
        )
        assert len(e.hypotheses) == 1
        assert e.hypotheses[0].sources == ()

    def test_fenced(self):
        raw = '```json\n[{"hypothesis":"h","description":"d"}]\n```'
        assert explain.parse_explanation(raw).hypotheses[0].hypothesis == "h"

    def test_plain_fence(self):
        raw = '```\n[{"hypothesis":"h","description":"d"}]\n```'
        assert len(explain.parse_explanation(raw).hypotheses) == 1

    def test_object_not_array(self):
        with pytest.raises(explain.WrongShape):
            explain.parse_explanation('{"hypothesis": "h"}')

    def test_missing_description(self):
        with pytest.raises(explain.WrongShape):
            explain.parse_explanation('[{"hypothesis": "h"}]')

    def test_not_json(self):
        with pytest.raises(explain.NotJson):
            explain.parse_explanation("Sure! Here are some hypotheses: ...")

    def test_relative_url_rejected(self):
        raw = '[{"hypothesis":"h","description":"d","sources":[{"title":"t","url":"/x"}]}]'
        with pytest.raises(explain.WrongShape):
            explain.parse_explanation(raw)

    def test_missing_sources_key_is_empty(self):
        e = explain.parse_explanation('[{"hypothesis":"h","description":"d"}]')
        assert e.hypotheses[0].sources == ()

    def test_roundtrip(self):
        e = explain.Explanation(
            hypotheses=(
                explain.Hypothesis(
                    hypothesis="festival crowds",
                    description="annual event drives thefts",
                    sources=(
                        explain.Source(title="news", url="https://example.com/a"),
                    ),
                ),
            )
        )
        assert explain.parse_explanation(explain.serialize_explanation(e)) == e


class TestExplain:
    def test_end_to_end_with_canned_provider(self):
        completion = json.dumps(
            [
                {
                    "hypothesis": "seasonal travel",
                    "description": "winter influx raises exposure",
                    "sources": [{"title": "report", "url": "https://example.org/r"}],
                }
            ]
        )
        provider = explain.CannedProvider(completion)
        result = explain.explain(fars_request(), provider)
        assert result.hypotheses[0].hypothesis == "seasonal travel"
        assert provider.prompts == [explain.build_prompt(fars_request())]

    def test_provider_failure_wrapped(self):
        class Broken:
            def complete(self, prompt: str) -> str:
                raise ConnectionError("no route")

        with pytest.raises(explain.ProviderUnavailable):
            explain.explain(fars_request(), Broken())

    def test_bad_completion_propagates_parse_error(self):
        provider = explain.CannedProvider("not json at all")
        with pytest.raises(explain.NotJson):
            explain.explain(fars_request(), provider)
