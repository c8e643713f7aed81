"""LLM explanation support: context selection, prompt building, response parsing.

The prompt is a fixed template over the rule's sides and its per-location
monthly counts; building it is a pure function and tests pin the exact bytes.
The text-generation provider is pluggable so everything here runs offline.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Protocol, Sequence
from urllib.parse import urlparse

from .analytics import RuleProfile
from .dedup import CanonicalRule
from .model import ItemSet, TimeSlice


class ExplainError(Exception):
    pass


class EmptyContext(ExplainError):
    pass


class NotJson(ExplainError):
    pass


class WrongShape(ExplainError):
    pass


class ProviderUnavailable(ExplainError):
    pass


@dataclass(frozen=True)
class ExplainRequest:
    antecedent: ItemSet
    consequent: ItemSet
    locations: tuple[str, ...]
    series: dict[str, dict[str, int]]  # place -> slice label -> count
    dataset_noun: str = "dataset"


@dataclass(frozen=True)
class Source:
    title: str
    url: str


@dataclass(frozen=True)
class Hypothesis:
    hypothesis: str
    description: str
    sources: tuple[Source, ...] = ()


@dataclass(frozen=True)
class Explanation:
    hypotheses: tuple[Hypothesis, ...]


class TextProvider(Protocol):
    """Text-completion interface: prompt in, completion out."""

    def complete(self, prompt: str) -> str: ...


def select_default_context(
    rule: CanonicalRule,
    profile: RuleProfile,
    slices: Sequence[TimeSlice],
    dataset_noun: str = "dataset",
    locations: Sequence[str] | None = None,
    slice_labels: Sequence[str] | None = None,
) -> ExplainRequest:
    """Explanation context for a rule; defaults cover the common case.

    Without a user selection, picks the three places with the highest rule
    frequency (ties by place id) and the full configured date range.
    """
    if locations is None:
        nonzero = [(p, c) for p, c in profile.place_totals.items() if c > 0]
        nonzero.sort(key=lambda pc: (-pc[1], pc[0]))
        locations = [p for p, _ in nonzero[:3]]
    labels = (
        list(slice_labels) if slice_labels is not None else [s.label for s in slices]
    )
    label_of = {s.index: s.label for s in slices}
    series: dict[str, dict[str, int]] = {}
    for place in locations:
        per_label = {label: 0 for label in labels}
        for (slice_index, p), count in profile.counts.items():
            if p == place and label_of.get(slice_index) in per_label:
                per_label[label_of[slice_index]] += count
        series[place] = per_label
    return ExplainRequest(
        antecedent=rule.rule.antecedent,
        consequent=rule.rule.consequent,
        locations=tuple(locations),
        series=series,
        dataset_noun=dataset_noun,
    )


_PROMPT_HEAD = (
    "Here we have an association rule, describing a pattern found in a "
    "{noun}. Each element in the antecedent or consequent is an "
    "attribute–value pair.\n"
)

_PROMPT_TAIL = """\
Tasks:
1. Identify trends both in time and space.
2. Formulate a couple specific hypotheses explaining the identified behavior.
3. Search the internet for information sources to validate your hypothesis.
3. Use the Google Search tool to find specific news articles, reports, and studies
4. Provide actual working URLs, not placeholder URLs.

If no information was found, just return the hypothesis and description.

Output the findings as a JSON list of dictionaries with the following format (strictly valid JSON only):
{
    "hypothesis": "",
    "description": "",
    "sources": []
}
Output each source as a JSON dictionary with title and URL:
{
    "title": "",
    "url": ""
}"""


def build_prompt(req: ExplainRequest) -> str:
    """Render the explanation prompt; deterministic for fixed inputs.

    The duplicated "3." task numbering is intentional and part of the
    pinned template.
    """
    if not req.locations:
        raise EmptyContext()
    lines = [_PROMPT_HEAD.format(noun=req.dataset_noun)]
    ante = ", ".join(it.render() for it in req.antecedent)
    cons = ", ".join(it.render() for it in req.consequent)
    lines.append(f"Antecedent: {{{ante}}}")
    lines.append(f"Consequent: {{{cons}}}\n")
    for place in req.locations:
        lines.append(f"Location:{place}")
        for label, count in req.series.get(place, {}).items():
            lines.append(f"{label}: {count}")
        lines.append("")
    lines.append(_PROMPT_TAIL)
    return "\n".join(lines) + "\n"


_FENCE_RE = re.compile(r"^```[a-zA-Z]*\n(.*)\n```$", re.DOTALL)


def parse_explanation(raw: str) -> Explanation:
    """Parse the provider's completion into structured hypotheses.

    Accepts an optional markdown code fence around the JSON but performs no
    other repair; anything else non-JSON is rejected.
    """
    text = raw.strip()
    fence = _FENCE_RE.match(text)
    if fence:
        text = fence.group(1).strip()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NotJson(str(exc)) from None
    if not isinstance(doc, list):
        raise WrongShape("top level must be a JSON array")
    hypotheses = []
    for entry in doc:
        if not isinstance(entry, dict):
            raise WrongShape("array entries must be objects")
        if "hypothesis" not in entry or "description" not in entry:
            raise WrongShape("entries need hypothesis and description")
        sources = []
        for src in entry.get("sources") or []:
            if not isinstance(src, dict) or "title" not in src or "url" not in src:
                raise WrongShape("sources need title and url")
            parsed = urlparse(str(src["url"]))
            if not parsed.scheme or not parsed.netloc:
                raise WrongShape(f"source url {src['url']!r} is not absolute")
            sources.append(Source(title=str(src["title"]), url=str(src["url"])))
        hypotheses.append(
            Hypothesis(
                hypothesis=str(entry["hypothesis"]),
                description=str(entry["description"]),
                sources=tuple(sources),
            )
        )
    return Explanation(hypotheses=tuple(hypotheses))


def serialize_explanation(explanation: Explanation) -> str:
    """JSON form matching the response contract; inverse of parse."""
    return json.dumps(
        [
            {
                "hypothesis": h.hypothesis,
                "description": h.description,
                "sources": [{"title": s.title, "url": s.url} for s in h.sources],
            }
            for h in explanation.hypotheses
        ]
    )


def explain(req: ExplainRequest, provider: TextProvider) -> Explanation:
    """Build the prompt, call the provider, parse the response."""
    prompt = build_prompt(req)
    try:
        completion = provider.complete(prompt)
    except ExplainError:
        raise
    except Exception as exc:
        raise ProviderUnavailable(str(exc)) from exc
    return parse_explanation(completion)


class CannedProvider:
    """Offline provider returning a fixed completion; used in tests."""

    def __init__(self, completion: str):
        self.completion = completion
        self.prompts: list[str] = []

    def complete(self, prompt: str) -> str:
        self.prompts.append(prompt)
        return self.completion


@dataclass
class HttpProvider:
    """Minimal HTTP text-completion adapter.

    POSTs {"model": ..., "prompt": ...} to the endpoint with a bearer key
    and expects {"text": ...} back. Endpoint and key normally come from
    configuration or environment.
    """

    endpoint: str
    api_key: str = ""
    model: str = "gemini-2.0-flash"
    timeout: float = 60.0

    def complete(self, prompt: str) -> str:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = requests.post(
                self.endpoint,
                json={"model": self.model, "prompt": prompt},
                headers=headers,
                timeout=self.timeout,
            )
            resp.raise_for_status()
            return resp.json()["text"]
        except Exception as exc:
            raise ProviderUnavailable(str(exc)) from exc
