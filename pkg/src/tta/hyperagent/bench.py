"""Output-quality benchmark for the selection model.

Two rates and two entropies over a batch of responses:

  json_in_output      fraction of responses holding at least one parsable
                      JSON object (fields not required)
  format_correctness  fraction with exactly one JSON object preceded by
                      non-empty reasoning
  type / character    Shannon entropy (bits) of the chosen agent type and
  entropy             character, over responses whose last JSON block
                      carries the full selection triple

Entropies are undefined when no response yields a selection; the report
stores the marker string rather than faking a zero.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .client import LLMClientConfig, LLMClientError, load_fixture_texts
from .parsing import parse_output
from .selector import ValidationFailure, extract_selection

ENTROPY_UNDEFINED = "undefined"


def shannon_entropy_bits(labels: Sequence[str]) -> float:
    """H = -sum p log2 p over the label distribution. Empty input is the
    caller's problem; here it is an error."""
    if not labels:
        raise ValueError("entropy of an empty label set is undefined")
    counts = Counter(labels)
    total = len(labels)
    return -sum((c / total) * math.log2(c / total) for c in counts.values())


@dataclass(frozen=True)
class RunRecord:
    index: int
    name: Optional[str]
    json_in_output: bool
    format_correct: bool
    selection: Optional[dict]
    word_count: int
    failure: Optional[str]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "name": self.name,
            "json_in_output": self.json_in_output,
            "format_correct": self.format_correct,
            "selection": self.selection,
            "word_count": self.word_count,
            "failure": self.failure,
        }


@dataclass(frozen=True)
class BenchmarkReport:
    n: int
    json_in_output: float
    format_correctness: float
    type_entropy_bits: Union[float, str]
    character_entropy_bits: Union[float, str]
    records: tuple[RunRecord, ...]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "json_in_output": self.json_in_output,
            "format_correctness": self.format_correctness,
            "type_entropy_bits": self.type_entropy_bits,
            "character_entropy_bits": self.character_entropy_bits,
            "records": [r.to_dict() for r in self.records],
        }


def evaluate_response(index: int, text: str, name: Optional[str] = None) -> RunRecord:
    parsed = parse_output(text)
    json_in = len(parsed.json_blocks) >= 1
    format_ok = len(parsed.json_blocks) == 1 and bool(parsed.reasoning)
    outcome = extract_selection(parsed)
    if isinstance(outcome, ValidationFailure):
        return RunRecord(
            index=index,
            name=name,
            json_in_output=json_in,
            format_correct=format_ok,
            selection=None,
            word_count=parsed.word_count,
            failure=outcome.reason,
        )
    return RunRecord(
        index=index,
        name=name,
        json_in_output=json_in,
        format_correct=format_ok,
        selection=outcome.to_dict(),
        word_count=parsed.word_count,
        failure=None,
    )


def benchmark_texts(
    texts: Sequence[str], names: Optional[Sequence[Optional[str]]] = None
) -> BenchmarkReport:
    if not texts:
        raise ValueError("benchmark needs at least one response")
    if names is None:
        names = [None] * len(texts)
    if len(names) != len(texts):
        raise ValueError("names and texts must align")
    records = tuple(
        evaluate_response(i, text, name) for i, (text, name) in enumerate(zip(texts, names))
    )
    n = len(records)
    selections = [r.selection for r in records if r.selection is not None]
    if selections:
        type_entropy = shannon_entropy_bits([s["chosen_agent_type"] for s in selections])
        char_entropy = shannon_entropy_bits([s["chosen_agent_character"] for s in selections])
    else:
        type_entropy = ENTROPY_UNDEFINED
        char_entropy = ENTROPY_UNDEFINED
    return BenchmarkReport(
        n=n,
        json_in_output=sum(r.json_in_output for r in records) / n,
        format_correctness=sum(r.format_correct for r in records) / n,
        type_entropy_bits=type_entropy,
        character_entropy_bits=char_entropy,
        records=records,
    )


def benchmark_fixture_set(fixture_dir=None) -> BenchmarkReport:
    """One run per .txt fixture, in sorted-name order."""
    texts = load_fixture_texts(fixture_dir)
    names = sorted(texts)
    return benchmark_texts([texts[k] for k in names], names)


def benchmark_client(
    client, prompt: str, config: LLMClientConfig, n: int = 20
) -> BenchmarkReport:
    """n live queries with the same prompt. A transport failure scores the
    run as an empty response rather than aborting the batch."""
    if n < 1:
        raise ValueError("n must be at least 1")
    texts = []
    for _ in range(n):
        try:
            texts.append(client.query(prompt, config))
        except LLMClientError:
            texts.append("")
    return benchmark_texts(texts)
