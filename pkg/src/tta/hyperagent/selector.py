"""Opponent selection: prompt -> model -> parse -> validate, with retries.

Validation failures are returned as values, not raised, so callers can log
the reason and decide whether to retry. Only transport problems and retry
exhaustion surface as exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

from ..archive import AgentArchive, ArchiveError, SelectionResult
from .client import LLMClientConfig, LLMClientError
from .parsing import ParsedOutput, parse_output
from .prompts import build_prompt

REQUIRED_FIELDS = (
    "chosen_agent_type",
    "chosen_agent_model_path",
    "chosen_agent_character",
)

# Everything validate() can report, in check order.
FAILURE_REASONS = (
    "no_json",
    "missing_field",
    "unknown_path",
    "type_mismatch",
    "unknown_character",
)

WORD_LIMIT = 300


@dataclass(frozen=True)
class ValidationFailure:
    reason: str
    detail: str = ""

    def __post_init__(self):
        if self.reason not in FAILURE_REASONS and self.reason != "transport":
            raise ValueError(f"unknown failure reason {self.reason!r}")


@dataclass(frozen=True)
class AttemptLog:
    attempt: int
    reason: str
    detail: str = ""


class SelectionExhausted(RuntimeError):
    """Raised when every attempt failed; carries the per-attempt reasons so
    the caller can fall back (e.g. to a random draw) with a full record."""

    def __init__(self, attempts: list[AttemptLog]):
        lines = "; ".join(f"#{a.attempt} {a.reason}" for a in attempts)
        super().__init__(f"opponent selection failed after {len(attempts)} attempts: {lines}")
        self.attempts = list(attempts)


def extract_selection(parsed: ParsedOutput) -> Union[SelectionResult, ValidationFailure]:
    """Pull the selection triple out of a parsed response. When several JSON
    blocks are present the last one wins; earlier blocks are treated as
    drafts the model superseded."""
    if not parsed.json_blocks:
        return ValidationFailure("no_json", "response contains no parsable JSON object")
    block = parsed.json_blocks[-1]
    for name in REQUIRED_FIELDS:
        value = block.get(name)
        if not isinstance(value, str) or not value:
            return ValidationFailure("missing_field", name)
    return SelectionResult(
        chosen_agent_type=block["chosen_agent_type"],
        chosen_agent_model_path=block["chosen_agent_model_path"],
        chosen_agent_character=block["chosen_agent_character"],
    )


def validate(
    parsed: ParsedOutput, archive: AgentArchive
) -> Union[SelectionResult, ValidationFailure]:
    """Extraction plus archive resolution. Check order: no_json,
    missing_field, unknown_path, type_mismatch, unknown_character."""
    selection = extract_selection(parsed)
    if isinstance(selection, ValidationFailure):
        return selection
    try:
        archive.resolve(selection)
    except ArchiveError as exc:
        if exc.reason in FAILURE_REASONS:
            return ValidationFailure(exc.reason, str(exc))
        raise
    return selection


def select_opponent(
    playing_data: dict,
    archive: AgentArchive,
    config: LLMClientConfig,
    client,
    icl_variant: str = "full",
    log: Optional[Callable[[str], None]] = None,
) -> SelectionResult:
    """Query the model until a selection validates against the archive.

    Transport errors consume an attempt like invalid outputs do. After
    config.retry_limit failed attempts raises SelectionExhausted. Responses
    over the word limit are logged, never rejected for length alone.
    """
    prompt = build_prompt(playing_data, archive.manifest(), icl_variant)
    attempts: list[AttemptLog] = []
    for attempt in range(1, config.retry_limit + 1):
        try:
            text = client.query(prompt, config)
        except LLMClientError as exc:
            attempts.append(AttemptLog(attempt, "transport", str(exc)))
            if log:
                log(f"attempt {attempt}: transport failure: {exc}")
            continue
        parsed = parse_output(text)
        if log and parsed.word_count > WORD_LIMIT:
            log(f"attempt {attempt}: response is {parsed.word_count} words (limit {WORD_LIMIT})")
        outcome = validate(parsed, archive)
        if isinstance(outcome, SelectionResult):
            return outcome
        attempts.append(AttemptLog(attempt, outcome.reason, outcome.detail))
        if log:
            log(f"attempt {attempt}: rejected ({outcome.reason}: {outcome.detail})")
    raise SelectionExhausted(attempts)
