"""Enjoyability questionnaire scoring.

Answer labels map onto a fixed {3, 2, 1, 0} scale; responses are grouped
(experimental vs control) and compared by plain means, nothing further.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

SCORE_MAP = {
    "very enjoyable": 3,
    "somewhat enjoyable": 2,
    "neutral": 1,
    "not enjoyable": 0,
}

METRICS = (
    "overall_enjoyability",
    "difficulty_suitability",
    "diversity_and_expectation",
    "preferred_group",
)

GROUPS = ("experimental", "control")


class QuestionnaireError(ValueError):
    pass


@dataclass
class EnjoyabilityScores:
    means: dict  # group -> metric -> mean score
    counts: dict  # group -> number of respondents

    def to_dict(self) -> dict:
        return {"means": self.means, "counts": self.counts}


def _score(label) -> int:
    if isinstance(label, int):
        if label not in (0, 1, 2, 3):
            raise QuestionnaireError(f"numeric score {label} outside the 0..3 scale")
        return label
    key = str(label).strip().lower()
    if key not in SCORE_MAP:
        raise QuestionnaireError(f"unknown answer label {label!r}")
    return SCORE_MAP[key]


def score_questionnaire(path: str | Path) -> EnjoyabilityScores:
    """Read one JSON record per respondent: {"group": ..., "answers":
    {metric: label-or-score}} in a top-level list."""
    doc = json.loads(Path(path).read_text())
    if not isinstance(doc, list):
        raise QuestionnaireError("responses file must hold a list of respondent records")
    sums = {g: {m: 0 for m in METRICS} for g in GROUPS}
    counts = {g: 0 for g in GROUPS}
    for record in doc:
        group = record.get("group")
        if group not in GROUPS:
            raise QuestionnaireError(f"unknown group {group!r}")
        answers = record.get("answers", {})
        unknown = set(answers) - set(METRICS)
        if unknown:
            raise QuestionnaireError(f"unknown metrics {sorted(unknown)}")
        for metric in METRICS:
            if metric not in answers:
                raise QuestionnaireError(f"respondent missing metric {metric!r}")
            sums[group][metric] += _score(answers[metric])
        counts[group] += 1
    means = {
        g: {m: (sums[g][m] / counts[g] if counts[g] else None) for m in METRICS}
        for g in GROUPS
    }
    return EnjoyabilityScores(means=means, counts=counts)
