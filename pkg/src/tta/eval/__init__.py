from .agents import (
    Agent,
    BuiltinAgent,
    HistoryAblatedAgent,
    MacroAgent,
    NoopAgent,
    PolicyAgent,
    RandomAgent,
)
from .harness import (
    HeadToHeadReport,
    MatchStats,
    behavior_metrics,
    run_match,
    run_series,
    special_moves_per_round,
)
from .questionnaire import (
    EnjoyabilityScores,
    QuestionnaireError,
    score_questionnaire,
)

__all__ = [
    "Agent",
    "BuiltinAgent",
    "HistoryAblatedAgent",
    "MacroAgent",
    "NoopAgent",
    "PolicyAgent",
    "RandomAgent",
    "HeadToHeadReport",
    "MatchStats",
    "behavior_metrics",
    "run_match",
    "run_series",
    "special_moves_per_round",
    "EnjoyabilityScores",
    "QuestionnaireError",
    "score_questionnaire",
]
