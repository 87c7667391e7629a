"""Play-style agent archive: typed store of trained checkpoints plus the
published manifest the opponent-selection prompt embeds.

The manifest groups models by play-style type; each entry carries a path in
the canonical `agent_models/agents_archive/<type>/<stem>` form and a
difficulty string like "6/10-(Medium)". Difficulty comes from the win rate
against the scripted AI: score = round(10 * win_rate), labeled by fixed
bands. Characters suggested per type are advisory prompt content only;
opponent resolution validates the character against the full roster.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .env.characters import CharacterSpec, load_roster, roster_names
from .policy import load_checkpoint

AGENT_TYPES = (
    "projectile_type",
    "special_move_type",
    "defensive_type",
    "aggressive_type",
    "air_type",
    "coward_type",
    "newbie_type",
    "key_spamming_type",
)

# archive type -> reward profile it is trained with
TYPE_PROFILES = {
    "projectile_type": "defensive",
    "special_move_type": "special_move",
    "defensive_type": "defensive",
    "aggressive_type": "aggressive",
    "air_type": "air",
    "coward_type": "coward",
    "newbie_type": "newbie",
    "key_spamming_type": "key_spamming",
}

DIFFICULTY_BANDS = (
    (0, 1, "Very Easy"),
    (2, 3, "Easy"),
    (4, 6, "Medium"),
    (7, 9, "Hard"),
    (10, 10, "Very Hard"),
)

_DIFFICULTY_RE = re.compile(r"^(10|[0-9])/10-\((.+)\)$")
MODEL_PATH_PREFIX = "agent_models/agents_archive"

RECORDS_NAME = "records.json"
MANIFEST_NAME = "manifest.json"


class ArchiveError(ValueError):
    """reason is one of: invalid_type, unloadable_checkpoint, duplicate_path,
    missing_eval, unknown_path, type_mismatch, unknown_character, bad_manifest."""

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


def difficulty_label(score: int) -> str:
    for lo, hi, label in DIFFICULTY_BANDS:
        if lo <= score <= hi:
            return label
    raise ArchiveError("bad_manifest", f"difficulty score {score} outside 0..10")


def difficulty_from_win_rate(win_rate: float) -> str:
    if not 0.0 <= win_rate <= 1.0:
        raise ArchiveError("missing_eval", f"win rate {win_rate} outside [0, 1]")
    score = round(10 * win_rate)
    return f"{score}/10-({difficulty_label(score)})"


def parse_difficulty(text: str) -> tuple[int, str]:
    m = _DIFFICULTY_RE.match(text)
    if not m:
        raise ArchiveError("bad_manifest", f"malformed difficulty string {text!r}")
    return int(m.group(1)), m.group(2)


def suggested_characters(agent_type: str, roster: Optional[list[CharacterSpec]] = None) -> list[str]:
    """Advisory character list per play style, derived from roster traits."""
    roster = roster if roster is not None else load_roster()
    if agent_type in ("projectile_type", "defensive_type"):
        return [c.name for c in roster
                if any(s.spawns_projectile for s in c.specials)]
    if agent_type == "air_type":
        ranked = sorted(roster, key=lambda c: -c.jump_impulse)
        return [c.name for c in ranked[:2]]
    if agent_type == "coward_type":
        ranked = sorted(roster, key=lambda c: -c.walk_speed)
        return [c.name for c in ranked[:2]]
    if agent_type == "aggressive_type":
        ranked = sorted(roster, key=lambda c: -max((s.damage for s in c.specials), default=0))
        return [c.name for c in ranked[:2]]
    # special_move/newbie/key_spamming: anyone
    return [c.name for c in roster]


@dataclass(frozen=True)
class SelectionResult:
    """Validated opponent choice emitted by the selection layer."""

    chosen_agent_type: str
    chosen_agent_model_path: str
    chosen_agent_character: str

    def to_dict(self) -> dict:
        return {
            "chosen_agent_type": self.chosen_agent_type,
            "chosen_agent_model_path": self.chosen_agent_model_path,
            "chosen_agent_character": self.chosen_agent_character,
        }


@dataclass(frozen=True)
class AgentRecord:
    agent_type: str
    model_path: str
    difficulty_score: str
    profile: str
    iteration: int
    eval_summary: dict
    checkpoint_file: str

    def to_dict(self) -> dict:
        return {
            "agent_type": self.agent_type,
            "model_path": self.model_path,
            "difficulty_score": self.difficulty_score,
            "profile": self.profile,
            "iteration": self.iteration,
            "eval_summary": self.eval_summary,
            "checkpoint_file": self.checkpoint_file,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AgentRecord":
        return cls(
            agent_type=d["agent_type"],
            model_path=d["model_path"],
            difficulty_score=d["difficulty_score"],
            profile=d["profile"],
            iteration=int(d["iteration"]),
            eval_summary=dict(d["eval_summary"]),
            checkpoint_file=d["checkpoint_file"],
        )


def _write_json_atomic(path: Path, doc) -> None:
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(doc, indent=2) + "\n")
    os.replace(tmp, path)


class AgentArchive:
    """Records live in records.json; the consumer-facing manifest.json is
    regenerated from them on every registration, atomically."""

    def __init__(self, root: str | Path, roster: Optional[list[CharacterSpec]] = None):
        self.root = Path(root)
        self.roster = roster if roster is not None else load_roster()
        self.records: list[AgentRecord] = []
        records_path = self.root / RECORDS_NAME
        if records_path.exists():
            for d in json.loads(records_path.read_text()):
                self.records.append(AgentRecord.from_dict(d))

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_NAME

    def register(self, checkpoint: str | Path, agent_type: str, eval_summary: dict,
                 profile: Optional[str] = None, iteration: Optional[int] = None) -> AgentRecord:
        if agent_type not in AGENT_TYPES:
            raise ArchiveError("invalid_type", f"unknown agent type {agent_type!r}")
        if "win_rate_vs_builtin" not in eval_summary:
            raise ArchiveError(
                "missing_eval", "eval_summary must carry win_rate_vs_builtin"
            )
        try:
            _, meta = load_checkpoint(checkpoint)
        except Exception as exc:
            raise ArchiveError("unloadable_checkpoint", f"cannot load {checkpoint}: {exc}")

        stem = Path(checkpoint).stem
        model_path = f"{MODEL_PATH_PREFIX}/{agent_type}/{stem}"
        if any(r.model_path == model_path for r in self.records):
            raise ArchiveError("duplicate_path", f"{model_path} already registered")

        record = AgentRecord(
            agent_type=agent_type,
            model_path=model_path,
            difficulty_score=difficulty_from_win_rate(
                float(eval_summary["win_rate_vs_builtin"])
            ),
            profile=profile if profile is not None else meta.get("profile", TYPE_PROFILES[agent_type]),
            iteration=iteration if iteration is not None else int(meta.get("iteration", 0)),
            eval_summary=dict(eval_summary),
            checkpoint_file=str(Path(checkpoint).resolve()),
        )
        self.records.append(record)
        self.save()
        return record

    def manifest(self) -> dict:
        """Consumer-facing shape: type -> suggested characters + models."""
        out: dict = {}
        for record in self.records:
            block = out.setdefault(record.agent_type, {
                "suggested_characters_for_this_type": suggested_characters(
                    record.agent_type, self.roster
                ),
                "agent_models": [],
            })
            block["agent_models"].append({
                "model_path": record.model_path,
                "model_difficulty_score": record.difficulty_score,
            })
        return out

    def save(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        _write_json_atomic(self.root / RECORDS_NAME, [r.to_dict() for r in self.records])
        _write_json_atomic(self.manifest_path, self.manifest())

    def find(self, model_path: str) -> Optional[AgentRecord]:
        for record in self.records:
            if record.model_path == model_path:
                return record
        return None

    def resolve(self, selection: SelectionResult) -> AgentRecord:
        """Selection is valid iff its path is listed under the selected type
        and the character exists in the full roster (suggested characters do
        not constrain the choice)."""
        record = self.find(selection.chosen_agent_model_path)
        if record is None:
            raise ArchiveError(
                "unknown_path", f"no model at {selection.chosen_agent_model_path!r}"
            )
        if record.agent_type != selection.chosen_agent_type:
            raise ArchiveError(
                "type_mismatch",
                f"{selection.chosen_agent_model_path!r} is a {record.agent_type} model, "
                f"not {selection.chosen_agent_type!r}",
            )
        if selection.chosen_agent_character not in roster_names(self.roster):
            raise ArchiveError(
                "unknown_character",
                f"character {selection.chosen_agent_character!r} is not in the roster",
            )
        return record

    def lint(self) -> list[str]:
        """Referential integrity sweep; returns human-readable problems."""
        problems = []
        seen = set()
        for record in self.records:
            if record.agent_type not in AGENT_TYPES:
                problems.append(f"{record.model_path}: invalid type {record.agent_type}")
            if record.model_path in seen:
                problems.append(f"{record.model_path}: duplicate path")
            seen.add(record.model_path)
            try:
                parse_difficulty(record.difficulty_score)
            except ArchiveError:
                problems.append(
                    f"{record.model_path}: malformed difficulty {record.difficulty_score!r}"
                )
            if not Path(record.checkpoint_file).exists():
                problems.append(f"{record.model_path}: missing file {record.checkpoint_file}")
            else:
                try:
                    load_checkpoint(record.checkpoint_file)
                except Exception as exc:
                    problems.append(f"{record.model_path}: unloadable ({exc})")
            if not record.eval_summary:
                problems.append(f"{record.model_path}: empty eval summary")
        return problems


def load_manifest(path: str | Path) -> dict:
    """Parse and validate a published manifest file."""
    doc = json.loads(Path(path).read_text())
    validate_manifest(doc)
    return doc


def validate_manifest(doc: dict) -> None:
    if not isinstance(doc, dict):
        raise ArchiveError("bad_manifest", "manifest must be a JSON object")
    for agent_type, block in doc.items():
        if agent_type not in AGENT_TYPES:
            raise ArchiveError("bad_manifest", f"unknown agent type {agent_type!r}")
        keys = set(block)
        expected = {"suggested_characters_for_this_type", "agent_models"}
        if keys != expected:
            raise ArchiveError(
                "bad_manifest",
                f"{agent_type}: keys {sorted(keys)} != {sorted(expected)}",
            )
        for model in block["agent_models"]:
            if set(model) != {"model_path", "model_difficulty_score"}:
                raise ArchiveError(
                    "bad_manifest", f"{agent_type}: malformed model entry {model}"
                )
            parse_difficulty(model["model_difficulty_score"])
