"""Session orchestration: match lifecycle, player records, opponent requests.

Phases move strictly forward per session:

    awaiting_selection -> in_match -> awaiting_feedback -> awaiting_selection
                                                        -> closed

A session is sequential by construction; the manager may host many at once
with nothing shared between them but the archive (read-only after load).
"""

from __future__ import annotations

import logging
import time
import uuid
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..archive import AgentArchive, ArchiveError, SelectionResult
from ..env import FightingEnv
from ..env.characters import roster_names
from ..env.observe import build_observations
from ..env.replay import ReplayRecord
from ..env.types import buttons_from_mask
from ..eval.agents import Agent, PolicyAgent
from ..hyperagent import LLMClientConfig, SelectionExhausted, select_opponent
from ..policy import load_checkpoint
from .playing_data import (
    MatchRecord,
    OpponentInfo,
    PlayingData,
    new_playing_data,
    update_playing_data,
)
from .store import SessionStore

log = logging.getLogger(__name__)

PHASES = ("awaiting_selection", "in_match", "awaiting_feedback", "closed")
MAX_FEEDBACK_CHARS = 2000
# Live input silence tolerated before the match is forfeited.
DISCONNECT_GRACE_SECONDS = 5.0


class ManagerError(RuntimeError):
    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


@dataclass
class SessionState:
    session_id: str
    player_character: str
    playing_data: PlayingData
    phase: str = "awaiting_selection"
    records: list[MatchRecord] = field(default_factory=list)
    match_row_ids: list[int] = field(default_factory=list)
    pending_selection: Optional[SelectionResult] = None
    active_match: Optional["MatchDriver"] = None
    created_at: float = field(default_factory=time.time)

    def dump(self) -> dict:
        return {
            "session_id": self.session_id,
            "player_character": self.player_character,
            "playing_data": self.playing_data.dump(),
            "phase": self.phase,
            "match_row_ids": list(self.match_row_ids),
            "created_at": self.created_at,
        }


def _score_for(winner: str, player_hp: int, player_max_hp: int,
               agent_hp: int, agent_max_hp: int) -> int:
    """Win: remaining-hp fraction. Loss and draw: damage-dealt fraction."""
    if winner == "player":
        return round(100 * player_hp / player_max_hp)
    return round(100 * (agent_max_hp - agent_hp) / agent_max_hp)


class MatchDriver:
    """One best-of-1 round, advanced one decision tick at a time.

    The scripted path and the live websocket path both drive this object;
    everything derived from the match (aggregates, score, replay) has a
    single implementation. The player is always side 0.
    """

    def __init__(self, manager: "GameManager", state: SessionState,
                 selection: SelectionResult, seed: int):
        self.manager = manager
        self.state = state
        self.selection = selection
        record = manager.archive.resolve(selection)
        net, _ = load_checkpoint(record.checkpoint_file)
        self.opponent_info = OpponentInfo(
            type=record.agent_type,
            character=selection.chosen_agent_character,
            model_path=record.model_path,
            difficulty=record.difficulty_score,
        )
        self.opponent_agent = PolicyAgent(net)
        names = roster_names(manager.archive.roster)
        player_id = names.index(state.player_character)
        opponent_id = names.index(selection.chosen_agent_character)
        kwargs = {}
        if manager.round_frames is not None:
            kwargs["round_frames"] = manager.round_frames
        self.env = FightingEnv(roster=manager.archive.roster, **kwargs)
        self.env.reset(player_id, opponent_id)
        self.replay = ReplayRecord(
            char_a=player_id,
            char_b=opponent_id,
            agent_side="left",
            frames_per_step=self.env.frames_per_step,
            round_frames=self.env.round_frames,
        )
        ss = np.random.SeedSequence([seed, player_id, opponent_id])
        self.player_rng, self.opponent_rng = map(np.random.default_rng, ss.spawn(2))
        self.player_id = player_id
        self.opponent_id = opponent_id
        self.steps = 0
        self.specials = [0, 0]
        self.regulars = [0, 0]
        self.projectiles = [0, 0]
        self.distance_sum = 0.0
        self.done = False
        self.forced_winner: Optional[str] = None
        self.started_at = time.time()
        self.applied_masks: list[int] = []

    def opponent_buttons(self) -> np.ndarray:
        view = build_observations(self.env)[1]
        return self.opponent_agent.act(self.env, 1, view, self.opponent_rng)

    def step(self, player_buttons: np.ndarray) -> bool:
        if self.done:
            raise ManagerError("match_over", "match already finished")
        b0 = np.asarray(player_buttons, dtype=np.uint8)
        b1 = self.opponent_buttons()
        _, _, info, done = self.env.step(b0, b1)
        self.replay.add_step(b0, b1)
        self.applied_masks.append(self.replay.steps[-1][0])
        for side in (0, 1):
            self.specials[side] += info[side].special_move_triggered
            self.regulars[side] += info[side].regular_attack_triggered
            self.projectiles[side] += info[side].projectile_triggered
        self.distance_sum += info[0].distance_norm
        self.steps += 1
        self.done = done
        return done

    def step_mask(self, bitmask: int) -> bool:
        return self.step(np.array(buttons_from_mask(bitmask), dtype=np.uint8))

    def forfeit(self) -> None:
        """Live input went silent past the grace window: the agent takes the
        round and the match ends where it stands."""
        self.forced_winner = "agent"
        self.done = True

    def state_frame(self) -> dict:
        st = self.env.state
        return {
            "type": "state",
            "frame": st.frame_count,
            "timer": (st.round_frames_left + 59) // 60,
            "hp": [st.fighters[0].hp, st.fighters[1].hp],
            "fighters": [
                {
                    "character_id": f.character_id,
                    "x": f.x,
                    "y": f.y,
                    "hp": f.hp,
                    "facing": f.facing,
                    "status": f.status.name.lower(),
                }
                for f in st.fighters
            ],
            "projectiles": [
                {"owner": p.owner, "x": p.x, "y": p.y} for p in st.projectiles
            ],
        }

    def winner(self) -> str:
        if self.forced_winner is not None:
            return self.forced_winner
        return {0: "player", 1: "agent"}.get(self.env.state.winner, "draw")

    def finish(self) -> MatchRecord:
        if not self.done:
            raise ManagerError("match_live", "match has not finished")
        winner = self.winner()
        f0, f1 = self.env.state.fighters
        roster = self.manager.archive.roster
        record = MatchRecord(
            opponent=self.opponent_info,
            player_character=self.state.player_character,
            winner=winner,
            score=_score_for(
                winner,
                f0.hp, roster[self.player_id].max_hp,
                f1.hp, roster[self.opponent_id].max_hp,
            ),
            special_moves=(self.specials[0], self.specials[1]),
            regular_attacks=(self.regulars[0], self.regulars[1]),
            projectiles=(self.projectiles[0], self.projectiles[1]),
            mean_distance_norm=self.distance_sum / max(1, self.steps),
            steps=self.steps,
            round_frames=self.env.state.frame_count,
            started_at=self.started_at,
            finished_at=time.time(),
            replay=self.replay.to_dict(),
        )
        return self.manager._complete_match(self.state, record)


def recompute_from_replay(replay_doc: dict, roster) -> dict:
    """Re-simulate a stored replay and recount everything a MatchRecord
    derives from play. Used to audit that recorded aggregates are
    reproducible from the replay alone, bit-exactly."""
    env = FightingEnv(
        roster=roster,
        frames_per_step=int(replay_doc["frames_per_step"]),
        round_frames=int(replay_doc["round_frames"]),
    )
    player_id = int(replay_doc["char_a"])
    opponent_id = int(replay_doc["char_b"])
    env.reset(player_id, opponent_id)
    specials = [0, 0]
    regulars = [0, 0]
    projectiles = [0, 0]
    distance_sum = 0.0
    steps = 0
    done = False
    for mask_a, mask_b in replay_doc["steps"]:
        if done:
            raise ManagerError("replay_overrun", "replay continues past round end")
        b0 = np.array(buttons_from_mask(int(mask_a)), dtype=np.uint8)
        b1 = np.array(buttons_from_mask(int(mask_b)), dtype=np.uint8)
        _, _, info, done = env.step(b0, b1)
        for side in (0, 1):
            specials[side] += info[side].special_move_triggered
            regulars[side] += info[side].regular_attack_triggered
            projectiles[side] += info[side].projectile_triggered
        distance_sum += info[0].distance_norm
        steps += 1
    winner = {0: "player", 1: "agent"}.get(env.state.winner, "draw")
    f0, f1 = env.state.fighters
    return {
        "winner": winner,
        "score": _score_for(
            winner, f0.hp, roster[player_id].max_hp, f1.hp, roster[opponent_id].max_hp
        ),
        "special_moves": (specials[0], specials[1]),
        "regular_attacks": (regulars[0], regulars[1]),
        "projectiles": (projectiles[0], projectiles[1]),
        "mean_distance_norm": distance_sum / max(1, steps),
        "steps": steps,
        "round_frames": env.state.frame_count,
    }


class GameManager:
    def __init__(
        self,
        archive: AgentArchive,
        store: Optional[SessionStore] = None,
        llm_client=None,
        llm_config: Optional[LLMClientConfig] = None,
        icl_variant: str = "full",
        round_frames: Optional[int] = None,
        rng: Optional[np.random.Generator] = None,
    ):
        self.archive = archive
        self.store = store
        self.llm_client = llm_client
        self.llm_config = llm_config if llm_config is not None else LLMClientConfig()
        self.icl_variant = icl_variant
        self.round_frames = round_frames
        self.rng = rng if rng is not None else np.random.default_rng()
        self.sessions: dict[str, SessionState] = {}
        if store is not None:
            self._hydrate()

    def _hydrate(self) -> None:
        for doc in self.store.list_sessions():
            state = SessionState(
                session_id=doc["session_id"],
                player_character=doc["player_character"],
                playing_data=PlayingData.restore(doc["playing_data"]),
                # A process restart cannot resume a live round; the session
                # falls back to selection with the interrupted match unrecorded.
                phase="awaiting_selection" if doc["phase"] == "in_match" else doc["phase"],
                match_row_ids=list(doc.get("match_row_ids", [])),
                created_at=doc.get("created_at", 0.0),
            )
            for match_doc in self.store.load_matches(state.session_id):
                state.records.append(MatchRecord.from_dict(match_doc))
            self.sessions[state.session_id] = state

    def _persist(self, state: SessionState) -> None:
        if self.store is not None:
            self.store.save_session(state.session_id, state.dump())

    # -- session lifecycle -------------------------------------------------

    def start_session(self, player_character: str) -> SessionState:
        names = roster_names(self.archive.roster)
        if player_character not in names:
            raise ManagerError(
                "unknown_character", f"character {player_character!r} is not in the roster"
            )
        state = SessionState(
            session_id=uuid.uuid4().hex,
            player_character=player_character,
            playing_data=new_playing_data(player_character, names),
        )
        self.sessions[state.session_id] = state
        self._persist(state)
        return state

    def get_session(self, session_id: str) -> SessionState:
        state = self.sessions.get(session_id)
        if state is None:
            raise ManagerError("unknown_session", f"no session {session_id!r}")
        return state

    def close_session(self, session_id: str) -> SessionState:
        state = self.get_session(session_id)
        if state.phase == "in_match":
            raise ManagerError("wrong_phase", "cannot close a session mid-match")
        state.phase = "closed"
        self._persist(state)
        return state

    # -- opponent selection ------------------------------------------------

    def _random_selection(self) -> SelectionResult:
        records = self.archive.records
        record = records[int(self.rng.integers(len(records)))]
        names = roster_names(self.archive.roster)
        character = names[int(self.rng.integers(len(names)))]
        return SelectionResult(
            chosen_agent_type=record.agent_type,
            chosen_agent_model_path=record.model_path,
            chosen_agent_character=character,
        )

    def request_next_opponent(self, session_id: str, mode: str) -> SelectionResult:
        state = self.get_session(session_id)
        if state.phase != "awaiting_selection":
            raise ManagerError(
                "wrong_phase", f"cannot select an opponent in phase {state.phase}"
            )
        if not self.archive.records:
            raise ManagerError("empty_archive", "the agent archive holds no models")
        if mode == "random":
            selection = self._random_selection()
        elif mode == "llm":
            if self.llm_client is None:
                raise ManagerError("no_llm_client", "manager has no LLM client configured")
            try:
                selection = select_opponent(
                    state.playing_data.to_dict(),
                    self.archive,
                    self.llm_config,
                    self.llm_client,
                    icl_variant=self.icl_variant,
                )
            except SelectionExhausted as exc:
                log.warning(
                    "session %s: selection retries exhausted (%s); falling back to random",
                    session_id, exc,
                )
                selection = self._random_selection()
        else:
            raise ManagerError("unknown_mode", f"mode must be llm or random, got {mode!r}")
        state.pending_selection = selection
        return selection

    # -- match lifecycle ---------------------------------------------------

    def begin_match(self, session_id: str, selection: Optional[SelectionResult] = None,
                    seed: Optional[int] = None) -> MatchDriver:
        state = self.get_session(session_id)
        if state.phase != "awaiting_selection":
            raise ManagerError("wrong_phase", f"cannot start a match in phase {state.phase}")
        if selection is None:
            selection = state.pending_selection
        if selection is None:
            raise ManagerError("no_selection", "no opponent selected for this session")
        if seed is None:
            seed = len(state.records)
        try:
            driver = MatchDriver(self, state, selection, seed)
        except ArchiveError as exc:
            raise ManagerError(
                "unresolvable_selection", f"selection does not resolve: {exc}"
            ) from exc
        state.phase = "in_match"
        state.active_match = driver
        state.pending_selection = None
        self._persist(state)
        return driver

    def _complete_match(self, state: SessionState, record: MatchRecord) -> MatchRecord:
        state.records.append(record)
        state.playing_data = update_playing_data(state.playing_data, record)
        state.phase = "awaiting_feedback"
        state.active_match = None
        if self.store is not None:
            row_id = self.store.append_match(state.session_id, record.to_dict())
            state.match_row_ids.append(row_id)
        self._persist(state)
        return record

    def run_match(self, session_id: str, selection: Optional[SelectionResult] = None,
                  input_agent: Optional[Agent] = None, seed: Optional[int] = None,
                  on_step: Optional[Callable[[MatchDriver], None]] = None) -> MatchRecord:
        """Scripted path: an eval-style agent supplies the player's buttons
        and the round runs to termination synchronously."""
        driver = self.begin_match(session_id, selection, seed)
        state = self.get_session(session_id)
        agent = input_agent
        while not driver.done:
            if agent is None:
                buttons = np.zeros(12, dtype=np.uint8)
            else:
                view = build_observations(driver.env)[0]
                buttons = agent.act(driver.env, 0, view, driver.player_rng)
            driver.step(buttons)
            if on_step is not None:
                on_step(driver)
        record = driver.finish()
        assert state.phase == "awaiting_feedback"
        return record

    # -- feedback ----------------------------------------------------------

    def collect_feedback(self, session_id: str, text: str) -> PlayingData:
        state = self.get_session(session_id)
        if state.phase != "awaiting_feedback":
            raise ManagerError(
                "wrong_phase", f"cannot accept feedback in phase {state.phase}"
            )
        if len(text) > MAX_FEEDBACK_CHARS:
            raise ManagerError(
                "oversize_feedback",
                f"feedback is {len(text)} chars, limit {MAX_FEEDBACK_CHARS}",
            )
        record = state.records[-1]
        record.feedback = text
        state.playing_data.feedback = text
        state.phase = "awaiting_selection"
        if self.store is not None and state.match_row_ids:
            self.store.update_match(state.match_row_ids[-1], record.to_dict())
        self._persist(state)
        return state.playing_data
