"""Deterministic two-player fighting environment.

All speeds and impulses are multiples of 1/256, so position updates are exact
in binary floating point and two runs with identical inputs produce identical
state hashes. The per-frame update resolves both sides from the same
pre-frame snapshot, which makes the transition commute with the left/right
mirror transform.
"""

from __future__ import annotations

from collections import deque
from typing import Optional, Sequence

from .characters import (
    DIR_BACK,
    DIR_DOWN,
    DIR_FORWARD,
    DIR_UP,
    CharacterSpec,
    NormalAttack,
    SpecialMove,
    load_roster,
)
from .motion import CommandBuffer, detect_special, direction_code, newly_pressed
from .types import (
    ATTACK_SLOTS,
    BUTTONS,
    NEUTRAL,
    FighterState,
    GameState,
    Projectile,
    SideInfo,
    Status,
    StepInfo,
    ButtonVector,
    VULNERABLE_STATUSES,
    mask_system_buttons,
)

ARENA_WIDTH = 400.0
WALL_MARGIN = 12.0  # fighter half-width; also the x clamp
FLOOR_Y = 0.0
ROUND_FRAMES_MAX = 5940  # 99 in-game seconds at 60 fps
FRAMES_PER_STEP = 4
SPAWN_OFFSET = 70.0  # spawn at center +/- offset

GRAVITY = 0.25
FIGHTER_HEIGHT = 56.0
CROUCH_HEIGHT = 36.0

VERTICAL_TOLERANCE_NORMAL = 40.0
VERTICAL_TOLERANCE_SPECIAL = 90.0

PROJECTILE_Y = 20.0
PROJECTILE_HIT_RANGE = 16.0
PROJECTILE_ANNIHILATE_RANGE = 16.0
PROJECTILE_JUMP_CLEAR = 24.0  # defender above this height is not hit
PROJECTILE_SPAWN_AHEAD = 20.0

BLOCKSTUN_FRAMES = 8
HITSTUN_BASE = 12
STUN_FRAMES = 45  # dizzy after being hit during hitstun
CHIP_DIVISOR = 4  # blocked specials/projectiles deal damage // 4
HIT_PUSHBACK = 1.5
BLOCK_PUSHBACK = 1.0
CHARGE_CAP = 240

HISTORY_STEPS = 100

CONTROLLABLE = frozenset({Status.IDLE, Status.WALKING, Status.CROUCHING})
BLOCK_CAPABLE = frozenset({Status.IDLE, Status.WALKING, Status.CROUCHING, Status.BLOCKING})

SIDE_NAMES = {"left": 0, "right": 1, 0: 0, 1: 1}


def mirror_state(state: GameState) -> GameState:
    """Swap sides, reflect x about the arena center, flip facings."""
    out = state.copy()
    out.fighters = [out.fighters[1], out.fighters[0]]
    for f in out.fighters:
        f.x = ARENA_WIDTH - f.x
        f.vx = -f.vx + 0.0  # + 0.0 turns -0.0 into +0.0 for stable hashing
        f.facing = -f.facing
    for p in out.projectiles:
        p.owner = 1 - p.owner
        p.x = ARENA_WIDTH - p.x
        p.vx = -p.vx + 0.0
    if out.winner in (0, 1):
        out.winner = 1 - out.winner
    return out


class RoundOverError(RuntimeError):
    pass


class _Accum:
    """Per-step event accumulator, reset at every decision step."""

    def __init__(self) -> None:
        self.damage = [[0, 0, 0], [0, 0, 0]]  # per attacker: regular/special/projectile
        self.special = [False, False]
        self.projectile = [False, False]
        self.regular = [False, False]
        self.jump = [False, False]
        self.vulnerable = [0, 0]


class FightingEnv:
    """Two-fighter round simulator stepped at a fixed frame-skip.

    One instance is single-threaded; drive separate instances for
    parallelism. step() holds each side's buttons for frames_per_step
    simulation frames.
    """

    def __init__(
        self,
        roster: Optional[Sequence[CharacterSpec]] = None,
        frames_per_step: int = FRAMES_PER_STEP,
        round_frames: int = ROUND_FRAMES_MAX,
    ) -> None:
        self.roster = list(roster) if roster is not None else load_roster()
        self.frames_per_step = frames_per_step
        self.round_frames = round_frames
        self.state: Optional[GameState] = None
        self.agent_side = 0
        self._buffers = [CommandBuffer(), CommandBuffer()]
        self._prev_buttons: list[ButtonVector] = [NEUTRAL, NEUTRAL]
        self._history: list[deque] = [deque(maxlen=HISTORY_STEPS), deque(maxlen=HISTORY_STEPS)]
        self._accum = _Accum()

    # -- lifecycle ---------------------------------------------------------

    def reset(self, char_a: int, char_b: int, agent_side: str | int = "left"):
        """Start a round: char_a spawns on side 0 (left), char_b on side 1.
        agent_side names the side driven by step()'s first input."""
        side = SIDE_NAMES.get(agent_side)
        if side is None:
            raise ValueError(f"unknown side: {agent_side!r}")
        for cid in (char_a, char_b):
            if not 0 <= cid < len(self.roster):
                raise ValueError(f"unknown character id: {cid}")
        self.agent_side = side
        chars = [char_a, char_b]
        cx = ARENA_WIDTH / 2
        fighters = [
            self._spawn_fighter(chars[0], cx - SPAWN_OFFSET, +1),
            self._spawn_fighter(chars[1], cx + SPAWN_OFFSET, -1),
        ]
        self.state = GameState(
            fighters=fighters,
            projectiles=[],
            round_frames_left=self.round_frames,
        )
        self._buffers = [CommandBuffer(), CommandBuffer()]
        self._prev_buttons = [NEUTRAL, NEUTRAL]
        self._history = [deque(maxlen=HISTORY_STEPS), deque(maxlen=HISTORY_STEPS)]
        self._accum = _Accum()
        from .observe import build_observations

        return self.state, build_observations(self)

    def _spawn_fighter(self, cid: int, x: float, facing: int) -> FighterState:
        spec = self.roster[cid]
        return FighterState(
            character_id=cid,
            hp=spec.max_hp,
            x=x,
            y=FLOOR_Y,
            vx=0.0,
            vy=0.0,
            facing=facing,
        )

    def spec_for(self, side: int) -> CharacterSpec:
        return self.roster[self.state.fighters[side].character_id]

    # -- stepping ----------------------------------------------------------

    def step(self, a_agent: ButtonVector, a_opp: ButtonVector):
        """Advance frames_per_step frames with inputs held on both sides."""
        if self.state is None:
            raise RuntimeError("reset() before step()")
        if self.state.done:
            raise RoundOverError("stepping a finished round")
        btns = [None, None]
        btns[self.agent_side] = mask_system_buttons(tuple(bool(b) for b in a_agent))
        btns[1 - self.agent_side] = mask_system_buttons(tuple(bool(b) for b in a_opp))
        self._accum = _Accum()
        for _ in range(self.frames_per_step):
            self._advance_frame(btns)
            if self.state.done:
                break
        for i in (0, 1):
            self._history[i].append(btns[i])
        info = self._build_info()
        from .observe import build_observations

        return self.state, build_observations(self), info, self.state.done

    def _build_info(self) -> StepInfo:
        st = self.state
        acc = self._accum
        dist = abs(st.fighters[0].x - st.fighters[1].x) / ARENA_WIDTH
        sides = []
        for i in (0, 1):
            j = 1 - i
            dealt = sum(acc.damage[i])
            won: Optional[bool] = None
            if st.done:
                won = st.winner == i
            sides.append(
                SideInfo(
                    damage_dealt=dealt,
                    damage_taken=sum(acc.damage[j]),
                    damage_dealt_special=acc.damage[i][1],
                    damage_dealt_projectile=acc.damage[i][2],
                    special_move_triggered=acc.special[i],
                    projectile_triggered=acc.projectile[i],
                    regular_attack_triggered=acc.regular[i],
                    jump_triggered=acc.jump[i],
                    in_air=st.fighters[i].airborne(),
                    vulnerable_frames=acc.vulnerable[i],
                    distance_norm=dist,
                    round_over=st.done,
                    won=won,
                )
            )
        return StepInfo(sides=(sides[0], sides[1]))

    # -- one simulation frame ---------------------------------------------

    def _advance_frame(self, btns: list[ButtonVector]) -> None:
        st = self.state
        f = st.fighters
        frame = st.frame_count

        # Phase 0: face the opponent while controllable on the ground.
        for i in (0, 1):
            if f[i].status in CONTROLLABLE and not f[i].airborne():
                dx = f[1 - i].x - f[i].x
                if dx != 0:
                    f[i].facing = 1 if dx > 0 else -1

        # Phase 1: inputs. Codes and edges are derived before any mutation.
        codes = [direction_code(btns[i], f[i].facing) for i in (0, 1)]
        pressed = [newly_pressed(self._prev_buttons[i], btns[i]) for i in (0, 1)]
        for i in (0, 1):
            self._buffers[i].push(frame, codes[i], pressed[i])
            self._prev_buttons[i] = btns[i]
        decisions = [self._decide(i, codes[i], pressed[i], frame) for i in (0, 1)]
        for i in (0, 1):
            self._apply_decision(i, decisions[i], codes[i])
        for i in (0, 1):
            if codes[i] & DIR_BACK and not f[i].airborne():
                f[i].charge_counter = min(f[i].charge_counter + 1, CHARGE_CAP)
            else:
                f[i].charge_counter = 0

        # Phase 2: physics for fighters and projectiles.
        for i in (0, 1):
            fi = f[i]
            fi.x = min(max(fi.x + fi.vx, WALL_MARGIN), ARENA_WIDTH - WALL_MARGIN)
            if fi.airborne() or fi.vy != 0.0:
                fi.y += fi.vy
                fi.vy -= GRAVITY
                if fi.y <= FLOOR_Y:
                    fi.y = FLOOR_Y
                    fi.vy = 0.0
                    fi.vx = 0.0
                    if fi.status is Status.JUMPING:
                        fi.status = Status.IDLE
                    elif fi.status is Status.ATTACKING:
                        # air attacks end on landing
                        self._clear_attack(fi)
                        fi.status = Status.IDLE
        for p in st.projectiles:
            p.x += p.vx
            if p.x < -PROJECTILE_SPAWN_AHEAD or p.x > ARENA_WIDTH + PROJECTILE_SPAWN_AHEAD:
                p.active = False

        # Phase 3: combat, resolved simultaneously from one snapshot.
        self._spawn_projectiles()
        self._annihilate_projectiles()
        events = self._collect_hits(codes)
        for ev in events:
            self._apply_hit(ev)
        for i in (0, 1):
            if f[i].status in VULNERABLE_STATUSES:
                self._accum.vulnerable[i] += 1

        # Phase 4: timers and termination.
        for i in (0, 1):
            self._advance_timers(f[i])
        st.projectiles = [p for p in st.projectiles if p.active]
        st.frame_count += 1
        st.round_frames_left -= 1
        self._check_termination()

    # -- decisions ---------------------------------------------------------

    def _decide(self, i: int, code: int, pressed: frozenset, frame: int):
        """Pick this side's action from the pre-frame snapshot. Returns one of
        ("special", move), ("normal", attack), ("jump",), ("crouch",),
        ("walk", sign), ("idle",) or None for no state change."""
        fi = self.state.fighters[i]
        spec = self.roster[fi.character_id]
        if fi.status in CONTROLLABLE:
            if any(s in pressed for s in ATTACK_SLOTS):
                move_id = detect_special(
                    self._buffers[i], spec, frame, charge_counter=fi.charge_counter
                )
                if move_id is not None:
                    move = next(m for m in spec.specials if m.move_id == move_id)
                    return ("special", move)
                normal = self._pressed_normal(spec, pressed)
                if normal is not None:
                    return ("normal", normal)
            if code & DIR_UP:
                return ("jump", code)
            if code & DIR_DOWN:
                return ("crouch",)
            if code & (DIR_FORWARD | DIR_BACK):
                sign = 1 if code & DIR_FORWARD else -1
                return ("walk", sign)
            return ("idle",)
        if fi.status is Status.JUMPING and any(s in pressed for s in ATTACK_SLOTS):
            normal = self._pressed_normal(spec, pressed)
            if normal is not None:
                return ("normal", normal)
        return None

    @staticmethod
    def _pressed_normal(spec: CharacterSpec, pressed: frozenset) -> Optional[NormalAttack]:
        for slot in ATTACK_SLOTS:
            if slot in pressed:
                attack = spec.normal_for(BUTTONS[slot])
                if attack is not None:
                    return attack
        return None

    def _apply_decision(self, i: int, decision, code: int) -> None:
        fi = self.state.fighters[i]
        if decision is None:
            return
        kind = decision[0]
        if kind == "special":
            move: SpecialMove = decision[1]
            fi.status = Status.ATTACKING
            fi.attack_kind = "special"
            fi.attack_ref = move.move_id
            fi.attack_frame = 0
            fi.attack_hit = False
            fi.vx = 0.0
            if move.invincibility_frames:
                fi.invincible_frames_left = move.invincibility_frames
            if move.is_charge():
                fi.charge_counter = 0
            self._accum.special[i] = True
        elif kind == "normal":
            attack: NormalAttack = decision[1]
            airborne = fi.airborne()
            fi.status = Status.ATTACKING
            fi.attack_kind = "normal"
            fi.attack_ref = attack.button
            fi.attack_frame = 0
            fi.attack_hit = False
            if not airborne:
                fi.vx = 0.0
            self._accum.regular[i] = True
        elif kind == "jump":
            jump_code = decision[1]
            spec = self.roster[fi.character_id]
            fi.status = Status.JUMPING
            fi.vy = spec.jump_impulse
            if jump_code & DIR_FORWARD:
                fi.vx = spec.walk_speed * fi.facing
            elif jump_code & DIR_BACK:
                fi.vx = -spec.walk_speed * fi.facing
            else:
                fi.vx = 0.0
            self._accum.jump[i] = True
        elif kind == "crouch":
            fi.status = Status.CROUCHING
            fi.vx = 0.0
        elif kind == "walk":
            spec = self.roster[fi.character_id]
            fi.status = Status.WALKING
            fi.vx = spec.walk_speed * fi.facing * decision[1]
        elif kind == "idle":
            fi.status = Status.IDLE
            fi.vx = 0.0

    # -- combat ------------------------------------------------------------

    def _spawn_projectiles(self) -> None:
        st = self.state
        for i in (0, 1):
            fi = st.fighters[i]
            if fi.attack_kind != "special":
                continue
            move = self._active_special(fi)
            if move is None or not move.spawns_projectile:
                continue
            if fi.attack_frame != move.startup:
                continue
            if any(p.owner == i and p.active for p in st.projectiles):
                continue
            st.projectiles.append(
                Projectile(
                    owner=i,
                    x=fi.x + fi.facing * PROJECTILE_SPAWN_AHEAD,
                    y=PROJECTILE_Y,
                    vx=move.projectile_speed * fi.facing,
                    damage=move.damage,
                )
            )
            self._accum.projectile[i] = True

    def _active_special(self, fi: FighterState) -> Optional[SpecialMove]:
        spec = self.roster[fi.character_id]
        for m in spec.specials:
            if m.move_id == fi.attack_ref:
                return m
        return None

    def _annihilate_projectiles(self) -> None:
        ps = [p for p in self.state.projectiles if p.active]
        for a in ps:
            for b in ps:
                if a.owner < b.owner and abs(a.x - b.x) <= PROJECTILE_ANNIHILATE_RANGE:
                    a.active = False
                    b.active = False

    def _collect_hits(self, codes: list[int]) -> list[dict]:
        """Gather every connecting attack this frame from one snapshot, so a
        mutual trade resolves symmetrically."""
        st = self.state
        f = st.fighters
        events: list[dict] = []
        for i in (0, 1):
            j = 1 - i
            fi, fj = f[i], f[j]
            if fi.attack_kind is None or fi.attack_hit:
                continue
            attack = self._current_attack(fi)
            if attack is None:
                continue
            if not attack["startup"] <= fi.attack_frame < attack["startup"] + attack["active"]:
                continue
            if fj.hp <= 0 or fj.invincible_frames_left > 0:
                continue
            if attack["unblockable"] and fj.airborne():
                continue  # throws whiff on airborne targets
            dx = fj.x - fi.x
            if dx != 0 and (dx > 0) != (fi.facing > 0):
                continue
            if abs(dx) > attack["reach"]:
                continue
            if abs(fj.y - fi.y) > attack["vtol"]:
                continue
            blocked = (
                not attack["unblockable"]
                and not fj.airborne()
                and fj.status in BLOCK_CAPABLE
                and bool(codes[j] & DIR_BACK)
            )
            events.append(
                {
                    "attacker": i,
                    "damage": attack["damage"],
                    "category": attack["category"],
                    "blocked": blocked,
                    "projectile": None,
                }
            )
            fi.attack_hit = True
        for p in st.projectiles:
            if not p.active:
                continue
            j = 1 - p.owner
            fj = f[j]
            if fj.hp <= 0 or fj.invincible_frames_left > 0:
                continue
            if fj.y > PROJECTILE_JUMP_CLEAR:
                continue
            if abs(p.x - fj.x) > PROJECTILE_HIT_RANGE:
                continue
            blocked = fj.status in BLOCK_CAPABLE and not fj.airborne() and bool(codes[j] & DIR_BACK)
            events.append(
                {
                    "attacker": p.owner,
                    "damage": p.damage,
                    "category": 2,
                    "blocked": blocked,
                    "projectile": p,
                }
            )
            p.active = False
        return events

    def _current_attack(self, fi: FighterState) -> Optional[dict]:
        spec = self.roster[fi.character_id]
        if fi.attack_kind == "normal":
            attack = spec.normal_for(fi.attack_ref or "")
            if attack is None:
                return None
            return {
                "startup": attack.startup,
                "active": attack.active,
                "damage": attack.damage,
                "reach": attack.reach,
                "vtol": VERTICAL_TOLERANCE_NORMAL,
                "unblockable": False,
                "category": 0,
            }
        move = self._active_special(fi)
        if move is None or move.spawns_projectile:
            return None  # projectile specials hit through the projectile
        return {
            "startup": move.startup,
            "active": move.active,
            "damage": move.damage,
            "reach": move.reach,
            "vtol": VERTICAL_TOLERANCE_SPECIAL,
            "unblockable": move.unblockable,
            "category": 1,
        }

    def _apply_hit(self, ev: dict) -> None:
        st = self.state
        i = ev["attacker"]
        j = 1 - i
        fj = st.fighters[j]
        push = st.fighters[i].facing
        if ev["blocked"]:
            chip = ev["damage"] // CHIP_DIVISOR if ev["category"] != 0 else 0
            applied = min(chip, fj.hp)
            fj.hp -= applied
            fj.status = Status.BLOCKING
            fj.status_frames_left = BLOCKSTUN_FRAMES
            fj.vx = BLOCK_PUSHBACK * push
        else:
            applied = min(ev["damage"], fj.hp)
            fj.hp -= applied
            if fj.status is Status.HITSTUN:
                fj.status = Status.STUNNED
                fj.status_frames_left = STUN_FRAMES
            elif fj.status is not Status.STUNNED:
                fj.status = Status.HITSTUN
                fj.status_frames_left = HITSTUN_BASE + applied // 3
            self._clear_attack(fj)
            if not fj.airborne():
                fj.vx = HIT_PUSHBACK * push
        if applied:
            self._accum.damage[i][ev["category"]] += applied

    @staticmethod
    def _clear_attack(fi: FighterState) -> None:
        fi.attack_kind = None
        fi.attack_ref = None
        fi.attack_frame = 0
        fi.attack_hit = False

    # -- timers ------------------------------------------------------------

    def _advance_timers(self, fi: FighterState) -> None:
        if fi.invincible_frames_left > 0:
            fi.invincible_frames_left -= 1
        if fi.attack_kind == "normal":
            attack = self.roster[fi.character_id].normal_for(fi.attack_ref or "")
            fi.attack_frame += 1
            if attack is None or fi.attack_frame >= attack.total_frames():
                self._clear_attack(fi)
                fi.status = Status.JUMPING if fi.airborne() else Status.IDLE
        elif fi.attack_kind == "special":
            move = self._active_special(fi)
            fi.attack_frame += 1
            if move is None or fi.attack_frame >= move.startup + move.active:
                self._clear_attack(fi)
                fi.status = Status.SPECIAL_RECOVERY
                fi.status_frames_left = move.recovery_frames if move else 1
                fi.vx = 0.0
        elif fi.status in (Status.BLOCKING, Status.HITSTUN, Status.STUNNED, Status.SPECIAL_RECOVERY):
            fi.status_frames_left -= 1
            if fi.status_frames_left <= 0:
                fi.status_frames_left = 0
                fi.status = Status.JUMPING if fi.airborne() else Status.IDLE
                if not fi.airborne():
                    fi.vx = 0.0

    def _check_termination(self) -> None:
        st = self.state
        hp0, hp1 = st.fighters[0].hp, st.fighters[1].hp
        if hp0 <= 0 or hp1 <= 0:
            st.done = True
            if hp0 <= 0 and hp1 <= 0:
                st.winner = "draw"
            else:
                st.winner = 0 if hp1 <= 0 else 1
        elif st.round_frames_left <= 0:
            st.done = True
            if hp0 == hp1:
                st.winner = "draw"
            else:
                st.winner = 0 if hp0 > hp1 else 1

    # -- observation plumbing ---------------------------------------------

    def history_arrays(self, side: int):
        return list(self._history[side])
