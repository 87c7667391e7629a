"""Reward composition checks against an independently written oracle."""

import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tta.env.types import SideInfo
from tta.rewards import (
    BUILTIN_PROFILES,
    TABLE_PROFILES,
    TERM_FIELDS,
    ProfileError,
    RewardTerms,
    compute,
    load_profile,
    save_profile,
)

# One expression, straight from the composition rule. Kept deliberately
# separate from the implementation's breakdown accumulation.
def oracle_reward(i, t):
    return t.reward_scale * (
        t.raw_reward_coefficient * (i.damage_dealt - i.damage_taken)
        + t.special_move_bonus * i.damage_dealt_special
        + t.projectile_bonus * i.damage_dealt_projectile
        + t.distance_bonus * i.distance_norm * i.damage_dealt
        + t.special_move_reward * (1 if i.special_move_triggered else 0)
        + t.projectile_reward * (1 if i.projectile_triggered else 0)
        + t.distance_reward * (2 * i.distance_norm - 1)
        + t.in_air_reward * (1 if i.in_air else 0)
        + t.time_reward
        - t.cost_coefficient
        * (
            t.special_move_cost * (1 if i.special_move_triggered else 0)
            + t.regular_attack_cost * (1 if i.regular_attack_triggered else 0)
            + t.jump_cost * (1 if i.jump_triggered else 0)
            + t.vulnerable_frame_cost * i.vulnerable_frames
        )
    )


def random_info(rng):
    dealt = rng.choice([0, 0, rng.randint(1, 30)])
    special_part = rng.randint(0, dealt) if dealt else 0
    proj_part = rng.randint(0, dealt - special_part) if dealt else 0
    return SideInfo(
        damage_dealt=float(dealt),
        damage_taken=float(rng.choice([0, 0, rng.randint(1, 30)])),
        damage_dealt_special=float(special_part),
        damage_dealt_projectile=float(proj_part),
        special_move_triggered=rng.random() < 0.3,
        projectile_triggered=rng.random() < 0.3,
        regular_attack_triggered=rng.random() < 0.5,
        jump_triggered=rng.random() < 0.3,
        vulnerable_frames=rng.randint(0, 4),
        in_air=rng.random() < 0.4,
        distance_norm=rng.random(),
        round_over=False,
        won=False,
    )


def random_terms(rng):
    vals = [rng.choice([0.0, 1.0, -1.0, round(rng.uniform(-3, 3), 3)]) for _ in TERM_FIELDS]
    if vals[0] == 0.0:
        vals[0] = 0.001
    return RewardTerms(**dict(zip(TERM_FIELDS, vals)))


def plain_info(**kw):
    base = dict(
        damage_dealt=0.0, damage_taken=0.0, damage_dealt_special=0.0,
        damage_dealt_projectile=0.0, special_move_triggered=False,
        projectile_triggered=False, regular_attack_triggered=False,
        jump_triggered=False, vulnerable_frames=0, in_air=False,
        distance_norm=0.5, round_over=False, won=False,
    )
    base.update(kw)
    return SideInfo(**base)


class TestOracleAgreement:
    def test_ten_thousand_random_pairs(self):
        rng = random.Random(4242)
        worst = 0.0
        for _ in range(10_000):
            info, terms = random_info(rng), random_terms(rng)
            got, bd = compute(info, terms)
            want = oracle_reward(info, terms)
            worst = max(worst, abs(got - want))
            assert abs(got - want) <= 1e-12
            assert bd.total == got
        assert worst <= 1e-12

    def test_breakdown_total_identity(self):
        rng = random.Random(7)
        for _ in range(500):
            info, terms = random_info(rng), random_terms(rng)
            _, bd = compute(info, terms)
            comp = (bd.hp_raw + bd.hp_special_bonus + bd.hp_projectile_bonus
                    + bd.hp_distance_bonus + bd.event_special + bd.event_projectile
                    + bd.distance + bd.in_air + bd.time - bd.cost_total)
            assert math.isclose(bd.total, terms.reward_scale * comp, rel_tol=0, abs_tol=1e-15)

    def test_all_zero_info_all_zero_terms_except_scale(self):
        terms = RewardTerms(**{f: (1.0 if f == "reward_scale" else 0.0) for f in TERM_FIELDS})
        r, bd = compute(plain_info(distance_norm=0.5), terms)
        assert r == 0.0
        assert bd.cost_total == 0.0


class TestDerivedExamples:
    def test_default_profile_regular_hit_mid_distance(self):
        # 0.001 * (1*10 + 1*0.5*10) = 0.015
        info = plain_info(damage_dealt=10.0, regular_attack_triggered=True, distance_norm=0.5)
        r, bd = compute(info, load_profile("default"))
        assert abs(r - 0.015) <= 1e-12
        assert bd.hp_raw == 10.0 and bd.hp_distance_bonus == 5.0

    def test_key_spamming_rewards_button_presses(self):
        # cost block: -(-1.0) * (2.0 * 1) = +2.0 unscaled -> +0.002
        info = plain_info(regular_attack_triggered=True)
        r, bd = compute(info, load_profile("key_spamming"))
        assert abs(r - 0.002) <= 1e-12
        assert bd.cost_total == -2.0

    def test_key_spamming_special_press(self):
        # -(-1.0) * (-3.0) = -3.0 unscaled: specials are discouraged
        info = plain_info(special_move_triggered=True)
        r, _ = compute(info, load_profile("key_spamming"))
        assert abs(r - (-0.003)) <= 1e-12


# Field-for-field fixture for the seven style columns, written out literally.
_EXPECTED = {
    "default":      dict(reward_scale=0.001, raw_reward_coefficient=1.0, special_move_bonus=1.0,
                         projectile_bonus=1.0, distance_bonus=1.0, special_move_reward=0.0,
                         projectile_reward=0.0, distance_reward=0.0, in_air_reward=0.0,
                         time_reward=0.0, cost_coefficient=0.0, special_move_cost=0.0,
                         regular_attack_cost=0.0, jump_cost=0.0, vulnerable_frame_cost=0.0),
    "special_move": dict(reward_scale=0.001, raw_reward_coefficient=1.0, special_move_bonus=3.0,
                         projectile_bonus=1.0, distance_bonus=2.0, special_move_reward=10.0,
                         projectile_reward=0.0, distance_reward=0.0, in_air_reward=0.0,
                         time_reward=0.0, cost_coefficient=1.0, special_move_cost=0.0,
                         regular_attack_cost=1.0, jump_cost=0.0, vulnerable_frame_cost=0.05),
    "defensive":    dict(reward_scale=0.001, raw_reward_coefficient=1.0, special_move_bonus=1.0,
                         projectile_bonus=1.0, distance_bonus=0.0, special_move_reward=0.0,
                         projectile_reward=10.0, distance_reward=0.02, in_air_reward=0.0,
                         time_reward=0.0, cost_coefficient=0.0, special_move_cost=0.0,
                         regular_attack_cost=0.0, jump_cost=0.0, vulnerable_frame_cost=0.0),
    "air":          dict(reward_scale=0.001, raw_reward_coefficient=1.0, special_move_bonus=0.0,
                         projectile_bonus=0.0, distance_bonus=0.0, special_move_reward=0.0,
                         projectile_reward=0.0, distance_reward=0.0, in_air_reward=0.05,
                         time_reward=0.0, cost_coefficient=0.0, special_move_cost=0.0,
                         regular_attack_cost=0.0, jump_cost=0.0, vulnerable_frame_cost=0.0),
    "newbie":       dict(reward_scale=0.001, raw_reward_coefficient=1.0, special_move_bonus=0.0,
                         projectile_bonus=0.0, distance_bonus=0.0, special_move_reward=0.0,
                         projectile_reward=0.0, distance_reward=0.0, in_air_reward=0.0,
                         time_reward=0.0, cost_coefficient=1.0, special_move_cost=30.0,
                         regular_attack_cost=0.0, jump_cost=0.0, vulnerable_frame_cost=0.0),
    "coward":       dict(reward_scale=0.001, raw_reward_coefficient=1.0, special_move_bonus=0.0,
                         projectile_bonus=0.0, distance_bonus=0.0, special_move_reward=0.0,
                         projectile_reward=0.0, distance_reward=0.2, in_air_reward=0.0,
                         time_reward=0.0, cost_coefficient=3.0, special_move_cost=5.0,
                         regular_attack_cost=1.0, jump_cost=0.0, vulnerable_frame_cost=0.0),
    "key_spamming": dict(reward_scale=0.001, raw_reward_coefficient=0.0, special_move_bonus=0.0,
                         projectile_bonus=0.0, distance_bonus=0.0, special_move_reward=0.0,
                         projectile_reward=0.0, distance_reward=0.0, in_air_reward=0.0,
                         time_reward=0.0, cost_coefficient=-1.0, special_move_cost=-3.0,
                         regular_attack_cost=2.0, jump_cost=0.0, vulnerable_frame_cost=0.0),
}


class TestProfiles:
    @pytest.mark.parametrize("name", TABLE_PROFILES)
    def test_table_fidelity(self, name):
        terms = load_profile(name)
        for field, want in _EXPECTED[name].items():
            assert getattr(terms, field) == want, f"{name}.{field}"

    def test_seven_table_profiles(self):
        assert set(TABLE_PROFILES) == set(_EXPECTED)
        assert len(TABLE_PROFILES) == 7

    def test_aggressive_variant(self):
        agg = load_profile("aggressive")
        base = load_profile("default")
        assert agg.distance_reward == -0.1
        for f in TERM_FIELDS:
            if f != "distance_reward":
                assert getattr(agg, f) == getattr(base, f)

    def test_file_round_trip(self, tmp_path):
        p = tmp_path / "custom.json"
        save_profile(BUILTIN_PROFILES["coward"], p)
        assert load_profile(p) == BUILTIN_PROFILES["coward"]

    def test_file_missing_field_rejected(self, tmp_path):
        d = BUILTIN_PROFILES["default"].to_dict()
        del d["jump_cost"]
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(d))
        with pytest.raises(ProfileError, match="jump_cost"):
            load_profile(p)

    def test_file_extra_field_rejected(self, tmp_path):
        d = BUILTIN_PROFILES["default"].to_dict()
        d["bonus_bonus"] = 1.0
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(d))
        with pytest.raises(ProfileError, match="bonus_bonus"):
            load_profile(p)

    def test_unknown_name_rejected(self):
        with pytest.raises(ProfileError, match="unknown profile"):
            load_profile("no_such_style")

    def test_zero_scale_rejected(self):
        vals = {f: 1.0 for f in TERM_FIELDS}
        vals["reward_scale"] = 0.0
        with pytest.raises(ProfileError, match="reward_scale"):
            RewardTerms(**vals)


_coef = st.floats(min_value=-4, max_value=4, allow_nan=False, allow_infinity=False, width=32)


@st.composite
def _info_st(draw):
    dealt = draw(st.integers(0, 30))
    sp = draw(st.integers(0, dealt)) if dealt else 0
    return plain_info(
        damage_dealt=float(dealt),
        damage_taken=float(draw(st.integers(0, 30))),
        damage_dealt_special=float(sp),
        damage_dealt_projectile=float(dealt - sp if draw(st.booleans()) else 0),
        special_move_triggered=draw(st.booleans()),
        projectile_triggered=draw(st.booleans()),
        regular_attack_triggered=draw(st.booleans()),
        jump_triggered=draw(st.booleans()),
        vulnerable_frames=draw(st.integers(0, 4)),
        in_air=draw(st.booleans()),
        distance_norm=draw(st.floats(0, 1, allow_nan=False, width=32)),
    )


@st.composite
def _terms_st(draw):
    vals = {f: float(draw(_coef)) for f in TERM_FIELDS}
    if vals["reward_scale"] == 0.0:
        vals["reward_scale"] = 0.001
    return RewardTerms(**vals)


class TestProperties:
    # The cost block is a product of cost_coefficient and the per-event costs,
    # so scale/add laws hold with reward_scale AND cost_coefficient pinned.
    @settings(max_examples=200, deadline=None)
    @given(_info_st(), _terms_st(), st.floats(-3, 3, allow_nan=False, width=32))
    def test_linearity_with_outer_multipliers_fixed(self, info, terms, alpha):
        alpha = float(alpha)
        scaled = RewardTerms(**{
            f: getattr(terms, f) * (1.0 if f in ("reward_scale", "cost_coefficient") else alpha)
            for f in TERM_FIELDS
        })
        r1, _ = compute(info, terms)
        r2, _ = compute(info, scaled)
        assert math.isclose(r2, alpha * r1, rel_tol=1e-9, abs_tol=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(_info_st(), _terms_st(), _terms_st())
    def test_additivity_with_outer_multipliers_shared(self, info, t1, t2):
        merged = RewardTerms(**{
            f: getattr(t1, f) if f in ("reward_scale", "cost_coefficient")
            else getattr(t1, f) + getattr(t2, f)
            for f in TERM_FIELDS
        })
        t2_shared = RewardTerms(**{
            f: getattr(t1, f) if f in ("reward_scale", "cost_coefficient") else getattr(t2, f)
            for f in TERM_FIELDS
        })
        r_merged, _ = compute(info, merged)
        r1, _ = compute(info, t1)
        r2, _ = compute(info, t2_shared)
        assert math.isclose(r_merged, r1 + r2, rel_tol=1e-9, abs_tol=1e-9)
