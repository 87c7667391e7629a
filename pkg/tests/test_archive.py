"""Tests for the play-style agent archive and its published manifest."""

import json

import pytest

from tta.archive import (
    AGENT_TYPES,
    AgentArchive,
    ArchiveError,
    SelectionResult,
    difficulty_from_win_rate,
    load_manifest,
    parse_difficulty,
    suggested_characters,
    validate_manifest,
)
from tta.policy import PolicySpec, make_policy, save_checkpoint

TINY_SPEC = PolicySpec(
    cnn_feature_dim=16,
    actor_layers=(24, 16),
    critic_layers=(24, 16),
    rnn_hidden_dim=16,
    rnn_num_layers=1,
    rnn_dropout=0.0,
)


@pytest.fixture(scope="module")
def ckpt_factory(tmp_path_factory):
    root = tmp_path_factory.mktemp("ckpts")
    net = make_policy(TINY_SPEC, seed=0)

    def make(stem):
        path = root / f"{stem}.ckpt"
        if not path.exists():
            save_checkpoint(path, net)
        return path

    return make


def summary(win_rate):
    return {"win_rate_vs_builtin": win_rate, "special_moves_per_round": 2.0}


class TestDifficulty:
    @pytest.mark.parametrize("win,expected", [
        (0.05, "0/10-(Very Easy)"),
        (0.12, "1/10-(Very Easy)"),
        (0.2, "2/10-(Easy)"),
        (0.34, "3/10-(Easy)"),
        (0.41, "4/10-(Medium)"),
        (0.6, "6/10-(Medium)"),
        (0.7, "7/10-(Hard)"),
        (0.92, "9/10-(Hard)"),
        (1.0, "10/10-(Very Hard)"),
    ])
    def test_score_formatting(self, win, expected):
        assert difficulty_from_win_rate(win) == expected

    def test_out_of_range_win_rate_rejected(self):
        with pytest.raises(ArchiveError):
            difficulty_from_win_rate(1.2)

    @pytest.mark.parametrize("text,score,label", [
        ("6/10-(Medium)", 6, "Medium"),
        ("0/10-(Very Easy)", 0, "Very Easy"),
        ("10/10-(Very Hard)", 10, "Very Hard"),
    ])
    def test_parse_round_trip(self, text, score, label):
        assert parse_difficulty(text) == (score, label)

    @pytest.mark.parametrize("bad", ["11/10-(X)", "6/10-Medium", "six/10-(Medium)", ""])
    def test_parse_rejects_malformed(self, bad):
        with pytest.raises(ArchiveError):
            parse_difficulty(bad)


class TestSuggestedCharacters:
    def test_projectile_lists_projectile_characters(self):
        assert suggested_characters("projectile_type") == ["Kazan", "Volt"]
        assert suggested_characters("defensive_type") == ["Kazan", "Volt"]

    def test_mobility_styles_prefer_fast_characters(self):
        assert suggested_characters("coward_type") == ["Riko", "Kazan"]
        assert suggested_characters("air_type")[0] == "Riko"

    def test_generic_styles_allow_everyone(self):
        assert len(suggested_characters("newbie_type")) == 4


class TestRegister:
    def test_register_builds_manifest(self, tmp_path, ckpt_factory):
        archive = AgentArchive(tmp_path / "archive")
        record = archive.register(ckpt_factory("2_0.2"), "projectile_type",
                                  summary(0.6), profile="defensive", iteration=2)
        assert record.model_path == "agent_models/agents_archive/projectile_type/2_0.2"
        assert record.difficulty_score == "6/10-(Medium)"
        doc = json.loads(archive.manifest_path.read_text())
        assert set(doc) == {"projectile_type"}
        block = doc["projectile_type"]
        assert set(block) == {"suggested_characters_for_this_type", "agent_models"}
        assert block["agent_models"] == [{
            "model_path": "agent_models/agents_archive/projectile_type/2_0.2",
            "model_difficulty_score": "6/10-(Medium)",
        }]

    def test_duplicate_model_path_rejected(self, tmp_path, ckpt_factory):
        archive = AgentArchive(tmp_path / "archive")
        archive.register(ckpt_factory("1_0.5"), "air_type", summary(0.5))
        with pytest.raises(ArchiveError) as err:
            archive.register(ckpt_factory("1_0.5"), "air_type", summary(0.5))
        assert err.value.reason == "duplicate_path"

    def test_same_stem_under_other_type_allowed(self, tmp_path, ckpt_factory):
        archive = AgentArchive(tmp_path / "archive")
        archive.register(ckpt_factory("1_0.5"), "air_type", summary(0.5))
        archive.register(ckpt_factory("1_0.5"), "coward_type", summary(0.5))
        assert len(archive.records) == 2

    def test_invalid_type_rejected(self, tmp_path, ckpt_factory):
        archive = AgentArchive(tmp_path / "archive")
        with pytest.raises(ArchiveError) as err:
            archive.register(ckpt_factory("1_0.5"), "banana_type", summary(0.5))
        assert err.value.reason == "invalid_type"

    def test_unloadable_checkpoint_rejected(self, tmp_path):
        bad = tmp_path / "bad.ckpt"
        bad.write_bytes(b"not a checkpoint")
        archive = AgentArchive(tmp_path / "archive")
        with pytest.raises(ArchiveError) as err:
            archive.register(bad, "air_type", summary(0.5))
        assert err.value.reason == "unloadable_checkpoint"

    def test_missing_eval_summary_rejected(self, tmp_path, ckpt_factory):
        archive = AgentArchive(tmp_path / "archive")
        with pytest.raises(ArchiveError) as err:
            archive.register(ckpt_factory("1_0.5"), "air_type", {})
        assert err.value.reason == "missing_eval"

    def test_records_persist_across_reload(self, tmp_path, ckpt_factory):
        root = tmp_path / "archive"
        AgentArchive(root).register(ckpt_factory("3_0.7"), "aggressive_type",
                                    summary(0.7), profile="aggressive", iteration=3)
        reloaded = AgentArchive(root)
        assert len(reloaded.records) == 1
        assert reloaded.records[0].agent_type == "aggressive_type"
        assert reloaded.records[0].iteration == 3


class TestResolve:
    @pytest.fixture
    def seeded(self, tmp_path, ckpt_factory):
        archive = AgentArchive(tmp_path / "archive")
        archive.register(ckpt_factory("2_0.2"), "projectile_type", summary(0.6))
        archive.register(ckpt_factory("1_0.22"), "aggressive_type", summary(0.8))
        return archive

    def test_resolves_listed_path(self, seeded):
        record = seeded.resolve(SelectionResult(
            "projectile_type",
            "agent_models/agents_archive/projectile_type/2_0.2",
            "Kazan",
        ))
        assert record.agent_type == "projectile_type"

    def test_character_need_not_be_suggested(self, seeded):
        # Gorn is not on the projectile suggestion list but is rostered
        record = seeded.resolve(SelectionResult(
            "projectile_type",
            "agent_models/agents_archive/projectile_type/2_0.2",
            "Gorn",
        ))
        assert record is seeded.records[0]

    def test_unknown_path(self, seeded):
        with pytest.raises(ArchiveError) as err:
            seeded.resolve(SelectionResult(
                "projectile_type",
                "agent_models/agents_archive/projectile_type/9_0.9",
                "Kazan",
            ))
        assert err.value.reason == "unknown_path"

    def test_type_mismatch(self, seeded):
        with pytest.raises(ArchiveError) as err:
            seeded.resolve(SelectionResult(
                "coward_type",
                "agent_models/agents_archive/projectile_type/2_0.2",
                "Kazan",
            ))
        assert err.value.reason == "type_mismatch"

    def test_unknown_character(self, seeded):
        with pytest.raises(ArchiveError) as err:
            seeded.resolve(SelectionResult(
                "projectile_type",
                "agent_models/agents_archive/projectile_type/2_0.2",
                "Ryu",
            ))
        assert err.value.reason == "unknown_character"


class TestManifestFile:
    def test_round_trip_is_byte_stable(self, tmp_path, ckpt_factory):
        archive = AgentArchive(tmp_path / "archive")
        archive.register(ckpt_factory("2_0.2"), "projectile_type", summary(0.6))
        archive.register(ckpt_factory("1_0.25"), "special_move_type", summary(0.9))
        text = archive.manifest_path.read_text()
        assert json.dumps(json.loads(text), indent=2) + "\n" == text

    def test_load_manifest_validates(self, tmp_path):
        good = {
            "projectile_type": {
                "suggested_characters_for_this_type": ["Kazan"],
                "agent_models": [
                    {"model_path": "agent_models/agents_archive/projectile_type/2_0.2",
                     "model_difficulty_score": "6/10-(Medium)"}
                ],
            }
        }
        p = tmp_path / "manifest.json"
        p.write_text(json.dumps(good))
        assert load_manifest(p) == good

    def test_validate_rejects_unknown_type(self):
        with pytest.raises(ArchiveError):
            validate_manifest({"mystery_type": {
                "suggested_characters_for_this_type": [], "agent_models": []}})

    def test_validate_rejects_missing_keys(self):
        with pytest.raises(ArchiveError):
            validate_manifest({"air_type": {"agent_models": []}})

    def test_validate_rejects_bad_model_entry(self):
        with pytest.raises(ArchiveError):
            validate_manifest({"air_type": {
                "suggested_characters_for_this_type": [],
                "agent_models": [{"model_path": "x"}]}})

    def test_all_eight_types_accepted(self):
        doc = {t: {"suggested_characters_for_this_type": [], "agent_models": []}
               for t in AGENT_TYPES}
        validate_manifest(doc)


class TestLint:
    def test_clean_archive_has_no_problems(self, tmp_path, ckpt_factory):
        archive = AgentArchive(tmp_path / "archive")
        archive.register(ckpt_factory("2_0.2"), "projectile_type", summary(0.6))
        assert archive.lint() == []

    def test_lint_reports_missing_checkpoint(self, tmp_path, ckpt_factory):
        archive = AgentArchive(tmp_path / "archive")
        ck = tmp_path / "gone.ckpt"
        import shutil

        shutil.copy(ckpt_factory("2_0.2"), ck)
        archive.register(ck, "projectile_type", summary(0.6))
        ck.unlink()
        problems = archive.lint()
        assert len(problems) == 1
        assert "missing file" in problems[0]
