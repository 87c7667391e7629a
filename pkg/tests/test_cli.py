"""Smoke tests for the command-line surface."""

import json

import pytest

from tta.cli import build_parser, main
from tta.policy import PolicySpec, make_policy, save_checkpoint
from tta.rewards import TERM_FIELDS

TINY_SPEC = PolicySpec(
    cnn_feature_dim=16,
    actor_layers=(24, 16),
    critic_layers=(24, 16),
    rnn_hidden_dim=16,
    rnn_num_layers=1,
    rnn_dropout=0.0,
)


@pytest.fixture()
def tiny_ckpt(tmp_path):
    path = tmp_path / "1_0.4.ckpt"
    save_checkpoint(path, make_policy(TINY_SPEC, seed=3), extra={
        "eval_summary": {"win_rate_vs_builtin": 0.4, "special_moves_per_round": 2.5},
    })
    return path


class TestParser:
    def test_no_command_exits(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_every_subcommand_registers(self):
        parser = build_parser()
        for argv in [
            ["reward", "show", "default"],
            ["archive", "list", "somewhere"],
            ["llm-bench"],
            ["eval", "score", "file.json"],
        ]:
            args = parser.parse_args(argv)
            assert callable(args.func)


class TestRewardShow:
    def test_prints_all_terms(self, capsys):
        assert main(["reward", "show", "default"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == len(TERM_FIELDS)
        assert lines[0].startswith("reward_scale")

    def test_unknown_profile_fails(self):
        from tta.rewards import ProfileError

        with pytest.raises(ProfileError):
            main(["reward", "show", "no_such_profile"])


class TestArchiveCommands:
    def test_register_list_lint_round_trip(self, tmp_path, tiny_ckpt, capsys):
        root = tmp_path / "arch"
        assert main(["archive", "register", str(root), str(tiny_ckpt),
                     "--type", "defensive_type"]) == 0
        assert "defensive_type/1_0.4" in capsys.readouterr().out

        out_file = tmp_path / "manifest.json"
        assert main(["archive", "list", str(root), "--out", str(out_file)]) == 0
        manifest = json.loads(out_file.read_text())
        assert list(manifest) == ["defensive_type"]
        assert manifest["defensive_type"]["agent_models"][0]["model_path"] == (
            "agent_models/agents_archive/defensive_type/1_0.4"
        )

        assert main(["archive", "lint", str(root)]) == 0
        assert "archive clean" in capsys.readouterr().out

    def test_register_without_summary_needs_win_rate(self, tmp_path):
        bare = tmp_path / "2_0.0.ckpt"
        save_checkpoint(bare, make_policy(TINY_SPEC, seed=4))
        root = tmp_path / "arch"
        with pytest.raises(SystemExit):
            main(["archive", "register", str(root), str(bare),
                  "--type", "air_type"])
        assert main(["archive", "register", str(root), str(bare),
                     "--type", "air_type", "--win-rate", "0.6"]) == 0


class TestLLMBench:
    def test_bundled_fixture_report(self, tmp_path):
        out = tmp_path / "report.json"
        assert main(["llm-bench", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["n"] == 20
        assert report["json_in_output"] == 0.85
        assert report["format_correctness"] == 0.70

    def test_custom_fixture_dir(self, tmp_path, capsys):
        fixtures = tmp_path / "fx"
        fixtures.mkdir()
        (fixtures / "a.txt").write_text('{"chosen_agent_type": "air_type", '
                                        '"chosen_agent_model_path": "p", '
                                        '"chosen_agent_character": "Riko"}')
        (fixtures / "b.txt").write_text("no json here")
        assert main(["llm-bench", "--fixture-set", str(fixtures)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["n"] == 2
        assert report["json_in_output"] == 0.5


class TestEvalCommands:
    def test_score_command(self, tmp_path):
        responses = [
            {"group": "experimental",
             "answers": {"overall_enjoyability": "very enjoyable",
                         "difficulty_suitability": 2,
                         "diversity_and_expectation": "neutral",
                         "preferred_group": 3}},
            {"group": "control",
             "answers": {"overall_enjoyability": "not enjoyable",
                         "difficulty_suitability": 1,
                         "diversity_and_expectation": 1,
                         "preferred_group": 0}},
        ]
        src = tmp_path / "responses.json"
        src.write_text(json.dumps(responses))
        out = tmp_path / "scores.json"
        assert main(["eval", "score", str(src), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["means"]["experimental"]["overall_enjoyability"] == 3.0
        assert doc["counts"] == {"experimental": 1, "control": 1}

    def test_h2h_with_csv(self, tmp_path):
        out = tmp_path / "h2h.json"
        csv_path = tmp_path / "h2h.csv"
        assert main(["eval", "h2h", "--agent-a", "noop", "--agent-b", "noop",
                     "--chars", "0", "--matches-per-pairing", "1",
                     "--out", str(out), "--csv", str(csv_path)]) == 0
        doc = json.loads(out.read_text())
        assert doc["n_matches"] == 1
        assert doc["draws"] == 1  # two idle fighters time out at equal hp
        rows = csv_path.read_text().strip().splitlines()
        assert len(rows) == 2 and rows[0].startswith("match,")

    def test_bad_agent_spec_fails(self):
        with pytest.raises(SystemExit):
            main(["eval", "h2h", "--agent-a", "wizard", "--agent-b", "noop"])
