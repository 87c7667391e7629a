"""Tests for prompt assembly, response parsing, opponent selection, and the
output-quality benchmark."""

import copy
import json
import math
import threading
import time
from collections import Counter
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tta.archive import AgentArchive, SelectionResult
from tta.env.characters import BUILTIN_ROSTER, roster_from_dict
from tta.hyperagent import (
    ENTROPY_UNDEFINED,
    AttemptLog,
    LLMClientConfig,
    LLMClientError,
    MockClient,
    PromptTooLarge,
    ScriptedClient,
    SelectionExhausted,
    TransportHTTPError,
    TransportTimeout,
    ValidationFailure,
    benchmark_client,
    benchmark_fixture_set,
    benchmark_texts,
    build_prompt,
    bundled_fixture_dir,
    extract_selection,
    load_fixture_texts,
    parse_output,
    scan_json_objects,
    select_opponent,
    shannon_entropy_bits,
    validate,
)
from tta.hyperagent.client import HTTPChatClient
from tta.hyperagent.prompts import (
    ICL_EXAMPLE_FULL,
    ICL_EXAMPLE_SIMPLIFIED,
    OUTPUT_FORMAT_REQUIREMENT,
    SELECTION_PRINCIPLES,
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

VALID_TEXT = """Reasoning: streak favors a stronger pick.

{
    "chosen_agent_type": "projectile_type",
    "chosen_agent_model_path": "agent_models/agents_archive/projectile_type/2_0.2",
    "chosen_agent_character": "Volt"
}"""

PLAYING_DATA = {
    "current_character": "Kazan",
    "win_rate": 0.5,
    "player's_feedback": "more pressure please",
}


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


@pytest.fixture()
def archive(tmp_path, ckpt_factory):
    arch = AgentArchive(tmp_path / "arch")
    arch.register(
        ckpt_factory("2_0.2"), "projectile_type",
        {"win_rate_vs_builtin": 0.2, "special_moves_per_round": 2.0},
    )
    arch.register(
        ckpt_factory("1_0.22"), "aggressive_type",
        {"win_rate_vs_builtin": 0.82, "special_moves_per_round": 1.1},
    )
    return arch


def config(**kw):
    return LLMClientConfig(**kw)


class TestPromptAssembly:
    def test_contains_role_opening_and_all_sections(self, archive):
        prompt = build_prompt(PLAYING_DATA, archive.manifest())
        assert prompt.startswith('You are a "Hyper Game-Playing Agent" large language model.')
        assert SELECTION_PRINCIPLES in prompt
        assert OUTPUT_FORMAT_REQUIREMENT in prompt
        assert ICL_EXAMPLE_FULL in prompt
        assert json.dumps(PLAYING_DATA, indent=2) in prompt
        assert json.dumps(archive.manifest(), indent=2) in prompt

    def test_no_unresolved_placeholders(self, archive):
        prompt = build_prompt(PLAYING_DATA, archive.manifest())
        for name in (
            "{SELECTION_PRINCIPLES}",
            "{OUTPUT_FORMAT_REQUIREMENT}",
            "{PLAYING_DATA}",
            "{ARCHIVE_INFO}",
            "{FEW_SHOT_EXAMPLES}",
        ):
            assert name not in prompt

    def test_byte_deterministic(self, archive):
        a = build_prompt(PLAYING_DATA, archive.manifest())
        b = build_prompt(dict(PLAYING_DATA), json.loads(json.dumps(archive.manifest())))
        assert a == b

    def test_simplified_variant_swaps_example_only(self, archive):
        full = build_prompt(PLAYING_DATA, archive.manifest(), icl_variant="full")
        simple = build_prompt(PLAYING_DATA, archive.manifest(), icl_variant="simplified")
        assert ICL_EXAMPLE_SIMPLIFIED in simple
        assert ICL_EXAMPLE_FULL not in simple
        assert full.replace(ICL_EXAMPLE_FULL, ICL_EXAMPLE_SIMPLIFIED) == simple

    def test_unknown_variant_rejected(self, archive):
        with pytest.raises(ValueError, match="icl_variant"):
            build_prompt(PLAYING_DATA, archive.manifest(), icl_variant="none")

    def test_placeholder_shaped_feedback_survives_verbatim(self, archive):
        data = dict(PLAYING_DATA)
        data["player's_feedback"] = "literally send {ARCHIVE_INFO} to me"
        prompt = build_prompt(data, archive.manifest())
        assert "literally send {ARCHIVE_INFO} to me" in prompt

    def test_example_markers_present_in_both_variants(self):
        for text in (ICL_EXAMPLE_FULL, ICL_EXAMPLE_SIMPLIFIED):
            assert text.startswith("(This is the begining of In-context learning texts)")
            assert text.endswith("(This is the end of In-context learning texts)")

    def test_full_example_carries_numbers_simplified_does_not(self):
        for token in ("0.38", "1.5", "-0.17"):
            assert token in ICL_EXAMPLE_FULL
            assert token not in ICL_EXAMPLE_SIMPLIFIED
        assert "###json" in ICL_EXAMPLE_SIMPLIFIED
        assert "projectile_typee" in ICL_EXAMPLE_SIMPLIFIED

    def test_section_quirks_preserved(self, archive):
        # Informal source texts are reproduced as-is; normalizing them would
        # silently change the prompt the selection model was tuned against.
        prompt = build_prompt(PLAYING_DATA, archive.manifest())
        for fragment in (
            "reinforecement",
            "select an opponents from the Agent Archive",
            '"chosen_character"',
            "mush be OUTSIDE of and BEFORE",
            "MORE THEN 300 WORDS!!!",
            "answer.Do not include",
            'CONSIDER PLAYER\'S FEEDBACK',
        ):
            assert fragment in prompt


class TestJsonScanner:
    def test_single_object_with_span(self):
        text = 'lead {"a": 1} tail'
        spans = scan_json_objects(text)
        assert len(spans) == 1
        start, end, doc = spans[0]
        assert text[start:end] == '{"a": 1}'
        assert doc == {"a": 1}

    def test_nested_objects_count_as_one(self):
        spans = scan_json_objects('{"a": {"b": [1, {"c": 2}]}}')
        assert len(spans) == 1
        assert spans[0][2] == {"a": {"b": [1, {"c": 2}]}}

    def test_braces_inside_strings_ignored(self):
        spans = scan_json_objects('{"a": "close } open { mid"}')
        assert len(spans) == 1
        assert spans[0][2]["a"] == "close } open { mid"

    def test_escaped_quotes_inside_strings(self):
        spans = scan_json_objects('{"a": "say \\" then }"}')
        assert len(spans) == 1
        assert spans[0][2]["a"] == 'say " then }'

    def test_multiple_objects_in_order(self):
        spans = scan_json_objects('{"a": 1} and {"b": 2}')
        assert [s[2] for s in spans] == [{"a": 1}, {"b": 2}]

    def test_unparsable_balanced_span_skipped(self):
        spans = scan_json_objects("{'bad': 1} then {\"ok\": 1}")
        assert [s[2] for s in spans] == [{"ok": 1}]

    def test_unterminated_object_dropped(self):
        assert scan_json_objects('prose { "a": 1 and nothing closes') == []

    def test_non_object_json_not_collected(self):
        assert scan_json_objects("[1, 2, 3] plain") == []


class TestParseOutput:
    def test_reasoning_is_text_before_first_block(self):
        parsed = parse_output(VALID_TEXT)
        assert parsed.reasoning == "Reasoning: streak favors a stronger pick."
        assert len(parsed.json_blocks) == 1

    def test_think_tags_removed_from_reasoning(self):
        parsed = parse_output('<think>weigh the data</think>\n{"a": 1}')
        assert parsed.reasoning == "weigh the data"
        assert "<think>" not in parsed.reasoning

    def test_no_block_means_full_text_is_reasoning(self):
        parsed = parse_output("no structured output at all")
        assert parsed.json_blocks == ()
        assert parsed.reasoning == "no structured output at all"

    def test_word_count_is_whitespace_tokens(self):
        assert parse_output("one two\nthree\tfour").word_count == 4

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=400))
    def test_total_on_arbitrary_text(self, text):
        parsed = parse_output(text)
        assert parsed.raw == text
        assert isinstance(parsed.reasoning, str)
        assert all(isinstance(b, dict) for b in parsed.json_blocks)

    @settings(max_examples=200, deadline=None)
    @given(st.text(alphabet='{}"\\ab:,1 ', max_size=120))
    def test_total_on_brace_heavy_text(self, text):
        parsed = parse_output(text)
        for (start, end), doc in zip(parsed.block_spans, parsed.json_blocks):
            assert json.loads(text[start:end]) == doc


class TestThinkTagFixture:
    """The bundled fixture whose chain of thought leaks a closing think tag
    must still parse to its exact selection triple."""

    def fixture_text(self):
        return load_fixture_texts()["01_think_tag_then_json"]

    def test_exactly_one_block_and_exact_triple(self):
        parsed = parse_output(self.fixture_text())
        assert len(parsed.json_blocks) == 1
        assert extract_selection(parsed) == SelectionResult(
            chosen_agent_type="aggressive_type",
            chosen_agent_model_path="agent_models/agents_archive/aggressive_type/1_0.22",
            chosen_agent_character="Honda",
        )

    def test_reasoning_kept_minus_tag(self):
        parsed = parse_output(self.fixture_text())
        assert "</think>" not in parsed.reasoning
        assert parsed.reasoning.startswith("chain of thought followed by the JSON.")
        assert "difficulty score of 8/10" in parsed.reasoning


class TestClients:
    def test_config_defaults(self):
        cfg = config()
        assert cfg.temperature == 0.6
        assert cfg.retry_limit == 3

    @pytest.mark.parametrize("kw", [
        {"retry_limit": 0},
        {"timeout_seconds": 0.0},
        {"max_prompt_chars": 0},
    ])
    def test_config_rejects_bad_values(self, kw):
        with pytest.raises(ValueError):
            config(**kw)

    def test_mock_is_pure_function_of_prompt(self):
        mock = MockClient()
        cfg = config()
        assert mock.query("prompt A", cfg) == mock.query("prompt A", cfg)
        name = mock.fixture_for("prompt A")
        assert name in mock.fixture_names
        assert mock.query("prompt A", cfg) == mock.fixture(name)

    def test_mock_reads_custom_directory(self, tmp_path):
        (tmp_path / "only.txt").write_text("canned", encoding="utf-8")
        mock = MockClient(tmp_path)
        assert mock.fixture_names == ("only",)
        assert mock.query("anything", config()) == "canned"

    def test_mock_empty_directory_rejected(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            MockClient(tmp_path)

    def test_oversize_prompt_fails_before_transport(self):
        mock = MockClient()
        with pytest.raises(PromptTooLarge):
            mock.query("x" * 100, config(max_prompt_chars=10))

    def test_scripted_sequence_and_exhaustion(self):
        client = ScriptedClient(["first", TransportTimeout("boom"), "third"])
        cfg = config()
        assert client.query("p", cfg) == "first"
        with pytest.raises(TransportTimeout):
            client.query("p", cfg)
        assert client.query("p", cfg) == "third"
        with pytest.raises(LLMClientError):
            client.query("p", cfg)
        assert client.calls == 3

    def test_bundled_fixture_dir_holds_twenty(self):
        texts = load_fixture_texts(bundled_fixture_dir())
        assert len(texts) == 20


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        body = self.rfile.read(int(self.headers.get("Content-Length", 0)))
        doc = json.loads(body)
        if self.path == "/error":
            self.send_error(500, "backend exploded")
            return
        if self.path == "/slow":
            time.sleep(1.0)
        content = "echo:" + doc["messages"][0]["content"]
        payload = json.dumps(
            {"choices": [{"message": {"role": "assistant", "content": content}}]}
        ).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture(scope="module")
def http_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    thread.join(timeout=5)


class TestHTTPChatClient:
    def test_round_trip_returns_message_content(self, http_server):
        client = HTTPChatClient()
        out = client.query("ping", config(endpoint=http_server + "/ok"))
        assert out == "echo:ping"

    def test_http_error_status_carried(self, http_server):
        client = HTTPChatClient()
        with pytest.raises(TransportHTTPError) as info:
            client.query("ping", config(endpoint=http_server + "/error"))
        assert info.value.status == 500

    def test_timeout_maps_to_transport_timeout(self, http_server):
        client = HTTPChatClient()
        with pytest.raises(TransportTimeout):
            client.query(
                "ping", config(endpoint=http_server + "/slow", timeout_seconds=0.2)
            )

    def test_empty_endpoint_rejected(self):
        with pytest.raises(LLMClientError):
            HTTPChatClient().query("ping", config())


class TestExtractAndValidate:
    def test_no_json_reason(self):
        out = extract_selection(parse_output("just prose"))
        assert isinstance(out, ValidationFailure)
        assert out.reason == "no_json"

    def test_missing_field_names_the_field(self):
        out = extract_selection(parse_output('{"chosen_agent_type": "air_type"}'))
        assert out == ValidationFailure("missing_field", "chosen_agent_model_path")

    def test_non_string_field_is_missing(self):
        text = json.dumps({
            "chosen_agent_type": "air_type",
            "chosen_agent_model_path": 7,
            "chosen_agent_character": "Riko",
        })
        out = extract_selection(parse_output(text))
        assert out == ValidationFailure("missing_field", "chosen_agent_model_path")

    def test_last_block_wins(self):
        text = (
            '{"chosen_agent_type": "aggressive_type",'
            ' "chosen_agent_model_path": "a", "chosen_agent_character": "Kazan"}\n'
            'actually no:\n'
            '{"chosen_agent_type": "projectile_type",'
            ' "chosen_agent_model_path": "b", "chosen_agent_character": "Volt"}'
        )
        out = extract_selection(parse_output(text))
        assert out.chosen_agent_type == "projectile_type"
        assert out.chosen_agent_model_path == "b"

    def make_text(self, type_, path, char):
        return json.dumps({
            "chosen_agent_type": type_,
            "chosen_agent_model_path": path,
            "chosen_agent_character": char,
        })

    def test_unknown_path_checked_before_character(self, archive):
        out = validate(parse_output(self.make_text("air_type", "nope", "Ryu")), archive)
        assert out.reason == "unknown_path"

    def test_type_mismatch_checked_before_character(self, archive):
        text = self.make_text(
            "air_type", "agent_models/agents_archive/projectile_type/2_0.2", "Ryu"
        )
        out = validate(parse_output(text), archive)
        assert out.reason == "type_mismatch"

    def test_unknown_character_last(self, archive):
        text = self.make_text(
            "projectile_type", "agent_models/agents_archive/projectile_type/2_0.2", "Ryu"
        )
        out = validate(parse_output(text), archive)
        assert out.reason == "unknown_character"

    def test_valid_selection_passes(self, archive):
        out = validate(parse_output(VALID_TEXT), archive)
        assert out == SelectionResult(
            "projectile_type", "agent_models/agents_archive/projectile_type/2_0.2", "Volt"
        )


class TestSelectOpponent:
    def test_succeeds_on_later_attempt_counting_transport(self, archive):
        client = ScriptedClient([
            "no structured output",
            TransportTimeout("socket"),
            VALID_TEXT,
        ])
        out = select_opponent(PLAYING_DATA, archive, config(retry_limit=3), client)
        assert out.chosen_agent_character == "Volt"
        assert client.calls == 3

    def test_exhaustion_records_attempt_reasons(self, archive):
        client = ScriptedClient([
            "prose only",
            TransportHTTPError(502, "bad gateway"),
            '{"chosen_agent_type": "air_type"}',
        ])
        with pytest.raises(SelectionExhausted) as info:
            select_opponent(PLAYING_DATA, archive, config(retry_limit=3), client)
        assert [a.reason for a in info.value.attempts] == [
            "no_json", "transport", "missing_field",
        ]
        assert info.value.attempts[0] == AttemptLog(1, "no_json",
                                                    "response contains no parsable JSON object")

    def test_retry_limit_caps_queries(self, archive):
        client = ScriptedClient(["prose"] * 10)
        with pytest.raises(SelectionExhausted):
            select_opponent(PLAYING_DATA, archive, config(retry_limit=2), client)
        assert client.calls == 2

    def test_mock_client_selection_is_deterministic(self, archive, tmp_path):
        fixture_dir = tmp_path / "fx"
        fixture_dir.mkdir()
        (fixture_dir / "pick.txt").write_text(VALID_TEXT, encoding="utf-8")
        client = MockClient(fixture_dir)
        first = select_opponent(PLAYING_DATA, archive, config(), client)
        second = select_opponent(PLAYING_DATA, archive, config(), client)
        assert first == second == SelectionResult(
            "projectile_type", "agent_models/agents_archive/projectile_type/2_0.2", "Volt"
        )

    def test_overlong_response_logged_not_rejected(self, tmp_path, ckpt_factory):
        arch = AgentArchive(tmp_path / "arch")
        arch.register(ckpt_factory("1_0.22"), "aggressive_type",
                      {"win_rate_vs_builtin": 0.82})
        text = load_fixture_texts()["14_overlong_reasoning"]
        lines = []
        out = select_opponent({}, arch, config(), ScriptedClient([text]),
                              log=lines.append)
        assert out.chosen_agent_character == "Gorn"
        assert any("words" in line for line in lines)

    def test_renamed_roster_resolves_bundled_triple(self, tmp_path, ckpt_factory):
        # A deployment can rename roster entries; selection then validates
        # against the renamed roster end to end.
        doc = copy.deepcopy(BUILTIN_ROSTER)
        doc["characters"][3]["name"] = "Honda"
        arch = AgentArchive(tmp_path / "arch", roster=roster_from_dict(doc))
        arch.register(ckpt_factory("1_0.22"), "aggressive_type",
                      {"win_rate_vs_builtin": 0.82})
        text = load_fixture_texts()["01_think_tag_then_json"]
        out = select_opponent({}, arch, config(), ScriptedClient([text]))
        assert out == SelectionResult(
            "aggressive_type",
            "agent_models/agents_archive/aggressive_type/1_0.22",
            "Honda",
        )
        record = arch.resolve(out)
        assert record.difficulty_score == "8/10-(Hard)"


class TestEntropy:
    def test_uniform_over_four_is_two_bits(self):
        assert shannon_entropy_bits(["a", "b", "c", "d"]) == 2.0

    def test_single_label_is_zero(self):
        assert shannon_entropy_bits(["a", "a", "a"]) == 0.0

    def test_counts_12_5_3(self):
        labels = ["a"] * 12 + ["b"] * 5 + ["c"] * 3
        expected = -(
            0.6 * math.log2(0.6) + 0.25 * math.log2(0.25) + 0.15 * math.log2(0.15)
        )
        assert shannon_entropy_bits(labels) == pytest.approx(expected, rel=1e-12)
        assert shannon_entropy_bits(labels) == pytest.approx(1.3527, abs=5e-4)

    def test_permutation_invariant(self):
        labels = ["a"] * 3 + ["b"] * 2 + ["c"] * 5
        assert shannon_entropy_bits(labels) == pytest.approx(
            shannon_entropy_bits(list(reversed(labels))), rel=1e-12
        )

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            shannon_entropy_bits([])


class TestBenchmark:
    def test_bundled_set_rates_exact(self):
        report = benchmark_fixture_set()
        assert report.n == 20
        assert report.json_in_output == 17 / 20
        assert report.format_correctness == 14 / 20

    def test_bundled_set_entropies_match_hand_counts(self):
        report = benchmark_fixture_set()
        sels = [r.selection for r in report.records if r.selection is not None]
        assert len(sels) == 17
        types = Counter(s["chosen_agent_type"] for s in sels)
        chars = Counter(s["chosen_agent_character"] for s in sels)
        assert types == {
            "aggressive_type": 6, "projectile_type": 5, "coward_type": 3, "air_type": 3,
        }
        assert chars == {"Honda": 1, "Kazan": 4, "Riko": 4, "Volt": 4, "Gorn": 4}

        def entropy(counts):
            total = sum(counts)
            return -sum((c / total) * math.log2(c / total) for c in counts)

        assert report.type_entropy_bits == pytest.approx(entropy([6, 5, 3, 3]), rel=1e-12)
        assert report.character_entropy_bits == pytest.approx(
            entropy([1, 4, 4, 4, 4]), rel=1e-12
        )

    def test_uniform_four_types_report_two_bits(self):
        texts = [
            json.dumps({
                "chosen_agent_type": t,
                "chosen_agent_model_path": "p",
                "chosen_agent_character": c,
            })
            for t, c in [
                ("air_type", "Riko"), ("coward_type", "Kazan"),
                ("projectile_type", "Volt"), ("aggressive_type", "Gorn"),
            ]
        ]
        report = benchmark_texts(texts)
        assert report.type_entropy_bits == 2.0
        assert report.character_entropy_bits == 2.0

    def test_no_valid_selection_marks_entropy_undefined(self):
        report = benchmark_texts(["prose only", "more prose"])
        assert report.json_in_output == 0.0
        assert report.type_entropy_bits == ENTROPY_UNDEFINED
        assert report.character_entropy_bits == ENTROPY_UNDEFINED

    def test_bare_json_counts_for_json_not_format(self):
        report = benchmark_texts(['{"chosen_agent_type": "x"}'])
        assert report.json_in_output == 1.0
        assert report.format_correctness == 0.0

    def test_two_blocks_fail_format(self):
        report = benchmark_texts(['why not both {"a": 1} or {"b": 2}'])
        assert report.json_in_output == 1.0
        assert report.format_correctness == 0.0

    def test_client_mode_scores_transport_failure_as_empty_run(self, archive):
        client = ScriptedClient([VALID_TEXT, TransportTimeout("gone"), VALID_TEXT])
        report = benchmark_client(client, "prompt", config(), n=3)
        assert report.n == 3
        assert report.json_in_output == pytest.approx(2 / 3)
        assert report.records[1].json_in_output is False

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.sampled_from([
        VALID_TEXT,
        "prose only",
        '{"chosen_agent_type": "x"}',
        '{"a": 1} and {"b": 2}',
        "{'broken': 1}",
    ]), min_size=1, max_size=12))
    def test_format_rate_never_exceeds_json_rate(self, texts):
        report = benchmark_texts(texts)
        assert report.format_correctness <= report.json_in_output
