"""LLM-driven opponent selection: prompt assembly, chat clients, response
parsing, archive-backed validation, and the output-quality benchmark."""

from .bench import (
    ENTROPY_UNDEFINED,
    BenchmarkReport,
    RunRecord,
    benchmark_client,
    benchmark_fixture_set,
    benchmark_texts,
    evaluate_response,
    shannon_entropy_bits,
)
from .client import (
    HTTPChatClient,
    LLMClientConfig,
    LLMClientError,
    MockClient,
    PromptTooLarge,
    ScriptedClient,
    TransportHTTPError,
    TransportTimeout,
    bundled_fixture_dir,
    load_fixture_texts,
)
from .parsing import ParsedOutput, parse_output, scan_json_objects, strip_think_tags
from .prompts import (
    BASE_TEMPLATE,
    ICL_EXAMPLE_FULL,
    ICL_EXAMPLE_SIMPLIFIED,
    ICL_VARIANTS,
    OUTPUT_FORMAT_REQUIREMENT,
    SELECTION_PRINCIPLES,
    build_prompt,
)
from .selector import (
    FAILURE_REASONS,
    REQUIRED_FIELDS,
    WORD_LIMIT,
    AttemptLog,
    SelectionExhausted,
    ValidationFailure,
    extract_selection,
    select_opponent,
    validate,
)

__all__ = [
    "ENTROPY_UNDEFINED",
    "BenchmarkReport",
    "RunRecord",
    "benchmark_client",
    "benchmark_fixture_set",
    "benchmark_texts",
    "evaluate_response",
    "shannon_entropy_bits",
    "HTTPChatClient",
    "LLMClientConfig",
    "LLMClientError",
    "MockClient",
    "PromptTooLarge",
    "ScriptedClient",
    "TransportHTTPError",
    "TransportTimeout",
    "bundled_fixture_dir",
    "load_fixture_texts",
    "ParsedOutput",
    "parse_output",
    "scan_json_objects",
    "strip_think_tags",
    "BASE_TEMPLATE",
    "ICL_EXAMPLE_FULL",
    "ICL_EXAMPLE_SIMPLIFIED",
    "ICL_VARIANTS",
    "OUTPUT_FORMAT_REQUIREMENT",
    "SELECTION_PRINCIPLES",
    "build_prompt",
    "FAILURE_REASONS",
    "REQUIRED_FIELDS",
    "WORD_LIMIT",
    "AttemptLog",
    "SelectionExhausted",
    "ValidationFailure",
    "extract_selection",
    "select_opponent",
    "validate",
]
