"""Two-tier fighting-game agent toolkit: a deterministic environment,
style-profiled PPO fighters, and an LLM-driven opponent selector."""

__version__ = "0.1.0"
