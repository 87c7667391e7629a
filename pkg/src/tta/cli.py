"""Command-line entry points.

Subcommands cover the whole pipeline: train profiles, inspect reward tables,
manage the agent archive, benchmark the selection LLM, run evaluations, and
serve the session API.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

DEFAULT_BENCH_RUNS = 20
EVAL_AGENT_HELP = (
    "agent spec: 'ckpt:<path>', 'builtin:<level>', 'random', or 'noop'"
)


def _print_json(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _make_agent(spec: str):
    from .eval.agents import BuiltinAgent, NoopAgent, PolicyAgent, RandomAgent
    from .policy import load_checkpoint

    if spec == "random":
        return RandomAgent()
    if spec == "noop":
        return NoopAgent()
    if spec.startswith("builtin:"):
        return BuiltinAgent(level=int(spec.split(":", 1)[1]))
    if spec.startswith("ckpt:"):
        path = spec.split(":", 1)[1]
        net, _ = load_checkpoint(path)
        return PolicyAgent(net, name=Path(path).stem)
    raise SystemExit(f"unrecognized agent spec {spec!r} ({EVAL_AGENT_HELP})")


def cmd_train(args) -> int:
    from .training import HybridSchedule, PPOConfig, train

    schedule = HybridSchedule()
    config = PPOConfig()
    train(
        args.profile,
        schedule,
        config,
        total_iterations=args.iterations,
        out_dir=args.out,
        seed=args.seed,
        cnn_arch=args.cnn_arch,
        resume=args.resume,
    )
    return 0


def cmd_reward_show(args) -> int:
    from .rewards import load_profile

    terms = load_profile(args.profile)
    width = max(len(k) for k in terms.to_dict())
    for key, value in terms.to_dict().items():
        print(f"{key:<{width}}  {value:g}")
    return 0


def cmd_archive_register(args) -> int:
    from .archive import AgentArchive
    from .policy import load_checkpoint

    archive = AgentArchive(args.root)
    _, meta = load_checkpoint(args.checkpoint)
    summary = meta.get("eval_summary")
    if args.win_rate is not None:
        summary = dict(summary or {})
        summary["win_rate_vs_builtin"] = args.win_rate
    if not summary:
        raise SystemExit(
            "checkpoint carries no eval summary; pass --win-rate to supply one"
        )
    record = archive.register(args.checkpoint, args.type, summary)
    archive.save()
    print(f"registered {record.model_path} ({record.difficulty_score})")
    return 0


def cmd_archive_list(args) -> int:
    from .archive import AgentArchive

    _print_json(AgentArchive(args.root).manifest(), args.out)
    return 0


def cmd_archive_lint(args) -> int:
    from .archive import AgentArchive

    problems = AgentArchive(args.root).lint()
    for problem in problems:
        print(problem)
    if not problems:
        print("archive clean")
    return 1 if problems else 0


def cmd_llm_bench(args) -> int:
    from .hyperagent import (
        HTTPChatClient,
        LLMClientConfig,
        benchmark_client,
        benchmark_fixture_set,
        benchmark_texts,
        build_prompt,
        load_fixture_texts,
    )

    if args.endpoint:
        from .archive import AgentArchive
        from .env.characters import roster_names
        from .manager import new_playing_data

        if not args.archive:
            raise SystemExit("--endpoint mode needs --archive for prompt assembly")
        archive = AgentArchive(args.archive)
        playing_data = new_playing_data(
            roster_names(archive.roster)[0], roster_names(archive.roster)
        )
        prompt = build_prompt(playing_data.to_dict(), archive.manifest())
        config = LLMClientConfig(endpoint=args.endpoint, model=args.model)
        client = HTTPChatClient(config)
        report = benchmark_client(client, prompt, config, n=args.n)
    elif args.fixture_set:
        texts = load_fixture_texts(args.fixture_set)
        names = sorted(texts)[: args.n]
        report = benchmark_texts([texts[n] for n in names], names=names)
    else:
        report = benchmark_fixture_set()

    _print_json(report.to_dict(), args.out)
    return 0


def cmd_eval_h2h(args) -> int:
    from .eval.harness import run_series

    chars = [int(c) for c in args.chars.split(",")]
    report = run_series(
        _make_agent(args.agent_a), _make_agent(args.agent_b), chars,
        matches_per_pairing=args.matches_per_pairing, seed=args.seed,
    )
    doc = {
        "n_matches": report.n_matches,
        "wins_a": report.wins_a,
        "wins_b": report.wins_b,
        "draws": report.draws,
        "win_rate": report.win_rate,
    }
    _print_json(doc, args.out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["match", "character", "side_of_a", "winner",
                             "specials_a", "specials_b", "mean_distance_norm",
                             "round_frames"])
            for i, m in enumerate(report.matches):
                writer.writerow([
                    i, m.character, m.side_of_a, m.winner,
                    m.special_moves[m.side_of_a], m.special_moves[1 - m.side_of_a],
                    m.mean_distance_norm, m.round_frames,
                ])
    return 0


def cmd_eval_special_moves(args) -> int:
    from .eval.harness import special_moves_per_round

    opponents = [_make_agent(s) for s in args.opponents.split(",")]
    mean = special_moves_per_round(
        _make_agent(args.agent), opponents, args.rounds, seed=args.seed
    )
    _print_json({"special_moves_per_round": mean, "rounds": args.rounds}, args.out)
    return 0


def cmd_eval_behavior(args) -> int:
    from .eval.harness import behavior_metrics

    opponents = [_make_agent(s) for s in args.opponents.split(",")]
    metrics = behavior_metrics(
        _make_agent(args.agent), opponents, args.rounds, seed=args.seed
    )
    metrics["rounds"] = args.rounds
    _print_json(metrics, args.out)
    return 0


def cmd_eval_score(args) -> int:
    from .eval.questionnaire import score_questionnaire

    _print_json(score_questionnaire(args.responses).to_dict(), args.out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .archive import AgentArchive
    from .manager import GameManager, SessionStore
    from .manager.service import create_app

    archive = AgentArchive(args.archive)
    store = SessionStore(args.store) if args.store else None
    llm_client = None
    llm_config = None
    if args.llm_endpoint:
        from .hyperagent import HTTPChatClient, LLMClientConfig

        llm_config = LLMClientConfig(endpoint=args.llm_endpoint, model=args.llm_model)
        llm_client = HTTPChatClient(llm_config)
    manager = GameManager(
        archive, store=store, llm_client=llm_client, llm_config=llm_config
    )
    app = create_app(manager, tick_hz=args.tick_hz)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tta",
        description="Style-diverse fighting-game agents with LLM opponent selection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one behaviour profile")
    p.add_argument("--profile", required=True)
    p.add_argument("--iterations", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--cnn-arch", default="small", choices=("small", "resnet18"))
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("reward", help="inspect reward profiles")
    rsub = p.add_subparsers(dest="reward_command", required=True)
    rp = rsub.add_parser("show", help="print the resolved term table")
    rp.add_argument("profile", help="built-in profile name or profile file path")
    rp.set_defaults(func=cmd_reward_show)

    p = sub.add_parser("archive", help="manage the agent archive")
    asub = p.add_subparsers(dest="archive_command", required=True)
    ap = asub.add_parser("register", help="add a checkpoint to the archive")
    ap.add_argument("root", help="archive directory")
    ap.add_argument("checkpoint", help="checkpoint file to register")
    ap.add_argument("--type", required=True, dest="type")
    ap.add_argument("--win-rate", type=float, default=None,
                    help="override the stored evaluation win rate")
    ap.set_defaults(func=cmd_archive_register)
    ap = asub.add_parser("list", help="print the archive manifest")
    ap.add_argument("root")
    ap.add_argument("--out")
    ap.set_defaults(func=cmd_archive_list)
    ap = asub.add_parser("lint", help="check archive consistency")
    ap.add_argument("root")
    ap.set_defaults(func=cmd_archive_lint)

    p = sub.add_parser("llm-bench", help="benchmark selection-output quality")
    p.add_argument("--n", type=int, default=DEFAULT_BENCH_RUNS)
    p.add_argument("--fixture-set", help="directory of canned responses")
    p.add_argument("--endpoint", help="chat-completions endpoint URL")
    p.add_argument("--model", default="")
    p.add_argument("--archive", help="archive root (endpoint mode)")
    p.add_argument("--out", help="write the report JSON here")
    p.set_defaults(func=cmd_llm_bench)

    p = sub.add_parser("eval", help="run evaluations")
    esub = p.add_subparsers(dest="eval_command", required=True)
    ep = esub.add_parser("h2h", help="head-to-head mirror series")
    ep.add_argument("--agent-a", required=True, help=EVAL_AGENT_HELP)
    ep.add_argument("--agent-b", required=True, help=EVAL_AGENT_HELP)
    ep.add_argument("--chars", default="0,1,2,3")
    ep.add_argument("--matches-per-pairing", type=int, default=3)
    ep.add_argument("--seed", type=int, default=0)
    ep.add_argument("--out")
    ep.add_argument("--csv", help="also write per-match plot data")
    ep.set_defaults(func=cmd_eval_h2h)
    ep = esub.add_parser("special-moves", help="specials per round")
    ep.add_argument("--agent", required=True, help=EVAL_AGENT_HELP)
    ep.add_argument("--opponents", default="builtin:1")
    ep.add_argument("--rounds", type=int, default=8)
    ep.add_argument("--seed", type=int, default=0)
    ep.add_argument("--out")
    ep.set_defaults(func=cmd_eval_special_moves)
    ep = esub.add_parser("behavior", help="distance and projectile metrics")
    ep.add_argument("--agent", required=True, help=EVAL_AGENT_HELP)
    ep.add_argument("--opponents", default="builtin:1")
    ep.add_argument("--rounds", type=int, default=8)
    ep.add_argument("--seed", type=int, default=0)
    ep.add_argument("--out")
    ep.set_defaults(func=cmd_eval_behavior)
    ep = esub.add_parser("score", help="score a questionnaire file")
    ep.add_argument("responses")
    ep.add_argument("--out")
    ep.set_defaults(func=cmd_eval_score)

    p = sub.add_parser("serve", help="run the session service")
    p.add_argument("--archive", required=True)
    p.add_argument("--store", help="session database file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--tick-hz", type=float, default=15.0)
    p.add_argument("--llm-endpoint", help="enable llm selection mode")
    p.add_argument("--llm-model", default="")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
