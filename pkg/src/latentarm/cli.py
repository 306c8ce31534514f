"""Command line entry point orchestrating the pipeline.

Stages write into a run directory so an experiment is self-describing:

    out_dir/
      config.yaml               effective config, written by every command
      agent/                    pre-trained agent checkpoint
      train_log.jsonl           per-episode training records
      datasets/<source>.jsonl   collected and synthesized motion data
      policies/<source>/space<i>/  trained encoder/decoder pairs
      results/results.csv       per-episode evaluation rows
      results/summary.json      per-condition aggregates
      figures/*.png             rendered alongside the delimited artifacts
      traces/session-*.jsonl    teleop session traces

Exit codes: 0 success, 1 command line usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys

from . import operator as op
from . import sac
from .config import RunConfig, default_groups, load_config, save_config
from .envs import resolve_env
from .errors import ContractViolation, NonFiniteError, NotFound
from .latent import (
    load_dataset,
    load_policy,
    partition_dataset,
    save_dataset,
    save_policy,
    train_autoencoder,
)
from .latent import collect as collect_rollouts
from .session import metrics_from_trace, load_trace

USAGE_ERROR = 1
RUNTIME_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; remap to this tool's convention."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(USAGE_ERROR)


def _load_run_config(args) -> RunConfig:
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = RunConfig()
    overrides = {}
    if getattr(args, "env", None):
        overrides["env"] = args.env
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "out", None):
        overrides["out_dir"] = args.out
    if overrides:
        import dataclasses

        cfg = dataclasses.replace(cfg, **overrides)
        if "seed" in overrides:
            cfg = dataclasses.replace(
                cfg,
                sac=dataclasses.replace(cfg.sac, seed=cfg.seed),
                ae=dataclasses.replace(cfg.ae, seed=cfg.seed, split_seed=cfg.seed),
            )
    return cfg


def _prepare_run_dir(cfg: RunConfig) -> str:
    out = cfg.out_dir
    os.makedirs(out, exist_ok=True)
    save_config(cfg, os.path.join(out, "config.yaml"))
    return out


def _dataset_path(out: str, source: str) -> str:
    return os.path.join(out, "datasets", f"{source}.jsonl")


def _require(path: str, producer: str) -> str:
    if not os.path.exists(path):
        raise ContractViolation(
            f"missing artifact {path}; run `latentarm {producer}` first"
        )
    return path


def cmd_train_diverse(args) -> int:
    cfg = _load_run_config(args)
    env = resolve_env(cfg.env)
    params = cfg.sac
    if args.episodes is not None:
        import dataclasses

        params = dataclasses.replace(params, episodes=args.episodes)
    out = _prepare_run_dir(cfg)
    agent, log = sac.train(env, params)
    sac.save_agent(agent, os.path.join(out, "agent"))
    sac.save_log(log, os.path.join(out, "train_log.jsonl"))
    if log:
        from .plots import save_train_curve

        os.makedirs(os.path.join(out, "figures"), exist_ok=True)
        save_train_curve(log, os.path.join(out, "figures", "train_curve.png"))
    print(f"trained {params.episodes} episodes on {env.name}; agent -> {out}/agent")
    return 0


def cmd_collect(args) -> int:
    cfg = _load_run_config(args)
    env = resolve_env(cfg.env)
    out = _prepare_run_dir(cfg)
    agent = sac.load_agent(_require(os.path.join(out, "agent"), "train-diverse"))
    data = collect_rollouts(
        agent, env, episodes=cfg.collect.episodes, seed=cfg.seed, source="unsupervised"
    )
    path = _dataset_path(out, "unsupervised")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    save_dataset(data, path)
    print(f"collected {len(data.states)} transitions -> {path}")
    return 0


def cmd_synth_demos(args) -> int:
    cfg = _load_run_config(args)
    env = resolve_env(cfg.env)
    out = _prepare_run_dir(cfg)
    goals = op.default_goals(env, cfg.demos.goals, seed=cfg.seed)
    os.makedirs(os.path.join(out, "datasets"), exist_ok=True)
    for style, episodes in (
        ("teleop", cfg.demos.teleop_episodes),
        ("kinesthetic", cfg.demos.kinesthetic_episodes),
    ):
        data = op.synth_demos(env, style, goals, seed=cfg.seed, episodes=episodes)
        path = _dataset_path(out, style)
        save_dataset(data, path)
        print(f"{style}: {len(data.states)} transitions -> {path}")
    return 0


def cmd_embed(args) -> int:
    cfg = _load_run_config(args)
    env = resolve_env(cfg.env)
    out = _prepare_run_dir(cfg)
    source = args.source
    data = load_dataset(_require(_dataset_path(out, source),
                                 "collect" if source == "unsupervised" else "synth-demos"))
    groups = default_groups(cfg, env)
    parts = partition_dataset(data, env, groups) if len(groups) > 1 else [data]
    curves = {}
    for i, part in enumerate(parts):
        lp, curve = train_autoencoder(part, env.latent_dim, env, cfg.ae)
        space_dir = os.path.join(out, "policies", source, f"space{i}")
        save_policy(lp, space_dir)
        curves[f"space{i}"] = curve
        print(
            f"space {i}: {len(part.states)} transitions, "
            f"holdout loss {curve[-1]['holdout_loss']:.6f} -> {space_dir}"
        )
    from .plots import save_ae_curves

    os.makedirs(os.path.join(out, "figures"), exist_ok=True)
    save_ae_curves(curves, os.path.join(out, "figures", f"ae_{source}.png"))
    return 0


def cmd_eval(args) -> int:
    cfg = _load_run_config(args)
    env = resolve_env(cfg.env)
    out = _prepare_run_dir(cfg)
    conditions = []
    for name, source, sigma in cfg.eval.conditions:
        producer = "collect" if source == "unsupervised" else "synth-demos"
        data = load_dataset(_require(_dataset_path(out, source), producer))
        conditions.append({"name": name, "data": data, "sigma": sigma})
    goals = op.default_goals(env, cfg.eval.goals, seed=cfg.seed)
    rows, summary = op.run_benchmark(
        env,
        conditions,
        goals,
        repetitions=cfg.eval.repetitions,
        seed=cfg.seed,
        ae_params=cfg.ae,
        grid_points=cfg.eval.grid_points,
    )
    os.makedirs(os.path.join(out, "results"), exist_ok=True)
    op.save_results(rows, os.path.join(out, "results", "results.csv"))
    with open(os.path.join(out, "results", "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
    from .plots import save_result_bars

    os.makedirs(os.path.join(out, "figures"), exist_ok=True)
    save_result_bars(summary, os.path.join(out, "figures", "results.png"))
    width = max(len(rec["condition"]) for rec in summary)
    print(f"{'condition'.ljust(width)}  mean_error  sd_error  episodes")
    for rec in summary:
        print(
            f"{rec['condition'].ljust(width)}  {rec['mean_error']:.6f}    "
            f"{rec['sd_error']:.6f}  {rec['episodes']}"
        )
    return 0


def cmd_serve(args) -> int:
    cfg = _load_run_config(args)
    env = resolve_env(cfg.env)
    out = _prepare_run_dir(cfg)
    import dataclasses

    service = cfg.service
    if args.port is not None:
        service = dataclasses.replace(service, port=args.port)
    if args.tick_rate is not None:
        service = dataclasses.replace(service, tick_rate=args.tick_rate)
    if args.mode is not None:
        service = dataclasses.replace(service, mode=args.mode)

    if args.policy:
        policy_dirs = args.policy
    else:
        pattern = os.path.join(out, "policies", "unsupervised", "space*")
        policy_dirs = sorted(glob.glob(pattern))
    policies = [load_policy(d) for d in policy_dirs]
    if not policies and (service.mode or "latent:0").startswith("latent:"):
        raise ContractViolation(
            "no decoder found; pass --policy or switch to --mode ee:linear"
        )
    from .server import run_server

    print(
        f"serving {env.name} on port {service.port} "
        f"({len(policies)} latent space(s)); Ctrl-C to stop"
    )
    run_server(
        env,
        policies,
        service,
        trace_dir=os.path.join(out, "traces"),
        seed=cfg.seed,
    )
    return 0


def cmd_metrics(args) -> int:
    import numpy as np

    from .plots import save_session_metrics

    for path in args.trace:
        _require(path, "serve")
        report = metrics_from_trace(path)
        print(json.dumps({"trace": path, **report}))
        if not args.no_plot:
            header, records = load_trace(path)
            inputs = []
            for rec in records:
                u = np.clip(np.asarray(rec["u"], dtype=float), -1.0, 1.0)
                inputs.append(
                    u if np.linalg.norm(u) > header["deadzone"] else np.zeros(2)
                )
            fig_path = os.path.splitext(path)[0] + "_metrics.png"
            save_session_metrics(report, inputs, fig_path)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="latentarm", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML run config")
        p.add_argument("--env", help="environment name or env file")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--out", help="run directory override")

    p = sub.add_parser("train-diverse", help="pre-train the exploration agent")
    common(p)
    p.add_argument("--episodes", type=int, help="episode count override")
    p.set_defaults(fn=cmd_train_diverse)

    p = sub.add_parser("collect", help="roll out the trained agent into a dataset")
    common(p)
    p.set_defaults(fn=cmd_collect)

    p = sub.add_parser("synth-demos", help="generate scripted demonstration datasets")
    common(p)
    p.set_defaults(fn=cmd_synth_demos)

    p = sub.add_parser("embed", help="train the latent-action decoder(s)")
    common(p)
    p.add_argument(
        "--source",
        default="unsupervised",
        choices=("unsupervised", "teleop", "kinesthetic"),
        help="which dataset to embed",
    )
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("eval", help="benchmark greedy control per condition")
    common(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("serve", help="run the live teleop service")
    common(p)
    p.add_argument("--policy", action="append", help="decoder dir (repeat per space)")
    p.add_argument("--port", type=int, help="listen port override")
    p.add_argument("--tick-rate", type=float, dest="tick_rate", help="ticks per second")
    p.add_argument("--mode", help="initial mode (latent:<i>, ee:linear, ee:rotational)")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("metrics", help="recompute session metrics from trace files")
    p.add_argument("trace", nargs="+", help="session trace file(s)")
    p.add_argument("--no-plot", action="store_true", help="skip the figure")
    p.set_defaults(fn=cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ContractViolation, NotFound, NonFiniteError, OSError) as exc:
        print(f"latentarm: error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
