"""Run configuration: one YAML file drives the whole pipeline.

The schema is versioned and strict: unknown keys anywhere in the tree are
rejected so typos fail loudly instead of silently running defaults. Every
section has complete defaults, so the minimal config is just an env name.
"""

from __future__ import annotations

import copy
import dataclasses
import os
from dataclasses import dataclass
from typing import Optional

import yaml

from .envs import resolve_env
from .errors import ContractViolation
from .latent import AeParams
from .sac import SacParams

CONFIG_VERSION = 1

# Object grouping per latent space when an env trains more than one decoder
# and the config does not say otherwise. Transitions are assigned to groups
# by nearest object, so each group should collect one family of motions.
DEFAULT_GROUPS = {
    "declutter": (("clutter0", "clutter1", "bowl"), ("container", "bin")),
}


@dataclass(frozen=True)
class CollectConfig:
    episodes: int = 70


@dataclass(frozen=True)
class DemoConfig:
    teleop_episodes: int = 82
    kinesthetic_episodes: int = 118
    goals: int = 20


@dataclass(frozen=True)
class EvalConfig:
    goals: int = 20
    repetitions: int = 1
    grid_points: int = 21
    tolerance: float = 0.03
    step_budget: int = 150
    conditions: tuple = (("ours", "unsupervised", 0.0),)


@dataclass(frozen=True)
class ServiceConfig:
    port: int = 8765
    tick_rate: float = 20.0
    deadzone: float = 0.05
    ee_speed: float = 0.25
    tilt_rate: float = 1.5
    mode: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    env: str = "opening"
    seed: int = 0
    out_dir: str = "runs/latest"
    groups: Optional[tuple] = None
    sac: SacParams = dataclasses.field(default_factory=SacParams)
    ae: AeParams = dataclasses.field(default_factory=AeParams)
    collect: CollectConfig = dataclasses.field(default_factory=CollectConfig)
    demos: DemoConfig = dataclasses.field(default_factory=DemoConfig)
    eval: EvalConfig = dataclasses.field(default_factory=EvalConfig)
    service: ServiceConfig = dataclasses.field(default_factory=ServiceConfig)
    source_path: Optional[str] = None


_SAC_KEYS = {
    "episodes",
    "gamma",
    "tau",
    "lr",
    "batch_size",
    "replay_capacity",
    "warmup_steps",
    "updates_per_step",
    "hidden",
    "knn_k",
    "state_buffer_capacity",
    "epsilon",
    "state_scale",
    "log_every_episodes",
}
_AE_KEYS = {"epochs", "batch_size", "lr", "holdout_fraction", "hidden"}


def _section(raw: dict, name: str, allowed: set) -> dict:
    sub = raw.pop(name, {}) or {}
    if not isinstance(sub, dict):
        raise ContractViolation(f"config section {name!r} must be a mapping")
    unknown = set(sub) - allowed
    if unknown:
        raise ContractViolation(
            f"unknown key(s) in {name!r}: {', '.join(sorted(unknown))}"
        )
    return sub


def _tupled(value):
    if isinstance(value, list):
        return tuple(_tupled(v) for v in value)
    return value


def _parse_conditions(raw) -> tuple:
    conditions = []
    names = set()
    for item in raw:
        if not isinstance(item, dict):
            raise ContractViolation("each eval condition must be a mapping")
        unknown = set(item) - {"name", "source", "sigma"}
        if unknown:
            raise ContractViolation(
                f"unknown key(s) in eval condition: {', '.join(sorted(unknown))}"
            )
        name = item.get("name")
        source = item.get("source")
        sigma = float(item.get("sigma", 0.0))
        if not name or name in names:
            raise ContractViolation("eval conditions need unique names")
        names.add(name)
        if source not in ("unsupervised", "teleop", "kinesthetic"):
            raise ContractViolation(
                f"condition {name!r}: source must be unsupervised, teleop "
                f"or kinesthetic, got {source!r}"
            )
        if sigma < 0:
            raise ContractViolation(f"condition {name!r}: sigma must be >= 0")
        conditions.append((name, source, sigma))
    if not conditions:
        raise ContractViolation("eval.conditions must not be empty")
    return tuple(conditions)


def parse_config(raw: dict, source_path: Optional[str] = None) -> RunConfig:
    """Validate a config mapping against the versioned schema."""
    if not isinstance(raw, dict):
        raise ContractViolation("config must be a mapping")
    raw = copy.deepcopy(raw)  # sections are reshaped in place below
    version = raw.pop("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ContractViolation(f"unsupported config version {version!r}")

    sac_raw = _section(raw, "sac", _SAC_KEYS)
    ae_raw = _section(raw, "autoencoder", _AE_KEYS)
    collect_raw = _section(raw, "collect", {"episodes"})
    demos_raw = _section(
        raw, "demos", {"teleop_episodes", "kinesthetic_episodes", "goals"}
    )
    eval_raw = _section(
        raw,
        "eval",
        {"goals", "repetitions", "grid_points", "tolerance", "step_budget", "conditions"},
    )
    service_raw = _section(
        raw, "service", {"port", "tick_rate", "deadzone", "ee_speed", "tilt_rate", "mode"}
    )

    top_allowed = {"env", "seed", "out_dir", "groups"}
    unknown = set(raw) - top_allowed
    if unknown:
        raise ContractViolation(f"unknown config key(s): {', '.join(sorted(unknown))}")

    env = raw.get("env", "opening")
    seed = int(raw.get("seed", 0))
    out_dir = str(raw.get("out_dir", "runs/latest"))
    groups = raw.get("groups")
    if groups is not None:
        groups = _tupled(groups)

    if "hidden" in sac_raw:
        sac_raw["hidden"] = tuple(sac_raw["hidden"])
    if "state_scale" in sac_raw and sac_raw["state_scale"] is not None:
        sac_raw["state_scale"] = tuple(sac_raw["state_scale"])
    if "hidden" in ae_raw:
        ae_raw["hidden"] = tuple(ae_raw["hidden"])
    if "conditions" in eval_raw:
        eval_raw["conditions"] = _parse_conditions(eval_raw["conditions"])

    sac = SacParams(seed=seed, **sac_raw)
    ae = AeParams(seed=seed, split_seed=seed, **ae_raw)

    cfg = RunConfig(
        env=env,
        seed=seed,
        out_dir=out_dir,
        groups=groups,
        sac=sac,
        ae=ae,
        collect=CollectConfig(**collect_raw),
        demos=DemoConfig(**demos_raw),
        eval=EvalConfig(**eval_raw),
        service=ServiceConfig(**service_raw),
        source_path=source_path,
    )
    resolve_env(cfg.env)  # referenced files must exist at load time
    return cfg


def load_config(path: str) -> RunConfig:
    if not os.path.exists(path):
        raise ContractViolation(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    return parse_config(raw, source_path=os.path.abspath(path))


def default_groups(cfg: RunConfig, env) -> tuple:
    """Object-name groups, one per latent space.

    Single-space envs get one group holding every object. Multi-space envs
    need an explicit grouping, either from the config or the built-in table.
    """
    if cfg.groups is not None:
        groups = cfg.groups
    elif env.latent_spaces == 1:
        groups = (tuple(obj.name for obj in env.objects),)
    elif env.name in DEFAULT_GROUPS:
        groups = DEFAULT_GROUPS[env.name]
    else:
        raise ContractViolation(
            f"env {env.name!r} trains {env.latent_spaces} latent spaces; "
            "set 'groups' in the config to assign objects to spaces"
        )
    if len(groups) != env.latent_spaces:
        raise ContractViolation(
            f"{len(groups)} group(s) configured, env has {env.latent_spaces} "
            "latent space(s)"
        )
    return groups


def dump_config(cfg: RunConfig) -> dict:
    """Round-trippable plain mapping of the full effective config."""

    def plain(value):
        if isinstance(value, tuple):
            return [plain(v) for v in value]
        return value

    return {
        "version": CONFIG_VERSION,
        "env": cfg.env,
        "seed": cfg.seed,
        "out_dir": cfg.out_dir,
        "groups": plain(cfg.groups),
        "sac": {
            "episodes": cfg.sac.episodes,
            "gamma": cfg.sac.gamma,
            "tau": cfg.sac.tau,
            "lr": cfg.sac.lr,
            "batch_size": cfg.sac.batch_size,
            "replay_capacity": cfg.sac.replay_capacity,
            "warmup_steps": cfg.sac.warmup_steps,
            "updates_per_step": cfg.sac.updates_per_step,
            "hidden": plain(cfg.sac.hidden),
            "knn_k": cfg.sac.knn_k,
            "state_buffer_capacity": cfg.sac.state_buffer_capacity,
            "epsilon": cfg.sac.epsilon,
            "state_scale": plain(cfg.sac.state_scale),
            "log_every_episodes": cfg.sac.log_every_episodes,
        },
        "autoencoder": {
            "epochs": cfg.ae.epochs,
            "batch_size": cfg.ae.batch_size,
            "lr": cfg.ae.lr,
            "holdout_fraction": cfg.ae.holdout_fraction,
            "hidden": plain(cfg.ae.hidden),
        },
        "collect": {"episodes": cfg.collect.episodes},
        "demos": {
            "teleop_episodes": cfg.demos.teleop_episodes,
            "kinesthetic_episodes": cfg.demos.kinesthetic_episodes,
            "goals": cfg.demos.goals,
        },
        "eval": {
            "goals": cfg.eval.goals,
            "repetitions": cfg.eval.repetitions,
            "grid_points": cfg.eval.grid_points,
            "tolerance": cfg.eval.tolerance,
            "step_budget": cfg.eval.step_budget,
            "conditions": [
                {"name": n, "source": s, "sigma": sig}
                for n, s, sig in cfg.eval.conditions
            ],
        },
        "service": {
            "port": cfg.service.port,
            "tick_rate": cfg.service.tick_rate,
            "deadzone": cfg.service.deadzone,
            "ee_speed": cfg.service.ee_speed,
            "tilt_rate": cfg.service.tilt_rate,
            "mode": cfg.service.mode,
        },
    }


def save_config(cfg: RunConfig, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        yaml.safe_dump(dump_config(cfg), fh, sort_keys=False)
    os.replace(tmp, path)


__all__ = [
    "CONFIG_VERSION",
    "CollectConfig",
    "DemoConfig",
    "EvalConfig",
    "ServiceConfig",
    "RunConfig",
    "parse_config",
    "load_config",
    "default_groups",
    "dump_config",
    "save_config",
]
