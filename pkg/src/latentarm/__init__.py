"""Latent-action teleoperation for a planar arm.

The pipeline: an intrinsically motivated agent explores an environment
without task rewards (`sac`, `entropy`), its rollouts are embedded into a
low-dimensional latent action space (`latent`), and the resulting decoder
drives either a simulated operator (`operator`) or a live joystick session
(`session`, `server`). Environments live in `envs`, the shared numerics in
`nn` and `kinematics`, orchestration in `cli` and `config`.
"""

from .envs import (
    ArmSpec,
    EnvSpec,
    ObjectSpec,
    WorldState,
    get_env,
    load_env_file,
    registry,
    reset,
    resolve_env,
    rollout,
    step,
    task_complete,
)
from .entropy import ObjectStateBuffer, intrinsic_reward
from .errors import ContractViolation, NonFiniteError, NotFound
from .latent import (
    AeParams,
    Dataset,
    LatentPolicy,
    collect,
    decode,
    encode,
    load_dataset,
    load_policy,
    partition_dataset,
    reconstruction_error,
    save_dataset,
    save_policy,
    train_autoencoder,
)
from .nn import Adam, Network
from .operator import (
    GoalSpec,
    EvalResult,
    add_noise,
    default_goals,
    greedy_control,
    random_control,
    run_benchmark,
    synth_demos,
)
from .sac import ReplayBuffer, SacAgent, SacParams, Transition, load_agent, save_agent, train
from .session import (
    TeleopSession,
    consistency,
    metrics_from_trace,
    replay_session,
    save_trace,
    load_trace,
    session_report,
)
from .config import RunConfig, load_config, parse_config

__version__ = "0.1.0"

__all__ = [
    "ArmSpec",
    "EnvSpec",
    "ObjectSpec",
    "WorldState",
    "get_env",
    "load_env_file",
    "registry",
    "reset",
    "resolve_env",
    "rollout",
    "step",
    "task_complete",
    "ObjectStateBuffer",
    "intrinsic_reward",
    "ContractViolation",
    "NonFiniteError",
    "NotFound",
    "AeParams",
    "Dataset",
    "LatentPolicy",
    "collect",
    "decode",
    "encode",
    "load_dataset",
    "load_policy",
    "partition_dataset",
    "reconstruction_error",
    "save_dataset",
    "save_policy",
    "train_autoencoder",
    "Adam",
    "Network",
    "GoalSpec",
    "EvalResult",
    "add_noise",
    "default_goals",
    "greedy_control",
    "random_control",
    "run_benchmark",
    "synth_demos",
    "ReplayBuffer",
    "SacAgent",
    "SacParams",
    "Transition",
    "load_agent",
    "save_agent",
    "train",
    "TeleopSession",
    "consistency",
    "metrics_from_trace",
    "replay_session",
    "save_trace",
    "load_trace",
    "session_report",
    "RunConfig",
    "load_config",
    "parse_config",
    "__version__",
]
