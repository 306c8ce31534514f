"""Latent action spaces: dataset collection, the state-conditioned
autoencoder, and the trained decoder used by operators and the live service.

The encoder maps normalized (state, action) to z = tanh(head) in (-1,1)^d;
the decoder maps (z, normalized state) back to an action. Training minimizes
the squared action reconstruction error in raw action units.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from . import envs as envmod
from .envs import EnvSpec, WorldState
from .errors import ContractViolation
from .kinematics import forward_kinematics
from .nn import Adam, Network, load_network, save_network

SOURCES = ("unsupervised", "teleop-demo", "kinesthetic-demo", "seeded")


@dataclass
class Dataset:
    """Flat (state, action) pairs from one environment."""

    env_name: str
    source: str
    states: np.ndarray
    actions: np.ndarray

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ContractViolation(f"unknown dataset source {self.source!r}")
        self.states = np.asarray(self.states, dtype=float)
        self.actions = np.asarray(self.actions, dtype=float)
        if self.states.ndim != 2 or self.actions.ndim != 2:
            raise ContractViolation("states and actions must be 2-D arrays")
        if len(self.states) != len(self.actions):
            raise ContractViolation("states and actions must align row-wise")

    def __len__(self) -> int:
        return len(self.states)


def collect(
    agent,
    env: EnvSpec,
    episodes: int,
    seed: int,
    source: str = "unsupervised",
) -> Dataset:
    """Roll out a stochastic policy and concatenate all (s, a) pairs.

    ``agent`` is either a SacAgent-like object (sample_action_with) or a
    callable (flat_state, rng) -> action. Reset seeds and action noise come
    from one generator, so the same seed always yields the same dataset.
    """
    if episodes < 1:
        raise ContractViolation("episodes must be >= 1")
    rng = np.random.default_rng(seed)
    if callable(agent):
        sampler = agent
    else:
        sampler = agent.sample_action_with
    all_s, all_a = [], []
    for _ in range(episodes):
        reset_seed = int(rng.integers(0, 2**63 - 1))
        states, actions = envmod.rollout(
            env, lambda flat: sampler(flat, rng), reset_seed
        )
        all_s.extend(st.flat() for st in states[:-1])
        all_a.extend(actions)
    return Dataset(env.name, source, np.array(all_s), np.array(all_a))


DATASET_FORMAT = "latentarm-dataset"


def save_dataset(data: Dataset, path) -> None:
    """Line-delimited records; first line is the header, then one JSON object
    per (s, a) pair. Float repr round-trips, so load(save(x)) == x exactly."""
    header = {
        "format": DATASET_FORMAT,
        "version": 1,
        "env": data.env_name,
        "source": data.source,
        "state_dim": int(data.states.shape[1]),
        "action_dim": int(data.actions.shape[1]),
        "count": len(data),
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for s, a in zip(data.states, data.actions):
            fh.write(json.dumps({"s": s.tolist(), "a": a.tolist()}) + "\n")
    os.replace(tmp, path)


def load_dataset(path) -> Dataset:
    with open(path) as fh:
        header = json.loads(fh.readline())
        if header.get("format") != DATASET_FORMAT or header.get("version") != 1:
            raise ContractViolation(f"{path}: not a recognized dataset file")
        states, actions = [], []
        for line in fh:
            rec = json.loads(line)
            states.append(rec["s"])
            actions.append(rec["a"])
    if len(states) != header["count"]:
        raise ContractViolation(f"{path}: record count does not match header")
    return Dataset(header["env"], header["source"],
                   np.array(states), np.array(actions))


@dataclass
class LatentPolicy:
    """Trained encoder/decoder pair plus the frozen normalization stats."""

    encoder: Network
    decoder: Network
    latent_dim: int
    n_actions: int
    max_action: float
    s_mean: np.ndarray
    s_scale: np.ndarray
    a_mean: np.ndarray
    a_scale: np.ndarray
    env_name: str = ""

    def __post_init__(self):
        if not 1 <= self.latent_dim < self.n_actions:
            raise ContractViolation(
                f"latent dim {self.latent_dim} must satisfy 1 <= d < {self.n_actions}"
            )
        if self.encoder.out_dim != self.latent_dim:
            raise ContractViolation("encoder output width must equal latent dim")
        if self.decoder.in_dim != self.latent_dim + len(self.s_mean):
            raise ContractViolation("decoder input width must be d + state width")


def norm_state(lp: LatentPolicy, flat: np.ndarray) -> np.ndarray:
    return (flat - lp.s_mean) / lp.s_scale


def encode(lp: LatentPolicy, flat_state: np.ndarray, action: np.ndarray) -> np.ndarray:
    """z = tanh(encoder(s, a)), always inside (-1, 1)^d."""
    s_n = norm_state(lp, np.asarray(flat_state, dtype=float))
    a_n = (np.asarray(action, dtype=float) - lp.a_mean) / lp.a_scale
    return np.tanh(lp.encoder.forward(np.concatenate([s_n, a_n], axis=-1)))


def decode_batch(lp: LatentPolicy, zs: np.ndarray, flat_state: np.ndarray) -> np.ndarray:
    """Decode many latent vectors against one state; rows are z candidates."""
    zs = np.asarray(zs, dtype=float)
    s_n = norm_state(lp, np.asarray(flat_state, dtype=float))
    dec_in = np.concatenate([zs, np.broadcast_to(s_n, (len(zs), len(s_n)))], axis=1)
    out = lp.decoder.forward(dec_in)
    act = out * lp.a_scale + lp.a_mean
    return np.clip(act, -lp.max_action, lp.max_action)


def decode_ex(
    lp: LatentPolicy, z: np.ndarray, state: Union[WorldState, np.ndarray]
) -> tuple[np.ndarray, bool]:
    """Decode one latent input. Out-of-range z is clipped and flagged, since
    physical joysticks saturate rather than fail."""
    z = np.asarray(z, dtype=float)
    if z.shape != (lp.latent_dim,):
        raise ContractViolation(
            f"latent input has shape {z.shape}, expected ({lp.latent_dim},)"
        )
    clipped = bool(np.any(np.abs(z) > 1.0))
    z = np.clip(z, -1.0, 1.0)
    flat = state.flat() if isinstance(state, WorldState) else np.asarray(state, float)
    return decode_batch(lp, z[None, :], flat)[0], clipped


def decode(lp: LatentPolicy, z: np.ndarray, state) -> np.ndarray:
    action, _ = decode_ex(lp, z, state)
    return action


def reconstruction_error(lp: LatentPolicy, data: Dataset) -> float:
    """Mean squared action reconstruction error over a dataset."""
    if len(data) == 0:
        raise ContractViolation("cannot evaluate on an empty dataset")
    s_n = norm_state(lp, data.states)
    a_n = (data.actions - lp.a_mean) / lp.a_scale
    z = np.tanh(lp.encoder.forward(np.concatenate([s_n, a_n], axis=1)))
    out = lp.decoder.forward(np.concatenate([z, s_n], axis=1))
    act = np.clip(out * lp.a_scale + lp.a_mean, -lp.max_action, lp.max_action)
    err = act - data.actions
    return float(np.mean(np.sum(err * err, axis=1)))


def constant_mean_error(train: Dataset, held: Dataset) -> float:
    """Baseline: always predict the training-set mean action."""
    mean_a = train.actions.mean(axis=0)
    err = held.actions - mean_a
    return float(np.mean(np.sum(err * err, axis=1)))


@dataclass
class AeParams:
    epochs: int = 200
    batch_size: int = 256
    lr: float = 3e-4
    holdout_fraction: float = 0.1
    split_seed: int = 0
    hidden: tuple[int, int] = (64, 64)
    seed: int = 0


def holdout_split(n: int, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic train/holdout index split shared by training and tests."""
    perm = np.random.default_rng(seed).permutation(n)
    n_hold = max(1, int(round(n * fraction))) if n > 1 else 0
    return perm[n_hold:], perm[:n_hold]


def subset(data: Dataset, idx: np.ndarray) -> Dataset:
    return Dataset(data.env_name, data.source, data.states[idx], data.actions[idx])


def train_autoencoder(
    data: Dataset, d: int, env: EnvSpec, params: Optional[AeParams] = None
) -> tuple[LatentPolicy, list[dict]]:
    """Minibatch gradient descent on the action reconstruction loss.

    Returns the trained LatentPolicy and a per-epoch loss curve (train and
    holdout mean squared error, raw action units).
    """
    params = params or AeParams()
    if len(data) == 0:
        raise ContractViolation("cannot train on an empty dataset")
    n_act = data.actions.shape[1]
    if not 1 <= d < n_act:
        raise ContractViolation(f"latent dim {d} must satisfy 1 <= d < {n_act}")
    if data.states.shape[1] != env.obs_dim or n_act != env.n_actions:
        raise ContractViolation("dataset dimensions do not match environment")

    s_mean = data.states.mean(axis=0)
    s_scale = np.maximum(data.states.std(axis=0), 1e-6)
    a_mean = data.actions.mean(axis=0)
    a_scale = np.maximum(data.actions.std(axis=0), 1e-6)

    obs_dim = data.states.shape[1]
    h = list(params.hidden)
    acts = ["tanh"] * len(h) + ["identity"]
    encoder = Network([obs_dim + n_act] + h + [d], acts, params.seed)
    decoder = Network([d + obs_dim] + h + [n_act], acts, params.seed + 1)
    enc_opt = Adam(encoder.parameters(), lr=params.lr)
    dec_opt = Adam(decoder.parameters(), lr=params.lr)

    lp = LatentPolicy(encoder, decoder, d, n_act, env.arm.max_joint_speed,
                      s_mean, s_scale, a_mean, a_scale, env.name)

    train_idx, hold_idx = holdout_split(len(data), params.holdout_fraction,
                                        params.split_seed)
    s_tr = (data.states[train_idx] - s_mean) / s_scale
    a_raw = data.actions[train_idx]
    a_tr = (a_raw - a_mean) / a_scale
    held = subset(data, hold_idx) if len(hold_idx) else None

    rng = np.random.default_rng(params.seed + 2)
    curve: list[dict] = []
    n_train = len(train_idx)
    for epoch in range(params.epochs):
        order = rng.permutation(n_train)
        epoch_loss = 0.0
        for at in range(0, n_train, params.batch_size):
            idx = order[at: at + params.batch_size]
            s_b, a_b, a_raw_b = s_tr[idx], a_tr[idx], a_raw[idx]
            b = len(idx)
            enc_in = np.concatenate([s_b, a_b], axis=1)
            enc_out = encoder.forward(enc_in)
            z = np.tanh(enc_out)
            dec_in = np.concatenate([z, s_b], axis=1)
            dec_out = decoder.forward(dec_in)
            pred = dec_out * a_scale + a_mean
            err = pred - a_raw_b
            epoch_loss += float(np.sum(err * err))
            up_dec = 2.0 * err * a_scale / b
            dec_grads, dec_in_grad = decoder.backward(dec_in, up_dec)
            up_enc = dec_in_grad[:, :d] * (1.0 - z * z)
            enc_grads, _ = encoder.backward(enc_in, up_enc)
            dec_opt.step(decoder.parameters(), dec_grads)
            enc_opt.step(encoder.parameters(), enc_grads)
        rec = {"epoch": epoch, "train_loss": epoch_loss / n_train}
        if held is not None:
            rec["holdout_loss"] = reconstruction_error(lp, held)
        curve.append(rec)
    return lp, curve


def nearest_object_index(env: EnvSpec, flat_state: np.ndarray) -> int:
    """Index of the object whose interaction point is closest to the EE."""
    state = envmod.unflatten(env, flat_state)
    ee = forward_kinematics(env.arm, state.s_r)
    pts = envmod.interaction_points(env, state)
    return int(np.argmin(np.linalg.norm(pts - ee, axis=1)))


def partition_dataset(data: Dataset, env: EnvSpec, groups) -> list[Dataset]:
    """Split records by which object-name group the nearest object falls in.

    Every object name must appear in exactly one group; empty partitions are
    rejected because they cannot train a decoder.
    """
    names = [obj.name for obj in env.objects]
    claimed = [name for group in groups for name in group]
    if sorted(claimed) != sorted(names):
        raise ContractViolation("groups must cover every object name exactly once")
    group_of = {}
    for gi, group in enumerate(groups):
        for name in group:
            group_of[names.index(name)] = gi
    buckets: list[list[int]] = [[] for _ in groups]
    for i, flat in enumerate(data.states):
        buckets[group_of[nearest_object_index(env, flat)]].append(i)
    out = []
    for gi, idx in enumerate(buckets):
        if not idx:
            raise ContractViolation(f"partition {gi} received no records")
        out.append(subset(data, np.array(idx)))
    return out


POLICY_MANIFEST = "manifest.json"


def save_policy(lp: LatentPolicy, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    save_network(lp.encoder, os.path.join(out_dir, "encoder.json"))
    save_network(lp.decoder, os.path.join(out_dir, "decoder.json"))
    manifest = {
        "format": "latentarm-latent",
        "version": 1,
        "latent_dim": lp.latent_dim,
        "n_actions": lp.n_actions,
        "max_action": lp.max_action,
        "env_name": lp.env_name,
        "s_mean": lp.s_mean.tolist(),
        "s_scale": lp.s_scale.tolist(),
        "a_mean": lp.a_mean.tolist(),
        "a_scale": lp.a_scale.tolist(),
    }
    tmp = os.path.join(out_dir, POLICY_MANIFEST + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(manifest, fh, indent=2)
    os.replace(tmp, os.path.join(out_dir, POLICY_MANIFEST))


def load_policy(in_dir) -> LatentPolicy:
    with open(os.path.join(in_dir, POLICY_MANIFEST)) as fh:
        m = json.load(fh)
    if m.get("format") != "latentarm-latent" or m.get("version") != 1:
        raise ContractViolation(f"{in_dir}: not a recognized latent checkpoint")
    return LatentPolicy(
        encoder=load_network(os.path.join(in_dir, "encoder.json")),
        decoder=load_network(os.path.join(in_dir, "decoder.json")),
        latent_dim=m["latent_dim"],
        n_actions=m["n_actions"],
        max_action=m["max_action"],
        s_mean=np.asarray(m["s_mean"], float),
        s_scale=np.asarray(m["s_scale"], float),
        a_mean=np.asarray(m["a_mean"], float),
        a_scale=np.asarray(m["a_scale"], float),
        env_name=m.get("env_name", ""),
    )
