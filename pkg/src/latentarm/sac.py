"""Soft actor-critic on the novelty reward.

The policy outputs a squashed-Gaussian (tanh) action scaled to the joint
speed limit; two critics with polyak-averaged targets regress the soft
bellman target; the entropy temperature is learned against a fixed target
entropy. All gradients run through nn.Network.backward by hand, including
the reparameterized pathwise term through the critics' input gradients.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import envs as envmod
from .entropy import ObjectStateBuffer, intrinsic_reward
from .envs import EnvSpec, WorldState
from .errors import ContractViolation, NonFiniteError
from .nn import Adam, Network, load_network, save_network

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0
_SQUASH_EPS = 1e-6
_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass
class Transition:
    """Flattened (state, action, reward, next-state) record.

    done marks an episode boundary; terminal marks a true absorbing end used
    for bootstrap masking. Fixed-horizon cutoffs set done without terminal so
    targets still bootstrap through the time limit.
    """

    s: np.ndarray
    a: np.ndarray
    r: float
    s_next: np.ndarray
    done: bool
    terminal: bool = False


class ReplayBuffer:
    """Uniform-sampling ring buffer over flat transitions."""

    def __init__(self, capacity: int, obs_dim: int, act_dim: int, seed: int = 0):
        if capacity < 1:
            raise ContractViolation("capacity must be >= 1")
        self.capacity = capacity
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self._s = np.empty((capacity, obs_dim))
        self._a = np.empty((capacity, act_dim))
        self._r = np.empty(capacity)
        self._s2 = np.empty((capacity, obs_dim))
        self._terminal = np.empty(capacity)
        self._size = 0
        self._next = 0
        self.rng = np.random.default_rng(seed)

    def __len__(self) -> int:
        return self._size

    def add(self, tr: Transition) -> None:
        if tr.s.shape != (self.obs_dim,) or tr.s_next.shape != (self.obs_dim,):
            raise ContractViolation("transition state width does not match buffer")
        if tr.a.shape != (self.act_dim,):
            raise ContractViolation("transition action width does not match buffer")
        i = self._next
        self._s[i] = tr.s
        self._a[i] = tr.a
        self._r[i] = tr.r
        self._s2[i] = tr.s_next
        self._terminal[i] = 1.0 if tr.terminal else 0.0
        self._next = (self._next + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int) -> dict:
        if self._size == 0:
            raise ContractViolation("cannot sample from an empty buffer")
        idx = self.rng.integers(0, self._size, size=batch_size)
        return {
            "s": self._s[idx],
            "a": self._a[idx],
            "r": self._r[idx],
            "s_next": self._s2[idx],
            "terminal": self._terminal[idx],
        }


@dataclass
class SacParams:
    """Training hyperparameters. Defaults sized for desk-scale CPU runs."""

    episodes: int = 60
    gamma: float = 0.99
    tau: float = 0.005
    lr: float = 3e-4
    batch_size: int = 256
    replay_capacity: int = 100_000
    warmup_steps: int = 1000
    updates_per_step: int = 1
    hidden: tuple[int, int] = (64, 64)
    knn_k: int = 12
    state_buffer_capacity: int = 10_000
    epsilon: float = 1e-3
    state_scale: Optional[list] = None
    seed: int = 0
    log_every_episodes: int = 1


class SacAgent:
    """Policy, twin critics, their targets, and the learned temperature."""

    def __init__(self, obs_dim: int, act_dim: int, max_action: float,
                 params: SacParams):
        if not 0.0 < params.gamma < 1.0:
            raise ContractViolation("gamma must lie in (0, 1)")
        if not 0.0 < params.tau <= 1.0:
            raise ContractViolation("tau must lie in (0, 1]")
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.max_action = float(max_action)
        self.gamma = params.gamma
        self.tau = params.tau
        self.target_entropy = -float(act_dim)
        h = list(params.hidden)
        acts = ["tanh"] * len(h) + ["identity"]
        self.policy = Network([obs_dim] + h + [2 * act_dim], acts, params.seed)
        self.q1 = Network([obs_dim + act_dim] + h + [1], acts, params.seed + 1)
        self.q2 = Network([obs_dim + act_dim] + h + [1], acts, params.seed + 2)
        self.q1_target = self.q1.clone()
        self.q2_target = self.q2.clone()
        self.log_alpha = np.zeros(1)
        self.rng = np.random.default_rng(params.seed + 3)
        lr = params.lr
        self.policy_opt = Adam(self.policy.parameters(), lr=lr)
        self.q1_opt = Adam(self.q1.parameters(), lr=lr)
        self.q2_opt = Adam(self.q2.parameters(), lr=lr)
        self.alpha_opt = Adam([self.log_alpha], lr=lr)

    @property
    def alpha(self) -> float:
        return float(np.exp(self.log_alpha[0]))

    def _policy_heads(self, obs: np.ndarray):
        raw = self.policy.forward(obs)
        mean = raw[..., : self.act_dim]
        std_raw = raw[..., self.act_dim:]
        log_std = LOG_STD_MIN + 0.5 * (LOG_STD_MAX - LOG_STD_MIN) * (np.tanh(std_raw) + 1.0)
        return mean, std_raw, log_std

    def _sample_batch(self, obs: np.ndarray, rng: np.random.Generator):
        """Reparameterized batch sample: returns action, log-prob, and the
        intermediates needed to backpropagate through the sample."""
        mean, std_raw, log_std = self._policy_heads(obs)
        std = np.exp(log_std)
        noise = rng.standard_normal(mean.shape)
        u = mean + std * noise
        t = np.tanh(u)
        action = self.max_action * t
        jac = self.max_action * (1.0 - t * t)  # |da/du| per dimension
        log_prob = np.sum(
            -log_std - 0.5 * noise * noise - 0.5 * _LOG_2PI - np.log(jac + _SQUASH_EPS),
            axis=-1,
        )
        return {
            "action": action, "log_prob": log_prob, "mean": mean,
            "std_raw": std_raw, "log_std": log_std, "std": std,
            "noise": noise, "t": t, "jac": jac,
        }

    def sample_action_with(self, s_flat: np.ndarray, rng: np.random.Generator,
                           deterministic: bool = False) -> np.ndarray:
        """Like sample_action but with caller-owned randomness, so rollout
        collectors can be reproducible independent of training history."""
        s_flat = np.asarray(s_flat, dtype=float)
        if s_flat.shape != (self.obs_dim,):
            raise ContractViolation(
                f"state has shape {s_flat.shape}, expected ({self.obs_dim},)"
            )
        if deterministic:
            mean, _, _ = self._policy_heads(s_flat[None, :])
            action = self.max_action * np.tanh(mean[0])
        else:
            action = self._sample_batch(s_flat[None, :], rng)["action"][0]
        if not np.isfinite(np.sum(action)):
            raise NonFiniteError("non-finite action from policy")
        return action

    def sample_action(self, s_flat: np.ndarray, deterministic: bool = False) -> np.ndarray:
        return self.sample_action_with(s_flat, self.rng, deterministic)

    def _min_target_q(self, obs: np.ndarray, act: np.ndarray) -> np.ndarray:
        q_in = np.concatenate([obs, act], axis=1)
        q1 = self.q1_target.forward(q_in)[:, 0]
        q2 = self.q2_target.forward(q_in)[:, 0]
        return np.minimum(q1, q2)

    def compute_q_targets(self, batch: dict, rng: np.random.Generator) -> np.ndarray:
        """Soft bellman targets y = r + gamma * mask * (min target Q - alpha
        log pi) with next actions drawn from the current policy via rng."""
        nxt = self._sample_batch(batch["s_next"], rng)
        q_next = self._min_target_q(batch["s_next"], nxt["action"])
        soft = q_next - self.alpha * nxt["log_prob"]
        return batch["r"] + self.gamma * (1.0 - batch["terminal"]) * soft

    def _update_critics(self, batch: dict, y: np.ndarray) -> float:
        q_in = np.concatenate([batch["s"], batch["a"]], axis=1)
        b = q_in.shape[0]
        total = 0.0
        for net, opt in ((self.q1, self.q1_opt), (self.q2, self.q2_opt)):
            q = net.forward(q_in)[:, 0]
            err = q - y
            total += float(np.mean(err * err))
            upstream = (2.0 * err / b)[:, None]
            grads, _ = net.backward(q_in, upstream)
            opt.step(net.parameters(), grads)
        return total / 2.0

    def _update_policy(self, batch: dict) -> tuple[float, float]:
        obs = batch["s"]
        b = obs.shape[0]
        smp = self._sample_batch(obs, self.rng)
        act, t, jac = smp["action"], smp["t"], smp["jac"]
        q_in = np.concatenate([obs, act], axis=1)
        q1 = self.q1.forward(q_in)[:, 0]
        q2 = self.q2.forward(q_in)[:, 0]
        pick1 = (q1 <= q2)[:, None].astype(float)
        _, in_grad1 = self.q1.backward(q_in, pick1)
        _, in_grad2 = self.q2.backward(q_in, 1.0 - pick1)
        dq_da = (in_grad1 + in_grad2)[:, self.obs_dim:]

        alpha = self.alpha
        # d log pi / du from the squash correction (gaussian term is constant
        # in u once the noise is fixed by reparameterization).
        dlogpi_du = 2.0 * self.max_action * t * (1.0 - t * t) / (jac + _SQUASH_EPS)
        sig_noise = smp["std"] * smp["noise"]  # du/dlog_std
        g_mean = (alpha * dlogpi_du - dq_da * jac) / b
        g_log_std = (alpha * (-1.0 + dlogpi_du * sig_noise) - dq_da * jac * sig_noise) / b
        # log_std is a tanh reshaping of the raw head output.
        dls_draw = 0.5 * (LOG_STD_MAX - LOG_STD_MIN) * (1.0 - np.tanh(smp["std_raw"]) ** 2)
        upstream = np.concatenate([g_mean, g_log_std * dls_draw], axis=1)
        grads, _ = self.policy.backward(obs, upstream)
        self.policy_opt.step(self.policy.parameters(), grads)

        log_prob = smp["log_prob"]
        policy_loss = float(np.mean(alpha * log_prob - np.minimum(q1, q2)))

        # Temperature step toward the target entropy.
        alpha_grad = np.array([-alpha * float(np.mean(log_prob + self.target_entropy))])
        self.alpha_opt.step([self.log_alpha], [alpha_grad])
        alpha_loss = float(-alpha * np.mean(log_prob + self.target_entropy))
        return policy_loss, alpha_loss

    def _polyak(self) -> None:
        for live, tgt in ((self.q1, self.q1_target), (self.q2, self.q2_target)):
            for lp, tp in zip(live.parameters(), tgt.parameters()):
                tp *= 1.0 - self.tau
                tp += self.tau * lp

    def update(self, batch: dict) -> dict:
        """One gradient step on critics, policy, and temperature, then a
        polyak update of the targets. Returns loss diagnostics."""
        if batch["s"].shape[0] == 0:
            raise ContractViolation("update requires a non-empty batch")
        y = self.compute_q_targets(batch, self.rng)
        q_loss = self._update_critics(batch, y)
        policy_loss, alpha_loss = self._update_policy(batch)
        self._polyak()
        smp_entropy = -float(np.mean(
            self._sample_batch(batch["s"], self.rng)["log_prob"]
        ))
        diag = {
            "q_loss": q_loss,
            "policy_loss": policy_loss,
            "alpha_loss": alpha_loss,
            "alpha": self.alpha,
            "entropy": smp_entropy,
        }
        for key, val in diag.items():
            if not np.isfinite(val):
                raise NonFiniteError(f"non-finite {key} in update: {diag}")
        return diag


def make_state_buffer(env: EnvSpec, params: SacParams) -> ObjectStateBuffer:
    scale = None if params.state_scale is None else np.asarray(params.state_scale, float)
    return ObjectStateBuffer(
        dim=env.object_state_dim,
        k=params.knn_k,
        capacity=params.state_buffer_capacity,
        epsilon=params.epsilon,
        scale=scale,
    )


def seed_replay(
    replay: ReplayBuffer,
    episodes: list,
    state_buffer: ObjectStateBuffer,
    env: EnvSpec,
) -> None:
    """Insert demonstration episodes before training.

    Any reward recorded on the demos is discarded: each transition's reward
    is recomputed against the object-state buffer as it currently stands
    (empty before training, so the novelty term is zero and only proximity
    shaping remains). Demo states are not pushed into the buffer; novelty
    stays reserved for states the trainer visits itself.
    """
    for episode in episodes:
        for tr in episode:
            if tr.s.shape != (replay.obs_dim,) or tr.a.shape != (replay.act_dim,):
                raise ContractViolation("demo transition dimensions do not match env")
            nxt = envmod.unflatten(env, tr.s_next)
            r = intrinsic_reward(state_buffer, nxt, env)
            replay.add(Transition(tr.s, tr.a, r, tr.s_next, tr.done, tr.terminal))


def train(
    env: EnvSpec,
    params: SacParams,
    demo_episodes: Optional[list] = None,
) -> tuple[SacAgent, list[dict]]:
    """Unsupervised pre-training loop.

    Per step: act, compute the novelty reward on the successor, push its
    object state, store the transition, and (past warmup) run gradient
    updates. The object-state buffer persists across episodes.
    """
    agent = SacAgent(env.obs_dim, env.n_actions, env.arm.max_joint_speed, params)
    replay = ReplayBuffer(params.replay_capacity, env.obs_dim, env.n_actions,
                          seed=params.seed + 4)
    state_buffer = make_state_buffer(env, params)
    if demo_episodes:
        seed_replay(replay, demo_episodes, state_buffer, env)
    rng = np.random.default_rng(params.seed + 5)
    log: list[dict] = []
    step_count = 0
    for ep in range(params.episodes):
        reset_seed = int(rng.integers(0, 2**63 - 1))
        state = envmod.reset(env, reset_seed)
        state_buffer.push(state.s_o)
        ep_rewards = []
        so_min = state.s_o.copy()
        so_max = state.s_o.copy()
        diag: dict = {}
        for t in range(env.horizon):
            flat = state.flat()
            if step_count < params.warmup_steps:
                action = rng.uniform(-env.arm.max_joint_speed,
                                     env.arm.max_joint_speed, env.n_actions)
            else:
                action = agent.sample_action(flat)
            nxt = envmod.step(env, state, action)
            r = intrinsic_reward(state_buffer, nxt, env)
            state_buffer.push(nxt.s_o)
            done = t == env.horizon - 1
            replay.add(Transition(flat, np.asarray(action, float), r,
                                  nxt.flat(), done, terminal=False))
            np.minimum(so_min, nxt.s_o, out=so_min)
            np.maximum(so_max, nxt.s_o, out=so_max)
            ep_rewards.append(r)
            step_count += 1
            if step_count >= params.warmup_steps and len(replay) >= params.batch_size:
                for _ in range(params.updates_per_step):
                    diag = agent.update(replay.sample(params.batch_size))
            state = nxt
        if (ep + 1) % params.log_every_episodes == 0:
            rec = {
                "episode": ep,
                "step": step_count,
                "reward_mean": float(np.mean(ep_rewards)),
                "reward_min": float(np.min(ep_rewards)),
                "reward_max": float(np.max(ep_rewards)),
                "final_object_state": [float(v) for v in state.s_o],
                "object_state_min": [float(v) for v in so_min],
                "object_state_max": [float(v) for v in so_max],
                "buffer_size": len(state_buffer),
                "replay_size": len(replay),
            }
            rec.update({k: float(v) for k, v in diag.items()})
            log.append(rec)
    return agent, log


def save_log(log: list[dict], path) -> None:
    with open(path, "w") as fh:
        for rec in log:
            fh.write(json.dumps(rec) + "\n")


MANIFEST_NAME = "manifest.json"
_NET_FILES = ("policy", "q1", "q2", "q1_target", "q2_target")


def save_agent(agent: SacAgent, out_dir) -> None:
    """Checkpoint directory: one network file per net plus a manifest."""
    os.makedirs(out_dir, exist_ok=True)
    for name in _NET_FILES:
        save_network(getattr(agent, name), os.path.join(out_dir, f"{name}.json"))
    manifest = {
        "format": "latentarm-sac",
        "version": 1,
        "obs_dim": agent.obs_dim,
        "act_dim": agent.act_dim,
        "max_action": agent.max_action,
        "gamma": agent.gamma,
        "tau": agent.tau,
        "target_entropy": agent.target_entropy,
        "log_alpha": float(agent.log_alpha[0]),
    }
    tmp = os.path.join(out_dir, MANIFEST_NAME + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(manifest, fh, indent=2)
    os.replace(tmp, os.path.join(out_dir, MANIFEST_NAME))


def load_agent(in_dir) -> SacAgent:
    with open(os.path.join(in_dir, MANIFEST_NAME)) as fh:
        manifest = json.load(fh)
    if manifest.get("format") != "latentarm-sac" or manifest.get("version") != 1:
        raise ContractViolation(f"{in_dir}: not a recognized agent checkpoint")
    params = SacParams(gamma=manifest["gamma"], tau=manifest["tau"])
    agent = SacAgent(manifest["obs_dim"], manifest["act_dim"],
                     manifest["max_action"], params)
    for name in _NET_FILES:
        net = load_network(os.path.join(in_dir, f"{name}.json"))
        target = getattr(agent, name)
        if net.layer_sizes != target.layer_sizes:
            setattr(agent, name, net)
        else:
            target.copy_from(net)
    agent.log_alpha[0] = manifest["log_alpha"]
    agent.target_entropy = manifest["target_entropy"]
    return agent
