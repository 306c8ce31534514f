"""Fixed-clock teleoperation sessions.

A session owns one world state and advances it only inside :func:`tick`.
Joystick input arrives asynchronously and is buffered latest-wins; each tick
consumes at most one input, and when no fresh input arrived the previous one
is reused and the reuse is recorded. Together with the per-tick trace this
makes every session replayable: feeding the trace back through a new session
reproduces the same states and the same metrics, bit for bit.

Timers are kept as integer tick counts and converted to seconds on read, so
a live session and a trace replay cannot drift apart through float summation.
"""

from __future__ import annotations

import json
import os
from typing import Optional, Sequence, Union

import numpy as np

from .envs import EnvSpec, WorldState, reset, step, task_complete
from .errors import ContractViolation
from .kinematics import ee_tilt, forward_kinematics, resolved_rate, resolved_rotation
from .latent import LatentPolicy, decode

TICK_RATE = 20.0
DEADZONE = 0.05
EE_SPEED = 0.25  # m/s commanded at full stick deflection
TILT_RATE = 1.5  # rad/s commanded at full stick deflection

TRACE_FORMAT = "latentarm-trace"
TRACE_VERSION = 1

EE_MODES = ("ee:linear", "ee:rotational")


def _mode_kind(mode: str) -> str:
    return "latent" if mode.startswith("latent:") else "ee"


def _check_mode(mode: str, n_spaces: int) -> str:
    if mode in EE_MODES:
        return mode
    if mode.startswith("latent:"):
        try:
            idx = int(mode.split(":", 1)[1])
        except ValueError:
            idx = -1
        if 0 <= idx < n_spaces:
            return mode
        raise ContractViolation(
            f"mode {mode!r} needs a decoder for space {mode.split(':', 1)[1]}, "
            f"{n_spaces} loaded"
        )
    raise ContractViolation(
        f"unknown mode {mode!r}; expected latent:<i>, ee:linear or ee:rotational"
    )


class TeleopSession:
    """One operator session: env state, mode, input buffer, metrics."""

    def __init__(
        self,
        env: EnvSpec,
        policies: Optional[Sequence[LatentPolicy]] = None,
        mode: Optional[str] = None,
        tick_rate: float = TICK_RATE,
        deadzone: float = DEADZONE,
        ee_speed: float = EE_SPEED,
        tilt_rate: float = TILT_RATE,
        seed: int = 0,
    ):
        if tick_rate <= 0:
            raise ContractViolation("tick rate must be positive")
        if not 0 <= deadzone < 1:
            raise ContractViolation("deadzone must lie in [0, 1)")
        self.env = env
        self.policies = list(policies or [])
        for lp in self.policies:
            if lp.n_actions != env.arm.n_joints:
                raise ContractViolation(
                    f"decoder emits {lp.n_actions} joint velocities, "
                    f"arm has {env.arm.n_joints} joints"
                )
            if lp.env_name != env.name:
                raise ContractViolation(
                    f"decoder was trained on {lp.env_name!r}, session env is "
                    f"{env.name!r}"
                )
        if mode is None:
            mode = "latent:0" if self.policies else "ee:linear"
        self.mode = _check_mode(mode, len(self.policies))
        self.mode0 = self.mode
        self.tick_rate = float(tick_rate)
        self.deadzone = float(deadzone)
        self.ee_speed = float(ee_speed)
        self.tilt_rate = float(tilt_rate)
        self.seed = int(seed)
        self.state: WorldState = reset(env, seed=self.seed)
        self.ticks = 0
        self._control_ticks = 0
        self.toggles = 0
        self.inputs: list[np.ndarray] = []  # deadzone-filtered, one per tick
        self.trace: list[dict] = []
        self.completed_tick: Optional[int] = None
        self._pending_u: Optional[np.ndarray] = None
        self._last_u = np.zeros(2)
        self._pending_events: list[str] = []

    # -- timers (integer ticks internally; see module docstring) --

    @property
    def total_time(self) -> float:
        return self.ticks / self.tick_rate

    @property
    def control_time(self) -> float:
        return self._control_ticks / self.tick_rate

    # -- client messages --

    def set_input(self, u) -> None:
        """Buffer a joystick vector; the next tick consumes the latest one."""
        u = np.asarray(u, dtype=float)
        if u.shape != (2,):
            raise ContractViolation(f"input has shape {u.shape}, expected (2,)")
        if not np.all(np.isfinite(u)):
            raise ContractViolation("input must be finite")
        self._pending_u = np.clip(u, -1.0, 1.0)

    def toggle(self) -> str:
        """Cycle within the current mode family; returns the new mode."""
        if _mode_kind(self.mode) == "latent":
            idx = int(self.mode.split(":", 1)[1])
            self.mode = f"latent:{(idx + 1) % len(self.policies)}"
        else:
            self.mode = EE_MODES[1 - EE_MODES.index(self.mode)]
        self.toggles += 1
        self._pending_events.append("toggle")
        return self.mode

    def set_mode(self, mode: str) -> None:
        self.mode = _check_mode(mode, len(self.policies))
        self._pending_events.append(f"mode {self.mode}")

    def reset_world(self) -> None:
        """Put the scene back at its seeded start; timers keep running."""
        self.state = reset(self.env, seed=self.seed)
        self._pending_events.append("reset")

    # -- the clock --

    def _filtered(self, u: np.ndarray) -> np.ndarray:
        return u if np.linalg.norm(u) > self.deadzone else np.zeros(2)

    def _action(self, u_f: np.ndarray) -> tuple[np.ndarray, bool]:
        n = self.env.arm.n_joints
        if not np.any(u_f):
            return np.zeros(n), False
        if _mode_kind(self.mode) == "latent":
            lp = self.policies[int(self.mode.split(":", 1)[1])]
            z = np.zeros(lp.latent_dim)
            m = min(2, lp.latent_dim)
            z[:m] = u_f[:m]
            return decode(lp, z, self.state), False
        if self.mode == "ee:linear":
            qdot, fallback = resolved_rate(
                self.env.arm, self.state.s_r, u_f * self.ee_speed
            )
            return qdot, fallback
        return resolved_rotation(self.env.arm, self.state.s_r, u_f[0] * self.tilt_rate), False

    def tick(self) -> dict:
        """Consume one input, advance the world once, emit a snapshot."""
        if self._pending_u is not None:
            u, reused = self._pending_u, False
            self._pending_u = None
            self._last_u = u
        else:
            u, reused = self._last_u, True
        events = self._pending_events
        self._pending_events = []

        u_f = self._filtered(u)
        action, ik_fallback = self._action(u_f)
        self.state = step(self.env, self.state, action)
        self.ticks += 1
        if np.any(u_f):
            self._control_ticks += 1
        self.inputs.append(u_f.copy())
        if self.completed_tick is None and task_complete(self.env, self.state):
            self.completed_tick = self.ticks
            events = events + ["complete"]

        self.trace.append(
            {
                "tick": self.ticks,
                "u": [float(u[0]), float(u[1])],
                "mode": self.mode,
                "reused": reused,
                "ik_fallback": ik_fallback,
                "events": events,
                "joints": [float(v) for v in self.state.s_r],
                "objects": [float(v) for v in self.state.s_o],
                "held": self.state.held_object,
            }
        )
        return self.snapshot(reused=reused, ik_fallback=ik_fallback, events=events)

    # -- views --

    def snapshot(self, reused=False, ik_fallback=False, events=()) -> dict:
        ee = forward_kinematics(self.env.arm, self.state.s_r)
        slices = self.env.object_slices
        objects = [
            {
                "name": obj.name,
                "kind": obj.kind,
                "state": [float(v) for v in self.state.s_o[sl]],
                "held": self.state.held_object == i,
            }
            for i, (obj, sl) in enumerate(zip(self.env.objects, slices))
        ]
        return {
            "tick": self.ticks,
            "joints": [float(v) for v in self.state.s_r],
            "ee": [float(ee[0]), float(ee[1]), float(ee_tilt(self.state.s_r))],
            "objects": objects,
            "mode": self.mode,
            "metrics": {
                "total_time": self.total_time,
                "control_time": self.control_time,
                "consistency": consistency(self.inputs),
                "toggles": self.toggles,
                "complete": self.completed_tick is not None,
            },
            "flags": {"input_reused": bool(reused), "ik_fallback": bool(ik_fallback)},
            "events": list(events),
        }


def consistency(inputs: Sequence) -> Optional[float]:
    """Mean cosine between consecutive nonzero inputs, None if under two."""
    nonzero = []
    for u in inputs:
        u = np.asarray(u, dtype=float)
        if np.linalg.norm(u) > 0:
            nonzero.append(u)
    if len(nonzero) < 2:
        return None
    cosines = [
        float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
        for a, b in zip(nonzero, nonzero[1:])
    ]
    return float(np.mean(cosines))


def session_report(session: TeleopSession) -> dict:
    return {
        "env": session.env.name,
        "ticks": session.ticks,
        "total_time": session.total_time,
        "control_time": session.control_time,
        "consistency": consistency(session.inputs),
        "toggles": session.toggles,
        "completed": session.completed_tick is not None,
        "completed_tick": session.completed_tick,
    }


def save_trace(session: TeleopSession, path: str) -> None:
    """Write the session header plus one record per tick, atomically."""
    header = {
        "format": TRACE_FORMAT,
        "version": TRACE_VERSION,
        "env": session.env.name,
        "seed": session.seed,
        "mode": session.mode0,
        "tick_rate": session.tick_rate,
        "deadzone": session.deadzone,
        "ee_speed": session.ee_speed,
        "tilt_rate": session.tilt_rate,
        "spaces": len(session.policies),
    }
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for rec in session.trace:
            fh.write(json.dumps(rec) + "\n")
    os.replace(tmp, path)


def load_trace(path: str) -> tuple[dict, list[dict]]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ContractViolation(f"{path} is empty")
    header = json.loads(lines[0])
    if header.get("format") != TRACE_FORMAT:
        raise ContractViolation(f"{path} is not a session trace")
    if header.get("version") != TRACE_VERSION:
        raise ContractViolation(f"unsupported trace version {header.get('version')}")
    return header, [json.loads(ln) for ln in lines[1:]]


def metrics_from_trace(path: str) -> dict:
    """Recompute the session report from a trace file alone.

    Uses the same integer-tick arithmetic and the same consistency function
    as the live session, so the result matches session_report exactly.
    """
    header, records = load_trace(path)
    deadzone = header["deadzone"]
    tick_rate = header["tick_rate"]
    control_ticks = 0
    toggles = 0
    inputs = []
    completed_tick = None
    for rec in records:
        u = np.clip(np.asarray(rec["u"], dtype=float), -1.0, 1.0)
        u_f = u if np.linalg.norm(u) > deadzone else np.zeros(2)
        if np.any(u_f):
            control_ticks += 1
        inputs.append(u_f)
        toggles += rec["events"].count("toggle")
        if completed_tick is None and "complete" in rec["events"]:
            completed_tick = rec["tick"]
    return {
        "env": header["env"],
        "ticks": len(records),
        "total_time": len(records) / tick_rate,
        "control_time": control_ticks / tick_rate,
        "consistency": consistency(inputs),
        "toggles": toggles,
        "completed": completed_tick is not None,
        "completed_tick": completed_tick,
    }


def replay_session(
    env: EnvSpec,
    policies: Sequence[LatentPolicy],
    header: dict,
    records: list[dict],
) -> TeleopSession:
    """Re-run a trace through a fresh session and verify it reproduces.

    Raises ContractViolation on the first tick whose recorded state differs
    from the re-simulated one.
    """
    if header["env"] != env.name:
        raise ContractViolation(
            f"trace was recorded on {header['env']!r}, replay env is {env.name!r}"
        )
    sess = TeleopSession(
        env,
        policies,
        mode=header["mode"],
        tick_rate=header["tick_rate"],
        deadzone=header["deadzone"],
        ee_speed=header["ee_speed"],
        tilt_rate=header["tilt_rate"],
        seed=header["seed"],
    )
    for rec in records:
        for ev in rec["events"]:
            if ev == "toggle":
                sess.toggle()
            elif ev.startswith("mode "):
                sess.set_mode(ev.split(" ", 1)[1])
            elif ev == "reset":
                sess.reset_world()
            elif ev != "complete":
                raise ContractViolation(f"unknown trace event {ev!r}")
        if not rec["reused"]:
            sess.set_input(rec["u"])
        sess.tick()
        got = sess.trace[-1]
        if got["joints"] != rec["joints"] or got["objects"] != rec["objects"]:
            raise ContractViolation(f"replay diverged at tick {rec['tick']}")
    return sess


def scene_description(env: EnvSpec) -> dict:
    """Static geometry a renderer needs: links, objects, regions."""

    def plain(value):
        if isinstance(value, dict):
            return {k: plain(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [plain(v) for v in value]
        if isinstance(value, (np.floating, np.integer)):
            return value.item()
        return value

    return {
        "env": env.name,
        "links": [float(v) for v in env.arm.link_lengths],
        "base": [float(v) for v in env.arm.base_position],
        "joint_limits": plain(env.arm.joint_limits),
        "horizon": env.horizon,
        "latent_dim": env.latent_dim,
        "latent_spaces": env.latent_spaces,
        "objects": [
            {
                "name": obj.name,
                "kind": obj.kind,
                "anchor": plain(obj.anchor),
                "params": plain(obj.params),
            }
            for obj in env.objects
        ],
        "regions": plain(env.regions) if env.regions else {},
    }
