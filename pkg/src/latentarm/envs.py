"""Planar-arm simulation: world types, quasi-static contact model, reset
sampling, and the registry of built-in environments.

State convention: ``s = (s_R, s_O)`` where ``s_R`` is the joint-angle vector
(length n) and ``s_O`` concatenates per-object sub-states in object order.
Flattened states used by learners and datasets are ``concat(s_R, s_O)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from .errors import ContractViolation, NotFound
from .kinematics import ee_tilt, forward_kinematics

# Magnetic contact model constants. Within CONTACT_RADIUS of an articulated
# handle (or a graspable cup) the end effector engages the object; the end
# effector itself is a disc of EE_RADIUS for ball pushing.
CONTACT_RADIUS = 0.08
EE_RADIUS = 0.05

OBJECT_KINDS = ("drawer", "ball", "cup", "lid", "bin", "fixed-cup-target")

Rect = tuple[float, float, float, float]  # (xmin, xmax, ymin, ymax)


def _in_rect(point, rect: Rect) -> bool:
    x, y = float(point[0]), float(point[1])
    return rect[0] <= x <= rect[1] and rect[2] <= y <= rect[3]


@dataclass(frozen=True)
class ArmSpec:
    """Geometry and limits of the planar serial arm."""

    link_lengths: tuple[float, ...]
    joint_limits: tuple[tuple[float, float], ...]
    max_joint_speed: float = 1.0
    dt: float = 0.05
    base_position: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if len(self.link_lengths) != len(self.joint_limits):
            raise ContractViolation("one joint limit pair per link required")
        if any(l <= 0 for l in self.link_lengths):
            raise ContractViolation("link lengths must be positive")
        if self.dt <= 0:
            raise ContractViolation("dt must be positive")
        if self.max_joint_speed <= 0:
            raise ContractViolation("max_joint_speed must be positive")
        for lo, hi in self.joint_limits:
            if not lo < hi:
                raise ContractViolation(f"joint limit ({lo}, {hi}) is not min < max")

    @property
    def n_joints(self) -> int:
        return len(self.link_lengths)

    @property
    def reach(self) -> float:
        return float(sum(self.link_lengths))


@dataclass(frozen=True)
class ObjectSpec:
    """One scene object. ``params`` holds kind-specific geometry:

    drawer: axis (unit 2-vector), q_max; state [extension]
    ball:   radius, bounds rect; state [x, y]
    cup:    radius, graspable, bounds rect, pour_tilt, pour_over (target
            object name, optional); graspable state [x, y, tilt, held],
            non-graspable state [x, y] (pushed as a disc, not carried)
    lid:    pivot, radius (lever length), closed_angle, max_angle;
            state [hinge angle] in [0, max_angle]
    bin:    aperture rect centered on anchor; no state
    fixed-cup-target: radius; with proximity_state=True contributes one
            end-effector proximity indicator in {0, 1}, else no state
    """

    name: str
    kind: str
    anchor: tuple[float, float]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in OBJECT_KINDS:
            raise ContractViolation(f"unknown object kind {self.kind!r}")
        p = self.params
        if self.kind == "drawer":
            axis = np.asarray(p["axis"], dtype=float)
            norm = float(np.linalg.norm(axis))
            if norm == 0:
                raise ContractViolation("drawer axis must be nonzero")
            p["axis"] = tuple(axis / norm)
            if p["q_max"] <= 0:
                raise ContractViolation("drawer extension range is degenerate")
        elif self.kind == "ball":
            if p["radius"] <= 0:
                raise ContractViolation("ball radius must be positive")
        elif self.kind == "cup":
            p.setdefault("graspable", True)
            p.setdefault("pour_tilt", 2.0)
            p.setdefault("pour_over", None)
        elif self.kind == "lid":
            if not 0 < p["max_angle"] <= math.pi:
                raise ContractViolation("lid angle range must lie within (0, pi]")
            if p["radius"] <= 0:
                raise ContractViolation("lid lever length must be positive")
        elif self.kind == "fixed-cup-target":
            p.setdefault("proximity_state", False)
            p.setdefault("proximity_radius", 0.10)

    @property
    def state_width(self) -> int:
        if self.kind in ("drawer", "lid"):
            return 1
        if self.kind == "ball":
            return 2
        if self.kind == "cup":
            return 4 if self.params["graspable"] else 2
        if self.kind == "fixed-cup-target":
            return 1 if self.params["proximity_state"] else 0
        return 0  # bin

    def state_bounds(self, tilt_limit: float) -> tuple[np.ndarray, np.ndarray]:
        """Per-dimension (low, high) arrays for this object's sub-state."""
        if self.kind == "drawer":
            return np.array([0.0]), np.array([self.params["q_max"]])
        if self.kind == "lid":
            return np.array([0.0]), np.array([self.params["max_angle"]])
        if self.kind == "ball":
            b = self.params["bounds"]
            return np.array([b[0], b[2]]), np.array([b[1], b[3]])
        if self.kind == "cup":
            b = self.params["bounds"]
            lo, hi = [b[0], b[2]], [b[1], b[3]]
            if self.params["graspable"]:
                lo += [-tilt_limit, 0.0]
                hi += [tilt_limit, 1.0]
            return np.array(lo), np.array(hi)
        if self.kind == "fixed-cup-target" and self.params["proximity_state"]:
            return np.array([0.0]), np.array([1.0])
        return np.array([]), np.array([])

    def interaction_point(self, sub: np.ndarray) -> np.ndarray:
        """Where the end effector engages this object, given its sub-state."""
        if self.kind == "drawer":
            return np.asarray(self.anchor) + sub[0] * np.asarray(self.params["axis"])
        if self.kind == "lid":
            ang = self.params["closed_angle"] + sub[0]
            return np.asarray(self.params["pivot"]) + self.params["radius"] * np.array(
                [math.cos(ang), math.sin(ang)]
            )
        if self.kind in ("ball", "cup"):
            return np.asarray(sub[:2], dtype=float)
        return np.asarray(self.anchor, dtype=float)

    @property
    def interaction_radius(self) -> float:
        if self.kind == "ball":
            return self.params["radius"] + EE_RADIUS
        if self.kind == "cup" and not self.params["graspable"]:
            return self.params["radius"] + EE_RADIUS
        if self.kind == "fixed-cup-target":
            return self.params["proximity_radius"] if self.params["proximity_state"] else 0.0
        if self.kind == "bin":
            return 0.0
        return CONTACT_RADIUS


@dataclass
class WorldState:
    """Joint vector plus concatenated object sub-states."""

    s_r: np.ndarray
    s_o: np.ndarray
    held_object: Optional[int] = None

    def flat(self) -> np.ndarray:
        return np.concatenate([self.s_r, self.s_o])

    def copy(self) -> "WorldState":
        return WorldState(self.s_r.copy(), self.s_o.copy(), self.held_object)


@dataclass(frozen=True)
class EnvSpec:
    """One environment instance definition: arm, objects, reset ranges."""

    name: str
    arm: ArmSpec
    objects: tuple[ObjectSpec, ...]
    reset_ranges: tuple[tuple[tuple[float, float], ...], ...]
    home: tuple[float, ...]
    horizon: int = 200
    latent_dim: int = 1
    latent_spaces: int = 1
    regions: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.horizon < 1:
            raise ContractViolation("horizon must be >= 1")
        if len(self.home) != self.arm.n_joints:
            raise ContractViolation("home pose length must match joint count")
        if len(self.reset_ranges) != len(self.objects):
            raise ContractViolation("one reset range tuple per object required")
        tilt = self.tilt_limit
        for obj, ranges in zip(self.objects, self.reset_ranges):
            lo, hi = obj.state_bounds(tilt)
            if len(ranges) != obj.state_width:
                raise ContractViolation(
                    f"{obj.name}: reset ranges cover {len(ranges)} dims, "
                    f"state width is {obj.state_width}"
                )
            for d, (rlo, rhi) in enumerate(ranges):
                if rlo > rhi or rlo < lo[d] - 1e-12 or rhi > hi[d] + 1e-12:
                    raise ContractViolation(
                        f"{obj.name}: reset range {d} outside object range"
                    )

    @property
    def tilt_limit(self) -> float:
        return float(sum(max(abs(lo), abs(hi)) for lo, hi in self.arm.joint_limits))

    @property
    def n_actions(self) -> int:
        return self.arm.n_joints

    @property
    def object_slices(self) -> tuple[slice, ...]:
        out, at = [], 0
        for obj in self.objects:
            out.append(slice(at, at + obj.state_width))
            at += obj.state_width
        return tuple(out)

    @property
    def object_state_dim(self) -> int:
        return sum(obj.state_width for obj in self.objects)

    @property
    def obs_dim(self) -> int:
        return self.arm.n_joints + self.object_state_dim

    def state_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lows, highs = [], []
        for obj in self.objects:
            lo, hi = obj.state_bounds(self.tilt_limit)
            lows.append(lo)
            highs.append(hi)
        return np.concatenate(lows) if lows else np.array([]), (
            np.concatenate(highs) if highs else np.array([])
        )


def interaction_points(env: EnvSpec, state: WorldState) -> np.ndarray:
    """Interaction point of every object, shape (n_objects, 2)."""
    slices = env.object_slices
    return np.array(
        [obj.interaction_point(state.s_o[sl]) for obj, sl in zip(env.objects, slices)]
    )


def min_object_distance(env: EnvSpec, state: WorldState) -> float:
    """Distance from the end effector to the closest object interaction point."""
    ee = forward_kinematics(env.arm, state.s_r)
    pts = interaction_points(env, state)
    return float(np.min(np.linalg.norm(pts - ee, axis=1)))


def _clip_to_rect(point: np.ndarray, rect: Rect) -> np.ndarray:
    return np.array(
        [min(max(point[0], rect[0]), rect[1]), min(max(point[1], rect[2]), rect[3])]
    )


def step(env: EnvSpec, state: WorldState, action: np.ndarray) -> WorldState:
    """Advance the world one timestep under joint-velocity command ``action``.

    Pure function: identical (state, action) always produce the identical
    successor. Over-speed commands are clipped, never rejected.
    """
    arm = env.arm
    action = np.asarray(action, dtype=float)
    if action.shape != (arm.n_joints,):
        raise ContractViolation(
            f"action has shape {action.shape}, expected ({arm.n_joints},)"
        )
    a = np.clip(action, -arm.max_joint_speed, arm.max_joint_speed)

    ee_old = forward_kinematics(arm, state.s_r)
    limits = np.asarray(arm.joint_limits)
    s_r = np.clip(state.s_r + a * arm.dt, limits[:, 0], limits[:, 1])
    ee_new = forward_kinematics(arm, s_r)
    tilt_new = ee_tilt(s_r)
    d_ee = ee_new - ee_old

    s_o = state.s_o.copy()
    held = state.held_object
    slices = env.object_slices

    for idx, (obj, sl) in enumerate(zip(env.objects, slices)):
        sub = s_o[sl]
        p = obj.params
        if obj.kind == "drawer":
            handle = obj.interaction_point(sub)
            if np.linalg.norm(ee_old - handle) <= CONTACT_RADIUS:
                q = sub[0] + float(np.dot(d_ee, p["axis"]))
                sub[0] = min(max(q, 0.0), p["q_max"])
        elif obj.kind == "lid":
            handle = obj.interaction_point(sub)
            if np.linalg.norm(ee_old - handle) <= CONTACT_RADIUS:
                ang = p["closed_angle"] + sub[0]
                tangent = np.array([-math.sin(ang), math.cos(ang)])
                theta = sub[0] + float(np.dot(d_ee, tangent)) / p["radius"]
                sub[0] = min(max(theta, 0.0), p["max_angle"])
        elif obj.kind == "ball" or (obj.kind == "cup" and not p["graspable"]):
            # Free discs (balls, ungraspable cups) are shoved out of overlap
            # with the end-effector disc, never pulled.
            gap = p["radius"] + EE_RADIUS
            offset = sub[:2] - ee_new
            dist = float(np.linalg.norm(offset))
            if dist < gap:
                if dist < 1e-12:
                    # Degenerate overlap: eject along the motion direction.
                    motion = float(np.linalg.norm(d_ee))
                    direction = d_ee / motion if motion > 1e-12 else np.array([1.0, 0.0])
                else:
                    direction = offset / dist
                sub[:2] = _clip_to_rect(ee_new + direction * gap, p["bounds"])
        elif obj.kind == "cup" and p["graspable"]:
            if held == idx:
                sub[0:2] = _clip_to_rect(ee_new, p["bounds"])
                sub[2] = tilt_new
                release = False
                target = _pour_target(env, p)
                if target is not None and abs(tilt_new) >= p["pour_tilt"]:
                    if np.linalg.norm(sub[0:2] - np.asarray(target.anchor)) <= target.params["radius"]:
                        release = True
                if _over_any_bin(env, sub[0:2]):
                    release = True
                if release:
                    held = None
                    sub[3] = 0.0
                else:
                    sub[3] = 1.0
            else:
                # A cup already dropped in a bin, or lying poured past the
                # tilt threshold, is settled and cannot be grabbed again.
                grab = (
                    held is None
                    and np.linalg.norm(ee_new - sub[0:2]) <= CONTACT_RADIUS
                    and abs(tilt_new) < p["pour_tilt"]
                    and abs(sub[2]) < p["pour_tilt"]
                    and not _over_any_bin(env, sub[0:2])
                )
                if grab:
                    held = idx
                    sub[0:2] = _clip_to_rect(ee_new, p["bounds"])
                    sub[2] = tilt_new
                    sub[3] = 1.0
        elif obj.kind == "fixed-cup-target" and p["proximity_state"]:
            near = np.linalg.norm(ee_new - np.asarray(obj.anchor)) <= p["proximity_radius"]
            sub[0] = 1.0 if near else 0.0

    return WorldState(s_r, s_o, held)


def _pour_target(env: EnvSpec, cup_params: dict) -> Optional[ObjectSpec]:
    name = cup_params.get("pour_over")
    if name is None:
        return None
    for obj in env.objects:
        if obj.name == name:
            return obj
    return None


def _over_any_bin(env: EnvSpec, point: np.ndarray) -> bool:
    return any(
        obj.kind == "bin" and _in_rect(point, obj.params["aperture"])
        for obj in env.objects
    )


def reset(env: EnvSpec, seed: int) -> WorldState:
    """Initial state: arm at home pose, object states drawn from the
    configured reset ranges. The same seed always yields the same state."""
    rng = np.random.default_rng(seed)
    s_r = np.asarray(env.home, dtype=float)
    parts = []
    for obj, ranges in zip(env.objects, env.reset_ranges):
        vals = np.empty(obj.state_width)
        for d, (lo, hi) in enumerate(ranges):
            vals[d] = lo if lo == hi else rng.uniform(lo, hi)
        parts.append(vals)
    s_o = np.concatenate(parts) if parts else np.array([])
    state = WorldState(s_r, s_o, None)
    _refresh_indicators(env, state)
    return state


def _refresh_indicators(env: EnvSpec, state: WorldState) -> None:
    ee = forward_kinematics(env.arm, state.s_r)
    for obj, sl in zip(env.objects, env.object_slices):
        if obj.kind == "fixed-cup-target" and obj.params["proximity_state"]:
            near = np.linalg.norm(ee - np.asarray(obj.anchor)) <= obj.params["proximity_radius"]
            state.s_o[sl][0] = 1.0 if near else 0.0


def unflatten(env: EnvSpec, flat: np.ndarray) -> WorldState:
    """Split a flattened state back into joints and object states. The held
    index is not recoverable from the flat vector and is left unset."""
    flat = np.asarray(flat, dtype=float)
    if flat.shape != (env.obs_dim,):
        raise ContractViolation(
            f"flat state has shape {flat.shape}, expected ({env.obs_dim},)"
        )
    n = env.arm.n_joints
    return WorldState(flat[:n].copy(), flat[n:].copy(), None)


def rollout(env: EnvSpec, act_fn, seed: int):
    """Run one fixed-horizon episode. act_fn maps a flattened state to an
    action. Returns (states, actions) with len(states) = horizon + 1."""
    state = reset(env, seed)
    states = [state]
    actions = []
    for _ in range(env.horizon):
        a = np.asarray(act_fn(state.flat()), dtype=float)
        state = step(env, state, a)
        states.append(state)
        actions.append(a)
    return states, actions


def declutter_complete(env: EnvSpec, state: WorldState) -> bool:
    """Declutter success predicate: clutter balls outside the workspace
    region, the bowl inside the user region, the container inside the bin
    region."""
    workspace = env.regions["workspace"]
    user = env.regions["user"]
    bin_rect = env.regions["bin"]
    for obj, sl in zip(env.objects, env.object_slices):
        sub = state.s_o[sl]
        if obj.kind == "ball" and _in_rect(sub[:2], workspace):
            return False
        if obj.kind == "cup" and not obj.params["graspable"] and not _in_rect(sub[:2], user):
            return False
        if obj.kind == "cup" and obj.params["graspable"] and not _in_rect(sub[:2], bin_rect):
            return False
    return True


def task_complete(env: EnvSpec, state: WorldState) -> bool:
    """Completion predicate for environments that define one (declutter)."""
    if env.name == "declutter":
        return declutter_complete(env, state)
    return False


# ---------------------------------------------------------------------------
# Built-in environments
# ---------------------------------------------------------------------------

_ARM = ArmSpec(
    link_lengths=(0.4, 0.3, 0.2),
    joint_limits=((-2.9, 2.9), (-2.9, 2.9), (-2.9, 2.9)),
    max_joint_speed=1.0,
    dt=0.05,
    base_position=(0.0, 0.0),
)

_WORKBOX: Rect = (-0.85, 0.85, -0.35, 0.85)


def _pouring() -> EnvSpec:
    cup = ObjectSpec(
        "cup",
        "cup",
        anchor=(0.55, 0.10),
        params={"radius": 0.05, "graspable": True, "bounds": _WORKBOX,
                "pour_tilt": 2.0, "pour_over": "bowl"},
    )
    bowl = ObjectSpec("bowl", "fixed-cup-target", anchor=(0.15, 0.55), params={"radius": 0.09})
    return EnvSpec(
        name="pouring",
        arm=_ARM,
        objects=(cup, bowl),
        reset_ranges=(
            ((0.50, 0.62), (0.05, 0.17), (0.0, 0.0), (0.0, 0.0)),
            (),
        ),
        home=(0.35, 0.45, -0.5),
        latent_dim=1,
    )


def _opening() -> EnvSpec:
    drawer = ObjectSpec(
        "drawer",
        "drawer",
        anchor=(0.55, 0.40),
        params={"axis": (0.0, -1.0), "q_max": 0.5},
    )
    return EnvSpec(
        name="opening",
        arm=_ARM,
        objects=(drawer,),
        reset_ranges=(((0.0, 0.1),),),
        home=(2.2, -1.2, -0.6),
        latent_dim=1,
    )


def _scooping() -> EnvSpec:
    lid = ObjectSpec(
        "lid",
        "lid",
        anchor=(0.45, 0.35),
        params={"pivot": (0.45, 0.35), "radius": 0.22, "closed_angle": -0.9,
                "max_angle": 1.8},
    )
    return EnvSpec(
        name="scooping",
        arm=_ARM,
        objects=(lid,),
        reset_ranges=(((0.0, 0.25),),),
        home=(0.2, 0.5, 0.4),
        latent_dim=1,
    )


def _pushing() -> EnvSpec:
    ball = ObjectSpec(
        "ball",
        "ball",
        anchor=(0.45, 0.25),
        params={"radius": 0.06, "bounds": _WORKBOX},
    )
    # Home puts the EE just above the ball's reset box (clearance ~0.13,
    # outside the shove gap) so episodes test pushing, not long-range reach.
    return EnvSpec(
        name="pushing",
        arm=_ARM,
        objects=(ball,),
        reset_ranges=(((0.38, 0.52), (0.18, 0.32)),),
        home=(1.2, -0.3, -1.8),
        latent_dim=2,
    )


def _reaching() -> EnvSpec:
    spots = [(0.5, 0.42), (0.62, -0.02), (-0.42, 0.45)]
    cups = tuple(
        ObjectSpec(
            f"cup{i}",
            "fixed-cup-target",
            anchor=spot,
            params={"radius": 0.05, "proximity_state": True, "proximity_radius": 0.12},
        )
        for i, spot in enumerate(spots)
    )
    return EnvSpec(
        name="reaching",
        arm=_ARM,
        objects=cups,
        reset_ranges=(((0.0, 0.0),),) * 3,
        home=(0.7, -0.5, -0.2),
        latent_dim=1,
    )


def _declutter() -> EnvSpec:
    workspace: Rect = (0.05, 0.62, 0.05, 0.62)
    user: Rect = (-0.1, 0.45, -0.32, 0.02)
    bin_rect: Rect = (0.52, 0.78, -0.28, -0.05)
    objects = (
        ObjectSpec("clutter0", "ball", anchor=(0.22, 0.38),
                   params={"radius": 0.05, "bounds": _WORKBOX}),
        ObjectSpec("clutter1", "ball", anchor=(0.42, 0.50),
                   params={"radius": 0.05, "bounds": _WORKBOX}),
        ObjectSpec("bowl", "cup", anchor=(0.32, 0.22),
                   params={"radius": 0.07, "graspable": False, "bounds": _WORKBOX}),
        ObjectSpec("container", "cup", anchor=(0.55, 0.35),
                   params={"radius": 0.05, "graspable": True, "bounds": _WORKBOX,
                           "pour_tilt": 2.0, "pour_over": "bowl"}),
        ObjectSpec("bin", "bin", anchor=(0.65, -0.16),
                   params={"aperture": bin_rect}),
    )
    return EnvSpec(
        name="declutter",
        arm=_ARM,
        objects=objects,
        reset_ranges=(
            ((0.18, 0.26), (0.34, 0.42)),
            ((0.38, 0.46), (0.46, 0.54)),
            ((0.28, 0.36), (0.18, 0.26)),
            ((0.51, 0.59), (0.31, 0.39), (0.0, 0.0), (0.0, 0.0)),
            (),
        ),
        home=(0.9, -0.5, -0.3),
        horizon=400,
        latent_dim=2,
        latent_spaces=2,
        regions={"workspace": workspace, "user": user, "bin": bin_rect},
    )


def registry() -> list[EnvSpec]:
    """All built-in environments."""
    return [_pouring(), _opening(), _scooping(), _pushing(), _reaching(), _declutter()]


def get_env(name: str) -> EnvSpec:
    for env in registry():
        if env.name == name:
            return env
    raise NotFound(f"no built-in environment named {name!r}")


# ---------------------------------------------------------------------------
# Environment files
# ---------------------------------------------------------------------------

_ENV_KEYS = {"version", "name", "arm", "home", "objects", "horizon",
             "latent_dim", "latent_spaces", "regions"}
_ARM_KEYS = {"link_lengths", "joint_limits", "max_joint_speed", "dt", "base_position"}
_OBJ_KEYS = {"name", "kind", "anchor", "reset", "params"}


def _reject_unknown(mapping: dict, allowed: set, where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ContractViolation(f"unknown key(s) {sorted(unknown)} in {where}")


def load_env_file(path) -> EnvSpec:
    """Load an environment definition from a YAML file.

    Schema (version 1) mirrors EnvSpec; see README for the documented keys.
    Unknown keys are rejected so typos fail loudly.
    """
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ContractViolation(f"{path}: environment file must be a mapping")
    _reject_unknown(doc, _ENV_KEYS, str(path))
    if doc.get("version") != 1:
        raise ContractViolation(f"{path}: unsupported environment file version")
    arm_doc = dict(doc["arm"])
    _reject_unknown(arm_doc, _ARM_KEYS, f"{path} arm")
    arm = ArmSpec(
        link_lengths=tuple(arm_doc["link_lengths"]),
        joint_limits=tuple(tuple(pair) for pair in arm_doc["joint_limits"]),
        max_joint_speed=float(arm_doc.get("max_joint_speed", 1.0)),
        dt=float(arm_doc.get("dt", 0.05)),
        base_position=tuple(arm_doc.get("base_position", (0.0, 0.0))),
    )
    objects, ranges = [], []
    for obj_doc in doc["objects"]:
        obj_doc = dict(obj_doc)
        _reject_unknown(obj_doc, _OBJ_KEYS, f"{path} object")
        params = dict(obj_doc.get("params", {}))
        for key in ("axis", "pivot", "bounds", "aperture"):
            if key in params:
                params[key] = tuple(params[key])
        objects.append(
            ObjectSpec(
                name=obj_doc["name"],
                kind=obj_doc["kind"],
                anchor=tuple(obj_doc["anchor"]),
                params=params,
            )
        )
        ranges.append(tuple(tuple(pair) for pair in obj_doc.get("reset", ())))
    return EnvSpec(
        name=doc["name"],
        arm=arm,
        objects=tuple(objects),
        reset_ranges=tuple(ranges),
        home=tuple(doc["home"]),
        horizon=int(doc.get("horizon", 200)),
        latent_dim=int(doc.get("latent_dim", 1)),
        latent_spaces=int(doc.get("latent_spaces", 1)),
        regions={k: tuple(v) for k, v in doc.get("regions", {}).items()},
    )


def resolve_env(name_or_path: str) -> EnvSpec:
    """Look up a built-in environment by name, or load a YAML file path."""
    try:
        return get_env(name_or_path)
    except NotFound:
        import os

        if os.path.exists(name_or_path):
            return load_env_file(name_or_path)
        raise
