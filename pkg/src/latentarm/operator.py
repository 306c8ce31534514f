"""Simulated operation and evaluation: a greedy one-step-lookahead latent
controller, scripted demonstrators that stand in for human demo collection,
Gaussian action-noise corruption, and the benchmark harness that compares
decoders trained on different data sources.
"""

from __future__ import annotations

import csv
import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import envs as envmod
from .envs import CONTACT_RADIUS, EE_RADIUS, EnvSpec, WorldState, _in_rect
from .errors import ContractViolation
from .kinematics import ee_tilt, forward_kinematics, resolved_rate, resolved_rate_full
from .latent import AeParams, Dataset, LatentPolicy, decode_batch, train_autoencoder
from .sac import Transition


@dataclass(frozen=True)
class GoalSpec:
    """Target object-state vector with a tolerance and a step budget."""

    env_name: str
    goal: tuple
    tolerance: float
    step_budget: int

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ContractViolation("tolerance must be > 0")
        if self.step_budget < 0:
            raise ContractViolation("step budget must be >= 0")

    @property
    def goal_vec(self) -> np.ndarray:
        return np.asarray(self.goal, dtype=float)


@dataclass
class EvalResult:
    """Outcome of one controlled episode; error is the minimum over the whole
    trajectory including the start state."""

    final_state_error: float
    steps: int
    states: list
    errors: list


def _check_goal(env: EnvSpec, goal: GoalSpec, compare: str) -> np.ndarray:
    vec = goal.goal_vec
    if compare == "full":
        if vec.shape != (env.obs_dim,):
            raise ContractViolation("full-state goal must match obs width")
        return vec
    if vec.shape != (env.object_state_dim,):
        raise ContractViolation(
            f"goal has shape {vec.shape}, expected ({env.object_state_dim},)"
        )
    lo, hi = env.state_bounds()
    if np.any(vec < lo - 1e-9) or np.any(vec > hi + 1e-9):
        raise ContractViolation("goal lies outside object state ranges")
    return vec


def _error(vec: np.ndarray, state: WorldState, compare: str) -> float:
    achieved = state.flat() if compare == "full" else state.s_o
    return float(np.linalg.norm(vec - achieved))


def latent_grid(d: int, points: int) -> np.ndarray:
    """Uniform grid over [-1,1]^d, one row per candidate."""
    axes = [np.linspace(-1.0, 1.0, points)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _grid_argmin(objective: np.ndarray, grid: np.ndarray) -> int:
    """Total deterministic order: objective, then ||z||, then lexicographic."""
    norms = np.linalg.norm(grid, axis=1)
    keys = tuple(grid[:, j] for j in range(grid.shape[1] - 1, -1, -1))
    order = np.lexsort(keys + (norms, objective))
    return int(order[0])


def greedy_control(
    lp: LatentPolicy,
    env: EnvSpec,
    start: WorldState,
    goal: GoalSpec,
    grid_points: int = 21,
    compare: str = "objects",
) -> EvalResult:
    """One-step-lookahead grid search over the latent space.

    Each step decodes every grid candidate at the current state, simulates
    one step, and applies the candidate whose successor is closest to the
    goal (object components by default, full state with compare="full").
    """
    if compare not in ("objects", "full"):
        raise ContractViolation("compare must be 'objects' or 'full'")
    if len(lp.s_mean) != env.obs_dim or lp.n_actions != env.n_actions:
        raise ContractViolation("latent policy dimensions do not match environment")
    vec = _check_goal(env, goal, compare)
    grid = latent_grid(lp.latent_dim, grid_points)
    state = start
    errors = [_error(vec, state, compare)]
    states = [state]
    steps = 0
    for _ in range(goal.step_budget):
        if errors[-1] <= goal.tolerance:
            break
        actions = decode_batch(lp, grid, state.flat())
        objective = np.empty(len(grid))
        nexts = []
        for i in range(len(grid)):
            nxt = envmod.step(env, state, actions[i])
            nexts.append(nxt)
            achieved = nxt.flat() if compare == "full" else nxt.s_o
            diff = vec - achieved
            objective[i] = float(diff @ diff)
        best = _grid_argmin(objective, grid)
        state = nexts[best]
        states.append(state)
        errors.append(_error(vec, state, compare))
        steps += 1
    return EvalResult(min(errors), steps, states, errors)


def random_control(
    lp: LatentPolicy,
    env: EnvSpec,
    start: WorldState,
    goal: GoalSpec,
    seed: int,
    compare: str = "objects",
) -> EvalResult:
    """Control baseline: uniformly random latent inputs through the same
    decoder, same budget and early-stop rule as greedy_control."""
    vec = _check_goal(env, goal, compare)
    rng = np.random.default_rng(seed)
    state = start
    errors = [_error(vec, state, compare)]
    states = [state]
    steps = 0
    for _ in range(goal.step_budget):
        if errors[-1] <= goal.tolerance:
            break
        z = rng.uniform(-1.0, 1.0, lp.latent_dim)
        action = decode_batch(lp, z[None, :], state.flat())[0]
        state = envmod.step(env, state, action)
        states.append(state)
        errors.append(_error(vec, state, compare))
        steps += 1
    return EvalResult(min(errors), steps, states, errors)


# ---------------------------------------------------------------------------
# Scripted demonstrators
# ---------------------------------------------------------------------------

_EE_SPEED_CAP = 1.2
_TILT_GAIN = 3.0
TELEOP_GAIN = 5.0
DEMO_EPISODE_COUNTS = {"teleop": 82, "kinesthetic": 118}


@dataclass
class _Phase:
    target: Callable[[WorldState, np.ndarray], np.ndarray]
    done: Callable[[WorldState, np.ndarray], bool]
    tilt_target: Optional[float] = None
    jitterable: bool = True


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def _carrot(ee: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Steer along an annulus arc for large angular moves so the arm sweeps
    around the base instead of cutting through poorly conditioned poses."""
    r1, r2 = np.linalg.norm(ee), np.linalg.norm(target)
    if r1 < 0.2 or r2 < 0.2:
        return target
    dphi = _wrap_angle(math.atan2(target[1], target[0]) - math.atan2(ee[1], ee[0]))
    if abs(dphi) <= 0.45:
        return target
    f = 0.45 / abs(dphi)
    phi = math.atan2(ee[1], ee[0]) + math.copysign(0.45, dphi)
    r = r1 + f * (r2 - r1)
    return np.array([r * math.cos(phi), r * math.sin(phi)])


class _Scripted:
    """Waypoint proportional controller in EE space over a phase list."""

    def __init__(self, env: EnvSpec, phases: list, kp: float,
                 jitter: Optional[list] = None, noise_sigma: float = 0.0,
                 rng: Optional[np.random.Generator] = None):
        self.env = env
        self.phases = phases
        self.kp = kp
        self.jitter = jitter or [np.zeros(2)] * len(phases)
        self.noise_sigma = noise_sigma
        self.rng = rng
        self.idx = 0

    @property
    def finished(self) -> bool:
        return self.idx >= len(self.phases)

    def act(self, state: WorldState) -> np.ndarray:
        arm = self.env.arm
        ee = forward_kinematics(arm, state.s_r)
        while self.idx < len(self.phases) and self.phases[self.idx].done(state, ee):
            self.idx += 1
        if self.finished:
            return np.zeros(arm.n_joints)
        phase = self.phases[self.idx]
        target = np.asarray(phase.target(state, ee), dtype=float)
        if phase.jitterable:
            target = target + self.jitter[self.idx]
        v = self.kp * (_carrot(ee, target) - ee)
        speed = float(np.linalg.norm(v))
        if speed > _EE_SPEED_CAP:
            v *= _EE_SPEED_CAP / speed
        if phase.tilt_target is None:
            qdot, _ = resolved_rate(arm, state.s_r, v)
        else:
            rate = _TILT_GAIN * (phase.tilt_target - ee_tilt(state.s_r))
            qdot, _ = resolved_rate_full(arm, state.s_r, v, rate)
        if self.noise_sigma > 0.0 and self.rng is not None:
            qdot = qdot + self.rng.normal(0.0, self.noise_sigma, arm.n_joints)
        return np.clip(qdot, -arm.max_joint_speed, arm.max_joint_speed)


def _dwell(steps: int) -> Callable:
    left = [steps]

    def done(state, ee) -> bool:
        left[0] -= 1
        return left[0] < 0

    return done


def _never(state, ee) -> bool:
    return False


def _obj_slice(env: EnvSpec, name: str):
    for obj, sl in zip(env.objects, env.object_slices):
        if obj.name == name:
            return obj, sl
    raise ContractViolation(f"no object named {name!r} in {env.name}")


def _push_phases(env: EnvSpec, obj, sl, target_fn, done, stage_dist=0.22,
                 bite=0.04) -> list:
    """Stage behind a disc, then push it toward a (possibly moving) target."""
    gap = obj.params["radius"] + EE_RADIUS

    def direction(state):
        pos = state.s_o[sl][:2]
        tgt = target_fn(state)
        d = tgt - pos
        n = np.linalg.norm(d)
        return (d / n if n > 1e-9 else np.array([1.0, 0.0])), pos

    def stage_target(state, ee):
        dirn, pos = direction(state)
        staging = pos - dirn * stage_dist
        # Detour around the disc when the path to staging would cut across
        # it; only the segment interior counts, so paths leading away from
        # the disc never trigger (that caused target flip-flop loops).
        seg = staging - ee
        seg_len2 = float(seg @ seg)
        if seg_len2 > 1e-12:
            t = float((pos - ee) @ seg / seg_len2)
            if 0.02 < t < 1.0 and np.linalg.norm(ee + t * seg - pos) < gap + 0.04:
                away = ee - pos
                away = away / max(float(np.linalg.norm(away)), 1e-9)
                perp = np.array([-away[1], away[0]])
                if float(perp @ (staging - pos)) < 0.0:
                    perp = -perp
                return pos + perp * stage_dist
        return staging

    def stage_done(state, ee):
        dirn, pos = direction(state)
        return np.linalg.norm(ee - (pos - dirn * stage_dist)) <= 0.04

    def push_target(state, ee):
        dirn, pos = direction(state)
        return pos - dirn * (gap - bite)

    def retreat_target(state, ee):
        dirn, pos = direction(state)
        return pos - dirn * (gap + 0.06)

    return [
        _Phase(stage_target, stage_done),
        _Phase(push_target, done, jitterable=False),
        _Phase(retreat_target, _dwell(4), jitterable=False),
    ]


def _build_phases(env: EnvSpec, goal_vec: Optional[np.ndarray]) -> list:
    name = env.name
    phases: list = []
    if name == "opening":
        obj, sl = _obj_slice(env, "drawer")
        axis = np.asarray(obj.params["axis"])
        anchor = np.asarray(obj.anchor)
        q_goal = float(goal_vec[0])

        def handle(state, ee):
            return anchor + state.s_o[sl][0] * axis

        def pull_target(state, ee):
            # The drawer copies EE displacement along the axis, so command a
            # displacement from wherever the EE grabbed on, not a handle pose.
            q = state.s_o[sl][0]
            return ee + axis * float(np.clip(q_goal - q, -0.12, 0.12))

        phases = [
            _Phase(handle, lambda s, e: np.linalg.norm(e - (anchor + s.s_o[sl][0] * axis)) <= 0.03),
            _Phase(pull_target, lambda s, e: abs(s.s_o[sl][0] - q_goal) <= 0.02,
                   jitterable=False),
            _Phase(handle, _never, jitterable=False),
        ]
    elif name == "pushing":
        obj, sl = _obj_slice(env, "ball")
        tgt = np.asarray(goal_vec[:2], dtype=float)
        done = lambda s, e: np.linalg.norm(s.s_o[sl][:2] - tgt) <= 0.03
        phases = _push_phases(env, obj, sl, lambda s: tgt, done)
        phases.append(_Phase(lambda s, e: e, _never, jitterable=False))
    elif name == "pouring":
        cup, csl = _obj_slice(env, "cup")
        bowl, _ = _obj_slice(env, "bowl")
        bowl_at = np.asarray(bowl.anchor, dtype=float)
        pour_tilt = cup.params["pour_tilt"]
        phases = [
            _Phase(lambda s, e: s.s_o[csl][:2], lambda s, e: s.s_o[csl][3] > 0.5),
            _Phase(lambda s, e: bowl_at, lambda s, e: np.linalg.norm(s.s_o[csl][:2] - bowl_at) <= 0.04,
                   tilt_target=0.0),
            _Phase(lambda s, e: bowl_at, lambda s, e: s.s_o[csl][3] < 0.5,
                   tilt_target=pour_tilt + 0.4, jitterable=False),
            _Phase(lambda s, e: bowl_at + np.array([0.18, 0.0]), _never,
                   tilt_target=0.0, jitterable=False),
        ]
    elif name == "scooping":
        obj, sl = _obj_slice(env, "lid")
        pivot = np.asarray(obj.params["pivot"])
        radius = obj.params["radius"]
        closed = obj.params["closed_angle"]
        th_goal = float(goal_vec[0])

        def handle(state, ee):
            ang = closed + state.s_o[sl][0]
            return pivot + radius * np.array([math.cos(ang), math.sin(ang)])

        def arc_target(state, ee):
            # Like the drawer: the lid copies tangential EE displacement, so
            # command a tangential displacement relative to the current EE.
            th = state.s_o[sl][0]
            ang = closed + th
            tangent = np.array([-math.sin(ang), math.cos(ang)])
            return ee + tangent * radius * float(np.clip(th_goal - th, -0.25, 0.25))

        phases = [
            _Phase(handle, lambda s, e: np.linalg.norm(e - handle(s, e)) <= 0.03),
            _Phase(arc_target, lambda s, e: abs(s.s_o[sl][0] - th_goal) <= 0.025,
                   jitterable=False),
            _Phase(handle, _never, jitterable=False),
        ]
    elif name == "reaching":
        # Tour the cups along the shortest route from the home pose so no leg
        # backtracks; with three cups, brute force over orderings is cheap.
        home_ee = envmod.forward_kinematics(env.arm, np.asarray(env.home))

        def tour_length(order):
            pts = [home_ee] + [np.asarray(o.anchor, dtype=float) for o in order]
            return sum(float(np.linalg.norm(b - a)) for a, b in zip(pts, pts[1:]))

        tour = min(itertools.permutations(env.objects), key=tour_length)
        for obj in tour:
            at = np.asarray(obj.anchor, dtype=float)
            rad = obj.params["proximity_radius"]
            phases.append(_Phase(
                lambda s, e, at=at: at,
                lambda s, e, at=at, rad=rad: np.linalg.norm(e - at) <= rad - 0.03,
            ))
            phases.append(_Phase(lambda s, e, at=at: at, _dwell(4)))
        phases.append(_Phase(lambda s, e: e, _never, jitterable=False))
    elif name == "declutter":
        workspace = env.regions["workspace"]
        user = env.regions["user"]

        def exit_target(pos):
            # Nearest point past the workspace edge, with clearance.
            gaps = [pos[0] - workspace[0], workspace[1] - pos[0],
                    pos[1] - workspace[2], workspace[3] - pos[1]]
            side = int(np.argmin(gaps))
            out = np.array(pos, dtype=float)
            if side == 0:
                out[0] = workspace[0] - 0.12
            elif side == 1:
                out[0] = workspace[1] + 0.12
            elif side == 2:
                out[1] = workspace[2] - 0.12
            else:
                out[1] = workspace[3] + 0.12
            return out

        for ball_name in ("clutter0", "clutter1"):
            obj, sl = _obj_slice(env, ball_name)

            def outside(state, ee, sl=sl):
                p = state.s_o[sl][:2]
                margin = min(p[0] - workspace[0], workspace[1] - p[0],
                             p[1] - workspace[2], workspace[3] - p[1])
                return margin < -0.03

            phases.extend(_push_phases(
                env, obj, sl,
                lambda s, sl=sl: exit_target(s.s_o[sl][:2]),
                outside, stage_dist=0.20,
            ))
        cont, cont_sl = _obj_slice(env, "container")
        bin_rect = env.regions["bin"]
        bin_center = np.array([(bin_rect[0] + bin_rect[1]) / 2,
                               (bin_rect[2] + bin_rect[3]) / 2])
        phases.append(_Phase(lambda s, e: s.s_o[cont_sl][:2],
                             lambda s, e: s.s_o[cont_sl][3] > 0.5))
        phases.append(_Phase(lambda s, e: bin_center,
                             lambda s, e: s.s_o[cont_sl][3] < 0.5 and _in_rect(s.s_o[cont_sl][:2], bin_rect),
                             tilt_target=0.0, jitterable=False))
        bowl, bowl_sl = _obj_slice(env, "bowl")
        user_center = np.array([(user[0] + user[1]) / 2, (user[2] + user[3]) / 2])
        shrunk = (user[0] + 0.04, user[1] - 0.04, user[2] + 0.04, user[3] - 0.04)
        phases.extend(_push_phases(
            env, bowl, bowl_sl, lambda s: user_center,
            lambda s, e: _in_rect(s.s_o[bowl_sl][:2], shrunk),
            stage_dist=0.20,
        ))
        phases.append(_Phase(lambda s, e: e, _never, jitterable=False))
    else:
        raise ContractViolation(f"no scripted demonstrator for {name!r}")
    return phases


def default_goals(env: EnvSpec, count: int, seed: int) -> list[GoalSpec]:
    """Mid-range achievable goals for each built-in environment."""
    rng = np.random.default_rng(seed)
    goals = []
    for _ in range(count):
        if env.name == "opening":
            vec = [float(rng.uniform(0.18, 0.48))]
        elif env.name == "scooping":
            vec = [float(rng.uniform(0.5, 1.6))]
        elif env.name == "pushing":
            while True:
                vec = [float(rng.uniform(0.15, 0.7)), float(rng.uniform(-0.1, 0.55))]
                far_enough = math.hypot(vec[0] - 0.45, vec[1] - 0.25) >= 0.18
                if far_enough and 0.3 <= math.hypot(*vec) <= 0.8:
                    break
        elif env.name == "pouring":
            bowl, _ = _obj_slice(env, "bowl")
            cup, _ = _obj_slice(env, "cup")
            vec = [bowl.anchor[0], bowl.anchor[1], cup.params["pour_tilt"], 0.0]
        elif env.name == "reaching":
            vec = [1.0] * len(env.objects)
        elif env.name == "declutter":
            vec = _declutter_goal_vec(env)
        else:
            raise ContractViolation(f"no default goals for {env.name!r}")
        goals.append(GoalSpec(env.name, tuple(vec), tolerance=0.03, step_budget=150))
    return goals


def _declutter_goal_vec(env: EnvSpec) -> list[float]:
    user = env.regions["user"]
    bin_rect = env.regions["bin"]
    vec: list[float] = []
    for obj, _ in zip(env.objects, env.object_slices):
        if obj.kind == "ball":
            vec.extend([env.regions["workspace"][0] - 0.12, obj.anchor[1]])
        elif obj.kind == "cup" and not obj.params["graspable"]:
            vec.extend([(user[0] + user[1]) / 2, (user[2] + user[3]) / 2])
        elif obj.kind == "cup":
            vec.extend([(bin_rect[0] + bin_rect[1]) / 2,
                        (bin_rect[2] + bin_rect[3]) / 2, 0.0, 0.0])
    return vec


def demo_episodes(
    env: EnvSpec,
    style: str,
    goals: list[GoalSpec],
    seed: int,
    episodes: Optional[int] = None,
) -> tuple[list[list[Transition]], list[bool]]:
    """Run scripted episodes and return per-episode transition lists plus
    success flags. Episodes always run the full horizon; success means the
    controller worked through every task phase."""
    if style not in ("teleop", "kinesthetic"):
        raise ContractViolation(f"unknown demonstration style {style!r}")
    if not goals:
        raise ContractViolation("at least one goal required")
    episodes = DEMO_EPISODE_COUNTS[style] if episodes is None else episodes
    # Separate streams: resets match across styles for the same seed/goals,
    # so style comparisons see identical initial conditions.
    reset_rng = np.random.default_rng(seed)
    style_rng = np.random.default_rng(seed + 1)
    out: list[list[Transition]] = []
    flags: list[bool] = []
    for ep in range(episodes):
        goal = goals[ep % len(goals)]
        reset_seed = int(reset_rng.integers(0, 2**63 - 1))
        state = envmod.reset(env, reset_seed)
        phases = _build_phases(env, goal.goal_vec)
        if style == "kinesthetic":
            kp = style_rng.uniform(3.0, 7.5)
            noise = style_rng.uniform(0.01, 0.06)
            jitter = [style_rng.normal(0.0, 0.02, 2) if ph.jitterable
                      else np.zeros(2) for ph in phases]
            ctrl = _Scripted(env, phases, kp, jitter, noise, style_rng)
        else:
            ctrl = _Scripted(env, phases, TELEOP_GAIN)
        episode: list[Transition] = []
        for t in range(env.horizon):
            flat = state.flat()
            action = ctrl.act(state)
            nxt = envmod.step(env, state, action)
            episode.append(Transition(flat, np.asarray(action, float), 0.0,
                                      nxt.flat(), t == env.horizon - 1))
            state = nxt
        ctrl.act(state)  # let the last done-condition fire
        out.append(episode)
        # Every phase list ends with a hold phase; reaching it means all
        # task phases completed.
        flags.append(ctrl.idx >= len(ctrl.phases) - 1)
    return out, flags


def synth_demos(
    env: EnvSpec,
    style: str,
    goals: list[GoalSpec],
    seed: int,
    episodes: Optional[int] = None,
) -> Dataset:
    """Scripted demonstration dataset of ``episodes`` successful episodes.

    Failed episodes are excluded and replaced by extra attempts (up to 3x
    the requested count), so the dataset size stays at episodes x horizon.
    """
    want = DEMO_EPISODE_COUNTS[style] if episodes is None else episodes
    kept: list = []
    attempt_seed = seed
    attempts = 0
    while len(kept) < want and attempts < 3 * want:
        batch = want - len(kept)
        eps, flags = demo_episodes(env, style, goals, attempt_seed, batch)
        kept.extend(e for e, ok in zip(eps, flags) if ok)
        attempts += batch
        attempt_seed += 7777
    if not kept:
        raise ContractViolation("every scripted episode failed; no data")
    states, actions = [], []
    for episode in kept[:want]:
        for tr in episode:
            states.append(tr.s)
            actions.append(tr.a)
    source = "teleop-demo" if style == "teleop" else "kinesthetic-demo"
    return Dataset(env.name, source, np.array(states), np.array(actions))


def add_noise(data: Dataset, sigma: float, seed: int,
              max_action: float = 1.0) -> Dataset:
    """Corrupt actions with clipped zero-mean Gaussian noise; sigma=0 is the
    bitwise identity."""
    if sigma < 0:
        raise ContractViolation("sigma must be >= 0")
    if sigma == 0:
        return Dataset(data.env_name, data.source, data.states.copy(),
                       data.actions.copy())
    rng = np.random.default_rng(seed)
    noisy = data.actions + rng.normal(0.0, sigma, data.actions.shape)
    return Dataset(data.env_name, data.source, data.states.copy(),
                   np.clip(noisy, -max_action, max_action))


def run_benchmark(
    env: EnvSpec,
    conditions: list[dict],
    goals: list[GoalSpec],
    repetitions: int,
    seed: int,
    ae_params: Optional[AeParams] = None,
    grid_points: int = 21,
) -> tuple[list[dict], list[dict]]:
    """Train one decoder per condition and evaluate greedy control on every
    goal x repetition. Returns (per-episode rows, per-condition summary)."""
    if repetitions < 1:
        raise ContractViolation("repetitions must be >= 1")
    rows: list[dict] = []
    summary: list[dict] = []
    for ci, cond in enumerate(conditions):
        name, data, sigma = cond["name"], cond["data"], cond.get("sigma", 0.0)
        noisy = add_noise(data, sigma, seed + 1000 + ci,
                          max_action=env.arm.max_joint_speed)
        params = ae_params or AeParams()
        lp, _ = train_autoencoder(noisy, env.latent_dim, env, params)
        errs = []
        for gi, goal in enumerate(goals):
            for rep in range(repetitions):
                start = envmod.reset(env, seed + 7919 * gi + rep)
                res = greedy_control(lp, env, start, goal, grid_points)
                errs.append(res.final_state_error)
                rows.append({
                    "condition": name, "env": env.name, "goal_id": gi,
                    "repetition": rep,
                    "final_state_error": res.final_state_error,
                    "steps": res.steps,
                })
        summary.append({
            "condition": name, "env": env.name,
            "mean_error": float(np.mean(errs)),
            "sd_error": float(np.std(errs)),
            "episodes": len(errs),
        })
    return rows, summary


RESULT_FIELDS = ("condition", "env", "goal_id", "repetition",
                 "final_state_error", "steps")


def save_results(rows: list[dict], path) -> None:
    """Delimited results table; floats use repr so reloads are exact."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in RESULT_FIELDS})
    os.replace(tmp, path)


def load_results(path) -> list[dict]:
    with open(path, newline="") as fh:
        out = []
        for row in csv.DictReader(fh):
            row["goal_id"] = int(row["goal_id"])
            row["repetition"] = int(row["repetition"])
            row["final_state_error"] = float(row["final_state_error"])
            row["steps"] = int(row["steps"])
            out.append(row)
    return out
