"""Planar serial-arm kinematics: forward kinematics, Jacobian, and
resolved-rate inverse kinematics with a damped least-squares fallback."""

from __future__ import annotations

import numpy as np

from .errors import ContractViolation

# Below this smallest-singular-value the plain pseudo-inverse is replaced
# by damped least squares.
SINGULARITY_THRESHOLD = 0.02
DLS_DAMPING = 0.05


def _check_joints(link_lengths, s_r: np.ndarray) -> np.ndarray:
    s_r = np.asarray(s_r, dtype=float)
    if s_r.shape != (len(link_lengths),):
        raise ContractViolation(
            f"joint vector has shape {s_r.shape}, arm has {len(link_lengths)} links"
        )
    return s_r


def link_positions(arm, s_r: np.ndarray) -> np.ndarray:
    """Positions of every joint plus the end effector, shape (n+1, 2).

    Row 0 is the arm base; row i is the tip of link i. Link angles are
    cumulative: link i points along sum(s_r[:i+1]).
    """
    s_r = _check_joints(arm.link_lengths, s_r)
    angles = np.cumsum(s_r)
    pts = np.empty((len(s_r) + 1, 2))
    pts[0] = arm.base_position
    pts[1:, 0] = np.asarray(arm.link_lengths) * np.cos(angles)
    pts[1:, 1] = np.asarray(arm.link_lengths) * np.sin(angles)
    return np.cumsum(pts, axis=0)


def forward_kinematics(arm, s_r: np.ndarray) -> np.ndarray:
    """End-effector position for joint angles ``s_r`` (length n), shape (2,)."""
    return link_positions(arm, s_r)[-1]


def ee_tilt(s_r: np.ndarray) -> float:
    """End-effector orientation: the sum of all joint angles."""
    return float(np.sum(s_r))


def jacobian(arm, s_r: np.ndarray) -> np.ndarray:
    """Positional Jacobian d(ee)/d(s_r), shape (2, n)."""
    s_r = _check_joints(arm.link_lengths, s_r)
    angles = np.cumsum(s_r)
    lx = np.asarray(arm.link_lengths) * np.cos(angles)
    ly = np.asarray(arm.link_lengths) * np.sin(angles)
    # Column i sums contributions of links i..n-1 (joint i rotates all of them).
    n = len(s_r)
    jac = np.empty((2, n))
    for i in range(n):
        jac[0, i] = -np.sum(ly[i:])
        jac[1, i] = np.sum(lx[i:])
    return jac


def resolved_rate(arm, s_r: np.ndarray, ee_velocity: np.ndarray) -> tuple[np.ndarray, bool]:
    """Joint velocities realizing a desired end-effector linear velocity.

    Returns (joint_velocities, damped) where ``damped`` reports that the arm
    was near a singular configuration and damped least squares was used
    instead of the plain pseudo-inverse.
    """
    jac = jacobian(arm, s_r)
    ee_velocity = np.asarray(ee_velocity, dtype=float)
    if ee_velocity.shape != (2,):
        raise ContractViolation(f"ee velocity must have shape (2,), got {ee_velocity.shape}")
    sv = np.linalg.svd(jac, compute_uv=False)
    damped = bool(sv[-1] < SINGULARITY_THRESHOLD)
    if damped:
        jjt = jac @ jac.T + (DLS_DAMPING**2) * np.eye(2)
        qdot = jac.T @ np.linalg.solve(jjt, ee_velocity)
    else:
        qdot = np.linalg.pinv(jac) @ ee_velocity
    return qdot, damped


def resolved_rotation(arm, s_r: np.ndarray, tilt_rate: float) -> np.ndarray:
    """Joint velocities realizing a desired end-effector rotation rate.

    The planar tilt Jacobian is the all-ones row, so the minimum-norm
    solution distributes the rate evenly over the joints.
    """
    n = len(arm.link_lengths)
    _check_joints(arm.link_lengths, s_r)
    return np.full(n, float(tilt_rate) / n)


def resolved_rate_full(arm, s_r: np.ndarray, ee_velocity: np.ndarray,
                       tilt_rate: float) -> tuple[np.ndarray, bool]:
    """Joint velocities for a combined [vx, vy, tilt_rate] task.

    Stacks the positional Jacobian with the tilt row; for a 3-link arm the
    task is exactly determined. Falls back to damped least squares near
    singularities (same flag semantics as :func:`resolved_rate`).
    """
    jac = np.vstack([jacobian(arm, s_r), np.ones(len(arm.link_lengths))])
    task = np.array([ee_velocity[0], ee_velocity[1], tilt_rate], dtype=float)
    sv = np.linalg.svd(jac, compute_uv=False)
    damped = bool(sv[-1] < SINGULARITY_THRESHOLD)
    if damped:
        jjt = jac @ jac.T + (DLS_DAMPING**2) * np.eye(jac.shape[0])
        qdot = jac.T @ np.linalg.solve(jjt, task)
    else:
        qdot = np.linalg.pinv(jac) @ task
    return qdot, damped
