"""Object-state novelty reward.

A FIFO buffer of recently visited object-state vectors supports k-nearest
neighbor distance queries; the reward is the log of that distance (a
particle estimate of state entropy) minus the end-effector distance to the
nearest object, so the arm is paid for finding new object configurations
while staying near something it can move.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .envs import EnvSpec, WorldState, min_object_distance
from .errors import ContractViolation

DEFAULT_K = 12
DEFAULT_CAPACITY = 10_000
DEFAULT_EPSILON = 1e-3


class ObjectStateBuffer:
    """Ring buffer of s_O vectors with exact k-NN distance queries.

    Distances are Euclidean over raw state units, optionally weighted by a
    per-dimension scale vector (multiplied into differences, default ones).
    Brute force is deliberate: at <= 10k entries it is faster than tree
    upkeep and trivially exact.
    """

    def __init__(
        self,
        dim: int,
        k: int = DEFAULT_K,
        capacity: int = DEFAULT_CAPACITY,
        epsilon: float = DEFAULT_EPSILON,
        scale: Optional[np.ndarray] = None,
    ):
        if k < 1:
            raise ContractViolation("k must be >= 1")
        if capacity < 1:
            raise ContractViolation("capacity must be >= 1")
        if epsilon <= 0:
            raise ContractViolation("epsilon must be > 0")
        if dim < 1:
            raise ContractViolation("state dimension must be >= 1")
        self.dim = dim
        self.k = k
        self.capacity = capacity
        self.epsilon = epsilon
        self.scale = np.ones(dim) if scale is None else np.asarray(scale, dtype=float)
        if self.scale.shape != (dim,):
            raise ContractViolation("scale vector length must equal state dimension")
        self._data = np.empty((capacity, dim))
        self._size = 0
        self._next = 0

    def __len__(self) -> int:
        return self._size

    def _check(self, s_o) -> np.ndarray:
        s_o = np.asarray(s_o, dtype=float)
        if s_o.shape != (self.dim,):
            raise ContractViolation(
                f"object state has shape {s_o.shape}, expected ({self.dim},)"
            )
        return s_o

    def push(self, s_o) -> None:
        """Append one vector, evicting the oldest at capacity."""
        self._data[self._next] = self._check(s_o)
        self._next = (self._next + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def entries(self) -> np.ndarray:
        """Snapshot copy of current contents (unordered is fine for k-NN)."""
        return self._data[: self._size].copy()

    def knn_distance(self, query) -> float:
        """Distance to the k'-th nearest entry, k' = min(k, size).

        Empty buffer returns +inf; callers treating the log of this as an
        entropy term must map it to 0 (see intrinsic_reward).
        """
        query = self._check(query)
        if self._size == 0:
            return float("inf")
        diffs = (self._data[: self._size] - query) * self.scale
        dists = np.linalg.norm(diffs, axis=1)
        kth = min(self.k, self._size) - 1
        return float(np.partition(dists, kth)[kth])


def intrinsic_reward(buffer: ObjectStateBuffer, state: WorldState, env: EnvSpec) -> float:
    """Novelty-minus-proximity reward for one visited state.

    log(max(knn_distance, epsilon)) keeps revisited states finite; an empty
    buffer contributes exactly 0 to the entropy term.
    """
    if buffer.dim != env.object_state_dim:
        raise ContractViolation(
            f"buffer dimension {buffer.dim} does not match environment "
            f"object state dimension {env.object_state_dim}"
        )
    dist = buffer.knn_distance(state.s_o)
    entropy_term = 0.0 if np.isinf(dist) else float(np.log(max(dist, buffer.epsilon)))
    return entropy_term - min_object_distance(env, state)
