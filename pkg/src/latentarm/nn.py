"""Small fully connected networks with explicit forward/backward math and an
adaptive-moment optimizer. Everything is float64 numpy; no autograd framework.

Weight convention: layer l maps h -> h @ W + b with W shaped (fan_in, fan_out),
so batches are rows. backward() returns exact reverse-mode gradients of
sum(output * upstream) with respect to every parameter and the input.
"""

from __future__ import annotations

import json
import os
from typing import Optional

import numpy as np

from .errors import ContractViolation, NonFiniteError

ACTIVATIONS = ("tanh", "relu", "identity")


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(z)
    if name == "relu":
        return np.maximum(z, 0.0)
    return z


def _act_grad(name: str, z: np.ndarray, y: np.ndarray) -> np.ndarray:
    # dy/dz expressed from pre-activation z and post-activation y.
    if name == "tanh":
        return 1.0 - y * y
    if name == "relu":
        return (z > 0.0).astype(float)
    return np.ones_like(z)


def _require_finite(arr: np.ndarray, what: str) -> None:
    # isfinite(sum) is one reduction; NaN/Inf both poison the sum.
    if not np.isfinite(np.sum(arr)):
        raise NonFiniteError(f"non-finite values in {what}")


class Network:
    """Feed-forward MLP. ``activations`` has one entry per weight layer."""

    def __init__(self, layer_sizes, activations, rng_seed: int = 0):
        layer_sizes = [int(w) for w in layer_sizes]
        activations = list(activations)
        if len(layer_sizes) < 2:
            raise ContractViolation("need at least an input and an output width")
        if any(w < 1 for w in layer_sizes):
            raise ContractViolation("layer widths must be positive")
        if len(activations) != len(layer_sizes) - 1:
            raise ContractViolation("one activation per weight layer required")
        for act in activations:
            if act not in ACTIVATIONS:
                raise ContractViolation(f"unknown activation {act!r}")
        self.layer_sizes = layer_sizes
        self.activations = activations
        self.rng_seed = int(rng_seed)
        rng = np.random.default_rng(rng_seed)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def in_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def out_dim(self) -> int:
        return self.layer_sizes[-1]

    def parameters(self) -> list[np.ndarray]:
        """Flat list [W0, b0, W1, b1, ...]; mutating entries mutates the net."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def _check_input(self, x) -> tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ContractViolation(
                f"input has shape {np.asarray(x).shape}, expected (..., {self.in_dim})"
            )
        return x, single

    def forward(self, x) -> np.ndarray:
        """Evaluate on a vector or a batch of row vectors."""
        h, single = self._check_input(x)
        for w, b, act in zip(self.weights, self.biases, self.activations):
            h = _act(act, h @ w + b)
        _require_finite(h, "network output")
        return h[0] if single else h

    def _forward_cached(self, x: np.ndarray):
        hs = [x]  # post-activation per layer, hs[0] = input
        zs = []  # pre-activation per layer
        h = x
        for w, b, act in zip(self.weights, self.biases, self.activations):
            z = h @ w + b
            h = _act(act, z)
            zs.append(z)
            hs.append(h)
        _require_finite(h, "network output")
        return hs, zs

    def backward(self, x, upstream):
        """Gradients of sum(forward(x) * upstream).

        Returns (param_grads, input_grad) with param_grads ordered like
        parameters(). Accepts a single vector or a batch; upstream must match
        the corresponding output shape.
        """
        x_b, single = self._check_input(x)
        up = np.asarray(upstream, dtype=float)
        if single:
            up = up[None, :]
        if up.shape != (x_b.shape[0], self.out_dim):
            raise ContractViolation(
                f"upstream gradient has shape {np.asarray(upstream).shape}, "
                f"expected {(x_b.shape[0], self.out_dim)}"
            )
        hs, zs = self._forward_cached(x_b)
        grads: list[np.ndarray] = []
        delta = up
        for layer in range(len(self.weights) - 1, -1, -1):
            dz = delta * _act_grad(self.activations[layer], zs[layer], hs[layer + 1])
            dw = hs[layer].T @ dz
            db = dz.sum(axis=0)
            grads[:0] = [dw, db]
            delta = dz @ self.weights[layer].T
        _require_finite(delta, "input gradient")
        return grads, (delta[0] if single else delta)

    def clone(self) -> "Network":
        net = Network(self.layer_sizes, self.activations, self.rng_seed)
        net.weights = [w.copy() for w in self.weights]
        net.biases = [b.copy() for b in self.biases]
        return net

    def copy_from(self, other: "Network") -> None:
        for mine, theirs in zip(self.parameters(), other.parameters()):
            if mine.shape != theirs.shape:
                raise ContractViolation("parameter shapes do not match")
            mine[...] = theirs


class Adam:
    """Adaptive-moment estimation with bias correction.

    Owns one (m, v) pair per parameter array; step() mutates the parameter
    arrays in place and returns them. Non-finite gradients raise instead of
    corrupting the parameters.
    """

    def __init__(self, params: list, lr: float = 3e-4, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        if lr <= 0:
            raise ContractViolation("learning rate must be positive")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self._m = [np.zeros_like(p) for p in params]
        self._v = [np.zeros_like(p) for p in params]
        self._shapes = [p.shape for p in params]

    def step(self, params: list, grads: list) -> list:
        if len(params) != len(self._shapes) or len(grads) != len(self._shapes):
            raise ContractViolation("parameter/gradient count mismatch")
        for p, g, shape in zip(params, grads, self._shapes):
            if p.shape != shape or np.asarray(g).shape != shape:
                raise ContractViolation("parameter/gradient shape mismatch")
            if not np.isfinite(np.sum(g)):
                raise NonFiniteError("non-finite gradient in optimizer step")
        self.step_count += 1
        t = self.step_count
        bc1 = 1.0 - self.beta1 ** t
        bc2 = 1.0 - self.beta2 ** t
        for p, g, m, v in zip(params, grads, self._m, self._v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * np.square(g)
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)
        return params


CHECKPOINT_FORMAT = "latentarm-net"
CHECKPOINT_VERSION = 1


def save_network(net: Network, path) -> None:
    """Write a versioned JSON checkpoint (full float64 repr round-trip)."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "layer_sizes": net.layer_sizes,
        "activations": net.activations,
        "rng_seed": net.rng_seed,
        "layers": [
            {"w": w.tolist(), "b": b.tolist()}
            for w, b in zip(net.weights, net.biases)
        ],
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(doc, fh)
    os.replace(tmp, path)


def load_network(path) -> Network:
    """Load a checkpoint, rejecting anything whose shapes do not line up."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != CHECKPOINT_FORMAT or doc.get("version") != CHECKPOINT_VERSION:
        raise ContractViolation(f"{path}: not a recognized network checkpoint")
    net = Network(doc["layer_sizes"], doc["activations"], doc.get("rng_seed", 0))
    layers = doc["layers"]
    if len(layers) != len(net.weights):
        raise ContractViolation(f"{path}: wrong layer count")
    for i, layer in enumerate(layers):
        w = np.asarray(layer["w"], dtype=float)
        b = np.asarray(layer["b"], dtype=float)
        if w.shape != net.weights[i].shape or b.shape != net.biases[i].shape:
            raise ContractViolation(
                f"{path}: layer {i} shapes {w.shape}/{b.shape} do not match "
                f"declared sizes"
            )
        net.weights[i] = w
        net.biases[i] = b
    for arr in net.parameters():
        _require_finite(arr, "loaded parameters")
    return net
