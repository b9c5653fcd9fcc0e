"""Symmetric random walk on Z and its diffusive rescaling.

Under the scaling S_{floor(n t)} / sqrt(n) the walk converges to Brownian
motion: increments over [s, t] become centered normals of variance t - s.
Distributional tests in the suite use fixed seeds and pre-registered
3-sigma / KS-5% bands so they stay deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange
from .sde import replica_rng


@dataclass(frozen=True)
class WalkPath:
    """steps: +-1 increments; positions: prefix sums with S_0 = 0."""

    steps: np.ndarray
    positions: np.ndarray
    seed: int


def walk(n: int, seed: int) -> WalkPath:
    """n iid +-1 steps, each sign with probability 1/2, seeded."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = replica_rng(seed, 0)
    steps = 2 * rng.integers(0, 2, size=n).astype(np.int64) - 1
    positions = np.concatenate(([0], np.cumsum(steps)))
    return WalkPath(steps=steps, positions=positions, seed=seed)


def diffusive_rescale(path: WalkPath, n: int, t_grid: np.ndarray) -> np.ndarray:
    """W_t = S_{floor(n t)} / sqrt(n) at the requested times.

    Times must satisfy 0 <= t <= len(steps)/n.
    """
    t = np.asarray(t_grid, dtype=float)
    idx = np.floor(n * t).astype(int)
    if np.any(t < 0) or np.any(idx > path.steps.size):
        raise OutOfRange(
            f"requested times outside [0, {path.steps.size / n}]"
        )
    return path.positions[idx] / np.sqrt(n)


def ensemble_rescaled(n_walks: int, n: int, t_grid: np.ndarray, seed: int,
                      chunk: int = 500) -> np.ndarray:
    """Rescaled positions for an ensemble, shape (n_walks, len(t_grid)).

    Each walk draws from its own (seed, walk_index) stream, so the ensemble
    is reproducible under any execution order.
    """
    t = np.asarray(t_grid, dtype=float)
    idx = np.floor(n * t).astype(int)
    n_steps = int(np.max(idx))
    if np.any(t < 0):
        raise OutOfRange("negative times requested")
    out = np.empty((n_walks, t.size))
    for start in range(0, n_walks, chunk):
        count = min(chunk, n_walks - start)
        block = np.empty((count, n_steps), dtype=np.int8)
        for i in range(count):
            rng = replica_rng(seed, start + i)
            block[i] = 2 * rng.integers(0, 2, size=n_steps, dtype=np.int8) - 1
        pos = np.concatenate(
            [np.zeros((count, 1), dtype=np.int64),
             np.cumsum(block, axis=1, dtype=np.int64)], axis=1)
        out[start:start + count] = pos[:, idx] / np.sqrt(n)
    return out
