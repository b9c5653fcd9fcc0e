"""Euler-Maruyama simulation of overdamped gradient diffusions.

Every Monte Carlo replica owns a counter-based RNG stream derived from
(seed_base, replica_index), so ensembles are reproducible under any parallel
schedule; aggregation is ordered by replica index.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AllCensored, NonFinite
from .potentials import Potential

_NOISE_BLOCK = 1024


@dataclass(frozen=True)
class SdeRun:
    """Configuration of one simulation: dx = -grad V dt + sqrt(2 eps) dW."""

    potential: Potential
    epsilon: float
    dt: float
    x0: np.ndarray
    seed: int
    t_max: Optional[float] = None  # default horizon: 1e6 steps

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "x0", np.atleast_1d(np.asarray(self.x0, dtype=float)))

    @property
    def horizon(self) -> float:
        return 1e6 * self.dt if self.t_max is None else self.t_max


@dataclass(frozen=True)
class HittingTimeBatch:
    """Seeded sample of first-hitting times with summary statistics.

    samples holds the uncensored hitting times ordered by replica index;
    raw keeps one entry per replica (nan marks censoring at the horizon).
    """

    samples: np.ndarray
    n_attempted: int
    n_censored: int
    mean: float
    stderr: float
    seed_base: int
    raw: np.ndarray

    @staticmethod
    def from_raw(raw: np.ndarray, seed_base: int) -> "HittingTimeBatch":
        raw = np.asarray(raw, dtype=float)
        samples = raw[np.isfinite(raw)]
        n_censored = int(raw.size - samples.size)
        if samples.size == 0:
            raise AllCensored(
                f"all {raw.size} replicas were censored at the horizon; "
                "the noise intensity is too small for this time budget"
            )
        mean = float(np.mean(samples))
        stderr = float(np.std(samples, ddof=1) / np.sqrt(samples.size)) if samples.size > 1 else np.inf
        return HittingTimeBatch(samples=samples, n_attempted=raw.size,
                                n_censored=n_censored, mean=mean, stderr=stderr,
                                seed_base=seed_base, raw=raw)


def replica_rng(seed_base: int, replica_index: int) -> np.random.Generator:
    """The RNG stream owned by one replica; independent of scheduling."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed_base, spawn_key=(replica_index,))
    )


def em_step(run: SdeRun, x: np.ndarray, gaussian: np.ndarray) -> np.ndarray:
    """One Euler-Maruyama update x - grad V(x) dt + sqrt(2 eps dt) * gaussian."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    g = np.atleast_1d(run.potential.gradient(x))
    out = x - g * run.dt + np.sqrt(2 * run.epsilon * run.dt) * np.asarray(gaussian)
    if not np.all(np.isfinite(out)):
        raise NonFinite("Euler-Maruyama step overflowed; reduce dt")
    return out


def integrate_path(run: SdeRun, t_final: float, record: bool = False):
    """Single-trajectory integration up to t_final using the run's stream.

    Returns the final state, or (times, states) when record is set.
    """
    rng = replica_rng(run.seed, 0)
    n_steps = int(round(t_final / run.dt))
    x = run.x0.copy()
    states = [x.copy()] if record else None
    amp = np.sqrt(2 * run.epsilon * run.dt)
    for _ in range(n_steps):
        x = x - run.potential.gradient(x) * run.dt
        if run.epsilon > 0:
            x = x + amp * rng.standard_normal(x.size)
        if not np.all(np.isfinite(x)):
            raise NonFinite("trajectory overflowed; reduce dt")
        if record:
            states.append(x.copy())
    if record:
        times = np.arange(n_steps + 1) * run.dt
        return times, np.asarray(states)
    return x


def ou_density(x: float, y: float, t: float, eps: float) -> float:
    """Transition density of dx = -x dt + sqrt(2 eps) dW from x to y in time t.

    A normal law with mean x e^{-t} and variance eps (1 - e^{-2t}); the
    t -> infinity limit is the centered normal of variance eps.
    """
    if t <= 0 or eps <= 0:
        raise ValueError("t and eps must be positive")
    var = eps * (1.0 - np.exp(-2.0 * t))
    return np.exp(-((y - x * np.exp(-t)) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)


def ou_mean_var(x0: float, t: float, eps: float) -> tuple[float, float]:
    return x0 * np.exp(-t), eps * (1.0 - np.exp(-2.0 * t))


def detailed_balance_residual(t: float, eps: float, grid: np.ndarray) -> float:
    """max over grid pairs of |pi(x) p_t(x,y) - pi(y) p_t(y,x)| for the
    quadratic well, with pi the centered normal of variance eps.

    The product pi(x) p_t(x,y) is symmetric in (x, y) in closed form, so the
    residual is pure floating-point noise (< 1e-12).
    """
    grid = np.asarray(grid, dtype=float)
    var = eps * (1.0 - np.exp(-2.0 * t))
    x = grid[:, None]
    y = grid[None, :]
    pi_x = np.exp(-(x**2) / (2 * eps)) / np.sqrt(2 * np.pi * eps)
    p_xy = np.exp(-((y - x * np.exp(-t)) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)
    flux = pi_x * p_xy
    return float(np.max(np.abs(flux - flux.T)))


def ou_fokker_planck_residual(x0: float, eps: float, t: float,
                              y_grid: np.ndarray, h: float) -> float:
    """Residual of d_t p - d_y(y p) - eps d_yy p for the exact density,
    under centered O(h^2) differences in both t and y.

    Shrinks at second order in h, which is the Richardson check that the
    density solves the evolution equation.
    """
    y = np.asarray(y_grid, dtype=float)

    def p(tt, yy):
        return ou_density(x0, yy, tt, eps)

    dp_dt = (p(t + h, y) - p(t - h, y)) / (2 * h)
    drift = ((y + h) * p(t, y + h) - (y - h) * p(t, y - h)) / (2 * h)
    diff = (p(t, y + h) - 2 * p(t, y) + p(t, y - h)) / h**2
    return float(np.max(np.abs(dp_dt - drift - eps * diff)))


# ---------------------------------------------------------------------------
# Ensemble simulation
# ---------------------------------------------------------------------------


def _chunk_noise(seed: int, offset: int, count: int, n_draws: int, dim: int) -> np.ndarray:
    """Stack per-replica standard-normal blocks, one stream per replica."""
    out = np.empty((count, n_draws * dim))
    for i in range(count):
        out[i] = replica_rng(seed, offset + i).standard_normal(n_draws * dim)
    return out.reshape(count, n_draws, dim)


def sample_endpoints(run: SdeRun, t: float, n: int, replica_offset: int = 0,
                     chunk: int = 2000) -> np.ndarray:
    """States of n independent replicas at time t, shape (n, dim)."""
    dim = run.x0.size
    n_steps = int(round(t / run.dt))
    amp = np.sqrt(2 * run.epsilon * run.dt)
    out = np.empty((n, dim))
    for start in range(0, n, chunk):
        count = min(chunk, n - start)
        x = np.tile(run.x0, (count, 1))
        done = 0
        while done < n_steps:
            block = min(_NOISE_BLOCK, n_steps - done)
            g = _chunk_noise(run.seed, replica_offset + start, count, block, dim)
            for j in range(block):
                grad = _batch_gradient(run.potential, x)
                x = x - grad * run.dt + amp * g[:, j, :]
            done += block
        if not np.all(np.isfinite(x)):
            raise NonFinite("ensemble overflowed; reduce dt")
        out[start:start + count] = x
    return out


def _batch_gradient(p: Potential, x: np.ndarray) -> np.ndarray:
    """Gradient rows for a batch of states."""
    if p.gradient_batch is not None:
        return p.gradient_batch(x)
    return np.apply_along_axis(p.gradient, 1, x)


def _stability_check(run: SdeRun, x: np.ndarray) -> bool:
    """dt should stay below 1/max-eigenvalue of the Hessian at visited states."""
    sample = x[:: max(1, len(x) // 4)][:4]
    for row in sample:
        eigs = np.linalg.eigvalsh(np.atleast_2d(run.potential.hessian(row)))
        lam = float(np.max(np.abs(eigs)))
        if lam > 0 and run.dt >= 1.0 / lam:
            return False
    return True


def hitting_times_raw(run: SdeRun, target_center: np.ndarray, delta: float,
                      n: int, replica_offset: int = 0) -> np.ndarray:
    """First times ||x_t - center|| < delta, one entry per replica (nan =
    censored at the horizon).  Deterministic given (seed, replica indices)."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    center = np.atleast_1d(np.asarray(target_center, dtype=float))
    dim = run.x0.size
    if np.linalg.norm(run.x0 - center) < delta:
        return np.zeros(n)

    max_steps = int(round(run.horizon / run.dt))
    amp = np.sqrt(2 * run.epsilon * run.dt)
    result = np.full(n, np.nan)
    warned = False

    x = np.tile(run.x0, (n, 1))
    active = np.arange(n)
    gens = [replica_rng(run.seed, replica_offset + i) for i in range(n)]
    step = 0
    while active.size and step < max_steps:
        block = min(_NOISE_BLOCK, max_steps - step)
        g = np.empty((active.size, block, dim))
        for row, idx in enumerate(active):
            g[row] = gens[idx].standard_normal(block * dim).reshape(block, dim)
        hit_step = np.full(active.size, -1, dtype=int)
        alive = np.ones(active.size, dtype=bool)
        for j in range(block):
            x[alive] = (x[alive]
                        - _batch_gradient(run.potential, x[alive]) * run.dt
                        + amp * g[alive, j, :])
            d = np.linalg.norm(x[alive] - center, axis=1)
            newly = d < delta
            if np.any(newly):
                rows = np.flatnonzero(alive)[newly]
                hit_step[rows] = step + j + 1
                alive[rows] = False
                if not alive.any():
                    break
        if not np.all(np.isfinite(x[alive])):
            raise NonFinite("hitting-time ensemble overflowed; reduce dt")
        if not warned and not _stability_check(run, x[: min(4, len(x))]):
            warnings.warn("dt exceeds 1/max Hessian eigenvalue along trajectory",
                          RuntimeWarning)
            warned = True
        hits = hit_step >= 0
        result[active[hits]] = hit_step[hits] * run.dt
        keep = ~hits
        x = x[keep]
        active = active[keep]
        step += block
    return result


def sample_hitting_times(run: SdeRun, target_center, delta: float, n: int,
                         replica_offset: int = 0) -> HittingTimeBatch:
    """n seeded replicas of the first-hitting time of the delta-ball.

    Censored replicas are excluded from the mean but reported; raises
    AllCensored when no replica reaches the target.
    """
    raw = hitting_times_raw(run, target_center, delta, n, replica_offset)
    return HittingTimeBatch.from_raw(raw, run.seed)
