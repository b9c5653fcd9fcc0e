"""Real scalar fields on the torus stored as truncated Fourier coefficients.

Coefficients are taken with respect to the orthonormal basis
``e_k(x) = L^{-d/2} exp(2*pi*i k.x / L)`` and kept for all integer modes with
``max_i |k_i| <= N`` (square cutoff, shared by every module that touches
truncated fields).  Arrays are stored in FFT ordering ``[0, 1, .., N, -N, .., -1]``
along each axis so that embedding into a larger collocation grid is a pure
index operation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch

REALNESS_TOL = 1e-12


def mode_wavenumbers(N: int) -> np.ndarray:
    """Integer wavenumbers in FFT order for a (2N+1)-point axis."""
    n = 2 * N + 1
    return np.fft.fftfreq(n, d=1.0 / n).round().astype(int)


def dealiased_grid_size(N: int, factor: int = 2) -> int:
    """Collocation points per axis making cubic products of P_N fields exact.

    ``factor * (2N+1)`` with factor >= 2 exceeds 4N, so no mode of a cubed
    field aliases back onto the retained band.
    """
    if factor < 2:
        raise ValueError("dealiasing factor must be >= 2 for cubic terms")
    return factor * (2 * N + 1)


@dataclass(frozen=True)
class SpectralField:
    """Truncated real field on the torus of side L in dimension d.

    coeffs has shape (2N+1,)*d, complex, FFT mode ordering, and satisfies
    conjugate symmetry coeffs[-k] = conj(coeffs[k]) so grid values are real.
    """

    d: int
    L: float
    N: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError("only d=1 and d=2 tori are supported")
        if self.L <= 0:
            raise ValueError("torus side length must be positive")
        expected = (2 * self.N + 1,) * self.d
        if self.coeffs.shape != expected:
            raise ShapeMismatch(
                f"coefficient array has shape {self.coeffs.shape}, expected {expected}"
            )

    @property
    def mode_shape(self) -> tuple:
        return (2 * self.N + 1,) * self.d

    def compatible_with(self, other: "SpectralField") -> bool:
        return self.d == other.d and self.L == other.L and self.N == other.N

    def require_compatible(self, other: "SpectralField") -> None:
        if not self.compatible_with(other):
            raise ShapeMismatch(
                f"fields live on different truncations: "
                f"(d={self.d}, L={self.L}, N={self.N}) vs "
                f"(d={other.d}, L={other.L}, N={other.N})"
            )


def _embed(coeffs: np.ndarray, N: int, M: int, d: int) -> np.ndarray:
    """Place (2N+1)^d FFT-ordered modes into an M^d FFT-ordered array."""
    out = np.zeros((M,) * d, dtype=complex)
    idx = mode_wavenumbers(N) % M
    if d == 1:
        out[idx] = coeffs
    else:
        out[np.ix_(idx, idx)] = coeffs
    return out


def _extract(spec: np.ndarray, N: int, d: int) -> np.ndarray:
    """Inverse of :func:`_embed`: pull the retained band out of an M^d DFT."""
    M = spec.shape[0]
    idx = mode_wavenumbers(N) % M
    if d == 1:
        return spec[idx]
    return spec[np.ix_(idx, idx)]


def grid_values(field: SpectralField, M: int | None = None) -> np.ndarray:
    """Evaluate the field on the uniform M^d collocation grid (real array)."""
    if M is None:
        M = dealiased_grid_size(field.N)
    big = _embed(field.coeffs, field.N, M, field.d)
    vals = np.fft.ifftn(big) * (M**field.d) * field.L ** (-field.d / 2)
    scale = max(1.0, float(np.max(np.abs(vals))))
    if np.max(np.abs(vals.imag)) > REALNESS_TOL * scale:
        raise ShapeMismatch("field coefficients violate conjugate symmetry")
    return vals.real


def field_from_grid(d: int, L: float, N: int, values: np.ndarray) -> SpectralField:
    """Project real grid values (shape M^d, M >= 2N+1) onto the retained band."""
    M = values.shape[0]
    if M < 2 * N + 1:
        raise ShapeMismatch("grid too coarse for the requested cutoff")
    spec = np.fft.fftn(values) / (M**d) * L ** (d / 2)
    return SpectralField(d, L, N, _extract(spec, N, d))


def grid_points(d: int, L: float, M: int) -> np.ndarray:
    """Collocation nodes j*L/M; shape (M,) for d=1, (2, M, M) for d=2."""
    x = np.arange(M) * (L / M)
    if d == 1:
        return x
    return np.stack(np.meshgrid(x, x, indexing="ij"))

def field_from_function(d: int, L: float, N: int, f, M: int | None = None) -> SpectralField:
    """Sample f on the collocation grid and project onto modes up to N."""
    if M is None:
        M = dealiased_grid_size(N)
    pts = grid_points(d, L, M)
    vals = f(pts) if d == 1 else f(pts[0], pts[1])
    return field_from_grid(d, L, N, np.asarray(vals, dtype=float))


def constant_field(d: int, L: float, N: int, c: float) -> SpectralField:
    coeffs = np.zeros((2 * N + 1,) * d, dtype=complex)
    coeffs[(0,) * d] = c * L ** (d / 2)
    return SpectralField(d, L, N, coeffs)


def random_field(d: int, L: float, N: int, rng: np.random.Generator,
                 amplitude: float = 1.0) -> SpectralField:
    """Random real field: iid normal grid values projected to the band."""
    M = 2 * N + 1
    vals = amplitude * rng.standard_normal((M,) * d)
    return field_from_grid(d, L, N, vals)


def translated(field: SpectralField, shift: float, axis: int = 0) -> SpectralField:
    """Field x -> phi(x + a e_axis); a phase twist per mode."""
    k = mode_wavenumbers(field.N)
    phase = np.exp(2j * np.pi * k * shift / field.L)
    if field.d == 1:
        coeffs = field.coeffs * phase
    else:
        shape = [1, 1]
        shape[axis] = 2 * field.N + 1
        coeffs = field.coeffs * phase.reshape(shape)
    return SpectralField(field.d, field.L, field.N, coeffs)


def squared_wavenumber_grid(d: int, L: float, N: int) -> np.ndarray:
    """(2*pi*|k|/L)^2 over the retained band, FFT ordering."""
    k = mode_wavenumbers(N) * (2 * np.pi / L)
    if d == 1:
        return k**2
    return k[:, None] ** 2 + k[None, :] ** 2


def hs_norm(field: SpectralField, s: float) -> float:
    """Sobolev norm sqrt(sum_k (1 + (2 pi |k| / L)^2)^s |c_k|^2)."""
    w = (1.0 + squared_wavenumber_grid(field.d, field.L, field.N)) ** s
    return float(np.sqrt(np.sum(w * np.abs(field.coeffs) ** 2)))


def hs_distance_to_constant(field: SpectralField, c: float, s: float) -> float:
    shifted = field.coeffs.copy()
    shifted[(0,) * field.d] -= c * field.L ** (field.d / 2)
    return hs_norm(SpectralField(field.d, field.L, field.N, shifted), s)


def linf_distance_to_constant(field: SpectralField, c: float,
                              M: int | None = None) -> float:
    return float(np.max(np.abs(grid_values(field, M) - c)))
