"""The Allen-Cahn energy functional on Galerkin-truncated torus fields.

Quadratic terms are evaluated exactly in Fourier space; the quartic term is
integrated by collocation on a dealiased grid, which makes both the integral
and the projected cubic gradient exact for fields in the retained band.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import fields
from .determinants import counterterm_trace
from .errors import DomainError, ShapeMismatch
from .fields import SpectralField
from .potentials import CriticalPoint, Potential


@dataclass(frozen=True)
class AllenCahnEnergy:
    """Energy density integral of (|grad phi|^2/2 - phi^2/2 + phi^4/4).

    wick_epsilon, when set, is the noise intensity entering the d=2
    renormalized energy gap.
    """

    dimension_d: int
    L: float
    cutoff_N: int
    wick_epsilon: Optional[float] = None
    grid_factor: int = 2

    def __post_init__(self):
        if self.dimension_d not in (1, 2):
            raise ValueError("dimension_d must be 1 or 2")
        if self.L <= 0:
            raise ValueError("torus side length must be positive")
        if self.cutoff_N < 0:
            raise ValueError("cutoff_N must be nonnegative")

    def _check(self, phi: SpectralField) -> None:
        if (phi.d, phi.L, phi.N) != (self.dimension_d, self.L, self.cutoff_N):
            raise ShapeMismatch(
                f"field (d={phi.d}, L={phi.L}, N={phi.N}) incompatible with "
                f"energy (d={self.dimension_d}, L={self.L}, N={self.cutoff_N})"
            )

    def energy(self, phi: SpectralField) -> float:
        """V(phi); exactly 0 for the zero field, L^d (c^4/4 - c^2/2) for phi = c."""
        self._check(phi)
        ksq = fields.squared_wavenumber_grid(phi.d, phi.L, phi.N)
        power = np.abs(phi.coeffs) ** 2
        quad = 0.5 * float(np.sum(ksq * power)) - 0.5 * float(np.sum(power))
        M = fields.dealiased_grid_size(phi.N, self.grid_factor)
        u = fields.grid_values(phi, M)
        cell = (phi.L / M) ** phi.d
        return quad + 0.25 * float(np.sum(u**4)) * cell

    def gradient_coeffs(self, phi: SpectralField) -> np.ndarray:
        """Spectral coefficients of -Laplacian(phi) - phi + P_N(phi^3)."""
        self._check(phi)
        ksq = fields.squared_wavenumber_grid(phi.d, phi.L, phi.N)
        M = fields.dealiased_grid_size(phi.N, self.grid_factor)
        u = fields.grid_values(phi, M)
        cubic = fields.field_from_grid(phi.d, phi.L, phi.N, u**3)
        return (ksq - 1.0) * phi.coeffs + cubic.coeffs

    def gateaux_derivative(self, phi: SpectralField, psi: SpectralField) -> float:
        """d/dh V(phi + h psi) at h=0, i.e. the L^2 pairing of the gradient with psi."""
        self._check(phi)
        phi.require_compatible(psi)
        g = self.gradient_coeffs(phi)
        return float(np.real(np.sum(np.conj(g) * psi.coeffs)))

    def renormalized_energy_gap(self) -> float:
        """Renormalized barrier between the zero field and the -1 well in d=2.

        Equals L^2/4 + (3/2) L^2 eps C_N, with C_N the Wick counterterm trace
        at this energy's cutoff.
        """
        if self.dimension_d != 2:
            raise DomainError("the renormalized energy gap is defined for d=2")
        eps = 0.0 if self.wick_epsilon is None else self.wick_epsilon
        gap = self.L**2 / 4.0
        if eps != 0.0:
            gap += 1.5 * self.L**2 * eps * counterterm_trace(self.L, self.cutoff_N)
        return gap


# ---------------------------------------------------------------------------
# Real-coordinate view of the truncated d=1 functional.
#
# Coordinates are (a_0, u_1, v_1, ..., u_N, v_N) with c_0 = a_0 and
# c_k = u_k + i v_k for k >= 1 (c_{-k} follows by conjugation), dimension
# 2N+1.  At the constant stationary fields the Hessian is diagonal in these
# coordinates, which gives the truncated transition-rate prefactor in closed
# form for any cutoff.
# ---------------------------------------------------------------------------


def _coords_to_field(x: np.ndarray, L: float, N: int) -> SpectralField:
    coeffs = np.zeros(2 * N + 1, dtype=complex)
    coeffs[0] = x[0]
    for k in range(1, N + 1):
        c = x[2 * k - 1] + 1j * x[2 * k]
        coeffs[k] = c
        coeffs[-k] = np.conj(c)
    return SpectralField(1, L, N, coeffs)


def _spectral_to_real_grad(g: np.ndarray, N: int) -> np.ndarray:
    out = np.zeros(2 * N + 1)
    out[0] = g[0].real
    for k in range(1, N + 1):
        out[2 * k - 1] = 2 * g[k].real
        out[2 * k] = 2 * g[k].imag
    return out


def galerkin_potential_1d(L: float, N: int, grid_factor: int = 2) -> Potential:
    """The truncated d=1 energy as a (2N+1)-dimensional Potential.

    Gradient is spectral and exact; the Hessian assembles the multiplication
    operator 3 phi^2 on the dealiased grid, exact for band-limited fields.
    """
    energy = AllenCahnEnergy(1, L, N, grid_factor=grid_factor)
    M = fields.dealiased_grid_size(N, grid_factor)
    nu = fields.squared_wavenumber_grid(1, L, N) - 1.0  # FFT order

    quad_diag = np.zeros(2 * N + 1)
    quad_diag[0] = nu[0]
    for k in range(1, N + 1):
        quad_diag[2 * k - 1] = 2 * nu[k]
        quad_diag[2 * k] = 2 * nu[k]

    # grid values of the real basis directions (a dense (2N+1, M) matrix),
    # built on first Hessian call only: large cutoffs never need it
    basis_cache: list = []

    def _basis() -> np.ndarray:
        if not basis_cache:
            x_grid = np.arange(M) * (L / M)
            b = np.zeros((2 * N + 1, M))
            b[0] = L ** (-0.5)
            for k in range(1, N + 1):
                b[2 * k - 1] = 2 * L ** (-0.5) * np.cos(2 * np.pi * k * x_grid / L)
                b[2 * k] = -2 * L ** (-0.5) * np.sin(2 * np.pi * k * x_grid / L)
            basis_cache.append(b)
        return basis_cache[0]

    def value(x: np.ndarray) -> float:
        return energy.energy(_coords_to_field(np.asarray(x, float), L, N))

    def gradient(x: np.ndarray) -> np.ndarray:
        g = energy.gradient_coeffs(_coords_to_field(np.asarray(x, float), L, N))
        return _spectral_to_real_grad(g, N)

    def hessian(x: np.ndarray) -> np.ndarray:
        u = fields.grid_values(_coords_to_field(np.asarray(x, float), L, N), M)
        w = 3.0 * u**2 * (L / M)
        basis = _basis()
        return np.diag(quad_diag) + (basis * w) @ basis.T

    return Potential(dim=2 * N + 1, value=value, gradient=gradient,
                     hessian=hessian, name=f"allen_cahn_galerkin_1d(L={L}, N={N})")


def galerkin_critical_points_1d(L: float, N: int) -> tuple[CriticalPoint, CriticalPoint]:
    """(minimum at phi = -1, saddle at phi = 0) of the truncated functional.

    Eigenvalues are the diagonal Hessian entries in the real coordinates:
    nu_0 and 2 nu_k (doubled) at the saddle, shifted by +3 at the minimum.
    """
    nu_pos = (2 * np.pi * np.arange(1, N + 1) / L) ** 2 - 1.0
    saddle_eigs = np.concatenate(([-1.0], np.repeat(2 * nu_pos, 2)))
    min_eigs = np.concatenate(([2.0], np.repeat(2 * (nu_pos + 3.0), 2)))

    min_loc = np.zeros(2 * N + 1)
    min_loc[0] = -np.sqrt(L)
    saddle_loc = np.zeros(2 * N + 1)

    minimum = CriticalPoint(location=min_loc, kind="minimum",
                            hessian_eigenvalues=np.sort(min_eigs),
                            lambda_minus=None)
    saddle = CriticalPoint(location=saddle_loc, kind="saddle",
                           hessian_eigenvalues=np.sort(saddle_eigs),
                           lambda_minus=-1.0)
    return minimum, saddle
