import numpy as np
import pytest

from metastab import (
    SpectralField,
    constant_field,
    field_from_function,
    field_from_grid,
    grid_values,
    hs_distance_to_constant,
    hs_norm,
    linf_distance_to_constant,
    random_field,
)
from metastab.errors import ShapeMismatch
from metastab.fields import dealiased_grid_size, mode_wavenumbers, translated


def test_mode_wavenumbers_fft_order():
    assert list(mode_wavenumbers(2)) == [0, 1, 2, -2, -1]


def test_dealiased_grid_exceeds_cubic_band():
    for N in (1, 4, 16):
        assert dealiased_grid_size(N) > 4 * N


def test_constant_field_round_trip():
    f = constant_field(1, 2.0, 8, -1.0)
    vals = grid_values(f)
    assert np.allclose(vals, -1.0, atol=1e-14)


def test_grid_projection_round_trip(rng):
    f = random_field(2, 3.0, 4, rng)
    M = dealiased_grid_size(4)
    g = field_from_grid(2, 3.0, 4, grid_values(f, M))
    assert np.allclose(g.coeffs, f.coeffs, atol=1e-12)


def test_realness_of_random_fields(rng):
    # conjugate symmetry must make the imaginary part vanish on the grid
    from metastab.fields import _embed

    f = random_field(1, 2.0, 16, rng)
    M = dealiased_grid_size(16)
    raw = np.fft.ifft(_embed(f.coeffs, 16, M, 1)) * M / np.sqrt(2.0)
    assert np.max(np.abs(raw.imag)) < 1e-12 * max(1.0, np.max(np.abs(raw)))


def test_conjugate_symmetry_enforced(rng):
    coeffs = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    f = SpectralField(1, 2.0, 4, coeffs)
    with pytest.raises(ShapeMismatch):
        grid_values(f)


def test_shape_mismatch_on_bad_coeff_shape():
    with pytest.raises(ShapeMismatch):
        SpectralField(1, 2.0, 4, np.zeros(7, dtype=complex))


def test_cosine_projection_exact():
    L = 2.0
    f = field_from_function(1, L, 8, lambda x: np.cos(2 * np.pi * x / L))
    # only the |k| = 1 modes, amplitude (1/2) * L^{1/2} each in the
    # orthonormal basis
    expected = np.zeros(17, dtype=complex)
    expected[1] = 0.5 * np.sqrt(L)
    expected[-1] = 0.5 * np.sqrt(L)
    assert np.allclose(f.coeffs, expected, atol=1e-13)


class TestHsNorm:
    def test_constant_field_norm(self):
        for d, L in ((1, 2.0), (2, 1.5)):
            f = constant_field(d, L, 4, -0.7)
            assert hs_norm(f, -0.5) == pytest.approx(0.7 * L ** (d / 2))

    def test_s_zero_is_l2_parseval(self, rng):
        f = random_field(1, 2.0, 8, rng)
        M = 64
        vals = grid_values(f, M)
        l2 = np.sqrt(np.sum(vals**2) * 2.0 / M)
        assert hs_norm(f, 0.0) == pytest.approx(l2, rel=1e-12)

    def test_strictly_decreasing_in_s(self, rng):
        f = random_field(1, 2.0, 8, rng)
        norms = [hs_norm(f, s) for s in (0.0, -0.25, -0.5, -1.0)]
        assert np.all(np.diff(norms) < 0)

    def test_distance_to_constant(self):
        f = constant_field(1, 2.0, 4, 0.4)
        assert hs_distance_to_constant(f, 1.0, -0.5) == pytest.approx(
            0.6 * np.sqrt(2.0))


def test_linf_distance_to_constant():
    L = 2.0
    f = field_from_function(1, L, 8, lambda x: 1.0 + 0.25 * np.cos(2 * np.pi * x / L))
    assert linf_distance_to_constant(f, 1.0) == pytest.approx(0.25, rel=1e-10)


def test_translation_is_isometry_on_grid(rng):
    L = 2.0
    N = 8
    f = random_field(1, L, N, rng)
    M = dealiased_grid_size(N)
    shift_cells = 3
    g = translated(f, shift_cells * L / M)
    rolled = np.roll(grid_values(f, M), -shift_cells)
    assert np.allclose(grid_values(g, M), rolled, atol=1e-12)
