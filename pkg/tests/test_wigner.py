import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinphase import (
    DensityMatrix,
    HilbertParams,
    InvalidStateError,
    MomentumVector,
    StateVector,
    density_from_state,
    dft_forward,
    dft_inverse,
    marginal_phi,
    marginal_xi,
    wigner_from_density,
    wigner_from_momentum,
    wigner_from_position,
)
from spinphase.wigner import lattice_from_matrices, odd_sums


def brute_position(psi):
    """Position-form weights, summed term by term with Python complex numbers."""
    N = len(psi)
    w = np.zeros((2 * N, 2 * N), dtype=complex)
    for x in range(2 * N):
        for y in range(2 * N):
            w[x, y] = sum(psi[k].conjugate() * psi[(y - k) % N]
                          * cmath.exp(1j * math.pi * x * (2 * k - y) / N)
                          for k in range(N)) / (2 * N)
    return w


def brute_momentum(chi):
    N = len(chi)
    w = np.zeros((2 * N, 2 * N), dtype=complex)
    for x in range(2 * N):
        for y in range(2 * N):
            w[x, y] = sum(chi[k].conjugate() * chi[(x - k) % N]
                          * cmath.exp(-1j * math.pi * y * (2 * k - x) / N)
                          for k in range(N)) / (2 * N)
    return w


def test_single_level():
    w = wigner_from_position(StateVector(HilbertParams(1), [1]))
    assert np.allclose(w.weights, [[0.5, 0.5], [0.5, -0.5]])
    assert w.total() == pytest.approx(1.0)
    wm = wigner_from_momentum(MomentumVector(HilbertParams(1), [1]))
    assert np.array_equal(wm.weights, w.weights)


@pytest.mark.parametrize("N", [2, 3, 5])
def test_basis_state_rows(N):
    w = wigner_from_position(StateVector.basis(HilbertParams(N), 0))
    rows = w.weights.sum(axis=0)
    assert rows[0] == pytest.approx(1.0)
    assert np.allclose(rows[2::2], 0, atol=1e-15)


def test_N2_superposition_forms_agree():
    p = HilbertParams(2)
    psi = StateVector(p, np.ones(2) / math.sqrt(2))
    assert np.abs(wigner_from_position(psi).weights
                  - wigner_from_momentum(dft_inverse(psi)).weights).max() < 1e-15


@pytest.mark.parametrize("N", [1, 2, 3, 4, 6])
def test_matches_brute_force(N, rng):
    psi = StateVector.random(HilbertParams(N), rng)
    chi = dft_inverse(psi)
    bp = brute_position(list(psi.coeffs))
    bm = brute_momentum(list(chi.coeffs))
    assert np.abs(bp.imag).max() < 1e-13
    assert np.abs(wigner_from_position(psi).weights - bp.real).max() < 1e-13
    assert np.abs(wigner_from_momentum(chi).weights - bm.real).max() < 1e-13


def test_N3_cross_formula(rng):
    psi = StateVector.random(HilbertParams(3), rng)
    a = wigner_from_position(psi).weights
    b = wigner_from_momentum(dft_inverse(psi)).weights
    assert np.abs(a - b).max() < 1e-12


def test_momentum_basis_column():
    p = HilbertParams(3)
    w = wigner_from_momentum(MomentumVector.basis(p, 0))
    cols = w.weights.sum(axis=1)
    assert cols[0] == pytest.approx(1.0)
    assert np.allclose(cols[1:], 0, atol=1e-15)


class TestMarginals:
    def test_basis(self):
        w = wigner_from_position(StateVector.basis(HilbertParams(4), 0))
        assert np.allclose(marginal_xi(w), [1, 0, 0, 0])

    def test_uniform(self):
        w = wigner_from_position(StateVector(HilbertParams(2), np.ones(2) / math.sqrt(2)))
        assert np.allclose(marginal_xi(w), [0.5, 0.5])

    def test_momentum_basis(self):
        w = wigner_from_momentum(MomentumVector.basis(HilbertParams(3), 0))
        assert np.allclose(marginal_phi(w), [1, 0, 0])

    def test_position_basis_flat_momentum(self):
        psi = StateVector.basis(HilbertParams(2), 0)
        w = wigner_from_position(psi)
        assert np.allclose(marginal_phi(w), np.abs(dft_inverse(psi).coeffs) ** 2)
        assert np.allclose(marginal_phi(w), [0.5, 0.5])

    @pytest.mark.parametrize("N", [1, 2, 5, 9])
    def test_random(self, N, rng):
        psi = StateVector.random(HilbertParams(N), rng)
        w = wigner_from_position(psi)
        assert np.abs(marginal_xi(w) - np.abs(psi.coeffs) ** 2).max() < 1e-12
        assert np.abs(marginal_phi(w) - np.abs(dft_inverse(psi).coeffs) ** 2).max() < 1e-12
        odd_y, odd_x = odd_sums(w)
        assert np.abs(odd_y).max() < 1e-12 and np.abs(odd_x).max() < 1e-12


@settings(max_examples=40, deadline=None)
@given(N=st.integers(1, 32), seed=st.integers(0, 2**32 - 1))
def test_lattice_invariants(N, seed):
    params = HilbertParams(N)
    psi = StateVector.random(params, np.random.default_rng(seed))
    raw = lattice_from_matrices(density_from_state(psi).entries)
    assert np.abs(raw.imag).max() < 1e-13
    w = wigner_from_position(psi)
    assert abs(w.total() - 1) < 1e-12
    assert np.abs(w.weights - wigner_from_momentum(dft_inverse(psi)).weights).max() < 1e-12


def test_independent_of_phi0(rng):
    psi = StateVector.random(HilbertParams(5), rng)
    moved = StateVector(HilbertParams(5, phi0=1.1), psi.coeffs)
    a, b = wigner_from_position(psi), wigner_from_position(moved)
    assert np.array_equal(a.weights, b.weights)
    assert np.allclose(b.phi - a.phi, 1.1)


def test_periodic_extension(rng):
    """Extending the kernel past the cell repeats the cell exactly."""
    N = 3
    psi = list(StateVector.random(HilbertParams(N), rng).coeffs)
    cell = brute_position(psi)

    def w(x, y):
        return sum(psi[k].conjugate() * psi[(y - k) % N]
                   * cmath.exp(1j * math.pi * x * (2 * k - y) / N) for k in range(N)) / (2 * N)

    for x, y in [(2 * N + 1, 3), (-1, 2), (4, 2 * N + 5), (-2 * N, -1)]:
        assert w(x, y) == pytest.approx(cell[x % (2 * N), y % (2 * N)], abs=1e-14)


def test_mixed_state_is_convex_combination(rng):
    p = HilbertParams(4)
    rho = DensityMatrix.random(p, rng)
    vals, vecs = np.linalg.eigh(rho.entries)
    combo = sum(v * wigner_from_position(StateVector(p, vecs[:, i])).weights
                for i, v in enumerate(vals))
    assert np.abs(wigner_from_density(rho).weights - combo).max() < 1e-13


def test_pure_density_matches_state(rng):
    psi = StateVector.random(HilbertParams(4), rng)
    assert np.allclose(wigner_from_density(density_from_state(psi)).weights,
                       wigner_from_position(psi).weights, atol=1e-15)


def test_rejects_unnormalized():
    with pytest.raises(InvalidStateError):
        wigner_from_position(StateVector(HilbertParams(2), [1, 1]))
    with pytest.raises(InvalidStateError):
        wigner_from_momentum(MomentumVector(HilbertParams(2), [1, 1]))


def test_coordinates():
    w = wigner_from_position(StateVector.basis(HilbertParams(3, hbar=2.0), 0))
    assert np.allclose(w.xi, [0, 1, 2, 3, 4, -1])
    assert w.xi[-1] == -1.0  # north-pole edge
    assert np.allclose(w.phi, np.pi * np.arange(6) / 3)


def test_dft_partner_roundtrip(rng):
    chi = MomentumVector(HilbertParams(4), rng.normal(size=4)).normalized()
    assert np.allclose(wigner_from_momentum(chi).weights, wigner_from_position(dft_forward(chi)).weights)
