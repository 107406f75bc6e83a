"""Lattice Wigner function of a comb state.

The Wigner function is a periodic array of Dirac deltas at
phi = phi0 + pi x / N and xi = hbar y / 2. One period is a 2N x 2N cell of
real weights w[x, y]; the weights sum to one for a normalized state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidStateError
from .hilbert import (
    NORM_TOL,
    DensityMatrix,
    HilbertParams,
    MomentumVector,
    StateVector,
    truncate_xi,
)

IMAG_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class WignerLattice:
    params: HilbertParams
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.shape != (2 * self.params.N, 2 * self.params.N):
            raise ValueError(f"weights must be 2N x 2N, got {w.shape}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def phi(self) -> np.ndarray:
        """Momentum coordinate of each column index x (not truncated)."""
        N = self.params.N
        return self.params.phi0 + np.pi * np.arange(2 * N) / N

    @property
    def xi(self) -> np.ndarray:
        """Position coordinate of each index y, reduced to the fundamental cell.

        The last row y = 2N - 1 aliases xi = -hbar/2, the north pole.
        """
        N = self.params.N
        return truncate_xi(self.params.hbar * np.arange(2 * N) / 2.0, self.params)

    def total(self) -> float:
        return float(self.weights.sum())

    def rows(self):
        """(x, y, phi, xi, weight) records for tabular output."""
        phi, xi = self.phi % (2 * np.pi), self.xi
        for x in range(2 * self.params.N):
            for y in range(2 * self.params.N):
                yield x, y, float(phi[x]), float(xi[y]), float(self.weights[x, y])


@lru_cache(maxsize=64)
def _kernel(N: int):
    """Phase kernel exp(i pi x (2k - y) / N) as a (2N, N, 2N) array and the
    row index (y - k) mod N."""
    x = np.arange(2 * N)[:, None, None]
    k = np.arange(N)[None, :, None]
    y = np.arange(2 * N)[None, None, :]
    E = np.exp(1j * np.pi * x * (2 * k - y) / N)
    rows = (np.arange(2 * N)[None, :] - np.arange(N)[:, None]) % N
    E.setflags(write=False)
    rows.setflags(write=False)
    return E, rows


def lattice_from_matrices(rho: np.ndarray) -> np.ndarray:
    """Complex lattice weights for a stack of N x N matrices, shape (..., 2N, 2N).

    Linear in rho; for rho = |psi><psi| the entry rho[(y-k) % N, k] is
    psi_{y-k} conj(psi_k), so this is the position-form sum.
    """
    N = rho.shape[-1]
    E, rows = _kernel(N)
    G = rho[..., rows, np.arange(N)[:, None]]
    return np.einsum("...ky,xky->...xy", G, E) / (2 * N)


def _real(w: np.ndarray, tol: float = IMAG_TOL) -> np.ndarray:
    worst = np.max(np.abs(w.imag), initial=0.0)
    if worst > tol:
        raise ArithmeticError(f"Wigner weights have imaginary part {worst:.3e}")
    return w.real


def _require_normalized(v, tol: float):
    if not v.is_normalized(tol):
        raise InvalidStateError(f"state has norm^2 {v.norm2()}, expected 1")


def wigner_from_position(s: StateVector, tol: float = NORM_TOL) -> WignerLattice:
    """w[x,y] = 1/(2N) sum_k conj(psi_k) psi_{y-k} exp(i pi x (2k - y) / N)."""
    _require_normalized(s, tol)
    N = s.params.N
    psi = s.coeffs
    E, rows = _kernel(N)
    G = np.conj(psi)[:, None] * psi[rows]
    w = np.einsum("ky,xky->xy", G, E) / (2 * N)
    return WignerLattice(s.params, _real(w))


def wigner_from_momentum(m: MomentumVector, tol: float = NORM_TOL) -> WignerLattice:
    """w[x,y] = 1/(2N) sum_k conj(psihat_k) psihat_{x-k} exp(-i pi y (2k - x) / N)."""
    _require_normalized(m, tol)
    N = m.params.N
    chi = m.coeffs
    E, rows = _kernel(N)
    # same kernel with the roles of x and y swapped, conjugated phase
    G = np.conj(chi)[:, None] * chi[rows]
    w = np.einsum("kx,ykx->xy", G, np.conj(E)) / (2 * N)
    return WignerLattice(m.params, _real(w))


def wigner_from_density(rho: DensityMatrix) -> WignerLattice:
    """Lattice of a mixed state, the convex combination of pure-state lattices."""
    return WignerLattice(rho.params, _real(lattice_from_matrices(rho.entries)))


def marginal_xi(w: WignerLattice) -> np.ndarray:
    """Position distribution: sums over x of the even rows y = 2k."""
    return w.weights.sum(axis=0)[0::2]


def marginal_phi(w: WignerLattice) -> np.ndarray:
    """Momentum distribution: sums over y of the even columns x = 2k."""
    return w.weights.sum(axis=1)[0::2]


def odd_sums(w: WignerLattice) -> tuple[np.ndarray, np.ndarray]:
    """Sums over odd rows and odd columns; both vanish for a valid lattice."""
    return w.weights.sum(axis=0)[1::2], w.weights.sum(axis=1)[1::2]
