"""Finite comb-state Hilbert space H_N and its position/momentum pairing.

A spin-j state quantized in real polarization is a Dirac comb in the
position variable xi, supported on xi = k*hbar, and a comb in the momentum
variable phi, supported on phi = phi0 + 2*pi*k/N. Only the N coefficients of
one period are stored. Coefficient k corresponds to the magnetic quantum
number m = j - k, so k = 0 is the highest-weight state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import (
    InvalidDensityMatrixError,
    InvalidStateError,
    ParamsMismatchError,
    SpinPhaseError,
)

TWO_PI = 2.0 * math.pi

# relative to the matrix norm
MATRIX_TOL = 1e-10
NORM_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class HilbertParams:
    """Global conventions: level count N, Planck constant and meridian offset.

    The sphere parameter s is fixed by the quantization condition
    2s = N*hbar and the spin by N = 2j + 1, so both are derived.
    """

    N: int
    hbar: float = 1.0
    phi0: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise SpinPhaseError(f"N must be a positive integer, got {self.N!r}")
        if not self.hbar > 0:
            raise SpinPhaseError(f"hbar must be positive, got {self.hbar!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "hbar", float(self.hbar))
        object.__setattr__(self, "phi0", float(self.phi0) % TWO_PI)

    @classmethod
    def from_spin(cls, j: float, hbar: float = 1.0, phi0: float = 0.0) -> "HilbertParams":
        twice = 2.0 * j
        if abs(twice - round(twice)) > 1e-12 or twice < 0:
            raise SpinPhaseError(f"j must be a non-negative half-integer, got {j!r}")
        return cls(int(round(twice)) + 1, hbar, phi0)

    @property
    def j(self) -> float:
        return (self.N - 1) / 2.0

    @property
    def s(self) -> float:
        return self.N * self.hbar / 2.0

    @property
    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers in storage order, j down to -j."""
        return self.j - np.arange(self.N)

    @property
    def xi_cell(self) -> tuple[float, float]:
        return (-self.hbar / 2.0, 2.0 * self.s - self.hbar / 2.0)

    def with_phi0(self, phi0: float) -> "HilbertParams":
        return HilbertParams(self.N, self.hbar, phi0)


def _check_same(a: HilbertParams, b: HilbertParams) -> None:
    if a != b:
        raise ParamsMismatchError(f"parameter mismatch: {a} vs {b}")


@dataclass(frozen=True)
class PhasePoint:
    phi: float
    xi: float


def truncate(p: PhasePoint, params: HilbertParams) -> PhasePoint:
    """Reduce a point of R^2 to the fundamental cell [0, 2pi) x [-hbar/2, 2s - hbar/2)."""
    phi = _wrap(p.phi, TWO_PI)
    lo, _ = params.xi_cell
    xi = _wrap(p.xi - lo, 2.0 * params.s) + lo
    return PhasePoint(phi, xi)


def truncate_xi(xi, params: HilbertParams):
    """Vectorized xi reduction into [-hbar/2, 2s - hbar/2)."""
    lo, _ = params.xi_cell
    return _wrap(np.asarray(xi, dtype=float) - lo, 2.0 * params.s) + lo


def _wrap(v, period):
    r = np.mod(v, period)
    # np.mod can round up to the period itself for tiny negative inputs
    r = np.where(r >= period, r - period, r)
    return float(r) if np.ndim(r) == 0 else r


class _CoeffVector:
    params: HilbertParams
    coeffs: np.ndarray

    def _init_coeffs(self):
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if c.shape != (self.params.N,):
            raise InvalidStateError(
                f"expected {self.params.N} coefficients, got {c.size}"
            )
        object.__setattr__(self, "coeffs", _frozen(c))

    def __getitem__(self, k: int) -> complex:
        # cyclic index convention psi_k = psi_{k+N}
        return complex(self.coeffs[k % self.params.N])

    def norm2(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm2() - 1.0) <= tol

    def normalized(self):
        n = math.sqrt(self.norm2())
        if n == 0:
            raise InvalidStateError("cannot normalize the zero vector")
        return type(self)(self.params, self.coeffs / n)


@dataclass(frozen=True, eq=False)
class StateVector(_CoeffVector):
    """Position-representation coefficients psi_k (comb at xi = k*hbar)."""

    params: HilbertParams
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        self._init_coeffs()

    @classmethod
    def basis(cls, params: HilbertParams, k: int) -> "StateVector":
        c = np.zeros(params.N, dtype=complex)
        c[k % params.N] = 1.0
        return cls(params, c)

    @classmethod
    def from_m(cls, params: HilbertParams, m: float) -> "StateVector":
        """The eigenstate |m> of jz, stored at k = j - m."""
        k = params.j - m
        if abs(k - round(k)) > 1e-12 or not 0 <= round(k) < params.N:
            raise InvalidStateError(f"m={m} is not a valid quantum number for j={params.j}")
        return cls.basis(params, int(round(k)))

    @classmethod
    def random(cls, params: HilbertParams, rng: np.random.Generator) -> "StateVector":
        c = rng.normal(size=params.N) + 1j * rng.normal(size=params.N)
        return cls(params, c / np.linalg.norm(c))


@dataclass(frozen=True, eq=False)
class MomentumVector(_CoeffVector):
    """Momentum-representation coefficients (comb at phi = phi0 + 2*pi*k/N)."""

    params: HilbertParams
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        self._init_coeffs()

    @classmethod
    def basis(cls, params: HilbertParams, k: int) -> "MomentumVector":
        c = np.zeros(params.N, dtype=complex)
        c[k % params.N] = 1.0
        return cls(params, c)


def dft_forward(m: MomentumVector, params: HilbertParams | None = None) -> StateVector:
    """psi_k = N^{-1/2} sum_m psihat_m exp(2 pi i k m / N)."""
    if params is not None:
        _check_same(params, m.params)
    N = m.params.N
    # numpy's ifft carries exp(+2 pi i k m / N) and a 1/N factor
    psi = np.fft.ifft(m.coeffs) * math.sqrt(N)
    return StateVector(m.params, psi)


def dft_inverse(s: StateVector, params: HilbertParams | None = None) -> MomentumVector:
    """psihat_k = N^{-1/2} sum_m psi_m exp(-2 pi i k m / N)."""
    if params is not None:
        _check_same(params, s.params)
    N = s.params.N
    return MomentumVector(s.params, np.fft.fft(s.coeffs) / math.sqrt(N))


def inner(a: StateVector, b: StateVector) -> complex:
    """Hilbert-space product, antilinear in the first argument."""
    _check_same(a.params, b.params)
    return complex(np.vdot(a.coeffs, b.coeffs))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite N x N matrix.

    Pass ``validate=False`` only for intermediate linear-algebra objects
    (for example a reconstruction that failed the positivity test).
    """

    params: HilbertParams
    entries: np.ndarray = field(repr=False)
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        N = self.params.N
        if a.shape != (N, N):
            raise InvalidDensityMatrixError(f"expected shape {(N, N)}, got {a.shape}")
        if self.validate:
            check_density(a)
        object.__setattr__(self, "entries", _frozen(a))

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def is_positive(self, tol: float = MATRIX_TOL) -> bool:
        scale = max(1.0, np.linalg.norm(self.entries, 2))
        return bool(self.eigenvalues().min() >= -tol * scale)

    @classmethod
    def maximally_mixed(cls, params: HilbertParams) -> "DensityMatrix":
        return cls(params, np.eye(params.N) / params.N)

    @classmethod
    def random(cls, params: HilbertParams, rng: np.random.Generator,
               rank: int | None = None) -> "DensityMatrix":
        """Random state G G^dag / tr from a complex Ginibre matrix."""
        N = params.N
        r = N if rank is None else rank
        g = rng.normal(size=(N, r)) + 1j * rng.normal(size=(N, r))
        rho = g @ g.conj().T
        rho = (rho + rho.conj().T) / 2
        return cls(params, rho / np.trace(rho).real)


def check_density(a: np.ndarray, tol: float = MATRIX_TOL) -> None:
    """Raise InvalidDensityMatrixError unless ``a`` is a valid density matrix."""
    scale = max(1.0, float(np.linalg.norm(a, 2)))
    if np.max(np.abs(a - a.conj().T), initial=0.0) > tol * scale:
        raise InvalidDensityMatrixError("matrix is not hermitian")
    if abs(np.trace(a) - 1.0) > tol * scale:
        raise InvalidDensityMatrixError(f"trace is {np.trace(a)}, expected 1")
    lo = np.linalg.eigvalsh((a + a.conj().T) / 2).min()
    if lo < -tol * scale:
        raise InvalidDensityMatrixError(f"matrix has negative eigenvalue {lo:.3e}")


def density_from_state(s: StateVector, tol: float = NORM_TOL) -> DensityMatrix:
    if not s.is_normalized(tol):
        raise InvalidStateError(f"state has norm^2 {s.norm2()}, expected 1")
    return DensityMatrix(s.params, np.outer(s.coeffs, s.coeffs.conj()))


def mix(states: Iterable[tuple[float, DensityMatrix]], tol: float = NORM_TOL) -> DensityMatrix:
    """Convex combination sum_i w_i rho_i."""
    states = list(states)
    if not states:
        raise SpinPhaseError("mix() needs at least one state")
    weights = np.array([w for w, _ in states], dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > tol:
        raise SpinPhaseError(f"weights must be non-negative and sum to 1, got {weights}")
    params = states[0][1].params
    for _, rho in states[1:]:
        _check_same(params, rho.params)
    total = sum(w * rho.entries for w, rho in states)
    return DensityMatrix(params, total)


def as_density(obj: StateVector | MomentumVector | DensityMatrix) -> DensityMatrix:
    """Density matrix in the position basis for any of the state types."""
    if isinstance(obj, DensityMatrix):
        return obj
    if isinstance(obj, MomentumVector):
        obj = dft_forward(obj)
    return density_from_state(obj)


def hermitian_basis(N: int) -> np.ndarray:
    """Hilbert-Schmidt orthonormal hermitian basis, identity/sqrt(N) first.

    The remaining N^2 - 1 elements are the generalized Gell-Mann matrices
    (symmetric, antisymmetric, diagonal), all traceless.
    """
    out = [np.eye(N, dtype=complex) / math.sqrt(N)]
    for a in range(N):
        for b in range(a + 1, N):
            m = np.zeros((N, N), dtype=complex)
            m[a, b] = m[b, a] = 1 / math.sqrt(2)
            out.append(m)
            m = np.zeros((N, N), dtype=complex)
            m[a, b] = -1j / math.sqrt(2)
            m[b, a] = 1j / math.sqrt(2)
            out.append(m)
    for d in range(1, N):
        diag = np.zeros(N)
        diag[:d] = 1.0
        diag[d] = -d
        out.append(np.diag(diag / math.sqrt(d * (d + 1))).astype(complex))
    return np.array(out)

