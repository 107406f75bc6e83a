"""Weyl-quantized spin operators and the rotation representation.

The classical generators of rotations, carried from the sphere to the
(phi, xi) plane, are

    f_x = cos(phi) S(xi),   f_y = sin(phi) S(xi),   f_z = -xi_trunc + s - hbar/2

with S(xi) = sqrt((2s - hbar/2 - xi)(xi + hbar/2)). Each is a finite sum of
phi-harmonics times a function of xi, which is exactly the class of symbols
`weyl_quantize` handles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import SpinPhaseError
from .hilbert import HilbertParams, StateVector, truncate_xi

XiFunction = Callable[[np.ndarray], np.ndarray]


def classical_S(xi, params: HilbertParams):
    """Amplitude sqrt(s^2 - f_z^2); zero at both poles, equal to s on the equator."""
    h = params.hbar
    x = truncate_xi(xi, params)
    prod = (2.0 * params.s - h / 2.0 - x) * (x + h / 2.0)
    out = np.sqrt(np.clip(prod, 0.0, None))
    return float(out) if np.ndim(out) == 0 else out


def classical_fz(xi, params: HilbertParams):
    x = truncate_xi(xi, params)
    return -x + params.s - params.hbar / 2.0


@dataclass(frozen=True)
class FactorizedSymbol:
    """Phase-space function f(phi, xi) = sum_n exp(i n phi) g_n(xi).

    Each ``g_n`` is a vectorized callable of xi; it is sampled on the lattice
    and half-lattice, so it should handle truncation itself when the
    wraparound entries matter.
    """

    harmonics: tuple[tuple[int, XiFunction], ...]

    @classmethod
    def of(cls, *terms: tuple[int, XiFunction]) -> "FactorizedSymbol":
        return cls(tuple((int(n), g) for n, g in terms))

    @classmethod
    def constant(cls, value: float = 1.0) -> "FactorizedSymbol":
        return cls.of((0, lambda xi: np.full(np.shape(xi), value, dtype=float)))

    @classmethod
    def fz(cls, params: HilbertParams) -> "FactorizedSymbol":
        return cls.of((0, lambda xi: classical_fz(xi, params)))

    @classmethod
    def fx(cls, params: HilbertParams) -> "FactorizedSymbol":
        half_S = lambda xi: 0.5 * classical_S(xi, params)  # noqa: E731
        return cls.of((1, half_S), (-1, half_S))

    @classmethod
    def fy(cls, params: HilbertParams) -> "FactorizedSymbol":
        # sin(phi) = (e^{i phi} - e^{-i phi}) / 2i
        return cls.of(
            (1, lambda xi: classical_S(xi, params) / 2j),
            (-1, lambda xi: -classical_S(xi, params) / 2j),
        )


def weyl_quantize(sym: FactorizedSymbol, params: HilbertParams) -> np.ndarray:
    """Operator matrix of a factorized symbol in the k = xi/hbar basis.

    A single harmonic exp(i n phi) g(xi) acts as
    (f psi)(xi) = g(xi + n hbar/2) psi(xi + n hbar), so the row for the
    lattice point xi = k hbar picks coefficient k + n (mod N) weighted by g
    at the half-lattice point (k + n/2) hbar.
    """
    N, h = params.N, params.hbar
    k = np.arange(N)
    out = np.zeros((N, N), dtype=complex)
    for n, g in sym.harmonics:
        if abs(n) >= N and N > 1:
            raise SpinPhaseError(
                f"harmonic n={n} shifts by a full period or more (N={N})"
            )
        vals = np.asarray(g((k + n / 2.0) * h), dtype=complex)
        vals = np.broadcast_to(vals, (N,))
        np.add.at(out, (k, (k + n) % N), vals)
    return out


@dataclass(frozen=True, eq=False)
class SpinOperatorSet:
    params: HilbertParams
    jx: np.ndarray = field(repr=False)
    jy: np.ndarray = field(repr=False)
    jz: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("jx", "jy", "jz"):
            a = np.array(getattr(self, name), dtype=complex)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def along(self, axis: Sequence[float]) -> np.ndarray:
        """The generator n . J for a 3-vector n."""
        nx, ny, nz = axis
        return nx * self.jx + ny * self.jy + nz * self.jz

    def casimir(self) -> np.ndarray:
        return self.jx @ self.jx + self.jy @ self.jy + self.jz @ self.jz


def build_spin_operators(params: HilbertParams) -> SpinOperatorSet:
    """Closed-form ladder matrices in the |m> basis, k = j - m."""
    N, j, h = params.N, params.j, params.hbar
    m = params.m_values
    jz = np.diag(h * m).astype(complex)
    # <m| J+ |m-1> = hbar sqrt((j+m)(j-m+1)), i.e. entry (k, k+1)
    upper = h * np.sqrt(np.clip((j + m[:-1]) * (j - m[:-1] + 1), 0.0, None))
    jplus = np.diag(upper, 1).astype(complex)
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / 2j
    return SpinOperatorSet(params, jx, jy, jz)


def _rz(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _ry(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass(frozen=True)
class RotationSpec:
    """A rotation given either by unit axis and angle, or z-y-z Euler angles.

    Euler angles (alpha, beta, gamma) mean Rz(alpha) Ry(beta) Rz(gamma).
    All rotations are active.
    """

    axis: tuple[float, float, float] | None = None
    angle: float | None = None
    euler: tuple[float, float, float] | None = None

    def __post_init__(self):
        if (self.euler is None) == (self.axis is None):
            raise SpinPhaseError("give exactly one of axis+angle or euler")
        if self.axis is not None:
            if self.angle is None:
                raise SpinPhaseError("axis rotation needs an angle")
            ax = tuple(float(v) for v in self.axis)
            if abs(math.sqrt(sum(v * v for v in ax)) - 1.0) > 1e-12:
                raise SpinPhaseError(f"axis {ax} is not a unit vector")
            object.__setattr__(self, "axis", ax)
            object.__setattr__(self, "angle", float(self.angle))
        else:
            object.__setattr__(self, "euler", tuple(float(v) for v in self.euler))

    @classmethod
    def about(cls, axis: Sequence[float], angle: float) -> "RotationSpec":
        ax = np.asarray(axis, dtype=float)
        return cls(axis=tuple(ax / np.linalg.norm(ax)), angle=angle)

    @classmethod
    def from_euler(cls, alpha: float, beta: float, gamma: float) -> "RotationSpec":
        return cls(euler=(alpha, beta, gamma))

    @classmethod
    def from_matrix(cls, R: np.ndarray) -> "RotationSpec":
        a, b, g = Rotation.from_matrix(R).as_euler("ZYZ")
        return cls.from_euler(a, b, g)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "RotationSpec":
        return cls.from_matrix(Rotation.random(random_state=rng).as_matrix())

    def matrix(self) -> np.ndarray:
        """The classical SO(3) matrix."""
        if self.euler is not None:
            a, b, g = self.euler
            return _rz(a) @ _ry(b) @ _rz(g)
        n = np.array(self.axis)
        K = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
        t = self.angle
        return np.eye(3) + math.sin(t) * K + (1 - math.cos(t)) * (K @ K)

    def then(self, other: "RotationSpec") -> "RotationSpec":
        """Composition: apply ``other`` first, then ``self``."""
        return RotationSpec.from_matrix(self.matrix() @ other.matrix())


def _exp_hermitian(H: np.ndarray, t: float) -> np.ndarray:
    """exp(-i t H) for hermitian H via unitary diagonalization."""
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * t * w)) @ V.conj().T


def rotation_operator(r: RotationSpec, ops: SpinOperatorSet) -> np.ndarray:
    """exp(-(i/hbar) angle n.J), or the product of three such factors for Euler angles.

    For half-integer j this is a representative of the SU(2) lift: the
    operator is fixed only up to sign relative to the SO(3) element.
    """
    h = ops.params.hbar
    if r.euler is None:
        return _exp_hermitian(ops.along(r.axis) / h, r.angle)
    a, b, g = r.euler
    m = np.diag(ops.jz).real / h
    return (np.exp(-1j * a * m)[:, None] * _exp_hermitian(ops.jy / h, b)) * np.exp(-1j * g * m)[None, :]


def rotate_state_z(s: StateVector, alpha: float) -> StateVector:
    """Apply exp(i alpha jz / hbar): coefficient k picks up exp(i alpha (j - k)).

    This is a rotation about z by -alpha. Up to the constant phase
    exp(i alpha j) it is the phase factor exp(-i alpha xi / hbar) on the comb.
    """
    return StateVector(s.params, s.coeffs * np.exp(1j * alpha * s.params.m_values))


def spin_coherent_state(params: HilbertParams, theta: float, phi: float) -> StateVector:
    """Highest-weight state |m=j> rotated to point along (theta, phi)."""
    ops = build_spin_operators(params)
    U = rotation_operator(RotationSpec.from_euler(phi, theta, 0.0), ops)
    top = StateVector.basis(params, 0)
    return StateVector(params, U @ top.coeffs)
