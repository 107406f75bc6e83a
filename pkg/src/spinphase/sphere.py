"""Rotation-averaged Wigner function on the sphere and its inversion.

For every rotation g the state is rotated back by g^-1, its lattice Wigner
function is computed, and the lattice points (placed on the sphere through
cos(theta) = 1 - (xi_trunc + hbar/2)/s) are carried forward by the
classical rotation of g. Averaging over the Haar measure smears the delta
array into a smooth function. The result is band-limited to l <= 2j, so it
is stored as spherical-harmonic coefficients

    W(theta, phi) = sum_{l,m} c_lm Y_lm(theta, phi)

where W is a density with respect to the area element s sin(theta) dtheta dphi
of the sphere of radius sqrt(s). Consequently c_00 = 1 / (s sqrt(4 pi)).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import sph_harm_y

from .errors import NonPositiveReconstructionWarning, ReconstructionError
from .hilbert import (
    DensityMatrix,
    HilbertParams,
    MomentumVector,
    StateVector,
    as_density,
    check_density,
    hermitian_basis,
    truncate_xi,
)
from .operators import RotationSpec, build_spin_operators, rotation_operator
from .wigner import lattice_from_matrices

RANK_TOL = 1e-8
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class SpherePoint:
    theta: float
    phi: float

    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "SpherePoint":
        x, y, z = np.asarray(v, dtype=float) / np.linalg.norm(v)
        return cls(math.acos(min(1.0, max(-1.0, z))), math.atan2(y, x) % (2 * math.pi))


def lm_index(lmax: int) -> tuple[np.ndarray, np.ndarray]:
    """Degree and order arrays in storage order (0,0), (1,-1), (1,0), (1,1), ..."""
    ls = np.concatenate([np.full(2 * l + 1, l) for l in range(lmax + 1)])
    ms = np.concatenate([np.arange(-l, l + 1) for l in range(lmax + 1)])
    return ls, ms


@dataclass(frozen=True, eq=False)
class MultipoleCoeffs:
    """Spherical-harmonic coefficients c_lm, 0 <= l <= lmax, of a real function."""

    params: HilbertParams
    lmax: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size != (self.lmax + 1) ** 2:
            raise ValueError(f"expected {(self.lmax + 1) ** 2} coefficients for lmax={self.lmax}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def get(self, l: int, m: int) -> complex:
        if l > self.lmax or abs(m) > l:
            return 0j
        return complex(self.coeffs[l * l + l + m])

    def degree(self, l: int) -> np.ndarray:
        return self.coeffs[l * l: (l + 1) * (l + 1)]

    def max_above(self, l: int) -> float:
        """Largest |c| over degrees strictly above l."""
        return float(np.max(np.abs(self.coeffs[(l + 1) ** 2:]), initial=0.0))

    def reality_defect(self) -> float:
        """max |c_{l,-m} - (-1)^m conj(c_{lm})|; zero for a real function."""
        ls, ms = lm_index(self.lmax)
        mirror = ls * ls + ls - ms
        return float(np.max(np.abs(self.coeffs[mirror] - (-1.0) ** ms * np.conj(self.coeffs)), initial=0.0))

    def with_lmax(self, lmax: int) -> "MultipoleCoeffs":
        out = np.zeros((lmax + 1) ** 2, dtype=complex)
        n = min(out.size, self.coeffs.size)
        out[:n] = self.coeffs[:n]
        return MultipoleCoeffs(self.params, lmax, out)

    def __add__(self, other: "MultipoleCoeffs") -> "MultipoleCoeffs":
        lmax = max(self.lmax, other.lmax)
        return MultipoleCoeffs(self.params, lmax,
                               self.with_lmax(lmax).coeffs + other.with_lmax(lmax).coeffs)

    def __mul__(self, k: float) -> "MultipoleCoeffs":
        return MultipoleCoeffs(self.params, self.lmax, k * self.coeffs)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SO3Quadrature:
    """Euler-angle product rule for the normalized Haar integral."""

    band: int
    alpha: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.weights.size

    def integrate(self, f) -> complex:
        """Integrate f(alpha, beta, gamma) (vectorized) over SO(3)."""
        return complex(np.sum(self.weights * f(self.alpha, self.beta, self.gamma)))


@lru_cache(maxsize=32)
def haar_quadrature(band: int) -> SO3Quadrature:
    """Exact for Wigner-D matrix elements of degree <= band.

    Uniform grids of 2*band+1 points in alpha and gamma, Gauss-Legendre in
    cos(beta) with band+1 nodes.
    """
    if band < 0:
        raise ValueError("band must be non-negative")
    n_az = 2 * band + 1
    az = 2 * np.pi * np.arange(n_az) / n_az
    x, wx = leggauss(band + 1)
    beta = np.arccos(x)
    A, B, G = np.meshgrid(az, beta, az, indexing="ij")
    W = np.broadcast_to((wx / 2.0)[None, :, None], A.shape) / n_az**2
    arrays = [np.ascontiguousarray(a.reshape(-1)) for a in (A, B, G, W)]
    for a in arrays:
        a.setflags(write=False)
    return SO3Quadrature(band, *arrays)


def _euler_matrices(alpha, beta, gamma) -> np.ndarray:
    """Stack of Rz(alpha) Ry(beta) Rz(gamma), shape (n, 3, 3)."""
    def rz(a):
        c, s = np.cos(a), np.sin(a)
        z, o = np.zeros_like(a), np.ones_like(a)
        return np.stack([np.stack([c, -s, z], -1), np.stack([s, c, z], -1), np.stack([z, z, o], -1)], -2)

    def ry(a):
        c, s = np.cos(a), np.sin(a)
        z, o = np.zeros_like(a), np.ones_like(a)
        return np.stack([np.stack([c, z, s], -1), np.stack([z, o, z], -1), np.stack([-s, z, c], -1)], -2)

    return rz(alpha) @ ry(beta) @ rz(gamma)


def _euler_operators(params: HilbertParams, alpha, beta, gamma) -> np.ndarray:
    """Stack of exp(-i alpha jz) exp(-i beta jy) exp(-i gamma jz) (hbar = 1 units)."""
    ops = build_spin_operators(params)
    lam, V = np.linalg.eigh(ops.jy / params.hbar)
    m = params.m_values
    d = np.einsum("ak,nk,bk->nab", V, np.exp(-1j * beta[:, None] * lam[None, :]), V.conj())
    left = np.exp(-1j * alpha[:, None] * m[None, :])
    right = np.exp(-1j * gamma[:, None] * m[None, :])
    return left[:, :, None] * d * right[:, None, :]


def lattice_sphere_points(params: HilbertParams) -> np.ndarray:
    """Unit vectors of the 2N x 2N lattice cell, shape (2N, 2N, 3), indexed [x, y].

    The row y = 2N - 1 (xi_trunc = -hbar/2) lands exactly on the north pole.
    """
    N = params.N
    phi = params.phi0 + np.pi * np.arange(2 * N) / N
    xi = truncate_xi(params.hbar * np.arange(2 * N) / 2.0, params)
    cos_t = 1.0 - (xi + params.hbar / 2.0) / params.s
    sin_t = np.sqrt(np.clip(1.0 - cos_t**2, 0.0, None))
    P = np.empty((2 * N, 2 * N, 3))
    P[..., 0] = np.cos(phi)[:, None] * sin_t[None, :]
    P[..., 1] = np.sin(phi)[:, None] * sin_t[None, :]
    P[..., 2] = cos_t[None, :]
    return P


def _harmonics(lmax: int, vectors: np.ndarray) -> np.ndarray:
    """Y_lm at unit vectors, shape vectors.shape[:-1] + (n_lm,)."""
    ls, ms = lm_index(lmax)
    # atan2 keeps full precision near the poles, where arccos(z) does not
    theta = np.arctan2(np.hypot(vectors[..., 0], vectors[..., 1]), vectors[..., 2])[..., None]
    phi = np.arctan2(vectors[..., 1], vectors[..., 0])[..., None]
    return sph_harm_y(ls, ms, theta, phi)


def default_band(params: HilbertParams, lmax: int) -> int:
    # the integrand mixes degree <= 2j from the state with degree lmax from Y_lm
    return (params.N - 1) + lmax


@lru_cache(maxsize=16)
def _azimuth_free_harmonics(params: HilbertParams, lmax: int, band: int) -> np.ndarray:
    """conj(Y_lm) at lattice points carried by Ry(beta) Rz(gamma), one row per (beta, gamma) node.

    The alpha factor Rz(alpha) only multiplies Y_lm by exp(i m alpha), which
    `_average_stack` applies as a phase.
    """
    quad = haar_quadrature(band)
    n_az = 2 * band + 1
    b = quad.beta.reshape(n_az, -1)[0]
    g = quad.gamma.reshape(n_az, -1)[0]
    P = lattice_sphere_points(params).reshape(-1, 3)
    Q = np.einsum("nij,pj->npi", _euler_matrices(np.zeros_like(b), b, g), P)
    Y = np.conj(_harmonics(lmax, Q))
    Y.setflags(write=False)
    return Y


def _average_stack(mats: np.ndarray, params: HilbertParams, lmax: int,
                   band: int, flip_sign: bool = False) -> np.ndarray:
    """Multipole coefficients for a stack of hermitian matrices, shape (B, n_lm).

    Linear in each matrix. Nodes are visited in a fixed order (alpha outer),
    so repeated calls are bit-for-bit reproducible.
    """
    if params.phi0 != 0.0:
        # comb coefficients on the phi0 meridian carry exp(i phi0 k) relative to phi0 = 0
        d = np.exp(1j * params.phi0 * np.arange(params.N))
        mats = d[:, None] * np.asarray(mats) * d.conj()[None, :]
        params = params.with_phi0(0.0)
    quad = haar_quadrature(band)
    n_az = 2 * band + 1
    Y = _azimuth_free_harmonics(params, lmax, band)
    _, ms = lm_index(lmax)
    alpha = quad.alpha.reshape(n_az, -1)
    beta = quad.beta.reshape(n_az, -1)
    gamma = quad.gamma.reshape(n_az, -1)
    wts = quad.weights.reshape(n_az, -1)
    B = mats.shape[0]
    acc = np.zeros((B, ms.size), dtype=complex)
    for i in range(n_az):
        U = _euler_operators(params, alpha[i], beta[i], gamma[i])
        if flip_sign:
            U = -U
        Ud = np.conj(np.swapaxes(U, -1, -2))
        rotated = Ud[None] @ mats[:, None] @ U[None]
        w = lattice_from_matrices(rotated).real.reshape(B, U.shape[0], -1)
        part = np.einsum("Bnp,n,npl->Bl", w, wts[i], Y)
        acc += part * np.exp(-1j * ms * alpha[i, 0])
    return acc / params.s


def averaged_wigner(rho: DensityMatrix | StateVector | MomentumVector,
                    lmax: int | None = None, band: int | None = None,
                    flip_sign: bool = False) -> MultipoleCoeffs:
    """Rotation-averaged Wigner function of a state.

    ``lmax`` defaults to 2j, above which every coefficient vanishes; pass a
    larger value to see that numerically. ``band`` is the exactness degree
    of the Haar quadrature and defaults to 2j + lmax, the degree of the
    integrand. ``flip_sign`` replaces every quantum rotation by its negative,
    the other SU(2) preimage of the same SO(3) element.
    """
    rho = as_density(rho)
    check_density(rho.entries)
    params = rho.params
    lmax = params.N - 1 if lmax is None else int(lmax)
    band = default_band(params, lmax) if band is None else int(band)
    c = _average_stack(np.asarray(rho.entries)[None], params, lmax, band, flip_sign)[0]
    return MultipoleCoeffs(params, lmax, c)


def evaluate_sphere(c: MultipoleCoeffs, p: SpherePoint | Sequence[SpherePoint]):
    """Pointwise value sum_lm c_lm Y_lm; a float for one point, an array otherwise."""
    single = isinstance(p, SpherePoint)
    pts = [p] if single else list(p)
    V = np.array([q.vector() for q in pts]).reshape(-1, 3)
    vals = _harmonics(c.lmax, V) @ c.coeffs
    return float(vals[0].real) if single else vals.real


def evaluate_sphere_complex(c: MultipoleCoeffs, vectors: np.ndarray) -> np.ndarray:
    """Complex values at unit vectors; the imaginary part measures non-reality."""
    return _harmonics(c.lmax, np.asarray(vectors, dtype=float)) @ c.coeffs


@dataclass(frozen=True, eq=False)
class TomographyMap:
    """Real-linear map from hermitian matrices to stacked (Re c, Im c).

    Column b is the image of ``basis[b]``; the first basis element is the
    normalized identity, the rest are traceless.
    """

    params: HilbertParams
    lmax: int
    band: int
    basis: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(repr=False)

    def apply(self, H: np.ndarray) -> np.ndarray:
        t = np.einsum("bij,ji->b", self.basis, np.asarray(H)).real
        return self.matrix @ t

    def rank(self, tol: float = RANK_TOL) -> int:
        return _rank(self.matrix, tol)

    def traceless_rank(self, tol: float = RANK_TOL) -> int:
        return _rank(self.matrix[:, 1:], tol)

    def degree_ranks(self, tol: float = RANK_TOL) -> list[int]:
        """Rank of the map restricted to each multipole degree l = 0..lmax."""
        n_lm = (self.lmax + 1) ** 2
        out = []
        for l in range(self.lmax + 1):
            rows = np.r_[l * l:(l + 1) ** 2]
            out.append(_rank(self.matrix[np.r_[rows, rows + n_lm]], tol))
        return out


def _rank(M: np.ndarray, tol: float) -> int:
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


@lru_cache(maxsize=32)
def tomography_matrix(params: HilbertParams, lmax: int | None = None,
                      band: int | None = None) -> TomographyMap:
    lmax = params.N - 1 if lmax is None else int(lmax)
    band = default_band(params, lmax) if band is None else int(band)
    basis = hermitian_basis(params.N)
    c = _average_stack(basis, params, lmax, band)
    M = np.concatenate([c.real.T, c.imag.T], axis=0)
    M.setflags(write=False)
    basis.setflags(write=False)
    return TomographyMap(params, lmax, band, basis, M)


def reconstruct(c: MultipoleCoeffs, tol: float = RESIDUAL_TOL) -> DensityMatrix:
    """Invert the averaged Wigner map by least squares.

    Raises ReconstructionError when the relative residual exceeds ``tol``
    (the coefficients are not the image of any hermitian matrix) or the
    recovered trace is not 1. A hermitian unit-trace result that is not
    positive is returned unvalidated with a NonPositiveReconstructionWarning.
    """
    T = tomography_matrix(c.params, c.lmax)
    obs = np.concatenate([c.coeffs.real, c.coeffs.imag])
    t, *_ = np.linalg.lstsq(T.matrix, obs, rcond=None)
    scale = max(np.linalg.norm(obs), np.finfo(float).tiny)
    residual = float(np.linalg.norm(T.matrix @ t - obs) / scale)
    if residual > tol:
        raise ReconstructionError(
            f"coefficients are outside the image of the tomography map "
            f"(relative residual {residual:.3e})", residual)
    rho = np.einsum("b,bij->ij", t, T.basis)
    rho = (rho + rho.conj().T) / 2
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ReconstructionError(f"reconstructed trace is {tr}, expected 1", abs(tr - 1.0))
    out = DensityMatrix(c.params, rho, validate=False)
    if not out.is_positive():
        warnings.warn(
            f"reconstruction is not positive (min eigenvalue {out.eigenvalues().min():.3e})",
            NonPositiveReconstructionWarning, stacklevel=2)
    return out


def sphere_grid(n: int = 256) -> np.ndarray:
    """Near-uniform Fibonacci point set, shape (n, 3)."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(1.0 - z**2)
    phi = np.pi * (1.0 + math.sqrt(5.0)) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], -1)


def covariance_check(psi: StateVector, r: RotationSpec, grid: np.ndarray | None = None) -> float:
    """sup over grid points p of |W[U psi](p) - W[psi](R^-1 p)|.

    U is the quantum rotation and R the classical rotation of ``r``; the
    averaged Wigner function of a rotated state is the rotated function.
    Operators are built relative to the phi0 meridian, so ``r`` is read in
    that frame and R is conjugated by Rz(phi0) before it acts on the sphere.
    """
    grid = sphere_grid() if grid is None else np.asarray(grid, dtype=float)
    ops = build_spin_operators(psi.params)
    U = rotation_operator(r, ops)
    rotated = StateVector(psi.params, U @ psi.coeffs)
    c0 = averaged_wigner(psi)
    c1 = averaged_wigner(rotated)
    a = psi.params.phi0
    Rz = np.array([[math.cos(a), -math.sin(a), 0.0], [math.sin(a), math.cos(a), 0.0], [0.0, 0.0, 1.0]])
    R = Rz @ r.matrix() @ Rz.T
    lhs = evaluate_sphere_complex(c1, grid).real
    rhs = evaluate_sphere_complex(c0, grid @ R).real  # rows are R^T p = R^-1 p
    return float(np.max(np.abs(lhs - rhs)))
