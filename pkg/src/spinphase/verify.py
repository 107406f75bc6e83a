"""Self-check of the numerical invariants for one spin value.

Used by ``spinphase verify``; each check reports the worst observed error
against its tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpinPhaseError
from .hilbert import (
    DensityMatrix,
    HilbertParams,
    StateVector,
    dft_forward,
    dft_inverse,
)
from .operators import (
    FactorizedSymbol,
    RotationSpec,
    build_spin_operators,
    rotation_operator,
    weyl_quantize,
)
from .sphere import averaged_wigner, covariance_check, reconstruct
from .wigner import (
    marginal_phi,
    marginal_xi,
    odd_sums,
    wigner_from_momentum,
    wigner_from_position,
)

DEFAULT_TOLERANCES = {
    "weyl_closed_form": 1e-12,
    "commutators": 1e-12,
    "casimir": 1e-11,
    "dft_unitarity": 1e-12,
    "wigner_equivalence": 1e-12,
    "wigner_mass": 1e-12,
    "marginals": 1e-12,
    "phi0_independence": 1e-12,
    "projective_sign": 1e-12,
    "homomorphism": 1e-10,
    "band_limit": 1e-9,
    "monopole": 1e-10,
    "reconstruction": 1e-9,
    "covariance": 1e-9,
    "sign_cancellation": 0.0,
    "quadrature_stability": 1e-10,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tol)


def _rel(err: float, scale: float) -> float:
    return err / scale if scale > 0 else err


def run_checks(params: HilbertParams, seed: int = 0, trials: int = 5,
               tolerances: dict[str, float] | None = None) -> list[CheckResult]:
    unknown = set(tolerances or {}) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise SpinPhaseError(f"unknown check name(s): {', '.join(sorted(unknown))}")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    rng = np.random.default_rng(seed)
    N, j, h = params.N, params.j, params.hbar
    ops = build_spin_operators(params)
    errs: dict[str, float] = {}

    errs["weyl_closed_form"] = max(
        np.abs(weyl_quantize(FactorizedSymbol.fx(params), params) - ops.jx).max(),
        np.abs(weyl_quantize(FactorizedSymbol.fy(params), params) - ops.jy).max(),
        np.abs(weyl_quantize(FactorizedSymbol.fz(params), params) - ops.jz).max(),
    )

    jx, jy, jz = ops.jx, ops.jy, ops.jz
    comm = lambda a, b: a @ b - b @ a  # noqa: E731
    errs["commutators"] = max(
        _rel(np.linalg.norm(comm(jx, jy) - 1j * h * jz), np.linalg.norm(jz)),
        _rel(np.linalg.norm(comm(jy, jz) - 1j * h * jx), np.linalg.norm(jx)),
        _rel(np.linalg.norm(comm(jz, jx) - 1j * h * jy), np.linalg.norm(jy)),
    )
    cas = h * h * j * (j + 1)
    errs["casimir"] = _rel(np.linalg.norm(ops.casimir() - cas * np.eye(N)), cas)

    states = [StateVector.random(params, rng) for _ in range(trials)]
    e_dft = e_eq = e_mass = e_marg = e_phi0 = 0.0
    for psi in states:
        mom = dft_inverse(psi)
        e_dft = max(e_dft, np.abs(dft_forward(mom).coeffs - psi.coeffs).max(),
                    abs(mom.norm2() - psi.norm2()))
        wp = wigner_from_position(psi)
        wm = wigner_from_momentum(mom)
        e_eq = max(e_eq, np.abs(wp.weights - wm.weights).max())
        e_mass = max(e_mass, abs(wp.total() - 1.0))
        odd_y, odd_x = odd_sums(wp)
        e_marg = max(e_marg,
                     np.abs(marginal_xi(wp) - np.abs(psi.coeffs) ** 2).max(),
                     np.abs(marginal_phi(wp) - np.abs(mom.coeffs) ** 2).max(),
                     np.abs(odd_y).max(initial=0.0), np.abs(odd_x).max(initial=0.0))
        shifted = StateVector(params.with_phi0(1.1), psi.coeffs)
        e_phi0 = max(e_phi0, np.abs(wigner_from_position(shifted).weights - wp.weights).max())
    errs.update(dft_unitarity=e_dft, wigner_equivalence=e_eq, wigner_mass=e_mass,
                marginals=e_marg, phi0_independence=e_phi0)

    full_turn = rotation_operator(RotationSpec.about((0, 0, 1), 2 * np.pi), ops)
    expected_sign = -1.0 if N % 2 == 0 else 1.0
    errs["projective_sign"] = np.abs(full_turn - expected_sign * np.eye(N)).max()

    e_hom = 0.0
    for _ in range(trials):
        r1, r2 = RotationSpec.random(rng), RotationSpec.random(rng)
        prod = rotation_operator(r1, ops) @ rotation_operator(r2, ops)
        comp = rotation_operator(r1.then(r2), ops)
        signs = (1.0,) if N % 2 else (1.0, -1.0)
        e_hom = max(e_hom, min(np.abs(prod - s * comp).max() for s in signs))
    errs["homomorphism"] = e_hom

    mixed = [DensityMatrix.random(params, rng) for _ in range(trials)]
    pure = [averaged_wigner(p, lmax=N + 1) for p in states]
    target = 1.0 / (params.s * np.sqrt(4 * np.pi))
    e_band = e_mono = e_rec = 0.0
    for rho in mixed:
        c = averaged_wigner(rho, lmax=N + 1)
        e_band = max(e_band, c.max_above(N - 1))
        e_mono = max(e_mono, abs(c.get(0, 0) - target))
        back = reconstruct(c.with_lmax(N - 1))
        e_rec = max(e_rec, np.linalg.norm(back.entries - rho.entries, 2))
    for c in pure:
        e_band = max(e_band, c.max_above(N - 1))
        e_mono = max(e_mono, abs(c.get(0, 0) - target))
    errs.update(band_limit=e_band, monopole=e_mono, reconstruction=e_rec)

    errs["covariance"] = max(covariance_check(psi, RotationSpec.random(rng)) for psi in states)

    rho = mixed[0]
    plain = averaged_wigner(rho)
    errs["sign_cancellation"] = float(np.abs(averaged_wigner(rho, flip_sign=True).coeffs - plain.coeffs).max())
    doubled = averaged_wigner(rho, band=2 * (N - 1) * 2)
    errs["quadrature_stability"] = float(np.abs(doubled.coeffs - plain.coeffs).max())

    return [CheckResult(name, float(err), tol[name]) for name, err in errs.items()]


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'error':>10}  {'tol':>8}  result"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {r.error:>10.2e}  {r.tol:>8.0e}  {'PASS' if r.passed else 'FAIL'}")
    return "\n".join(lines)
