"""JSON and CSV file formats.

Complex numbers are written as [re, im] pairs. Floats go through ``repr``
(JSON) or ``%.17g`` (CSV) so files round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import SchemaError, SpinPhaseError
from .hilbert import DensityMatrix, HilbertParams, MomentumVector, StateVector
from .operators import SpinOperatorSet
from .sphere import MultipoleCoeffs, lm_index
from .wigner import WignerLattice


def _pairs(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [_pairs(row) for row in a]


def _complex(obj: Any, where: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: expected nested [re, im] pairs") from exc
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise SchemaError(f"{where}: expected nested [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _require(d: dict, key: str, kind, where: str):
    if not isinstance(d, dict) or key not in d:
        raise SchemaError(f"{where}: missing field {key!r}")
    val = d[key]
    if kind is float and isinstance(val, (int, float)) and not isinstance(val, bool):
        return float(val)
    if kind is int and isinstance(val, int) and not isinstance(val, bool):
        return val
    if kind not in (float, int) and isinstance(val, kind):
        return val
    raise SchemaError(f"{where}: field {key!r} has wrong type {type(val).__name__}")


def _params(d: dict, where: str) -> HilbertParams:
    N = _require(d, "N", int, where)
    hbar = _require(d, "hbar", float, where) if "hbar" in d else 1.0
    phi0 = _require(d, "phi0", float, where) if "phi0" in d else 0.0
    try:
        return HilbertParams(N, hbar, phi0)
    except SpinPhaseError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


# states

def state_to_json(v: StateVector | MomentumVector) -> dict:
    rep = "momentum" if isinstance(v, MomentumVector) else "position"
    p = v.params
    return {"N": p.N, "hbar": p.hbar, "phi0": p.phi0, "rep": rep, "coeffs": _pairs(v.coeffs)}


def state_from_json(d: dict) -> StateVector | MomentumVector:
    params = _params(d, "state")
    rep = _require(d, "rep", str, "state")
    if rep not in ("position", "momentum"):
        raise SchemaError(f"state: rep must be 'position' or 'momentum', got {rep!r}")
    coeffs = _complex(_require(d, "coeffs", list, "state"), "state.coeffs")
    if coeffs.shape != (params.N,):
        raise SchemaError(f"state: expected {params.N} coefficients, got {coeffs.size}")
    cls = StateVector if rep == "position" else MomentumVector
    return cls(params, coeffs)


def density_to_json(rho: DensityMatrix) -> dict:
    p = rho.params
    return {"N": p.N, "hbar": p.hbar, "phi0": p.phi0, "entries": _pairs(rho.entries)}


def density_from_json(d: dict, validate: bool = True) -> DensityMatrix:
    params = _params(d, "density")
    entries = _complex(_require(d, "entries", list, "density"), "density.entries")
    if entries.shape != (params.N, params.N):
        raise SchemaError(f"density: expected {params.N}x{params.N} entries")
    return DensityMatrix(params, entries, validate=validate)


def any_state_from_json(d: dict) -> StateVector | MomentumVector | DensityMatrix:
    """A state document (has 'rep') or a density-matrix document (has 'entries')."""
    if isinstance(d, dict) and "entries" in d:
        return density_from_json(d)
    return state_from_json(d)


# operators

def operators_to_json(ops: SpinOperatorSet) -> dict:
    p = ops.params
    return {"j": p.j, "hbar": p.hbar,
            "jx": _pairs(ops.jx), "jy": _pairs(ops.jy), "jz": _pairs(ops.jz)}


def operators_from_json(d: dict) -> SpinOperatorSet:
    j = _require(d, "j", float, "operators")
    hbar = _require(d, "hbar", float, "operators")
    params = HilbertParams.from_spin(j, hbar)
    mats = {k: _complex(_require(d, k, list, "operators"), f"operators.{k}") for k in ("jx", "jy", "jz")}
    for k, m in mats.items():
        if m.shape != (params.N, params.N):
            raise SchemaError(f"operators.{k}: expected {params.N}x{params.N}")
    return SpinOperatorSet(params, **mats)


# multipoles

def multipoles_to_json(c: MultipoleCoeffs) -> dict:
    p = c.params
    ls, ms = lm_index(c.lmax)
    return {
        "j": p.j, "s": p.s, "lmax": c.lmax, "phi0": p.phi0,
        "coeffs": [{"l": int(l), "m": int(m), "re": float(z.real), "im": float(z.imag)}
                   for l, m, z in zip(ls, ms, c.coeffs)],
    }


def multipoles_from_json(d: dict) -> MultipoleCoeffs:
    """Read the multipole schema; ``phi0`` is optional and defaults to 0."""
    j = _require(d, "j", float, "multipoles")
    s = _require(d, "s", float, "multipoles")
    lmax = _require(d, "lmax", int, "multipoles")
    phi0 = _require(d, "phi0", float, "multipoles") if "phi0" in d else 0.0
    if lmax < 0:
        raise SchemaError("multipoles: lmax must be non-negative")
    try:
        N = HilbertParams.from_spin(j).N
        params = HilbertParams(N, 2.0 * s / N, phi0)
    except SpinPhaseError as exc:
        raise SchemaError(f"multipoles: {exc}") from exc
    out = np.zeros((lmax + 1) ** 2, dtype=complex)
    for i, entry in enumerate(_require(d, "coeffs", list, "multipoles")):
        where = f"multipoles.coeffs[{i}]"
        l, m = _require(entry, "l", int, where), _require(entry, "m", int, where)
        if not (0 <= l <= lmax and -l <= m <= l):
            raise SchemaError(f"{where}: (l={l}, m={m}) outside lmax={lmax}")
        out[l * l + l + m] = complex(_require(entry, "re", float, where),
                                     _require(entry, "im", float, where))
    return MultipoleCoeffs(params, lmax, out)


# Wigner lattice

LATTICE_FIELDS = ("x", "y", "phi", "xi", "weight")


def lattice_to_csv(w: WignerLattice) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LATTICE_FIELDS)
    for x, y, phi, xi, weight in w.rows():
        writer.writerow([x, y, f"{phi:.17g}", f"{xi:.17g}", f"{weight:.17g}"])
    return buf.getvalue()


def lattice_to_json(w: WignerLattice) -> dict:
    p = w.params
    return {"N": p.N, "hbar": p.hbar, "phi0": p.phi0,
            "points": [dict(zip(LATTICE_FIELDS, row)) for row in w.rows()]}


def lattice_from_csv(text: str, params: HilbertParams) -> WignerLattice:
    N = params.N
    weights = np.full((2 * N, 2 * N), math.nan)
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != LATTICE_FIELDS:
        raise SchemaError(f"lattice CSV header must be {','.join(LATTICE_FIELDS)}")
    for row in reader:
        weights[int(row["x"]), int(row["y"])] = float(row["weight"])
    if np.isnan(weights).any():
        raise SchemaError("lattice CSV does not cover the 2N x 2N cell")
    return WignerLattice(params, weights)


def read_json(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc


def dumps(doc: dict) -> str:
    return json.dumps(doc) + "\n"
