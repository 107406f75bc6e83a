"""Command-line front end.

Exit codes: 0 success, 1 invalid input (bad flags or a file that violates
its schema), 2 a failed check in ``verify``, 3 a reconstruction whose
coefficients are outside the tomography image.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings

import numpy as np

from . import io
from .errors import NonPositiveReconstructionWarning, ReconstructionError, SpinPhaseError
from .hilbert import (
    DensityMatrix,
    HilbertParams,
    MomentumVector,
    StateVector,
    as_density,
    dft_inverse,
)
from .operators import build_spin_operators, spin_coherent_state
from .sphere import averaged_wigner, reconstruct
from .verify import format_table, run_checks
from .wigner import wigner_from_density, wigner_from_momentum, wigner_from_position

log = logging.getLogger("spinphase")

EXIT_SCHEMA = 1
EXIT_VERIFY = 2
EXIT_RECONSTRUCT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_SCHEMA, f"{self.prog}: error: {message}\n")


def _add_size(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--j", type=float, help="spin (half-integer)")
    g.add_argument("--N", type=int, help="number of levels, N = 2j + 1")
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--phi0", type=float, default=0.0, help="meridian offset in radians")


def _params(args) -> HilbertParams:
    if args.j is not None:
        return HilbertParams.from_spin(args.j, args.hbar, args.phi0)
    return HilbertParams(args.N, args.hbar, args.phi0)


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
        log.info("wrote %s", path)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinphase", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("state", help="generate a state file")
    _add_size(p)
    p.add_argument("--kind", default="basis",
                   choices=["basis", "m", "coherent", "random", "random-mixed", "maximally-mixed"])
    p.add_argument("--index", type=int, default=0, help="k for --kind basis")
    p.add_argument("--m", type=float, help="magnetic quantum number for --kind m")
    p.add_argument("--theta", type=float, default=0.0, help="polar angle for --kind coherent")
    p.add_argument("--phi", type=float, default=0.0, help="azimuth for --kind coherent")
    p.add_argument("--rep", choices=["position", "momentum"], default="position")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")

    p = sub.add_parser("operators", help="dump jx, jy, jz")
    _add_size(p)
    p.add_argument("-o", "--output")

    p = sub.add_parser("wigner", help="lattice Wigner function of a state file")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("-o", "--output")

    p = sub.add_parser("avg-wigner", help="rotation-averaged Wigner multipoles")
    p.add_argument("-i", "--input", required=True, help="state or density-matrix JSON")
    p.add_argument("--lmax", type=int, help="highest degree to compute (default 2j)")
    p.add_argument("--quadrature-band", type=int,
                   help="Haar quadrature exactness degree (default 2j + lmax)")
    p.add_argument("-o", "--output")

    p = sub.add_parser("reconstruct", help="density matrix from multipole JSON")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--residual-tol", type=float, default=1e-8)
    p.add_argument("-o", "--output")

    p = sub.add_parser("verify", help="run the invariant suite for one spin")
    _add_size(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="override one tolerance, e.g. --tol covariance=1e-8")
    return parser


def _cmd_state(args) -> int:
    params = _params(args)
    rng = np.random.default_rng(args.seed)
    if args.kind in ("random-mixed", "maximally-mixed"):
        rho = (DensityMatrix.random(params, rng) if args.kind == "random-mixed"
               else DensityMatrix.maximally_mixed(params))
        _emit(io.dumps(io.density_to_json(rho)), args.output)
        return 0
    if args.kind == "basis":
        psi = StateVector.basis(params, args.index)
    elif args.kind == "m":
        if args.m is None:
            raise SpinPhaseError("--kind m needs --m")
        psi = StateVector.from_m(params, args.m)
    elif args.kind == "coherent":
        psi = spin_coherent_state(params, args.theta, args.phi)
    else:
        psi = StateVector.random(params, rng)
    out = dft_inverse(psi) if args.rep == "momentum" else psi
    _emit(io.dumps(io.state_to_json(out)), args.output)
    return 0


def _cmd_operators(args) -> int:
    _emit(io.dumps(io.operators_to_json(build_spin_operators(_params(args)))), args.output)
    return 0


def _cmd_wigner(args) -> int:
    obj = io.any_state_from_json(io.read_json(args.input))
    if isinstance(obj, DensityMatrix):
        w = wigner_from_density(obj)
    elif isinstance(obj, MomentumVector):
        w = wigner_from_momentum(obj)
    else:
        w = wigner_from_position(obj)
    text = io.lattice_to_csv(w) if args.format == "csv" else io.dumps(io.lattice_to_json(w))
    _emit(text, args.output)
    return 0


def _cmd_avg(args) -> int:
    rho = as_density(io.any_state_from_json(io.read_json(args.input)))
    c = averaged_wigner(rho, lmax=args.lmax, band=args.quadrature_band)
    _emit(io.dumps(io.multipoles_to_json(c)), args.output)
    return 0


def _cmd_reconstruct(args) -> int:
    c = io.multipoles_from_json(io.read_json(args.input))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonPositiveReconstructionWarning)
        try:
            rho = reconstruct(c, tol=args.residual_tol)
        except ReconstructionError as exc:
            print(f"reconstruction failed: {exc}", file=sys.stderr)
            return EXIT_RECONSTRUCT
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _emit(io.dumps(io.density_to_json(rho)), args.output)
    return 0


def _cmd_verify(args) -> int:
    params = _params(args)
    overrides = {}
    for item in args.tol:
        name, _, value = item.partition("=")
        try:
            overrides[name] = float(value)
        except ValueError:
            raise SpinPhaseError(f"--tol expects NAME=VALUE, got {item!r}") from None
    results = run_checks(params, seed=args.seed, trials=args.trials, tolerances=overrides)
    print(f"j = {params.j:g}  (N = {params.N}, hbar = {params.hbar:g})")
    print(format_table(results))
    failed = [r.name for r in results if not r.passed]
    print("all checks passed" if not failed else f"FAILED: {', '.join(failed)}")
    return EXIT_VERIFY if failed else 0


COMMANDS = {
    "state": _cmd_state,
    "operators": _cmd_operators,
    "wigner": _cmd_wigner,
    "avg-wigner": _cmd_avg,
    "reconstruct": _cmd_reconstruct,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (SpinPhaseError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
