"""Command-line front end.

Subcommands:

* ``check``          validate a model file, report dissipation residuals
* ``evolve``         propagate a state, emit a density-matrix trajectory CSV
* ``probabilities``  closed-form dephasing-qubit transition/survival curves
* ``nu``             two-flavor survival spectra
* ``nu-fit``         least-squares fit of a survival spectrum
* ``basis``          dump the trace-orthonormal Hermitian basis
* ``lindblad``       dump the jump operators of a model

Model files are JSON: ``dimension``, ``basis`` (always ``"gell-mann"``),
``hamiltonian`` and ``kossakowski`` as nested ``[re, im]`` pairs, the latter
written in coordinates of the orthonormal basis that ``basis`` names.

Exit codes: 0 success (for ``check``: valid and dispersive), 1 valid but not
dispersive, 2 invalid input, 3 fit hit the cycle limit, 141 output pipe
closed early.  Floats print with 17 significant digits so identical inputs
give byte-identical output.  The ``DQS_TOL`` environment variable overrides
the default tolerance of tolerance-taking commands.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from . import dynamics, gks, linalg, neutrino, qubit

DEFAULT_TOL = linalg.KERNEL_TOL


class CliError(Exception):
    """Bad input; reported on stderr with exit code 2."""


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _fmt_bool(flag: bool) -> str:
    return "true" if flag else "false"


def _resolve_tol(explicit: Optional[float]) -> float:
    if explicit is not None:
        value = explicit
    else:
        raw = os.environ.get("DQS_TOL")
        if raw is None:
            return DEFAULT_TOL
        try:
            value = float(raw)
        except ValueError:
            raise CliError(f"DQS_TOL is not a number: {raw!r}") from None
    if not (math.isfinite(value) and value > 0.0):
        raise CliError(f"tolerance must be a positive number, got {value!r}")
    return value


# ------------------------------------------------------------------ model files

class Model(NamedTuple):
    dimension: int
    hamiltonian: np.ndarray
    kossakowski: np.ndarray


def matrix_to_pairs(m: np.ndarray) -> List[List[List[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def pairs_to_matrix(data, rows: int, cols: int, what: str) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise CliError(f"{what}: expected nested [re, im] pairs") from None
    if arr.shape != (rows, cols, 2):
        raise CliError(f"{what}: expected {rows}x{cols} entries of [re, im] pairs, "
                       f"got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def load_model(path) -> Model:
    """Read and shape-check a model file without validating the physics.

    Hermiticity and positivity are left to the caller so that ``check`` can
    report residuals for broken files instead of failing outright.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read model file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise CliError(f"{path}: model file must hold a JSON object")
    for key in ("dimension", "hamiltonian", "kossakowski"):
        if key not in doc:
            raise CliError(f"{path}: missing key {key!r}")
    basis = doc.get("basis", "gell-mann")
    if basis != "gell-mann":
        raise CliError(f"unsupported basis {basis!r}")
    n = doc["dimension"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise CliError(f"dimension must be an integer >= 2, got {n!r}")
    h = pairs_to_matrix(doc["hamiltonian"], n, n, "hamiltonian")
    a = pairs_to_matrix(doc["kossakowski"], n * n - 1, n * n - 1, "kossakowski")
    return Model(dimension=n, hamiltonian=h, kossakowski=a)


def _matrix_json(m) -> str:
    rows = [json.dumps(row) for row in matrix_to_pairs(m)]
    return "[\n    " + ",\n    ".join(rows) + "\n  ]"


def save_model(path, dimension: int, hamiltonian, kossakowski) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("{\n")
        fh.write(f'  "dimension": {int(dimension)},\n')
        fh.write('  "basis": "gell-mann",\n')
        fh.write(f'  "hamiltonian": {_matrix_json(hamiltonian)},\n')
        fh.write(f'  "kossakowski": {_matrix_json(kossakowski)}\n')
        fh.write("}\n")


def build_liouvillian(model: Model) -> gks.GKSLiouvillian:
    """Strict construction; raises CliError when the model is not physical."""
    basis = gks.gell_mann_basis(model.dimension)
    try:
        koss = gks.KossakowskiMatrix(model.dimension, model.kossakowski)
        return gks.GKSLiouvillian(model.hamiltonian, koss, basis)
    except ValueError as exc:
        raise CliError(str(exc)) from None


# ------------------------------------------------------------------ subcommands

def cmd_check(args) -> int:
    tol = _resolve_tol(args.tol)
    model = load_model(args.model)
    h, a = model.hamiltonian, model.kossakowski
    a_sym = 0.5 * (a + a.conj().T)
    w, _ = linalg.hermitian_eigen(a_sym)
    print(f"dimension={model.dimension}")
    print("basis=gell-mann")
    print(f"hamiltonian_hermiticity_defect={_fmt(linalg.hermiticity_defect(h))}")
    print(f"hamiltonian_trace_re={_fmt(np.trace(h).real)}")
    print(f"kossakowski_hermiticity_defect={_fmt(linalg.hermiticity_defect(a))}")
    print(f"kossakowski_min_eigenvalue={_fmt(w[0])}")
    try:
        liou = build_liouvillian(model)
    except CliError as exc:
        print("valid=false")
        print(f"error={exc}")
        return 2
    print("valid=true")
    verdict = gks.is_dispersive(liou, tol=tol)
    print(f"dissipation_residual={_fmt(verdict.residual)}")
    print(f"tolerance={_fmt(tol)}")
    print(f"dispersive={_fmt_bool(verdict.dispersive)}")
    return 0 if verdict.dispersive else 1


def _parse_inline_state(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 2:
        raise CliError(f"--state wants 'a,b' with a the upper population, got {text!r}")
    try:
        a = float(parts[0])
        b = complex(parts[1])
    except ValueError as exc:
        raise CliError(f"--state: {exc}") from None
    return np.array([[a, b], [np.conj(b), 1.0 - a]])


def _time_grid(t_max: float, steps: int) -> List[float]:
    if t_max < 0.0:
        raise CliError(f"--t-max must be nonnegative, got {t_max!r}")
    if steps < 1:
        raise CliError(f"--steps must be at least 1, got {steps!r}")
    if t_max == 0.0:
        return [0.0]
    return [k * t_max / steps for k in range(steps + 1)]


def cmd_evolve(args) -> int:
    liou = build_liouvillian(load_model(args.model))
    n = liou.dim
    if args.state is not None and args.state_file is not None:
        raise CliError("give either --state or --state-file, not both")
    if args.state is not None:
        if n != 2:
            raise CliError("--state 'a,b' only describes dimension-2 states; "
                           "use --state-file")
        matrix = _parse_inline_state(args.state)
    elif args.state_file is not None:
        try:
            with open(args.state_file, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise CliError(f"cannot read state file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise CliError(f"{args.state_file}: not valid JSON ({exc})") from None
        matrix = pairs_to_matrix(doc, n, n, "state")
    else:
        raise CliError("an initial state is required: --state or --state-file")
    try:
        rho = linalg.DensityMatrix(matrix)
    except ValueError as exc:
        raise CliError(f"not a density matrix: {exc}") from None

    times = _time_grid(args.t_max, args.steps)
    h = liou.hamiltonian
    header = ["t"]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            header += [f"rho_{i}_{j}_re", f"rho_{i}_{j}_im"]
    header += ["trace_re", "entropy", "energy"]
    print(",".join(header))
    for t in times:
        out = dynamics.propagate(liou, rho, t).matrix
        cells = [_fmt(t)]
        for i in range(n):
            for j in range(n):
                cells += [_fmt(out[i, j].real), _fmt(out[i, j].imag)]
        cells.append(_fmt(np.trace(out).real))
        cells.append(_fmt(dynamics.von_neumann_entropy(out)))
        cells.append(_fmt(np.trace(out @ h).real))
        print(",".join(cells))
    return 0


def cmd_probabilities(args) -> int:
    try:
        params = qubit.DispersiveQubitParams(-0.5 * args.delta, 0.5 * args.delta,
                                             args.lam)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    times = _time_grid(args.t_max, args.steps)
    print("t,P_transition,P_surviving")
    try:
        for t in times:
            pt = qubit.transition_probability(params, args.theta, t)
            print(f"{_fmt(t)},{_fmt(pt)},{_fmt(1.0 - pt)}")
    except ValueError as exc:
        raise CliError(str(exc)) from None
    return 0


def _theta_from_args(args) -> float:
    if (args.theta is None) == (args.tan2theta is None):
        raise CliError("give exactly one of --theta or --tan2theta")
    if args.theta is not None:
        return args.theta
    if args.tan2theta < 0.0:
        raise CliError(f"--tan2theta must be nonnegative, got {args.tan2theta!r}")
    return math.atan(math.sqrt(args.tan2theta))


def cmd_nu(args) -> int:
    try:
        params = neutrino.OscillationParams(args.dm2, _theta_from_args(args),
                                            args.lambda_km)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    modes = sum([args.loe_range is not None,
                 args.baseline is not None or args.energy is not None])
    if modes != 1:
        raise CliError("give either --loe-range, or --L with --E")
    if args.loe_range is not None:
        fields = args.loe_range.split(":")
        if len(fields) != 3:
            raise CliError(f"--loe-range wants lo:hi:points, got {args.loe_range!r}")
        try:
            lo, hi = float(fields[0]), float(fields[1])
            points = int(fields[2])
        except ValueError as exc:
            raise CliError(f"--loe-range: {exc}") from None
        if not 0.0 <= lo <= hi:
            raise CliError(f"--loe-range wants 0 <= lo <= hi, got {args.loe_range!r}")
        if points < 1 or (points == 1 and lo != hi):
            raise CliError("--loe-range needs at least 2 points for lo < hi")
        xs = np.linspace(lo, hi, points)
        print("L_over_E_km_per_GeV,P_survival,P_transition")
        for x in xs:
            p = neutrino.survival_at_l_over_e(params, float(x))
            print(f"{_fmt(x)},{_fmt(p)},{_fmt(1.0 - p)}")
        return 0
    if args.baseline is None or args.energy is None:
        raise CliError("single-point mode needs both --L and --E")
    try:
        p = neutrino.survival_probability(params, args.baseline, args.energy)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    print("L_km,E_GeV,P_survival,P_transition")
    print(f"{_fmt(args.baseline)},{_fmt(args.energy)},{_fmt(p)},{_fmt(1.0 - p)}")
    return 0


def _parse_bounds(items: Sequence[str]) -> Dict[str, tuple]:
    bounds = {}
    for item in items:
        name, sep, rest = item.partition("=")
        pieces = rest.split(":")
        if not sep or len(pieces) != 2:
            raise CliError(f"--bounds wants name=lo:hi, got {item!r}")
        try:
            bounds[name] = (float(pieces[0]), float(pieces[1]))
        except ValueError as exc:
            raise CliError(f"--bounds {item!r}: {exc}") from None
    return bounds


def _parse_fixed(items: Sequence[str]) -> Dict[str, float]:
    fixed = {}
    for item in items:
        name, sep, rest = item.partition("=")
        if not sep:
            raise CliError(f"--fix wants name=value, got {item!r}")
        try:
            fixed[name] = float(rest)
        except ValueError as exc:
            raise CliError(f"--fix {item!r}: {exc}") from None
    return fixed


def cmd_nu_fit(args) -> int:
    try:
        points = neutrino.read_spectrum_csv(args.data)
    except OSError as exc:
        raise CliError(f"cannot read spectrum: {exc}") from None
    except ValueError as exc:
        raise CliError(f"{args.data}: {exc}") from None
    bounds = _parse_bounds(args.bounds or [])
    fixed = _parse_fixed(args.fix or [])
    try:
        fit = neutrino.fit_parameters(points, bounds=bounds or None,
                                      fixed=fixed or None,
                                      grid_points=args.grid_points,
                                      max_cycles=args.max_cycles)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    print(f"points={len(points)}")
    print(f"dm2={_fmt(fit.params.dm2)}")
    print(f"theta={_fmt(fit.params.theta)}")
    print(f"tan2theta={_fmt(math.tan(fit.params.theta) ** 2)}")
    print(f"sin2_2theta={_fmt(fit.params.sin2_2theta)}")
    print(f"lambda_km={_fmt(fit.params.lambda_km)}")
    print(f"sse={_fmt(fit.sse)}")
    print(f"converged={_fmt_bool(fit.converged)}")
    print(f"cycles={fit.cycles}")
    print(f"grid_dm2={_fmt(fit.grid_params.dm2)}")
    print(f"grid_theta={_fmt(fit.grid_params.theta)}")
    print(f"grid_lambda_km={_fmt(fit.grid_params.lambda_km)}")
    print(f"grid_sse={_fmt(fit.grid_sse)}")
    return 0 if fit.converged else 3


def cmd_basis(args) -> int:
    if args.dimension < 2:
        raise CliError(f"--dimension must be at least 2, got {args.dimension!r}")
    basis = gks.gell_mann_basis(args.dimension)
    print("element,row,col,re,im")
    for k, f in enumerate(basis.elements, start=1):
        for i in range(args.dimension):
            for j in range(args.dimension):
                print(f"{k},{i + 1},{j + 1},{_fmt(f[i, j].real)},{_fmt(f[i, j].imag)}")
    return 0


def cmd_lindblad(args) -> int:
    liou = build_liouvillian(load_model(args.model))
    try:
        ops = gks.lindblad_operators(liou.kossakowski, liou.basis)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    n = liou.dim
    print("operator,row,col,re,im")
    for k, v in enumerate(ops, start=1):
        for i in range(n):
            for j in range(n):
                print(f"{k},{i + 1},{j + 1},{_fmt(v[i, j].real)},{_fmt(v[i, j].imag)}")
    return 0


# ------------------------------------------------------------------ wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqs",
        description="Dispersive quantum systems: model checks, propagation, "
                    "dephasing-qubit curves, and two-flavor survival spectra.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a model file, report dispersiveness")
    p.add_argument("model", help="JSON model file")
    p.add_argument("--tol", type=float, default=None,
                   help="dissipation tolerance (default: DQS_TOL or 1e-9)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("evolve", help="propagate a state and emit a trajectory CSV")
    p.add_argument("model", help="JSON model file")
    p.add_argument("--state", help="inline qubit state 'a,b' "
                                   "(upper population, coherence)")
    p.add_argument("--state-file", help="JSON file of nested [re, im] pairs")
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=200)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("probabilities",
                       help="closed-form dephasing-qubit probability curves")
    p.add_argument("--delta", type=float, default=5.0, help="level splitting")
    p.add_argument("--theta", type=float, default=math.pi / 8.0,
                   help="mixing angle of the measured observable")
    p.add_argument("--lam", type=float, default=0.0, help="dephasing rate")
    p.add_argument("--t-max", type=float, default=20.0)
    p.add_argument("--steps", type=int, default=500)
    p.set_defaults(func=cmd_probabilities)

    p = sub.add_parser("nu", help="two-flavor survival spectrum")
    p.add_argument("--dm2", type=float, required=True,
                   help="squared-mass splitting in eV^2")
    p.add_argument("--theta", type=float, default=None, help="mixing angle")
    p.add_argument("--tan2theta", type=float, default=None,
                   help="tan^2 of the mixing angle (alternative to --theta)")
    p.add_argument("--lambda-km", type=float, default=0.0,
                   help="damping rate in 1/km")
    p.add_argument("--L", dest="baseline", type=float, default=None,
                   help="baseline in km (with --E)")
    p.add_argument("--E", dest="energy", type=float, default=None,
                   help="energy in GeV (with --L)")
    p.add_argument("--loe-range", default=None,
                   help="L/E sweep as lo:hi:points, km/GeV")
    p.set_defaults(func=cmd_nu)

    p = sub.add_parser("nu-fit", help="fit a survival spectrum CSV")
    p.add_argument("data", help="CSV with header "
                                "L_over_E_km_per_GeV,P_survival[,weight]")
    p.add_argument("--bounds", action="append", metavar="NAME=LO:HI",
                   help="override search bounds (repeatable)")
    p.add_argument("--fix", action="append", metavar="NAME=VALUE",
                   help="pin a parameter (repeatable)")
    p.add_argument("--grid-points", type=int, default=41)
    p.add_argument("--max-cycles", type=int, default=60)
    p.set_defaults(func=cmd_nu_fit)

    p = sub.add_parser("basis", help="dump the trace-orthonormal Hermitian basis")
    p.add_argument("--dimension", type=int, default=2, help="Hilbert-space dimension")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("lindblad", help="dump the jump operators of a model")
    p.add_argument("model", help="JSON model file")
    p.set_defaults(func=cmd_lindblad)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help (0) and usage errors (2); report the code
        # instead so embedders get an int back
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # A downstream consumer closed early (dqs ... | head).  Park stdout
        # on devnull so the interpreter's exit flush does not raise a second
        # time, and use 128+SIGPIPE so the code cannot collide with the
        # semantic ones above.
        try:
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        except OSError:
            pass
        return 141


if __name__ == "__main__":
    sys.exit(main())
