"""Command-line interface: ``mermin-cv {eval,scan,max-violation,verify,bounds}``."""

from __future__ import annotations

import argparse
import os
import sys

from .correlators import PRESETS, analytic_intermediates
from .exceptions import (
    DegenerateStateError,
    InvalidParameterError,
    TruncationError,
    UnsupportedError,
)
from .fock import EntangledStateSpec
from .mermin import build_mermin, classical_bound, quantum_bound
from .scan import DiagonalGrid, RectangularGrid, ScanRequest, max_violation, run_scan, write_csv
from .validation import check_state_kind, parse_angle
from .verify import run_verification

WORKERS_ENV = "MERMIN_CV_WORKERS"


def read_config(path) -> dict:
    """Flat ``key = value`` file; keys mirror long flag names without ``--``."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            sep = "=" if "=" in line else ":" if ":" in line else None
            if sep is None:
                raise InvalidParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split(sep, 1))
            values[key.lstrip("-").replace("-", "_")] = value
    return values


def parse_angle_pairs(text):
    """``"0,pi/2; -pi/4,pi/4; pi/4,-pi/4"`` -> ``[(0, pi/2), ...]``."""
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 2:
            raise InvalidParameterError(f"angle pair {chunk!r} must be 'unprimed,primed'")
        pairs.append((parse_angle(parts[0]), parse_angle(parts[1])))
    return pairs


def _default_workers():
    value = os.environ.get(WORKERS_ENV)
    return int(value) if value else 1


def _add_state_options(p):
    p.add_argument("--config", help="flat key = value file; explicit flags override it")
    p.add_argument("--state", default="sc", help="sc (squeezed-coherent) or ss (squeezed-squeezed)")
    p.add_argument("--setup", type=int, default=1, help="Bell setup: 1 or 2")
    p.add_argument("--phi", help="relative phase (e.g. pi, 0, 3pi/4); defaults to the preset's")
    p.add_argument("--preset", help=f"angle preset: {', '.join(sorted(PRESETS))}")
    p.add_argument("--angles", help="explicit pairs 'a,a1; b,b1; ...' (radians or pi syntax)")
    p.add_argument("--method", default="analytic", help="analytic or oracle")
    p.add_argument("--cutoff", type=int, help="fixed Fock cutoff for the oracle (even)")
    p.add_argument("--workers", type=int, help=f"worker count (default ${WORKERS_ENV} or 1)")


def _add_grid_options(p):
    p.add_argument("--grid", default="diagonal", help="diagonal or rect")
    p.add_argument("--p-min", type=float, default=0.001)
    p.add_argument("--p-max", type=float, default=0.95)
    p.add_argument("--step", type=float, default=0.005)
    p.add_argument("--offset", type=float, default=0.001, help="param2 = param1 + offset")
    p.add_argument("--p1-min", type=float, default=0.001)
    p.add_argument("--p1-max", type=float, default=0.95)
    p.add_argument("--p1-num", type=int, default=200)
    p.add_argument("--p2-min", type=float, default=0.001)
    p.add_argument("--p2-max", type=float, default=0.95)
    p.add_argument("--p2-num", type=int, default=200)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mermin-cv",
        description="Mermin correlators for squeezed-coherent and squeezed-squeezed states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate the Mermin expectation at one parameter point")
    _add_state_options(p)
    p.add_argument("--alpha", type=float, help="coherent/squeezing parameter (sc)")
    p.add_argument("--eta", type=float, help="squeezing parameter (sc and ss)")
    p.add_argument("--sigma", type=float, help="second squeezing parameter (ss)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("scan", help="scan a parameter grid and write CSV")
    _add_state_options(p)
    _add_grid_options(p)
    p.add_argument("-o", "--output", default="-", help="CSV path ('-' for stdout)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("max-violation", help="grid point with the largest |<M>|")
    _add_state_options(p)
    _add_grid_options(p)
    p.set_defaults(func=cmd_max_violation)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--config", help="flat key = value file; explicit flags override it")
    p.add_argument("--cutoff", type=int, help="pin the Fock cutoff for every check")
    p.add_argument("--samples", type=int, default=100, help="random tuples per formula")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="classical and quantum bounds of M_n")
    p.add_argument("--config", help="flat key = value file; explicit flags override it")
    p.add_argument("n", type=int, help="party count, 2..6")
    p.set_defaults(func=cmd_bounds)
    parser.subcommands = dict(sub.choices)
    return parser


def _print_table(rows, out=None):
    out = out or sys.stdout
    width = max(len(k) for k, _ in rows)
    for key, value in rows:
        print(f"{key:<{width}}  {value}", file=out)


def _fmt(x):
    return f"{x:.12g}"


def _request(args, grid=None) -> ScanRequest:
    kind = check_state_kind(args.state)
    if args.angles and args.preset:
        raise InvalidParameterError("give either --preset or --angles, not both")
    if args.angles:
        angles = parse_angle_pairs(args.angles)
    else:
        angles = args.preset or f"{kind.value}-pi"
    return ScanRequest(
        state=kind.value,
        setup=args.setup,
        phi=args.phi,
        angles=angles,
        grid=grid if grid is not None else DiagonalGrid(),
        method=args.method,
        cutoff=args.cutoff,
        n_jobs=args.workers if args.workers is not None else _default_workers(),
    )


def _grid(args):
    if args.grid == "diagonal":
        return DiagonalGrid(args.p_min, args.p_max, args.step, args.offset)
    if args.grid in ("rect", "rectangular"):
        return RectangularGrid(
            args.p1_min, args.p1_max, args.p1_num, args.p2_min, args.p2_max, args.p2_num
        )
    raise InvalidParameterError(f"grid must be 'diagonal' or 'rect', got {args.grid!r}")


def _label(est):
    return "<M_3>" if est.polynomial_.n == 3 else "<2 M_4>"


def cmd_eval(args):
    kind = check_state_kind(args.state)
    if kind.value == "sc":
        names = ("alpha", "eta")
        point = (args.alpha, args.eta)
    else:
        names = ("eta", "sigma")
        point = (args.eta, args.sigma)
    missing = [n for n, v in zip(names, point) if v is None]
    if missing:
        raise InvalidParameterError(f"{kind.value} states need --{' and --'.join(missing)}")
    req = _request(args)
    est = req.estimator().fit()
    # raises DegenerateStateError with a diagnostic before any evaluation
    analytic_intermediates(EntangledStateSpec.from_params(kind, point[0], point[1], est.phi_))
    value = float(est.evaluate([point])[0])
    label = _label(est)
    _print_table(
        [
            ("state", kind.value),
            ("setup", str(int(est.setup_))),
            ("phi", _fmt(est.phi_)),
            (names[0], _fmt(point[0])),
            (names[1], _fmt(point[1])),
            ("method", est.correlator_method_.value),
            (label, _fmt(value)),
            (f"|{label}|", _fmt(abs(value))),
            ("classical bound", _fmt(est.classical_bound_)),
            ("quantum bound", _fmt(est.quantum_bound_)),
            ("violated", "true" if abs(value) > est.classical_bound_ else "false"),
        ]
    )
    return 0


def cmd_scan(args):
    rows, _ = run_scan(_request(args, _grid(args)))
    if args.output == "-":
        write_csv(rows, sys.stdout)
    else:
        try:
            write_csv(rows, args.output)
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
            return 1
    return 0


def cmd_max_violation(args):
    rows, est = run_scan(_request(args, _grid(args)))
    best = max_violation(rows, est.classical_bound_, est.quantum_bound_)
    label = _label(est)
    _print_table(
        [
            ("param1", _fmt(best.param1)),
            ("param2", _fmt(best.param2)),
            (label, _fmt(best.mermin_value)),
            (f"|{label}|", _fmt(best.magnitude)),
            ("classical bound", _fmt(best.classical_bound)),
            ("quantum bound", _fmt(best.quantum_bound)),
            ("gap to quantum bound", _fmt(best.gap_to_quantum_bound)),
            ("violated", "true" if best.magnitude > best.classical_bound else "false"),
        ]
    )
    return 0


def cmd_verify(args):
    if args.cutoff is not None and (args.cutoff < 2 or args.cutoff % 2):
        raise InvalidParameterError(f"--cutoff must be even and >= 2, got {args.cutoff}")
    results = run_verification(cutoff=args.cutoff, samples=args.samples, seed=args.seed)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<{width}}  max dev {r.deviation:.3e}  {r.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_bounds(args):
    n = args.n
    if not 2 <= n <= 6:
        raise InvalidParameterError(f"n must be between 2 and 6, got {n}")
    poly = build_mermin(n)
    rows = [
        ("n", str(n)),
        ("classical bound", _fmt(classical_bound(poly))),
        ("quantum bound", _fmt(quantum_bound(n))),
    ]
    if n == 4:
        rows += [
            ("classical bound (2 M_4)", _fmt(classical_bound(2 * poly))),
            ("quantum bound (2 M_4)", _fmt(2 * quantum_bound(n))),
        ]
    _print_table(rows)
    return 0


def _apply_config(parser, argv):
    """Re-parse with config-file values installed as subcommand defaults."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    config = read_config(args.config)
    subparser = parser.subcommands[args.command]
    known = {a.dest for a in subparser._actions}
    unknown = sorted(set(config) - known)
    if unknown:
        raise InvalidParameterError(f"unknown config keys: {', '.join(unknown)}")
    subparser.set_defaults(**config)
    return parser.parse_args(argv)


def main(argv=None):
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except DegenerateStateError as exc:
        print(f"error: degenerate state: {exc}", file=sys.stderr)
        return 1
    except TruncationError as exc:
        print(f"error: truncation: {exc}", file=sys.stderr)
        return 1
    except (InvalidParameterError, UnsupportedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
