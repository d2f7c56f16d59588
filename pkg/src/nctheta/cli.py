"""Command-line driver.

Exit codes: 0 success, 1 verification failure, 2 parse error, 3 validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import classical, quantum
from .errors import ValidationError
from .problem import ProblemParseError, complex_to_json, load_problem, parse_complex, parse_complex_vector
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INVALID = 0, 1, 2, 3


def _emit(payload, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _parse_z(raw: str | None, n: int) -> np.ndarray:
    if raw is None:
        return np.zeros(n, dtype=complex)
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProblemParseError(f"--z is not JSON: {exc}") from None
    if n == 1 and not (isinstance(data, list) and data and isinstance(data[0], list)):
        z = np.array([parse_complex(data)])
    else:
        z = parse_complex_vector(data)
    if z.shape != (n,):
        raise ProblemParseError(f"--z must have {n} entries")
    return z


def _load(args):
    problem = load_problem(args.problem)
    if getattr(args, "radius", None) is not None:
        problem = replace(problem, radius=args.radius)
    if getattr(args, "seed", None) is not None:
        problem = replace(problem, seed=args.seed)
    return problem


def cmd_theta(args) -> int:
    p = _load(args)
    z = _parse_z(args.z, p.n)
    value, tail = classical.theta_with_tail(z, p.T, p.radius)
    _emit({"value": complex_to_json(value), "tail_bound": tail}, args.out)
    return EXIT_OK


def cmd_qtheta(args) -> int:
    p = _load(args)
    params = quantum.QuantumThetaParams(p.T, p.c, p.lattice)
    element = quantum.shifted_theta(params, p.radius).materialize()
    _emit(element.to_json(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    p = _load(args)
    reports = run_suite(p, args.suite, args.tolerance_scale)
    _emit([r.to_json() for r in reports], args.out)
    return EXIT_OK if all(r.pass_ for r in reports) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nctheta", description="Classical and quantum theta functions with identity checks."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("problem", help="problem JSON file")
        sp.add_argument("--radius", type=int, help="override the truncation radius")
        sp.add_argument("--out", help="write JSON here instead of stdout")

    sp = sub.add_parser("theta", help="evaluate the classical theta function")
    common(sp)
    sp.add_argument("--z", help='JSON complex vector, e.g. "[[0.5, 0]]" (default 0)')
    sp.set_defaults(func=cmd_theta)

    sp = sub.add_parser("qtheta", help="materialize the quantum theta function")
    common(sp)
    sp.set_defaults(func=cmd_qtheta)

    sp = sub.add_parser("verify", help="run identity checks")
    common(sp)
    sp.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    sp.add_argument("--seed", type=int, help="override the problem seed")
    sp.add_argument("--tolerance-scale", type=float, default=1.0)
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProblemParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
