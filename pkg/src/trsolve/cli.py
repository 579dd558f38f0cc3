"""Command-line front end: files in, one JSON object out.

Exit codes: 0 success (including a feasible level), 2 a certified
infeasible level, 1 usage or input errors, 3 internal inconsistencies.
Every run, including failures, writes a single newline-terminated JSON
object; errors carry a stable ``error_kind``.  Output is byte-identical
across runs with the same inputs and seed, except for ``wall_time_ms``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import reference, trust_region
from .errors import (
    InternalInconsistencyError,
    InvalidProblemError,
    TrsolveError,
)
from .sparse import MatvecCounter, dump_vector, load_matrix_market, load_vector

INLINE_X_LIMIT = 1000


class _UsageError(SystemExit):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # emit JSON instead of argparse's usage dump
        raise _UsageError(message)


def _build_parser():
    p = _Parser(
        prog="trsolve",
        description="Approximately maximize x'Ax + 2b'x over the ellipsoid x'Mx <= 1.",
    )
    p.add_argument("--mode", required=True, choices=["maximize", "feasibility", "reference"])
    p.add_argument("--matrix-a", required=True, help="Matrix Market file for A")
    p.add_argument(
        "--vector-b",
        required=True,
        help="vector file for b (Matrix Market array or one value per line)",
    )
    p.add_argument("--matrix-m", default=None, help="Matrix Market file for M; omitted means the identity")
    p.add_argument("--c", type=float, default=None, help="feasibility level (feasibility mode)")
    p.add_argument("--epsilon", type=float, default=None, help="accuracy target")
    p.add_argument("--delta", type=float, default=0.1, help="failure probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None, help="output path; default stdout")
    p.add_argument(
        "--reference",
        action="store_true",
        help="cross-check maximize/feasibility against the dense oracle (n <= 64)",
    )
    return p


def _validate(args):
    if args.mode in ("maximize", "feasibility"):
        if args.epsilon is None:
            raise InvalidProblemError("--epsilon is required for this mode")
        if not 0.0 < args.epsilon < 1.0:
            raise InvalidProblemError("--epsilon must lie in (0, 1)")
        if not 0.0 < args.delta < 1.0:
            raise InvalidProblemError("--delta must lie in (0, 1)")
    if args.mode == "feasibility" and args.c is None:
        raise InvalidProblemError("--c is required in feasibility mode")


def _emit_x(payload, x, output):
    if len(x) <= INLINE_X_LIMIT:
        payload["x"] = [float(v) for v in x]
    else:
        sidecar = (output or "trsolve") + ".x.txt"
        with open(sidecar, "w", encoding="utf-8") as fh:
            fh.write(dump_vector(x))
        payload["x_file"] = sidecar


def _dense_problem(prob):
    a = prob.a.to_dense()
    m = None if prob.m is None else prob.m.to_dense()
    return a, prob.b, m


def _run(args):
    _validate(args)
    prob = trust_region.TrustRegionProblem(
        a=load_matrix_market(args.matrix_a),
        b=load_vector(args.vector_b),
        m=load_matrix_market(args.matrix_m) if args.matrix_m else None,
    )
    rng = np.random.default_rng(args.seed)
    payload = {"status": "", "mode": args.mode}

    if args.mode == "reference":
        tol = args.epsilon if args.epsilon is not None else 1e-9
        value, x = reference.solve_dense_exact(*_dense_problem(prob), tol=tol)
        payload["status"] = "ok"
        payload["value"] = float(value)
        _emit_x(payload, x, args.output)
        payload["oracle_calls"] = 0
        payload["matvecs"] = 0
        code = 0
    elif args.mode == "maximize":
        result = trust_region.maximize(prob, args.epsilon, args.delta, rng)
        payload["status"] = "ok"
        payload["value"] = float(result.value)
        _emit_x(payload, result.x, args.output)
        payload["oracle_calls"] = result.oracle_calls
        payload["matvecs"] = result.matvecs
        payload["outer_iterations"] = result.outer_iterations
        if args.reference:
            ref_value, _ = reference.solve_dense_exact(*_dense_problem(prob))
            payload["reference_value"] = float(ref_value)
            payload["reference_gap"] = float(ref_value - result.value)
        code = 0
    else:
        counter = MatvecCounter()
        out = trust_region.solve_feasibility(
            prob, args.c, args.epsilon, args.delta, rng, counter=counter
        )
        payload["level"] = float(out.level)
        if out.found:
            payload["status"] = "feasible"
            payload["value"] = float(out.value)
            _emit_x(payload, out.x, args.output)
            code = 0
        else:
            payload["status"] = "infeasible_at_level"
            code = 2
        payload["oracle_calls"] = out.oracle_calls
        payload["matvecs"] = counter.count
        if args.reference:
            ref_value, _ = reference.solve_dense_exact(*_dense_problem(prob))
            payload["reference_value"] = float(ref_value)

    payload["eps"] = args.epsilon
    payload["delta"] = args.delta
    payload["seed"] = args.seed
    return code, payload


def main(argv=None):
    started = time.perf_counter()
    output = None
    try:
        args = _build_parser().parse_args(argv)
        output = args.output
        code, payload = _run(args)
    except _UsageError as exc:
        code, payload = 1, {"status": "error", "error_kind": "usage_error", "message": str(exc)}
    except FileNotFoundError as exc:
        code, payload = 1, {"status": "error", "error_kind": "io_error", "message": str(exc)}
    except InternalInconsistencyError as exc:
        code, payload = 3, {"status": "error", "error_kind": exc.kind, "message": str(exc)}
    except TrsolveError as exc:
        code, payload = 1, {"status": "error", "error_kind": exc.kind, "message": str(exc)}

    payload["wall_time_ms"] = (time.perf_counter() - started) * 1000.0
    text = json.dumps(payload) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
