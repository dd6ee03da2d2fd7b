"""Command-line interface.

Subcommands mirror the library: basis generation, the Klein-Gordon solver,
tree validation and splitting checks, the two IVP solvers, the Lie module
bases, and the constant-coefficient ODE helper.

Exit codes: 0 on success, 2 for input problems (bad arguments, schema
violations, invalid trees), 3 when an exact verification fails.  Output
written through --out is deterministic: identical inputs and seed produce
byte-identical files; wall time is only printed to stdout.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .bases import (
    BasisFamily,
    FlagEquationSpec,
    constant_coefficient_basis,
    flag_basis,
    harmonic_basis,
)
from .dissipative import anisymmetric_basis, dissipative_wave_basis, klein_gordon_solutions
from .ivp import OdeProblem, TrigData, ode_derivatives_at_zero, solve_constant_ode, \
    solve_flag_ivp, solve_tree_wave_ivp
from .lie import (
    commutation_checks,
    g2_module_basis,
    g2_singular_config,
    harmonic_module_basis,
    sl_module_basis,
    verify_singular,
)
from .operators import VerificationError
from .poly import Polynomial, variable
from .trees import InvalidTreeError, Tree, check_splitting, compute_splitting, tricomi_operator


class InputError(ValueError):
    pass


TREE_SCHEMA = {
    "type": "object",
    "required": ["nodes", "edges"],
    "properties": {
        "nodes": {"type": "integer", "minimum": 1},
        "edges": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "integer", "minimum": 1},
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
}

POLY_TERMS_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["exp", "re"],
        "properties": {
            "exp": {"type": "object", "additionalProperties": {"type": "integer"}},
            "re": {"type": "string"},
            "im": {"type": "string"},
        },
    },
}

FLAG_SPEC_SCHEMA = {
    "type": "object",
    "required": ["orders", "coefficients"],
    "properties": {
        "orders": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "coefficients": {"type": "array", "items": POLY_TERMS_SCHEMA},
        "variables": {"type": "array", "items": {"type": "string"}},
    },
}

MODES_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["k"],
        "properties": {
            "k": {"type": "array", "items": {"type": "integer"}},
            "cos": {"type": "number"},
            "sin": {"type": "number"},
        },
    },
}

DATA_SCHEMA = {
    "type": "object",
    "required": ["halfWidths"],
    "properties": {
        "halfWidths": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "modes": MODES_SCHEMA,
        "conditions": {
            "type": "array",
            "items": {"type": "object", "required": ["modes"], "properties": {"modes": MODES_SCHEMA}},
        },
        "g0": {"type": "object", "required": ["modes"], "properties": {"modes": MODES_SCHEMA}},
        "g1": {"type": "object", "required": ["modes"], "properties": {"modes": MODES_SCHEMA}},
    },
}

SYMBOLS_SCHEMA = {
    "type": "object",
    "required": ["symbols"],
    "properties": {
        "symbols": {"type": "array", "items": POLY_TERMS_SCHEMA},
        "variables": {"type": "array", "items": {"type": "string"}},
    },
}


def _validate(instance, schema, source: str):
    import jsonschema

    try:
        jsonschema.validate(instance, schema)
    except jsonschema.ValidationError as err:
        pointer = "/" + "/".join(str(p) for p in err.absolute_path)
        raise InputError(f"{source}: schema violation at {pointer}: {err.message}") from None


def _load_json(path: str, schema, label: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as err:
        raise InputError(f"cannot read {label} file {path}: {err}") from None
    except json.JSONDecodeError as err:
        raise InputError(f"{label} file {path} is not valid JSON: {err}") from None
    _validate(data, schema, path)
    return data


def _digest(argv, file_paths):
    h = hashlib.sha256()
    h.update(json.dumps(argv, sort_keys=True).encode())
    for path in file_paths:
        try:
            with open(path, "rb") as fh:
                h.update(fh.read())
        except OSError:
            pass
    return h.hexdigest()


def _emit(args, payload, file_paths=(), started=None):
    report = {
        "command": args._argv,
        "inputsDigest": _digest(args._argv, file_paths),
        "result": payload,
    }
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    if started is not None:
        print(f"wall time: {time.monotonic() - started:.3f}s", file=sys.stderr)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as err:
        raise InputError(f"not a rational number: {text!r} ({err})") from None


def _int_list(text: str):
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError as err:
        raise InputError(f"not an integer list: {text!r} ({err})") from None


def _family_payload(family: BasisFamily, verify_independence: bool, jobs: int):
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        op = family.annihilator
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            residuals = list(pool.map(lambda e: op(e.solution).is_zero(), family.elements))
        if not all(residuals):
            raise VerificationError("family element not annihilated exactly")
    else:
        family.verify_annihilation()
    if verify_independence and len(family) <= 200:
        family.verify_independence()
    return family.to_json()


def _cmd_basis(args):
    jobs = args.jobs
    if args.kind == "constant":
        if not args.orders:
            raise InputError("basis constant requires --orders")
        family = constant_coefficient_basis(_int_list(args.orders), args.cap)
    elif args.kind == "harmonic":
        family = harmonic_basis(args.n, args.cap)
    elif args.kind == "flag":
        if not args.spec:
            raise InputError("basis flag requires --spec")
        data = _load_json(args.spec, FLAG_SPEC_SCHEMA, "flag spec")
        variables = tuple(data.get("variables", ()))
        n = len(data["orders"])
        if not variables:
            variables = tuple(f"x{i}" for i in range(1, n + 1))
        coefficients = [
            Polynomial.from_json_terms(terms, variables)
            for terms in data["coefficients"]
        ]
        spec = FlagEquationSpec(tuple(data["orders"]), tuple(coefficients), variables)
        family = flag_basis(spec, args.cap)
    elif args.kind == "dissipative":
        family = dissipative_wave_basis(args.n, args.cap)
    elif args.kind == "anisym":
        if not args.lam:
            raise InputError("basis anisym requires --lambda")
        family = anisymmetric_basis(args.n, _fraction(args.lam), args.epsilon, args.cap)
    else:
        raise InputError(f"unknown basis kind {args.kind}")
    payload = _family_payload(family, verify_independence=not args.no_independence, jobs=jobs)
    _emit(args, payload, file_paths=[args.spec] if getattr(args, "spec", None) else [])
    return 0


def _cmd_solve_kg(args):
    a = _fraction(args.a)
    monomial = _int_list(args.monomial)
    if len(monomial) != 3:
        raise InputError("--monomial needs exactly three entries")
    first, second = klein_gordon_solutions(a, tuple(monomial), seed=args.seed)
    payload = {
        "frequency": str(a),
        "monomial": monomial,
        "solutions": [
            {
                "cos": sol.cos_part.to_json_terms(),
                "sin": sol.sin_part.to_json_terms(),
            }
            for sol in (first, second)
        ],
        "verified": True,
    }
    _emit(args, payload)
    return 0


def _cmd_tree(args):
    data = _load_json(args.tree, TREE_SCHEMA, "tree")
    tree = Tree.from_json(data)
    if args.action == "validate":
        _emit(args, {"valid": True, "tree": tree.to_json()}, file_paths=[args.tree])
        return 0
    if args.action == "xi":
        splitting = compute_splitting(tree)
        from .operators import op_to_json

        payload = {
            "tree": tree.to_json(),
            "tricomi": op_to_json(tricomi_operator(tree)),
            "exponents": [xi.to_json_terms() for xi in splitting.exponents],
        }
        _emit(args, payload, file_paths=[args.tree])
        return 0
    if args.action == "check-splitting":
        report = check_splitting(tree, args.cap, args.tcap)
        payload = {
            "tree": tree.to_json(),
            "degreeCap": report.degree_cap,
            "tPowerCap": report.t_power_cap,
            "monomialsChecked": report.monomials_checked,
            "verified": True,
        }
        _emit(args, payload, file_paths=[args.tree])
        return 0
    raise InputError(f"unknown tree action {args.action}")


def _grid_points(spec: str, axes):
    import numpy as np

    sizes = [int(v) for v in spec.split("x")]
    if len(sizes) != len(axes):
        raise InputError(
            f"grid {spec!r} has {len(sizes)} axes but the problem needs {len(axes)}"
        )
    lines = [np.linspace(lo, hi, size) for (lo, hi), size in zip(axes, sizes)]
    mesh = [axis.ravel() for axis in np.meshgrid(*lines, indexing="ij")]
    return [tuple(float(m[i]) for m in mesh) for i in range(len(mesh[0]))]


def _cmd_ivp_flag(args):
    sym_data = _load_json(args.symbols, SYMBOLS_SCHEMA, "symbols")
    data = _load_json(args.data, DATA_SCHEMA, "data")
    m = args.orders
    half_widths = tuple(data["halfWidths"])
    conditions = data.get("conditions")
    if conditions is None:
        conditions = [{"modes": data.get("modes", [])}]
    while len(conditions) < m:
        conditions.append({"modes": []})
    if len(conditions) != m:
        raise InputError(f"need {m} initial conditions, got {len(conditions)}")
    traces = [TrigData.from_json(c, half_widths) for c in conditions]
    dvars = tuple(f"D{i}" for i in range(2, len(half_widths) + 2))
    symbols = [
        Polynomial.from_json_terms(terms, sym_data.get("variables", dvars))
        for terms in sym_data["symbols"]
    ]
    if len(symbols) != m:
        raise InputError(f"need {m} symbols, got {len(symbols)}")
    axes = [(0.0, 1.0)] + [(-a, a) for a in half_widths]
    points = _grid_points(args.grid, axes)
    solution = solve_flag_ivp(symbols, traces, points)
    payload = _ivp_payload(points, solution.values, solution.trace_residual)
    _write_ivp(args, payload, points, solution.values, [args.symbols, args.data])
    return 0


def _cmd_ivp_tree(args):
    tree = Tree.from_json(_load_json(args.tree, TREE_SCHEMA, "tree"))
    data = _load_json(args.data, DATA_SCHEMA, "data")
    half_widths = tuple(data["halfWidths"])
    g0 = TrigData.from_json(data.get("g0", {"modes": data.get("modes", [])}), half_widths)
    g1 = TrigData.from_json(data.get("g1", {"modes": []}), half_widths)
    axes = [(-a, a) for a in half_widths]
    points = _grid_points(args.grid, axes)
    solution = solve_tree_wave_ivp(tree, g0, g1, args.t, points)
    payload = _ivp_payload(points, solution.values, solution.trace_residual)
    payload["t"] = args.t
    _write_ivp(args, payload, points, solution.values, [args.tree, args.data])
    return 0


def _ivp_payload(points, values, residual):
    return {
        "grid": [list(pt) for pt in points],
        "values": values,
        "verification": {"initialTraceResidual": residual, "tolerance": 1e-9, "passed": True},
    }


def _write_ivp(args, payload, points, values, file_paths):
    if getattr(args, "out", None) and args.out.endswith(".csv"):
        with open(args.out, "w") as fh:
            width = len(points[0])
            fh.write(",".join(f"x{i + 1}" for i in range(width)) + ",value\n")
            for pt, val in zip(points, values):
                fh.write(",".join(repr(c) for c in pt) + f",{val!r}\n")
        print(f"wrote {args.out}")
        print(json.dumps(payload["verification"], sort_keys=True))
    else:
        _emit(args, payload, file_paths=file_paths)


def _cmd_lie(args):
    if args.kind == "harmonic":
        family = harmonic_module_basis(args.n, args.k)
        extra = {}
    elif args.kind == "sl":
        family = sl_module_basis(args.n, args.l1, args.l2)
        top = variable("x1") ** args.l1 * variable(f"y{args.n}") ** args.l2
        from .lie import SingularConfig, sl_cartan, sl_generator

        positives = [
            (f"E{i}{j}", sl_generator(args.n, i, j))
            for i in range(1, args.n + 1)
            for j in range(i + 1, args.n + 1)
        ]
        config = SingularConfig(positives, [(f"h{i}", h) for i, h in enumerate(sl_cartan(args.n), 1)])
        check = verify_singular(config, top)
        extra = {"singularWeight": [str(w) for w in (check.weight or [])]}
    elif args.kind == "g2":
        family = g2_module_basis(args.k)
        check = verify_singular(g2_singular_config(), variable("x4") ** args.k)
        extra = {"singularWeight": [str(w) for w in (check.weight or [])]}
    elif args.kind == "check":
        report = commutation_checks()
        failed = [k for k, v in report.items() if v is False]
        _emit(args, {"checks": {k: v for k, v in report.items()}, "failed": failed})
        return 3 if failed else 0
    else:
        raise InputError(f"unknown lie kind {args.kind}")
    payload = _family_payload(family, verify_independence=True, jobs=args.jobs)
    payload.update(extra)
    payload["annihilated"] = True
    _emit(args, payload)
    return 0


def _cmd_ode(args):
    coeffs = [_fraction(v) for v in args.coeffs.split(",")]
    init = [_fraction(v) for v in args.init.split(",")]
    problem = OdeProblem(tuple(coeffs), tuple(init))
    value = solve_constant_ode(problem, args.t)
    derivs = ode_derivatives_at_zero(problem)
    exact = all(d == c for d, c in zip(derivs, problem.initial))
    if not exact:
        raise VerificationError("initial derivatives not reproduced exactly")
    payload = {
        "t": args.t,
        "value": value,
        "initialDerivatives": [str(d) for d in derivs],
        "verified": True,
    }
    _emit(args, payload)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="flagpde",
        description="Exact operator-series solvers for flag PDEs and related families.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    default_jobs = int(os.environ.get("FLAGPDE_JOBS", "1"))
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the result JSON (or CSV for grids) here")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
        p.add_argument("--jobs", type=int, default=default_jobs)

    p = sub.add_parser("basis", help="generate a verified solution family")
    p.add_argument("kind", choices=["constant", "harmonic", "flag", "dissipative", "anisym"])
    p.add_argument("--orders", help="comma-separated derivative orders (constant)")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--cap", type=int, default=4)
    p.add_argument("--spec", help="flag equation JSON (flag)")
    p.add_argument("--lambda", dest="lam", help="time-weight parameter (anisym)")
    p.add_argument("--epsilon", type=int, default=1, choices=[1, -1])
    p.add_argument("--no-independence", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_basis)

    p = sub.add_parser("solve", help="closed solvers")
    solve_sub = p.add_subparsers(dest="what", required=True)
    kg = solve_sub.add_parser("klein-gordon")
    kg.add_argument("--a", required=True, help="rational frequency, e.g. 1/2")
    kg.add_argument("--monomial", required=True, help="m1,m2,m3 seed exponents")
    common(kg)
    kg.set_defaults(func=_cmd_solve_kg)

    p = sub.add_parser("tree", help="tree model and splitting checks")
    p.add_argument("action", choices=["validate", "xi", "check-splitting"])
    p.add_argument("--tree", required=True)
    p.add_argument("--cap", type=int, default=3)
    p.add_argument("--tcap", type=int, default=3)
    common(p)
    p.set_defaults(func=_cmd_tree)

    p = sub.add_parser("ivp", help="initial value solvers")
    ivp_sub = p.add_subparsers(dest="what", required=True)
    fl = ivp_sub.add_parser("flag")
    fl.add_argument("--orders", type=int, required=True)
    fl.add_argument("--symbols", required=True)
    fl.add_argument("--data", required=True)
    fl.add_argument("--grid", required=True, help="e.g. 5x5")
    common(fl)
    fl.set_defaults(func=_cmd_ivp_flag)
    tw = ivp_sub.add_parser("tree-wave")
    tw.add_argument("--tree", required=True)
    tw.add_argument("--data", required=True)
    tw.add_argument("--t", type=float, required=True)
    tw.add_argument("--grid", required=True, help="e.g. 3x3x3")
    common(tw)
    tw.set_defaults(func=_cmd_ivp_tree)

    p = sub.add_parser("lie", help="module bases and structure checks")
    p.add_argument("kind", choices=["harmonic", "sl", "g2", "check"])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--l1", type=int, default=1)
    p.add_argument("--l2", type=int, default=1)
    common(p)
    p.set_defaults(func=_cmd_lie)

    p = sub.add_parser("ode", help="constant-coefficient ODE by the series kernel")
    p.add_argument("--coeffs", required=True, help="b1,b2,... (y^(m) = b1 y^(m-1) + ...)")
    p.add_argument("--init", required=True, help="c0,c1,... initial derivatives")
    p.add_argument("--t", type=float, required=True)
    common(p)
    p.set_defaults(func=_cmd_ode)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    args._argv = argv
    started = time.monotonic()
    try:
        code = args.func(args)
    except (InputError, InvalidTreeError) as err:
        print(f"input error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"input error: {err}", file=sys.stderr)
        return 2
    except VerificationError as err:
        print(f"verification failed: {err}", file=sys.stderr)
        return 3
    print(f"wall time: {time.monotonic() - started:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
