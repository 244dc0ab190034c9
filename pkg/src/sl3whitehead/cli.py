"""Command-line front end.

Subcommands::

    verify   run the Whitehead verification pipeline (JSON report)
    tangent  residuals and tangent dimension for an instance and a point
    sample   sweep the parametrisation over trace coordinates (CSV or JSON)
    import   convert a raw gluing matrix plus header into instance JSON

Exit status: 0 when every check passes, 1 when a check fails, 2 on bad input.
Structured output goes to stdout, human-readable messages to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .defvar import (
    DefPoint,
    DegenerateCoordinateError,
    GluingSystem,
    InstanceFormatError,
    first_failure,
    import_matrix_csv,
    tangent_basis,
)
from .whitehead import STAGES, DataError, verify_main_theorem
from .x0 import (
    DegenerateParametersError,
    build_pair,
    commutator_discriminant_check,
    discriminant,
    numeric_sample,
    solve_parameters,
    trace_map,
    verify_sigma,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

TRACE_NAMES = ("tr_A", "tr_B", "tr_AB", "tr_AinvB", "tr_Ainv", "tr_Binv", "tr_AinvBinv", "tr_ABinv", "tr_comm")
CSV_FIELDS = ("index", "z1", "z2", "z3", "z4", "Delta", "sign", "status", "delta", "a", "b", "c", "d",
              *TRACE_NAMES, "sigma_ok", "commutator_ok", "A", "B", "tower")


class InputError(Exception):
    pass


def _err(msg):
    print(msg, file=sys.stderr)


def _dump(obj):
    sys.stdout.write(json.dumps(obj, indent=1, ensure_ascii=False) + "\n")


# -- verify --------------------------------------------------------------------

def cmd_verify(args):
    stages = STAGES if args.stage == "all" else (args.stage,)
    try:
        report = verify_main_theorem(stages, data_dir=args.data_dir)
    except DataError as exc:
        _err(f"error: {exc}")
        return EXIT_INPUT
    _dump(report.to_json())
    for c in report.failures():
        _err(f"FAIL [{c.stage}] {c.check}" + (f" ({c.note})" if c.note else ""))
    _err(f"{len(report.checks) - len(report.failures())}/{len(report.checks)} checks passed")
    return EXIT_OK if report.ok else EXIT_FAIL


# -- tangent -------------------------------------------------------------------

def cmd_tangent(args):
    try:
        system = GluingSystem.load(args.instance)
        point = DefPoint.load(args.point)
        if point.nu != system.nu:
            raise InstanceFormatError(f"point has {len(point.z)} coordinates, instance needs {system.ncols}")
    except (OSError, InstanceFormatError) as exc:
        _err(f"error: {exc}")
        return EXIT_INPUT
    try:
        bad = first_failure(system, point)
    except DegenerateCoordinateError as exc:
        _dump({"on_variety": False, "error": str(exc)})
        _err(f"point is degenerate: {exc}")
        return EXIT_FAIL
    if bad is not None:
        index, label, value = bad
        _dump({"on_variety": False, "first_failure": {"index": index, "label": label, "value": str(value)}})
        _err(f"off the variety: residual {index} ({label}) = {value}")
        return EXIT_FAIL
    basis = tangent_basis(system, point, affine_entry=args.affine_entry)
    out = {
        "on_variety": True,
        "residuals": {"count": 8 * system.nu + len(system.rows), "all_equal_one": True},
        "jacobian_shape": [8 * system.nu + len(system.rows), system.ncols],
        "kernel_dimension": len(basis),
    }
    if args.basis:
        out["basis"] = [[str(x) for x in v] for v in basis]
    _dump(out)
    return EXIT_OK


# -- sample --------------------------------------------------------------------

def _parse_z(text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise InputError(f"--z needs four comma-separated values, got {text!r}")
    try:
        return tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--z values must be rational: {exc}") from exc


def _parse_range(text):
    bits = text.split(":")
    if len(bits) not in (2, 3):
        raise InputError(f"bad range {text!r}; use lo:hi or lo:hi:step")
    try:
        lo, hi = int(bits[0]), int(bits[1])
        step = int(bits[2]) if len(bits) == 3 else 1
    except ValueError as exc:
        raise InputError(f"bad range {text!r}") from exc
    if step <= 0 or hi < lo:
        raise InputError(f"bad range {text!r}")
    return list(range(lo, hi + 1, step))


def _grid(spec):
    ranges = [_parse_range(r) for r in spec.split(",")]
    if len(ranges) == 1:
        ranges *= 4
    if len(ranges) != 4:
        raise InputError("--grid takes one range or four comma-separated ranges")
    out = [()]
    for r in ranges:
        out = [p + (Fraction(v),) for p in out for v in r]
    return out


def _samples(args):
    if args.z is not None:
        return [_parse_z(args.z)]
    if args.grid is not None:
        return _grid(args.grid)
    lo, hi = _parse_range(args.range)[0], _parse_range(args.range)[-1]
    rng = random.Random(args.seed)
    return [tuple(Fraction(rng.randint(lo, hi)) for _ in range(4)) for _ in range(args.count)]


def _fmt_q(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _exact_rows(job):
    index, z, signs = job
    base = {"index": index, **{f"z{k + 1}": _fmt_q(v) for k, v in enumerate(z)},
            "Delta": _fmt_q(discriminant(z))}
    rows = []
    try:
        comm = commutator_discriminant_check(z)
        comm_ok = comm.ok
    except DegenerateParametersError as exc:
        return [dict(base, sign=s, status=f"denominator vanishes: {exc.name}") for s in signs]
    delta = None
    for s in signs:
        p = solve_parameters(z, 1 if s == "plus" else -1, delta, check=False)
        if delta is None:
            delta = p.delta if s == "plus" else -p.delta
        A, B = build_pair(p)
        traces = trace_map(A, B)
        sigma_ok = verify_sigma(p, z).ok and list(traces[:8]) == [0, 0, z[0], z[1], 0, 0, z[2], z[3]]
        rows.append(dict(
            base, sign=s, status="ok" if sigma_ok and comm_ok else "check failed",
            delta=str(p.delta), a=str(p.a), b=str(p.b), c=str(p.c), d=str(p.d),
            **{n: str(t) for n, t in zip(TRACE_NAMES, traces)},
            sigma_ok=sigma_ok, commutator_ok=comm_ok,
            A=[[str(x) for x in r] for r in A.entries], B=[[str(x) for x in r] for r in B.entries],
            tower=p.tower.squares_repr(),
        ))
    return rows


def _float_rows(job):
    import mpmath

    index, z, signs = job
    base = {"index": index, **{f"z{k + 1}": _fmt_q(v) for k, v in enumerate(z)},
            "Delta": _fmt_q(discriminant(z))}
    rows = []
    for s in signs:
        try:
            r = numeric_sample(z, 1 if s == "plus" else -1)
        except DegenerateParametersError as exc:
            rows.append(dict(base, sign=s, status=f"denominator vanishes: {exc.name}"))
            continue
        fmt = lambda x: mpmath.nstr(x, 15)  # noqa: E731
        ok = r["sigma_ok"] and r["commutator_ok"]
        rows.append(dict(
            base, sign=s, status="ok" if ok else "check failed",
            delta=fmt(r["delta"]), a=fmt(r["a"]), b=fmt(r["b"]), c=fmt(r["c"]), d=fmt(r["d"]),
            **{n: fmt(t) for n, t in zip(TRACE_NAMES, r["traces"])},
            sigma_ok=r["sigma_ok"], commutator_ok=r["commutator_ok"],
            A=[[fmt(r["A"][i, k]) for k in range(3)] for i in range(3)],
            B=[[fmt(r["B"][i, k]) for k in range(3)] for i in range(3)],
            tower="complex",
        ))
    return rows


def cmd_sample(args):
    try:
        zs = _samples(args)
    except InputError as exc:
        _err(f"error: {exc}")
        return EXIT_INPUT
    signs = {"plus": ["plus"], "minus": ["minus"], "both": ["plus", "minus"]}[args.sign]
    jobs = [(n, z, signs) for n, z in enumerate(zs)]
    worker = _exact_rows if args.mode == "exact" else _float_rows
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(worker, jobs, chunksize=max(1, len(jobs) // (4 * args.jobs))))
    else:
        results = [worker(job) for job in jobs]
    rows = [row for group in results for row in group]
    if args.format == "json":
        _dump(rows)
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, list) else v for k, v in row.items()})
        sys.stdout.write(buf.getvalue())
    failed = [r for r in rows if r["status"] == "check failed"]
    degenerate = [r for r in rows if r["status"].startswith("denominator")]
    _err(f"{len(rows)} rows, {len(degenerate)} degenerate, {len(failed)} failed checks")
    return EXIT_FAIL if failed else EXIT_OK


# -- import --------------------------------------------------------------------

def cmd_import(args):
    try:
        system = import_matrix_csv(args.csv, args.header)
    except (OSError, InstanceFormatError) as exc:
        _err(f"error: {exc}")
        return EXIT_INPUT
    text = json.dumps(system.to_json(), indent=1) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    _err(f"imported {len(system.rows)} rows over {system.nu} tetrahedra")
    return EXIT_OK


# -- entry point ---------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="sl3whitehead", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the verification pipeline")
    p.add_argument("--stage", choices=("all",) + STAGES, default="all")
    p.add_argument("--data-dir", help="read instance data from this directory instead of the bundled one")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tangent", help="tangent dimension at a point of an instance")
    p.add_argument("instance", help="instance JSON")
    p.add_argument("point", help="point JSON")
    p.add_argument("--basis", action="store_true", help="also print a kernel basis")
    p.add_argument("--affine-entry", choices=("z_il", "log"), default="z_il")
    p.set_defaults(func=cmd_tangent)

    p = sub.add_parser("sample", help="sweep the parametrisation over trace coordinates")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--z", help="z1,z2,z3,z4 (rationals)")
    src.add_argument("--grid", help="lo:hi[:step], or four such ranges separated by commas")
    src.add_argument("--count", type=int, help="number of random integer samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--range", default="-10:10", help="integer range lo:hi for random samples; write --range=-5:5 for negative bounds")
    p.add_argument("--sign", choices=("plus", "minus", "both"), default="both")
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("import", help="raw gluing matrix (CSV + header) to instance JSON")
    p.add_argument("csv")
    p.add_argument("--header", required=True, help="sidecar JSON declaring nu and column_order")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_import)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
