"""Command-line interface: tabulate functions, zeros, eigen data and resolvent solves."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any, Sequence

import numpy as np

from . import checks, pfun, spectral3, zeros3
from .numutil import apply_minus_iD_pow

SCHEMA_VERSION = "1"


class UsageError(Exception):
    pass


class Record:
    """Rows plus metadata; complex values expand into ``_re``/``_im`` columns."""

    def __init__(self, command: str, params: dict[str, Any]):
        self.command = command
        self.params = params
        self.rows: list[dict[str, Any]] = []
        self.footer: dict[str, Any] = {}

    def add(self, **values: Any) -> None:
        row: dict[str, Any] = {}
        for key, v in values.items():
            if isinstance(v, (complex, np.complexfloating)):
                row[f"{key}_re"] = float(v.real)
                row[f"{key}_im"] = float(v.imag)
            else:
                row[key] = v
        self.rows.append(row)


def _fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if np.isfinite(v) else _fmt(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render(rec: Record, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "schemaVersion": SCHEMA_VERSION,
            "command": rec.command,
            "params": {k: _json_value(v) for k, v in rec.params.items()},
            "rows": [{k: _json_value(v) for k, v in row.items()} for row in rec.rows],
            "footer": {k: _json_value(v) for k, v in rec.footer.items()},
        }
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    columns: list[str] = []
    for row in rec.rows:
        columns.extend(k for k in row if k not in columns)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rec.rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
    for key, v in rec.footer.items():
        buf.write(f"# {key}={_fmt(v)}\n")
    return buf.getvalue()


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def positive_float(text: str) -> float:
    v = float(text)
    if not (np.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _spec(phi: float, l: float) -> spectral3.OperatorSpec3:
    try:
        return spectral3.OperatorSpec3.from_phi(phi, l)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_eval(args) -> Record:
    if not 0 <= args.k < args.p:
        raise UsageError(f"k must satisfy 0 <= k < p (got k={args.k}, p={args.p})")
    rec = Record("eval", {"p": args.p, "k": args.k, "start": args.start, "stop": args.stop,
                          "count": args.count, "mode": args.mode})
    xs = np.linspace(args.start, args.stop, args.count)
    fn = pfun.eval_s if args.mode == "hyperbolic" else pfun.eval_c
    values = np.atleast_1d(fn(args.p, args.k, xs))
    for x, v in zip(xs, values):
        rec.add(x=float(x), value=complex(v))
    return rec


def cmd_zeros(args) -> Record:
    table = zeros3.find_zeros(args.k, args.count)
    rec = Record("zeros", {"k": args.k, "count": args.count})
    for j, (x, r, s, m) in enumerate(zip(table.zeros, table.residuals, table.seeds, table.multiplicities), 1):
        rec.add(j=j, x=x, residual=r, asymptotic_seed=s, multiplicity=m)
    return rec


def cmd_eigen(args) -> Record:
    spec = _spec(args.phi, args.l)
    recs = spectral3.eigen_zeros(spec, args.n_max)
    rec = Record("eigen", {"phi": args.phi, "l": args.l, "n_max": args.n_max, "emit": args.emit,
                           "grid_count": args.grid_count})
    if args.emit == "values":
        for r in recs:
            rec.add(branch=r.branch, n=r.n, mu=r.mu, eigenvalue=r.eigenvalue,
                    delta_abs=r.delta_abs, a_norm=r.a_norm)
    else:
        xs = np.linspace(0.0, args.l, args.grid_count)
        cols = {f"u_{r.branch[:3]}{r.n}": spectral3.eigenfunction(spec, r, xs) for r in recs}
        for i, x in enumerate(xs):
            rec.add(x=float(x), **{name: complex(v[i]) for name, v in cols.items()})
    rec.footer["max_delta_abs"] = max(r.delta_abs for r in recs)
    return rec


def load_forcing(text: str, l: float):
    """``const:<v>`` or ``csv:<path>``; returns ``(f, breakpoints)``."""
    kind, _, arg = text.partition(":")
    if kind == "const":
        try:
            c = parse_complex(arg)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(str(exc)) from None

        def const(t):
            return np.full(np.shape(t), c, dtype=complex)

        return const, None
    if kind == "csv":
        try:
            with open(arg, newline="") as fh:
                rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
        except OSError as exc:
            raise UsageError(f"cannot read forcing file: {exc}") from None
        data = []
        for r in rows:
            try:
                data.append([float(v) for v in r])
            except ValueError:
                if data:
                    raise UsageError(f"malformed forcing row: {r}") from None
                # header line
        if not data:
            raise UsageError("forcing file holds no numeric rows")
        arr = np.array(data)
        if arr.ndim != 2 or arr.shape[1] not in (2, 3):
            raise UsageError("forcing file needs columns t,f or t,f_re,f_im")
        order = np.argsort(arr[:, 0])
        arr = arr[order]
        t = arr[:, 0]
        if t[0] > 0 or t[-1] < l:
            raise UsageError(f"forcing samples must cover [0, {l}]")
        re = arr[:, 1]
        im = arr[:, 2] if arr.shape[1] == 3 else np.zeros_like(re)

        def interp(x):
            return np.interp(x, t, re) + 1j * np.interp(x, t, im)

        return interp, tuple(t)
    raise UsageError(f"forcing must be const:<v> or csv:<path>, got {text!r}")


def cmd_resolve(args) -> Record:
    spec = _spec(args.phi, args.l)
    f, knots = load_forcing(args.f, args.l)
    lam = args.lam
    res = spectral3.Resolvent(spec, lam, f, breakpoints=knots)
    rec = Record("resolve", {"phi": args.phi, "l": args.l, "lambda": str(lam), "f": args.f,
                             "grid_count": args.grid_count})
    xs = np.linspace(0.0, args.l, args.grid_count)
    for x in xs:
        rec.add(x=float(x), y=res(x))
    rec.footer["defect_y0"] = abs(res(0.0))
    rec.footer["defect_yl"] = abs(res(args.l))
    rec.footer["defect_derivative"] = abs(res(0.0, 1) - spec.theta * res(args.l, 1))
    worst = 0.0
    for x in np.linspace(0.1 * args.l, 0.9 * args.l, 5):
        if knots is not None and np.min(np.abs(np.asarray(knots) - x)) < 0.05 * args.l:
            continue  # interpolated data is not smooth across knots
        yx = res(x)
        fx = complex(f(np.asarray(x)))
        r = apply_minus_iD_pow(3, res.sample, x) - lam**3 * yx - fx
        worst = max(worst, abs(r) / max(abs(lam**3 * yx), abs(fx), 1e-300))
    rec.footer["ode_residual"] = worst
    return rec


def cmd_check(args) -> Record:
    rec = Record("check", {"suite": args.suite, "seed": args.seed})
    for suite, row in checks.run_suite(args.suite, args.seed):
        rec.add(suite=suite, name=row.name, samples=row.samples, max_residual=row.max_residual,
                threshold=row.threshold, passed=row.passed)
    rec.footer["all_passed"] = all(r["passed"] for r in rec.rows)
    return rec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phyper", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default="-", help="output path (default: standard output)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="tabulate s_k or c_k on a real grid")
    p.add_argument("--p", type=positive_int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--count", type=positive_int, required=True)
    p.add_argument("--mode", choices=("hyperbolic", "trigonometric"), default="hyperbolic")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("zeros", parents=[common], help="real zeros of s_k for p = 3")
    p.add_argument("--k", type=int, choices=(0, 1, 2), required=True)
    p.add_argument("--count", type=positive_int, default=10)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("eigen", parents=[common], help="eigenvalues or eigenfunctions of L_theta")
    p.add_argument("--phi", type=float, required=True, help="theta = exp(i phi)")
    p.add_argument("--l", type=positive_float, default=1.0)
    p.add_argument("--n-max", type=positive_int, default=5)
    p.add_argument("--emit", choices=("values", "functions"), default="values")
    p.add_argument("--grid-count", type=positive_int, default=101)
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("resolve", parents=[common], help="apply the resolvent of L_theta")
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--l", type=positive_float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=parse_complex, required=True)
    p.add_argument("--f", required=True, help="const:<value> or csv:<path>")
    p.add_argument("--grid-count", type=positive_int, default=21)
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("check", parents=[common], help="run a property suite")
    p.add_argument("--suite", choices=(*checks.SUITES, "all"), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rec = args.func(args)
    except UsageError as exc:
        print(f"phyper {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"phyper {args.command}: computation failed: {exc}", file=sys.stderr)
        return 1
    text = render(rec, args.format)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if args.command == "check" and not rec.footer["all_passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
