"""Command line front end.

Subcommands:
  kernel     build a kernel, report validation residuals, optionally dump JSON
  solve-bvp  run a steady case and report nodal errors
  solve-pde  run an evolution case; optional nodal snapshot CSV
  spectrum   eigenvalues of the explicit-Euler step map, one CSV per (m, dt)
  table      run all cells of a reference error table next to the cited values
  figure     dense log10-error lattice for one of the documented figures

Numbers are printed with 6 significant digits in tables and summaries and
17 in raw CSV dumps.  A config file (`key = value` lines, `#` comments)
supplies defaults; explicit flags override it.  Exit codes: 0 success,
2 usage error, 3 numerical failure, 4 I/O failure.
"""

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import kernel1d, problems
from .errors import RKCollocError


class UsageError(Exception):
    """Bad flags, malformed config, or out-of-range request."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt6(x):
    return f"{float(x):.5e}"


def _fmt17(x):
    return f"{float(x):.17g}"


def _parse_int_tuple(text):
    try:
        return tuple(int(p) for p in str(text).split(","))
    except ValueError:
        raise UsageError(f"expected integer(s), got {text!r}") from None


def _parse_float_tuple(text):
    try:
        return tuple(float(p) for p in str(text).split(","))
    except ValueError:
        raise UsageError(f"expected number(s), got {text!r}") from None


def _parse_interval(text):
    parts = _parse_float_tuple(text)
    if len(parts) != 2 or not parts[0] < parts[1]:
        raise UsageError(f"--interval needs 'a,b' with a < b, got {text!r}")
    return parts


_BC_RE = re.compile(r"d(\d+)@(.+)")


def parse_bc(text, interval):
    """Constraint grammar: comma list of d<order>@<point>, point a|b|number."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        m = _BC_RE.fullmatch(part)
        if not m:
            raise UsageError(f"--bc entry {part!r} does not match d<order>@<point>")
        order = int(m.group(1))
        where = m.group(2)
        if where == "a":
            point = interval[0]
        elif where == "b":
            point = interval[1]
        else:
            try:
                point = float(where)
            except ValueError:
                raise UsageError(f"--bc point {where!r} is not a|b|number") from None
        out.append((point, order))
    return tuple(out)


@dataclass
class RunConfig:
    case: str = None
    m: tuple = None  # one or more orders
    n: tuple = None  # total count or per-axis counts
    dt: tuple = None  # one or more steps
    t_final: float = None
    nu: float = None
    sigma: float = None
    interval: tuple = None
    bc: str = None
    out: str = None
    format: str = None


_COERCE = {
    "case": str,
    "m": _parse_int_tuple,
    "n": _parse_int_tuple,
    "dt": _parse_float_tuple,
    "t_final": float,
    "nu": float,
    "sigma": float,
    "interval": _parse_interval,
    "bc": str,
    "out": str,
    "format": str,
}


def load_config(path):
    """Line-oriented `key = value` file; `#` starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise e
    cfg = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, _, value = body.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _COERCE:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        cfg[key] = value.strip()
    return cfg


def _build_parser():
    p = _Parser(prog="rkcolloc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", metavar="command")

    def common(sp, *names):
        if "case" in names:
            sp.add_argument("--case")
        if "m" in names:
            sp.add_argument("--m")
        if "n" in names:
            sp.add_argument("--n")
        if "time" in names:
            sp.add_argument("--dt")
            sp.add_argument("--t-final", dest="t_final")
            sp.add_argument("--nu")
            sp.add_argument("--sigma")
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--config")

    sp = sub.add_parser("kernel", help="build, validate, and dump a kernel")
    sp.add_argument("--interval")
    sp.add_argument("--bc")
    sp.add_argument("--dump", action="store_true", help="write the kernel as JSON")
    common(sp, "m")

    sp = sub.add_parser("solve-bvp", help="run a steady case")
    common(sp, "case", "m", "n")

    sp = sub.add_parser("solve-pde", help="run an evolution case")
    common(sp, "case", "m", "n", "time")

    sp = sub.add_parser("spectrum", help="explicit-Euler step-map eigenvalues")
    sp.add_argument("--selftest", action="store_true", help=argparse.SUPPRESS)
    common(sp, "case", "m", "n", "time")

    sp = sub.add_parser("table", help="run one reference error table")
    sp.add_argument("id", nargs="?")
    common(sp, "m")

    sp = sub.add_parser("figure", help="dense log10-error lattice")
    sp.add_argument("id", nargs="?")
    common(sp, "case", "m", "n", "time")
    return p


def parse_args(argv):
    """(subcommand, RunConfig, extras) from an argv list."""
    parser = _build_parser()
    ns = parser.parse_args(argv)
    if ns.command is None:
        raise UsageError("missing command (kernel, solve-bvp, solve-pde, "
                         "spectrum, table, figure)")
    cfg_file = {}
    if getattr(ns, "config", None):
        cfg_file = load_config(ns.config)
    merged = {}
    for f in fields(RunConfig):
        flag = getattr(ns, f.name, None)
        raw = flag if flag is not None else cfg_file.get(f.name)
        if raw is None:
            continue
        if isinstance(raw, str) and f.name not in ("case", "bc", "out", "format"):
            raw = _COERCE[f.name](raw)
        elif f.name == "format" and raw not in ("csv", "json"):
            raise UsageError(f"--format must be csv or json, got {raw!r}")
        merged[f.name] = raw
    extras = {
        k: getattr(ns, k)
        for k in ("dump", "selftest", "id")
        if hasattr(ns, k)
    }
    return ns.command, RunConfig(**merged), extras


# -- output helpers ------------------------------------------------------------


def _write_text(path, text):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _csv_text(header, rows, fmt=_fmt17):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([c if isinstance(c, str) else
                    (str(c) if isinstance(c, (int, np.integer)) else fmt(c))
                    for c in row])
    return buf.getvalue()


def _report_doc(report):
    doc = report.as_dict()
    doc.pop("runtime_ms")  # keep identical configs byte-identical on disk
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _single(value, flag):
    if value is None:
        return None
    if len(value) != 1:
        raise UsageError(f"{flag} takes a single value here")
    return value[0]


def _case_overrides(cfg, *names):
    out = {}
    for name in names:
        v = getattr(cfg, name)
        if v is None:
            continue
        if name == "m":
            v = _single(v, "--m")
        elif name == "dt":
            v = _single(v, "--dt")
        elif name == "n" and len(v) == 1:
            v = v[0]
        out[name] = v
    return out


def _print_report(case_id, report):
    p = report.params
    bits = [f"case={case_id}", f"m={p['m']}", f"n={p['n']}"]
    for k in ("dt", "t_final", "nu", "sigma"):
        if k in p:
            bits.append(f"{k}={p[k]:g}")
    print(" ".join(bits))
    print(f"  linf   {_fmt6(report.linf)}")
    print(f"  rel_l2 {_fmt6(report.rel_l2)}")
    print(f"  rms    {_fmt6(report.rms)}")
    print(f"  runtime {report.runtime_ms:.1f} ms")


# -- subcommands ---------------------------------------------------------------


def cmd_kernel(cfg, extras):
    m = _single(cfg.m, "--m")
    if m is None:
        raise UsageError("kernel needs --m")
    interval = cfg.interval or (0.0, 1.0)
    try:
        constraints = parse_bc(cfg.bc, interval) if cfg.bc else ()
        k = kernel1d.kernel(m, interval, constraints)
    except ValueError as e:
        raise UsageError(str(e)) from None
    rng = np.random.default_rng(0)
    a, b = interval
    xs = a + (b - a) * rng.random(100)
    ys = a + (b - a) * rng.random(100)
    sym = float(np.max(np.abs(k(xs, ys) - k(ys, xs))))
    con = 0.0
    probe = np.array([a + 0.3 * (b - a), a + 0.5 * (b - a), a + 0.9 * (b - a)])
    for point, order in constraints:
        vals = k.eval(order, 0, np.full(3, point), probe)
        con = max(con, float(np.max(np.abs(vals))))
    print(f"kernel m={k.m} on [{a:g}, {b:g}] with {len(constraints)} constraints")
    print(f"  symmetry residual (100 pairs): {_fmt6(sym)}")
    if constraints:
        print(f"  constraint residual: {_fmt6(con)}")
    if extras.get("dump"):
        _write_text(cfg.out, k.dumps() + "\n")
        if cfg.out:
            print(f"  wrote {cfg.out}")
    return 0


def cmd_solve_bvp(cfg, extras):
    if cfg.case is None:
        raise UsageError("solve-bvp needs --case")
    case = _get_case(cfg.case)
    if case.kind != "steady":
        raise UsageError(f"case {case.id} is an evolution problem; use solve-pde")
    overrides = _case_overrides(cfg, "m", "n")
    sol = _run(problems.solve_case, case.id, **overrides)
    report = sol.report()
    _print_report(case.id, report)
    if cfg.out:
        if cfg.format == "csv":
            header = ("t", "node_index",
                      *(f"coord_{d + 1}" for d in range(case.dim)),
                      "v", "u", "exact", "abs_err")
            _write_text(cfg.out, _csv_text(header, sol.snapshot_rows()))
        else:
            _write_text(cfg.out, _report_doc(report))
        print(f"  wrote {cfg.out}")
    return 0


def cmd_solve_pde(cfg, extras):
    if cfg.case is None:
        raise UsageError("solve-pde needs --case")
    case = _get_case(cfg.case)
    if case.kind == "steady":
        raise UsageError(f"case {case.id} is steady; use solve-bvp")
    overrides = _case_overrides(cfg, "m", "n", "dt", "t_final", "nu", "sigma")
    sol = _run(problems.solve_case, case.id, **overrides)
    report = sol.report()
    _print_report(case.id, report)
    if cfg.out:
        if cfg.format == "json":
            _write_text(cfg.out, _report_doc(report))
        else:
            header = ("t", "node_index",
                      *(f"coord_{d + 1}" for d in range(case.dim)),
                      "v", "u", "exact", "abs_err")
            _write_text(cfg.out, _csv_text(header, sol.snapshot_rows()))
        print(f"  wrote {cfg.out}")
    return 0


def cmd_spectrum(cfg, extras):
    if extras.get("selftest"):
        from .diffmat import iteration_spectrum

        eig = np.sort_complex(iteration_spectrum(np.diag([-1.0, -2.0]), 0.1))
        ok = np.allclose(eig, [0.8, 0.9], atol=1e-14)
        print(f"selftest diag(-1,-2) dt=0.1 -> {eig.real.tolist()}: "
              f"{'ok' if ok else 'MISMATCH'}")
        return 0 if ok else 3
    case_id = cfg.case or "ex7"
    ms = cfg.m or (problems.get_case(case_id).m_default,)
    dts = cfg.dt
    if dts is None:
        raise UsageError("spectrum needs --dt")
    if any(not d > 0 for d in dts):
        raise UsageError("--dt must be positive")
    many = len(ms) * len(dts) > 1
    for m in ms:
        for dt in dts:
            overrides = {"m": m, "dt": dt}
            if cfg.n is not None:
                overrides["n"] = cfg.n if len(cfg.n) > 1 else cfg.n[0]
            eig, params = _run(problems.iteration_matrix_spectrum, case_id, **overrides)
            radius = float(np.max(np.abs(eig)))
            print(f"spectrum case={case_id} m={m} dt={dt:g} n={params['n']}: "
                  f"{len(eig)} eigenvalues, radius {radius:.6f}")
            text = _csv_text(("re", "im"), [(z.real, z.imag) for z in eig])
            out = cfg.out
            if out and many:
                stem, dot, ext = out.rpartition(".")
                if not dot:
                    stem, ext = out, "csv"
                out = f"{stem}_m{m}_dt{dt:g}.{ext}"
            if out:
                _write_text(out, text)
                print(f"  wrote {out}")
            elif cfg.out is None and not many:
                sys.stdout.write(text)
    return 0


def cmd_table(cfg, extras):
    table_id = extras.get("id")
    if not table_id:
        raise UsageError("table needs an id (table1..table9)")
    if table_id not in problems.TABLES:
        raise UsageError(f"unknown table {table_id!r}")

    def progress(row, col, val, ref):
        print(f"  [{row} | {col}] {_fmt6(val)} (ref {_fmt6(ref)})")

    print(f"{table_id}: case {problems.TABLES[table_id].case}")
    spec, values = _run(problems.run_table, table_id, progress=progress)
    header = ["row"]
    for c in spec.col_labels:
        header += [c, f"{c} ref"]
    rows = []
    for i, label in enumerate(spec.row_labels):
        row = [label]
        for j in range(len(spec.col_labels)):
            row += [values[i][j], spec.cells[i][j][2]]
        rows.append(row)
    text = _csv_text(header, rows, fmt=_fmt6)
    if cfg.out:
        _write_text(cfg.out, text)
        print(f"  wrote {cfg.out}")
    return 0


def cmd_figure(cfg, extras):
    figure_id = extras.get("id")
    if not figure_id:
        raise UsageError("figure needs an id (figure1..figure4)")
    if figure_id not in problems.FIGURES:
        raise UsageError(f"unknown figure {figure_id!r}")
    overrides = _case_overrides(cfg, "m", "n", "dt", "t_final", "nu", "sigma")
    header, rows = _run(problems.figure_lattice, figure_id, **overrides)
    text = _csv_text(header, rows)
    _write_text(cfg.out, text)
    if cfg.out:
        print(f"{figure_id}: {len(rows)} samples -> {cfg.out}")
    return 0


def _get_case(case_id):
    try:
        return problems.get_case(case_id)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _run(fn, *args, **kwargs):
    """Translate registry/parameter rejections into usage errors."""
    try:
        return fn(*args, **kwargs)
    except ValueError as e:
        raise UsageError(str(e)) from None


_COMMANDS = {
    "kernel": cmd_kernel,
    "solve-bvp": cmd_solve_bvp,
    "solve-pde": cmd_solve_pde,
    "spectrum": cmd_spectrum,
    "table": cmd_table,
    "figure": cmd_figure,
}


def main(argv=None):
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        command, cfg, extras = parse_args(argv)
        return _COMMANDS[command](cfg, extras)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except RKCollocError as e:
        print(f"numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"i/o failure: {e}", file=sys.stderr)
        return 4
