"""Command-line front end.

Subcommands: kernel, series, oracle, lve, verify, bound-fit.  Every
command can persist one RunRecord as JSON (--json) and a flat CSV of the
named results (--csv); both round-trip losslessly.  Complex numbers are
written "a+bi" with 17 significant digits.  Result files carry the full
configuration echo and the package version; wall time is printed to the
console only, so records with equal seeds are reproducible byte for byte.

Exit codes: 0 success, 2 domain/contract error, 3 numerical failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, exact, jets, kernel, lve, oracle, verify
from .errors import ContractError, DomainError, LoopVertexError, NumericalError

__all__ = ["main", "RunRecord", "parse_complex", "format_complex",
           "load_json_record", "load_csv_results"]


def parse_complex(text: str) -> complex:
    """Parse 'a+bi' (or plain real) CLI notation."""
    try:
        return complex(text.strip().replace("i", "j"))
    except ValueError as exc:
        raise ContractError(f"cannot parse complex number {text!r}") from exc


def format_complex(z: complex) -> str:
    re = f"{z.real:.17g}"
    sign = "+" if z.imag >= 0 or math.isnan(z.imag) else "-"
    return f"{re}{sign}{abs(z.imag):.17g}i"


@dataclass
class RunRecord:
    """One reproducible command execution: inputs echoed, results named."""

    command: str
    spec: dict
    config: dict
    results: list = field(default_factory=list)
    seed: int | None = None
    artifact_version: str = __version__

    def add(self, name: str, value, error: float | None = None) -> None:
        value = complex(value)
        self.results.append({"name": name, "value_re": value.real,
                             "value_im": value.imag, "error": error})

    def value_of(self, name: str) -> complex:
        for row in self.results:
            if row["name"] == name:
                return complex(row["value_re"], row["value_im"])
        raise KeyError(name)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=1) + "\n"

    def write_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["name", "value_re", "value_im", "error"])
            for row in self.results:
                err = "" if row["error"] is None else f"{row['error']:.17g}"
                writer.writerow([row["name"], f"{row['value_re']:.17g}",
                                 f"{row['value_im']:.17g}", err])


def load_json_record(path: str) -> RunRecord:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return RunRecord(**data)


def load_csv_results(path: str) -> list:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            err = None if row["error"] == "" else float(row["error"])
            out.append((row["name"],
                        complex(float(row["value_re"]), float(row["value_im"])),
                        err))
    return out


def _out_path(path: str | None) -> str | None:
    if path is None:
        return None
    outdir = os.environ.get("LOOPVERTEX_OUTDIR")
    if outdir and not os.path.isabs(path):
        return os.path.join(outdir, path)
    return path


def _emit(record: RunRecord, args, started: float) -> None:
    for row in record.results:
        value = complex(row["value_re"], row["value_im"])
        line = f"{row['name']:<28s} {format_complex(value)}"
        if row["error"] is not None:
            line += f"  +- {row['error']:.3e}"
        print(line)
    json_path = _out_path(args.json)
    csv_path = _out_path(args.csv)
    if json_path:
        record.write_json(json_path)
        print(f"wrote {json_path}")
    if csv_path:
        record.write_csv(csv_path)
        print(f"wrote {csv_path}")
    print(f"wall time: {time.perf_counter() - started:.2f} s")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_kernel(args) -> int:
    started = time.perf_counter()
    z = parse_complex(args.z)
    ev = kernel.t_solve(args.p, z)
    record = RunRecord("kernel",
                       {"p": args.p, "z": format_complex(z)},
                       {"qmax": args.qmax})
    record.add("T", ev.t)
    record.add("F", ev.f)
    record.add("S", ev.s)
    record.add("E", ev.e)
    record.add("residual", ev.residual)
    record.add("degraded", 1.0 if ev.degraded else 0.0)
    if args.qmax > 0:
        for q, val in enumerate(jets.s_derivatives(args.p, z, args.qmax), 1):
            record.add(f"S_deriv_{q}", val)
    _emit(record, args, started)
    return 0


def _cmd_series(args) -> int:
    started = time.perf_counter()
    if (args.z is None) == (args.l is None):
        raise ContractError("series needs exactly one of -z or -l")
    if args.z is not None:
        z = parse_complex(args.z)
        record = RunRecord("series", {"p": args.p, "z": format_complex(z)},
                           {"n": args.n})
        for n in range(args.n + 1):
            record.add(f"fuss_catalan_{n}",
                       float(exact.fuss_catalan_number(args.p, n)))
        record.add("t_partial_sum", kernel.t_series(args.p, z, args.n + 1))
    else:
        lam = parse_complex(args.l)
        spec = kernel.ModelSpec(args.p, lam)
        record = RunRecord("series",
                           {"p": args.p, "lambda": format_complex(lam)},
                           {"n": args.n, "q": args.q})
        for n in range(args.n + 1):
            record.add(f"coefficient_{n}",
                       float(exact.z_series_coefficient(args.p, n, args.q)))
            record.add(f"partial_sum_{n}",
                       exact.perturbative_partial_sum(spec, n, args.q))
    _emit(record, args, started)
    return 0


def _cmd_oracle(args) -> int:
    started = time.perf_counter()
    lam = parse_complex(args.l)
    spec = kernel.ModelSpec(args.p, lam, args.eps)
    record = RunRecord("oracle",
                       {"p": args.p, "lambda": format_complex(lam),
                        "epsilon": args.eps},
                       {"tol": args.tol})
    zd = oracle.z_oracle(spec, args.tol)
    zr = oracle.z_lvr(spec, args.tol)
    gd = oracle.g2_oracle(spec, args.tol)
    gr = oracle.g2_lvr(spec, args.tol)
    record.add("z_direct", zd.value, zd.abs_error_estimate)
    record.add("z_resummed", zr.value, zr.abs_error_estimate)
    record.add("g2_direct", gd.value, gd.abs_error_estimate)
    record.add("g2_resummed", gr.value, gr.abs_error_estimate)
    record.add("diff_z", abs(zd.value - zr.value))
    record.add("diff_g2", abs(gd.value - gr.value))
    _emit(record, args, started)
    return 0


def _cmd_lve(args) -> int:
    started = time.perf_counter()
    lam = parse_complex(args.l)
    spec = kernel.ModelSpec(args.p, lam, args.eps)
    config = lve.LveConfig(mc_samples=args.samples, master_seed=args.seed,
                           n_max=args.n, quad_tol=args.tol)
    record = RunRecord("lve",
                       {"p": args.p, "lambda": format_complex(lam),
                        "epsilon": args.eps},
                       {"mc_samples": config.mc_samples,
                        "w_rule": config.w_rule, "n_max": config.n_max,
                        "quad_tol": config.quad_tol},
                       seed=args.seed)
    per_order, cumulative = lve.log_z_partial(spec, config)
    for n, est in enumerate(per_order, 1):
        record.add(f"order_{n}", est.value, est.std_error)
    record.add("log_z_partial_sum", cumulative.value, cumulative.std_error)
    ref = np.log(oracle.z_oracle(spec, args.tol).value)
    record.add("log_z_oracle", ref)
    deviation = abs(cumulative.value - ref)
    budget = max(3.0 * cumulative.std_error, abs(per_order[-1].value))
    record.add("abs_deviation", deviation)
    record.add("error_budget", budget)
    record.add("within_budget", 1.0 if deviation <= budget else 0.0)
    _emit(record, args, started)
    print("PASS" if deviation <= budget else "FAIL",
          f"(|deviation| {deviation:.3e} vs budget {budget:.3e})")
    return 0


def _cmd_verify(args) -> int:
    started = time.perf_counter()
    results = verify.run_suite(args.suite, quick=args.quick)
    record = RunRecord("verify", {}, {"suite": args.suite,
                                      "quick": bool(args.quick)})
    n_failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        n_failed += not res.passed
        print(f"{status} {res.name:<40s} [{res.elapsed:6.2f} s] {res.detail}")
        record.add(res.name, 1.0 if res.passed else 0.0)
    print(f"{len(results) - n_failed}/{len(results)} checks passed")
    json_path = _out_path(args.json)
    csv_path = _out_path(args.csv)
    if json_path:
        record.write_json(json_path)
        print(f"wrote {json_path}")
    if csv_path:
        record.write_csv(csv_path)
        print(f"wrote {csv_path}")
    print(f"wall time: {time.perf_counter() - started:.2f} s")
    return 4 if n_failed else 0


def _cmd_bound_fit(args) -> int:
    started = time.perf_counter()
    spec = kernel.ModelSpec(args.p, 0.0, args.eps)
    record = RunRecord("bound-fit",
                       {"p": args.p, "epsilon": args.eps},
                       {"qmax": args.qmax, "rmax": args.rmax,
                        "negative_axis": bool(args.negative_axis)})
    if args.negative_axis:
        grid = [complex(-x) for x in np.geomspace(1e-6, args.rmax, 40)]
    else:
        grid = verify._sector_grid(args.p, args.eps, args.rmax, n_radii=12)
    k_fit = kernel.bound_constant(spec, grid, args.qmax)
    record.add("K_fit", k_fit)
    record.add("grid_points", float(len(grid)))
    _emit(record, args, started)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", default=None, help="write the RunRecord as JSON")
    p.add_argument("--csv", default=None, help="write flat CSV of results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loopvertex",
        description="Evaluate, cross-check and expand the zero-dimensional "
                    "(phibar phi)^p model.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_kernel = sub.add_parser("kernel", help="T, F, S, E at a point")
    p_kernel.add_argument("-p", type=int, required=True)
    p_kernel.add_argument("-z", required=True, help="complex point, 'a+bi'")
    p_kernel.add_argument("--qmax", type=int, default=0,
                          help="also print S derivatives up to this order")
    _add_common_output(p_kernel)
    p_kernel.set_defaults(func=_cmd_kernel)

    p_series = sub.add_parser(
        "series", help="exact coefficients and partial sums")
    p_series.add_argument("-p", type=int, required=True)
    p_series.add_argument("-z", default=None, help="Fuss-Catalan series point")
    p_series.add_argument("-l", default=None, help="coupling for the "
                          "perturbative partial sums")
    p_series.add_argument("-n", type=int, default=8, help="max order")
    p_series.add_argument("--q", type=int, default=0, help="source power")
    _add_common_output(p_series)
    p_series.set_defaults(func=_cmd_series)

    p_oracle = sub.add_parser(
        "oracle", help="direct vs resummed quadrature values")
    p_oracle.add_argument("-p", type=int, required=True)
    p_oracle.add_argument("-l", required=True, help="coupling, 'a+bi'")
    p_oracle.add_argument("--eps", type=float, default=0.3)
    p_oracle.add_argument("--tol", type=float, default=1e-10)
    _add_common_output(p_oracle)
    p_oracle.set_defaults(func=_cmd_oracle)

    p_lve = sub.add_parser("lve", help="tree expansion of log Z")
    p_lve.add_argument("-p", type=int, required=True)
    p_lve.add_argument("-l", required=True, help="coupling, 'a+bi'")
    p_lve.add_argument("-n", type=int, default=4, help="max tree order")
    p_lve.add_argument("-s", "--samples", type=int, default=200_000,
                       help="field samples per tree term")
    p_lve.add_argument("--seed", type=int, default=0)
    p_lve.add_argument("--eps", type=float, default=0.3)
    p_lve.add_argument("--tol", type=float, default=1e-10)
    _add_common_output(p_lve)
    p_lve.set_defaults(func=_cmd_lve)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", nargs="?", default="all",
                          choices=sorted(verify.SUITES))
    p_verify.add_argument("--quick", action="store_true",
                          help="reduced grids and sample counts")
    _add_common_output(p_verify)
    p_verify.set_defaults(func=_cmd_verify)

    p_bound = sub.add_parser("bound-fit",
                             help="fit the derivative-bound constant")
    p_bound.add_argument("-p", type=int, required=True)
    p_bound.add_argument("--eps", type=float, default=0.3)
    p_bound.add_argument("--qmax", type=int, default=8)
    p_bound.add_argument("--rmax", type=float, default=1e4)
    p_bound.add_argument("--negative-axis", action="store_true")
    _add_common_output(p_bound)
    p_bound.set_defaults(func=_cmd_bound_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ContractError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except LoopVertexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
