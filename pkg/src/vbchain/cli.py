"""``vbchain`` command-line interface.

Every subcommand writes CSV (or a plain aligned table with
``--format plain``) to standard output or ``--out``.  Exit codes: 0 on
success, 1 for errors raised by the library, 2 for usage errors and 3 when
an input file does not exist.  The seed falls back to ``$VBCHAIN_SEED``
and then to 0.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as vio
from .errors import VBChainError
from .kernel import DB_TOL, build_example9
from .mh_continuous import (
    TARGETS,
    check_umid,
    increment_limit_density,
    log_increment_pdf,
    mala_proposal_density,
    normal_pdf,
    rejection_probability,
    state_dependent,
    symmetrized_log_increment,
    transformed_increment_density,
)
from .mh_finite import build_sub_mh
from .peskun import ordering_report
from .simulate import Example9Walk, clt_diagnostic, simulate_path, write_trace_csv
from .spectral import classify, eigendecompose
from .variance import variance_report

SUBCOMMANDS = ("analyze", "variance", "compare", "mh-build", "example9", "simulate", "clt",
               "probe-rejection", "increment-density", "check-umid")
Z_SOURCES = {"example9-p1": 1, "example9-p2": 2}
EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_NOFILE = 0, 1, 2, 3


class UsageError(Exception):
    exit_code = EXIT_USAGE


class InputNotFound(Exception):
    exit_code = EXIT_NOFILE


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    tol: float = DB_TOL
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    options: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# argument types

def _count(text: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v != int(v) or v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive value, got {text!r}")
    return v


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad list {text!r}") from None


def _count_list(text: str) -> list[int]:
    return [_count(t) for t in text.split(",") if t.strip()]


def _grid(text: str) -> np.ndarray:
    """``lo:hi:step`` inclusive of both ends."""
    parts = text.split(":")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:step, got {text!r}") from None
    if not (step > 0 and hi >= lo):
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    k = int(round((hi - lo) / step))
    return np.round(np.linspace(lo, hi, k + 1), 12)


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=_positive, default=DB_TOL,
                        help="detailed-balance tolerance for loaded kernels")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--format", choices=("csv", "plain"), default="csv")
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    p = _Parser(prog="vbchain", description="Variance-bounding diagnostics for Markov chains.")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    s = sub.add_parser("analyze", parents=[common], help="spectral classification of a kernel")
    s.add_argument("kernel")

    s = sub.add_parser("variance", parents=[common], help="exact asymptotic variance")
    s.add_argument("kernel")
    s.add_argument("functional")
    s.add_argument("--horizons", type=_count_list, default=[1, 100, 10_000])

    s = sub.add_parser("compare", parents=[common], help="Peskun ordering report")
    s.add_argument("kernel1")
    s.add_argument("kernel2")
    s.add_argument("--functionals", type=_count, default=50)

    s = sub.add_parser("mh-build", parents=[common], help="build a sub-Metropolis-Hastings kernel")
    s.add_argument("target")
    s.add_argument("proposal")
    s.add_argument("-o", "--output", dest="kernel_out", required=True)

    s = sub.add_parser("example9", parents=[common], help="write the truncated Example 9 pair")
    s.add_argument("--N", type=_count, default=25)
    s.add_argument("--out-prefix", default="ex9")

    s = sub.add_parser("simulate", parents=[common], help="simulate one path")
    s.add_argument("source", help="kernel file, example9-p1 or example9-p2")
    s.add_argument("--functional", default=None)
    s.add_argument("--n", type=_count, default=1000)
    s.add_argument("--x0", type=int, default=None)

    s = sub.add_parser("clt", parents=[common], help="CLT replicate diagnostic")
    s.add_argument("source", help="kernel file, example9-p1 or example9-p2")
    s.add_argument("functional", help="functional file, or 'x' for h(x) = x on example9 sources")
    s.add_argument("--n", type=_count, default=100_000)
    s.add_argument("--replicates", type=_count, default=200)

    s = sub.add_parser("probe-rejection", parents=[common], help="holding probability of N(x, x^b) MH")
    s.add_argument("--b", type=_positive, required=True)
    s.add_argument("--x", type=_float_list, required=True)
    s.add_argument("--samples", type=_count, default=10_000)
    s.add_argument("--target", choices=sorted(TARGETS), default="half-cauchy")

    s = sub.add_parser("increment-density", parents=[common],
                       help="density of the power-transformed proposal increment")
    s.add_argument("--a", type=_positive, required=True)
    s.add_argument("--x", type=_positive, required=True)
    s.add_argument("--grid", type=_grid, default=_grid("-3:3:0.01"))

    s = sub.add_parser("check-umid", parents=[common], help="grid evidence for UMID proposals")
    s.add_argument("--proposal", choices=("mala", "log-increment"), default="mala")
    s.add_argument("--delta", type=_positive, default=1.0)
    s.add_argument("--target", choices=sorted(TARGETS), default="hyperbolic")
    s.add_argument("--x-grid", type=_grid, default=_grid("-50:50:0.5"))
    s.add_argument("--w-grid", type=_grid, default=_grid("-5:5:0.05"))
    return p


_PATH_ARGS = {
    "analyze": ("kernel",), "variance": ("kernel", "functional"), "compare": ("kernel1", "kernel2"),
    "mh-build": ("target", "proposal"), "simulate": ("source", "functional"),
    "clt": ("source", "functional"),
}


_VALUE_FLAGS = ("--grid", "--x-grid", "--w-grid", "--x")


def _glue_values(argv) -> list[str]:
    # grids such as -3:3:0.01 look like options to argparse
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def parse_args(argv) -> RunConfig:
    """Parse and validate ``argv``; raises :class:`UsageError` or :class:`InputNotFound`."""
    ns = _build_parser().parse_args(_glue_values(list(argv)))
    opts = vars(ns).copy()
    sub = opts.pop("subcommand")
    seed = opts.pop("seed")
    if seed is None:
        env = os.environ.get("VBCHAIN_SEED")
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise UsageError(f"VBCHAIN_SEED must be an integer, got {env!r}") from None
    cfg = RunConfig(subcommand=sub, tol=opts.pop("tol"), seed=seed, out=opts.pop("out"),
                    format=opts.pop("format"))
    for name in _PATH_ARGS.get(sub, ()):
        value = opts.get(name)
        if value is None or value in Z_SOURCES or (name == "functional" and value == "x"):
            continue
        if not Path(value).is_file():
            raise InputNotFound(f"vbchain: no such file: {value}")
        cfg.inputs.append(value)
    cfg.options = opts
    return cfg


# --------------------------------------------------------------------------
# output

def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return vio.fmt(v)
    if v is None:
        return ""
    return str(v)


def _emit(tables, cfg: RunConfig, stream) -> None:
    """Write one or more ``(header, rows)`` tables."""
    buf = io.StringIO()
    for k, (header, rows) in enumerate(tables):
        cells = [[_cell(v) for v in r] for r in rows]
        if cfg.format == "csv":
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            w.writerows(cells)
        else:
            if k:
                buf.write("\n")
            widths = [max(len(str(h)), *(len(r[i]) for r in cells)) for i, h in enumerate(header)]
            buf.write("  ".join(str(h).ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
            for r in cells:
                buf.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    if cfg.out:
        Path(cfg.out).write_text(buf.getvalue())
    else:
        stream.write(buf.getvalue())


CLASS_HEADER = ["n", "Lambda", "lambda_min", "K_bound", "variance_bounding",
                "geometrically_ergodic", "positive", "near_periodic", "reducible"]


def _class_row(K, c):
    return [K.n, c.Lambda, c.lambda_min, c.K_bound, c.variance_bounding, c.geometrically_ergodic,
            c.positive, c.near_periodic, c.reducible]


# --------------------------------------------------------------------------
# subcommands

def _analyze(cfg, o):
    K = vio.read_kernel(o["kernel"], cfg.tol)
    return [(CLASS_HEADER, [_class_row(K, classify(eigendecompose(K)))])]


def _variance(cfg, o):
    K = vio.read_kernel(o["kernel"], cfg.tol)
    h = vio.read_vector(o["functional"])
    r = variance_report(eigendecompose(K), h, horizons=o["horizons"])
    return [(["n", "var"], r.v_finite_n),
            (["var_pi", "v_exact", "ratio", "K_bound"], [[r.var_pi, r.v_exact, r.ratio, r.K_bound]])]


def _compare(cfg, o):
    K1 = vio.read_kernel(o["kernel1"], cfg.tol)
    K2 = vio.read_kernel(o["kernel2"], cfg.tol)
    r = ordering_report(K1, K2, n_functionals=o["functionals"], seed=cfg.seed)
    return [(["dominates", "worst_violation", "Lambda1", "Lambda2"],
             [[r.dominates, r.worst_violation, *r.Lambda_pair]]),
            (["h_id", "v1", "v2"], [list(p) for p in r.variance_pairs])]


def _mh_build(cfg, o):
    t = vio.read_vector(o["target"])
    q = vio.read_proposal(o["proposal"])
    K = build_sub_mh(t, q)
    vio.write_kernel(K, o["kernel_out"])
    return [(["n", "db_residual", "path"], [[K.n, K.db_residual, o["kernel_out"]]])]


def _example9(cfg, o):
    P1, P2 = build_example9(o["N"], cfg.tol)
    prefix = o["out_prefix"]
    vio.write_kernel(P1, f"{prefix}_p1.vbk")
    vio.write_kernel(P2, f"{prefix}_p2.vbk")
    from .peskun import dominates_off_diagonal

    dom = dominates_off_diagonal(P1, P2)
    c1, c2 = classify(eigendecompose(P1)), classify(eigendecompose(P2))
    table = (["N", "dominates", "worst_violation", "Lambda1", "Lambda2", "lambda_min1", "lambda_min2"],
             [[o["N"], dom.dominates, dom.worst_violation, c1.Lambda, c2.Lambda,
               c1.lambda_min, c2.lambda_min]])
    side = RunConfig("example9", format="csv", out=f"{prefix}_compare.csv")
    _emit([table], side, None)
    return [table]


def _source(cfg, name):
    if name in Z_SOURCES:
        return Example9Walk(Z_SOURCES[name])
    return vio.read_kernel(name, cfg.tol)


def _functional(name, source):
    if name is None:
        return None
    if name == "x":
        if not isinstance(source, Example9Walk):
            raise VBChainError("functional 'x' is only available for example9 sources")
        return lambda x: np.asarray(x, dtype=float)
    h = vio.read_vector(name)
    if isinstance(source, Example9Walk):
        raise VBChainError("example9 sources take the functional 'x'")
    return h


def _simulate(cfg, o):
    src = _source(cfg, o["source"])
    tr = simulate_path(src, o["x0"], o["n"], cfg.seed, h=_functional(o["functional"], src))
    if cfg.format == "csv":
        buf = io.StringIO()
        write_trace_csv(tr, buf)
        if cfg.out:
            Path(cfg.out).write_text(buf.getvalue())
        else:
            sys.stdout.write(buf.getvalue())
        return []
    return [(["step", "state", "value"],
             [[i + 1, s, v] for i, (s, v) in enumerate(zip(tr.states.tolist(), tr.values.tolist()))])]


def _clt(cfg, o):
    src = _source(cfg, o["source"])
    r = clt_diagnostic(src, _functional(o["functional"], src), o["n"], o["replicates"], cfg.seed)
    row = r.as_row()
    return [(list(row), [list(row.values())])]


def _probe(cfg, o):
    spec = state_dependent(TARGETS[o["target"]](), o["b"], transform="none")
    rows = []
    children = np.random.SeedSequence(cfg.seed).spawn(len(o["x"]))
    for x, ss in zip(o["x"], children):
        est, se = rejection_probability(spec, x, o["samples"], np.random.default_rng(ss))
        rows.append([x, est, se])
    return [(["x", "rejection", "se"], rows)]


def _increment_density(cfg, o):
    w = o["grid"]
    d = transformed_increment_density(o["x"], w, o["a"])
    lim = increment_limit_density(w, o["a"])
    return [(["w", "density", "limit_density"], [[a, b, c] for a, b, c in zip(w, d, lim)])]


def _check_umid(cfg, o):
    if o["proposal"] == "mala":
        q = mala_proposal_density(TARGETS[o["target"]](), o["delta"])
        rep = check_umid(q, normal_pdf, o["x_grid"], o["w_grid"])
    else:
        s, _ = symmetrized_log_increment()
        rep = check_umid(lambda x, y: log_increment_pdf(y - x), s, o["x_grid"], o["w_grid"],
                         s_half_width=3.0)
    w = rep.witness
    return [(["verdict", "c_star", "worst_x", "worst_w", "note"],
             [[rep.verdict, w["c_star"], w["worst_x"], w["worst_w"], rep.note]])]


_DISPATCH = {
    "analyze": _analyze, "variance": _variance, "compare": _compare, "mh-build": _mh_build,
    "example9": _example9, "simulate": _simulate, "clt": _clt, "probe-rejection": _probe,
    "increment-density": _increment_density, "check-umid": _check_umid,
}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute a parsed configuration; returns the process exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        tables = _DISPATCH[cfg.subcommand](cfg, cfg.options)
        if tables:
            _emit(tables, cfg, stdout)
    except (ValueError, OSError) as exc:  # VBChainError subclasses ValueError
        stderr.write(f"vbchain {cfg.subcommand}: {exc}\n")
        return EXIT_ERROR
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except (UsageError, InputNotFound) as exc:
        sys.stderr.write(f"{exc}\n")
        return exc.exit_code
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
