"""Command-line front end: each subcommand runs one study and writes a CSV.

Exit codes: 0 when the run completed and every check held, 2 when it ran
but flagged a failure or a violated hypothesis, 64 for configuration errors
and 74 when the output cannot be written.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .analysis import (
    convergence_study,
    simultaneous_bound_parts,
    voronovskaja_bound_parts,
    voronovskaja_hypotheses,
    voronovskaja_study,
)
from .config import RunConfig, load_config
from .density import DensityKernel, make_kernel
from .errors import ConfigError, HypothesisViolation, NNApproxError
from .moments import MomentQuery, algebraic_moment, fourier_moment, truncated_moment, verify_strang_fix
from .operators import in_guarantee_region, nn_operator, operator_value, sample_function
from .testfunctions import get_function

EXIT_OK = 0
EXIT_FLAGGED = 2
EXIT_CONFIG = 64
EXIT_IO = 74

NEGATIVE_CONTROL_SCALE = 2.0


class Run:
    """Per-invocation state: config, output directory, messages, flags."""

    def __init__(self, config: RunConfig, out_dir: Path, seed: int, quiet: bool):
        self.config = config
        self.out_dir = out_dir
        self.seed = seed
        self.quiet = quiet
        self.flags: list[str] = []

    def say(self, msg: str):
        if not self.quiet:
            print(msg)

    def flag(self, msg: str):
        self.flags.append(msg)
        print(f"FLAG: {msg}", file=sys.stderr)

    def kernel(self) -> DensityKernel:
        cfg = self.config
        beta = cfg.effective_beta
        if not beta > cfg.m + 1:
            raise HypothesisViolation(f"beta = {beta:g} must exceed m + 1 = {cfg.m + 1}")
        scale = NEGATIVE_CONTROL_SCALE if cfg.negative_control else cfg.kernel_scale
        return make_kernel(cfg.activation, cfg.m, beta=cfg.beta, alpha=cfg.alpha,
                           scale=scale, decay=cfg.decay)

    def write_csv(self, name: str, header, rows) -> Path:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        return atomic_write(self.out_dir / name, buf.getvalue())


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def atomic_write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


# -- subcommands ---------------------------------------------------------------

def _moment_key(row):
    # (s, nu, n, x, method) with the infinite sums after every finite n
    _, s, nu, n, x, *_, method = row
    return (s, nu, math.inf if n == "inf" else n, -math.inf if x is None else x, method)


def cmd_moments(run: Run) -> int:
    cfg = run.config
    cfg.require("n_list")
    kernel = run.kernel()
    a, b = cfg.interval
    eps = cfg.tol("moment_eps")
    rows = []
    for s in cfg.s_list:
        for nu in cfg.nu_list:
            for x in cfg.x_list:
                for n in cfg.n_list:
                    rep = truncated_moment(kernel, MomentQuery(s, nu, n, float(x), (a, b)))
                    rows.append((cfg.activation, s, nu, n, float(x), rep.value, rep.tail_bound,
                                 rep.method))
                rep = algebraic_moment(kernel, s, nu, float(x), eps=eps)
                rows.append((cfg.activation, s, nu, "inf", float(x), rep.value, rep.tail_bound,
                             rep.method))
    sf = None
    if 0 in cfg.s_list:
        sf = verify_strang_fix(kernel, cfg.k_max, max(cfg.nu_list, default=0),
                               tol=cfg.tol("strang_fix"), constancy_tol=cfg.tol("constancy"))
        if not sf.fourier_passed:
            run.flag("Strang-Fix Fourier check failed; shift-invariant moments omitted")
        else:
            for nu in cfg.nu_list:
                rep = fourier_moment(kernel, nu, tol=cfg.tol("fourier"), strang_fix=sf)
                rows.append((cfg.activation, 0, nu, "inf", None, rep.value, rep.tail_bound,
                             rep.method))
    rows.sort(key=_moment_key)
    path = run.write_csv("moments.csv",
                         ["activation", "s", "nu", "n_or_inf", "x", "value", "tail_bound", "method"],
                         rows)
    run.say(f"wrote {len(rows)} moment rows to {path}")
    return EXIT_FLAGGED if run.flags else EXIT_OK


def cmd_strangfix(run: Run) -> int:
    cfg = run.config
    kernel = run.kernel()
    rep = verify_strang_fix(kernel, cfg.k_max, cfg.nu_max, tol=cfg.tol("strang_fix"),
                            constancy_tol=cfg.tol("constancy"))
    rows = [(kernel.name, "fourier", c.k, c.nu, c.magnitude, rep.tol, c.passed)
            for c in rep.fourier]
    rows += [(kernel.name, "constancy", None, c.nu, c.spread, rep.constancy_tol, c.passed)
             for c in rep.constancy]
    rows.append((kernel.name, "overall", None, None, None, None, rep.passed))
    path = run.write_csv("strangfix.csv",
                         ["kernel", "check", "k", "nu", "value", "tol", "passed"], rows)
    run.say(f"Strang-Fix {'PASS' if rep.passed else 'FAIL'} for {kernel.name}; report {path}")
    if cfg.negative_control:
        if rep.passed:
            run.flag(f"negative control {kernel.name} unexpectedly passed")
            return EXIT_FLAGGED
        run.say("negative control failed as expected")
        return EXIT_OK
    if not rep.passed:
        run.flag(f"Strang-Fix verification failed for {kernel.name}")
        return EXIT_FLAGGED
    return EXIT_OK


def cmd_eval(run: Run) -> int:
    cfg = run.config
    cfg.require("n_list")
    kernel = run.kernel()
    a, b = cfg.interval
    xs = np.linspace(a, b, cfg.grid_resolution)
    orders = [s for s in cfg.s_list if s >= 1]
    header = ["x", "F_n", "F_tilde_n"] + [f"d{s}F_tilde_n" for s in orders] + ["guarantee_flag"]
    flags = in_guarantee_region(xs, cfg.interval, cfg.delta)
    for fid in cfg.functions:
        tf = get_function(fid)
        for n in cfg.n_list:
            sample = sample_function(tf, n, a, b)
            cols = [xs, nn_operator(sample, kernel, xs), operator_value(sample, kernel, 0, xs)]
            cols += [operator_value(sample, kernel, s, xs) for s in orders]
            rows = [[float(c[i]) for c in cols] + [bool(flags[i])] for i in range(len(xs))]
            path = run.write_csv(f"eval_{fid}_n{n}.csv", header, rows)
            run.say(f"wrote {path}")
    return EXIT_OK


def cmd_converge(run: Run) -> int:
    cfg = run.config
    cfg.require("n_list")
    cfg.require("s_list")
    kernel = run.kernel()
    rows = []
    for fid in cfg.functions:
        rep = convergence_study(kernel, get_function(fid), cfg.s_list, cfg.n_list, cfg.delta,
                                cfg.grid_resolution, cfg.interval, cfg.m, seed=run.seed)
        for r in rep.rows:
            rows.append((cfg.activation, fid, r.s, r.n, r.sup_error, rep.orders[r.s].order,
                         r.bound))
            if r.sup_error > r.bound:
                run.flag(f"{fid}: sup error exceeds bound at s={r.s}, n={r.n}")
        for s in cfg.s_list:
            errs = rep.errors(s)
            if any(e1 >= e0 for e0, e1 in zip(errs, errs[1:])):
                run.flag(f"{fid}: errors for s={s} do not decrease strictly")
        run.say(f"{fid}: orders " + ", ".join(f"s={s}: {o.order:.3f}" for s, o in rep.orders.items()))
    path = run.write_csv("converge.csv",
                         ["activation", "function", "s", "n", "sup_error", "empirical_order",
                          "theoretical_bound"], rows)
    run.say(f"wrote {path}")
    return EXIT_FLAGGED if run.flags else EXIT_OK


def cmd_voronovskaja(run: Run) -> int:
    cfg = run.config
    cfg.require("n_list")
    cfg.require("x_list")
    kernel = run.kernel()
    rows = []
    for fid in cfg.functions:
        rep = voronovskaja_study(kernel, get_function(fid), cfg.m, cfg.n_list, cfg.x_list,
                                 cfg.delta, cfg.interval)
        for r in rep.rows:
            rows.append((cfg.activation, fid, cfg.m, r.n, r.x, r.scaled_residual,
                         r.predicted_limit, r.abs_deviation, r.bound))
            if r.abs_deviation > r.bound:
                run.flag(f"{fid}: deviation exceeds bound at n={r.n}, x={r.x}")
    path = run.write_csv("voronovskaja.csv",
                         ["activation", "function", "m", "n", "x", "scaled_residual",
                          "predicted_limit", "abs_deviation", "bound"], rows)
    run.say(f"wrote {path}")
    return EXIT_FLAGGED if run.flags else EXIT_OK


def cmd_bound(run: Run) -> int:
    cfg = run.config
    cfg.require("n_list")
    kernel = run.kernel()
    rows = []
    try:
        voronovskaja_hypotheses(kernel, cfg.m)
        with_vor = True
    except HypothesisViolation as exc:
        run.flag(f"Voronovskaja bound skipped: {exc}")
        with_vor = False
    for fid in cfg.functions:
        tf = get_function(fid)
        for n in cfg.n_list:
            for s in cfg.s_list:
                p = simultaneous_bound_parts(kernel, tf, s, n, cfg.delta, cfg.interval, cfg.m)
                rows.append((cfg.activation, fid, "simultaneous", s, n, p.tail, p.modulus, p.total))
            if with_vor:
                p = voronovskaja_bound_parts(kernel, tf, cfg.m, n, cfg.delta, cfg.interval)
                rows.append((cfg.activation, fid, "voronovskaja", cfg.m, n, p.tail, p.modulus,
                             p.total))
    path = run.write_csv("bound.csv",
                         ["activation", "function", "kind", "order", "n", "tail_term",
                          "modulus_term", "bound"], rows)
    run.say(f"wrote {path}")
    return EXIT_FLAGGED if run.flags else EXIT_OK


COMMANDS = {
    "moments": cmd_moments,
    "strangfix": cmd_strangfix,
    "eval": cmd_eval,
    "converge": cmd_converge,
    "voronovskaja": cmd_voronovskaja,
    "bound": cmd_bound,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nnapprox", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON run configuration (defaults when omitted)")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--seed", type=int, default=0, help="grid jitter seed for sup estimates; 0 = none")
    p.add_argument("--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config else RunConfig()
        config.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.out if args.out else config.output_dir)
    run = Run(config, out_dir, args.seed, args.quiet)
    try:
        return COMMANDS[args.command](run)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NNApproxError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FLAGGED
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
