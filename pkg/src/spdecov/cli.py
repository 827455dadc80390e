"""spde-cov command line front end.

Subcommands:

    advdiff   run the configured heat scheme at the reference level and
              emit the covariance (full matrix, or x,y,cov triples when
              snapshot_t is set)
    wave      same for the damped wave scheme (position block)
    sweep     refinement study: per-level errors plus fitted rates
    mc        Monte Carlo cross-check of the deterministic covariance
    oracle    closed-form spectral variances for comparison

Every subcommand reads one INI config (see config module docstring).
Exit codes: 0 success, 1 configuration problem, 2 numerical failure.
"""

import argparse
import json
import sys

import numpy as np

from .config import load_mc, load_study
from .exceptions import ConfigError, NumericalError
from .kernels import BrownianBridge, WhiteNoise
from .spectral import (
    eigenvalues,
    heat_cov_closed_form,
    wave_cov_closed_form,
)
from .study import emit, run_single, run_sweep

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    # usage errors are config errors (exit 1), not numerical (exit 2)
    def error(self, message):
        raise ConfigError(message)


def _build_parser():
    parser = _Parser(
        prog="spde-cov",
        description="covariance computations for parabolic and hyperbolic "
        "stochastic equations on (0,1)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("advdiff", "single heat-equation covariance at the reference level"),
        ("wave", "single wave-equation position covariance"),
        ("sweep", "refinement study with fitted convergence rates"),
        ("mc", "Monte Carlo validation of the deterministic covariance"),
        ("oracle", "closed-form spectral mode variances"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="INI config file")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument(
            "--format",
            choices=["csv", "jsonl", "gnuplot"],
            default="csv",
            help="output serialization (default csv)",
        )
        if name == "mc":
            p.add_argument(
                "--samples", type=int, help="override n_samples from the config"
            )
            p.add_argument(
                "--seed", type=int, help="override seed from the config"
            )
        if name == "oracle":
            p.add_argument(
                "--modes", type=int, default=16, help="number of modes (default 16)"
            )
    return parser


def _fmt(x):
    return repr(float(x))


def _emit_matrix(mesh, K, t, fmt):
    n = K.shape[0]
    if fmt == "csv":
        lines = [f"# covariance coefficient matrix, n_dof={n}, t={_fmt(t)}"]
        lines += [",".join(_fmt(v) for v in row) for row in K]
        return "\n".join(lines) + "\n"
    if fmt == "jsonl":
        recs = [{"n_dof": n, "t": t}]
        recs += [{"row": i, "values": list(map(float, K[i]))} for i in range(n)]
        return "\n".join(json.dumps(r) for r in recs) + "\n"
    lines = [f"# covariance coefficient matrix, n_dof={n}, t={_fmt(t)}"]
    lines += [" ".join(_fmt(v) for v in row) for row in K]
    return "\n".join(lines) + "\n"


def _emit_snapshot(mesh, K, t, fmt):
    # nodal covariance samples Cov(u(x_p), u(x_q)) on the DoF nodes
    xs = mesh.dof_nodes
    if fmt == "csv":
        lines = [f"# covariance snapshot at t={_fmt(t)}", "x,y,cov"]
        for p, xp in enumerate(xs):
            for q, xq in enumerate(xs):
                lines.append(f"{_fmt(xp)},{_fmt(xq)},{_fmt(K[p, q])}")
        return "\n".join(lines) + "\n"
    if fmt == "jsonl":
        recs = [
            {"x": float(xp), "y": float(xq), "cov": float(K[p, q])}
            for p, xp in enumerate(xs)
            for q, xq in enumerate(xs)
        ]
        return "\n".join(json.dumps(r) for r in recs) + "\n"
    lines = [f"# covariance snapshot at t={_fmt(t)}", "# x y cov"]
    for p, xp in enumerate(xs):
        for q, xq in enumerate(xs):
            lines.append(f"{_fmt(xp)} {_fmt(xq)} {_fmt(K[p, q])}")
        lines.append("")
    return "\n".join(lines) + "\n"


def _run_equation(args, equation):
    study = load_study(args.config)
    if study.equation != equation:
        raise ConfigError(
            f"config declares equation type {study.equation!r}, "
            f"but the {equation} subcommand was invoked"
        )
    mesh, K, t = run_single(study, t_stop=study.snapshot_t)
    if study.snapshot_t is not None:
        return _emit_snapshot(mesh, K, t, args.format)
    return _emit_matrix(mesh, K, t, args.format)


def _run_sweep(args):
    study = load_study(args.config)
    report = run_sweep(study)
    return emit(report, fmt=args.format)


def _run_mc(args):
    mc = load_mc(args.config, n_samples=args.samples, seed=args.seed)
    from .montecarlo import mc_validate

    report = mc_validate(mc)
    fields = (
        ("hs_distance", report.hs_distance),
        ("trace_distance", report.trace_distance),
        ("sampling_error_hs", report.sampling_error_hs),
        ("sampling_error_trace", report.sampling_error_trace),
        ("consistency_margin", report.consistency_margin),
        ("n_samples", report.n_samples),
        ("seed", report.seed),
    )
    if args.format == "jsonl":
        rec = {k: (v if isinstance(v, int) else float(v)) for k, v in fields}
        return json.dumps(rec) + "\n"
    if args.format == "gnuplot":
        head = "# " + " ".join(k for k, _ in fields)
        row = " ".join(
            str(v) if isinstance(v, int) else _fmt(v) for _, v in fields
        )
        return head + "\n" + row + "\n"
    head = ",".join(k for k, _ in fields)
    row = ",".join(str(v) if isinstance(v, int) else _fmt(v) for _, v in fields)
    return head + "\n" + row + "\n"


def _run_oracle(args):
    study = load_study(args.config)
    n_modes = args.modes
    if n_modes < 1:
        raise ConfigError("--modes must be positive")
    lam = eigenvalues(n_modes)
    if isinstance(study.kernel, WhiteNoise):
        q = np.ones(n_modes)
    elif isinstance(study.kernel, BrownianBridge):
        q = 1.0 / lam
    else:
        raise ConfigError(
            "closed-form oracle needs a white or brownian_bridge kernel"
        )
    if study.equation == "advdiff":
        var = heat_cov_closed_form(n_modes, study.T, q_diag=q)
    else:
        var = wave_cov_closed_form(n_modes, study.T, q_diag=q)
    ks = np.arange(1, n_modes + 1)
    if args.format == "jsonl":
        return "\n".join(
            json.dumps({"k": int(k), "lambda": float(l), "variance": float(v)})
            for k, l, v in zip(ks, lam, var)
        ) + "\n"
    sep = " " if args.format == "gnuplot" else ","
    head = "# k lambda variance" if args.format == "gnuplot" else "k,lambda,variance"
    lines = [head]
    lines += [f"{k}{sep}{_fmt(l)}{sep}{_fmt(v)}" for k, l, v in zip(ks, lam, var)]
    return "\n".join(lines) + "\n"


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "advdiff":
            text = _run_equation(args, "advdiff")
        elif args.command == "wave":
            text = _run_equation(args, "wave")
        elif args.command == "sweep":
            text = _run_sweep(args)
        elif args.command == "mc":
            text = _run_mc(args)
        else:
            text = _run_oracle(args)
    except (ConfigError, ValueError) as exc:
        print(f"spde-cov: config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"spde-cov: numerical failure: {exc}", file=sys.stderr)
        return 2
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"spde-cov: cannot write {args.out}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
