"""Refinement sweeps against a fine reference, rate fitting, reports.

A study fixes an equation, a noise kernel, and a list of (n_cells,
n_steps) levels plus one reference pair. run_sweep computes the
reference covariance once, each level's covariance, and the trace-class
and Hilbert-Schmidt distances between them (wave studies measure the
position block), then fits log-log slopes in h.
"""

import json
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from .advdiff import AdvDiffConfig, advdiff_run
from .errnorms import err_hs_norm, err_trace_norm
from .exceptions import ConfigError, DegenerateFitError
from .fem import Coefficients, Mesh1D
from .kernels import Kernel
from .wave import WaveConfig, extract_position_cov, wave_run

__all__ = [
    "StudyConfig",
    "LevelResult",
    "RateReport",
    "levels_from_exponents",
    "run_single",
    "run_sweep",
    "fit_rate",
    "emit",
    "read_report",
]

CSV_HEADER = "level,h,dt,err_L1,err_L2,wall_time_s"


@dataclass(frozen=True)
class StudyConfig:
    """Declarative description of one refinement study.

    levels and reference are (n_cells, n_steps) pairs; h = 1/n_cells
    and dt = T/n_steps, so coupling rules like h = sqrt(dt) are already
    baked in by the caller (see levels_from_exponents). Advdiff studies
    need coeffs/c0/bc, wave studies g_spec; the unused side is ignored.
    """

    equation: str
    kernel: Kernel
    levels: Tuple[Tuple[int, int], ...]
    reference: Tuple[int, int]
    T: float = 1.0
    coeffs: Optional[Coefficients] = None
    c0: float = 0.0
    bc: str = "neumann"
    g_spec: Union[str, np.ndarray] = "minus_q"
    norms: Tuple[str, ...] = ("L1", "L2")
    expected_rate: Optional[float] = None
    seed: Optional[int] = None
    n_samples: Optional[int] = None
    snapshot_t: Optional[float] = None

    def __post_init__(self):
        if self.equation not in ("advdiff", "wave"):
            raise ConfigError(f"unknown equation {self.equation!r}")
        if self.equation == "advdiff" and self.coeffs is None:
            raise ConfigError("advdiff studies need coefficients")
        if not self.levels:
            raise ConfigError("study has no levels")
        bad = [n for n in self.norms if n not in ("L1", "L2")]
        if bad:
            raise ConfigError(f"unknown norms {bad}")
        cells = [c for c, _ in self.levels]
        if any(b <= a for a, b in zip(cells, cells[1:])):
            raise ConfigError("levels must be strictly decreasing in h")
        rc, rs = self.reference
        for c, s in self.levels:
            if rc < c or rs < s:
                raise ConfigError(
                    "reference must be at least as fine as every level"
                )


@dataclass(frozen=True)
class LevelResult:
    level: int
    h: float
    dt: float
    err_L1: float
    err_L2: float
    wall_time_s: float


@dataclass(frozen=True)
class RateReport:
    """Per-level errors and fitted slopes; nan marks unselected norms."""

    rows: Tuple[LevelResult, ...]
    slope_L1: float = float("nan")
    slope_L2: float = float("nan")
    residual_L1: float = float("nan")
    residual_L2: float = float("nan")


def levels_from_exponents(exponents, coupling, T=1.0):
    """(n_cells, n_steps) pairs for h = 2^-j levels.

    coupling 'equal' means h = dt, 'sqrt' means h = sqrt(dt); step
    counts are rounded to keep dt = T/n_steps exact.
    """
    pairs = []
    for j in exponents:
        n_cells = 2**j
        if coupling == "equal":
            n_steps = round(T * 2**j)
        elif coupling == "sqrt":
            n_steps = round(T * 4**j)
        else:
            raise ConfigError(f"unknown coupling {coupling!r}")
        if n_steps < 1:
            raise ConfigError(f"level {j} leaves no time steps for T={T}")
        pairs.append((n_cells, n_steps))
    return tuple(pairs)


def _scheme_config(study, pair, T=None, n_steps_override=None):
    n_cells, n_steps = pair
    if n_steps_override is not None:
        n_steps = n_steps_override
    T = study.T if T is None else T
    if study.equation == "advdiff":
        mesh = Mesh1D(n_cells, study.bc)
        return AdvDiffConfig(
            mesh=mesh,
            coeffs=study.coeffs,
            c0=study.c0,
            kernel=study.kernel,
            T=T,
            n_steps=n_steps,
        )
    mesh = Mesh1D(n_cells, "dirichlet")
    return WaveConfig(
        mesh=mesh,
        kernel=study.kernel,
        g_spec=study.g_spec,
        T=T,
        n_steps=n_steps,
    )


def run_single(study, pair=None, t_stop=None):
    """One covariance computation at a single discretization.

    pair defaults to the study's reference. t_stop, when given, must be
    a multiple of dt; the run then stops there (snapshot support).
    Returns (mesh, K, t_end) with K the position block for wave runs.
    """
    pair = study.reference if pair is None else pair
    n_cells, n_steps = pair
    T, j = study.T, n_steps
    if t_stop is not None:
        dt = study.T / n_steps
        j = round(t_stop / dt)
        if abs(j * dt - t_stop) > 1e-9 * max(1.0, study.T):
            raise ConfigError(
                f"snapshot_t={t_stop} is not a multiple of dt={dt}"
            )
        if j > n_steps:
            raise ConfigError("snapshot_t lies beyond the horizon T")
        if j == 0:
            mesh = Mesh1D(
                n_cells, study.bc if study.equation == "advdiff" else "dirichlet"
            )
            return mesh, np.zeros((mesh.n_dof, mesh.n_dof)), 0.0
        T = j * dt
    cfg = _scheme_config(study, (n_cells, j), T=T)
    if study.equation == "advdiff":
        return cfg.mesh, advdiff_run(cfg), T
    return cfg.mesh, extract_position_cov(wave_run(cfg)), T


def _n_workers():
    raw = os.environ.get("SPDE_COV_THREADS", "").strip()
    if raw in ("", "0"):
        return os.cpu_count() or 1
    try:
        val = int(raw)
    except ValueError as exc:
        raise ConfigError(f"SPDE_COV_THREADS={raw!r} is not an integer") from exc
    return max(1, val)


def run_sweep(study):
    """Run every level against the reference and fit rates.

    Levels are independent and run on a thread pool sized by
    SPDE_COV_THREADS (0/unset = all cores); the report rows keep level
    order regardless of scheduling. Zero errors are excluded from the
    fit with a warning, and a fit with fewer than two usable points
    leaves the slope nan.
    """
    mesh_ref, K_ref, _ = _run_ref(study)

    def one_level(idx_pair):
        idx, pair = idx_pair
        t0 = time.perf_counter()
        mesh, K, _ = run_single(study, pair)
        e1 = (
            err_trace_norm(K, mesh, K_ref, mesh_ref)
            if "L1" in study.norms
            else float("nan")
        )
        e2 = (
            err_hs_norm(K, mesh, K_ref, mesh_ref)
            if "L2" in study.norms
            else float("nan")
        )
        wall = time.perf_counter() - t0
        return LevelResult(
            level=idx,
            h=mesh.h,
            dt=study.T / pair[1],
            err_L1=e1,
            err_L2=e2,
            wall_time_s=wall,
        )

    workers = min(_n_workers(), len(study.levels))
    jobs = list(enumerate(study.levels, start=1))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(one_level, jobs))
    else:
        rows = tuple(map(one_level, jobs))

    hs = [r.h for r in rows]
    slopes = {}
    residuals = {}
    for norm, errs in (
        ("L1", [r.err_L1 for r in rows]),
        ("L2", [r.err_L2 for r in rows]),
    ):
        if norm not in study.norms:
            slopes[norm], residuals[norm] = float("nan"), float("nan")
            continue
        try:
            slopes[norm], residuals[norm] = _fit_with_residual(hs, errs)
        except DegenerateFitError:
            slopes[norm], residuals[norm] = float("nan"), float("nan")
    return RateReport(
        rows=rows,
        slope_L1=slopes["L1"],
        slope_L2=slopes["L2"],
        residual_L1=residuals["L1"],
        residual_L2=residuals["L2"],
    )


def _run_ref(study):
    return run_single(study, study.reference)


def _usable_pairs(hs, errs):
    pairs = []
    for h, e in zip(hs, errs):
        if not np.isfinite(e):
            continue
        if e <= 0.0:
            warnings.warn(
                f"excluding nonpositive error {e!r} at h={h!r} from rate fit",
                stacklevel=3,
            )
            continue
        pairs.append((h, e))
    return pairs


def _fit_with_residual(hs, errs):
    pairs = _usable_pairs(hs, errs)
    if len(pairs) < 2:
        raise DegenerateFitError(
            f"need at least 2 usable (h, err) pairs, have {len(pairs)}"
        )
    lh = np.log([p[0] for p in pairs])
    le = np.log([p[1] for p in pairs])
    coef, diag = np.polyfit(lh, le, 1, full=True)[:2]
    ssr = float(diag[0]) if len(diag) else 0.0
    return float(coef[0]), float(np.sqrt(ssr / len(pairs)))


def fit_rate(hs, errs):
    """Least-squares slope of log(err) against log(h).

    Zero errors are excluded with a warning; fewer than two usable
    pairs raise DegenerateFitError.
    """
    return _fit_with_residual(hs, errs)[0]


def _r(x):
    """Full round-trip float formatting."""
    return repr(float(x))


def emit(report, fmt="csv", path=None):
    """Serialize a RateReport.

    fmt is 'csv', 'jsonl' (json-lines), or 'gnuplot' (gnuplot-data).
    Returns the text; writes it to `path` as UTF-8 when given. The CSV
    carries exactly the columns level,h,dt,err_L1,err_L2,wall_time_s
    plus trailing '# slope_*=' comment lines.
    """
    fmt = {"json-lines": "jsonl", "gnuplot-data": "gnuplot"}.get(fmt, fmt)
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in report.rows:
            lines.append(
                f"{r.level},{_r(r.h)},{_r(r.dt)},{_r(r.err_L1)},"
                f"{_r(r.err_L2)},{_r(r.wall_time_s)}"
            )
        lines.append(f"# slope_L1={_r(report.slope_L1)}")
        lines.append(f"# slope_L2={_r(report.slope_L2)}")
        text = "\n".join(lines) + "\n"
    elif fmt == "jsonl":
        recs = [
            {
                "level": r.level,
                "h": r.h,
                "dt": r.dt,
                "err_L1": r.err_L1,
                "err_L2": r.err_L2,
                "wall_time_s": r.wall_time_s,
            }
            for r in report.rows
        ]
        recs.append(
            {"slope_L1": report.slope_L1, "slope_L2": report.slope_L2}
        )
        text = "\n".join(
            json.dumps(rec, allow_nan=True) for rec in recs
        ) + "\n"
    elif fmt == "gnuplot":
        lines = ["# " + CSV_HEADER.replace(",", " ")]
        for r in report.rows:
            lines.append(
                f"{r.level} {_r(r.h)} {_r(r.dt)} {_r(r.err_L1)} "
                f"{_r(r.err_L2)} {_r(r.wall_time_s)}"
            )
        lines.append(f"# slope_L1={_r(report.slope_L1)}")
        lines.append(f"# slope_L2={_r(report.slope_L2)}")
        text = "\n".join(lines) + "\n"
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def read_report(text):
    """Parse a CSV report back into a RateReport (inverse of emit)."""
    rows = []
    slopes = {"L1": float("nan"), "L2": float("nan")}
    for line in text.splitlines():
        line = line.strip()
        if not line or line == CSV_HEADER:
            continue
        if line.startswith("#"):
            body = line.lstrip("# ").strip()
            for key in slopes:
                if body.startswith(f"slope_{key}="):
                    slopes[key] = float(body.split("=", 1)[1])
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise ConfigError(f"malformed report row: {line!r}")
        rows.append(
            LevelResult(
                level=int(parts[0]),
                h=float(parts[1]),
                dt=float(parts[2]),
                err_L1=float(parts[3]),
                err_L2=float(parts[4]),
                wall_time_s=float(parts[5]),
            )
        )
    return RateReport(
        rows=tuple(rows), slope_L1=slopes["L1"], slope_L2=slopes["L2"]
    )
