"""Command-line front end.

Four subcommands drive the library from a JSON experiment configuration:

  carnot classify --config cfg.json [--out DIR] [--no-plot]
  carnot portrait --config cfg.json [--out DIR] [--no-plot]
  carnot casimir  --config cfg.json [--exact] [--polynomial] [--out DIR] [--no-plot]
  carnot spectrum --config cfg.json [--out DIR] [--no-plot]

Reports are JSON, trajectories and portraits CSV (UTF-8, LF, header row),
floats printed with 17 significant digits so parsing the files recovers
the values exactly.  Rational values in exact mode print as "num/den".
Every file is rendered in memory first and written through a temp file
plus atomic rename: a failing run leaves no partial output.  Exit codes:
0 success, 2 a computation failed (integration stall, period detection,
nonzero exact residual), 3 the configuration is invalid.

The config schema (version 1):

  {
    "version": 1,
    "k": 2,
    "body": {"kind": "ellipsoid", "a": [[...]], "center": [...]},
    "initial": {"h": [...], "h2": [...]},
    "horizon": 20.0,
    "samples": 401,
    "rate": 1.0,
    "seed": 0,
    "tolerances": {"step_tol": 1e-10, "fixed_point": 1e-10,
                   "period": 1e-9, "closure": 1e-7, "rank": 1e-9},
    "grid": {"n": 5, "radius": 1.5, "scan_n": 61, "scan_radius": 1.5,
             "mark_tol": 1e-8, "h_floor": 1e-6},
    "scan": {"horizon": 10000.0, "dt": 0.01, "t_min": 1.0, "bins": 32,
             "tol": 1e-9, "max_integer": 64},
    "outputs": {"report_json": "...", "trajectory_csv": "...",
                "portrait_csv": "..."}
  }

"initial" may instead carry {"h2": [...], "base_h": [...],
"leaf_coords": [y1, y2]} to place the start point on the leaf through
base_h in the leaf's own orthonormal plane coordinates.  Body kinds:
ellipsoid, lq_ball, ball_intersection; polytopes are rejected because the
flow needs a strictly convex control set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from .algebra import MAX_GENERATORS, AlgebraShape
from .casimir import (
    EvenGeneratorCountError,
    casimir_report,
    identity_residual,
    residual_scale,
)
from .coadjoint import CovectorPoint, leaf_through, poisson_matrix, rank_and_kernel
from .convex import AbnormalPointError, BodyError, body_from_spec, unit_level_normalize
from .dopri import StepSizeUnderflow
from .flow import (
    FlowTolerances,
    IntegrationError,
    PeriodDetectionError,
    classify,
    detect_period,
    fixed_set_estimate,
    integrate,
    recurrence_scan,
    spectrum,
)


class ConfigError(ValueError):
    """The configuration file is malformed or violates an invariant."""


class ExactResidualError(RuntimeError):
    """Exact mode demanded a zero residual and did not get one."""


# ---------------------------------------------------------------------------
# serialization


def _fmt_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def _fmt_cell(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return _fmt_float(v)


def _render_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(key))}: {_render_json(val, indent + 1)}"
            for key, val in obj.items()
        ]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        items = list(obj)
        if not items:
            return "[]"
        rendered = [_render_json(v, indent + 1) for v in items]
        if all(len(r) <= 26 and "\n" not in r for r in rendered) and len(items) <= 16:
            return "[" + ", ".join(rendered) + "]"
        return "[\n" + ",\n".join(inner + r for r in rendered) + f"\n{pad}]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def _render_csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _write_all(out_dir: Path, files: dict[str, str]) -> None:
    """Write every rendered file; content was built first, so a failure in
    any single write cannot leave a half-rendered report behind."""
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        _atomic_write(out_dir / name, text)


# ---------------------------------------------------------------------------
# configuration


_TOL_FIELDS = ("step_tol", "fixed_point", "period", "closure", "rank")


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    if cfg.get("version") != 1:
        raise ConfigError(
            f"unsupported config version {cfg.get('version')!r}; expected 1"
        )
    k = cfg.get("k")
    if not isinstance(k, int) or isinstance(k, bool):
        raise ConfigError("config field 'k' must be an integer")
    if not 2 <= k <= MAX_GENERATORS:
        raise ConfigError(f"k = {k} outside the supported range 2..{MAX_GENERATORS}")
    return cfg


def config_tolerances(cfg: dict) -> FlowTolerances:
    raw = cfg.get("tolerances", {})
    if not isinstance(raw, dict):
        raise ConfigError("'tolerances' must be an object")
    unknown = set(raw) - set(_TOL_FIELDS)
    if unknown:
        raise ConfigError(f"unknown tolerance fields: {sorted(unknown)}")
    kwargs = {}
    for name in _TOL_FIELDS:
        if name in raw:
            value = raw[name]
            if not isinstance(value, (int, float)) or isinstance(value, bool) \
                    or not value > 0:
                raise ConfigError(f"tolerance '{name}' must be a positive number")
            kwargs[name] = float(value)
    return FlowTolerances(**kwargs)


def _float_vector(raw, length: int, name: str) -> np.ndarray:
    if not isinstance(raw, (list, tuple)) or len(raw) != length:
        raise ConfigError(f"'{name}' must be a list of {length} numbers")
    try:
        vec = np.asarray([float(v) for v in raw], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{name}' has a non-numeric entry: {exc}") from exc
    if not np.all(np.isfinite(vec)):
        raise ConfigError(f"'{name}' entries must be finite")
    return vec


def _exact_vector(raw, length: int, name: str) -> np.ndarray:
    if not isinstance(raw, (list, tuple)) or len(raw) != length:
        raise ConfigError(f"'{name}' must be a list of {length} entries")
    out = []
    for v in raw:
        if isinstance(v, bool) or isinstance(v, float):
            raise ConfigError(
                f"exact mode requires integer or 'num/den' string entries in "
                f"'{name}', got {v!r}"
            )
        if isinstance(v, int):
            out.append(Fraction(v))
        elif isinstance(v, str):
            try:
                out.append(Fraction(v))
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"bad rational {v!r} in '{name}': {exc}") from exc
        else:
            raise ConfigError(f"bad entry {v!r} in '{name}'")
    return np.array(out, dtype=object)


def resolve_initial(cfg: dict, exact: bool = False) -> CovectorPoint:
    """Build the starting covector from the 'initial' section.

    Either an explicit point {"h", "h2"} or a leaf placement {"h2",
    "base_h", "leaf_coords"} where leaf_coords are taken in the orthonormal
    plane frame of the leaf through (base_h, h2).
    """
    k = cfg["k"]
    shape = AlgebraShape(k)
    raw = cfg.get("initial")
    if not isinstance(raw, dict):
        raise ConfigError("config needs an 'initial' object")
    vec = _exact_vector if exact else _float_vector
    if "h2" not in raw:
        raise ConfigError("'initial' needs the frozen second layer 'h2'")
    h2 = vec(raw["h2"], shape.dim_second, "initial.h2")
    if "h" in raw:
        h = vec(raw["h"], k, "initial.h")
        return CovectorPoint(h, h2)
    if "base_h" in raw and "leaf_coords" in raw:
        if exact:
            raise ConfigError("leaf placement is a floating-point construction; "
                              "give an explicit 'h' in exact mode")
        base_h = _float_vector(raw["base_h"], k, "initial.base_h")
        lf = leaf_through(CovectorPoint(base_h, h2))
        coords = _float_vector(raw["leaf_coords"], lf.dim, "initial.leaf_coords")
        h = lf.point_at(coords[None, :])[0]
        return CovectorPoint(h, h2)
    raise ConfigError("'initial' needs either 'h' or 'base_h' + 'leaf_coords'")


def _positive(cfg: dict, name: str, default: float) -> float:
    value = cfg.get(name, default)
    if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
        raise ConfigError(f"config field '{name}' must be a positive number")
    return float(value)


def _pos_int(raw, name: str, default: int, minimum: int = 1) -> int:
    value = raw.get(name, default)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"'{name}' must be an integer >= {minimum}")
    return value


def _seed(cfg: dict) -> int:
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("'seed' must be an integer")
    return seed


def _worker_count() -> int:
    raw = os.environ.get("CARNOT_THREADS")
    if raw is None or not raw.strip():
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"CARNOT_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError("CARNOT_THREADS must be at least 1")
    return n


def _output_name(cfg: dict, key: str, default: str) -> str:
    outputs = cfg.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ConfigError("'outputs' must be an object")
    name = outputs.get(key, default)
    if not isinstance(name, str) or not name or "/" in name or "\\" in name:
        raise ConfigError(f"output name '{key}' must be a bare file name")
    return name


def _tol_dict(tols: FlowTolerances) -> dict:
    return {name: getattr(tols, name) for name in _TOL_FIELDS}


# ---------------------------------------------------------------------------
# subcommands


def cmd_classify(cfg: dict, out_dir: Path, plot: bool) -> int:
    k = cfg["k"]
    tols = config_tolerances(cfg)
    seed = _seed(cfg)
    body = body_from_spec(cfg.get("body"), k, seed=seed)
    p_raw = resolve_initial(cfg)
    horizon = _positive(cfg, "horizon", 20.0)
    n_samples = _pos_int(cfg, "samples", 401, minimum=2)

    p0 = unit_level_normalize(body, p_raw)
    scale = float(body.support(np.asarray(p_raw.as_float().h)))
    outcome = classify(p0, body, tols)
    traj = integrate(p0, body, horizon, step_tol=tols.step_tol, n_samples=n_samples)

    report_name = _output_name(cfg, "report_json", "classify_report.json")
    csv_name = _output_name(cfg, "trajectory_csv", "trajectory.csv")
    fig_name = Path(csv_name).stem + ".png"

    drift = dict(traj.drift)
    report = {
        "version": 1,
        "command": "classify",
        "k": k,
        "seed": seed,
        "body": cfg.get("body"),
        "initial_h": list(p_raw.as_float().h),
        "h2": list(p_raw.as_float().h2),
        "normalization_scale": scale,
        "classification": {
            "kind": outcome.kind,
            "orbit_dim": outcome.orbit_dim,
            "period": outcome.period,
            "fixed_point_residual": outcome.fixed_point_residual,
        },
        "leaf_dim": traj.leaf.dim,
        "drift": {
            "H": drift["H"],
            "h2": drift["h2"],
            "C": drift.get("C"),
            "I_a": drift["I_a"],
        },
        "horizon": horizon,
        "samples": n_samples,
        "tolerances": _tol_dict(tols),
        "outputs": {
            "report_json": report_name,
            "trajectory_csv": csv_name,
            "figure": fig_name if plot else None,
        },
    }

    header = ["t"] + [f"h_{i}" for i in range(1, k + 1)] \
        + [f"u_{i}" for i in range(1, k + 1)]
    rows = [
        [traj.times[i], *traj.hs[i], *traj.controls[i]]
        for i in range(len(traj.times))
    ]
    files = {
        report_name: _render_json(report) + "\n",
        csv_name: _render_csv(header, rows),
    }
    _write_all(out_dir, files)
    if plot:
        from . import plots

        ys = traj.leaf.plane_coords(traj.hs) if traj.leaf.dim == 2 else None
        plots.trajectory_figure(traj.times, ys, traj.hs, traj.controls,
                                out_dir / fig_name)
    print(f"classify: kind={outcome.kind} orbit_dim={outcome.orbit_dim}"
          + (f" period={_fmt_float(outcome.period)}" if outcome.period else ""))
    return 0


def _portrait_one(args):
    """Worker for one portrait seed; returns (summary dict, csv rows)."""
    idx, y0, lf, body, h2, tols, n_samples, horizon, h_floor = args
    h = lf.point_at(np.asarray(y0)[None, :])[0]
    level = float(body.support(h)) if np.linalg.norm(h) > 0 else 0.0
    entry = {"traj_id": idx, "y0": list(y0), "kind": None, "period": None,
             "level": level}
    if level < h_floor:
        entry["kind"] = "abnormal"
        return entry, [], None
    p = CovectorPoint(h, h2)
    m = poisson_matrix(p)
    u = body.grad_support(h)
    residual = float(np.linalg.norm(m @ u))
    if residual <= tols.fixed_point * (1.0 + np.linalg.norm(m, 2)):
        entry["kind"] = "constant"
        rows = [[idx, 0.0, y0[0], y0[1], *u]]
        return entry, rows, None
    try:
        period = detect_period(p, body, tols)
        entry["kind"] = "periodic"
        entry["period"] = period
        span = period
    except (PeriodDetectionError, IntegrationError) as exc:
        entry["kind"] = "unresolved"
        entry["note"] = str(exc)
        span = horizon
    try:
        traj = integrate(p, body, span, step_tol=tols.step_tol,
                         n_samples=n_samples)
    except (IntegrationError, AbnormalPointError) as exc:
        entry["kind"] = "unresolved"
        entry["note"] = str(exc)
        return entry, [], None
    ys = lf.plane_coords(traj.hs)
    rows = [
        [idx, traj.times[i], ys[i, 0], ys[i, 1], *traj.controls[i]]
        for i in range(len(traj.times))
    ]
    return entry, rows, ys


def cmd_portrait(cfg: dict, out_dir: Path, plot: bool) -> int:
    k = cfg["k"]
    tols = config_tolerances(cfg)
    seed = _seed(cfg)
    body = body_from_spec(cfg.get("body"), k, seed=seed)
    p_base = resolve_initial(cfg)
    horizon = _positive(cfg, "horizon", 20.0)
    n_samples = _pos_int(cfg, "samples", 257, minimum=2)

    lf = leaf_through(p_base.as_float(), tols.rank)
    if lf.dim != 2:
        raise ConfigError(
            f"portraits need a 2-dimensional leaf; the configured leaf has "
            f"dimension {lf.dim}"
        )

    grid_cfg = cfg.get("grid", {})
    if not isinstance(grid_cfg, dict):
        raise ConfigError("'grid' must be an object")
    n = _pos_int(grid_cfg, "n", 5, minimum=1)
    radius = grid_cfg.get("radius", 1.5)
    if not isinstance(radius, (int, float)) or isinstance(radius, bool) or radius <= 0:
        raise ConfigError("'grid.radius' must be positive")
    radius = float(radius)
    scan_n = _pos_int(grid_cfg, "scan_n", 61, minimum=2)
    scan_radius = float(grid_cfg.get("scan_radius", radius))
    if scan_radius <= 0:
        raise ConfigError("'grid.scan_radius' must be positive")
    mark_tol = grid_cfg.get("mark_tol", 1e-8)
    h_floor = grid_cfg.get("h_floor", 1e-6)
    if not (isinstance(mark_tol, (int, float)) and mark_tol > 0):
        raise ConfigError("'grid.mark_tol' must be positive")
    if not (isinstance(h_floor, (int, float)) and h_floor > 0):
        raise ConfigError("'grid.h_floor' must be positive")

    h2f = np.asarray(p_base.as_float().h2, dtype=float)
    axis = np.linspace(-radius, radius, n) if n > 1 else np.array([0.0])
    seeds = [
        (i * n + j, (float(axis[i]), float(axis[j])), lf, body, h2f, tols,
         n_samples, horizon, float(h_floor))
        for i in range(n)
        for j in range(n)
    ]
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        results = list(pool.map(_portrait_one, seeds))

    d0 = fixed_set_estimate(lf, body, grid_n=scan_n, radius=scan_radius,
                            mark_tol=float(mark_tol), h_floor=float(h_floor))

    report_name = _output_name(cfg, "report_json", "portrait_report.json")
    csv_name = _output_name(cfg, "portrait_csv", "portrait.csv")
    fig_name = Path(csv_name).stem + ".png"

    entries = [entry for entry, _, _ in results]
    all_rows = [row for _, rows, _ in results for row in rows]
    report = {
        "version": 1,
        "command": "portrait",
        "k": k,
        "seed": seed,
        "body": cfg.get("body"),
        "h2": list(h2f),
        "leaf": {
            "dim": lf.dim,
            "base_h": list(np.asarray(lf.base.h, dtype=float)),
        },
        "grid": {
            "n": n,
            "radius": radius,
            "scan_n": scan_n,
            "scan_radius": scan_radius,
            "mark_tol": float(mark_tol),
            "h_floor": float(h_floor),
        },
        "fixed_set": {
            "dim_estimate": d0.dim_estimate,
            "n_marked": int(len(d0.points_y)),
            "extents": list(d0.extents),
            "spacing": d0.spacing,
            "thickness_tol": d0.thickness_tol,
            "mark_tol_scaled": d0.mark_tol,
            "insufficient": d0.insufficient,
            "contains_abnormal_point": d0.origin_y is not None,
            "hull": [list(v) for v in d0.hull_y],
        },
        "trajectories": entries,
        "tolerances": _tol_dict(tols),
        "outputs": {
            "report_json": report_name,
            "portrait_csv": csv_name,
            "figure": fig_name if plot else None,
        },
    }

    header = ["traj_id", "t", "y1", "y2"] + [f"u_{i}" for i in range(1, k + 1)]
    files = {
        report_name: _render_json(report) + "\n",
        csv_name: _render_csv(header, all_rows),
    }
    _write_all(out_dir, files)
    if plot:
        from . import plots

        curves = [
            {"ys": ys, "y0": entry["y0"], "kind": entry["kind"]}
            for (entry, _, ys) in results
        ]
        plots.portrait_figure(curves, d0, out_dir / fig_name)
    print(f"portrait: {len(entries)} seeds, fixed-set dim "
          f"{d0.dim_estimate} ({len(d0.points_y)} marked points)")
    return 0


def cmd_casimir(cfg: dict, out_dir: Path, plot: bool, exact: bool,
                polynomial: bool) -> int:
    k = cfg["k"]
    shape = AlgebraShape(k)
    if polynomial and k % 2 == 0:
        raise EvenGeneratorCountError(k)
    p = resolve_initial(cfg, exact=exact)

    want_poly = k % 2 == 1
    if want_poly:
        rep = casimir_report(p)
        residual = identity_residual(p)
        a_vec = list(rep.a_vec)
        c_value = rep.c_value
    else:
        residual = None
        a_vec = None
        c_value = None

    if exact:
        residual_field = list(residual) if residual is not None else None
        if residual is not None and any(r != 0 for r in residual):
            raise ExactResidualError(
                "exact-mode Casimir residual is nonzero: "
                + ", ".join(str(r) for r in residual)
            )
        rel = Fraction(0) if residual is not None else None
    else:
        if residual is not None:
            scale = residual_scale(p)
            rel = float(np.max(np.abs(residual)) / scale) if scale > 0 else 0.0
            residual_field = [float(r) for r in residual]
        else:
            rel = None
            residual_field = None

    report_name = _output_name(cfg, "report_json", "casimir_report.json")
    fig_name = Path(report_name).stem + ".png"
    pf = p if exact else p.as_float()
    report = {
        "version": 1,
        "command": "casimir",
        "k": k,
        "exact": exact,
        "h": list(pf.h),
        "trivial_casimirs": {
            f"h_{i}{j}" if j < 10 else f"h_{i},{j}": pf.h2[shape.pair_index(i, j)]
            for i, j in shape.pairs()
        },
        "a_vec": a_vec,
        "c_value": c_value,
        "identity_residual": residual_field,
        "residual_max_relative": rel,
        "outputs": {
            "report_json": report_name,
            "figure": fig_name if plot and a_vec is not None else None,
        },
    }
    _write_all(out_dir, {report_name: _render_json(report) + "\n"})
    if plot and a_vec is not None:
        from . import plots

        plots.casimir_figure(a_vec, out_dir / fig_name)
    if want_poly:
        shown = (f"{c_value.numerator}/{c_value.denominator}"
                 if isinstance(c_value, Fraction) else _fmt_float(c_value))
        print(f"casimir: k={k} C={shown} residual max "
              + (str(rel) if exact else _fmt_float(rel)))
    else:
        print(f"casimir: k={k} even, only the {shape.dim_second} "
              f"second-layer coordinates are Casimirs")
    return 0


def cmd_spectrum(cfg: dict, out_dir: Path, plot: bool) -> int:
    k = cfg["k"]
    p = resolve_initial(cfg)
    pf = p.as_float()
    m = poisson_matrix(pf)
    rank, _ = rank_and_kernel(m, config_tolerances(cfg).rank)

    scan_cfg = cfg.get("scan", {})
    if not isinstance(scan_cfg, dict):
        raise ConfigError("'scan' must be an object")
    tol = float(scan_cfg.get("tol", 1e-9))
    max_integer = _pos_int(scan_cfg, "max_integer", 64, minimum=1)
    rep = spectrum(m, tol=tol, max_denominator=max_integer)

    scan = None
    if np.linalg.norm(np.asarray(pf.h, dtype=float)) > 0 and len(rep.frequencies):
        scan_T = float(scan_cfg.get("horizon", 10000.0))
        scan_dt = float(scan_cfg.get("dt", 0.01))
        t_min = float(scan_cfg.get("t_min", 1.0))
        bins = _pos_int(scan_cfg, "bins", 32, minimum=2)
        if scan_T <= 0 or scan_dt <= 0 or t_min < 0:
            raise ConfigError("'scan' horizon and dt must be positive")
        rate = _positive(cfg, "rate", 1.0)
        scan = recurrence_scan(pf, scan_T, dt=scan_dt, t_min=t_min,
                               rate=rate, bins=bins)

    report_name = _output_name(cfg, "report_json", "spectrum_report.json")
    fig_name = Path(report_name).stem + ".png"
    report = {
        "version": 1,
        "command": "spectrum",
        "k": k,
        "h2": list(pf.h2),
        "frequencies": [float(w) for w in rep.frequencies],
        "zero_multiplicity": rep.zero_multiplicity,
        "orbit_dim": rank,
        "commensurable": rep.commensurable,
        "common_period": rep.common_period,
        "integer_vector": list(rep.integer_vector) if rep.integer_vector else None,
        "max_integer": max_integer,
        "tol": tol,
        "recurrence": None if scan is None else {
            "horizon": scan.horizon,
            "dt": scan.dt,
            "t_min": scan.t_min,
            "min_distance": scan.min_distance,
            "argmin_time": scan.argmin_time,
            "bins": int(math.isqrt(scan.total_bins)) if scan.total_bins else 0,
            "occupied_bins": scan.occupied_bins,
            "total_bins": scan.total_bins,
            "min_bin_count": scan.min_bin_count,
        },
        "outputs": {
            "report_json": report_name,
            "figure": fig_name if plot else None,
        },
    }
    _write_all(out_dir, {report_name: _render_json(report) + "\n"})
    if plot:
        from . import plots

        hist = scan.histogram if scan is not None else None
        plots.spectrum_figure(np.asarray(rep.frequencies, dtype=float), hist,
                              out_dir / fig_name)
    verdict = "commensurable" if rep.commensurable else "non-commensurable"
    print(f"spectrum: {len(rep.frequencies)} positive frequencies, {verdict}"
          + (f", period={_fmt_float(rep.common_period)}"
             if rep.common_period else ""))
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carnot",
        description="Coadjoint orbits, Casimir functions, and vertical "
                    "extremal flows on step-2 free-nilpotent Lie algebras.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "classify": "classify the vertical motion from one initial covector",
        "portrait": "sample a leaf phase portrait and estimate the fixed set",
        "casimir": "evaluate Casimir functions and the kernel identity",
        "spectrum": "frequency analysis of the frozen Poisson matrix",
    }
    for name, help_text in specs.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--no-plot", action="store_true",
                        help="skip figure rendering")
        if name == "casimir":
            sp.add_argument("--exact", action="store_true",
                            help="rational arithmetic; requires rational inputs "
                                 "and an exactly zero residual")
            sp.add_argument("--polynomial", action="store_true",
                            help="insist on the polynomial Casimir "
                                 "(rejected for even k)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    out_dir = Path(args.out)
    plot = not args.no_plot
    try:
        cfg = load_config(args.config)
        if args.command == "classify":
            return cmd_classify(cfg, out_dir, plot)
        if args.command == "portrait":
            return cmd_portrait(cfg, out_dir, plot)
        if args.command == "casimir":
            return cmd_casimir(cfg, out_dir, plot, args.exact, args.polynomial)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, out_dir, plot)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, BodyError, EvenGeneratorCountError, AbnormalPointError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (IntegrationError, PeriodDetectionError, ExactResidualError,
            StepSizeUnderflow) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
