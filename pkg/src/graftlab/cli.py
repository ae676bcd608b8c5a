"""Command-line experiment runner.

Commands: verify (full identity suite, JSON report), sweep (parameter sweep,
CSV), geodesic (numeric geodesic vs closed-form variation), chart (dump the
chart as JSON), modes (per-mode solver data as CSV).

Config files are flat ``key = value`` text; every key can be overridden by
the command-line flag of the same name.  A single seed fixes all generated
fields, so reports are reproducible byte for byte apart from the
``generated_at`` stamp.  GRAFTLAB_THREADS bounds the worker pool used for
sweep points (each task is pure; results are merged by index).
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from datetime import datetime, timezone

import numpy as np

from . import geometry, hypersolve, identities, sampling, spectral, variation
from .errors import ConfigError, GraftLabError

_CONFIG_KEYS = {
    "ell": float,
    "s": float,
    "a": float,
    "outer_bc": str,
    "modes": int,
    "tol": float,
    "seed": int,
    "out": str,
    "param": str,
    "from": float,
    "to": float,
    "steps": int,
    "t": float,
    "fd_step": float,
}


@dataclass(frozen=True)
class RunConfig:
    ell: float = 2 * np.pi
    s: float = 1.0
    a: float = 1.0
    outer_bc: str = "dirichlet"
    modes: int = 8
    tol: float = 1e-10
    seed: int = 0
    out: str | None = None
    param: str | None = None
    sweep_from: float | None = None
    sweep_to: float | None = None
    steps: int = 10
    t: float = 1e-3
    fd_step: float | None = None

    def validate(self) -> "RunConfig":
        if self.ell <= 0 or self.a <= 0 or self.s < 0:
            raise ConfigError("need ell > 0, a > 0, s >= 0")
        if self.outer_bc not in ("dirichlet", "neumann"):
            raise ConfigError(f"unknown outer_bc {self.outer_bc!r}")
        if self.modes < 1 or self.steps < 1:
            raise ConfigError("modes and steps must be >= 1")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        return self

    def chart(self) -> geometry.GraftedCollar:
        return geometry.GraftedCollar(ell=self.ell, s=self.s, a=self.a, outer_bc=self.outer_bc)


_FIELD_FOR_KEY = {"from": "sweep_from", "to": "sweep_to"}


def load_config(path: str) -> dict:
    values = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, _, val = line.partition("=")
                key = key.strip()
                if key not in _CONFIG_KEYS:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                try:
                    values[key] = _CONFIG_KEYS[key](val.strip())
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        updates = {
            _FIELD_FOR_KEY.get(k, k): v for k, v in load_config(args.config).items()
        }
        cfg = replace(cfg, **updates)
    overrides = {}
    for key in _CONFIG_KEYS:
        attr = _FIELD_FOR_KEY.get(key, key)
        val = getattr(args, attr, None)
        if val is not None:
            overrides[attr] = val
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg.validate()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- verify -----------------------------------------------------------------

def _verify_reports(cfg: RunConfig) -> list[identities.IdentityReport]:
    rng = np.random.default_rng(cfg.seed)
    chart = cfg.chart()
    tol_alg = cfg.tol
    tol_bvp = cfg.tol * 1e3
    sol = sampling.random_solution(rng, cfg.ell, cfg.s, nmax=cfg.modes)
    q = sampling.random_quad(rng, cfg.ell, cfg.s, nmax=cfg.modes, amplitude=0.5)
    lam0, rho0 = sampling.slice_compatible_means(rng, cfg.s, sol.d0)
    config = identities.solve_configuration(
        chart, sol, mean_left=lam0, mean_right=rho0, quad=q, method="collocation"
    )
    vl, vr = config.v_left, config.v_right
    reports = []

    def compare(name, lhs, rhs, tol, notes=""):
        reports.append(identities._compare(name, lhs, rhs, tol, notes=notes))

    closed = identities.boundary_term_closed(sol, vl, vr)
    quad_val = identities.boundary_term_quadrature(
        (sol.dirichlet_trace("left"), sol.dirichlet_trace("right")),
        (variation.hyperbolic_neumann(vl), variation.hyperbolic_neumann(vr)),
    )
    compare("boundary_term_closed_vs_quadrature", closed, quad_val, tol_alg)

    reports.append(identities.slice_condition(sol, vl, vr, tol=max(tol_alg, 1e-12)))
    reports.append(identities.master_identity(config, tol=tol_bvp))
    reports.append(identities.area_derivative_report(config, tol=tol_alg))

    compare(
        "arc_length_derivative",
        identities.arc_length_derivative(sol),
        -0.5 * sol.d0 * sol.ell,
        tol_alg,
        notes="seam quadrature vs -d0 ell / 2",
    )

    wl = variation.solve_amended_variation(sol.neumann_trace_flat("left"), q, lam0)
    wr = variation.solve_amended_variation(sol.neumann_trace_flat("right"), q, rho0)
    ext_closed = identities.extended_boundary_term(sol, q, wl, wr)
    ext_quad = identities.boundary_term_quadrature(
        (sol.dirichlet_trace("left"), sol.dirichlet_trace("right")),
        (
            variation.extended_hyperbolic_neumann(wl),
            variation.extended_hyperbolic_neumann(wr),
        ),
    )
    compare("extended_boundary_closed_vs_quadrature", ext_closed, ext_quad, tol_alg)

    q0 = spectral.QuadDiffModes(ell=cfg.ell, s=cfg.s)
    wl0 = variation.solve_amended_variation(sol.neumann_trace_flat("left"), q0, lam0)
    wr0 = variation.solve_amended_variation(sol.neumann_trace_flat("right"), q0, rho0)
    compare(
        "extended_reduction_at_zero_quad",
        identities.extended_boundary_term(sol, q0, wl0, wr0),
        closed,
        tol_alg,
    )

    reports.append(identities.extended_master_identity(config, tol=tol_bvp))

    compare(
        "conformal_modulus_closed_vs_quadrature",
        geometry.conformal_modulus(chart),
        geometry.conformal_modulus_quadrature(chart),
        tol_alg,
    )
    compare(
        "total_area_closed_vs_quadrature",
        geometry.total_area(chart),
        geometry.total_area_quadrature(chart),
        tol_alg,
    )

    small = sampling.random_solution(rng, cfg.ell, cfg.s, nmax=3, amplitude=1e-4)
    compare(
        "interior_harmonicity_stencil",
        spectral.harmonicity_residual(small),
        0.0,
        max(tol_alg, 1e-6),
        notes="five-point Laplacian on the series partial sum, h = ell/256",
    )

    dtn_gap = max(
        abs(
            hypersolve.dtn(n, cfg.ell, cfg.a, cfg.outer_bc, method="auto")
            - hypersolve.dtn(n, cfg.ell, cfg.a, cfg.outer_bc, method="collocation")
        )
        for n in (0, 1, 4)
    )
    compare(
        "dtn_shooting_vs_collocation",
        dtn_gap,
        0.0,
        tol_bvp,
        notes="adaptive shooting against spectral collocation",
    )

    greens = hypersolve.greens_residual(config.all_strip_modes())
    scale = max(1.0, -identities.master_identity(config, tol=tol_bvp).terms[0][1])
    compare(
        "strip_greens_identity",
        greens / scale,
        0.0,
        tol_bvp,
        notes="energy vs boundary forms on the solved strip modes",
    )

    det_min = min(
        abs(
            identities.per_mode_determinant(
                n, cfg.ell, cfg.s, cfg.a, cfg.outer_bc, method="collocation"
            )
        )
        for n in range(1, cfg.modes + 1)
    )
    reports.append(
        identities.IdentityReport(
            identity="per_mode_determinant_floor",
            terms=(("min_abs_normalized_det", det_min),),
            lhs=det_min,
            rhs=1e-6,
            abs_err=max(0.0, 1e-6 - det_min),
            rel_err=max(0.0, 1e-6 - det_min) / 1e-6,
            tol=0.0,
            passed=det_min > 1e-6,
            notes="row-normalized determinant of the per-mode seam system",
        )
    )
    return reports


def cmd_verify(cfg: RunConfig) -> int:
    reports = _verify_reports(cfg)
    payload = {
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "config": asdict(cfg),
        "reports": [r.to_dict() for r in reports],
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", cfg.out)
    return 0 if all(r.passed for r in reports) else 1


# --- sweep ------------------------------------------------------------------

def _sweep_point(cfg: RunConfig, value: float) -> dict:
    point = replace(cfg, **{cfg.param: value}).validate()
    chart = point.chart()
    rng = np.random.default_rng(point.seed)
    sol = sampling.random_solution(rng, point.ell, point.s, nmax=min(point.modes, 8))
    lam0, rho0 = sampling.slice_compatible_means(rng, point.s, sol.d0)
    vl = variation.solve_flat_variation(sol.neumann_trace_flat("left"), lam0)
    vr = variation.solve_flat_variation(sol.neumann_trace_flat("right"), rho0)
    closed = identities.boundary_term_closed(sol, vl, vr)
    quad_val = identities.boundary_term_quadrature(
        (sol.dirichlet_trace("left"), sol.dirichlet_trace("right")),
        (variation.hyperbolic_neumann(vl), variation.hyperbolic_neumann(vr)),
    )
    denom = max(abs(closed), abs(quad_val), 1e-300)
    det_min = min(
        abs(
            identities.per_mode_determinant(
                n, point.ell, point.s, point.a, point.outer_bc, method="collocation"
            )
        )
        for n in range(1, min(point.modes, 8) + 1)
    )
    return {
        "param": cfg.param,
        "value": value,
        "ell": point.ell,
        "s": point.s,
        "a": point.a,
        "conformal_modulus": geometry.conformal_modulus(chart),
        "det_min": det_min,
        "boundary_rel_err": abs(closed - quad_val) / denom,
        "slice_residual": identities.slice_residual(sol, vl, vr),
    }


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.param not in ("ell", "s", "a"):
        raise ConfigError("sweep needs --param one of ell, s, a")
    if cfg.sweep_from is None or cfg.sweep_to is None:
        raise ConfigError("sweep needs --from and --to")
    values = np.linspace(cfg.sweep_from, cfg.sweep_to, cfg.steps)
    workers = int(os.environ.get("GRAFTLAB_THREADS", os.cpu_count() or 1))
    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        rows = list(pool.map(lambda v: _sweep_point(cfg, float(v)), values))

    fields = [
        "param",
        "value",
        "ell",
        "s",
        "a",
        "conformal_modulus",
        "det_min",
        "boundary_rel_err",
        "slice_residual",
    ]
    import io

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields)
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {k: repr(float(v)) if isinstance(v, (float, np.floating)) else v for k, v in row.items()}
        )
    _emit(buf.getvalue(), cfg.out)
    return 0


# --- geodesic ---------------------------------------------------------------

def _geodesic_errors(cfg: RunConfig, t: float) -> float:
    rng = np.random.default_rng(cfg.seed)
    chart = cfg.chart()
    sol = sampling.random_solution(rng, cfg.ell, cfg.s, nmax=min(cfg.modes, 4), amplitude=0.3)
    config = identities.solve_configuration(chart, sol, method="collocation")
    fld = variation.matched_global_field(chart, sol, config.v_left, config.v_right)
    fam = geometry.ConformalFamily(base=chart, hdot=fld)
    errs = []
    y0 = np.arange(256) * (cfg.ell / 256)
    for side, v in (("left", config.v_left), ("right", config.v_right)):
        y, rate = variation.geodesic_oracle(
            fam, side, t, m=256, scheme="forward", initial_rate=v.reconstruct(y0)
        )
        expected = v.reconstruct(y)
        scale = max(float(np.max(np.abs(expected))), 1e-300)
        errs.append(float(np.max(np.abs(rate - expected))) / scale)
    return max(errs)


def cmd_geodesic(cfg: RunConfig) -> int:
    if cfg.t <= 0:
        raise ConfigError("--t must be positive")
    err = _geodesic_errors(cfg, cfg.t)
    err_half = _geodesic_errors(cfg, cfg.t / 2)
    ok = err < 1e-2 and err_half < err
    payload = {
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "config": asdict(cfg),
        "max_rel_err": err,
        "max_rel_err_half_step": err_half,
        "first_order_convergence": err_half < err,
        "pass": ok,
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", cfg.out)
    return 0 if ok else 1


# --- chart / modes ----------------------------------------------------------

def cmd_chart(cfg: RunConfig) -> int:
    chart = cfg.chart()
    payload = json.loads(chart.to_json())
    payload["conformal_modulus"] = geometry.conformal_modulus(chart)
    payload["total_area"] = geometry.total_area(chart)
    payload["grafted_length"] = geometry.grafted_length(cfg.ell, cfg.s)
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", cfg.out)
    return 0


def cmd_modes(cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    sol = sampling.random_solution(rng, cfg.ell, cfg.s, nmax=cfg.modes)
    vl = variation.solve_flat_variation(sol.neumann_trace_flat("left"), 0.0)
    vr = variation.solve_flat_variation(sol.neumann_trace_flat("right"), 0.0)
    dl = sol.dirichlet_trace("left")
    dr = sol.dirichlet_trace("right")
    import io

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        [
            "n",
            "dtn",
            "dirichlet_left_re",
            "dirichlet_left_im",
            "dirichlet_right_re",
            "dirichlet_right_im",
            "lambda_re",
            "lambda_im",
            "rho_re",
            "rho_im",
        ]
    )
    for n in range(0, cfg.modes + 1):
        t = hypersolve.dtn(n, cfg.ell, cfg.a, cfg.outer_bc, method="collocation")
        if n == 0:
            row = [n, t, dl.mean, 0.0, dr.mean, 0.0, vl.mean, 0.0, vr.mean, 0.0]
        else:
            row = [
                n,
                t,
                dl.modes[n].real,
                dl.modes[n].imag,
                dr.modes[n].real,
                dr.modes[n].imag,
                vl.modes[n].real,
                vl.modes[n].imag,
                vr.modes[n].real,
                vr.modes[n].imag,
            ]
        writer.writerow(
            [repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row]
        )
    _emit(buf.getvalue(), cfg.out)
    return 0


# --- entry point ------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--ell", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--outer-bc", dest="outer_bc", choices=("dirichlet", "neumann"))
    p.add_argument("--modes", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path (default: stdout)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graftlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("verify", help="run the identity suite, emit JSON"))

    sweep = sub.add_parser("sweep", help="parameter sweep, emit CSV")
    _add_common(sweep)
    sweep.add_argument("--param", choices=("ell", "s", "a"))
    sweep.add_argument("--from", dest="sweep_from", type=float)
    sweep.add_argument("--to", dest="sweep_to", type=float)
    sweep.add_argument("--steps", type=int)

    geo = sub.add_parser("geodesic", help="numeric geodesic vs closed-form variation")
    _add_common(geo)
    geo.add_argument("--t", type=float)
    geo.add_argument("--fd-step", dest="fd_step", type=float)

    _add_common(sub.add_parser("chart", help="dump the chart as JSON"))
    _add_common(sub.add_parser("modes", help="dump per-mode solver data as CSV"))
    return parser


_COMMANDS = {
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "geodesic": cmd_geodesic,
    "chart": cmd_chart,
    "modes": cmd_modes,
}


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = build_config(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GraftLabError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
