"""Command-line front end: spectrum tables, virial verification reports,
figure data for the eigenvalue functions, and Dirichlet-limit convergence
tables, in CSV or JSON.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 tolerance
breach.  VIRIAL_ANOMALY_THREADS (integer >= 1) caps the worker pool used
for parameter sweeps; results are collected in order, so output is
deterministic regardless of the pool size.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import models, quad, specfun, virial

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_TOLERANCE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep exit codes under our control
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    model: str
    alpha: float | None = None
    xi: float = 1.0
    sigma: float = 1.0
    alpha_over_xi: float | None = None
    beta_over_sigma: float | None = None
    dirichlet: bool = False
    hbar: float = 1.0
    mass: float = 1.0
    n_max: int = 5
    eps_schedule: tuple[float, ...] = tuple(virial.DEFAULT_EPS_SCHEDULE)
    tolerance: float = 1e-6
    method: str = "both"
    fig_range: tuple[float, float] | None = None
    points: int = 2000
    values: tuple[float, ...] = (-10.0, -100.0, -1000.0)
    output_format: str = "csv"
    output_path: str | None = None


def _float_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise UsageError(f"bad float list {text!r}") from exc
    if not vals:
        raise UsageError(f"empty float list {text!r}")
    return vals


def _range_pair(text: str) -> tuple[float, float]:
    vals = _float_list(text)
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise UsageError(f"--range wants 'lo,hi' with lo < hi, got {text!r}")
    return vals[0], vals[1]


def build_parser() -> _Parser:
    p = _Parser(prog="virial-anomaly",
                description="Point-interaction spectra and virial-anomaly checks")
    sub = p.add_subparsers(dest="command", required=True)

    def add_model_flags(sp, need_model=("robin", "coulomb", "oscillator")):
        sp.add_argument("--model", required=True, choices=need_model)
        sp.add_argument("--alpha", type=float, help="Robin boundary parameter (> 0)")
        sp.add_argument("--xi", type=float, default=1.0, help="Coulomb strength 2mk/hbar^2")
        sp.add_argument("--sigma", type=float, default=1.0, help="oscillator scale sqrt(m w/hbar)")
        sp.add_argument("--alpha-over-xi", type=float, help="Coulomb extension ratio")
        sp.add_argument("--beta-over-sigma", type=float, help="oscillator extension ratio")
        sp.add_argument("--dirichlet", action="store_true", help="Dirichlet-limit extension")
        sp.add_argument("--hbar", type=float, default=1.0)
        sp.add_argument("--mass", type=float, default=1.0)

    def add_output_flags(sp):
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", help="output path (default: stdout)")

    sp = sub.add_parser("spectrum", help="table of bound states")
    add_model_flags(sp)
    sp.add_argument("--n-max", type=int, default=5)
    add_output_flags(sp)

    sp = sub.add_parser("verify", help="virial identity report / cutoff study")
    add_model_flags(sp)
    sp.add_argument("--n-max", type=int, default=1, help="number of states to verify")
    sp.add_argument("--eps-schedule", type=_float_list,
                    default=tuple(virial.DEFAULT_EPS_SCHEDULE))
    sp.add_argument("--tolerance", type=float, default=1e-6)
    sp.add_argument("--method", choices=("closed", "quadrature", "both"), default="both")
    add_output_flags(sp)

    sp = sub.add_parser("figure", help="pole-separated samples of F_C or F_H")
    add_model_flags(sp, need_model=("coulomb", "oscillator"))
    sp.add_argument("--range", dest="fig_range", type=_range_pair, required=True)
    sp.add_argument("--points", type=int, default=2000)
    add_output_flags(sp)

    sp = sub.add_parser("limits", help="convergence to the Dirichlet limit")
    add_model_flags(sp, need_model=("coulomb", "oscillator"))
    sp.add_argument("--values", type=_float_list, default=(-10.0, -100.0, -1000.0),
                    help="extension-ratio schedule marching to -infinity")
    add_output_flags(sp)
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command, model=args.model)
    for name in ("alpha", "xi", "sigma", "alpha_over_xi", "beta_over_sigma",
                 "dirichlet", "hbar", "mass", "n_max", "eps_schedule",
                 "tolerance", "method", "fig_range", "points", "values"):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    cfg.output_format = args.format
    cfg.output_path = args.output
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    needs_extension = cfg.command in ("spectrum", "verify")
    if cfg.model == "robin":
        if cfg.dirichlet:
            raise UsageError("--dirichlet does not apply to the Robin model")
        if cfg.alpha is None or cfg.alpha <= 0.0:
            raise UsageError("robin model requires --alpha > 0")
    elif cfg.model == "coulomb":
        if cfg.xi == 0.0:
            raise UsageError("--xi must be nonzero")
        if needs_extension and not cfg.dirichlet and cfg.alpha_over_xi is None:
            raise UsageError("coulomb model requires --alpha-over-xi or --dirichlet")
    else:
        if cfg.sigma <= 0.0:
            raise UsageError("--sigma must be positive")
        if needs_extension and not cfg.dirichlet and cfg.beta_over_sigma is None:
            raise UsageError("oscillator model requires --beta-over-sigma or --dirichlet")
    if cfg.command == "limits" and any(v >= 0.0 for v in cfg.values):
        raise UsageError("--values must be negative ratios marching to -infinity")
    if cfg.n_max < 1:
        raise UsageError("--n-max must be >= 1")
    if cfg.points < 2:
        raise UsageError("--points must be >= 2")
    if any(e <= 0.0 for e in cfg.eps_schedule):
        raise UsageError("--eps-schedule entries must be positive")
    if cfg.tolerance <= 0.0:
        raise UsageError("--tolerance must be positive")


def make_model_spec(cfg: RunConfig) -> models.ModelSpec:
    if cfg.model == "robin":
        return models.ModelSpec.robin_free(cfg.alpha, hbar=cfg.hbar, mass=cfg.mass)
    if cfg.model == "coulomb":
        ext = models.DIRICHLET if cfg.dirichlet else cfg.alpha_over_xi
        return models.ModelSpec.coulomb(ext, xi=cfg.xi, hbar=cfg.hbar, mass=cfg.mass)
    ext = models.DIRICHLET if cfg.dirichlet else cfg.beta_over_sigma
    return models.ModelSpec.oscillator(ext, sigma=cfg.sigma, hbar=cfg.hbar, mass=cfg.mass)


def _thread_count() -> int:
    raw = os.environ.get("VIRIAL_ANOMALY_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise UsageError(f"VIRIAL_ANOMALY_THREADS={raw!r} is not an integer") from exc
    if n < 1:
        raise UsageError("VIRIAL_ANOMALY_THREADS must be >= 1")
    return n


def _pool_map(fn, items):
    n = _thread_count()
    items = list(items)
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))  # ordered collection: deterministic


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _solve_states(cfg: RunConfig, spec: models.ModelSpec) -> list[models.EigenState]:
    if spec.kind is models.ModelKind.ROBIN_FREE:
        return [models.robin_free_eigenstate(spec)]
    if spec.kind is models.ModelKind.COULOMB_POINT:
        return models.solve_coulomb_eigenvalues(spec, cfg.n_max)
    return models.solve_oscillator_eigenvalues(spec, cfg.n_max)


def cmd_spectrum(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    spec = make_model_spec(cfg)
    status = EXIT_OK
    rows: list[dict] = []
    if spec.kind is models.ModelKind.ROBIN_FREE:
        branches = [0]
    else:
        branches = list(range(cfg.n_max))

    def solve_one(n: int) -> dict:
        try:
            if spec.kind is models.ModelKind.ROBIN_FREE:
                st = models.robin_free_eigenstate(spec)
            elif spec.kind is models.ModelKind.COULOMB_POINT:
                st = models.solve_coulomb_branch(spec, n)
                if st is None:
                    return {}
            else:
                st = models.solve_oscillator_branch(spec, n)
        except (models.ModelError, specfun.SpecFunError, quad.QuadratureError) as exc:
            return {"branch": n, "spectral_param": "", "energy": "",
                    "norm_const": "", "error": str(exc)}
        return {"branch": st.branch, "spectral_param": st.spectral_param,
                "energy": st.energy, "norm_const": st.norm_const, "error": ""}

    # branch solves are independent; fan out and collect in order
    for row in _pool_map(solve_one, branches):
        if not row:
            continue
        if row["error"]:
            status = EXIT_NUMERICAL
        rows.append(row)
    meta = _base_meta(cfg)
    return meta, rows, status


def cmd_verify(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    spec = make_model_spec(cfg)
    states = _solve_states(cfg, spec)
    meta = _base_meta(cfg)
    rows: list[dict] = []
    status = EXIT_OK
    if spec.kind is models.ModelKind.COULOMB_POINT:
        studies = []
        for st in states:
            study = virial.verify(st, eps_schedule=cfg.eps_schedule)
            studies.append((st, study))
            for e, a, p, c in zip(study.epsilons, study.anomaly_eps,
                                  study.potential_eps, study.combination):
                rows.append({"branch": st.branch, "eps": e, "anomaly_eps": a,
                             "potential_eps": p, "combination": c,
                             "target": study.target,
                             "extrapolated": study.extrapolated})
            breach = abs(study.extrapolated - study.target) > cfg.tolerance * max(
                1.0, abs(study.target))
            if breach:
                status = EXIT_TOLERANCE
                print(f"tolerance breach: branch {st.branch} extrapolated "
                      f"{study.extrapolated!r} vs target {study.target!r}",
                      file=sys.stderr)
        meta["targets"] = [s.target for _, s in studies]
        meta["extrapolated"] = [s.extrapolated for _, s in studies]
        return meta, rows, status
    method_map = {"closed": (virial.Method.CLOSED_FORM,),
                  "quadrature": (virial.Method.QUADRATURE,),
                  "both": (virial.Method.CLOSED_FORM, virial.Method.QUADRATURE)}
    for st in states:
        for method in method_map[cfg.method]:
            rep = virial.verify(st, method=method)
            rows.append({"branch": st.branch, "method": method.value,
                         "kinetic": rep.kinetic, "potential": rep.potential,
                         "anomaly": rep.anomaly, "energy": rep.energy,
                         "residual": rep.residual})
            if abs(rep.residual) > cfg.tolerance:
                status = EXIT_TOLERANCE
                print(f"tolerance breach: branch {st.branch} ({method.value}) "
                      f"residual {rep.residual!r}", file=sys.stderr)
    return meta, rows, status


def _figure_poles(model: str, lo: float, hi: float) -> list[float]:
    """Singular abscissae of the eigenvalue function within [lo, hi]."""
    if model == "coulomb":
        ps = [0.0] + [float(n) for n in range(1, max(1, math.floor(hi) + 1))]
    else:
        ps = [0.75 + n for n in range(0, max(0, math.floor(hi - 0.75) + 1))]
    return [p for p in ps if lo <= p <= hi]


def cmd_figure(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    fn = models.f_coulomb if cfg.model == "coulomb" else models.f_harmonic
    lo, hi = cfg.fig_range
    poles = _figure_poles(cfg.model, lo, hi)
    seps = [p for p in poles if lo < p < hi]
    pad = 1e-9 * max(1.0, abs(lo), abs(hi))
    xs = []
    step = (hi - lo) / (cfg.points - 1)
    for i in range(cfg.points):
        x = lo + i * step
        if all(abs(x - p) > pad for p in poles):
            xs.append(x)

    def sample(x: float) -> dict:
        series = sum(1 for p in seps if p < x)
        return {"series": series, "x": x, "value": fn(x)}

    rows = _pool_map(sample, xs)
    meta = _base_meta(cfg)
    meta["poles"] = seps
    meta["series_count"] = len(seps) + 1
    return meta, rows, EXIT_OK


def cmd_limits(cfg: RunConfig) -> tuple[dict, list[dict], int]:
    status = EXIT_OK
    dirichlet_value = 1.0 if cfg.model == "coulomb" else 0.75

    def solve_one(ratio: float) -> dict:
        try:
            if cfg.model == "coulomb":
                spec = models.ModelSpec.coulomb(ratio, xi=cfg.xi,
                                                hbar=cfg.hbar, mass=cfg.mass)
                st = models.solve_coulomb_eigenvalues(spec, 1)[0]
            else:
                spec = models.ModelSpec.oscillator(ratio, sigma=cfg.sigma,
                                                   hbar=cfg.hbar, mass=cfg.mass)
                st = models.solve_oscillator_eigenvalues(spec, 1)[0]
        except (models.ModelError, specfun.SpecFunError, IndexError,
                quad.QuadratureError) as exc:
            return {"extension_ratio": ratio, "spectral_param": "",
                    "dirichlet_value": dirichlet_value, "deviation": "",
                    "error": str(exc)}
        return {"extension_ratio": ratio, "spectral_param": st.spectral_param,
                "dirichlet_value": dirichlet_value,
                "deviation": abs(st.spectral_param - dirichlet_value), "error": ""}

    rows = _pool_map(solve_one, cfg.values)
    if any(r["error"] for r in rows):
        status = EXIT_NUMERICAL
    meta = _base_meta(cfg)
    return meta, rows, status


def _base_meta(cfg: RunConfig) -> dict:
    meta = {"command": cfg.command, "model": cfg.model,
            "hbar": cfg.hbar, "mass": cfg.mass}
    if cfg.model == "robin":
        meta["alpha"] = cfg.alpha
    elif cfg.model == "coulomb":
        meta["xi"] = cfg.xi
        meta["extension"] = "dirichlet" if cfg.dirichlet else cfg.alpha_over_xi
    else:
        meta["sigma"] = cfg.sigma
        meta["extension"] = "dirichlet" if cfg.dirichlet else cfg.beta_over_sigma
    return meta


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0].keys())
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt_cell(row[k]) for k in header])
    return buf.getvalue()


def render_json(meta: dict, rows: list[dict]) -> str:
    return json.dumps({"meta": meta, "rows": rows}, indent=2) + "\n"


def emit(cfg: RunConfig, meta: dict, rows: list[dict]) -> None:
    text = render_csv(rows) if cfg.output_format == "csv" else render_json(meta, rows)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


_COMMANDS = {"spectrum": cmd_spectrum, "verify": cmd_verify,
             "figure": cmd_figure, "limits": cmd_limits}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = config_from_args(args)
        meta, rows, status = _COMMANDS[cfg.command](cfg)
        emit(cfg, meta, rows)
        return status
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (models.ModelError, specfun.SpecFunError, quad.QuadratureError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
