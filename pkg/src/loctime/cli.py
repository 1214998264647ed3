"""Experiment orchestration and persistence.

Subcommands ``rate``, ``fractions``, ``identity`` and ``sweep`` run seeded
path ensembles, compare estimators to their limit objects, and persist
CSV/JSON artifacts.  A config is a pure description: the same config (in a
file, on the command line, serial or parallel) produces byte-identical
outputs.  Path i uses seed ``base_seed + i``; results are merged in seed
order; CSV floats are written in shortest round-trip form.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path as FsPath

import numpy as np

from . import analysis, estimators, oracle, paths
from .estimators import EstimatorKind, FunctionSpec
from .paths import SigmaSpec

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CHECK_FAILED = 2
EXIT_IO = 3

RATIO_KINDS = ("I3", "I4", "I5", "SmoothedQuarter")
LOCAL_TIME_FLOOR = 0.1  # paths with L(T) below this are excluded from ratios

# acceptance bands used by --check
RATE_SLOPE_BAND = (0.15, 0.60)
RATE_R2_MIN = 0.90
FRACTION_BANDS = {"I3": 0.5, "I4": 0.25, "I5": 0.25, "SmoothedQuarter": 0.25}
IDENTITY_TOL = 1e-9
SWEEP_TOL = 0.05


class ValidationError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    horizon_T: float = 1.0
    dt_exponent: int = 20
    eps_exponents: tuple = (4, 5, 6, 7, 8, 9, 10, 11)
    n_paths: int = 64
    base_seed: int = 20070420
    level_y: float = 0.0
    generator: str = paths.BROWNIAN
    sigma: SigmaSpec | None = None
    estimators: tuple = (EstimatorKind.J,)
    oracle: oracle.OracleKind = oracle.OracleKind.TANAKA
    oracle_h: float = 2.0**-9
    output_dir: str = "out"
    t_grid_stride: int | None = None
    threads: int = 1
    allow_coarse_dt: bool = False
    # sweep-only knobs
    function: FunctionSpec = field(
        default_factory=lambda: FunctionSpec("gaussian_bump", 0.0, 0.5)
    )
    y_min: float = -4.0
    y_max: float = 4.0
    y_step: float = 2.0**-4

    @property
    def dt(self) -> float:
        return 2.0**-self.dt_exponent

    @property
    def eps_values(self) -> list:
        return [2.0**-k for k in self.eps_exponents]

    @property
    def stride(self) -> int:
        if self.t_grid_stride is not None:
            return self.t_grid_stride
        return max(1, round(self.horizon_T * 2.0**-10 / self.dt))

    def validate(self) -> None:
        if self.n_paths < 1:
            raise ValidationError("n_paths must be >= 1")
        if self.horizon_T <= 0:
            raise ValidationError("horizon_T must be positive")
        if not self.eps_exponents:
            raise ValidationError("at least one eps exponent is required")
        for k in self.eps_exponents:
            if k > self.dt_exponent:
                raise ValidationError(
                    f"eps=2^-{k} is finer than dt=2^-{self.dt_exponent}"
                )
        if not self.allow_coarse_dt:
            if self.dt_exponent < max(self.eps_exponents) + 8:
                raise ValidationError(
                    "dt must be at most min(eps)/256; pass --allow-coarse-dt "
                    "to override"
                )
        if self.generator == paths.SIGMA_MARTINGALE and self.sigma is None:
            raise ValidationError("sigma generator requires a SigmaSpec")
        if self.generator not in (paths.BROWNIAN, paths.SIGMA_MARTINGALE):
            raise ValidationError(f"unknown generator: {self.generator!r}")

    def canonical_items(self) -> list:
        skip = {"output_dir", "threads"}
        items = []
        for f in dataclasses.fields(self):
            if f.name in skip:
                continue
            value = getattr(self, f.name)
            if isinstance(value, SigmaSpec):
                value = (
                    f"{value.formula},{value.c0!r},{value.c1!r},"
                    f"{value.frequency!r}"
                )
            elif isinstance(value, FunctionSpec):
                value = f"{value.kind},{value.center!r},{value.width!r}"
            elif isinstance(value, EstimatorKind):
                value = value.value
            elif isinstance(value, oracle.OracleKind):
                value = value.value
            elif isinstance(value, (tuple, list)):
                value = ",".join(
                    v.value if isinstance(v, EstimatorKind) else repr(v)
                    for v in value
                )
            items.append((f.name, str(value)))
        return items

    def config_hash(self) -> str:
        blob = "\n".join(f"{k} = {v}" for k, v in self.canonical_items())
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def t_grid_for(config: ExperimentConfig) -> np.ndarray:
    n_report = round(config.horizon_T / config.dt) // config.stride
    return np.arange(n_report + 1) * (config.stride * config.dt)


def generate_path(config: ExperimentConfig, seed: int) -> paths.Path:
    """One ensemble member, with forward margin for the widest eps."""
    margin = round(max(config.eps_values) / config.dt)
    n_steps = round(config.horizon_T / config.dt) + margin
    path = paths.generate_brownian(
        config.dt, n_steps, seed, horizon=config.horizon_T
    )
    if config.generator == paths.SIGMA_MARTINGALE:
        path = paths.generate_sigma_martingale(path, config.sigma)
    if config.level_y != 0.0:
        path = paths.shift_level(path, config.level_y)
    return path


def limit_curve(
    kind: EstimatorKind, path: paths.Path, t_grid, local_time
) -> estimators.Curve:
    """The theoretical limit object an estimator is measured against."""
    if kind is EstimatorKind.J:
        return local_time
    if kind is EstimatorKind.I1:
        return oracle.ito_indicator_integral(path, t_grid)
    if kind is EstimatorKind.I2:
        k = estimators._grid_indices(path, t_grid)
        xp = np.maximum(path.values[k], 0.0)
        return estimators.Curve(
            local_time.t_values, xp + 0.5 * local_time.values, 0.0, "I2_limit"
        )
    if kind is EstimatorKind.I3:
        return estimators.Curve(
            local_time.t_values, 0.5 * local_time.values, 0.0, "half_local_time"
        )
    if kind in (
        EstimatorKind.I4,
        EstimatorKind.I5,
        EstimatorKind.SMOOTHED_QUARTER,
    ):
        return estimators.Curve(
            local_time.t_values, 0.25 * local_time.values, 0.0, "quarter_local_time"
        )
    if kind is EstimatorKind.R:
        return estimators.Curve(
            local_time.t_values, np.zeros_like(local_time.values), 0.0, "zero"
        )
    if kind is EstimatorKind.QUAD_VAR:
        t = np.asarray(t_grid, float)
        if path.kind == paths.SIGMA_MARTINGALE:
            k = estimators._grid_indices(path, t_grid)
            sigma = path.sigma.values_on(path.times[: int(k.max(initial=0))])
            values = estimators._prefix(sigma * sigma)[k] * path.dt
            return estimators.Curve(t, values.astype(float), 0.0, "int_sigma_sq")
        return estimators.Curve(t, t.copy(), 0.0, "identity_time")
    raise ValidationError(f"no limit object for {kind}")


def compute_estimator(
    kind: EstimatorKind, path: paths.Path, eps: float, t_grid
) -> estimators.Curve:
    if kind is EstimatorKind.J:
        return estimators.j_epsilon(path, eps, t_grid)
    if kind in (
        EstimatorKind.I1,
        EstimatorKind.I2,
        EstimatorKind.I3,
        EstimatorKind.I4,
        EstimatorKind.I5,
    ):
        return estimators.i_family(kind, path, eps, t_grid)
    if kind is EstimatorKind.R:
        return estimators.remainder(path, eps, t_grid)
    if kind is EstimatorKind.SMOOTHED_QUARTER:
        return estimators.smoothed_quarter(path, eps, t_grid)
    if kind is EstimatorKind.QUAD_VAR:
        return estimators.quadratic_variation_reg(path, eps, t_grid)
    raise ValidationError(f"unknown estimator kind: {kind}")


def reference_local_time(config: ExperimentConfig, path, t_grid):
    if config.oracle is oracle.OracleKind.TANAKA:
        return oracle.tanaka_local_time(path, t_grid)
    if config.oracle is oracle.OracleKind.UPCROSSING:
        return oracle.upcrossing_local_time(path, config.oracle_h, t_grid)
    return oracle.occupation_local_time(path, config.oracle_h, t_grid)


# ---------------------------------------------------------------------------
# per-path workers (top level so process pools can pickle them)


def _rate_worker(args):
    config, seed = args
    path = generate_path(config, seed)
    t_grid = t_grid_for(config)
    local_time = reference_local_time(config, path, t_grid)
    out = {}
    for kind in config.estimators:
        reference = limit_curve(kind, path, t_grid, local_time)
        for eps in config.eps_values:
            estimate = compute_estimator(kind, path, eps, t_grid)
            out[(kind.value, eps)] = analysis.sup_error(estimate, reference)
    return out


def _fractions_worker(args):
    config, seed = args
    path = generate_path(config, seed)
    t_grid = [config.horizon_T]
    local_time = oracle.tanaka_local_time(path, t_grid).values[0]
    out = {"L": local_time}
    for eps in config.eps_values:
        i3 = estimators.i_family(EstimatorKind.I3, path, eps, t_grid).values[0]
        i4 = estimators.i_family(EstimatorKind.I4, path, eps, t_grid).values[0]
        i5 = estimators.i_family(EstimatorKind.I5, path, eps, t_grid).values[0]
        sq = estimators.smoothed_quarter(path, eps, t_grid).values[0]
        out[eps] = {"I3": i3, "I4": i4, "I5": i5, "SmoothedQuarter": sq}
    return out


def _identity_worker(args):
    config, seed = args
    path = generate_path(config, seed)
    t_grid = t_grid_for(config)
    worst_decomp = 0.0
    worst_residual = 0.0
    worst_untrunc = 0.0
    for eps in config.eps_values:
        j = estimators.j_epsilon(path, eps, t_grid)
        i1 = estimators.i_family(EstimatorKind.I1, path, eps, t_grid)
        i2 = estimators.i_family(EstimatorKind.I2, path, eps, t_grid)
        scale = np.maximum.reduce(
            [np.abs(j.values), np.abs(i1.values), np.abs(i2.values), np.ones_like(j.values)]
        )
        worst_decomp = max(
            worst_decomp,
            float(np.max(np.abs(j.values - (-i1.values + i2.values)) / scale)),
        )
        r = estimators.remainder(path, eps, t_grid)
        i3 = estimators.i_family(EstimatorKind.I3, path, eps, t_grid)
        i4 = estimators.i_family(EstimatorKind.I4, path, eps, t_grid)
        i5 = estimators.i_family(EstimatorKind.I5, path, eps, t_grid)
        recomposed = i3.values + i4.values + i5.values + r.values
        worst_residual = max(
            worst_residual, float(np.max(np.abs(j.values - recomposed) / scale))
        )
        untrunc = estimators.residual_untruncated(path, eps, t_grid)
        worst_untrunc = max(
            worst_untrunc, float(np.max(np.abs(untrunc.values) / scale))
        )
    return {
        "decomposition": worst_decomp,
        "residual": worst_residual,
        "untruncated_residual": worst_untrunc,
    }


def _sweep_worker(args):
    config, seed = args
    path = generate_path(config, seed)
    n = round((config.y_max - config.y_min) / config.y_step)
    y_grid = config.y_min + np.arange(n + 1) * config.y_step
    eps = min(config.eps_values)
    swept = estimators.level_sweep(
        path, eps, config.horizon_T, config.function, y_grid
    )
    occupied = oracle.occupation_functional(
        path, config.function, [config.horizon_T]
    ).values[0]
    return {"sweep": swept, "occupation": occupied}


def _run_workers(worker, config: ExperimentConfig):
    jobs = [(config, config.base_seed + i) for i in range(config.n_paths)]
    if config.threads > 1:
        with concurrent.futures.ProcessPoolExecutor(
            max_workers=config.threads
        ) as pool:
            return list(pool.map(worker, jobs))
    return [worker(job) for job in jobs]


# ---------------------------------------------------------------------------
# persistence


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: FsPath, header: str, rows, config: ExperimentConfig) -> None:
    lines = [f"# config_hash={config.config_hash()}", header]
    lines.extend(rows)
    path.write_text("\n".join(lines) + "\n")


def _write_summary(outdir: FsPath, config: ExperimentConfig, payload: dict) -> None:
    payload = dict(payload)
    payload["config"] = dict(config.canonical_items())
    payload["config_hash"] = config.config_hash()
    outdir.joinpath("summary.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )


# ---------------------------------------------------------------------------
# experiments


def run_rate_experiment(config: ExperimentConfig, outdir: FsPath) -> dict:
    results = _run_workers(_rate_worker, config)
    error_rows = []
    rate_rows = []
    summary = {"experiment": "rate", "estimators": {}}
    for kind in config.estimators:
        l2_by_eps = []
        for eps in config.eps_values:
            per_path = [res[(kind.value, eps)] for res in results]
            for i, err in enumerate(per_path):
                error_rows.append(
                    f"{kind.value},{_fmt(eps)},{config.base_seed + i},{_fmt(err)}"
                )
            report = analysis.l2_ensemble_error(per_path, kind, eps)
            l2_by_eps.append(report.l2_estimate)
            rate_rows.append(
                f"{kind.value},{_fmt(eps)},{_fmt(report.l2_estimate)},"
                f"{_fmt(report.std_error)}"
            )
        entry = {"l2_errors": l2_by_eps, "eps": config.eps_values}
        if len(config.eps_values) >= 4 and all(e > 0 for e in l2_by_eps):
            fit = analysis.fit_rate(config.eps_values, l2_by_eps)
            entry["slope"] = fit.slope
            entry["intercept"] = fit.intercept
            entry["r_squared"] = fit.r_squared
            entry["slope_in_band"] = (
                RATE_SLOPE_BAND[0] <= fit.slope <= RATE_SLOPE_BAND[1]
                and fit.r_squared >= RATE_R2_MIN
            )
        else:
            entry["rate_fit"] = (
                "refused: needs >= 4 eps values with positive errors, got "
                f"{len(config.eps_values)}"
            )
        summary["estimators"][kind.value] = entry
    _write_csv(
        outdir / "errors.csv", "estimator,eps,seed,sup_error", error_rows, config
    )
    _write_csv(
        outdir / "rate.csv", "estimator,eps,l2_error,std_error", rate_rows, config
    )
    checks = [
        entry["slope_in_band"]
        for entry in summary["estimators"].values()
        if "slope_in_band" in entry
    ]
    summary["pass"] = bool(checks) and all(checks)
    _write_summary(outdir, config, summary)
    return summary


def run_fractions_experiment(config: ExperimentConfig, outdir: FsPath) -> dict:
    results = _run_workers(_fractions_worker, config)
    local_times = np.array([res["L"] for res in results])
    keep = local_times >= LOCAL_TIME_FLOOR
    n_used = int(np.sum(keep))
    n_excluded = int(np.sum(~keep))
    rows = []
    summary = {
        "experiment": "fractions",
        "n_used": n_used,
        "n_excluded": n_excluded,
        "ratios": {},
    }
    all_pass = n_used > 0
    for eps in config.eps_values:
        for ratio_kind in RATIO_KINDS:
            values = np.array([res[eps][ratio_kind] for res in results])
            if n_used > 0:
                ratios = values[keep] / local_times[keep]
                mean = float(np.mean(ratios))
                std_error = (
                    float(np.std(ratios, ddof=1)) / np.sqrt(n_used)
                    if n_used > 1
                    else 0.0
                )
            else:
                mean = float("nan")
                std_error = float("nan")
            rows.append(
                f"{config.generator},{_fmt(eps)},{ratio_kind},{_fmt(mean)},"
                f"{_fmt(std_error)},{n_used},{n_excluded}"
            )
            summary["ratios"][f"{ratio_kind}@{_fmt(eps)}"] = mean
            if eps == min(config.eps_values) and n_used > 0:
                band = 0.07 if config.generator == paths.SIGMA_MARTINGALE else 0.05
                if abs(mean - FRACTION_BANDS[ratio_kind]) > band:
                    all_pass = False
    exclusion_ok = n_excluded < 0.25 * config.n_paths
    summary["exclusion_fraction_ok"] = exclusion_ok
    summary["pass"] = all_pass and exclusion_ok
    _write_csv(
        outdir / "fractions.csv",
        "generator,eps,ratio_kind,mean,std_error,n_used,n_excluded",
        rows,
        config,
    )
    _write_summary(outdir, config, summary)
    return summary


def run_identity_check(config: ExperimentConfig, outdir: FsPath) -> dict:
    results = _run_workers(_identity_worker, config)
    summary = {
        "experiment": "identity",
        "max_decomposition_violation": max(r["decomposition"] for r in results),
        "max_residual_violation": max(r["residual"] for r in results),
        "max_untruncated_residual": max(r["untruncated_residual"] for r in results),
    }
    summary["pass"] = (
        summary["max_decomposition_violation"] <= IDENTITY_TOL
        and summary["max_residual_violation"] <= IDENTITY_TOL
        and summary["max_untruncated_residual"] <= IDENTITY_TOL
    )
    _write_summary(outdir, config, summary)
    return summary


def run_sweep_experiment(config: ExperimentConfig, outdir: FsPath) -> dict:
    results = _run_workers(_sweep_worker, config)
    rows = []
    rel_errors = []
    for i, res in enumerate(results):
        rel = abs(res["sweep"] - res["occupation"]) / abs(res["occupation"])
        rel_errors.append(rel)
        rows.append(
            f"{config.base_seed + i},{_fmt(res['sweep'])},"
            f"{_fmt(res['occupation'])},{_fmt(rel)}"
        )
    mean_rel = float(np.mean(rel_errors))
    summary = {
        "experiment": "sweep",
        "mean_relative_error": mean_rel,
        "pass": mean_rel <= SWEEP_TOL,
    }
    _write_csv(
        outdir / "sweep.csv",
        "seed,sweep_value,occupation_value,rel_error",
        rows,
        config,
    )
    _write_summary(outdir, config, summary)
    return summary


# ---------------------------------------------------------------------------
# argument parsing


def _parse_eps_exponents(text: str) -> tuple:
    if ".." in text:
        lo, hi = text.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(part) for part in text.split(","))


def _parse_sigma(text: str) -> SigmaSpec:
    parts = [float(p) for p in text.split(",")]
    if len(parts) == 1:
        return SigmaSpec("constant", parts[0])
    if len(parts) == 3:
        return SigmaSpec("affine_sine", parts[0], parts[1], parts[2])
    raise ValidationError("--sigma expects c0 or c0,c1,freq")


def _parse_function(text: str) -> FunctionSpec:
    kind, center, width = text.split(",")
    return FunctionSpec(kind, float(center), float(width))


def _parse_estimators(text: str) -> tuple:
    return tuple(EstimatorKind(part) for part in text.split(","))


def load_config_file(path: str) -> dict:
    values = {}
    try:
        lines = FsPath(path).read_text().splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read config file: {exc}") from exc
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"malformed config line: {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


_CONFIG_PARSERS = {
    "horizon_T": float,
    "dt_exponent": int,
    "eps_exponents": _parse_eps_exponents,
    "n_paths": int,
    "base_seed": int,
    "level_y": float,
    "generator": str,
    "sigma": _parse_sigma,
    "estimators": _parse_estimators,
    "oracle": oracle.OracleKind,
    "oracle_h": float,
    "output_dir": str,
    "t_grid_stride": int,
    "threads": int,
    "allow_coarse_dt": lambda v: v.lower() in ("1", "true", "yes"),
    "function": _parse_function,
    "y_min": float,
    "y_max": float,
    "y_step": float,
}


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig()
    if args.config:
        for key, raw in load_config_file(args.config).items():
            if key not in _CONFIG_PARSERS:
                raise ValidationError(f"unknown config key: {key!r}")
            setattr(config, key, _CONFIG_PARSERS[key](raw))
    overrides = {
        "horizon_T": args.T,
        "dt_exponent": args.dt_exp,
        "eps_exponents": args.eps_exps,
        "n_paths": args.paths,
        "base_seed": args.seed,
        "level_y": args.level,
        "generator": args.generator,
        "sigma": args.sigma,
        "estimators": args.estimator,
        "oracle": args.oracle,
        "output_dir": args.out,
        "threads": args.threads,
        "function": getattr(args, "function", None),
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)
    if args.allow_coarse_dt:
        config.allow_coarse_dt = True
    config.validate()
    return config


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--T", type=float, help="analysis horizon")
    parser.add_argument("--dt-exp", type=int, help="grid step exponent: dt = 2^-e")
    parser.add_argument(
        "--eps-exps",
        type=_parse_eps_exponents,
        help="eps exponents, e.g. 4..11 or 4,6,8",
    )
    parser.add_argument("--paths", type=int, help="ensemble size")
    parser.add_argument("--seed", type=int, help="base seed (path i uses seed+i)")
    parser.add_argument("--level", type=float, help="level y to estimate at")
    parser.add_argument(
        "--generator", choices=(paths.BROWNIAN, paths.SIGMA_MARTINGALE)
    )
    parser.add_argument(
        "--sigma", type=_parse_sigma, help="sigma parameters c0 or c0,c1,freq"
    )
    parser.add_argument(
        "--estimator", type=_parse_estimators, help="comma list, e.g. J,I3"
    )
    parser.add_argument("--oracle", type=oracle.OracleKind, help="local time oracle")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--threads", type=int)
    parser.add_argument("--allow-coarse-dt", action="store_true")
    parser.add_argument(
        "--check", action="store_true", help="exit 2 if acceptance bands fail"
    )


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loctime",
        description="Monte Carlo lab for Brownian local time approximations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("rate", "L2 sup-error convergence rate vs eps"),
        ("fractions", "fractional local-time limits of I3/I4/I5"),
        ("identity", "exact decomposition identities"),
        ("sweep", "level sweep against the occupation functional"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
        if name == "sweep":
            p.add_argument(
                "--function",
                type=_parse_function,
                help="test function kind,center,width",
            )
    return parser


_RUNNERS = {
    "rate": run_rate_experiment,
    "fractions": run_fractions_experiment,
    "identity": run_identity_check,
    "sweep": run_sweep_experiment,
}


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        config = build_config(args)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    outdir = FsPath(config.output_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        summary = _RUNNERS[args.command](config, outdir)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    status = "pass" if summary.get("pass") else "fail"
    print(f"{args.command}: {status} (artifacts in {outdir})")
    if args.check and not summary.get("pass"):
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
