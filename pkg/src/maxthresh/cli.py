"""Command line interface: test | simulate | boundary | calibrate.

All outputs are CSV with 17-significant-digit floats (lossless for 64-bit
floating point). Every run is a pure function of (inputs, flags, seed);
repeated invocations produce byte-identical CSV for any --workers value.
A run manifest (command, resolved config, seed, version, timestamp) is
written to `<out>.manifest.txt` when --out is given, otherwise to stderr,
never into the CSV stream.

Flag values resolve with precedence: command line > MAXTHRESH_* environment
variable > config file > built-in default. Exit codes: 0 success, 1 usage
or config error, 2 malformed data.
"""

from __future__ import annotations

import argparse
import math
import multiprocessing
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .boundaries import (
    _case_exponent,
    _probe_levels,
    classify_regime,
    detectable_cases,
    detection_boundary,
    restricted_boundary,
)
from .calibration import critical_value, run_test
from .errors import DataError, DomainError, MaxthreshError
from .simulation import (
    DEFAULT_SEED,
    PRESET_CELLS,
    ScenarioConfig,
    sample_mhats,
    upper_quantile,
)
from .stats import SampleMatrix, standardize_columns

_ENV_PREFIX = "MAXTHRESH_"
_GAMMA_NAMES = {"hc": 0, "l1": 1, "l2": 2}
_GAMMA_TOKENS = {0: "hc", 1: "l1", 2: "l2"}
_PRESET_RHOS = (0.3, 0.5)
_PRESET_BETAS = (0.6, 0.7, 0.8)
_PRESET_RS = (0.1, 0.3, 0.5, 0.6, 0.8, 0.9, 1.1, 1.2)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; the contract here is 1.
    def error(self, message: str):  # noqa: D102
        raise _UsageError(message)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except MaxthreshError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def _build_parser() -> _Parser:
    parser = _Parser(prog="maxthresh", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser(
        "test", help="run the thresholding tests on a CSV data file"
    )
    p_test.add_argument("data", help="n x p numeric CSV (headerless or single header)")
    p_test.add_argument("--gamma", choices=[*_GAMMA_NAMES, "all"], default=None)
    p_test.add_argument("--alpha", type=float, default=None)
    p_test.add_argument("--eta", type=float, default=None)
    p_test.add_argument("--standardize", action="store_true", default=None)
    p_test.add_argument("--out", default=None)
    p_test.set_defaults(func=_cmd_test)

    p_sim = sub.add_parser("simulate", help="Monte Carlo size/power table")
    p_sim.add_argument("--preset", choices=sorted(PRESET_CELLS), default=None)
    p_sim.add_argument("--config", default=None, help="flat key=value scenario file")
    p_sim.add_argument("--rho", default=None, help="comma-separated restriction")
    p_sim.add_argument("--beta", default=None, help="comma-separated restriction")
    p_sim.add_argument("--r", default=None, help="comma-separated restriction")
    p_sim.add_argument("--alpha", type=float, default=None)
    p_sim.add_argument("--eta", type=float, default=None)
    p_sim.add_argument("--reps", type=int, default=None)
    p_sim.add_argument("--null-reps", dest="null_reps", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--workers", type=int, default=None)
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=_cmd_simulate)

    p_bnd = sub.add_parser("boundary", help="phase-diagram table over (beta, r)")
    p_bnd.add_argument("--beta-grid", dest="beta_grid", default=None, help="LO:HI:COUNT")
    p_bnd.add_argument("--r-grid", dest="r_grid", default=None, help="LO:HI:COUNT")
    p_bnd.add_argument("--theta", type=float, default=None)
    p_bnd.add_argument("--out", default=None)
    p_bnd.set_defaults(func=_cmd_boundary)

    p_cal = sub.add_parser("calibrate", help="Gumbel vs MC-adjusted critical values")
    p_cal.add_argument("--preset", choices=sorted(PRESET_CELLS), default=None)
    p_cal.add_argument("--config", default=None)
    p_cal.add_argument("--gamma", choices=[*_GAMMA_NAMES, "all"], default=None)
    p_cal.add_argument("--rho", default=None, help="comma-separated restriction")
    p_cal.add_argument("--alpha", type=float, default=None)
    p_cal.add_argument("--eta", type=float, default=None)
    p_cal.add_argument("--null-reps", dest="null_reps", type=int, default=None)
    p_cal.add_argument("--seed", type=int, default=None)
    p_cal.add_argument("--workers", type=int, default=None)
    p_cal.add_argument("--out", default=None)
    p_cal.set_defaults(func=_cmd_calibrate)
    return parser


# ---------------------------------------------------------------- commands


def _cmd_test(args: argparse.Namespace) -> int:
    gamma = _resolve(args, "gamma", str, "all")
    alpha = _resolve(args, "alpha", float, 0.05)
    eta = _resolve(args, "eta", float, 0.05)
    standardize = _resolve(args, "standardize", _parse_bool, False)
    out = _resolve(args, "out", str, None)

    matrix = _read_data_csv(args.data)
    if standardize:
        matrix = standardize_columns(matrix)
    gammas = [0, 1, 2] if gamma == "all" else [_GAMMA_NAMES[gamma]]
    lines = ["gamma,m_hat,argmax_s,critical_value,p_value,reject"]
    for g in gammas:
        report = run_test(matrix, g, alpha=alpha, eta=eta)
        lines.append(
            ",".join(
                [
                    _GAMMA_TOKENS[g],
                    _fmt(report.m_hat),
                    _fmt(report.argmax_s),
                    _fmt(report.critical_value),
                    _fmt(report.p_value),
                    "true" if report.reject else "false",
                ]
            )
        )
    _emit(lines, out, "test", {
        "data": args.data, "gamma": gamma, "alpha": alpha, "eta": eta,
        "standardize": standardize,
    }, seed=None)
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    file_cfg = _load_config(_resolve(args, "config", str, None))
    alpha = _resolve(args, "alpha", float, 0.05, file_cfg)
    eta = _resolve(args, "eta", float, 0.05, file_cfg)
    reps = _resolve(args, "reps", int, 2000, file_cfg)
    seed = _resolve(args, "seed", int, DEFAULT_SEED, file_cfg)
    null_reps = _resolve(args, "null_reps", int, max(1000, reps), file_cfg)
    workers = _resolve(args, "workers", int, 1)
    out = _resolve(args, "out", str, None)
    preset = _resolve(args, "preset", str, None)

    if file_cfg is not None and preset is None:
        scenarios = [_config_scenario(file_cfg, alpha, eta, reps, seed)]
    elif preset is not None:
        rhos = _restrict(args, "rho", _PRESET_RHOS, file_cfg)
        betas = _restrict(args, "beta", _PRESET_BETAS, file_cfg)
        rs = _restrict(args, "r", _PRESET_RS, file_cfg)
        scenarios = [
            ScenarioConfig(
                p=PRESET_CELLS[preset][0], n=PRESET_CELLS[preset][1],
                rho=rho, beta=beta, r=r, alpha=alpha, eta=eta, reps=reps,
                master_seed=seed,
                scenario_id=f"{preset}-rho{rho}-beta{beta}-r{r}",
            )
            for rho in rhos for beta in betas for r in rs
        ]
    else:
        raise _UsageError("simulate needs --preset or --config")

    # One calibration pass per unique (p, n, rho) cell covers all gammas;
    # size rows (r = 0) are emitted once per cell, deduplicated over beta.
    cal_keys: list[tuple[int, int, float]] = []
    size_cfgs: list[ScenarioConfig] = []
    for sc in scenarios:
        key = (sc.p, sc.n, sc.rho)
        if key not in cal_keys:
            cal_keys.append(key)
            size_cfgs.append(
                ScenarioConfig(
                    p=sc.p, n=sc.n, rho=sc.rho, beta=sc.beta, r=0.0,
                    alpha=alpha, eta=eta, reps=reps, master_seed=seed,
                    scenario_id=_size_id(sc, preset),
                )
            )

    cal_tasks = [
        (ScenarioConfig(p=p, n=n, rho=rho, beta=0.6, r=0.0, alpha=alpha,
                        eta=eta, reps=reps, master_seed=seed,
                        scenario_id=_cal_id(p, n, rho, preset)), null_reps)
        for (p, n, rho) in cal_keys
    ]
    quantiles = dict(zip(cal_keys, _run_pool(_calibration_task, cal_tasks, workers)))

    rate_tasks = [(sc, quantiles[(sc.p, sc.n, sc.rho)]) for sc in size_cfgs + scenarios]
    results = _run_pool(_rates_task, rate_tasks, workers)

    lines = [
        "scenario_id,p,n,rho,beta,r,test,alpha,calibration,rejection_rate,mc_se,reps,seed"
    ]
    for sc, rows in zip(size_cfgs + scenarios, results):
        for gamma, calibration, rate in rows:
            se = math.sqrt(rate * (1.0 - rate) / sc.reps)
            lines.append(",".join([
                sc.scenario_id, str(sc.p), str(sc.n), _fmt(sc.rho), _fmt(sc.beta),
                _fmt(sc.r), _GAMMA_TOKENS[gamma], _fmt(sc.alpha), calibration,
                _fmt(rate), _fmt(se), str(sc.reps), str(sc.master_seed),
            ]))
    _emit(lines, out, "simulate", {
        "preset": preset, "config": args.config, "alpha": alpha, "eta": eta,
        "reps": reps, "null_reps": null_reps, "workers": workers,
        "scenarios": len(scenarios),
    }, seed=seed)
    return EXIT_OK


def _cmd_boundary(args: argparse.Namespace) -> int:
    beta_grid = _parse_grid(_resolve(args, "beta_grid", str, "0.55:0.95:9"))
    r_grid = _parse_grid(_resolve(args, "r_grid", str, "0.05:1.2:24"))
    theta = _resolve(args, "theta", float, None)
    out = _resolve(args, "out", str, None)

    lines = ["beta,r,rho_star,rho_star_theta,regime,best_s,case"]
    for beta in beta_grid:
        rho_star = detection_boundary(beta)
        rho_theta = "" if theta is None else _fmt(restricted_boundary(beta, theta))
        for r in r_grid:
            regime = classify_regime(r, beta)
            best_s, case = _best_level(r, beta) if regime.detectable else ("", "")
            lines.append(",".join([
                _fmt(beta), _fmt(r), _fmt(rho_star), rho_theta,
                regime.power_order, best_s, case,
            ]))
    _emit(lines, out, "boundary", {
        "beta_grid": args.beta_grid, "r_grid": args.r_grid, "theta": theta,
    }, seed=None)
    return EXIT_OK


def _cmd_calibrate(args: argparse.Namespace) -> int:
    file_cfg = _load_config(_resolve(args, "config", str, None))
    gamma = _resolve(args, "gamma", str, "all")
    alpha = _resolve(args, "alpha", float, 0.05, file_cfg)
    eta = _resolve(args, "eta", float, 0.05, file_cfg)
    null_reps = _resolve(args, "null_reps", int, 2000, file_cfg)
    seed = _resolve(args, "seed", int, DEFAULT_SEED, file_cfg)
    workers = _resolve(args, "workers", int, 1)
    out = _resolve(args, "out", str, None)
    preset = _resolve(args, "preset", str, None)

    if null_reps < 1000:
        raise _UsageError(f"null_reps must be at least 1000, got {null_reps}")

    if file_cfg is not None and preset is None:
        base = _config_scenario(file_cfg, alpha, eta, null_reps, seed)
        cells = [(base.p, base.n, base.rho)]
    elif preset is not None:
        p, n = PRESET_CELLS[preset]
        rhos = _restrict(args, "rho", _PRESET_RHOS, file_cfg)
        cells = [(p, n, rho) for rho in rhos]
    else:
        raise _UsageError("calibrate needs --preset or --config")

    gammas = [0, 1, 2] if gamma == "all" else [_GAMMA_NAMES[gamma]]
    tasks = [
        (ScenarioConfig(p=p, n=n, rho=rho, beta=0.6, r=0.0, alpha=alpha, eta=eta,
                        reps=null_reps, master_seed=seed,
                        scenario_id=_cal_id(p, n, rho, preset)), null_reps)
        for (p, n, rho) in cells
    ]
    quantiles = _run_pool(_calibration_task, tasks, workers)

    lines = ["gamma,p,n,rho,alpha,gumbel_critical,mc_critical,null_reps,seed"]
    for (p, n, rho), qs in zip(cells, quantiles):
        gumbel = critical_value(alpha, p, eta)
        for g in gammas:
            lines.append(",".join([
                _GAMMA_TOKENS[g], str(p), str(n), _fmt(rho), _fmt(alpha),
                _fmt(gumbel), _fmt(qs[g]), str(null_reps), str(seed),
            ]))
    _emit(lines, out, "calibrate", {
        "preset": preset, "config": args.config, "gamma": gamma, "alpha": alpha,
        "eta": eta, "null_reps": null_reps, "workers": workers,
    }, seed=seed)
    return EXIT_OK


# ------------------------------------------------------------ worker tasks


def _calibration_task(task: tuple[ScenarioConfig, int]) -> dict[int, float]:
    config, null_reps = task
    mhats = sample_mhats(config, null=True, reps=null_reps, stream="calibration")
    return {g: upper_quantile(mhats[:, g], config.alpha) for g in (0, 1, 2)}


def _rates_task(
    task: tuple[ScenarioConfig, dict[int, float]]
) -> list[tuple[int, str, float]]:
    config, quantiles = task
    mhats = sample_mhats(config, null=config.r == 0.0, stream="noise")
    gumbel = critical_value(config.alpha, config.p, config.eta)
    rows = []
    for gamma in (0, 1, 2):
        for calibration, threshold in (
            ("gumbel", gumbel),
            ("mc_adjusted", quantiles[gamma]),
        ):
            rows.append(
                (gamma, calibration, float(np.mean(mhats[:, gamma] > threshold)))
            )
    return rows


def _run_pool(fn, tasks, workers: int):
    if workers is None or workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with multiprocessing.get_context().Pool(min(workers, len(tasks))) as pool:
        return pool.map(fn, tasks)


# ----------------------------------------------------------------- helpers


def _resolve(args, name: str, cast, default, file_cfg: dict | None = None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    env = os.environ.get(_ENV_PREFIX + name.upper())
    if env is not None:
        try:
            return cast(env)
        except ValueError as exc:
            raise _UsageError(f"bad {_ENV_PREFIX}{name.upper()}={env!r}: {exc}")
    if file_cfg and name in file_cfg:
        try:
            return cast(file_cfg[name])
        except ValueError as exc:
            raise _UsageError(f"bad config value {name}={file_cfg[name]!r}: {exc}")
    return default


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _load_config(path: str | None) -> dict[str, str] | None:
    if path is None:
        return None
    known = {
        "p", "n", "rho", "beta", "r", "alpha", "eta", "reps", "null_reps",
        "seed", "scenario_id",
    }
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise _UsageError(f"cannot read config file {path}: {exc}")
    cfg: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in known:
            raise _UsageError(f"{path}:{lineno}: unknown key {key!r}")
        cfg[key] = value.strip()
    return cfg


def _config_scenario(
    cfg: dict[str, str], alpha: float, eta: float, reps: int, seed: int
) -> ScenarioConfig:
    for required in ("p", "n", "rho"):
        if required not in cfg:
            raise _UsageError(f"config file is missing key {required!r}")
    try:
        return ScenarioConfig(
            p=int(cfg["p"]), n=int(cfg["n"]), rho=float(cfg["rho"]),
            beta=float(cfg.get("beta", 0.6)), r=float(cfg.get("r", 0.0)),
            alpha=alpha, eta=eta, reps=reps, master_seed=seed,
            scenario_id=cfg.get("scenario_id", "config"),
        )
    except ValueError as exc:
        raise _UsageError(f"bad config: {exc}")


def _restrict(args, name: str, full: tuple, file_cfg: dict | None) -> list[float]:
    raw = _resolve(args, name, str, None, file_cfg)
    if raw is None:
        return list(full)
    values = []
    for token in str(raw).split(","):
        token = token.strip()
        if not token:
            continue
        try:
            values.append(float(token))
        except ValueError:
            raise _UsageError(f"bad --{name} value {token!r}")
    if not values:
        raise _UsageError(f"--{name} restriction is empty")
    return values


def _parse_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise _UsageError(f"grid must be LO:HI:COUNT, got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise _UsageError(f"grid must be LO:HI:COUNT, got {spec!r}")
    if count < 1 or not lo <= hi:
        raise _UsageError(f"bad grid {spec!r}")
    return np.linspace(lo, hi, count)


def _best_level(r: float, beta: float) -> tuple[str, str]:
    """Most favorable detectable level: max case exponent over probe points."""
    candidates = [s for s in _probe_levels(r, beta) if s != r]
    best = None
    for s in sorted(candidates):
        decision = detectable_cases(s, r, beta)
        if not decision.detectable:
            continue
        exponent = _case_exponent(s, r, beta)
        if best is None or exponent > best[2]:
            best = (s, decision.case, exponent)
    if best is None:
        return "", ""
    return _fmt(best[0]), str(best[1])


def _size_id(sc: ScenarioConfig, preset: str | None) -> str:
    stem = preset if preset is not None else sc.scenario_id
    return f"{stem}-rho{sc.rho}-size"


def _cal_id(p: int, n: int, rho: float, preset: str | None) -> str:
    stem = preset if preset is not None else f"p{p}n{n}"
    return f"{stem}-rho{rho}-calibration"


def _read_data_csv(path: str) -> SampleMatrix:
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}")
    rows: list[list[str]] = [
        line.split(",") for line in text.splitlines() if line.strip()
    ]
    if not rows:
        raise DataError(f"{path} is empty")
    start = 0
    if not _all_numeric(rows[0]):
        start = 1  # single header row
    data_rows = rows[start:]
    if len(data_rows) < 2:
        raise DataError("n must be >= 2")
    width = len(data_rows[0])
    parsed = []
    for i, row in enumerate(data_rows, start + 1):
        if len(row) != width:
            raise DataError(f"{path}:{i}: ragged row (expected {width} cells)")
        try:
            parsed.append([float(cell) for cell in row])
        except ValueError:
            raise DataError(f"{path}:{i}: non-numeric cell")
    return SampleMatrix(np.asarray(parsed, dtype=np.float64))


def _all_numeric(cells: list[str]) -> bool:
    try:
        for cell in cells:
            float(cell)
    except ValueError:
        return False
    return True


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _emit(
    lines: list[str], out: str | None, command: str, config: dict, seed: int | None
) -> None:
    payload = "\n".join(lines) + "\n"
    manifest = _manifest_text(command, config, seed)
    if out is None:
        sys.stdout.write(payload)
        sys.stderr.write(manifest)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
        with open(out + ".manifest.txt", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(manifest)


def _manifest_text(command: str, config: dict, seed: int | None) -> str:
    lines = [f"command={command}"]
    for key in sorted(config):
        lines.append(f"{key}={config[key]}")
    if seed is not None:
        lines.append(f"master_seed={seed}")
    lines.append(f"version={__version__}")
    lines.append(f"timestamp={datetime.now(timezone.utc).isoformat()}")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
