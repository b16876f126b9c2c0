"""Acceptance harness: ten end-to-end criteria at their stated tolerances.

Each criterion prints one `criterion NN: PASS/FAIL - detail` line (capture
disabled, so the line is visible in any pytest run) and then asserts. The
runtimes quoted in the details are informational; the asserted content is
the statistical or numerical tolerance.
"""

import math
import time

import numpy as np
import pytest
from scipy.stats import binomtest, kstest

from maxthresh.boundaries import delta_gamma0, detection_boundary, exists_detectable_s
from maxthresh.calibration import (
    candidate_grid,
    gumbel_norming,
    maximal_statistic,
    null_moments,
    standardized_over_grid,
)
from maxthresh.cli import EXIT_OK, main
from maxthresh.simulation import (
    ScenarioConfig,
    _noise_array,
    _replication_rng,
    sample_mhats,
    upper_quantile,
)
from maxthresh.stats import MarginalSummary, truncated_moment_oracle

ALPHA = 0.05
CELL = dict(p=500, n=100)


def _report(capsys, number, ok, detail):
    line = f"criterion {number:02d}: {'PASS' if ok else 'FAIL'} - {detail}"
    with capsys.disabled():
        print(flush=True)
        print(line, flush=True)
    assert ok, line


def _summary_from_y(y, n=100):
    y = np.asarray(y, dtype=np.float64)
    xbar = np.sqrt(y / n)
    return MarginalSummary(xbar=xbar, y=y, n=n, p=y.size)


def _calibrated_criticals(config, null_reps):
    mhats = sample_mhats(config, null=True, reps=null_reps, stream="calibration")
    return {g: upper_quantile(mhats[:, g], config.alpha) for g in (0, 1, 2)}


def test_criterion_01_closed_form_null_moments(capsys):
    t0 = time.perf_counter()
    p = 10**6
    logp = math.log(p)
    t_values = [1.0, 2.0, 3.0, 4.0, 5.0]
    t_values += [math.sqrt(2.0 * s * logp) for s in np.linspace(0.05, 0.95, 10)]
    worst = 0.0
    for t in t_values:
        s = t * t / (2.0 * logp)
        nm = null_moments(2, s, p)
        mean_oracle = p * truncated_moment_oracle(2, t)
        var_oracle = p * truncated_moment_oracle(4, t)
        worst = max(
            worst,
            abs(nm.mean - mean_oracle) / mean_oracle,
            abs(nm.sd**2 - var_oracle) / var_oracle,
        )
    ok = worst <= 1e-10
    _report(
        capsys, 1, ok,
        f"gamma=2 mean/variance vs quadrature oracle: max rel err {worst:.2e} "
        f"(tol 1e-10), {time.perf_counter() - t0:.2f}s",
    )


def test_criterion_02_separation_ratio_identities(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260816)
    worst = 0.0
    for _ in range(10**4):
        s = rng.uniform(0.02, 0.95)
        r = s * rng.uniform(1.01, 10.0)
        beta = rng.uniform(0.51, 0.99)
        p = int(rng.integers(10, 10**7))
        d0 = delta_gamma0(0, s, r, beta, p)
        d1 = delta_gamma0(1, s, r, beta, p)
        d2 = delta_gamma0(2, s, r, beta, p)
        ratio = r / s
        worst = max(
            worst,
            abs(d1 / d0 - ratio**0.25) / ratio**0.25,
            abs(d2 / d1 - ratio**0.75) / ratio**0.75,
        )
    ok = worst <= 1e-12
    _report(
        capsys, 2, ok,
        f"ratio identities over 10^4 tuples: max rel err {worst:.2e} "
        f"(tol 1e-12), {time.perf_counter() - t0:.2f}s",
    )


def test_criterion_03_detection_boundary_fidelity(capsys):
    t0 = time.perf_counter()
    point_err = max(
        abs(detection_boundary(0.6) - 0.1),
        abs(detection_boundary(0.75) - 0.25),
        abs(detection_boundary(0.84) - 0.36),
    )
    disagreements = 0
    for i in range(200):
        r = (2 * i + 1) / 320.0
        for j in range(200):
            beta = 0.5 + (2 * j + 1) / 800.0
            if exists_detectable_s(r, beta) != (r > detection_boundary(beta)):
                disagreements += 1
    ok = point_err <= 1e-15 and disagreements == 0
    _report(
        capsys, 3, ok,
        f"pinned points max abs err {point_err:.1e} (tol 1e-15); "
        f"{disagreements} disagreements on 200x200 grid, "
        f"{time.perf_counter() - t0:.2f}s",
    )


def test_criterion_04_grid_attains_dense_maximum(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(404)
    worst = -math.inf
    for i in range(500):
        p = int(rng.integers(50, 2001))
        kind = i % 3
        if kind == 0:
            y = rng.standard_normal(p) ** 2
        elif kind == 1:
            w = _noise_array(p, 100, (0.0, 0.3, 0.5)[(i // 3) % 3], rng)
            xbar = w.mean(axis=0)
            y = 100.0 * xbar**2
        else:
            z = rng.standard_normal(p)
            m = max(1, int(p**0.25))
            z[:m] += rng.uniform(1.0, 4.0)
            y = z**2
        summary = _summary_from_y(y)
        grid = candidate_grid(summary, 0.05)
        dense = np.linspace(grid[0], 0.95, 10001)[1:]
        standardized = standardized_over_grid(summary.y, summary.p, dense)
        for gamma in (0, 1, 2):
            m_hat = maximal_statistic(summary, gamma, 0.05)[0]
            worst = max(worst, float(standardized[gamma].max()) - m_hat)
    ok = worst <= 1e-9
    _report(
        capsys, 4, ok,
        f"500 datasets x 3 gammas: max dense-grid excess {worst:.2e} "
        f"(tol 1e-9), {time.perf_counter() - t0:.1f}s",
    )


def test_criterion_05_adjusted_size(capsys):
    t0 = time.perf_counter()
    bound = 3.0 * math.sqrt(ALPHA * (1.0 - ALPHA) / 10**4)
    sizes = {}
    for rho in (0.3, 0.5):
        config = ScenarioConfig(
            rho=rho, beta=0.6, r=0.0, reps=10**4,
            scenario_id=f"accept5-rho{rho}", **CELL,
        )
        criticals = _calibrated_criticals(config, 10**4)
        fresh = sample_mhats(config, null=True, stream="noise")
        for gamma in (0, 1, 2):
            sizes[(rho, gamma)] = float(np.mean(fresh[:, gamma] > criticals[gamma]))
    ok = all(abs(size - ALPHA) <= bound for size in sizes.values())
    shown = ", ".join(f"rho={k[0]} g{k[1]}:{v:.4f}" for k, v in sizes.items())
    _report(
        capsys, 5, ok,
        f"adjusted sizes {shown} within {ALPHA}+/-{bound:.4f}, "
        f"{time.perf_counter() - t0:.1f}s",
    )


def test_criterion_06_power_ordering(capsys):
    t0 = time.perf_counter()
    ok = True
    parts = []
    for r in (1.1, 1.2):
        config = ScenarioConfig(
            rho=0.3, beta=0.8, r=r, reps=4000,
            scenario_id=f"accept6-r{r}", **CELL,
        )
        criticals = _calibrated_criticals(config, 4000)
        mhats = sample_mhats(config, null=False, stream="noise")
        reject = {g: mhats[:, g] > criticals[g] for g in (0, 1, 2)}
        power = {g: float(np.mean(reject[g])) for g in (0, 1, 2)}
        se = {g: math.sqrt(power[g] * (1.0 - power[g]) / 4000) for g in (0, 1, 2)}
        b = int(np.sum(reject[2] & ~reject[0]))
        c = int(np.sum(reject[0] & ~reject[2]))
        paired_p = binomtest(b, b + c, alternative="greater").pvalue
        ok_r = (
            power[2] >= power[1] - 2.0 * se[1]
            and power[1] >= power[0] - 2.0 * se[0]
            and paired_p < 0.01
        )
        ok = ok and ok_r
        parts.append(
            f"r={r}: hc={power[0]:.3f} l1={power[1]:.3f} l2={power[2]:.3f} "
            f"paired p={paired_p:.1e}"
        )
    _report(
        capsys, 6, ok,
        "; ".join(parts) + f", {time.perf_counter() - t0:.1f}s",
    )


def test_criterion_07_below_boundary_flatness(capsys):
    t0 = time.perf_counter()
    config = ScenarioConfig(
        rho=0.3, beta=0.8, r=0.1, reps=4000, scenario_id="accept7", **CELL
    )
    criticals = _calibrated_criticals(config, 4000)
    mhats = sample_mhats(config, null=False, stream="noise")
    power = {g: float(np.mean(mhats[:, g] > criticals[g])) for g in (0, 1, 2)}
    spread = max(power.values()) - min(power.values())
    ok = all(0.03 <= value <= 0.15 for value in power.values()) and spread <= 0.03
    _report(
        capsys, 7, ok,
        f"powers hc={power[0]:.4f} l1={power[1]:.4f} l2={power[2]:.4f} in "
        f"[0.03,0.15], spread {spread:.4f} (tol 0.03), "
        f"{time.perf_counter() - t0:.1f}s",
    )


def test_criterion_08_dependence_insensitivity(capsys):
    t0 = time.perf_counter()
    power = {}
    se = {}
    for rho in (0.3, 0.5):
        config = ScenarioConfig(
            rho=rho, beta=0.7, r=0.9, reps=4000,
            scenario_id=f"accept8-rho{rho}", **CELL,
        )
        criticals = _calibrated_criticals(config, 4000)
        mhats = sample_mhats(config, null=False, stream="noise")
        for gamma in (0, 1, 2):
            rate = float(np.mean(mhats[:, gamma] > criticals[gamma]))
            power[(rho, gamma)] = rate
            se[(rho, gamma)] = math.sqrt(rate * (1.0 - rate) / 4000)
    ok = True
    parts = []
    for gamma in (0, 1, 2):
        diff = abs(power[(0.3, gamma)] - power[(0.5, gamma)])
        tol = 0.05 + 2.0 * math.hypot(se[(0.3, gamma)], se[(0.5, gamma)])
        ok = ok and diff <= tol
        parts.append(f"g{gamma}: |{power[(0.3, gamma)]:.3f}-{power[(0.5, gamma)]:.3f}|"
                     f"={diff:.4f}<={tol:.4f}")
    _report(
        capsys, 8, ok,
        "; ".join(parts) + f", {time.perf_counter() - t0:.1f}s",
    )


def test_criterion_09_gumbel_limit(capsys):
    t0 = time.perf_counter()
    config = ScenarioConfig(
        p=20000, n=100, rho=0.0, beta=0.6, r=0.0, reps=2000, scenario_id="accept9"
    )
    mhats = sample_mhats(config, null=True, stream="noise")[:, 2]
    norming = gumbel_norming(20000, 0.05)
    distance = kstest(norming.a * mhats - norming.b, "gumbel_r").statistic
    ok = distance <= 0.15
    _report(
        capsys, 9, ok,
        f"KS distance of normalized null maxima to exp(-e^-x): {distance:.4f} "
        f"(tol 0.15); convergence is O(1/log log p), see decisions ledger, "
        f"{time.perf_counter() - t0:.1f}s",
    )


def test_criterion_10_worker_count_determinism(capsys, tmp_path):
    t0 = time.perf_counter()
    blobs = []
    for workers in (1, 2, 4):
        out = tmp_path / f"w{workers}.csv"
        rc = main([
            "simulate", "--preset", "fig3", "--rho", "0.3", "--beta", "0.8",
            "--r", "0.5,1.1", "--reps", "100", "--null-reps", "1000",
            "--workers", str(workers), "--out", str(out),
        ])
        assert rc == EXIT_OK
        blobs.append(out.read_bytes())
    ok = blobs[0] == blobs[1] == blobs[2]
    _report(
        capsys, 10, ok,
        f"simulate CSV byte-identical for workers 1/2/4 "
        f"({len(blobs[0])} bytes), {time.perf_counter() - t0:.1f}s",
    )
