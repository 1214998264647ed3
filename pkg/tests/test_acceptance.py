"""Acceptance suite at desk scale.

Every criterion runs at its stated parameters: T = 1, dt = 2^-20,
eps in {2^-4 .. 2^-11}, 64 paths, seeds 20070420 + i.  Expect a few
minutes of runtime; run with ``pytest tests/test_acceptance.py -s`` to see
one PASS/FAIL line per criterion as it completes.

Two criteria are known to fail at the stated parameters (see the test
docstrings): the pathwise-monotonicity fraction (9) and the
upcrossing-oracle concordance pairs (10).  They are asserted as stated
anyway; the failures are structural, not implementation bugs.
"""

import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

import loctime as lt
from loctime.estimators import EstimatorKind as K

BASE_SEED = 20070420
N_PATHS = 64
DT = 2.0**-20
T = 1.0
EPS_LIST = [2.0**-k for k in range(4, 12)]
EPS_SMALL = 2.0**-11
T_GRID = np.arange(0, 1025) * (T / 1024)


def _report(number: int, name: str, ok: bool, detail: str = "") -> bool:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {number:2d} {name}: {status}{suffix}")
    return ok


@pytest.fixture(scope="module")
def ensemble():
    """Per-path statistics for the Brownian desk ensemble, computed once."""
    n_steps = round(T / DT) + round(max(EPS_LIST) / DT)
    k_report = np.rint(T_GRID / DT).astype(int)
    stats = {
        "sup_j": {eps: [] for eps in EPS_LIST},
        "sup_r": {eps: [] for eps in EPS_LIST},
        "identity_violation": 0.0,
        "identity_seconds": 0.0,
        "local_time_T": [],
        "ratios": {kind: [] for kind in ("I3", "I4", "I5", "SmoothedQuarter")},
        "sup_i1": [],
        "sup_i2": [],
    }
    for i in range(N_PATHS):
        path = lt.generate_brownian(DT, n_steps, BASE_SEED + i, horizon=T)
        local = lt.tanaka_local_time(path, T_GRID)
        l_final = local.values[-1]
        stats["local_time_T"].append(l_final)
        for eps in EPS_LIST:
            tic = time.perf_counter()
            j = lt.j_epsilon(path, eps, T_GRID)
            i1 = lt.i_family(K.I1, path, eps, T_GRID)
            i2 = lt.i_family(K.I2, path, eps, T_GRID)
            scale = np.maximum(
                1.0, np.maximum(np.abs(i1.values), np.abs(i2.values))
            )
            violation = float(
                np.max(np.abs(j.values - (-i1.values + i2.values)) / scale)
            )
            stats["identity_seconds"] += time.perf_counter() - tic
            stats["identity_violation"] = max(
                stats["identity_violation"], violation
            )
            stats["sup_j"][eps].append(
                float(np.max(np.abs(j.values - local.values)))
            )
            r = lt.remainder(path, eps, T_GRID)
            stats["sup_r"][eps].append(float(np.max(np.abs(r.values))))
        if l_final >= 0.1:
            for kind, curve in (
                ("I3", lt.i_family(K.I3, path, EPS_SMALL, [T])),
                ("I4", lt.i_family(K.I4, path, EPS_SMALL, [T])),
                ("I5", lt.i_family(K.I5, path, EPS_SMALL, [T])),
                ("SmoothedQuarter", lt.smoothed_quarter(path, EPS_SMALL, [T])),
            ):
                stats["ratios"][kind].append(curve.values[0] / l_final)
        ito = lt.ito_indicator_integral(path, T_GRID)
        i1 = lt.i_family(K.I1, path, EPS_SMALL, T_GRID)
        stats["sup_i1"].append(float(np.max(np.abs(i1.values - ito.values))))
        i2 = lt.i_family(K.I2, path, EPS_SMALL, T_GRID)
        xp = np.maximum(path.values[k_report], 0.0)
        i2_limit = xp + 0.5 * local.values
        stats["sup_i2"].append(float(np.max(np.abs(i2.values - i2_limit))))
    return stats


def test_criterion_1_exact_two_term_identity(ensemble):
    worst = ensemble["identity_violation"]
    elapsed = ensemble["identity_seconds"]
    ok = worst <= 1e-9 and elapsed <= 120.0
    assert _report(
        1, "two-term identity", ok, f"max rel {worst:.2e}, {elapsed:.0f}s"
    )


def test_criterion_2_residual_decay(ensemble):
    means = [float(np.mean(ensemble["sup_r"][eps])) for eps in EPS_LIST]
    increases = [
        means[i + 1] / means[i]
        for i in range(len(means) - 1)
        if means[i + 1] > means[i]
    ]
    monotone_ok = len(increases) <= 1 and all(r <= 1.5 for r in increases)
    decay_ok = means[-1] <= 0.25 * means[0]
    ok = monotone_ok and decay_ok
    assert _report(
        2,
        "residual decay",
        ok,
        f"mean sup |R|: {means[0]:.3f} -> {means[-1]:.3f}",
    )


def test_criterion_3_fraction_limits(ensemble):
    n_used = len(ensemble["ratios"]["I3"])
    n_excluded = N_PATHS - n_used
    bands = {"I3": (0.45, 0.55), "I4": (0.20, 0.30),
             "I5": (0.20, 0.30), "SmoothedQuarter": (0.20, 0.30)}
    means = {k: float(np.mean(v)) for k, v in ensemble["ratios"].items()}
    ok = n_excluded < 0.25 * N_PATHS and all(
        bands[k][0] <= means[k] <= bands[k][1] for k in bands
    )
    detail = ", ".join(f"{k}={means[k]:.3f}" for k in bands)
    assert _report(
        3, "fraction limits", ok, f"{detail}, excluded {n_excluded}/{N_PATHS}"
    )


def test_criterion_4_two_term_limits(ensemble):
    l2_i1 = math.sqrt(float(np.mean(np.square(ensemble["sup_i1"]))))
    l2_i2 = math.sqrt(float(np.mean(np.square(ensemble["sup_i2"]))))
    ok = l2_i1 <= 0.15 and l2_i2 <= 0.15
    assert _report(4, "I1/I2 limits", ok, f"I1={l2_i1:.3f}, I2={l2_i2:.3f}")


def test_criterion_5_convergence_rate(ensemble):
    l2 = [
        math.sqrt(float(np.mean(np.square(ensemble["sup_j"][eps]))))
        for eps in EPS_LIST
    ]
    fit = lt.fit_rate(EPS_LIST, l2)
    # monotone refinement: nonincreasing in eps up to one 1.5x violation
    increases = [
        l2[i + 1] / l2[i] for i in range(len(l2) - 1) if l2[i + 1] > l2[i]
    ]
    refinement_ok = len(increases) <= 1 and all(r <= 1.5 for r in increases)
    ok = 0.15 <= fit.slope <= 0.60 and fit.r_squared >= 0.90 and refinement_ok
    assert _report(
        5, "convergence rate", ok,
        f"slope={fit.slope:.3f}, r2={fit.r_squared:.3f}",
    )


def test_criterion_6_occupation_density_consequence():
    eps = 2.0**-10
    dt = 2.0**-18  # satisfies dt <= eps/256; keeps the sweep affordable
    n_steps = round(T / dt) + round(eps / dt)
    f = lt.FunctionSpec("gaussian_bump", 0.0, 0.5)
    y_grid = -4.0 + np.arange(129) / 16.0
    rels = []
    for i in range(N_PATHS):
        path = lt.generate_brownian(dt, n_steps, BASE_SEED + i, horizon=T)
        with np.errstate(all="ignore"):
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                swept = lt.level_sweep(path, eps, T, f, y_grid)
        occupied = lt.occupation_functional(path, f, [T]).values[0]
        rels.append(abs(swept - occupied) / occupied)
    mean_rel = float(np.mean(rels))
    ok = mean_rel <= 0.05
    assert _report(6, "level sweep vs occupation", ok, f"mean rel {mean_rel:.3f}")


def test_criterion_7_sigma_martingale_fractions():
    spec = lt.SigmaSpec("affine_sine", 1.0, 0.5, 2 * np.pi)
    n_steps = round(T / DT) + round(max(EPS_LIST) / DT)
    ratios = {k: [] for k in ("I3", "I4", "I5", "SmoothedQuarter")}
    for i in range(N_PATHS):
        driver = lt.generate_brownian(DT, n_steps, BASE_SEED + i, horizon=T)
        path = lt.generate_sigma_martingale(driver, spec)
        l_final = lt.tanaka_local_time(path, [T]).values[0]
        if l_final < 0.1:
            continue
        ratios["I3"].append(lt.i_family(K.I3, path, EPS_SMALL, [T]).values[0] / l_final)
        ratios["I4"].append(lt.i_family(K.I4, path, EPS_SMALL, [T]).values[0] / l_final)
        ratios["I5"].append(lt.i_family(K.I5, path, EPS_SMALL, [T]).values[0] / l_final)
        ratios["SmoothedQuarter"].append(
            lt.smoothed_quarter(path, EPS_SMALL, [T]).values[0] / l_final
        )
    targets = {"I3": 0.5, "I4": 0.25, "I5": 0.25, "SmoothedQuarter": 0.25}
    means = {k: float(np.mean(v)) for k, v in ratios.items()}
    n_excluded = N_PATHS - len(ratios["I3"])
    ok = n_excluded < 0.25 * N_PATHS and all(
        abs(means[k] - targets[k]) <= 0.07 for k in targets
    )
    detail = ", ".join(f"{k}={means[k]:.3f}" for k in targets)
    assert _report(7, "sigma-martingale fractions", ok, detail)


def test_criterion_8_quadrature_quarter():
    value, _ = quad(lambda y: y * lt.phi(-y), 0.0, 12.0)
    # tail: int_12^inf y Phi(-y) dy < int_12^inf y exp(-y^2/2) dy < 1e-30
    ok = abs(value - 0.25) <= 1e-8
    assert _report(8, "quarter quadrature", ok, f"value {value:.10f}")


def test_criterion_9_as_subsequence(ensemble):
    """Fails at desk scale: the sup error of the level-crossing estimator
    against the local-time oracle is noise-dominated at eps >= 4^-5, so
    per-path monotonicity holds for only ~half the paths, not 80%."""
    eps_seq = [4.0**-n for n in (2, 3, 4, 5)]
    matrix = np.array([ensemble["sup_j"][eps] for eps in eps_seq])
    fraction = lt.as_subsequence_check(matrix, eps_seq)
    ok = fraction >= 0.80
    assert _report(9, "a.s. subsequence proxy", ok, f"fraction {fraction:.3f}")


def test_criterion_10_oracle_concordance():
    """Partially fails at the stated parameters: with h = 2^-9 and
    dt = 2^-20 the strip is only twice the per-step noise, so the sampled
    path under-resolves strip crossings (ratio ~0.63).  The same oracle
    agrees within 10% once h >= 16 sqrt(dt); see
    test_oracle.test_oracle_concordance_resolvable_strip."""
    h = 2.0**-9
    triples = []
    for i in range(N_PATHS):
        path = lt.generate_brownian(DT, round(T / DT), BASE_SEED + i)
        triples.append(
            (
                lt.tanaka_local_time(path, [T]).values[0],
                lt.upcrossing_local_time(path, h, [T]).values[0],
                lt.occupation_local_time(path, h, [T]).values[0],
            )
        )
    tanaka, upcross, occupy = np.mean(triples, axis=0)
    pair_ratios = (upcross / tanaka, occupy / tanaka, occupy / upcross)
    pair_ok = all(0.9 <= r <= 1.1 for r in pair_ratios)

    dt_mean = 2.0**-12  # discrete Tanaka mean is unbiased in dt
    mean_l1 = float(
        np.mean(
            [
                lt.tanaka_local_time(
                    lt.generate_brownian(dt_mean, 2**12, seed), [T]
                ).values[0]
                for seed in range(10_000)
            ]
        )
    )
    mean_ok = 0.76 <= mean_l1 <= 0.84
    ok = pair_ok and mean_ok
    detail = (
        f"ratios {pair_ratios[0]:.3f}/{pair_ratios[1]:.3f}/{pair_ratios[2]:.3f}, "
        f"E[L1]={mean_l1:.3f}"
    )
    assert _report(10, "oracle concordance", ok, detail)
