"""Acceptance gate.

Each test checks one criterion at its stated tolerance and prints a single
``[PASS]`` or ``[FAIL]`` line with the measured values. Run standalone with
``python3 tests/test_acceptance.py`` for just the summary lines.

Criteria 6 (AR(1)-Laplace part) and 7 are known to fail with this
implementation; see the README for the measured numbers.
"""
from __future__ import annotations

import math
import sys
import time
from functools import lru_cache

import numpy as np
import pytest
from scipy.integrate import quad

from hankeldmd.cadzow import CadzowConfig, cadzow_denoise
from hankeldmd.embedding import build_hankel, extract_signal
from hankeldmd.errors import KrylovDeficient
from hankeldmd.metrics import ViolationAccumulator, denoise_report
from hankeldmd.pipeline import Pipeline, PipelineConfig
from hankeldmd.simgen import NoiseModel, UnicycleProfile, add_noise, lti_stream, unicycle_velocity
from hankeldmd.spectrum import lambda_star, mp_median, rank_equivalence_check, svht_rank

SEEDS = range(10)
SIM_CONFIG = PipelineConfig(L=20, N=400, horizon=31, cadzow_iters=3, dt=0.02)
SIGMA = 0.25
EPSILON = 0.04


_capsys = None


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    global _capsys
    _capsys = capsys
    yield
    _capsys = None


def report(name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    if _capsys is None:
        print(line, flush=True)
    else:
        # bypass capture so the line shows up in a plain `pytest -v` run
        with _capsys.disabled():
            print("\n" + line, flush=True)
    assert ok, line


def random_system(rng, n_z, n_x=1, lo=0.85, hi=1.0):
    """Real (A, C, z0) with eigenvalue moduli in [lo, hi] behind a random similarity."""
    lam = np.zeros((n_z, n_z))
    i = 0
    while i < n_z:
        r = rng.uniform(lo, hi)
        if i + 1 < n_z and rng.random() < 0.7:
            th = rng.uniform(0.05, 1.5)
            lam[i : i + 2, i : i + 2] = r * np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
            i += 2
        else:
            lam[i, i] = r * rng.choice([-1.0, 1.0])
            i += 1
    S = rng.normal(size=(n_z, n_z))
    return S @ lam @ np.linalg.inv(S), rng.normal(size=(n_x, n_z)), rng.normal(size=n_z)


def planted(rng, rows, cols, svals):
    U, _ = np.linalg.qr(rng.normal(size=(rows, len(svals))))
    V, _ = np.linalg.qr(rng.normal(size=(cols, len(svals))))
    return (U * svals) @ V.T


def stream_pipeline(signal, config, keep_model=False):
    pipe = Pipeline(config, keep_model=keep_model)
    return [s for s in (pipe.push(x) for x in signal) if s is not None]


# --- 1: Page/Hankel rank equivalence -----------------------------------------------


def test_criterion_1_rank_equivalence():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    passed = equal = skipped = 0
    while passed < 100:
        n_z = int(rng.choice([2, 3, 4]))
        L = int(rng.integers(n_z, 2 * n_z + 1))
        d = L + int(rng.integers(0, 4))
        A, C, z0 = random_system(rng, n_z)
        try:
            same = rank_equivalence_check(A, C, z0, L, d)
        except KrylovDeficient:
            skipped += 1
            continue
        passed += 1
        equal += same
    elapsed = time.perf_counter() - start
    report("1 rank equivalence", equal == 100 and elapsed < 10.0, f"{equal}/100 equal ranks ({skipped} Krylov-deficient skipped), {elapsed:.2f} s")


# --- 2: SVHT numerics ----------------------------------------------------------------


def _mp_cdf_quad(x, beta):
    lo, hi = (1 - math.sqrt(beta)) ** 2, (1 + math.sqrt(beta)) ** 2
    f = lambda u: math.sqrt(max((hi - u) * (u - lo), 0.0)) / (2 * math.pi * beta * u)
    return quad(f, lo, x, epsabs=1e-13, epsrel=1e-13, limit=500)[0]


def test_criterion_2_svht_numerics():
    b = 1.0
    closed = math.sqrt(2 * (b + 1) + 8 * b / ((b + 1) + math.sqrt(b * b + 14 * b + 1)))
    err_lam = max(abs(lambda_star(1.0) - 4 / math.sqrt(3)), abs(lambda_star(1.0) - closed))
    resid = {beta: abs(_mp_cdf_quad(mp_median(beta), beta) - 0.5) for beta in (0.1, 0.25, 0.5, 1.0)}
    coef = lambda_star(1.0) / math.sqrt(mp_median(1.0))
    ok = err_lam < 1e-9 and max(resid.values()) < 1e-8 and abs(coef - 2.858) < 0.01
    report("2 SVHT numerics", ok, f"|lambda*(1)-4/sqrt3|={err_lam:.1e}, max CDF residual={max(resid.values()):.1e}, coefficient={coef:.5f}")


# --- 3: planted rank ----------------------------------------------------------------


def test_criterion_3_planted_rank():
    rng = np.random.default_rng(3003)
    hits = 0
    for _ in range(100):
        Y = planted(rng, 10, 40, [40.0, 30.0, 20.0]) + rng.normal(size=(10, 40))
        hits += svht_rank(Y).r_hat == 3
    report("3 planted rank", hits >= 95, f"r_hat=3 in {hits}/100 trials")


# --- 4: Cadzow ------------------------------------------------------------------------


def test_criterion_4_cadzow():
    k = np.arange(60)
    worst = 0.0
    for r, x in [(2, np.sin(0.3 * k)), (4, 0.97**k * np.cos(0.5 * k) + np.sin(0.11 * k + 0.3)), (1, 1.02**k)]:
        H = build_hankel(x, 6)
        out = cadzow_denoise(H, CadzowConfig(3, r))
        worst = max(worst, np.linalg.norm(out.data - H.data) / np.linalg.norm(H.data))
    wins = 0
    clean = np.sin(0.3 * k)
    for seed in range(100):
        noisy = clean + 0.1 * np.random.default_rng(seed).normal(size=60)
        den = extract_signal(cadzow_denoise(build_hankel(noisy, 6), CadzowConfig(3, 2))).ravel()
        wins += np.linalg.norm(den - clean) < np.linalg.norm(noisy - clean)
    report("4 Cadzow", worst < 1e-10 and wins >= 99, f"fixed-point rel. error {worst:.1e}, gain in {wins}/100 seeds")


# --- 5: exact recovery ----------------------------------------------------------------


def test_criterion_5_exact_recovery():
    cfg = PipelineConfig()
    A, C, z0 = random_system(np.random.default_rng(5005), 4, lo=0.95, hi=0.999)
    x = lti_stream(A, C, z0, 2000 + cfg.horizon)
    start = time.perf_counter()
    steps = stream_pipeline(x[:2000], cfg)
    elapsed = time.perf_counter() - start
    err = max(np.max(np.abs(s.forecast.values - x[s.t + 1 : s.t + 1 + cfg.horizon])) for s in steps)
    rho = max(s.spectral_radius for s in steps)
    ok = err < 1e-6 and rho <= 1 + 1e-6 and elapsed < 30
    report("5 exact recovery", ok, f"{len(steps)} steps, max forecast error {err:.1e}, max spectral radius {rho:.6f}, {elapsed:.1f} s")


# --- 6: simulation reproduction --------------------------------------------------------


@lru_cache(maxsize=None)
def _sim_scores(kind: str, seed: int) -> tuple[float, float]:
    prof = UnicycleProfile()
    clean = unicycle_velocity(prof)
    noisy = add_noise(clean, NoiseModel(kind, SIGMA, 0.8, seed))
    steps = stream_pipeline(noisy, SIM_CONFIG)
    den = np.array([s.denoised_current[0] for s in steps])
    start = SIM_CONFIG.N - 1
    rep = denoise_report(clean[start:], noisy[start:], den)
    return rep.snr_gain_db, rep.noise_reduction_pct


@pytest.mark.parametrize("kind, min_gain, min_red", [("gaussian", 12.0, 70.0), ("ar1laplace", 3.0, 35.0)])
def test_criterion_6_simulation(kind, min_gain, min_red):
    scores = np.array([_sim_scores(kind, s) for s in SEEDS])
    gain, red = np.median(scores, axis=0)
    report(
        f"6 simulation {kind}",
        gain >= min_gain and red >= min_red,
        f"median SNR gain {gain:.2f} dB (>= {min_gain}), median reduction {red:.1f}% (>= {min_red}) over {len(SEEDS)} seeds",
    )


# --- 7: violation duration --------------------------------------------------------------


@lru_cache(maxsize=None)
def _thirty_hz_run():
    prof = UnicycleProfile(dt=1 / 30)
    clean = unicycle_velocity(prof)
    noisy = add_noise(clean, NoiseModel("gaussian", SIGMA, seed=0))
    cfg = PipelineConfig(L=10, N=250, horizon=31, dt=prof.dt)
    return clean, stream_pipeline(noisy, cfg), cfg


def test_criterion_7_violation_duration():
    clean, steps, cfg = _thirty_hz_run()
    acc = ViolationAccumulator(cfg.dt, EPSILON)
    for s in steps:
        avail = min(cfg.horizon, len(clean) - 1 - s.t)
        if avail > 0:
            acc.add(s.forecast.values[:avail], clean[s.t + 1 : s.t + 1 + avail])
    rep = acc.report()
    report("7 violation duration", rep.pct_violating <= 15.0, f"run-aggregate {rep.pct_violating:.1f}% violating (J_t={rep.J_t:.1f} s of {rep.horizon_seconds:.1f} s), target <= 15%")


# --- 8: latency --------------------------------------------------------------------------


def test_criterion_8_latency():
    prof = UnicycleProfile()
    noisy = add_noise(unicycle_velocity(prof), NoiseModel("gaussian", SIGMA, seed=8))
    lat = np.array([s.latency for s in stream_pipeline(noisy, PipelineConfig())]) * 1e3
    med, p99 = np.median(lat), np.percentile(lat, 99)
    report("8 latency", med < 33 and p99 < 100, f"median {med:.2f} ms, p99 {p99:.2f} ms over {lat.size} steps")


# --- 9: determinism ------------------------------------------------------------------------


def _numeric_outputs(seed):
    prof = UnicycleProfile(duration=20)
    noisy = add_noise(unicycle_velocity(prof), NoiseModel("ar1laplace", SIGMA, 0.8, seed))
    steps = stream_pipeline(noisy, PipelineConfig(), keep_model=True)
    return (
        noisy,
        np.array([s.denoised_current for s in steps]),
        np.array([s.forecast.values for s in steps]),
        np.array([s.r_hat for s in steps]),
        np.array([s.sigma2_hat for s in steps]),
        np.array([s.model.A_hat for s in steps]),
    )


def test_criterion_9_determinism():
    a, b = _numeric_outputs(9), _numeric_outputs(9)
    same = all(x.shape == y.shape and x.tobytes() == y.tobytes() for x, y in zip(a, b))
    report("9 determinism", same, "bitwise-identical outputs across two runs" if same else "outputs differ between runs")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion")]
    failed = 0
    for t in tests:
        cases = [("gaussian", 12.0, 70.0), ("ar1laplace", 3.0, 35.0)] if t is test_criterion_6_simulation else [()]
        for args in cases:
            try:
                t(*args)
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
