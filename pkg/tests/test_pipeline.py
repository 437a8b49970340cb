import numpy as np
import pytest

from hankeldmd.errors import DimensionMismatch, InvalidConfig, PipelineStepError
from hankeldmd.pipeline import Pipeline, PipelineConfig, run_stream
from hankeldmd.simgen import NoiseModel, add_noise, lti_stream

SMALL = PipelineConfig(L=5, N=50, horizon=8, dt=0.1)


def damped_rotation(theta=0.2, r=0.99):
    return r * np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])


@pytest.mark.parametrize(
    "kwargs",
    [dict(L=7, N=50), dict(L=10, N=50), dict(horizon=0), dict(dt=0.0), dict(L=5, N=50, n_x=3), dict(cadzow_iters=0)],
)
def test_invalid_configs_rejected(kwargs):
    with pytest.raises(InvalidConfig):
        PipelineConfig(**kwargs)


def test_defaults():
    cfg = PipelineConfig()
    assert (cfg.L, cfg.N, cfg.cadzow_iters, cfg.horizon, cfg.m) == (10, 250, 3, 31, 25)


def test_warm_up_contract():
    pipe = Pipeline(SMALL)
    x = np.sin(0.1 * np.arange(60))
    outs = [pipe.push(v) for v in x[:49]]
    assert all(o is None for o in outs)
    first = pipe.push(x[49])
    assert first is not None and first.t == 49


def test_constant_signal():
    outs = run_stream(np.full(70, 1.7), SMALL)
    assert len(outs) == 21
    for o in outs:
        assert abs(o.denoised_current[0] - 1.7) < 1e-9
        np.testing.assert_allclose(o.forecast.values, 1.7, atol=1e-6)
        assert o.r_hat == 1


def test_noise_free_lti_stream():
    A = np.zeros((3, 3))
    A[:2, :2] = damped_rotation()
    A[2, 2] = 0.95
    # the median-based threshold needs the signal rank below half the Page rows
    cfg = PipelineConfig(L=10, N=100, horizon=8, dt=0.1)
    X = lti_stream(A, [[1.0, 0.3, 0.8]], [1.0, 0.0, 1.0], 160 + 8)
    outs = run_stream(X[:160], cfg)
    assert len(outs) == 61
    for o in outs:
        truth = X[o.t + 1 : o.t + 9]
        assert np.max(np.linalg.norm(o.forecast.values - truth, axis=1)) < 1e-6
        assert o.spectral_radius <= 1 + 1e-6
        assert o.r_hat == 3
        np.testing.assert_allclose(o.denoised_current, X[o.t], atol=1e-9)


def test_vector_measurements():
    cfg = PipelineConfig(L=4, N=64, n_x=2, horizon=5)
    X = lti_stream(damped_rotation(), np.eye(2), [1.0, 0.5], 80)
    outs = run_stream(X[:70], cfg)
    assert len(outs) == 7
    o = outs[-1]
    assert o.forecast.values.shape == (5, 2)
    np.testing.assert_allclose(o.forecast.values, X[o.t + 1 : o.t + 6], atol=1e-8)


def test_run_stream_lengths():
    x = np.sin(0.3 * np.arange(80))
    assert len(run_stream(x[:50], SMALL)) == 1
    assert run_stream(x[:49], SMALL) == []
    assert len(run_stream(x, SMALL)) == 31


def test_replay_determinism():
    x = add_noise(np.sin(0.05 * np.arange(200)), NoiseModel(seed=3))
    a, b = run_stream(x, SMALL), run_stream(x, SMALL)
    for p, q in zip(a, b):
        assert p.forecast.values.tobytes() == q.forecast.values.tobytes()
        assert p.denoised_current.tobytes() == q.denoised_current.tobytes()
        assert p.rank.singular_values.tobytes() == q.rank.singular_values.tobytes()
        assert p.sigma2_hat == q.sigma2_hat and p.spectral_radius == q.spectral_radius


def test_output_depends_only_on_window():
    rng = np.random.default_rng(1)
    tail = np.sin(0.1 * np.arange(50)) + 0.1 * rng.normal(size=50)
    a = run_stream(np.concatenate([rng.normal(size=30), tail]), SMALL)[-1]
    b = run_stream(np.concatenate([100 + rng.normal(size=30), tail]), SMALL)[-1]
    assert a.forecast.values.tobytes() == b.forecast.values.tobytes()
    assert a.r_hat == b.r_hat


def test_rank_used_by_cadzow_is_reported_rank():
    from hankeldmd.cadzow import CadzowConfig, cadzow_denoise
    from hankeldmd.embedding import build_hankel

    x = add_noise(np.sin(0.2 * np.arange(150)) + np.cos(0.05 * np.arange(150)), NoiseModel(sigma=0.1, seed=2))
    pipe = Pipeline(SMALL)
    seen = set()
    for t, v in enumerate(x):
        o = pipe.push(v)
        if o is None:
            continue
        seen.add(o.r_hat)
        H = cadzow_denoise(build_hankel(x[t - 49 : t + 1], 5), CadzowConfig(SMALL.cadzow_iters, o.r_hat))
        np.testing.assert_array_equal(H.data[-1:, -1], o.denoised_current)
    assert seen


def test_outputs_finite_and_latency_recorded():
    x = add_noise(np.sin(0.05 * np.arange(150)), NoiseModel(seed=5))
    for o in run_stream(x, SMALL):
        assert np.all(np.isfinite(o.forecast.values)) and not o.forecast.diverged
        assert o.latency >= 0
        assert o.forecast.nu_hat_scale == o.sigma2_hat


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Pipeline(SMALL).push([1.0, 2.0])


def test_numeric_failure_wrapped_with_step():
    pipe = Pipeline(SMALL)
    for v in range(49):
        pipe.push(float(v))
    with pytest.raises(PipelineStepError) as info:
        pipe.push(float("nan"))
    assert info.value.t == 49
