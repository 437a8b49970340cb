"""Denoising scores for the two noise models over a few seeds.

The longer window (L=20, N=400) is the one the acceptance checks use.
Expect a few seconds per scenario.
"""
import numpy as np

from hankeldmd import NoiseModel, PipelineConfig, UnicycleProfile, add_noise, denoise_report, run_stream, unicycle_velocity

prof = UnicycleProfile(duration=60.0)
clean = unicycle_velocity(prof)
cfg = PipelineConfig(L=20, N=400)

for kind in ("gaussian", "ar1laplace"):
    rows = []
    for seed in range(3):
        noisy = add_noise(clean, NoiseModel(kind, sigma=0.25, rho=0.8, seed=seed))
        steps = run_stream(noisy, cfg)
        den = np.array([s.denoised_current[0] for s in steps])
        rep = denoise_report(clean[cfg.N - 1 :], noisy[cfg.N - 1 :], den)
        rows.append((rep.snr_gain_db, rep.noise_reduction_pct, np.mean([s.r_hat for s in steps])))
    g, r, k = np.median(rows, axis=0)
    print(f"{kind:<11} gain {g:5.2f} dB  reduction {r:5.1f}%  mean rank {k:.1f}")

# correlated noise leaks into the threshold's noise floor estimate, so the
# selected rank grows and less noise is removed
