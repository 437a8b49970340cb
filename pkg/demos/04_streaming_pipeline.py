"""The full streaming loop on a noisy figure-eight speed profile.

Each push refreshes the buffer; once it is full, every push returns the
current denoised value and a short forecast.
"""
import numpy as np

from hankeldmd import NoiseModel, Pipeline, PipelineConfig, UnicycleProfile, add_noise, unicycle_velocity

prof = UnicycleProfile(duration=30.0)
clean = unicycle_velocity(prof)
noisy = add_noise(clean, NoiseModel("gaussian", sigma=0.25, seed=4))

cfg = PipelineConfig()  # L=10, N=250, horizon=31, J=3
pipe = Pipeline(cfg)
outs = []
for x in noisy:
    step = pipe.push(x)
    if step is not None:
        outs.append(step)

print(f"{len(noisy)} samples -> {len(outs)} steps (first output at t={outs[0].t})")
ranks = np.bincount([s.r_hat for s in outs])
print("rank histogram:", {r: int(c) for r, c in enumerate(ranks) if c})
lat = np.array([s.latency for s in outs]) * 1e3
print(f"latency median {np.median(lat):.2f} ms, p99 {np.percentile(lat, 99):.2f} ms")

den = np.array([s.denoised_current[0] for s in outs])
ref = clean[cfg.N - 1 :]
print(f"RMS error noisy {np.sqrt(np.mean((noisy[cfg.N - 1:] - ref) ** 2)):.3f}, denoised {np.sqrt(np.mean((den - ref) ** 2)):.3f}")

s = outs[len(outs) // 2]
print(f"\nforecast from t={s.t}:")
for j in (1, 10, 31):
    print(f"  +{j:>2} steps: predicted {s.forecast.values[j - 1, 0]:+.3f}, true {clean[s.t + j]:+.3f}")
