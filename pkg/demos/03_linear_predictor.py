"""Fitting a delay-coordinate linear predictor and rolling it forward."""
import numpy as np

from hankeldmd import build_hankel, fit, lti_stream, rollout
from hankeldmd.predictor import spectral_radius

# damped oscillator observed through a single output
th = 0.2
A = 0.98 * np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
x = lti_stream(A, [[1.0, 0.3]], [1.0, 0.0], 120)

model = fit(build_hankel(x[:80], 4), dt=0.02)
print("operator size:", model.A_hat.shape)
print("eigenvalues:", np.round(model.eigenvalues, 4))
print("true modes: ", np.round(np.linalg.eigvals(A), 4))
print("spectral radius:", round(spectral_radius(model), 6))

fc = rollout(model, 40)
err = np.abs(fc.values - x[80:120]).max()
print(f"40-step forecast max error {err:.2e}")
