"""
Fitting scan data
=================

Line-shape fits use a Levenberg-Marquardt solver with analytic Jacobians;
the covariance is scaled by the reduced chi-square.
"""
import numpy as np

from cqedsim.analysis import fit_least_squares, model_value, r_squared

rng = np.random.default_rng(3)

# %%
# Transverse profile of the count rate: a Gaussian whose 1/e radius is
# w_mode / sqrt(2) because the rate goes as g**2.
x = np.linspace(-60, 60, 61)
y = rng.poisson(model_value("gaussian", x, [100.0, 0.0, 20 / np.sqrt(2), 1.0]))
fit = fit_least_squares("gaussian", x, y, sigma=np.sqrt(np.maximum(y, 1)))
w, dw = fit.params["w"], fit.uncertainties["w"]
print(f"w_s = {w:.2f} +/- {dw:.2f} um  ->  mode waist {w * np.sqrt(2):.2f} um")

# %%
# Cavity detuning scan: Lorentzian half-width is kappa.
d = np.linspace(0, 28, 20)
y = model_value("lorentzian", d, [1400.0, 0.0, 7.0, 10.0])
y = y + rng.normal(0, np.sqrt(y))
fit = fit_least_squares("lorentzian", d, y, sigma=np.sqrt(y))
print(fit.to_text())

# %%
# Linear power dependence.
p = np.linspace(0.1, 24, 25)
y = rng.poisson(6.5 * p + 1)
fit = fit_least_squares("linear", p, y)
print(f"slope {fit.params['m']:.2f} +/- {fit.uncertainties['m']:.2f}, "
      f"R^2 = {r_squared(p, y, fit):.4f}")
