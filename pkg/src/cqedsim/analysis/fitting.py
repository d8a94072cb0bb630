"""Weighted nonlinear least squares (Levenberg-Marquardt) for line shapes.

Three models are supported, each with an additive offset ``B``::

    gaussian    A * exp(-(x - x0)**2 / w**2) + B
    lorentzian  A * h**2 / ((x - x0)**2 + h**2) + B
    linear      m * x + B

For the Gaussian, ``w`` is the radius at which the signal falls to 1/e.
Because the scattering rate goes as g**2 and g carries exp(-rho**2/w_mode**2),
a transverse scan of the rate gives ``w = w_mode / sqrt(2)``.
"""
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from ..errors import DegenerateFitError, InputError

PARAM_NAMES = {
    "gaussian": ("A", "x0", "w", "B"),
    "lorentzian": ("A", "x0", "h", "B"),
    "linear": ("m", "B"),
}


def model_value(model, x, p):
    x = np.asarray(x, dtype=float)
    if model == "gaussian":
        a, x0, w, b = p
        return a * np.exp(-((x - x0) / w) ** 2) + b
    if model == "lorentzian":
        a, x0, h, b = p
        return a * h ** 2 / ((x - x0) ** 2 + h ** 2) + b
    if model == "linear":
        m, b = p
        return m * x + b
    raise ValueError(f"unknown model {model!r}")


def model_jacobian(model, x, p):
    """d(model)/d(params), shape (len(x), n_params)."""
    x = np.asarray(x, dtype=float)
    one = np.ones_like(x)
    if model == "gaussian":
        a, x0, w, _ = p
        u = (x - x0) / w
        e = np.exp(-u ** 2)
        return np.column_stack([e, a * e * 2 * u / w, a * e * 2 * u ** 2 / w, one])
    if model == "lorentzian":
        a, x0, h, _ = p
        d = x - x0
        den = d ** 2 + h ** 2
        shape = h ** 2 / den
        return np.column_stack([shape, a * h ** 2 * 2 * d / den ** 2,
                                a * 2 * h * d ** 2 / den ** 2, one])
    if model == "linear":
        return np.column_stack([x, one])
    raise ValueError(f"unknown model {model!r}")


@dataclass
class FitResult:
    model: str
    params: Dict[str, float]
    uncertainties: Dict[str, float]
    covariance: np.ndarray
    residual_norm: float
    converged: bool
    iterations: int
    chi2: float = 0.0
    dof: int = 0
    message: str = ""
    objective_history: List[float] = field(default_factory=list, repr=False)

    @property
    def values(self):
        return np.array([self.params[k] for k in PARAM_NAMES[self.model]])

    def __call__(self, x):
        return model_value(self.model, x, self.values)

    def to_text(self):
        """Flat ``key = value`` block."""
        lines = [f"model = {self.model}", f"converged = {self.converged}",
                 f"iterations = {self.iterations}",
                 f"residual_norm = {self.residual_norm!r}",
                 f"chi2 = {self.chi2!r}", f"dof = {self.dof}"]
        for name in PARAM_NAMES[self.model]:
            lines.append(f"param.{name} = {self.params[name]!r}")
            lines.append(f"sigma.{name} = {self.uncertainties[name]!r}")
        return "\n".join(lines) + "\n"

    def to_rows(self, prefix=""):
        """``(name, value, uncertainty)`` rows for CSV reports."""
        return [(f"{prefix}{name}", self.params[name], self.uncertainties[name])
                for name in PARAM_NAMES[self.model]]


def initial_guess(model, x, y):
    """Start values from data moments: edge baseline, peak position, second moment."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if model == "linear":
        m = (y[-1] - y[0]) / (x[-1] - x[0]) if x[-1] != x[0] else 0.0
        return np.array([m, y[0] - m * x[0]])
    order = np.argsort(x)
    xs, ys = x[order], y[order]
    n_edge = max(1, len(ys) // 10)
    baseline = np.median(np.concatenate([ys[:n_edge], ys[-n_edge:]]))
    peak = int(np.argmax(ys))
    amp = ys[peak] - baseline
    weights = np.clip(ys - baseline, 0, None)
    if weights.sum() > 0:
        centre = np.sum(weights * xs) / weights.sum()
        var = np.sum(weights * (xs - centre) ** 2) / weights.sum()
    else:
        centre, var = xs[peak], (xs[-1] - xs[0]) ** 2 / 16
    centre = xs[peak] if not np.isfinite(centre) else centre
    if model == "gaussian":
        width = np.sqrt(2 * var) if var > 0 else (xs[-1] - xs[0]) / 4
        return np.array([amp, centre, width, baseline])
    # second moment of a truncated Lorentzian is not the width; use the
    # half-maximum crossing instead
    above = xs[ys - baseline >= amp / 2]
    half = (above.max() - above.min()) / 2 if above.size > 1 else (xs[-1] - xs[0]) / 4
    if above.size and (above.min() == xs[0] or above.max() == xs[-1]):
        half = max(above.max() - xs[peak], xs[peak] - above.min())
    return np.array([amp, xs[peak], max(half, np.diff(xs).min()), baseline])


def fit_least_squares(model, x, y, sigma=None, initial=None, max_iter=200,
                      xtol=1e-8, gtol=1e-10, scale_covariance=True):
    """Levenberg-Marquardt minimisation of sum(((y - f(x)) / sigma)**2).

    Converges when the relative parameter step falls below ``xtol`` or the
    gradient norm below ``gtol``. The covariance is the inverse normal
    matrix at the optimum times the reduced chi-square (unless
    ``scale_covariance`` is False). Hitting ``max_iter`` returns a result
    with ``converged=False`` rather than raising.
    """
    if model not in PARAM_NAMES:
        raise ValueError(f"unknown model {model!r}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n_par = len(PARAM_NAMES[model])
    if x.shape != y.shape or x.ndim != 1:
        raise InputError("x and y must be 1-D arrays of equal length")
    if len(x) < n_par + 1:
        raise InputError(f"need at least {n_par + 1} points for a {model} fit")
    sigma = np.ones_like(y) if sigma is None else np.broadcast_to(
        np.asarray(sigma, dtype=float), y.shape)
    if np.any(sigma <= 0):
        raise InputError("sigma must be positive")
    p = initial_guess(model, x, y) if initial is None else np.array(initial, dtype=float)
    if p.shape != (n_par,):
        raise InputError(f"initial guess must have {n_par} entries")

    def residuals(q):
        return (y - model_value(model, x, q)) / sigma

    def jac(q):
        return model_jacobian(model, x, q) / sigma[:, None]

    r = residuals(p)
    cost = float(r @ r)
    history = [cost]
    lam = None
    nu = 2.0
    converged = False
    message = "maximum iterations reached"
    it = 0
    for it in range(1, max_iter + 1):
        J = jac(p)
        A = J.T @ J
        grad = J.T @ r
        if np.linalg.norm(grad) < gtol:
            converged, message = True, "gradient norm below tolerance"
            it -= 1
            break
        if lam is None:
            lam = 1e-3 * float(np.max(np.diag(A)))
        diag = np.diag(np.maximum(np.diag(A), 1e-300))
        accepted = False
        while not accepted:
            try:
                step = np.linalg.solve(A + lam * diag, grad)
            except np.linalg.LinAlgError:
                lam *= nu
                nu *= 2
                if lam > 1e300:
                    raise DegenerateFitError("cannot solve damped normal equations")
                continue
            p_new = p + step
            r_new = residuals(p_new)
            cost_new = float(r_new @ r_new)
            predicted = float(step @ (lam * diag @ step + grad))
            if np.isfinite(cost_new) and cost_new <= cost:
                rho = (cost - cost_new) / predicted if predicted > 0 else 1.0
                lam *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
                nu = 2.0
                accepted = True
            else:
                lam *= nu
                nu *= 2.0
                if lam > 1e300 or not np.isfinite(lam):
                    break
        if not accepted:
            converged, message = True, "no further decrease possible"
            break
        small_step = np.linalg.norm(step) <= xtol * (np.linalg.norm(p) + xtol)
        p, r, cost = p_new, r_new, cost_new
        history.append(cost)
        if small_step:
            converged, message = True, "relative step below tolerance"
            break

    if model in ("gaussian", "lorentzian"):
        p[2] = abs(p[2])
    J = jac(p)
    A = J.T @ J
    if np.linalg.matrix_rank(J) < n_par:
        raise DegenerateFitError(f"singular normal matrix in {model} fit")
    cov = np.linalg.inv(A)
    dof = len(x) - n_par
    chi2 = float(r @ r)
    if scale_covariance:
        cov = cov * (chi2 / dof)
    cov = 0.5 * (cov + cov.T)
    names = PARAM_NAMES[model]
    errs = np.sqrt(np.clip(np.diag(cov), 0, None))
    return FitResult(model=model, params=dict(zip(names, map(float, p))),
                     uncertainties=dict(zip(names, map(float, errs))),
                     covariance=cov, residual_norm=float(np.sqrt(chi2)),
                     converged=converged, iterations=it, chi2=chi2, dof=dof,
                     message=message, objective_history=history)


def r_squared(x, y, fit):
    y = np.asarray(y, dtype=float)
    ss_res = float(np.sum((y - fit(x)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
