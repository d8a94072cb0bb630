"""Recovering measured quantities from count traces."""
from .fitting import (PARAM_NAMES, FitResult, fit_least_squares, initial_guess,
                      model_jacobian, model_value, r_squared)
from .steps import (StepFit, default_penalty, detect_steps, estimate_snr,
                    estimate_unit_and_background, histogram_peaks, noise_sigma,
                    segment, signal_histogram)
from .traces import average_runs, box_smooth, count_peaks

__all__ = [
    "PARAM_NAMES", "FitResult", "fit_least_squares", "initial_guess",
    "model_jacobian", "model_value", "r_squared",
    "StepFit", "default_penalty", "detect_steps", "estimate_snr",
    "estimate_unit_and_background", "histogram_peaks", "noise_sigma",
    "segment", "signal_histogram",
    "average_runs", "box_smooth", "count_peaks",
]
