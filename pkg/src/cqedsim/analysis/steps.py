"""Step detection and atom counting in piecewise-constant fluorescence traces.

The segmentation is the exact minimiser of

    sum of squared residuals about segment means + penalty * (number of steps)

found by optimal partitioning with PELT pruning. Segment levels are then
mapped onto an integer atom number using a single-atom step size and a
background level estimated from the levels themselves.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import find_peaks

from ..errors import InputError


@dataclass
class StepFit:
    change_points: np.ndarray
    levels: np.ndarray
    atom_counts: np.ndarray
    single_atom_unit: Optional[float]
    background: float
    n_bins: int
    penalty: float = 0.0

    @property
    def boundaries(self):
        return np.concatenate([[0], self.change_points, [self.n_bins]]).astype(int)

    @property
    def segment_lengths(self):
        return np.diff(self.boundaries)

    def per_bin(self):
        """Atom number assigned to every bin."""
        return np.repeat(self.atom_counts, self.segment_lengths)

    def reconstructed(self):
        """Piecewise-constant signal built from the segment levels."""
        return np.repeat(self.levels, self.segment_lengths)


def noise_sigma(y):
    """Robust white-noise sigma from first differences (MAD / (0.6745 sqrt 2))."""
    d = np.diff(np.asarray(y, dtype=float))
    if d.size == 0:
        return 0.0
    return float(np.median(np.abs(d - np.median(d))) / (0.6745 * np.sqrt(2.0)))


def default_penalty(y):
    """BIC-style sigma**2 * log(N), floored so noiseless input stays parsimonious."""
    y = np.asarray(y, dtype=float)
    floor = 1e-10 * (float(np.max(np.abs(y))) ** 2 + 1.0)
    return max(noise_sigma(y) ** 2, floor) * np.log(len(y))


def segment(y, penalty, min_segment=1):
    """Optimal change points of ``y`` under an SSE + ``penalty`` per change cost.

    Returns the indices at which new segments start (excluding 0).
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    y = y - y.mean()
    s1 = np.concatenate([[0.0], np.cumsum(y)])
    s2 = np.concatenate([[0.0], np.cumsum(y * y)])
    F = np.full(n + 1, np.inf)
    F[0] = -penalty
    last = np.zeros(n + 1, dtype=np.int64)
    cand = np.empty(0, dtype=np.int64)
    for t in range(min_segment, n + 1):
        s_new = t - min_segment
        if s_new == 0 or s_new >= min_segment:
            cand = np.append(cand, s_new)
        length = t - cand
        sums = s1[t] - s1[cand]
        cost = F[cand] + (s2[t] - s2[cand]) - sums * sums / length
        k = int(np.argmin(cost))
        F[t] = cost[k] + penalty
        last[t] = cand[k]
        cand = cand[cost <= F[t]]
    cps = []
    t = n
    while t > 0:
        s = int(last[t])
        if s > 0:
            cps.append(s)
        t = s
    return np.array(cps[::-1], dtype=np.int64)


def estimate_unit_and_background(levels, lengths, min_length=3):
    """Single-atom step and zero-atom level from segment levels.

    The step size comes from the typical difference between adjacent levels
    (small differences from spurious splits are ignored), the background
    from a length-weighted regression of levels on their integer index.
    Segments shorter than ``min_length`` bins are left out when enough
    longer ones exist.
    """
    levels = np.asarray(levels, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    # short segments are mostly frames with an atom arriving or leaving
    # mid-exposure; their levels sit between integers
    long_enough = lengths >= min_length
    if long_enough.sum() >= 2:
        levels, lengths = levels[long_enough], lengths[long_enough]
    if len(levels) < 2:
        return None, float(levels[0])
    diffs = np.abs(np.diff(levels))
    u0 = 0.5 * np.percentile(diffs, 90)
    u0 = float(np.median(diffs[diffs > u0])) if np.any(diffs > u0) else float(diffs.max())
    if u0 <= 0:
        return None, float(levels.min())
    big = diffs[diffs > 0.5 * u0]
    unit = float(np.median(big / np.maximum(np.rint(big / u0), 1)))
    background = float(levels.min())
    for _ in range(3):
        k = np.clip(np.rint((levels - background) / unit), 0, None)
        if np.unique(k).size >= 2:
            W = np.sum(lengths)
            kw = np.sum(lengths * k) / W
            lw = np.sum(lengths * levels) / W
            unit = float(np.sum(lengths * (k - kw) * (levels - lw))
                         / np.sum(lengths * (k - kw) ** 2))
            background = lw - unit * kw
        else:
            background = float(np.sum(lengths * (levels - k * unit)) / np.sum(lengths))
    return unit, background


def detect_steps(trace, min_segment=1, penalty=None, single_atom_unit=None,
                 background=None):
    """Segment a fluorescence trace and count atoms per segment.

    ``trace`` may be a :class:`~cqedsim.montecarlo.CountTrace` or an array.
    ``penalty`` defaults to :func:`default_penalty`. ``single_atom_unit`` and
    ``background`` override the estimates from the level histogram.
    """
    y = np.asarray(getattr(trace, "counts", trace), dtype=float)
    if min_segment < 1:
        raise InputError("min_segment must be at least 1")
    if len(y) < 2 * min_segment:
        raise InputError(f"trace of {len(y)} bins is shorter than 2 * min_segment")
    if penalty is None:
        penalty = default_penalty(y)
    cps = segment(y, penalty, min_segment)
    bounds = np.concatenate([[0], cps, [len(y)]])
    lengths = np.diff(bounds)
    levels = np.add.reduceat(y, bounds[:-1]) / lengths
    unit, bg = estimate_unit_and_background(levels, lengths)
    if single_atom_unit is not None:
        unit = float(single_atom_unit)
    if background is not None:
        bg = float(background)
    if unit is None or unit <= 0:
        counts = np.zeros(len(levels), dtype=np.int64)
    else:
        counts = np.clip(np.rint((levels - bg) / unit), 0, None).astype(np.int64)
    return StepFit(change_points=cps, levels=levels, atom_counts=counts,
                   single_atom_unit=unit, background=bg, n_bins=len(y),
                   penalty=float(penalty))


def estimate_snr(trace, step_fit):
    """(one-atom level - background level) / background standard deviation.

    Returns ``inf`` when the background segments are noiseless and ``None``
    when no one-atom segment exists.
    """
    y = np.asarray(getattr(trace, "counts", trace), dtype=float)
    per_bin = step_fit.per_bin()
    one = per_bin == 1
    zero = per_bin == 0
    if not one.any() or not zero.any():
        return None
    resid = y - step_fit.reconstructed()
    sigma = float(np.sqrt(np.sum(resid[zero] ** 2) / max(zero.sum() - 1, 1)))
    signal = float(y[one].mean() - y[zero].mean())
    if sigma == 0:
        return np.inf
    return signal / sigma


def signal_histogram(values, bin_width):
    values = np.asarray(values, dtype=float)
    lo = np.floor(values.min() / bin_width) * bin_width
    edges = np.arange(lo, values.max() + 2 * bin_width, bin_width)
    hist, edges = np.histogram(values, bins=edges)
    return hist, edges


def histogram_peaks(values, bin_width, smooth=3, min_prominence=None):
    """Centres of resolved peaks in the histogram of ``values``.

    The histogram is box-smoothed over ``smooth`` bins; peaks must stand
    3 Poisson sigma above the saddle separating them from neighbours unless
    ``min_prominence`` is given.
    """
    hist, edges = signal_histogram(values, bin_width)
    kernel = np.ones(smooth) / smooth
    h = np.convolve(hist, kernel, mode="same")
    if min_prominence is None:
        min_prominence = 3.0 * np.sqrt(np.maximum(h, 1.0)) / np.sqrt(smooth)
    idx, _ = find_peaks(np.concatenate([[0], h, [0]]), prominence=min_prominence
                        if np.isscalar(min_prominence)
                        else np.concatenate([[1], min_prominence, [1]]))
    idx = idx - 1
    centres = 0.5 * (edges[:-1] + edges[1:])
    return centres[idx]
