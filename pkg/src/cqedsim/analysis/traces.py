"""Operations on count traces: run averaging and pass (peak) counting."""
import numpy as np

from ..errors import InputError
from ..montecarlo import CountTrace


def average_runs(traces, alignment="by_time"):
    """Bin-by-bin mean of several traces, with the standard error of the mean.

    All traces must share bin width, start time and length. A single trace
    comes back unchanged with ``stderr=None``.
    """
    if alignment != "by_time":
        raise InputError(f"unsupported alignment {alignment!r}")
    traces = list(traces)
    if not traces:
        raise InputError("nothing to average")
    first = traces[0]
    for tr in traces[1:]:
        if (len(tr) != len(first) or not np.isclose(tr.bin_width, first.bin_width)
                or not np.isclose(tr.t0, first.t0)):
            raise InputError("traces differ in length, bin width or start time")
    stack = np.vstack([np.asarray(tr.counts, dtype=float) for tr in traces])
    mean = stack.mean(axis=0)
    stderr = None
    if len(traces) > 1:
        stderr = stack.std(axis=0, ddof=1) / np.sqrt(len(traces))
    return CountTrace(bin_width=first.bin_width, counts=mean, t0=first.t0,
                      seed=first.seed, scenario_id=first.scenario_id,
                      stderr=stderr)


def box_smooth(y, window):
    window = max(int(window), 1)
    if window == 1:
        return np.asarray(y, dtype=float)
    kernel = np.ones(window) / window
    return np.convolve(np.asarray(y, dtype=float), kernel, mode="same")


def count_peaks(y, smooth=1, high=0.4, low=0.2, baseline=None, top=None):
    """Count excursions of a signal above a hysteresis band.

    Thresholds are placed at fractions ``high`` and ``low`` of the way from
    ``baseline`` (default: median) to ``top`` (default: 99.5th percentile)
    of the box-smoothed signal. A peak is counted each time the signal
    rises above the high threshold after having dropped below the low one.
    Returns ``(n_peaks, peak_indices)``.
    """
    s = box_smooth(y, smooth)
    base = np.median(s) if baseline is None else baseline
    peak_level = np.percentile(s, 99.5) if top is None else top
    if peak_level <= base:
        return 0, np.empty(0, dtype=int)
    hi = base + high * (peak_level - base)
    lo = base + low * (peak_level - base)
    armed = True
    starts = []
    peaks = []
    for i, v in enumerate(s):
        if armed and v > hi:
            armed = False
            starts.append(i)
        elif not armed and v < lo:
            armed = True
            peaks.append(starts[-1] + int(np.argmax(s[starts[-1]:i])))
    if not armed:
        peaks.append(starts[-1] + int(np.argmax(s[starts[-1]:])))
    return len(peaks), np.array(peaks, dtype=int)
