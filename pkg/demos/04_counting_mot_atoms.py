"""
Counting atoms in a small MOT
=============================

The atom number in a high-gradient MOT jumps by one as atoms load and
leave. Camera frames see these jumps as steps; a penalised least-squares
segmentation finds them and turns levels into integers.
"""
from dataclasses import replace

import numpy as np

from cqedsim import MotModel, RngStream, simulate_mot_trace
from cqedsim.analysis import detect_steps, estimate_snr, histogram_peaks

mot = MotModel()
rng = RngStream(seed=2)

# An empty MOT first, to learn the background level.
cal, _ = simulate_mot_trace(replace(mot, loading_rate=0.0), 10.0, 0.5, rng)
trace, truth = simulate_mot_trace(mot, 500.0, 0.5, rng)

fit = detect_steps(trace, background=cal.counts.mean())
print(f"{len(fit.change_points)} steps found, single-atom step "
      f"{fit.single_atom_unit:.0f} counts, background {fit.background:.0f}")
print(f"per-frame accuracy vs ground truth: {np.mean(fit.per_bin() == truth.per_bin):.3f}")
print(f"SNR of the one-atom level: {estimate_snr(trace, fit):.1f}")

# %%
# A histogram of frame values shows one peak per atom number.
peaks = histogram_peaks(trace.counts, 20.0)
print("histogram peaks (atoms):",
      np.round((peaks - fit.background) / fit.single_atom_unit, 2))

# %%
# First few segments.
for start, stop, n in list(zip(fit.boundaries[:-1], fit.boundaries[1:], fit.atom_counts))[:8]:
    print(f"frames {start:4d}-{stop - 1:4d}: {n} atom(s)")
