"""Growth-rate classification of improper integrals from truncated partials.

A truncated integral is sampled on a geometric cutoff schedule (one partial
value per decade).  The verdict separates non-summable tails (constant or
harmonically decaying per-decade increments, e.g. log and log-log growth)
from Cauchy tails (geometric or faster-than-harmonic decay).  The question
is only semi-decidable numerically, so ``inconclusive`` is a first-class
outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DIVERGENT = "divergent"
CONVERGENT = "convergent"
INCONCLUSIVE = "inconclusive"

# Increments decaying like k^-p are summable iff p > 1; the gap between the
# two thresholds absorbs finite-schedule bias in the fitted exponent.
POWER_DIVERGENT_MAX = 1.3
POWER_CONVERGENT_MIN = 1.7
GEOMETRIC_RATIO_MAX = 0.75
TINY_RELATIVE_INCREMENT = 1e-12


@dataclass(frozen=True)
class TailVerdict:
    """Classification of a truncated-integral trace."""

    verdict: str
    partials: np.ndarray = field(repr=False, default=None)
    cutoffs: np.ndarray = field(repr=False, default=None)
    power_estimate: float = float("nan")

    def __str__(self):
        return self.verdict


def classify_tail(partials, cutoffs=None) -> TailVerdict:
    """Classify cumulative partial integrals sampled once per cutoff decade."""
    I = np.asarray(partials, dtype=float)
    cut = None if cutoffs is None else np.asarray(cutoffs, dtype=float)
    if I.size < 4:
        return TailVerdict(INCONCLUSIVE, I, cut)
    if np.any(np.isinf(I)):
        return TailVerdict(DIVERGENT, I, cut)

    d = np.clip(np.diff(I), 0.0, None)
    scale = max(abs(float(I[-1])), 1.0)

    if np.all(d[-3:] < TINY_RELATIVE_INCREMENT * scale):
        return TailVerdict(CONVERGENT, I, cut)

    tail = d[d.size // 2:]
    # sustained (non-decreasing) increments: at least logarithmic growth
    if tail.size >= 3 and np.all(np.diff(tail) >= -1e-9 * scale):
        return TailVerdict(DIVERGENT, I, cut, 0.0)
    # geometric decay of increments: summable tail
    pos = tail > 0
    if np.all(tail[1:][pos[1:]] / np.maximum(tail[:-1][pos[1:]], 1e-300) < GEOMETRIC_RATIO_MAX):
        return TailVerdict(CONVERGENT, I, cut)

    # power fit d_k ~ k^-p over the second half of the schedule
    k = np.arange(1, d.size + 1, dtype=float)
    kk, dd = k[d.size // 2:], d[d.size // 2:]
    mask = dd > 0
    if mask.sum() < 3:
        return TailVerdict(CONVERGENT, I, cut)
    p_hat = -float(np.polyfit(np.log(kk[mask]), np.log(dd[mask]), 1)[0])
    if p_hat <= POWER_DIVERGENT_MAX:
        return TailVerdict(DIVERGENT, I, cut, p_hat)
    if p_hat >= POWER_CONVERGENT_MIN:
        return TailVerdict(CONVERGENT, I, cut, p_hat)
    return TailVerdict(INCONCLUSIVE, I, cut, p_hat)
