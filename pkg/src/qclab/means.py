"""Circle and disk means, radial mean profiles, and finite-mean-oscillation probes.

The central objects are the circle mean q(r) of a scalar field about a point
and the integral I(r1, r2) = int dr / (r q(r)), whose divergence as the inner
radius shrinks drives every equicontinuity criterion downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .divergence import TailVerdict, classify_tail
from .geometry import Domain, circle_quadrature

ScalarField = Callable[[np.ndarray], np.ndarray]


def constant_field(c: float) -> ScalarField:
    return lambda z: np.full(np.shape(z), float(c))


def circle_l1(Q: ScalarField, z0: complex, r: float,
              domain: Optional[Domain] = None, n: int = 1024) -> float:
    """Arc-length integral of Q over the circle |z - z0| = r clipped to the domain."""
    res = circle_quadrature(z0, r, Q, domain, n)
    if res.empty:
        raise ValueError(f"circle_l1: circle of radius {r} about {z0} misses the domain")
    return res.value

def circle_mean(Q: ScalarField, z0: complex, r: float,
                domain: Optional[Domain] = None, n: int = 1024) -> float:
    """Mean value of Q over D(z0, r): circle integral divided by arc length."""
    res = circle_quadrature(z0, r, Q, domain, n)
    if res.empty:
        raise ValueError(f"circle_mean: circle of radius {r} about {z0} misses the domain")
    return res.value / res.arc_length


@dataclass(frozen=True)
class DiskMean:
    value: float
    excluded_measure: float  # fraction of the disk carried by non-finite nodes


def disk_mean(phi: ScalarField, z0: complex, eps: float,
              domain: Optional[Domain] = None,
              n_radial: int = 64, n_angular: int = 256) -> DiskMean:
    """Area average of phi over the disk B(z0, eps).

    Radial Gauss-Legendre with the r-weight (nodes cluster toward the rim,
    where the area lives) crossed with a periodic angular trapezoid.  Nodes
    with non-finite values are dropped and their measure reported.
    """
    if eps <= 0:
        raise ValueError("disk_mean: radius must be positive")
    x, w = np.polynomial.legendre.leggauss(n_radial)
    v = 0.5 * (x + 1.0)          # radius fraction in (0, 1)
    wr = w * v                   # weight 2 r dr / eps^2, halved twice
    theta = 2.0 * math.pi * (np.arange(n_angular) + 0.5) / n_angular
    pts = complex(z0) + eps * v[:, None] * np.exp(1j * theta)[None, :]
    if domain is not None:
        inside = np.asarray(domain.contains(pts.ravel()), dtype=bool)
        if not inside.all():
            raise ValueError(f"disk_mean: disk B({z0}, {eps}) exits {domain.description}")
    vals = np.asarray(phi(pts.ravel()), dtype=float).reshape(pts.shape)
    wgt = np.broadcast_to((wr / n_angular)[:, None], vals.shape)
    finite = np.isfinite(vals)
    excluded = float(wgt[~finite].sum())
    total_w = float(wgt[finite].sum())
    if total_w == 0.0:
        raise ValueError("disk_mean: no finite samples in the disk")
    return DiskMean(float((vals[finite] * wgt[finite]).sum() / total_w), excluded)


@dataclass(frozen=True)
class FmoEstimate:
    """Disk-mean oscillations of a field at a point over a shrinking schedule."""

    center: complex
    epsilons: np.ndarray
    oscillations: np.ndarray
    disk_means: np.ndarray
    verdict: str
    excluded_max: float = 0.0


FMO_GROWTH_SLOPE = 0.25   # oscillation growth per eps-decade that flags unbounded
FMO_FLAT_RTOL = 0.05


def fmo_estimate(phi: ScalarField, z0: complex,
                 epsilons: Optional[Sequence[float]] = None,
                 domain: Optional[Domain] = None) -> FmoEstimate:
    """Estimate whether phi has finite mean oscillation at z0.

    For each eps the oscillation is the disk mean of |phi - mean_eps(phi)|.
    Verdict: bounded when the tail is non-increasing (or stays under a cap),
    unbounded when it keeps growing by at least FMO_GROWTH_SLOPE per decade,
    inconclusive otherwise.
    """
    if epsilons is None:
        epsilons = np.geomspace(1e-1, 1e-5, 9)
    eps = np.asarray(sorted(epsilons, reverse=True), dtype=float)
    means = np.empty_like(eps)
    osc = np.empty_like(eps)
    excluded = 0.0
    for i, e in enumerate(eps):
        dm = disk_mean(phi, z0, e, domain)
        means[i] = dm.value
        o = disk_mean(lambda z, m=dm.value: np.abs(phi(z) - m), z0, e, domain)
        osc[i] = o.value
        excluded = max(excluded, dm.excluded_measure, o.excluded_measure)

    tail = osc[-4:]
    scale = max(1.0, float(np.abs(osc).max()))
    # oscillation growth per eps-decade, fitted on the tail of the schedule
    slope = float(np.polyfit(np.log10(1.0 / eps[-5:]), osc[-5:], 1)[0]) if len(eps) >= 5 else 0.0
    if np.all(np.diff(tail) <= FMO_FLAT_RTOL * scale) and slope < FMO_GROWTH_SLOPE:
        verdict = "bounded"
    elif slope >= FMO_GROWTH_SLOPE:
        verdict = "unbounded"
    else:
        verdict = "inconclusive"
    return FmoEstimate(complex(z0), eps, osc, means, verdict, excluded)


@dataclass(frozen=True)
class MeanProfile:
    """Circle means q(r) of a field about a center, on an increasing radius grid.

    ``q_fn`` evaluates the profile at arbitrary radii (needed by the adaptive
    integrals); when absent it is filled in by log-log interpolation of the
    samples.  ``breakpoints`` mark known kinks for the quadrature.
    """

    center: complex
    radii: np.ndarray
    values: np.ndarray
    q_fn: Optional[Callable[[float], float]] = None
    breakpoints: tuple = ()

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or r.size < 2 or np.any(np.diff(r) <= 0):
            raise ValueError("MeanProfile: radii must be strictly increasing")

    @classmethod
    def from_field(cls, Q: ScalarField, z0: complex,
                   radii: Optional[Sequence[float]] = None,
                   domain: Optional[Domain] = None,
                   breakpoints: tuple = ()) -> "MeanProfile":
        if radii is None:
            radii = np.geomspace(1e-6, 1.0, 121)
        radii = np.asarray(radii, dtype=float)
        vals = np.array([circle_mean(Q, z0, r, domain) for r in radii])
        return cls(complex(z0), radii, vals,
                   q_fn=lambda r: circle_mean(Q, z0, float(r), domain),
                   breakpoints=breakpoints)

    def evaluate(self, r: float) -> float:
        if self.q_fn is not None:
            return float(self.q_fn(r))
        # log-log linear interpolation between samples
        lr = math.log(r)
        lv = np.interp(lr, np.log(self.radii), np.log(np.maximum(self.values, 1e-300)))
        return math.exp(lv)


def I_integral(profile: MeanProfile, r1: float, r2: float) -> float:
    """int_{r1}^{r2} dr / (r q(r)); radii with infinite q contribute nothing."""
    lo, hi = float(profile.radii[0]), float(profile.radii[-1])
    if not (lo <= r1 < r2 <= hi * (1 + 1e-12)):
        raise ValueError(f"I_integral: [{r1}, {r2}] outside profile range [{lo}, {hi}]")

    def integrand(r):
        q = profile.evaluate(r)
        if not math.isfinite(q):
            return 0.0
        return 1.0 / (r * q)

    pts = [b for b in profile.breakpoints if r1 < b < r2]
    val, _ = quad(integrand, r1, r2, points=pts or None, limit=200)
    return float(val)


def divergence_at_zero(profile: MeanProfile, eps0: float,
                       decades: int = 10) -> TailVerdict:
    """Classify whether int_0 dr/(r q(r)) diverges at the center.

    Partial integrals I(delta_k, eps0) are taken on the geometric schedule
    delta_k = eps0 10^{-k} and handed to the shared tail classifier.  The
    profile must evaluate at arbitrarily small radii (q_fn present).
    """
    if profile.q_fn is None:
        raise ValueError("divergence_at_zero needs an evaluable profile (q_fn), "
                         "not a fixed sample list")
    partials = []
    total = 0.0
    hi = float(eps0)
    cutoffs = eps0 * 10.0 ** (-np.arange(1, decades + 1, dtype=float))
    for lo in cutoffs:
        def integrand(r):
            q = profile.q_fn(r)
            return 0.0 if not math.isfinite(q) else 1.0 / (r * q)
        seg, _ = quad(integrand, lo, hi, limit=200)
        total += seg
        partials.append(total)
        hi = lo
    return classify_tail(partials, cutoffs)


def lebesgue_point_check(Q: ScalarField, z0: complex,
                         epsilons: Optional[Sequence[float]] = None,
                         domain: Optional[Domain] = None,
                         tol: float = 1e-2) -> bool:
    """True iff disk means of |Q - Q(z0)| tend to 0 over the schedule."""
    q0 = float(np.asarray(Q(np.asarray([z0], dtype=complex)))[0])
    if not math.isfinite(q0):
        raise ValueError("lebesgue_point_check: Q(z0) is not finite")
    if epsilons is None:
        epsilons = np.geomspace(1e-1, 1e-4, 7)
    eps = np.asarray(sorted(epsilons, reverse=True), dtype=float)
    devs = np.array([disk_mean(lambda z: np.abs(Q(z) - q0), z0, e, domain).value
                     for e in eps])
    return bool(devs[-1] <= tol and devs[-1] <= devs[0] + tol)


@dataclass(frozen=True)
class LogSingularityFit:
    """Envelope fit of a profile against c log(1/r)."""

    c: float
    residual: float
    flat: bool   # growth order 0: the profile does not actually grow like log


def log_singularity_fit(profile: MeanProfile) -> LogSingularityFit:
    """Minimal c with q(r) <= c log(1/r) on all samples below r = 0.1."""
    mask = profile.radii < 0.1
    if mask.sum() < 8:
        raise ValueError("log_singularity_fit: need at least 8 sample radii below 0.1")
    r = profile.radii[mask]
    q = profile.values[mask]
    L = np.log(1.0 / r)
    c = float(np.max(q / L))
    residual = float(np.sqrt(np.mean((q - c * L) ** 2)))
    # slope of q against log(1/r); near zero means no logarithmic growth
    slope = float(np.polyfit(L, q, 1)[0])
    return LogSingularityFit(c, residual, flat=abs(slope) < 1e-3 * max(1.0, c))
