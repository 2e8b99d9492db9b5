"""Distortion-bound checkers, class membership, and equicontinuity probes.

Every check compares a computed left side against a computed right side on
explicit samples and returns a BoundReport; nothing is assumed from theory.
The built-in battery pairs the closed-form test maps with three rings about
the origin, covering constant, logarithmic, and large distortion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .divergence import CONVERGENT, DIVERGENT
from .geometry import Domain, PolarGrid, Ring, chordal, disk_domain, spherical_diameter, INF
from .mappings import (MappingModel, distortion_field, identity_map,
                       log_distortion_map, radial_stretch, radial_map,
                       shrinking_stretch_family)
from .means import MeanProfile, ScalarField, circle_l1, circle_mean, divergence_at_zero, fmo_estimate
from .phicalc import PhiFunction, classify_condition, inverse_tail_condition, linear_growth_check, phi_inverse

# Closed-form comparisons get arithmetic tolerance; quadrature-vs-quadrature
# comparisons get a 1% allowance.
TOL_CLOSED_FORM = 1e-6
TOL_QUADRATURE = 1e-2


@dataclass(frozen=True)
class BoundSpec:
    """Parameters of one bound check."""

    kind: str
    c: float = math.nan
    p: float = math.nan
    delta_gap: float = 1.0      # lower bound on the omitted-set diameter
    eps0: float = math.nan
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BoundReport:
    """One verified inequality over a sample set."""

    kind: str
    hypothesis: str             # verified | violated | assumed
    lhs: np.ndarray
    rhs: np.ndarray
    samples: np.ndarray
    passed: bool
    margin: float               # min(rhs - lhs) over samples
    detail: dict = field(default_factory=dict)

    @staticmethod
    def from_sides(kind: str, hypothesis: str, lhs, rhs, samples,
                   tol: float = TOL_CLOSED_FORM, detail: Optional[dict] = None) -> "BoundReport":
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        margin = float(np.min(rhs - lhs)) if lhs.size else math.inf
        passed = bool(np.all(lhs <= rhs + tol * np.maximum(1.0, np.abs(rhs))))
        return BoundReport(kind, hypothesis, lhs, rhs, np.asarray(samples),
                           passed, margin, detail or {})


def exponential_decay_bound(delta_gap: float, c: float, p: float, I_val: float) -> float:
    """(32/Delta) exp(-(2 pi / c) I^{2-p}), the generic decay bound."""
    if delta_gap <= 0 or c <= 0 or p > 2 or I_val <= 0:
        raise ValueError("exponential_decay_bound: need Delta > 0, c > 0, p <= 2, I > 0")
    return (32.0 / delta_gap) * math.exp(-(2.0 * math.pi / c) * I_val ** (2.0 - p))


def weighted_hypothesis_check(K: ScalarField, z0: complex, eps0: float,
                              psi: Callable[[np.ndarray], np.ndarray],
                              c: float, p: float,
                              eps_schedule: Optional[Sequence[float]] = None,
                              domain: Optional[Domain] = None) -> BoundReport:
    """Check the weighted budget int K psi^2(|z-z0|) dA <= c I^p(eps) over a
    shrinking schedule, where I(eps) = int_eps^eps0 psi and must stay finite
    and positive.

    Reports the minimal admissible c (max over eps of LHS / I^p).
    """
    if p > 2:
        raise ValueError("weighted_hypothesis_check: p must be <= 2")
    if eps_schedule is None:
        eps_schedule = np.geomspace(eps0 / 2.0, eps0 / 64.0, 6)
    eps_schedule = np.asarray(sorted(eps_schedule, reverse=True), dtype=float)
    lhs = np.empty_like(eps_schedule)
    rhs = np.empty_like(eps_schedule)
    i_vals = np.empty_like(eps_schedule)
    for i, e in enumerate(eps_schedule):
        I_val, _ = quad(lambda t: float(np.asarray(psi(np.asarray([t])))[0]), e, eps0, limit=200)
        i_vals[i] = I_val
        if not (0.0 < I_val < math.inf):
            return BoundReport("weighted-budget", "violated",
                               np.array([]), np.array([]), eps_schedule, False,
                               -math.inf, {"reason": f"I({e:g}) = {I_val:g}"})
        # int K psi^2 dA over the annulus reduces to int ||K||_1(t) psi(t)^2 dt
        def rad(t):
            pv = float(np.asarray(psi(np.asarray([t])))[0])
            return circle_l1(K, z0, t, domain) * pv * pv
        lhs[i], _ = quad(rad, e, eps0, limit=200)
        rhs[i] = c * I_val ** p
    c_min = float(np.max(lhs / i_vals ** p))
    rep = BoundReport.from_sides("weighted-budget", "verified", lhs, rhs,
                                 eps_schedule, TOL_QUADRATURE,
                                 {"c_min": c_min, "I": i_vals})
    return rep


def _mean_profile_interpolant(f: MappingModel, z0: complex, eps0: float,
                              n_grid: int = 400):
    """Cumulative radial integral I(r) = int_r^eps0 dt/(t q(t)) on a log grid,
    with q the circle mean of the distortion about z0."""
    K = distortion_field(f)
    rg = np.geomspace(eps0 * 1e-6, eps0, n_grid)
    q = np.array([circle_mean(K, z0, r, f.domain) for r in rg])
    integrand = np.where(np.isfinite(q) & (q > 0), 1.0 / (rg * q), 0.0)
    s = np.log(rg)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (integrand[1:] * rg[1:] + integrand[:-1] * rg[:-1]) * np.diff(s))))
    total = cum[-1]

    def I_of_r(r):
        r = np.asarray(r, dtype=float)
        c = np.interp(np.log(np.clip(r, rg[0], rg[-1])), s, cum)
        return total - c

    return I_of_r, rg, q


def ring_mean_bound_check(f: MappingModel, z0: complex, eps0: float,
                          delta_gap: float,
                          n_samples: int = 10000,
                          seed: int = 0) -> BoundReport:
    """Chordal decay bound from the circle means of the distortion:

        h(f(z), f(z0)) <= (32/Delta) exp(-int_{|z-z0|}^{eps0} dr/(r q(r))).

    Samples are drawn uniformly in angle and log radius inside B(z0, eps0).
    """
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(math.log(eps0 * 1e-3), math.log(eps0 * 0.999), n_samples))
    th = rng.uniform(0.0, 2.0 * math.pi, n_samples)
    z = z0 + r * np.exp(1j * th)
    I_of_r, rg, q = _mean_profile_interpolant(f, z0, eps0)
    if np.any(~np.isfinite(q[rg > eps0 * 1e-5])) or np.any(q[rg > eps0 * 1e-5] <= 0):
        raise ValueError("ring_mean_bound_check: circle mean of the distortion "
                         "vanishes on some radius")
    lhs = chordal(f(z), np.asarray(f(np.asarray([complex(z0)])))[0])
    rhs = (32.0 / delta_gap) * np.exp(-I_of_r(r))
    return BoundReport.from_sides("ring-mean-decay", "verified", lhs, rhs, z,
                                  TOL_QUADRATURE, {"eps0": eps0, "center": z0})


def log_majorant_bound_check(f: MappingModel, z0: complex, eps0: float,
                             delta_gap: float, c: float,
                             n_samples: int = 2000,
                             seed: int = 0) -> BoundReport:
    """When K_f <= c log(1/|z-z0|) near z0, the power-form bound

        (32/Delta) [log(1/eps0) / log(1/|z-z0|)]^{1/c}

    must dominate the exponential ring-mean bound at every sample."""
    if eps0 >= 1.0:
        raise ValueError("log_majorant_bound_check: eps0 must be below 1")
    K = distortion_field(f)
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(math.log(eps0 * 1e-3), math.log(eps0 * 0.999), n_samples))
    th = rng.uniform(0.0, 2.0 * math.pi, n_samples)
    z = z0 + r * np.exp(1j * th)
    kv = np.asarray(K(z), dtype=float)
    majorant = c * np.log(1.0 / r)
    hyp_ok = np.all(kv <= majorant * (1.0 + 1e-9))
    I_of_r, _, _ = _mean_profile_interpolant(f, z0, eps0)
    exp_bound = (32.0 / delta_gap) * np.exp(-I_of_r(r))
    power_bound = (32.0 / delta_gap) * (math.log(1.0 / eps0) / np.log(1.0 / r)) ** (1.0 / c)
    return BoundReport.from_sides("log-majorant-power", "verified" if hyp_ok else "violated",
                                  exp_bound, power_bound, z, TOL_QUADRATURE,
                                  {"c": c, "eps0": eps0})


def disk_power_bound_check(f: MappingModel, c: Optional[float] = None,
                           n_samples: int = 10000, seed: int = 0,
                           eps_schedule: Optional[Sequence[float]] = None) -> BoundReport:
    """Disk-to-disk growth bound |f(z)| <= 64 |z|^{2 pi / c}, where c is the
    minimal constant with int_{eps<|z|<1} K dA/|z|^2 <= c log(1/eps).

    Requires f(0) = 0 and f mapping the unit disk into itself.
    """
    f0 = np.asarray(f(np.asarray([0j])))[0]
    if abs(f0) > 1e-12:
        raise ValueError(f"disk_power_bound_check: f(0) = {f0}, expected 0")
    K = distortion_field(f)
    if eps_schedule is None:
        eps_schedule = np.geomspace(0.5, 1e-3, 7)
    cs = []
    hyp = []
    for e in eps_schedule:
        def rad(t):
            return circle_l1(K, 0j, t, f.domain) / t ** 2
        val, _ = quad(rad, e, 1.0 - 1e-9, limit=200)
        hyp.append(val)
        cs.append(val / math.log(1.0 / e))
    c_min = float(np.max(cs))
    c_used = c_min if c is None else float(c)
    hypothesis = "verified" if c is None or c_min <= c * (1.0 + TOL_QUADRATURE) else "violated"
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0.0, 1.0, n_samples))
    th = rng.uniform(0.0, 2.0 * math.pi, n_samples)
    z = r * np.exp(1j * th)
    lhs = np.abs(f(z))
    rhs = 64.0 * r ** (2.0 * math.pi / c_used)
    return BoundReport.from_sides("disk-power", hypothesis, lhs, rhs, z,
                                  TOL_QUADRATURE,
                                  {"c_min": c_min, "c_used": c_used,
                                   "hypothesis_integrals": np.asarray(hyp)})


def fmo_power_exponent_fit(f: MappingModel, z0: complex,
                           eps0_schedule: Optional[Sequence[float]] = None,
                           delta_gap: float = 1.0,
                           n_samples: int = 2000, seed: int = 0) -> tuple:
    """Largest beta0 > 0 such that

        h(f(z), f(z0)) <= (32/Delta) [log(1/eps0)/log(1/|z-z0|)]^{beta0}

    holds at all samples, over a geometric eps0 schedule.  The distortion
    must have finite mean oscillation at z0 (bounded verdict); otherwise the
    hypothesis fails and this raises.
    """
    K = distortion_field(f)
    est = fmo_estimate(K, z0, domain=f.domain)
    if est.verdict == "unbounded":
        raise ValueError("fmo_power_exponent_fit: distortion mean oscillation "
                         "is unbounded at the center; hypothesis fails")
    if eps0_schedule is None:
        eps0_schedule = (0.5, 0.25, 0.1)
    rng = np.random.default_rng(seed)
    best = 0.0
    f0 = np.asarray(f(np.asarray([complex(z0)])))[0]
    for eps0 in eps0_schedule:
        r = np.exp(rng.uniform(math.log(eps0 * 1e-3), math.log(eps0 * 0.999), n_samples))
        th = rng.uniform(0.0, 2.0 * math.pi, n_samples)
        z = z0 + r * np.exp(1j * th)
        lhs = chordal(f(z), f0)
        bracket = math.log(1.0 / eps0) / np.log(1.0 / r)   # in (0, 1)
        # largest beta with lhs <= (32/Delta) bracket^beta at every sample
        with np.errstate(divide="ignore"):
            ratio = np.log(np.maximum(lhs, 1e-300) * delta_gap / 32.0) / np.log(bracket)
        beta_max = float(np.min(ratio[np.isfinite(ratio)])) if np.any(np.isfinite(ratio)) else math.inf
        best = max(best, min(beta_max, 16.0))
    return best, best > 0.0


def ring_tail_bound_check(Q: ScalarField, phi: PhiFunction, p: float,
                          eps_schedule: Sequence[float] = (0.1, 0.2, 0.4),
                          domain: Optional[Domain] = None,
                          grid: tuple = (512, 256)) -> BoundReport:
    """Two-sided mean inequality on the unit disk:

        int_eps^1 dr/(r q^{1/p}(r)) >= 1/2 int_{e M}^{M/eps^2}
                                           d tau/(tau [Phi^{-1}(tau)]^{1/p}),

    with q the circle mean of Q and M = M(eps) the area mean of Phi(Q) over
    the ring R(eps, 1, 0).  An empty right-hand range contributes 0.
    """
    eps_schedule = np.asarray(sorted(eps_schedule), dtype=float)
    lhs = np.empty_like(eps_schedule)
    rhs = np.empty_like(eps_schedule)
    means = np.empty_like(eps_schedule)
    for i, eps in enumerate(eps_schedule):
        def lhs_ig(r):
            q = circle_mean(Q, 0j, r, domain)
            if not (math.isfinite(q) and q > 0):
                return 0.0
            return 1.0 / (r * q ** (1.0 / p))
        lhs[i], _ = quad(lhs_ig, eps, 1.0, limit=200)

        ring = Ring(0j, eps, 1.0)
        g = PolarGrid.build(ring, grid[0], grid[1])
        vals = np.asarray(phi(np.asarray(Q(g.nodes().ravel()), dtype=float)), dtype=float)
        M = float(np.sum(vals.reshape(g.weights.shape) * g.weights) / g.total_area())
        if not math.isfinite(M):
            raise ValueError(f"ring_tail_bound_check: mean of Phi(Q) over the "
                             f"ring R({eps:g}) is not finite")
        means[i] = M
        lo, hi = math.e * M, M / eps ** 2
        if lo >= hi:
            rhs[i] = 0.0
            continue

        def rhs_ig(tau):
            inv = phi_inverse(phi, tau)
            if not math.isfinite(inv) or inv <= 0:
                return 0.0
            return 1.0 / (tau * inv ** (1.0 / p))
        val, _ = quad(rhs_ig, lo, hi, limit=400)
        rhs[i] = 0.5 * val
    # inequality direction: lhs >= rhs
    rep = BoundReport.from_sides("ring-tail", "verified", rhs, lhs, eps_schedule,
                                 TOL_QUADRATURE, {"p": p, "means": means,
                                                  "lhs": lhs, "rhs": rhs})
    return rep


def truncated_tail_bound_check(Q: ScalarField, phi: PhiFunction, p: float,
                               lam: float,
                               eps_schedule: Sequence[float] = (0.1, 0.2, 0.4),
                               domain: Optional[Domain] = None,
                               grid: tuple = (512, 256)) -> BoundReport:
    """Truncated variant: LHS exponent lam/p on the mean of the original Q;
    the right side uses Q_* = max(Q, 1).  Requires lam in (0, 1)."""
    if not (0.0 < lam < 1.0):
        raise ValueError("truncated_tail_bound_check: lambda must be in (0, 1)")
    Q_star = lambda z: np.maximum(np.asarray(Q(z), dtype=float), 1.0)
    eps_schedule = np.asarray(sorted(eps_schedule), dtype=float)
    lhs = np.empty_like(eps_schedule)
    for i, eps in enumerate(eps_schedule):
        def lhs_ig(r):
            q = circle_mean(Q, 0j, r, domain)
            if not (math.isfinite(q) and q > 0):
                return 0.0
            return 1.0 / (r * q ** (lam / p))
        lhs[i], _ = quad(lhs_ig, eps, 1.0, limit=200)
    inner = ring_tail_bound_check(Q_star, phi, p, eps_schedule, domain, grid)
    # inner.lhs is the RHS integral; compare against the lam-weighted LHS
    rhs = inner.lhs
    return BoundReport.from_sides("truncated-ring-tail", "verified", rhs, lhs,
                                  eps_schedule, TOL_QUADRATURE,
                                  {"p": p, "lambda": lam})


def integral_divergence_check(Q: ScalarField, phi: PhiFunction, p: float,
                              domain: Optional[Domain] = None) -> dict:
    """Finite Phi(Q) area integral plus a divergent inverse tail force

        int_0^1 dr / (r q^{1/p}(r)) = inf.

    Returns a dict with the hypothesis checks and the conclusion verdict;
    conclusion is 'not-applicable' when a hypothesis fails.
    """
    ring = Ring(0j, 1e-6, 1.0)
    g = PolarGrid.build(ring, 512, 128)
    vals = np.asarray(phi(np.asarray(Q(g.nodes().ravel()), dtype=float)), dtype=float)
    area_integral = float(np.sum(vals.reshape(g.weights.shape) * g.weights))
    finite = math.isfinite(area_integral)
    tail = classify_condition(phi, p, "inv-phip")
    applicable = finite and tail.verdict == DIVERGENT
    out = {"area_integral": area_integral, "area_finite": finite,
           "tail_verdict": tail.verdict, "conclusion": "not-applicable",
           "passed": None}
    if not applicable:
        return out
    prof = MeanProfile.from_field(lambda z: np.asarray(Q(z), dtype=float) ** (1.0 / p),
                                  0j, np.geomspace(1e-7, 1.0, 30), domain)
    verdict = divergence_at_zero(prof, 1.0)
    out["conclusion"] = verdict.verdict
    out["passed"] = verdict.verdict == DIVERGENT
    return out


@dataclass(frozen=True)
class ClassConstraint:
    """Membership constraint: spherically weighted Phi(K) budget M and a
    lower bound Delta on the spherical diameter of the omitted set."""

    phi: PhiFunction
    budget: float
    delta_gap: float
    domain: Domain = field(default_factory=disk_domain)

    def __post_init__(self):
        if self.budget <= 0:
            raise ValueError("ClassConstraint: budget must be positive")
        if not (0.0 < self.delta_gap < 1.0):
            raise ValueError("ClassConstraint: delta_gap must be in (0, 1)")


@dataclass(frozen=True)
class MembershipReport:
    member: bool
    weighted_integral: float
    unweighted_integral: float
    omitted_diameter: float
    budget: float
    bounded_domain_budget: float    # M (1 + sup|z|^2), usable for the unweighted form
    diagnosis: str = ""


def class_membership(f: MappingModel, constraint: ClassConstraint,
                     n_boundary: int = 720, grid: tuple = (512, 128)) -> MembershipReport:
    """Check the spherically weighted distortion budget and the omitted-set
    diameter for one map.

    The omitted set is estimated from the image of a dense sample: anything
    at or beyond the sampled image radius, together with infinity, is
    omitted for maps into a disk.
    """
    K = distortion_field(f)
    ring = Ring(0j, 1e-7, 1.0 - 1e-9)
    g = PolarGrid.build(ring, grid[0], grid[1])
    nodes = g.nodes()
    kv = np.asarray(K(nodes.ravel()), dtype=float).reshape(g.weights.shape)
    with np.errstate(over="ignore"):
        pv = np.asarray(constraint.phi(kv), dtype=float)
    weight = 1.0 / (1.0 + np.abs(nodes) ** 2) ** 2
    weighted = float(np.sum(pv * weight * g.weights))
    unweighted = float(np.sum(pv * g.weights))
    # image extent from boundary-adjacent and interior circles
    theta = 2.0 * math.pi * np.arange(n_boundary) / n_boundary
    sup_img = 0.0
    for rr in (0.25, 0.5, 0.9, 0.999999):
        sup_img = max(sup_img, float(np.max(np.abs(f(rr * np.exp(1j * theta))))))
    omit_pts = [INF] + [sup_img * np.exp(1j * t) for t in np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)]
    omitted_diam = spherical_diameter(omit_pts)
    delta_star = 1.0   # sup |z| over the unit disk
    m_star = constraint.budget * (1.0 + delta_star ** 2)
    if not math.isfinite(weighted):
        return MembershipReport(False, weighted, unweighted, omitted_diam,
                                constraint.budget, m_star,
                                "weighted distortion integral is infinite")
    member = weighted <= constraint.budget and omitted_diam >= constraint.delta_gap
    diag = ""
    if weighted > constraint.budget:
        diag = f"budget exceeded: {weighted:.4g} > {constraint.budget:.4g}"
    elif omitted_diam < constraint.delta_gap:
        diag = f"omitted set too small: {omitted_diam:.4g} < {constraint.delta_gap:.4g}"
    return MembershipReport(member, weighted, unweighted, omitted_diam,
                            constraint.budget, m_star, diag)


@dataclass(frozen=True)
class ContinuityTable:
    """Per-member modulus-of-continuity table at one center.

    ``deltas[label][eps]`` is the largest sampled delta with
    sup_{|z - z0| < delta} h(f(z), f(z0)) < eps, or None when even the
    smallest sampled delta fails.  The family is uniformly equicontinuous at
    the center (verdict True) iff every member has a delta for every target.
    """

    center: complex
    eps_targets: tuple
    labels: tuple
    deltas: dict
    uniform: bool
    gaps: dict                  # label -> sup over smallest delta of h


def equicontinuity_probe(family: Sequence[MappingModel], z0: complex,
                         eps_targets: Sequence[float] = (0.5, 0.25, 0.1, 0.05),
                         delta_grid: Optional[np.ndarray] = None,
                         n_angles: int = 16) -> ContinuityTable:
    """Empirical equicontinuity of a finite family at a point.

    For each member, h(f(z), f(z0)) is sampled on circles of geometrically
    spaced radii; the running maximum over radii below delta gives
    sup_{|z-z0|<delta} h for every delta of the grid at once.
    """
    if delta_grid is None:
        delta_grid = np.geomspace(1e-7, 0.5, 36)
    delta_grid = np.asarray(sorted(delta_grid), dtype=float)
    theta = 2.0 * math.pi * np.arange(n_angles) / n_angles
    deltas = {}
    gaps = {}
    uniform = True
    for f in family:
        f0 = np.asarray(f(np.asarray([complex(z0)])))[0]
        sup_h = np.empty_like(delta_grid)
        running = 0.0
        for i, r in enumerate(delta_grid):
            z = z0 + r * np.exp(1j * theta)
            running = max(running, float(np.max(chordal(f(z), f0))))
            sup_h[i] = running
        row = {}
        for eps in eps_targets:
            ok = sup_h < eps
            row[eps] = float(delta_grid[np.nonzero(ok)[0][-1]]) if ok.any() else None
            if row[eps] is None:
                uniform = False
        deltas[f.label] = row
        gaps[f.label] = float(sup_h[0])
    return ContinuityTable(complex(z0), tuple(eps_targets),
                           tuple(f.label for f in family), deltas, uniform, gaps)


@dataclass(frozen=True)
class NecessityDemo:
    """A family certifying that a convergent inverse tail admits a budget-
    respecting family that is not equicontinuous at the origin."""

    family: tuple
    table: ContinuityTable
    memberships: tuple
    gamma: float
    lam: float
    target_radius: float        # limiting image radius of |z| = 2^-m
    succeeded: bool


def _expansion_member(gamma: float, lam: float, m: int) -> MappingModel:
    """Radial homeomorphism of the unit disk onto itself: distortion
    lam r^{-gamma} on (delta_m, 1) with delta_m = 2^-m, constant inside."""
    delta_m = 2.0 ** (-m)
    sg = delta_m ** gamma
    beta = sg / lam                       # inner power exponent, in (0, 1]

    def s_of(r):
        return (1.0 - r ** gamma) / (lam * gamma)

    rho_delta = math.exp(-s_of(delta_m))

    def rho(r):
        r = np.asarray(r, dtype=float)
        outer = np.exp(-(1.0 - r ** gamma) / (lam * gamma))
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            inner = rho_delta * (r / delta_m) ** beta
        return np.where(r >= delta_m, outer, inner)

    def rho_prime(r):
        r = np.asarray(r, dtype=float)
        outer = np.exp(-(1.0 - r ** gamma) / (lam * gamma)) * r ** (gamma - 1.0) / lam
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            inner = rho_delta * beta / delta_m * (r / delta_m) ** (beta - 1.0)
        return np.where(r >= delta_m, outer, inner)

    return radial_map(rho, rho_prime, disk_domain(),
                      f"expansion(gamma={gamma:g}, lam={lam:g}, m={m})",
                      check_radii=np.geomspace(delta_m * 1e-3, 0.999, 96))


def necessity_demo(phi: PhiFunction, budget: float, delta_gap: float,
                   n_members: int = 20,
                   min_target_radius: float = 0.15) -> NecessityDemo:
    """Construct a one-parameter family inside the (phi, budget, delta_gap)
    class whose equicontinuity probe at 0 fails.

    Requires the inverse tail of phi to be convergent (a divergent tail
    guarantees equicontinuity, so no such family can exist) and an eventual
    linear lower bound on phi.  Member m has radial distortion
    K(r) = lam r^{-gamma} down to radius 2^-m and constant below, so points
    at radius 2^-m are pushed out to a fixed image radius while the
    budget integral stays bounded in m.  Membership and probe failure are
    checked, not assumed.
    """
    tail = inverse_tail_condition(phi)
    if tail.verdict == DIVERGENT:
        raise ValueError(f"necessity_demo: inverse tail of {phi.name} diverges; "
                         "the class is equicontinuous and no counterexample exists")
    if tail.verdict != CONVERGENT:
        raise ValueError(f"necessity_demo: inverse tail of {phi.name} is "
                         f"{tail.verdict}; cannot certify a construction")
    if linear_growth_check(phi) is None:
        raise ValueError(f"necessity_demo: {phi.name} has no eventual linear "
                         "lower bound")

    # search a profile K(r) = lam r^-gamma whose weighted budget fits and
    # whose limiting image radius exp(-1/(lam gamma)) is largest
    best = None
    for gamma in np.linspace(0.25, 1.0, 16):
        for lam in np.geomspace(1.0, 40.0, 40):
            def ig(r):
                return float(np.asarray(phi(np.asarray([lam * r ** (-gamma)])))[0]) \
                    * r / (1.0 + r * r) ** 2
            val, _ = quad(ig, 1e-9, 1.0, limit=300)
            b = 2.0 * math.pi * val
            if not math.isfinite(b) or b > 0.95 * budget:
                continue
            rho_star = math.exp(-1.0 / (lam * gamma))
            if best is None or rho_star > best[0]:
                best = (rho_star, gamma, lam, b)
    if best is None or best[0] < min_target_radius:
        raise ValueError("necessity_demo: no expansion profile fits the budget "
                         f"{budget:g} with a usable image radius")
    rho_star, gamma, lam, _ = best

    members = tuple(_expansion_member(gamma, lam, m) for m in range(1, n_members + 1))
    constraint = ClassConstraint(phi, budget, delta_gap)
    memberships = tuple(class_membership(f, constraint) for f in members)
    gap = rho_star / math.sqrt(1.0 + rho_star ** 2)
    eps_targets = (0.9 * gap, 0.5 * gap)
    table = equicontinuity_probe(members, 0j, eps_targets,
                                 delta_grid=np.geomspace(1e-7, 0.5, 36))
    succeeded = all(m.member for m in memberships) and not table.uniform
    return NecessityDemo(members, table, memberships, gamma, lam, rho_star, succeeded)


# ---------------------------------------------------------------------------
# Built-in battery: maps x rings covering constant, log, and large distortion

def battery_maps() -> list:
    return [identity_map(), radial_stretch(2.0), radial_stretch(3.0),
            log_distortion_map(), shrinking_stretch_family([10])[0]]


def battery_rings() -> list:
    return [Ring(0j, 0.05, 0.5), Ring(0j, 0.1, 0.9), Ring(0j, 0.2, 0.4)]
