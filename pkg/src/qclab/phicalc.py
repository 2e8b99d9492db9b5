"""Convex-function condition calculus.

For a non-decreasing Phi on [0, inf] the generalized inverse is
Phi^{-1}(tau) = inf{t : Phi(t) >= tau} (inf over the empty set is +inf).
With Phi_p(t) = Phi(t^p) and H_p = log Phi_p, six tail integrals are all
equivalent ways of saying "Phi grows fast enough":

    hp-prime      int_delta^inf  H_p'(t) dt/t
    hp-stieltjes  int_delta^inf  dH_p(t)/t          (increment sums)
    hp-over-t2    int_delta^inf  H_p(t) dt/t^2
    hp-reciprocal int_0^Delta    H_p(1/t) dt
    inv-hp        int_{d*}^inf   d eta / H_p^{-1}(eta)
    inv-phip      int_{d*}^inf   d tau / (tau Phi_p^{-1}(tau))

Each classifier truncates its integral on a growing cutoff schedule and
hands the partial sums to the shared tail classifier.  For convex
non-decreasing Phi all decisive verdicts must agree, and a divergent verdict
must persist as p increases.  Lower cutoffs must avoid the zero set of
Phi_p: the log is -inf there and the integral carries no information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .divergence import CONVERGENT, DIVERGENT, TailVerdict, classify_tail

CONDITIONS = ("hp-prime", "hp-stieltjes", "hp-over-t2",
              "hp-reciprocal", "inv-hp", "inv-phip")

_SAMPLE = np.concatenate(([0.0], np.geomspace(1e-8, 1e8, 1000)))


class PhiFunction:
    """Non-decreasing function on [0, inf] with optional declared convexity.

    Monotonicity is checked on a 1000-point log-spaced sample at
    construction; declared convexity additionally requires the slope
    (Phi(t) - Phi(0))/t to be non-decreasing on the finite part of the
    sample.
    """

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], name: str,
                 convex: bool = False, value_at_inf: Optional[float] = None,
                 log_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None):
        self.fn = fn
        self.name = name
        self.convex = bool(convex)
        # exact evaluator of log Phi, usable where Phi itself overflows
        self.log_fn = log_fn
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(fn(_SAMPLE), dtype=float)
            fin = np.isfinite(vals)
            d = np.diff(vals)
            bad = d < -1e-12 * np.maximum(1.0, np.abs(vals[:-1]))
            bad &= np.isfinite(d)
            if np.any(bad):
                i = int(np.argmax(bad))
                raise ValueError(f"{self.name}: not non-decreasing near t={_SAMPLE[i]:g}")
            if convex:
                t, v = _SAMPLE[1:][fin[1:]], vals[1:][fin[1:]]
                slope = (v - vals[0]) / t
                # tolerance absorbs cancellation noise in (Phi(t)-Phi(0))/t at tiny t
                ok = np.diff(slope) >= -1e-6 * np.maximum(1.0, np.abs(slope[:-1]))
                if not np.all(ok):
                    i = int(np.argmax(~ok))
                    raise ValueError(f"{self.name}: declared convex but the slope "
                                     f"(Phi(t)-Phi(0))/t decreases near t={t[i]:g}")
        if value_at_inf is not None:
            self.value_at_inf = float(value_at_inf)
        else:
            self.value_at_inf = float(vals[-1]) if np.isfinite(vals[-1]) else math.inf

    def __call__(self, t):
        with np.errstate(over="ignore", invalid="ignore"):
            t = np.asarray(t, dtype=float)
            out = np.where(np.isinf(t), self.value_at_inf,
                           self.fn(np.where(np.isinf(t), 0.0, t)))
        return out

    def at(self, t: float) -> float:
        return float(self(np.asarray([t]))[0])

    def log_at(self, t):
        """log Phi(t), exact via log_fn when available."""
        t = np.asarray(t, dtype=float)
        if self.log_fn is not None:
            return np.asarray(self.log_fn(t), dtype=float)
        with np.errstate(divide="ignore"):
            v = np.asarray(self(t), dtype=float)
            return np.where(v > 0.0, np.log(v), -math.inf)

    def __repr__(self):
        return f"PhiFunction({self.name})"

    @property
    def tau0(self) -> float:
        """Phi(0), the floor below which the inverse vanishes."""
        return self.at(0.0)

    def zero_threshold(self, p: float = 1.0) -> float:
        """t0 = sup{t : Phi_p(t) = 0}; 0 when Phi(0) > 0, inf when Phi == 0."""
        if self.tau0 > 0.0:
            return 0.0
        ts = _SAMPLE[1:]
        vals = np.asarray(self(ts ** p), dtype=float)
        pos = vals > 0.0
        if not pos.any():
            return math.inf
        i = int(np.argmax(pos))
        if i == 0:
            return 0.0
        lo, hi = ts[i - 1], ts[i]
        for _ in range(80):
            mid = math.sqrt(lo * hi)
            if self.at(mid ** p) > 0.0:
                hi = mid
            else:
                lo = mid
        return hi


def phi_inverse(phi: PhiFunction, tau, t_cap: float = 1e30):
    """Generalized inverse inf{t : Phi(t) >= tau}, vectorized over tau.

    Monotone bisection after geometric upper-bracket expansion; +inf when no
    bracket exists below ``t_cap``.
    """
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.empty_like(tau_arr)
    phi0 = phi.tau0
    for i, tv in enumerate(tau_arr):
        if phi0 >= tv:
            out[i] = 0.0
            continue
        hi = 1.0
        while phi.at(hi) < tv:
            hi *= 4.0
            if hi > t_cap:
                hi = math.inf
                break
        if math.isinf(hi):
            out[i] = math.inf
            continue
        lo = 0.0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if phi.at(mid) >= tv:
                hi = mid
            else:
                lo = mid
        out[i] = hi
    return out if np.ndim(tau) else float(out[0])


def h_inverse(phi: PhiFunction, p: float, etas, t_cap: float = 1e300):
    """H_p^{-1}(eta) = inf{t : log Phi_p(t) >= eta}, vectorized over eta.

    Working on log Phi avoids forming e^eta, which overflows long before the
    tail behavior is resolved.
    """
    etas_arr = np.atleast_1d(np.asarray(etas, dtype=float))

    def h_at(t: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return phi.log_at(np.asarray(t, dtype=float) ** p)

    out = np.zeros_like(etas_arr)
    h0 = float(h_at(np.asarray([0.0]))[0])
    todo = etas_arr > h0
    hi = np.ones_like(etas_arr)
    open_mask = todo.copy()
    while open_mask.any():
        open_mask = todo & (h_at(hi) < etas_arr) & (hi <= t_cap)
        hi[open_mask] *= 4.0
    unreachable = todo & (hi > t_cap)
    lo = np.zeros_like(etas_arr)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        ge = h_at(mid) >= etas_arr
        hi = np.where(todo & ge, mid, hi)
        lo = np.where(todo & ~ge, mid, lo)
    out[todo] = hi[todo]
    out[unreachable] = math.inf
    return out if np.ndim(etas) else float(out[0])


@dataclass(frozen=True)
class InverseCheckReport:
    """Sampled verification that Phi^{-1}(Phi(t)) <= t."""

    passed: bool
    worst_gap: float            # max of Phi^{-1}(Phi(t)) - t over samples
    strict_points: np.ndarray   # sample t where the inequality is strict
    all_strict_on_constancy: bool


def phi_inverse_of_phi_check(phi: PhiFunction,
                             t_samples: Optional[Sequence[float]] = None,
                             tol: float = 1e-8) -> InverseCheckReport:
    """Round trip Phi^{-1}(Phi(t)) <= t, with equality away from intervals of
    constancy of Phi.  A violation beyond tolerance raises."""
    if t_samples is None:
        t_samples = np.geomspace(1e-3, 1e3, 61)
    ts = np.asarray(t_samples, dtype=float)
    back = np.array([phi_inverse(phi, phi.at(t)) for t in ts])
    gap = back - ts
    worst = float(np.max(gap))
    if worst > tol * max(1.0, float(ts[np.argmax(gap)])):
        raise ValueError(f"inverse round trip exceeded t at t={ts[np.argmax(gap)]:g} "
                         f"(gap {worst:g})")
    strict_mask = back < ts - tol * np.maximum(1.0, ts)
    strict = ts[strict_mask]
    on_constancy = []
    for t in strict:
        h = 1e-3 * max(t, 1e-6)
        on_constancy.append(abs(phi.at(t) - phi.at(max(t - h, 0.0)))
                            <= 1e-12 * max(1.0, abs(phi.at(t))))
    return InverseCheckReport(True, worst, strict,
                              all(on_constancy) if on_constancy else True)


def transforms(phi: PhiFunction, p: float):
    """Evaluators (Phi_p, H_p); H_p is -inf on the zero set of Phi_p, and its
    derivative is completed by 0 there."""
    if p <= 0:
        raise ValueError("transforms: p must be positive")

    def phi_p(t):
        t = np.asarray(t, dtype=float)
        return phi(t ** p)

    def h_p(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            return phi.log_at(t ** p)

    return phi_p, h_p


@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of one truncated divergence test."""

    condition: str
    p: float
    cutoff_start: float
    verdict: str
    trace: TailVerdict = field(repr=False, default=None)

    def __str__(self):
        return f"{self.condition}[p={self.p:g}] -> {self.verdict}"


def _decade_partials(integrand_of_s, s0: float, decades: int, nodes: int):
    """Cumulative trapezoid integrals of f(s) ds over consecutive decades of
    e^s, starting at s0."""
    partials, cutoffs, total = [], [], 0.0
    a = s0
    for _ in range(decades):
        b = a + math.log(10.0)
        s = np.linspace(a, b, nodes + 1)
        vals = np.asarray(integrand_of_s(s), dtype=float)
        if np.any(np.isinf(vals)):
            total = math.inf
        elif math.isfinite(total):
            total += float(np.trapezoid(vals, s))
        partials.append(total)
        cutoffs.append(math.exp(b))
        a = b
    return partials, cutoffs


def classify_condition(phi: PhiFunction, p: float, condition: str,
                       cutoff_start: Optional[float] = None,
                       decades: int = 10,
                       nodes_per_decade: int = 256) -> ConditionVerdict:
    """Classify one of the six tail conditions for (Phi, p).

    ``cutoff_start`` is delta for the hp-* tails, Delta for hp-reciprocal
    and delta* for the inverse forms; defaults respect the preconditions
    delta > t0, Delta < 1/t0, delta* > Phi(0)."""
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}; choose from {CONDITIONS}")
    if p <= 0:
        raise ValueError("classify_condition: p must be positive")
    phi_p, h_p = transforms(phi, p)
    t0 = phi.zero_threshold(p)
    if math.isinf(t0):
        raise ValueError(f"{phi.name}: vanishes identically; every tail condition "
                         "is indeterminate")
    tau0 = phi.tau0

    if condition in ("hp-prime", "hp-stieltjes", "hp-over-t2"):
        delta = cutoff_start if cutoff_start is not None else max(1.0, 2.0 * t0)
        if delta <= t0:
            raise ValueError(f"cutoff start {delta:g} <= t0 = {t0:g}: the integrand "
                             "is -inf/undefined on the zero set of Phi_p; choose "
                             "delta > t0")
        s0 = math.log(delta)
        if condition == "hp-prime":
            # int H_p'(t) dt/t = int H_p'(e^s) ds; central difference in log t
            def ig(s):
                t = np.exp(s)
                h = 1e-4
                hi_v = np.asarray(h_p(t * math.exp(h)), dtype=float)
                lo_v = np.asarray(h_p(t * math.exp(-h)), dtype=float)
                with np.errstate(invalid="ignore"):
                    hp = (hi_v - lo_v) / (2.0 * h * t)
                # completion rule: Phi_p = inf from some T onward makes the
                # tail integral infinite
                hp = np.where(np.isinf(hi_v) | np.isinf(lo_v), math.inf, hp)
                return np.clip(hp, 0.0, None)
            partials, cutoffs = _decade_partials(ig, s0, decades, nodes_per_decade)
        elif condition == "hp-over-t2":
            # int H_p(t) dt/t^2 = int H_p(e^s) e^{-s} ds
            def ig(s):
                t = np.exp(s)
                return h_p(t) / t
            partials, cutoffs = _decade_partials(ig, s0, decades, nodes_per_decade)
        else:
            # Lebesgue-Stieltjes increments sum (H(t_{i+1}) - H(t_i))/t_i
            partials, cutoffs, total = [], [], 0.0
            a = s0
            npd = max(nodes_per_decade, 512)
            for _ in range(decades):
                b = a + math.log(10.0)
                t = np.exp(np.linspace(a, b, npd + 1))
                hv = np.asarray(h_p(t), dtype=float)
                if np.any(np.isinf(hv)):
                    total = math.inf
                elif math.isfinite(total):
                    total += float(np.sum(np.diff(hv) / t[:-1]))
                partials.append(total)
                cutoffs.append(float(t[-1]))
                a = b
    elif condition == "hp-reciprocal":
        # int_0^Delta H_p(1/t) dt = int_{1/Delta}^inf H_p(u) du/u^2
        if cutoff_start is not None:
            if t0 > 0 and cutoff_start >= 1.0 / t0:
                raise ValueError(f"Delta = {cutoff_start:g} >= 1/t0 = {1.0 / t0:g}: "
                                 "the reciprocal integrand hits the zero set of "
                                 "Phi_p; choose Delta < 1/t0")
            big = 1.0 / cutoff_start
        else:
            big = max(1.0, 2.0 * t0)

        def ig(s):
            u = np.exp(s)
            return h_p(u) / u
        partials, cutoffs = _decade_partials(ig, math.log(big), decades, nodes_per_decade)
        cutoffs = [1.0 / c for c in cutoffs]   # shrinking t-space cutoffs
    elif condition == "inv-hp":
        # int d eta / H_p^{-1}(eta) on a linear eta grid per geometric decade
        floor = math.log(tau0) if tau0 > 0 else -math.inf
        if cutoff_start is not None:
            dstar = cutoff_start
        else:
            dstar = (floor + 1.0) if math.isfinite(floor) else 1.0
        if dstar <= floor:
            raise ValueError(f"cutoff start {dstar:g} <= log Phi(0) = H(+0): the "
                             "inverse vanishes there and the integral carries no "
                             "information")
        partials, cutoffs, total = [], [], 0.0
        a = max(dstar, 1e-6)
        nodes = max(32, nodes_per_decade // 4)
        # without an exact log evaluator, H^{-1} saturates once Phi overflows
        # (log Phi > ~709); classify only on the reliable decades
        eta_cap = math.inf if phi.log_fn is not None else 700.0
        for _ in range(decades):
            b = a * 10.0
            if b > eta_cap:
                break
            etas = np.linspace(a, b, nodes + 1)
            inv = np.asarray(h_inverse(phi, p, etas))
            vals = np.zeros_like(etas)
            ok = np.isfinite(inv) & (inv > 0)
            vals[ok] = 1.0 / inv[ok]
            if np.any(inv == 0.0):
                total = math.inf
            elif math.isfinite(total):
                total += float(np.trapezoid(vals, etas))
            partials.append(total)
            cutoffs.append(b)
            a = b
    else:  # inv-phip
        dstar = cutoff_start if cutoff_start is not None else tau0 + 1.0
        if dstar <= tau0:
            raise ValueError(f"cutoff start {dstar:g} <= Phi(0) = {tau0:g}: "
                             "Phi_p^{-1} vanishes there and the integral carries "
                             "no information")

        # int d tau/(tau Phi_p^{-1}(tau)) = int ds / Phi_p^{-1}(e^s)
        def ig(s):
            s = np.atleast_1d(s)
            inv = np.asarray(h_inverse(phi, p, s))
            vals = np.zeros_like(inv)
            ok = np.isfinite(inv) & (inv > 0)
            vals[ok] = 1.0 / inv[ok]
            vals[inv == 0.0] = math.inf
            return vals
        partials, cutoffs = _decade_partials(ig, math.log(dstar), decades,
                                             max(32, nodes_per_decade // 4))

    trace = classify_tail(partials, cutoffs)
    start = float(cutoff_start) if cutoff_start is not None else float("nan")
    return ConditionVerdict(condition, p, start, trace.verdict, trace)


def inverse_tail_condition(phi: PhiFunction, delta0: Optional[float] = None,
                           decades: int = 10) -> ConditionVerdict:
    """The p = 1 inverse tail test int d tau / (tau Phi^{-1}(tau)).

    ``delta0`` must exceed Phi(0); below it the integrand is identically
    infinite and says nothing about Phi.
    """
    tau0 = phi.tau0
    if delta0 is not None and delta0 <= tau0:
        raise ValueError(f"delta0 = {delta0:g} must exceed Phi(0) = {tau0:g}")
    return classify_condition(phi, 1.0, "inv-phip", cutoff_start=delta0,
                              decades=decades)


def log_tail_condition(phi: PhiFunction, delta: Optional[float] = None,
                       decades: int = 10) -> ConditionVerdict:
    """Tail test int_delta^inf log Phi(t) dt/t^2 (the p = 1 log form)."""
    t0 = phi.zero_threshold(1.0)
    if delta is not None and delta <= t0:
        raise ValueError(f"delta = {delta:g} must exceed t0 = {t0:g}")
    return classify_condition(phi, 1.0, "hp-over-t2", cutoff_start=delta,
                              decades=decades)


@dataclass(frozen=True)
class EquivalenceBattery:
    """Verdicts for all six conditions over a (Phi, p) grid."""

    phi_names: tuple
    ps: tuple
    verdicts: dict            # (phi name, p, condition) -> verdict string
    agreement: dict           # (phi name, p) -> decisive verdicts agree
    p_monotone: dict          # phi name -> divergence persists as p grows
    all_agree: bool


def equivalence_battery(phis: Sequence[PhiFunction], ps: Sequence[float],
                        decades: int = 10) -> EquivalenceBattery:
    """Run every condition for each (Phi, p); decisive verdicts must agree
    within a cell, and divergence must persist as p increases."""
    verdicts = {}
    agreement = {}
    for phi in phis:
        for p in ps:
            cell = []
            for cond in CONDITIONS:
                v = classify_condition(phi, p, cond, decades=decades)
                verdicts[(phi.name, p, cond)] = v.verdict
                cell.append(v.verdict)
            decisive = {v for v in cell if v in (DIVERGENT, CONVERGENT)}
            agreement[(phi.name, p)] = len(decisive) <= 1
    p_monotone = {}
    ps_sorted = sorted(ps)
    for phi in phis:
        ok = True
        for cond in CONDITIONS:
            seen_div = False
            for p in ps_sorted:
                v = verdicts[(phi.name, p, cond)]
                if seen_div and v == CONVERGENT:
                    ok = False
                if v == DIVERGENT:
                    seen_div = True
        p_monotone[phi.name] = ok
    return EquivalenceBattery(tuple(p.name for p in phis), tuple(ps), verdicts,
                              agreement, p_monotone, all(agreement.values()))


@dataclass(frozen=True)
class LinearGrowthWitness:
    C: float
    T: float


def linear_growth_check(phi: PhiFunction) -> Optional[LinearGrowthWitness]:
    """Witness (C, T) with Phi(t) >= C t on [T, inf], or None if sublinear.

    For convex non-decreasing Phi the slope (Phi(t) - Phi(0))/t is
    non-decreasing, so any sample with positive slope yields a witness; for
    general Phi the running tail minimum of the slope is used instead.
    """
    ts = np.geomspace(1e-3, 1e12, 200)
    vals = np.asarray(phi(ts), dtype=float)
    slope = np.where(np.isfinite(vals), (vals - phi.tau0) / ts, math.inf)
    # a slope still strictly decreasing at the far end means the infimum over
    # [T, inf] is 0: no linear lower bound exists (e.g. sqrt)
    if np.all(np.diff(slope[-20:]) < 0):
        return None
    tail_min = np.minimum.accumulate(slope[::-1])[::-1]
    pos = tail_min > 1e-30
    if not pos.any():
        return None
    i = int(np.argmax(pos))
    C = float(tail_min[i]) * (1.0 - 1e-9)
    T = float(ts[i])
    check = np.geomspace(T, 1e12, 100)
    cv = np.asarray(phi(check), dtype=float)
    if np.any(cv[np.isfinite(cv)] < C * check[np.isfinite(cv)]):
        return None
    return LinearGrowthWitness(C, T)


# Built-in condition functions used by batteries and the CLI.

def _log_of(f):
    def log_fn(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return f(t)
    return log_fn


def phi_exp() -> PhiFunction:
    return PhiFunction(lambda t: np.exp(np.asarray(t, dtype=float)), "exp",
                       convex=True, log_fn=_log_of(lambda t: t))


def phi_square() -> PhiFunction:
    return PhiFunction(lambda t: np.asarray(t, dtype=float) ** 2, "square",
                       convex=True, log_fn=_log_of(lambda t: 2.0 * np.log(t)))


def phi_exp_sqrt() -> PhiFunction:
    return PhiFunction(lambda t: np.exp(np.sqrt(np.asarray(t, dtype=float))),
                       "exp-sqrt", convex=False, log_fn=_log_of(np.sqrt))


def phi_linear() -> PhiFunction:
    return PhiFunction(lambda t: np.asarray(t, dtype=float), "linear",
                       convex=True, log_fn=_log_of(np.log))


def phi_t_log() -> PhiFunction:
    return PhiFunction(lambda t: np.asarray(t, dtype=float) * np.log1p(np.asarray(t, dtype=float)),
                       "t-log", convex=True,
                       log_fn=_log_of(lambda t: np.log(t) + np.log(np.log1p(t))))


def phi_exp_over_log() -> PhiFunction:
    def fn(t):
        t = np.asarray(t, dtype=float)
        return np.exp(t / np.log(math.e + t))
    return PhiFunction(fn, "exp-over-log", convex=False,
                       log_fn=_log_of(lambda t: t / np.log(math.e + t)))


BUILTIN_PHIS = {
    "exp": phi_exp,
    "square": phi_square,
    "exp-sqrt": phi_exp_sqrt,
    "linear": phi_linear,
    "t-log": phi_t_log,
    "exp-over-log": phi_exp_over_log,
}
