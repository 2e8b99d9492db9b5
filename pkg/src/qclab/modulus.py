"""Conformal modulus of ring curve families.

Closed forms for the round annulus, a discrete variational solver, the
extremal densities/weights, and the weighted ring functionals.  For the
family connecting the two boundary circles of R(r1, r2, z0) the modulus is
2 pi / log(r2/r1); for the family separating them it is the reciprocal
value log(r2/r1) / (2 pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .geometry import Domain, PolarGrid, Ring, circle_quadrature
from .mappings import MappingModel
from .means import ScalarField, circle_l1, circle_mean

CONNECTING = "connecting"
SEPARATING = "separating"
CIRCLES = "circles"
_KINDS = (CONNECTING, SEPARATING, CIRCLES)


@dataclass(frozen=True)
class CurveFamilySpec:
    """A ring curve family: radial connectors, separating loops, or the
    family of circles about the center (sampled identically to separating
    loops, whose extremals they are)."""

    kind: str
    ring: Ring
    domain: Optional[Domain] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class GridDensity:
    """Nonnegative metric density sampled on a polar grid."""

    grid: PolarGrid
    values: np.ndarray

    def energy(self) -> float:
        return self.grid.integrate(self.values ** 2)


@dataclass(frozen=True)
class ModulusResult:
    value: float
    method: str
    iterations: int
    residual: float
    converged: bool
    density: Optional[GridDensity] = field(repr=False, default=None)


def annulus_modulus(ring: Ring, kind: str = CONNECTING) -> float:
    """Closed-form modulus of the connecting / separating family of a ring."""
    L = ring.log_ratio
    if kind == CONNECTING:
        return 2.0 * math.pi / L
    if kind in (SEPARATING, CIRCLES):
        return L / (2.0 * math.pi)
    raise ValueError(f"kind must be one of {_KINDS}, got {kind!r}")


def _connecting_constraints(grid: PolarGrid, n_curves: int):
    """Radial segments at uniformly spaced angles, deduplicated to grid
    columns.  Each constraint couples one angular column; arc length per
    radial cell is its dr."""
    cols = np.unique((np.arange(n_curves) * grid.n_angular) // n_curves)
    coef = grid.dr                                # shape (n_radial,)
    return cols, coef


def _separating_constraints(grid: PolarGrid, n_curves: int):
    """Concentric circles at log-spaced radii, deduplicated to grid rows.
    Each constraint couples one radial row; arc length per angular cell is
    r dtheta."""
    rows = np.unique((np.arange(n_curves) * grid.n_radial) // n_curves)
    return rows


def discrete_modulus(spec: CurveFamilySpec,
                     resolution: tuple = (256, 256),
                     curve_count: Optional[int] = None,
                     tol: float = 1e-6,
                     max_sweeps: int = 400,
                     shrink: float = 0.3) -> ModulusResult:
    """Approximate inf int rho^2 dA over densities admissible for the
    sampled family, by shrink steps plus cyclic projection.

    The density lives on a polar grid over the ring.  Every sampled curve
    contributes one linear constraint (unit line integral); the objective is
    the weighted quadratic energy.  Each sweep multiplies the density by
    (1 - shrink/k) -- the exact gradient step for the diagonal quadratic --
    and re-projects violated constraints in the energy inner product.
    Constraints of one family touch disjoint node sets, so a vectorized
    simultaneous projection is an exact cyclic sweep.  The iteration starts
    at the closed-form extremal density of the round annulus.
    """
    nr, nt = resolution
    grid = PolarGrid.build(spec.ring, nr, nt)
    L = spec.ring.log_ratio
    w = grid.weights

    if spec.kind == CONNECTING:
        n_curves = curve_count if curve_count is not None else max(720, nt)
        if n_curves < 1:
            raise ValueError("discrete_modulus: need at least one sampled curve")
        cols, coef = _connecting_constraints(grid, n_curves)
        rho = np.broadcast_to(1.0 / (grid.r_nodes * L), (nt, nr)).T.copy()
        denom = float(np.sum(coef ** 2 / (grid.r_nodes * grid.dr * grid.dtheta)))

        def line_integrals(r):
            return coef @ r[:, cols]

        def project(r, gap, viol):
            upd = (gap[viol] / denom)[None, :] * (coef / (grid.r_nodes * grid.dr * grid.dtheta))[:, None]
            r[:, cols[viol]] += upd
    else:
        n_curves = curve_count if curve_count is not None else nr
        if n_curves < 1:
            raise ValueError("discrete_modulus: need at least one sampled curve")
        rows = _separating_constraints(grid, n_curves)
        rho = np.broadcast_to(1.0 / (2.0 * math.pi * grid.r_nodes), (nt, nr)).T.copy()
        arc = grid.r_nodes[rows] * grid.dtheta      # per-cell arc length
        denoms = nt * arc ** 2 / (grid.r_nodes[rows] * grid.dr[rows] * grid.dtheta)

        def line_integrals(r):
            return r[rows, :].sum(axis=1) * arc

        def project(r, gap, viol):
            scale = gap[viol] / denoms[viol] * arc[viol] / \
                (grid.r_nodes[rows[viol]] * grid.dr[rows[viol]] * grid.dtheta)
            r[rows[viol], :] += scale[:, None]

    obj_prev = math.inf
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        rho *= (1.0 - shrink / sweeps)
        gap = 1.0 - line_integrals(rho)
        viol = gap > 0.0
        if np.any(viol):
            project(rho, gap, viol)
        np.clip(rho, 0.0, None, out=rho)
        obj = float(np.sum(w * rho * rho))
        resid = float(np.max(1.0 - line_integrals(rho)))
        if resid < tol and abs(obj - obj_prev) <= tol * max(obj, 1e-300):
            break
        obj_prev = obj

    resid = float(np.max(1.0 - line_integrals(rho)))
    converged = resid < tol
    return ModulusResult(float(np.sum(w * rho * rho)), "discrete", sweeps,
                         resid, converged, GridDensity(grid, rho))


def lower_rhs(Q: ScalarField, z0: complex, eps: float, eps0: float,
              domain: Optional[Domain] = None) -> float:
    """int_eps^eps0 dr / ||Q||_1(r), the lower modulus functional.

    ||Q||_1(r) is the arc-length integral of Q over D(z0, r); radii where it
    is infinite contribute nothing.
    """
    if not (0.0 < eps < eps0):
        raise ValueError(f"lower_rhs: need 0 < eps < eps0, got ({eps}, {eps0})")

    def integrand(r):
        l1 = circle_l1(Q, z0, r, domain)
        if not math.isfinite(l1) or l1 <= 0.0:
            return 0.0
        return 1.0 / l1

    val, _ = quad(integrand, eps, eps0, limit=200)
    return float(val)


@dataclass(frozen=True)
class RingIntegral:
    """Weighted ring integral int Q(z) eta^2(|z - z0|) dA with admissibility
    bookkeeping for the radial weight."""

    value: float
    eta_integral: float
    admissible: bool
    excluded_mass: float   # grid weight attached to non-finite integrand nodes


# Fraction of the grid weight allowed to sit on non-finite nodes before the
# singular set is treated as having positive measure.
EXCLUDED_MASS_CUTOFF = 1e-3


def ring_rhs(Q: ScalarField, ring: Ring, eta: Callable[[np.ndarray], np.ndarray],
             resolution: tuple = (512, 256)) -> RingIntegral:
    """Polar quadrature of Q(z) eta(|z-z0|)^2 over the ring.

    The admissibility integral int_{r1}^{r2} eta dr is computed and reported;
    a non-admissible weight still yields a value, only flagged.  Isolated
    non-finite nodes are excluded and their grid weight reported; if they
    carry more than EXCLUDED_MASS_CUTOFF of the total weight the integral is
    +inf.
    """
    grid = PolarGrid.build(ring, *resolution)
    eta_int, _ = quad(lambda r: float(np.asarray(eta(np.asarray([r])))[0]),
                      ring.r1, ring.r2, limit=200)
    nodes = grid.nodes()
    qv = np.asarray(Q(nodes.ravel()), dtype=float).reshape(nodes.shape)
    ev = np.asarray(eta(grid.r_nodes), dtype=float)[:, None]
    vals = qv * ev ** 2
    finite = np.isfinite(vals)
    excluded = float(grid.weights[~finite].sum())
    total_w = float(grid.weights.sum())
    if excluded > EXCLUDED_MASS_CUTOFF * total_w:
        value = math.inf
    else:
        value = float((vals[finite] * grid.weights[finite]).sum())
    return RingIntegral(value, float(eta_int), eta_int >= 1.0 - 1e-9, excluded)


@dataclass(frozen=True)
class ExtremalDensity:
    """The optimal lower-functional density rho0(z) = Q(z)/||Q||_1(|z-z0|)."""

    center: complex
    radii: np.ndarray
    circle_integrals: np.ndarray
    evaluate: Callable[[np.ndarray], np.ndarray] = field(repr=False, default=None)


def extremal_density_lower(Q: ScalarField, z0: complex,
                           domain: Optional[Domain] = None,
                           radii: Optional[np.ndarray] = None) -> ExtremalDensity:
    """Build rho0 = Q / ||Q||_1 and verify its unit circle integrals.

    Raises if ||Q||_1 vanishes at a sampled radius (the density is undefined
    on that circle).
    """
    if radii is None:
        radii = np.geomspace(1e-2, 0.99, 25)
    radii = np.asarray(radii, dtype=float)
    norms = np.array([circle_l1(Q, z0, r, domain) for r in radii])
    for r, nv in zip(radii, norms):
        if not (math.isfinite(nv) and nv > 0.0):
            raise ValueError(f"extremal_density_lower: ||Q||_1({r:g}) = {nv:g}")

    log_r, log_n = np.log(radii), np.log(norms)

    def evaluate(z):
        z = np.asarray(z, dtype=complex)
        rz = np.abs(z - z0)
        norm = np.exp(np.interp(np.log(np.clip(rz, radii[0], radii[-1])), log_r, log_n))
        return np.asarray(Q(z), dtype=float) / norm

    integrals = np.empty_like(radii)
    for i, r in enumerate(radii):
        dens = lambda z, nv=norms[i]: np.asarray(Q(z), dtype=float) / nv
        integrals[i] = circle_quadrature(z0, r, dens, domain).value
    return ExtremalDensity(complex(z0), radii, integrals, evaluate)


@dataclass(frozen=True)
class ExtremalWeight:
    """The optimal ring weight eta0(r) = 1 / (I r q(r)) with I = int dr/(r q)."""

    ring: Ring
    I: float
    eta: Callable[[np.ndarray], np.ndarray] = field(repr=False, default=None)
    q: Callable[[float], float] = field(repr=False, default=None)

    def admissibility(self) -> float:
        val, _ = quad(lambda r: float(np.asarray(self.eta(np.asarray([r])))[0]),
                      self.ring.r1, self.ring.r2, limit=200)
        return float(val)


def extremal_weight_ring(Q: ScalarField, ring: Ring,
                         domain: Optional[Domain] = None) -> ExtremalWeight:
    """Build eta0 for the ring functional; int eta0 dr = 1 by construction."""
    z0 = ring.center

    def q_at(r: float) -> float:
        return circle_mean(Q, z0, float(r), domain)

    def i_integrand(r):
        q = q_at(r)
        if not math.isfinite(q) or q <= 0.0:
            return 0.0
        return 1.0 / (r * q)

    I, _ = quad(i_integrand, ring.r1, ring.r2, limit=200)
    if not (math.isfinite(I) and I > 0.0):
        raise ValueError(f"extremal_weight_ring: I({ring.r1}, {ring.r2}) = {I:g}")

    def eta(r):
        r = np.asarray(r, dtype=float)
        qv = np.array([q_at(rv) for rv in np.atleast_1d(r)])
        out = 1.0 / (I * np.atleast_1d(r) * qv)
        return out.reshape(np.shape(r)) if np.ndim(r) else float(out[0])

    return ExtremalWeight(ring, float(I), eta, q_at)


def image_annulus_modulus(f: MappingModel, ring: Ring, kind: str = CONNECTING) -> float:
    """Modulus of the image of a ring family under a radial map.

    Radial maps send circles about 0 to circles, so the image of the ring is
    the ring between rho(r1) and rho(r2) and the closed form applies.  For
    non-radial maps use discrete_modulus on the image grid instead.
    """
    if not f.is_radial:
        raise ValueError(f"image_annulus_modulus: {f.label} is not radial; "
                         "use discrete_modulus on the image region")
    if abs(complex(ring.center)) != 0.0:
        raise ValueError("image_annulus_modulus: radial maps act about the origin; "
                         "ring must be centered at 0")
    r_img = np.asarray(f.radial_profile(np.array([ring.r1, ring.r2])), dtype=float)
    image_ring = Ring(0j, float(r_img[0]), float(r_img[1]))
    return annulus_modulus(image_ring, kind)
