"""Extended-plane geometry: chordal metric, inversion, rings, and quadrature grids.

Points of the extended plane are ordinary ``complex`` values plus the
distinguished point at infinity, represented by the module-level singleton
``INF`` (never by a large float, so the chordal branch selection is exact).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

import numpy as np


class _Infinity:
    """Unique point-at-infinity marker."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"


INF = _Infinity()

ExtendedPoint = Union[complex, _Infinity]


def spherical_distance(a: ExtendedPoint, b: ExtendedPoint) -> float:
    """Chordal distance h(a, b) on the extended plane, always in [0, 1].

    h(z, oo) = 1/sqrt(1+|z|^2) and
    h(z, w)  = |z-w| / (sqrt(1+|z|^2) sqrt(1+|w|^2)) for finite z, w.
    """
    a_inf = isinstance(a, _Infinity)
    b_inf = isinstance(b, _Infinity)
    if a_inf and b_inf:
        return 0.0
    if a_inf or b_inf:
        z = complex(b if a_inf else a)
        return 1.0 / math.sqrt(1.0 + abs(z) ** 2)
    a = complex(a)
    b = complex(b)
    return abs(a - b) / (math.sqrt(1.0 + abs(a) ** 2) * math.sqrt(1.0 + abs(b) ** 2))


def chordal(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorized chordal distance for finite complex arrays."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return np.abs(u - v) / (np.sqrt(1.0 + np.abs(u) ** 2) * np.sqrt(1.0 + np.abs(v) ** 2))


def spherical_diameter(points: Iterable[ExtendedPoint]) -> float:
    """Supremum of pairwise chordal distances over a finite point set."""
    pts = list(points)
    if not pts:
        raise ValueError("spherical_diameter: empty point set")
    finite = np.array([complex(p) for p in pts if not isinstance(p, _Infinity)])
    has_inf = len(finite) < len(pts)
    best = 0.0
    if finite.size:
        s = np.sqrt(1.0 + np.abs(finite) ** 2)
        d = np.abs(finite[:, None] - finite[None, :]) / (s[:, None] * s[None, :])
        best = float(d.max())
        if has_inf:
            best = max(best, float((1.0 / s).max()))
    return best


def invert(z: ExtendedPoint) -> ExtendedPoint:
    """Inversion in the unit circle, z -> z/|z|^2; swaps 0 and INF."""
    if isinstance(z, _Infinity):
        return 0j
    z = complex(z)
    if z == 0:
        return INF
    return z / abs(z) ** 2


@dataclass(frozen=True)
class Domain:
    """Plane domain given by a vectorized membership predicate.

    ``boundary_dist``, when present, returns the distance from an interior
    point to the boundary (used to shrink finite-difference stencils).
    """

    contains: Callable[[np.ndarray], np.ndarray]
    description: str = "domain"
    boundary_dist: Optional[Callable[[complex], float]] = None

    def __contains__(self, z: complex) -> bool:
        return bool(np.asarray(self.contains(np.asarray([z], dtype=complex)))[0])


def whole_plane() -> Domain:
    return Domain(lambda z: np.ones(np.shape(z), dtype=bool), "C")


def disk_domain(center: complex = 0j, radius: float = 1.0) -> Domain:
    c, r = complex(center), float(radius)
    return Domain(
        lambda z: np.abs(np.asarray(z, dtype=complex) - c) < r,
        f"disk(center={c}, radius={r})",
        boundary_dist=lambda z: r - abs(complex(z) - c),
    )


def annulus_domain(center: complex, r1: float, r2: float) -> Domain:
    c = complex(center)

    def inside(z):
        t = np.abs(np.asarray(z, dtype=complex) - c)
        return (t > r1) & (t < r2)

    return Domain(
        inside,
        f"annulus(center={c}, {r1}, {r2})",
        boundary_dist=lambda z: min(abs(complex(z) - c) - r1, r2 - abs(complex(z) - c)),
    )


def halfplane_domain() -> Domain:
    """Right half-plane Re z > 0 (handy for partial-circle tests)."""
    return Domain(lambda z: np.real(np.asarray(z, dtype=complex)) > 0, "halfplane Re>0")


@dataclass(frozen=True)
class Ring:
    """Circular ring {z : r1 < |z - center| < r2} with 0 < r1 < r2."""

    center: complex
    r1: float
    r2: float

    def __post_init__(self):
        if not (0.0 < self.r1 < self.r2):
            raise ValueError(f"Ring requires 0 < r1 < r2, got ({self.r1}, {self.r2})")

    @property
    def log_ratio(self) -> float:
        return math.log(self.r2 / self.r1)

    def area(self) -> float:
        return math.pi * (self.r2 ** 2 - self.r1 ** 2)

    def domain(self) -> Domain:
        return annulus_domain(self.center, self.r1, self.r2)


@dataclass(frozen=True)
class PolarGrid:
    """Midpoint polar quadrature grid over a ring.

    Cell weights carry the area element r dr dtheta; the arithmetic radial
    midpoint makes the total weight equal to the ring area exactly, for both
    linear and log radial spacing.
    """

    ring: Ring
    n_radial: int
    n_angular: int
    radial_spacing: str = "log"
    r_edges: np.ndarray = field(repr=False, default=None)
    r_nodes: np.ndarray = field(repr=False, default=None)
    dr: np.ndarray = field(repr=False, default=None)
    theta_nodes: np.ndarray = field(repr=False, default=None)
    dtheta: float = 0.0
    weights: np.ndarray = field(repr=False, default=None)

    @classmethod
    def build(cls, ring: Ring, n_radial: int = 256, n_angular: int = 256,
              radial_spacing: str = "log") -> "PolarGrid":
        if n_radial < 1 or n_angular < 1:
            raise ValueError("PolarGrid needs positive node counts")
        if radial_spacing == "log":
            edges = np.geomspace(ring.r1, ring.r2, n_radial + 1)
        elif radial_spacing == "linear":
            edges = np.linspace(ring.r1, ring.r2, n_radial + 1)
        else:
            raise ValueError(f"unknown radial spacing {radial_spacing!r}")
        r_nodes = 0.5 * (edges[:-1] + edges[1:])
        dr = np.diff(edges)
        dtheta = 2.0 * math.pi / n_angular
        theta = (np.arange(n_angular) + 0.5) * dtheta
        weights = (r_nodes * dr)[:, None] * np.full(n_angular, dtheta)[None, :]
        return cls(ring, n_radial, n_angular, radial_spacing,
                   edges, r_nodes, dr, theta, dtheta, weights)

    def nodes(self) -> np.ndarray:
        """Complex node positions, shape (n_radial, n_angular)."""
        return self.ring.center + self.r_nodes[:, None] * np.exp(1j * self.theta_nodes)[None, :]

    def total_area(self) -> float:
        return float(self.weights.sum())

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum of node values; infinite nodes propagate."""
        return float(np.sum(values * self.weights))


@dataclass(frozen=True)
class CircleIntegral:
    """Arc-length integral of a field over one circle clipped to a domain."""

    value: float
    arc_length: float
    inside_fraction: float
    empty: bool


def circle_quadrature(z0: complex, r: float,
                      integrand: Callable[[np.ndarray], np.ndarray],
                      domain: Optional[Domain] = None,
                      n: int = 1024) -> CircleIntegral:
    """Integrate along D(z0, r) = domain \\cap S(z0, r) with arc length ds.

    Periodic composite trapezoid (equal weights 2*pi*r/n); quadrature nodes
    outside the domain are skipped.  If every node is outside, the result is
    0 with ``empty=True``.
    """
    if r <= 0:
        raise ValueError("circle_quadrature: radius must be positive")
    theta = 2.0 * math.pi * np.arange(n) / n
    pts = complex(z0) + r * np.exp(1j * theta)
    if domain is None:
        mask = np.ones(n, dtype=bool)
    else:
        mask = np.asarray(domain.contains(pts), dtype=bool)
    m = int(mask.sum())
    if m == 0:
        return CircleIntegral(0.0, 0.0, 0.0, True)
    w = 2.0 * math.pi * r / n
    vals = np.asarray(integrand(pts[mask]), dtype=float)
    return CircleIntegral(float(np.sum(vals) * w), w * m, m / n, False)
