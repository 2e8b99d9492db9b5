"""Evaluable mapping models, Wirtinger derivatives, and the distortion coefficient.

The distortion of a plane homeomorphism at a point of differentiability is

    K = (|f_z| + |f_zbar|) / ||f_z| - |f_zbar||,

with K = 1 when both derivatives vanish and K = +inf when the Jacobian
degenerates but the derivative does not.  Built-in test families are radial:
f(r e^{i theta}) = rho(r) e^{i theta}, where the dilatation quotient
max(rho', rho/r) / min(rho', rho/r) gives K in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import Domain, disk_domain


@dataclass(frozen=True)
class DerivativePair:
    """Wirtinger derivatives (f_z, f_zbar) at one point."""

    f_z: complex
    f_zbar: complex


@dataclass(frozen=True)
class MappingModel:
    """Evaluable planar homeomorphism.

    evaluator
        Vectorized map on complex arrays.
    derivative
        Optional vectorized provider returning (f_z, f_zbar) arrays.
    domain
        Membership predicate for the source domain.
    radial_profile / radial_profile_deriv
        Present for maps of the form rho(|z|) e^{i arg z}; several modulus
        computations are exact only for such maps.
    """

    label: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    domain: Domain
    derivative: Optional[Callable[[np.ndarray], tuple]] = None
    radial_profile: Optional[Callable[[np.ndarray], np.ndarray]] = None
    radial_profile_deriv: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, z):
        return self.evaluator(np.asarray(z, dtype=complex))

    @property
    def is_radial(self) -> bool:
        return self.radial_profile is not None


def wirtinger(f: MappingModel, z: complex, step: float = 1e-5) -> DerivativePair:
    """Central-difference Wirtinger derivatives with one Richardson level.

    Uses f_z = (f_x - i f_y)/2 and f_zbar = (f_x + i f_y)/2.  Near the
    boundary the step shrinks to half the distance to the boundary.  Raises
    if a stencil point leaves the domain.
    """
    z = complex(z)
    h = float(step)
    if f.domain.boundary_dist is not None:
        d = f.domain.boundary_dist(z)
        if d <= 0:
            raise ValueError(f"wirtinger: point {z} is not interior to {f.domain.description}")
        h = min(h, 0.5 * d)

    def central(hh: float) -> tuple:
        stencil = np.array([z + hh, z - hh, z + 1j * hh, z - 1j * hh])
        inside = np.asarray(f.domain.contains(stencil), dtype=bool)
        if not inside.all():
            bad = stencil[~inside][0]
            raise ValueError(f"wirtinger: stencil point {bad} outside {f.domain.description}")
        fp = f(stencil)
        fx = (fp[0] - fp[1]) / (2.0 * hh)
        fy = (fp[2] - fp[3]) / (2.0 * hh)
        return (fx - 1j * fy) / 2.0, (fx + 1j * fy) / 2.0

    c1, c1b = central(h)
    c2, c2b = central(h / 2.0)
    return DerivativePair((4.0 * c2 - c1) / 3.0, (4.0 * c2b - c1b) / 3.0)


def jacobian(d: DerivativePair) -> float:
    """J = |f_z|^2 - |f_zbar|^2."""
    return abs(d.f_z) ** 2 - abs(d.f_zbar) ** 2


def operator_norm(d: DerivativePair) -> float:
    """||f'|| = |f_z| + |f_zbar|."""
    return abs(d.f_z) + abs(d.f_zbar)


def distortion(d: DerivativePair) -> float:
    """Distortion coefficient; 1 for a vanishing derivative, inf for J = 0."""
    a = abs(d.f_z)
    b = abs(d.f_zbar)
    if a == 0.0 and b == 0.0:
        return 1.0
    den = abs(a - b)
    if den == 0.0:
        return math.inf
    return (a + b) / den


def dilatation_quotient(rho_val: float, rho_deriv: float, r: float) -> float:
    """max(rho', rho/r) / min(rho', rho/r) for a radial map at radius r."""
    s = rho_val / r
    lo, hi = min(rho_deriv, s), max(rho_deriv, s)
    if lo <= 0.0:
        return math.inf
    return hi / lo


def distortion_field(f: MappingModel, fd_step: float = 1e-5) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized z -> K_f(z), from the analytic provider when present."""
    if f.derivative is not None:
        def field(z: np.ndarray) -> np.ndarray:
            fz, fzb = f.derivative(np.asarray(z, dtype=complex))
            a, b = np.abs(fz), np.abs(fzb)
            den = np.abs(a - b)
            with np.errstate(divide="ignore", invalid="ignore"):
                k = (a + b) / den
            k = np.where((a == 0) & (b == 0), 1.0, k)
            return np.where((den == 0) & ((a > 0) | (b > 0)), np.inf, k)
        return field

    def field(z: np.ndarray) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.array([distortion(wirtinger(f, zi, fd_step)) for zi in z.ravel()]).reshape(z.shape)

    return field


def _power_stretch(beta: float, label: str) -> MappingModel:
    """z |z|^{beta-1} on the unit disk; constant distortion max(beta, 1/beta)."""
    beta = float(beta)

    def ev(z):
        z = np.asarray(z, dtype=complex)
        rz = np.abs(z)
        out = np.zeros_like(z)
        nz = rz > 0
        out[nz] = z[nz] * rz[nz] ** (beta - 1.0)
        return out

    def deriv(z):
        z = np.asarray(z, dtype=complex)
        rz = np.abs(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            f_z = 0.5 * (beta + 1.0) * rz ** (beta - 1.0)
            f_zb = 0.5 * (beta - 1.0) * z * z * rz ** (beta - 3.0)
        return f_z.astype(complex), f_zb.astype(complex)

    return MappingModel(
        label=label,
        evaluator=ev,
        domain=disk_domain(),
        derivative=deriv,
        radial_profile=lambda r: np.asarray(r, dtype=float) ** beta,
        radial_profile_deriv=lambda r: beta * np.asarray(r, dtype=float) ** (beta - 1.0),
    )


def identity_map() -> MappingModel:
    return _power_stretch(1.0, "identity")


def radial_stretch(alpha: float) -> MappingModel:
    """f(z) = z |z|^{alpha-1}, alpha >= 1; distortion alpha away from 0."""
    if alpha < 1.0:
        raise ValueError("radial_stretch requires alpha >= 1; use shrinking_stretch_family "
                         "for exponents below 1")
    if alpha == 1.0:
        return identity_map()
    return _power_stretch(alpha, f"radial_stretch({alpha:g})")


def shrinking_stretch_family(m_values: Sequence[int]) -> list:
    """g_m(z) = z |z|^{1/m - 1}; distortion m away from 0. m = 1 is the identity."""
    out = []
    for m in m_values:
        m = int(m)
        if m < 1:
            raise ValueError("shrinking_stretch_family requires m >= 1")
        out.append(identity_map() if m == 1
                   else _power_stretch(1.0 / m, f"shrinking_stretch({m})"))
    return out


def radial_map(rho: Callable[[np.ndarray], np.ndarray],
               rho_prime: Optional[Callable[[np.ndarray], np.ndarray]] = None,
               domain: Optional[Domain] = None,
               label: str = "radial_map",
               check_radii: Optional[np.ndarray] = None) -> MappingModel:
    """Radial map f(r e^{i t}) = rho(r) e^{i t} with rho increasing, rho(0+) = 0.

    ``rho_prime`` defaults to a numeric central difference.  Monotonicity of
    rho is checked on a sample grid at construction.
    """
    dom = domain if domain is not None else disk_domain()

    if rho_prime is None:
        def rho_prime(r, _rho=rho):
            r = np.asarray(r, dtype=float)
            h = np.maximum(1e-7, 1e-7 * r)
            return (_rho(r + h) - _rho(r - h)) / (2.0 * h)

    if check_radii is None:
        hi = dom.boundary_dist(0j) if dom.boundary_dist is not None else 1.0
        check_radii = np.geomspace(1e-6, 0.999 * hi, 128)
    vals = np.asarray(rho(np.asarray(check_radii, dtype=float)), dtype=float)
    if np.any(np.diff(vals) <= 0):
        bad = float(np.asarray(check_radii)[np.argmax(np.diff(vals) <= 0)])
        raise ValueError(f"radial_map: profile is not strictly increasing near r={bad:g}")

    def ev(z):
        z = np.asarray(z, dtype=complex)
        rz = np.abs(z)
        out = np.zeros_like(z)
        nz = rz > 0
        out[nz] = rho(rz[nz]) * z[nz] / rz[nz]
        return out

    def deriv(z):
        # f_z = (rho' + rho/r)/2, f_zbar = (z/zbar)(rho' - rho/r)/2
        z = np.asarray(z, dtype=complex)
        rz = np.abs(z)
        rv = rho(rz)
        dv = rho_prime(rz)
        s = rv / rz
        f_z = (0.5 * (dv + s)).astype(complex)
        f_zb = (z / np.conj(z)) * (0.5 * (dv - s))
        return f_z, f_zb

    return MappingModel(
        label=label,
        evaluator=ev,
        domain=dom,
        derivative=deriv,
        radial_profile=lambda r: np.asarray(rho(np.asarray(r, dtype=float)), dtype=float),
        radial_profile_deriv=lambda r: np.asarray(rho_prime(np.asarray(r, dtype=float)), dtype=float),
    )


LOG_MAP_KNEE = math.exp(-2.0)


def log_distortion_map() -> MappingModel:
    """Radial map on the unit disk with K(z) = log(1/|z|) inside |z| < e^{-2}.

    rho(r) = 2 e^{-2} / log(1/r) for r < e^{-2} and rho(r) = r outside; the
    two pieces agree at the knee.  Realizes a logarithmic distortion
    singularity at the origin while staying the identity near the rim.
    """
    knee = LOG_MAP_KNEE
    c = 2.0 * knee

    def rho(r):
        r = np.asarray(r, dtype=float)
        inner = c / np.log(1.0 / np.minimum(r, knee))
        return np.where(r < knee, inner, r)

    def rho_prime(r):
        r = np.asarray(r, dtype=float)
        rr = np.minimum(r, knee)
        inner = c / (rr * np.log(1.0 / rr) ** 2)
        return np.where(r < knee, inner, 1.0)

    return radial_map(rho, rho_prime, disk_domain(), "log_distortion_map")
