"""Taub-NUT geometry: charts, holomorphic Kahler metric, spherical closed form.

Holomorphic coordinates (u, z) with the auxiliary real coordinate x solving
the transform condition; the potential V = 1/h + 2m/r with r^2 = x^2 + 4|z|^2
drives every metric component.  The chart to spherical coordinates
(r, theta, phi, psi) is

    z = (r sin(theta)/2) e^{i phi},
    u = -2 i m psi - 2 r cos(theta)/h - 2 m log((1+cos theta)/sin theta),

valid away from the axis sin(theta) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ChartError, ConvergenceError, DomainError


@dataclass(frozen=True)
class TNParams:
    """Scale h > 0 and NUT charge m >= 0 (m = 0 is the flat limit)."""

    h: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if self.h <= 0:
            raise DomainError(f"TNParams requires h > 0, got {self.h!r}")
        if self.m < 0:
            raise DomainError(f"TNParams requires m >= 0, got {self.m!r}")


@dataclass(frozen=True)
class TNHoloPoint:
    u: complex
    z: complex
    x: float
    r: float


@dataclass(frozen=True)
class TNSphericalPoint:
    r: float
    theta: float
    phi: float
    psi: float

    def __post_init__(self):
        if self.r <= 0:
            raise DomainError(f"r must be positive, got {self.r!r}")
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta must lie in [0, pi], got {self.theta!r}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise DomainError(f"phi must lie in [0, 2 pi), got {self.phi!r}")
        if not 0.0 <= self.psi < 4.0 * math.pi:
            raise DomainError(f"psi must lie in [0, 4 pi), got {self.psi!r}")


@dataclass(frozen=True)
class MetricBlock:
    """2x2 Hermitian block of mixed second derivatives of the Kahler potential."""

    kuubar: complex
    kuzbar: complex
    kzubar: complex
    kzzbar: complex

    def det(self) -> complex:
        return self.kuubar * self.kzzbar - self.kuzbar * self.kzubar

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.kuubar, self.kuzbar],
                         [self.kzubar, self.kzzbar]])


def potential(r: float, p: TNParams) -> float:
    return 1.0 / p.h + 2.0 * p.m / r


def re_u_from_xz(x: float, absz: float, p: TNParams) -> float:
    """Forward map Re(u) = -x/h - 2m log((r+x)/(2|z|)), i.e. u + ubar = F_x.

    This is the transform-consistent chart: d(2 Re u)/dx = -2V and
    d(2 Re u)/dz = 2mx/(rz), matching the closed-form metric block.
    """
    r = math.sqrt(x * x + 4.0 * absz * absz)
    return -x / p.h - 2.0 * p.m * math.log((r + x) / (2.0 * absz))


def tn_solve_x(re_u: float, absz: float, p: TNParams) -> float:
    """Invert Re(u) = -x/h - 2m log((r+x)/(2|z|)) for x (strictly decreasing).

    Bracketed Newton with bisection fallback; the derivative is exactly
    -V(r) < 0 so the root is unique.
    """
    if absz <= 0:
        raise DomainError(f"tn_solve_x requires |z| > 0, got {absz!r}")

    def f(x):
        return re_u_from_xz(x, absz, p) - re_u

    bound = 10.0 * (abs(re_u) * p.h / 2.0 + 2.0 * absz + 1.0)
    lo, hi = -bound, bound
    for _ in range(200):
        if f(lo) > 0.0 >= f(hi):
            break
        lo *= 2.0
        hi *= 2.0
    else:
        raise ConvergenceError("tn_solve_x: bracket search failed")

    x = 0.0 if lo < 0.0 < hi else 0.5 * (lo + hi)
    for _ in range(200):
        fx = f(x)
        if fx > 0.0:
            lo = x
        else:
            hi = x
        r = math.sqrt(x * x + 4.0 * absz * absz)
        step = fx / (1.0 / p.h + 2.0 * p.m / r)
        x_new = x + step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(f(x_new)) < 1e-13 * max(1.0, abs(re_u)):
            return x_new
        x = x_new
    raise ConvergenceError("tn_solve_x: Newton/bisection did not converge")


def tn_point_from_uz(u: complex, z: complex, p: TNParams) -> TNHoloPoint:
    """Holomorphic-chart point from (u, z); solves the x-condition."""
    if z == 0:
        raise ChartError("holomorphic chart excludes z = 0")
    x = tn_solve_x(u.real, abs(z), p)
    r = math.sqrt(x * x + 4.0 * abs(z) ** 2)
    return TNHoloPoint(complex(u), complex(z), x, r)


def tn_point_from_xz(x: float, z: complex, p: TNParams, im_u: float = 0.0) -> TNHoloPoint:
    """Holomorphic-chart point with x given and Re(u) filled in by the forward map."""
    if z == 0:
        raise ChartError("holomorphic chart excludes z = 0")
    u = complex(re_u_from_xz(x, abs(z), p), im_u)
    r = math.sqrt(x * x + 4.0 * abs(z) ** 2)
    return TNHoloPoint(u, complex(z), x, r)


def tn_chart_spherical_to_holo(pt: TNSphericalPoint, p: TNParams) -> TNHoloPoint:
    st, ct = math.sin(pt.theta), math.cos(pt.theta)
    if st == 0.0:
        raise ChartError("holomorphic chart excludes theta in {0, pi}")
    z = 0.5 * pt.r * st * complex(math.cos(pt.phi), math.sin(pt.phi))
    # (r+x)/(2|z|) = (1+cos theta)/sin theta
    re_u = -pt.r * ct / p.h - 2.0 * p.m * math.log((1.0 + ct) / st)
    u = complex(re_u, -2.0 * p.m * pt.psi)
    return TNHoloPoint(u, z, pt.r * ct, pt.r)


def tn_chart_holo_to_spherical(pt: TNHoloPoint, p: TNParams) -> TNSphericalPoint:
    if pt.z == 0:
        raise ChartError("axis points have no holomorphic representative")
    theta = math.acos(max(-1.0, min(1.0, pt.x / pt.r)))
    phi = math.atan2(pt.z.imag, pt.z.real) % (2.0 * math.pi)
    if p.m == 0:
        psi = 0.0
    else:
        psi = (-pt.u.imag / (2.0 * p.m)) % (4.0 * math.pi)
    return TNSphericalPoint(pt.r, theta, phi, psi)


def tn_metric_holo(pt: TNHoloPoint, p: TNParams) -> MetricBlock:
    """Kahler metric block in (u, z): K_uu = V^{-1}/2, K_zz = 2V + 2m^2x^2 V^{-1}/(r^2|z|^2)."""
    if pt.z == 0:
        raise ChartError("tn_metric_holo: chart excludes z = 0")
    V = potential(pt.r, p)
    Vinv = 1.0 / V
    az2 = abs(pt.z) ** 2
    kzz = 2.0 * V + 2.0 * p.m**2 * pt.x**2 * Vinv / (pt.r**2 * az2)
    kzu = -(p.m * pt.x / (pt.r * pt.z)) * Vinv
    kuz = -(p.m * pt.x / (pt.r * np.conjugate(pt.z))) * Vinv
    kuu = 0.5 * Vinv
    return MetricBlock(complex(kuu), complex(kuz), complex(kzu), complex(kzz))


def tn_calabi_yau_residual(pt: TNHoloPoint, p: TNParams) -> float:
    """|det(metric block) - 1|, the coefficient form of the volume-form identity."""
    return abs(tn_metric_holo(pt, p).det() - 1.0)


def tn_metric_spherical(pt: TNSphericalPoint, p: TNParams) -> np.ndarray:
    """The closed-form line element in (r, theta, phi, psi); requires h = 1.

    (1 + 2m/r)(dr^2 + r^2 dtheta^2 + r^2 sin^2(theta) dphi^2)
      + 4m^2 (1 + 2m/r)^{-1} (dpsi + cos(theta) dphi)^2
    """
    if p.h != 1.0:
        raise DomainError("the spherical closed form is stated for h = 1")
    V = 1.0 + 2.0 * p.m / pt.r
    st, ct = math.sin(pt.theta), math.cos(pt.theta)
    g = np.zeros((4, 4))
    g[0, 0] = V
    g[1, 1] = V * pt.r**2
    g[2, 2] = V * pt.r**2 * st**2 + 4.0 * p.m**2 / V * ct**2
    g[3, 3] = 4.0 * p.m**2 / V
    g[2, 3] = g[3, 2] = 4.0 * p.m**2 / V * ct
    return g


def _chart_jacobian(pt: TNSphericalPoint, p: TNParams) -> tuple[np.ndarray, np.ndarray]:
    """du/dq and dz/dq for q = (r, theta, phi, psi), analytic."""
    st, ct = math.sin(pt.theta), math.cos(pt.theta)
    eip = complex(math.cos(pt.phi), math.sin(pt.phi))
    z_q = np.array([0.5 * st * eip,
                    0.5 * pt.r * ct * eip,
                    0.5j * pt.r * st * eip,
                    0.0])
    # d/dtheta of log((1+cos)/sin) = -1/sin
    u_q = np.array([complex(-ct / p.h),
                    complex(pt.r * st / p.h + 2.0 * p.m / st),
                    0.0,
                    complex(0.0, -2.0 * p.m)])
    return u_q, z_q


def tn_metric_spherical_from_holo(pt: TNSphericalPoint, p: TNParams) -> np.ndarray:
    """Holomorphic metric pulled back to (r, theta, phi, psi), times 2.

    The factor 2 matches the stated spherical closed form ("equal, up to an
    overall factor 1/2" between the holomorphic line element and the
    Gibbons-Hawking form).
    """
    hol = tn_chart_spherical_to_holo(pt, p)
    blk = tn_metric_holo(hol, p)
    u_q, z_q = _chart_jacobian(pt, p)
    g = np.zeros((4, 4))
    for a in range(4):
        for b in range(4):
            val = (blk.kuubar * u_q[a] * np.conjugate(u_q[b])
                   + blk.kuzbar * u_q[a] * np.conjugate(z_q[b])
                   + blk.kzubar * z_q[a] * np.conjugate(u_q[b])
                   + blk.kzzbar * z_q[a] * np.conjugate(z_q[b]))
            g[a, b] = val.real
    return 2.0 * g
