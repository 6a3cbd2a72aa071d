"""Complete elliptic integrals, Jacobi sn, Weierstrass p, quasi-periods, quadrature.

All downstream geometry is driven by the data of the real elliptic curve

    Y^2 = 4 X^3 - g2 X - g3 = 4 (X - e1)(X - e2)(X - e3),   e3 < e2 < e1,

parametrized by a modulus k in (0,1) and a scale rho = e1 - e3 > 0.  The
half-period omega1 and quasi-half-period eta1 are the cycle integrals of
dX/Y and -X dX/Y over the cut [e3, e2]; both admit closed forms in K(k),
E(k) which the quadrature routines here cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError

_AGM_TOL = 1e-16
_AGM_CAP = 60

# Gauss-Legendre panel rule for the adaptive integrator.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind via the AGM iteration."""
    if not 0.0 <= k < 1.0:
        raise DomainError(f"elliptic_K requires 0 <= k < 1, got k={k!r}")
    a, b = 1.0, math.sqrt(1.0 - k * k)
    for _ in range(_AGM_CAP):
        if abs(a - b) < _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def elliptic_E(k: float) -> float:
    """Complete elliptic integral of the second kind via the extended AGM."""
    if not 0.0 <= k <= 1.0:
        raise DomainError(f"elliptic_E requires 0 <= k <= 1, got k={k!r}")
    if k == 1.0:
        return 1.0
    a, b, c = 1.0, math.sqrt(1.0 - k * k), k
    csum = 0.5 * c * c
    pow2 = 0.5
    for _ in range(_AGM_CAP):
        if abs(a - b) < _AGM_TOL * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        pow2 *= 2.0
        csum += pow2 * c * c
    K = math.pi / (2.0 * a)
    return K * (1.0 - csum)


def jacobi_sn(u: float, k: float) -> float:
    """Jacobi sn by descending Landen transformation; |sn| <= 1 for real u."""
    if not math.isfinite(u):
        raise DomainError(f"jacobi_sn requires finite u, got {u!r}")
    if not 0.0 <= k < 1.0:
        raise DomainError(f"jacobi_sn requires 0 <= k < 1, got k={k!r}")
    # descend k -> k1 = (1-k')/(1+k') until the modulus is negligible
    ks = []
    while k > 1e-10:
        kp = math.sqrt(1.0 - k * k)
        k1 = (1.0 - kp) / (1.0 + kp)
        ks.append(k1)
        u = u / (1.0 + k1)
        k = k1
    s = math.sin(u) - 0.25 * k * k * (u - math.sin(u) * math.cos(u)) * math.cos(u)
    for k1 in reversed(ks):
        s = (1.0 + k1) * s / (1.0 + k1 * s * s)
    if s > 1.0:
        s = 1.0
    elif s < -1.0:
        s = -1.0
    return s


def elliptic_K_vec(k: np.ndarray) -> np.ndarray:
    """Vectorized K(k) for arrays with 0 <= k < 1 (AGM on ndarrays)."""
    k = np.asarray(k, dtype=float)
    if np.any((k < 0.0) | (k >= 1.0)):
        raise DomainError("elliptic_K_vec requires 0 <= k < 1 elementwise")
    a = np.ones_like(k)
    b = np.sqrt(1.0 - k * k)
    for _ in range(_AGM_CAP):
        if np.all(np.abs(a - b) < _AGM_TOL * a):
            break
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return math.pi / (2.0 * a)


def elliptic_E_vec(k: np.ndarray) -> np.ndarray:
    """Vectorized E(k) for arrays with 0 <= k < 1."""
    k = np.asarray(k, dtype=float)
    if np.any((k < 0.0) | (k >= 1.0)):
        raise DomainError("elliptic_E_vec requires 0 <= k < 1 elementwise")
    a = np.ones_like(k)
    b = np.sqrt(1.0 - k * k)
    csum = 0.5 * k * k
    pow2 = 0.5
    for _ in range(_AGM_CAP):
        if np.all(np.abs(a - b) < _AGM_TOL * a):
            break
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        pow2 *= 2.0
        csum = csum + pow2 * c * c
    K = math.pi / (2.0 * a)
    return K * (1.0 - csum)


@dataclass(frozen=True)
class EllipticModulus:
    """Validated modulus pair (k, k') with k^2 + k'^2 = 1."""

    k: float
    kprime: float

    @classmethod
    def from_k(cls, k: float) -> "EllipticModulus":
        if not 0.0 <= k < 1.0:
            raise DomainError(f"modulus must satisfy 0 <= k < 1, got {k!r}")
        return cls(k, math.sqrt(1.0 - k * k))


@dataclass(frozen=True)
class EllipticData:
    """Curve data (k, rho, e_j, g_j, discriminant, half- and quasi-half-period)."""

    k: float
    rho: float
    e1: float
    e2: float
    e3: float
    g2: float
    g3: float
    delta: float
    omega1: float
    eta1: float

    @property
    def kprime(self) -> float:
        return math.sqrt(1.0 - self.k * self.k)


def elliptic_data(k: float, rho: float) -> EllipticData:
    """Build the curve data for modulus k in (0,1) and scale rho > 0."""
    if not 0.0 < k < 1.0:
        raise DomainError(f"elliptic_data requires 0 < k < 1, got k={k!r}")
    if rho <= 0.0:
        raise DomainError(f"elliptic_data requires rho > 0, got rho={rho!r}")
    k2 = k * k
    e1 = -(rho / 3.0) * (k2 - 2.0)
    e2 = (rho / 3.0) * (2.0 * k2 - 1.0)
    e3 = -(rho / 3.0) * (k2 + 1.0)
    g2 = (4.0 / 3.0) * rho * rho * (1.0 - k2 + k2 * k2)
    g3 = (4.0 / 27.0) * rho**3 * (k2 - 2.0) * (2.0 * k2 - 1.0) * (k2 + 1.0)
    # g2^3 - 27 g3^2 in the cancellation-free product form
    delta = 16.0 * rho**6 * k2 * k2 * (1.0 - k2) ** 2
    omega1 = elliptic_K(k) / math.sqrt(rho)
    eta1 = eta1_closed(k, rho)
    return EllipticData(k, rho, e1, e2, e3, g2, g3, delta, omega1, eta1)


def eta1_closed(k: float, rho: float) -> float:
    """Quasi-half-period from the closed form eta1 = sqrt(rho) E - e1 K / sqrt(rho)."""
    if not 0.0 < k < 1.0:
        raise DomainError(f"eta1_closed requires 0 < k < 1, got k={k!r}")
    if rho <= 0.0:
        raise DomainError(f"eta1_closed requires rho > 0, got rho={rho!r}")
    e1 = -(rho / 3.0) * (k * k - 2.0)
    sr = math.sqrt(rho)
    return sr * elliptic_E(k) - e1 * elliptic_K(k) / sr


def quad_adaptive(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                  tol: float, max_depth: int = 40):
    """Adaptive Gauss-Legendre quadrature of a vectorized integrand on (a, b).

    f must accept an ndarray of nodes and return values of the same shape
    (real or complex).  Panels are bisected until the whole-vs-halves
    difference falls under the local tolerance; the tolerance floors at the
    panel sums' machine precision (no refinement can beat roundoff), and
    depth past max_depth raises.
    """
    eps = np.finfo(float).eps

    def panel(lo, hi):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        vals = f(mid + half * _GL_NODES)
        return half * np.sum(vals * _GL_WEIGHTS)

    whole0 = panel(float(a), float(b))
    # roundoff of node placement and summation bounds what refinement can
    # resolve; below this, accept rather than recurse into noise
    floor = 32.0 * eps * (abs(whole0) + abs(tol))

    def recurse(lo, hi, whole, tol_loc, depth):
        mid = 0.5 * (lo + hi)
        left = panel(lo, mid)
        right = panel(mid, hi)
        if abs(left + right - whole) <= max(tol_loc, floor):
            return left + right
        if depth >= max_depth:
            raise ConvergenceError(
                f"quad_adaptive: panel depth {max_depth} exceeded on "
                f"[{lo!r}, {hi!r}]")
        half_tol = 0.5 * tol_loc
        return (recurse(lo, mid, left, half_tol, depth + 1)
                + recurse(mid, hi, right, half_tol, depth + 1))

    return recurse(float(a), float(b), whole0, tol, 0)


def _period_integrand(data: EllipticData, numer: Callable[[np.ndarray], np.ndarray]):
    """Integrand of int numer(X) dX / Y over [e3, e2] after X = e3 + (e2-e3) sin^2 t.

    The substitution removes both endpoint singularities; what remains is
    numer(X(t)) / (sqrt(rho) sqrt(1 - k^2 sin^2 t)) on t in [0, pi/2].
    """
    k2 = (data.e2 - data.e3) / data.rho
    span = data.e2 - data.e3
    sr = math.sqrt(data.rho)

    def g(t):
        s2 = np.sin(t) ** 2
        X = data.e3 + span * s2
        return numer(X) / (sr * np.sqrt(1.0 - k2 * s2))

    return g


def omega1_quadrature(data: EllipticData, tol: float = 1e-12) -> float:
    """Half-period int_{e3}^{e2} dX/Y by quadrature (equals K(k)/sqrt(rho))."""
    g = _period_integrand(data, lambda X: np.ones_like(X))
    return float(np.real(quad_adaptive(g, 0.0, math.pi / 2.0, tol)))


def eta1_quadrature(data: EllipticData, tol: float = 1e-11) -> float:
    """Quasi-half-period -int_{e3}^{e2} X dX/Y by quadrature."""
    g = _period_integrand(data, lambda X: X)
    return -float(np.real(quad_adaptive(g, 0.0, math.pi / 2.0, tol)))


def omega3_quadrature(data: EllipticData, tol: float = 1e-12) -> complex:
    """Imaginary half-period i K(k')/sqrt(rho) via the [e2, e1] cycle."""
    kp2 = 1.0 - data.k * data.k
    sr = math.sqrt(data.rho)

    def g(t):
        s2 = np.sin(t) ** 2
        return 1.0 / (sr * np.sqrt(1.0 - kp2 * s2))

    return 1j * quad_adaptive(g, 0.0, math.pi / 2.0, tol)


def eta3_quadrature(data: EllipticData, tol: float = 1e-11) -> complex:
    """Imaginary quasi-half-period -int over the [e2, e1] cycle of X dX/Y.

    The branch of Y on [e2, e1] is fixed so that the companion period comes
    out as +i K(k')/sqrt(rho); with that choice
    eta3 = -(i/sqrt(rho)) (e3 K(k') + rho E(k')), which the Legendre relation
    eta1 omega3 - eta3 omega1 = pi i / 2 pins down.
    """
    kp2 = 1.0 - data.k * data.k
    span = data.e1 - data.e2
    sr = math.sqrt(data.rho)

    def g(t):
        s2 = np.sin(t) ** 2
        X = data.e1 - span * s2
        return X / (sr * np.sqrt(1.0 - kp2 * s2))

    return -1j * quad_adaptive(g, 0.0, math.pi / 2.0, tol)


def weierstrass_p(u: float, data: EllipticData) -> float:
    """Weierstrass p on the real segment, via p(u) = e3 + rho / sn^2(u sqrt(rho), k).

    Only real u off the lattice are accepted; the real period is 2 omega1.
    """
    if isinstance(u, complex):
        raise DomainError("weierstrass_p evaluates on the real branch only")
    if not math.isfinite(u):
        raise DomainError(f"weierstrass_p requires finite u, got {u!r}")
    period = 2.0 * data.omega1
    ured = math.fmod(u, period)
    if ured < 0.0:
        ured += period
    if min(ured, period - ured) < 1e-12:
        raise PoleError(f"weierstrass_p: u={u!r} is within 1e-12 of a lattice point")
    s = jacobi_sn(ured * math.sqrt(data.rho), data.k)
    return data.e3 + data.rho / (s * s)


def weierstrass_p_half_periods(data: EllipticData) -> tuple[float, float, float]:
    """Numerical p-values at the three half-periods, real-branch machinery only.

    p(omega1) is evaluated directly.  p(omega2) uses the half-period
    translation p(u + omega3) = e3 + (e1-e3)(e2-e3)/(p(u) - e3) at u = omega1,
    and p(omega3) uses the same translation in the u -> 0 limit (u = 1e-6
    omega1, where the correction is O(u^2) ~ 1e-12 relative).
    """
    p1 = weierstrass_p(data.omega1, data)
    shift = (data.e1 - data.e3) * (data.e2 - data.e3)
    p2 = data.e3 + shift / (p1 - data.e3)
    u_small = 1e-6 * data.omega1
    p3 = data.e3 + shift / (weierstrass_p(u_small, data) - data.e3)
    return p1, p2, p3
