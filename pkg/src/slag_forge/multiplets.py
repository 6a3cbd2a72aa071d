"""O(2) and O(4) twistor multiplets and the contour-integral oracles.

An O(2j) multiplet is a Laurent polynomial eta(zeta) on the twistor sphere
obeying the reality condition eta(-1/conj(zeta)) = conj(eta(zeta)).  The
contour oracles here evaluate the defining integrals of the construction
numerically (trapezoid loops in the zeta-plane, branch-cut quadratures in
the Weierstrass X-plane) so the closed-form metric data can be checked
against them without sharing any code path.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .elliptic import EllipticData, quad_adaptive
from .errors import ContourCollisionError, DegenerateError, DomainError, PoleError


@dataclass(frozen=True)
class O2Multiplet:
    """eta(zeta) = conj(z)/zeta + x - z zeta."""

    z: complex
    x: float

    @property
    def r(self) -> float:
        return math.sqrt(self.x * self.x + 4.0 * abs(self.z) ** 2)


def o2_eval(m: O2Multiplet, zeta: complex) -> complex:
    if zeta == 0:
        raise PoleError("o2_eval: zeta = 0 is a pole of the multiplet")
    return np.conjugate(m.z) / zeta + m.x - m.z * zeta


def o2_roots(m: O2Multiplet) -> tuple[complex, complex]:
    """Roots zeta_pm = (x pm r) / (2z) of eta(zeta) = 0."""
    if m.z == 0:
        raise DegenerateError("o2_roots: z = 0 degenerates the quadratic")
    r = m.r
    return (m.x + r) / (2.0 * m.z), (m.x - r) / (2.0 * m.z)


@dataclass(frozen=True)
class O4Multiplet:
    """eta(zeta) = conj(z)/zeta^2 + conj(v)/zeta + x - v zeta + z zeta^2."""

    z: complex
    v: complex
    x: float
    alpha: complex
    beta: complex
    rho: float


def o4_from_roots(alpha: complex, beta: complex, rho: float) -> O4Multiplet:
    """Build the multiplet whose roots are alpha, -1/conj(alpha), beta, -1/conj(beta)."""
    if rho <= 0:
        raise DomainError(f"o4_from_roots requires rho > 0, got {rho!r}")
    ab, bb = np.conjugate(alpha), np.conjugate(beta)
    norm = (1.0 + abs(alpha) ** 2) * (1.0 + abs(beta) ** 2)
    z = rho * ab * bb / norm
    v = -rho * (ab + bb - abs(alpha) ** 2 * bb - ab * abs(beta) ** 2) / norm
    x = rho * (-ab * beta - alpha * bb + (1.0 - abs(alpha) ** 2) * (1.0 - abs(beta) ** 2)) / norm
    return O4Multiplet(complex(z), complex(v), float(np.real(x)), complex(alpha),
                       complex(beta), float(rho))


def o4_eval(m: O4Multiplet, zeta: complex) -> complex:
    if zeta == 0:
        raise PoleError("o4_eval: zeta = 0 is a pole of the multiplet")
    return (np.conjugate(m.z) / zeta**2 + np.conjugate(m.v) / zeta + m.x
            - m.v * zeta + m.z * zeta**2)


def o4_modulus(m: O4Multiplet) -> float:
    """Elliptic modulus k = |1 + conj(alpha) beta| / sqrt((1+|a|^2)(1+|b|^2))."""
    num = abs(1.0 + np.conjugate(m.alpha) * m.beta)
    den = math.sqrt((1.0 + abs(m.alpha) ** 2) * (1.0 + abs(m.beta) ** 2))
    return num / den


def tn_Fxx_contour_oracle(m: O2Multiplet, h: float, mcharge: float,
                          nodes_circle: int = 4096, nodes_loop: int = 8192,
                          step_rel: float = 1e-4) -> float:
    """F_xx by second central differences of the contour-integral F-function.

    F(x) is evaluated as the unit-circle trapezoid of the quadratic term plus
    the log term integrated along a closed ellipse enclosing the cut segment
    [0, zeta_minus] (log branch tracked by continuous unwrapping), doubled
    with its reality image.  For the Taub-NUT F-function this must reproduce
    F_xx = -2(1/h + 2 mcharge / r).  The loop uses more nodes than the
    circle: its clearance pinches as x -> -r.
    """
    if m.z == 0 or m.r == 0:
        raise DegenerateError("tn_Fxx_contour_oracle: z = 0 or r = 0")
    zp, zm = o2_roots(m)
    if abs(zp - zm) < 1e-6:
        raise ContourCollisionError(
            f"roots too close: |zeta_+ - zeta_-| = {abs(zp - zm):.3e}")
    step = step_rel * m.r
    f0 = _tn_F_value(m.x, m.z, h, mcharge, nodes_circle, nodes_loop)
    fp = _tn_F_value(m.x + step, m.z, h, mcharge, nodes_circle, nodes_loop)
    fm = _tn_F_value(m.x - step, m.z, h, mcharge, nodes_circle, nodes_loop)
    return (fp - 2.0 * f0 + fm) / (step * step)


def _tn_F_value(x: float, z: complex, h: float, mcharge: float,
                nodes_circle: int, nodes_loop: int) -> float:
    zb = np.conjugate(z)
    th = np.linspace(0.0, 2.0 * math.pi, nodes_circle, endpoint=False)
    zeta = np.exp(1j * th)
    eta = zb / zeta + x - z * zeta
    # Gamma_0 term: -(1/(2 pi i h)) oint (dzeta/zeta) eta^2, dzeta/zeta = i dth
    f_quad = np.real(-(1.0 / (2.0 * math.pi * 1j * h))
                     * np.sum(eta * eta * 1j) * (2.0 * math.pi / nodes_circle))

    r = math.sqrt(x * x + 4.0 * abs(z) ** 2)
    zm = (x - r) / (2.0 * z)
    zp = (x + r) / (2.0 * z)
    # ellipse around the segment [0, zeta_-]; overshoot and transverse width
    # bounded by the distance to zeta_+ (which sits on the opposite ray)
    pad = min(0.2 * abs(zm), 0.45 * abs(zp))
    u_hat = zm / abs(zm)
    center = 0.5 * zm
    a_ax = 0.5 * abs(zm) + pad
    b_ax = pad
    th = np.linspace(0.0, 2.0 * math.pi, nodes_loop, endpoint=False)
    loop = center + a_ax * np.cos(th) * u_hat + b_ax * np.sin(th) * (1j * u_hat)
    dloop = (-a_ax * np.sin(th) * u_hat + b_ax * np.cos(th) * (1j * u_hat)) \
        * (2.0 * math.pi / nodes_loop)
    eta_l = zb / loop + x - z * loop
    log_eta = np.log(np.abs(eta_l)) + 1j * np.unwrap(np.angle(eta_l))
    s_val = np.sum(eta_l * log_eta / loop * dloop) / (2.0 * math.pi * 1j)
    # the second loop (around the image cut through infinity) contributes the
    # complex conjugate by the reality condition
    f_log = np.real(-2.0 * mcharge * (s_val + np.conjugate(s_val)))
    return float(f_quad + f_log)


def ah_In_contour_oracle(data: EllipticData, mult: O4Multiplet, n: int,
                         tol: float = 1e-10) -> complex:
    """I_n(Gamma_m) = oint (beta (X - X0)/(X - Xinf))^n dX/Y over the [e3,e2] cut.

    Realized as twice the straight-line integral along the cut with the
    positive real branch of Y, endpoint singularities removed by the sin^2
    substitution.  n = 0 must give 2 omega1.
    """
    if n not in (0, 1, 2):
        raise DomainError(f"ah_In_contour_oracle: n must be 0, 1 or 2, got {n!r}")
    if data.delta == 0:
        raise DomainError("ah_In_contour_oracle: singular curve (delta = 0)")
    al, be, rho = mult.alpha, mult.beta, data.rho
    cross = (1.0 + np.conjugate(al) * be) / (1.0 + abs(al) ** 2)
    X0 = data.e3 + rho * (al / be) * cross
    Xinf = data.e3 + rho * cross
    pad = 1e-9 * (data.e2 - data.e3)
    if abs(Xinf.imag) < pad and data.e3 - pad <= Xinf.real <= data.e2 + pad:
        raise PoleError(f"ah_In_contour_oracle: X_inf = {Xinf!r} lies on the cut")

    k2 = (data.e2 - data.e3) / rho
    span = data.e2 - data.e3
    sr = math.sqrt(rho)

    def g(t):
        s2 = np.sin(t) ** 2
        X = data.e3 + span * s2
        w = (be * (X - X0) / (X - Xinf)) ** n if n else np.ones_like(X)
        return w / (sr * np.sqrt(1.0 - k2 * s2))

    return 2.0 * quad_adaptive(g, 0.0, math.pi / 2.0, tol)


def ah_I1_closed_form(z: complex, pi_plus: complex, pi_minus: float,
                      a_int: int) -> complex:
    """Closed form I_1(Gamma_m) = (pi(x+) + pi(x-) + 2 a pi i) / (4 sqrt(z))."""
    return (pi_plus + pi_minus + 2.0 * a_int * math.pi * 1j) / (4.0 * cmath.sqrt(z))


def ah_I2_closed_form(z: complex, v: complex, x: float, data: EllipticData,
                      pi_plus: complex, pi_minus: float, a_int: int) -> complex:
    """Closed form I_2(Gamma_m) built from eta1, omega1 and pi(x_pm)."""
    bracket = pi_plus + pi_minus + 2.0 * a_int * math.pi * 1j
    return -(1.0 / z) * (data.eta1 + data.omega1 * x / 3.0
                         - (v / (8.0 * cmath.sqrt(z))) * bracket)


def best_branch_integer(value: complex, base: complex, z: complex,
                        a_range: int = 4) -> tuple[int, float]:
    """Pick the integer a minimizing |value - (base + 2 a pi i/(4 sqrt z)))|.

    Returns (a, residual).  The construction only proves existence of the
    integer, so oracles report the minimizing choice.
    """
    best_a, best_res = 0, math.inf
    for a in range(-a_range, a_range + 1):
        cand = base + (2.0 * a * math.pi * 1j) / (4.0 * cmath.sqrt(z))
        res = abs(value - cand)
        if res < best_res:
            best_a, best_res = a, res
    return best_a, best_res
