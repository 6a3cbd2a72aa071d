"""Moment maps, fundamental vector fields, and Hamiltonicity verification.

Real coordinates are ordered (re u, im u, re z, im z) (or the (U, Z)
counterparts); the Kahler form

    omega = (i/2) [K_uu du^du_bar + K_uz du^dz_bar + K_zu dz^du_bar
                   + K_zz dz^dz_bar]

becomes the antisymmetric matrix assembled by `omega_matrix`.  The check
iota_X omega = d mu is done with the metric block on one side and finite
differences of the scalar moment on the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import atiyah_hitchin as ah
from . import taub_nut as tn
from .errors import DomainError

_VALID_ACTIONS = {
    ("TaubNUT", "U1_triholo"),
    ("TaubNUT", "SO2_rot"),
    ("AtiyahHitchin", "SO2_rot"),
    ("CotangentR3", "SO3_rot"),
}


@dataclass(frozen=True)
class ActionSpec:
    """A Hamiltonian group action on one of the supported manifolds."""

    manifold: str
    generator: str

    def __post_init__(self):
        if (self.manifold, self.generator) not in _VALID_ACTIONS:
            raise DomainError(
                f"unsupported action {self.generator!r} on {self.manifold!r}")

    def field(self, w0: complex, w1: complex) -> np.ndarray:
        """Fundamental field at holomorphic coordinates (w0, w1), real components.

        U1_triholo: X = i(d_u - d_ubar)  ->  d/d(im u).
        SO2_rot:    X = -2i(z d_z - zbar d_zbar) (same form in Z).
        """
        if self.generator == "U1_triholo":
            return np.array([0.0, 1.0, 0.0, 0.0])
        if self.generator == "SO2_rot":
            return np.array([0.0, 0.0, 2.0 * w1.imag, -2.0 * w1.real])
        raise DomainError("SO3_rot acts on the cotangent fixture, not a chart")


def omega_matrix(kuu: complex, kuz: complex, kzu: complex, kzz: complex) -> np.ndarray:
    """Kahler 2-form as a real antisymmetric 4x4 matrix in (u1, u2, z1, z2)."""
    p1, p2 = kzu.real, kzu.imag
    w = np.zeros((4, 4))
    w[0, 1] = kuu.real
    w[0, 2] = p2
    w[0, 3] = p1
    w[1, 2] = -p1
    w[1, 3] = p2
    w[2, 3] = kzz.real
    return w - w.T


def omega_of_block(block) -> np.ndarray:
    """omega_matrix from a Taub-NUT MetricBlock or Atiyah-Hitchin AHMetricBlock."""
    if hasattr(block, "kuubar"):
        return omega_matrix(block.kuubar, block.kuzbar, block.kzubar, block.kzzbar)
    return omega_matrix(block.kUUbar, block.kUZbar, block.kZUbar, block.kZZbar)


def moment_tn_u1(pt: tn.TNHoloPoint) -> float:
    """mu = x / 2 for the tri-holomorphic U(1)."""
    return 0.5 * pt.x


def moment_tn_so2(pt: tn.TNHoloPoint, p: tn.TNParams) -> float:
    """mu = 2 m r + 2 |z|^2 / h for the rotational SO(2)."""
    return 2.0 * p.m * pt.r + 2.0 * abs(pt.z) ** 2 / p.h


def moment_ah_so2(state: ah.AHGeomState) -> float:
    """mu = -4 eta1 - 2 (x_+ + x_-) omega1."""
    d = state.elliptic
    return -4.0 * d.eta1 - 2.0 * (state.xplus + state.xminus) * d.omega1


def so3_cotangent_moment(q, p) -> np.ndarray:
    """Angular-momentum moment map mu(q, p) = q x p on T*R^3."""
    return np.cross(np.asarray(q, dtype=float), np.asarray(p, dtype=float))


def _iota_omega(action: ActionSpec, block, w0: complex, w1: complex) -> np.ndarray:
    X = action.field(w0, w1)
    return X @ omega_of_block(block)


def verify_hamiltonian_tn(action: ActionSpec, pt: tn.TNHoloPoint, p: tn.TNParams,
                          eps: float = 1e-5) -> float:
    """max-component residual of iota_X omega - d mu at a Taub-NUT point."""
    if not 1e-7 <= eps <= 1e-3:
        raise DomainError(f"eps must lie in [1e-7, 1e-3], got {eps!r}")
    if action.manifold != "TaubNUT":
        raise DomainError("verify_hamiltonian_tn expects a Taub-NUT action")

    def mu_of(q):
        point = tn.tn_point_from_uz(complex(q[0], q[1]), complex(q[2], q[3]), p)
        if action.generator == "U1_triholo":
            return moment_tn_u1(point)
        return moment_tn_so2(point, p)

    q0 = np.array([pt.u.real, pt.u.imag, pt.z.real, pt.z.imag])
    dmu = np.zeros(4)
    for a in range(4):
        step = max(eps * abs(q0[a]), 1e-7)
        qp, qm = q0.copy(), q0.copy()
        qp[a] += step
        qm[a] -= step
        dmu[a] = (mu_of(qp) - mu_of(qm)) / (2.0 * step)
    lhs = _iota_omega(action, tn.tn_metric_holo(pt, p), pt.u, pt.z)
    return float(np.max(np.abs(lhs - dmu)))


def _ah_chart_real(pt: ah.AHSphericalPoint, p: ah.AHParams) -> np.ndarray:
    state = ah.ah_from_spherical(pt, p)
    # tight quadrature tolerance: these values sit inside difference quotients
    _, U, Z = ah.ah_u_coordinate(state, p, tol=1e-12)
    return np.array([U.real, U.imag, Z.real, Z.imag])


def ah_chart_jacobian(pt: ah.AHSphericalPoint, p: ah.AHParams,
                      eps: float = 1e-5) -> np.ndarray:
    """J[i, a] = d(U1, U2, Z1, Z2)_i / d(k, theta, phi, psi)_a by central differences."""
    angles = np.array([pt.k, pt.theta, pt.phi, pt.psi])
    J = np.zeros((4, 4))
    for a in range(4):
        step = max(eps * abs(angles[a]), 1e-6)
        up, dn = angles.copy(), angles.copy()
        up[a] += step
        dn[a] -= step
        f_up = _ah_chart_real(ah.AHSphericalPoint(*up), p)
        f_dn = _ah_chart_real(ah.AHSphericalPoint(*dn), p)
        J[:, a] = (f_up - f_dn) / (2.0 * step)
    return J


def verify_hamiltonian_ah(pt: ah.AHSphericalPoint, p: ah.AHParams,
                          eps: float = 1e-5) -> float:
    """max-component residual of iota_X omega - d mu at an Atiyah-Hitchin point.

    d mu is differenced in the spherical chart and pushed to the (U, Z)
    components through the finite-difference chart Jacobian; the metric side
    is evaluated directly from the closed-form block.
    """
    if not 1e-7 <= eps <= 1e-3:
        raise DomainError(f"eps must lie in [1e-7, 1e-3], got {eps!r}")
    angles = np.array([pt.k, pt.theta, pt.phi, pt.psi])

    def mu_of(a_vec):
        return moment_ah_so2(ah.ah_from_spherical(ah.AHSphericalPoint(*a_vec), p))

    dmu_ang = np.zeros(4)
    for a in range(4):
        step = max(eps * abs(angles[a]), 1e-6)
        up, dn = angles.copy(), angles.copy()
        up[a] += step
        dn[a] -= step
        dmu_ang[a] = (mu_of(up) - mu_of(dn)) / (2.0 * step)
    J = ah_chart_jacobian(pt, p, eps)
    dmu = np.linalg.solve(J.T, dmu_ang)

    state = ah.ah_from_spherical(pt, p)
    _, U, Z = ah.ah_u_coordinate(state, p)
    block = ah.ah_metric_UZ(state, p)
    action = ActionSpec("AtiyahHitchin", "SO2_rot")
    lhs = _iota_omega(action, block, U, Z)
    return float(np.max(np.abs(lhs - dmu)))


def verify_hamiltonian(action: ActionSpec, pt, params, eps: float = 1e-5) -> float:
    """Dispatch on the action's manifold (Taub-NUT holo point or AH spherical point)."""
    if action.manifold == "TaubNUT":
        return verify_hamiltonian_tn(action, pt, params, eps)
    if action.manifold == "AtiyahHitchin":
        return verify_hamiltonian_ah(pt, params, eps)
    raise DomainError("verify_hamiltonian covers the Taub-NUT and AH actions")


def rk4_orbit(field, q0: np.ndarray, t_total: float, n_steps: int) -> np.ndarray:
    """Integrate dq/dt = field(q) with classical RK4; returns the sampled path."""
    q = np.asarray(q0, dtype=float).copy()
    path = [q.copy()]
    dt = t_total / n_steps
    for _ in range(n_steps):
        k1 = field(q)
        k2 = field(q + 0.5 * dt * k1)
        k3 = field(q + 0.5 * dt * k2)
        k4 = field(q + dt * k3)
        q = q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        path.append(q.copy())
    return np.array(path)
