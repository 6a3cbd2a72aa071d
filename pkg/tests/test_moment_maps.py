"""Moment maps, Hamiltonicity finite differences, orbits, SO(3) fixture."""

import math

import numpy as np
import pytest

from slag_forge.atiyah_hitchin import AHParams, AHSphericalPoint, ah_from_spherical
from slag_forge.errors import DomainError
from slag_forge.moment_maps import (ActionSpec, moment_ah_so2, moment_tn_so2,
                                    moment_tn_u1, omega_of_block, rk4_orbit,
                                    so3_cotangent_moment, verify_hamiltonian,
                                    verify_hamiltonian_ah)
from slag_forge.taub_nut import TNParams, tn_metric_holo, tn_point_from_uz, \
    tn_point_from_xz

from test_atiyah_hitchin import regular_point


def random_tn_point(rng, p, r_lo=0.3, r_hi=20.0):
    r = rng.uniform(r_lo, r_hi)
    ang = rng.uniform(0.1, math.pi - 0.1)
    phase = rng.uniform(0, 2 * math.pi)
    z = r * math.sin(ang) / 2 * complex(math.cos(phase), math.sin(phase))
    return tn_point_from_xz(r * math.cos(ang), z, p, im_u=rng.uniform(-3, 3))


def test_action_spec_validation():
    ActionSpec("TaubNUT", "U1_triholo")
    ActionSpec("AtiyahHitchin", "SO2_rot")
    with pytest.raises(DomainError):
        ActionSpec("TaubNUT", "SO3_rot")
    with pytest.raises(DomainError):
        ActionSpec("AtiyahHitchin", "U1_triholo")


def test_moment_values():
    p = TNParams(1.0, 1.0)
    pt = tn_point_from_xz(0.0, 1.0 + 0j, p)   # r=2, |z|=1
    assert moment_tn_u1(pt) == 0.0
    assert moment_tn_so2(pt, p) == pytest.approx(6.0)
    pt3 = tn_point_from_xz(3.0, 0.5 + 0j, p)
    assert moment_tn_u1(pt3) == pytest.approx(1.5)
    p0 = TNParams(2.0, 0.0)
    assert moment_tn_so2(pt, p0) == pytest.approx(2 * 1.0 / 2.0)


def test_moment_u1_ignores_im_u_and_so2_phase():
    p = TNParams(1.0, 1.0)
    a = tn_point_from_xz(1.2, 0.5 + 0.3j, p, im_u=0.0)
    b = tn_point_from_xz(1.2, 0.5 + 0.3j, p, im_u=2.5)
    assert moment_tn_u1(a) == moment_tn_u1(b)
    c = tn_point_from_xz(1.2, (0.5 + 0.3j) * np.exp(0.7j), p)
    assert moment_tn_so2(a, p) == pytest.approx(moment_tn_so2(c, p), rel=1e-14)


def test_hamiltonicity_tn_u1():
    rng = np.random.default_rng(40)
    action = ActionSpec("TaubNUT", "U1_triholo")
    worst = 0.0
    for _ in range(100):
        p = TNParams(rng.uniform(0.5, 2.0), rng.uniform(0.1, 2.0))
        worst = max(worst, verify_hamiltonian(action, random_tn_point(rng, p), p))
    assert worst < 1e-5


def test_hamiltonicity_tn_so2():
    rng = np.random.default_rng(41)
    action = ActionSpec("TaubNUT", "SO2_rot")
    worst = 0.0
    for _ in range(100):
        p = TNParams(rng.uniform(0.5, 2.0), rng.uniform(0.1, 2.0))
        worst = max(worst, verify_hamiltonian(action, random_tn_point(rng, p), p))
    assert worst < 1e-5


def test_hamiltonicity_ah():
    rng = np.random.default_rng(42)
    p = AHParams(1.0, 1)
    worst = 0.0
    for _ in range(100):
        pt, _ = regular_point(rng, p, y_guard=3e-3)
        worst = max(worst, verify_hamiltonian_ah(pt, p))
    assert worst < 1e-4


def test_hamiltonicity_eps_validation():
    p = TNParams(1.0, 1.0)
    pt = tn_point_from_xz(1.0, 0.5 + 0j, p)
    with pytest.raises(DomainError):
        verify_hamiltonian(ActionSpec("TaubNUT", "U1_triholo"), pt, p, eps=1e-2)


def test_orbit_constancy_tn():
    rng = np.random.default_rng(43)
    p = TNParams(1.0, 1.0)
    for name in ("U1_triholo", "SO2_rot"):
        action = ActionSpec("TaubNUT", name)
        pt = random_tn_point(rng, p, 0.5, 10.0)
        q0 = np.array([pt.u.real, pt.u.imag, pt.z.real, pt.z.imag])

        def field(q, a=action):
            return a.field(complex(q[0], q[1]), complex(q[2], q[3]))

        path = rk4_orbit(field, q0, 1.0, 2000)
        mus = []
        for q in path[::100]:
            point = tn_point_from_uz(complex(q[0], q[1]), complex(q[2], q[3]), p)
            mus.append(moment_tn_u1(point) if name == "U1_triholo"
                       else moment_tn_so2(point, p))
        assert max(mus) - min(mus) < 1e-8


def test_orbit_constancy_ah():
    """The rotational orbit is the phi-circle: generator matches the chart
    pushforward and mu is constant along 20 orbit points."""
    rng = np.random.default_rng(44)
    p = AHParams(1.0, 1)
    pt, state0 = regular_point(rng, p)
    mus = [moment_ah_so2(ah_from_spherical(
        AHSphericalPoint(pt.k, pt.theta, (pt.phi + s) % (2 * math.pi), pt.psi), p))
        for s in np.linspace(0, 2 * math.pi, 20, endpoint=False)]
    assert max(mus) - min(mus) < 1e-8
    from slag_forge.atiyah_hitchin import ah_u_coordinate
    dphi = 1e-5
    up = ah_from_spherical(AHSphericalPoint(pt.k, pt.theta, pt.phi + dphi, pt.psi), p)
    dn = ah_from_spherical(AHSphericalPoint(pt.k, pt.theta, pt.phi - dphi, pt.psi), p)
    _, U_u, Z_u = ah_u_coordinate(up, p, tol=1e-12)
    _, U_d, Z_d = ah_u_coordinate(dn, p, tol=1e-12)
    _, U0, Z0 = ah_u_coordinate(state0, p, tol=1e-12)
    assert abs((U_u - U_d) / (2 * dphi)) < 1e-6 * max(1.0, abs(U0))
    assert (Z_u - Z_d) / (2 * dphi) == pytest.approx(1j * Z0, rel=1e-6)


def test_lie_derivative_vanishes():
    """L_X omega = 0 via d(iota_X omega) = 0, second differences."""
    rng = np.random.default_rng(45)
    p = TNParams(1.0, 1.0)
    from slag_forge.moment_maps import _iota_omega
    for name in ("U1_triholo", "SO2_rot"):
        action = ActionSpec("TaubNUT", name)
        pt = random_tn_point(rng, p, 1.0, 10.0)
        q0 = np.array([pt.u.real, pt.u.imag, pt.z.real, pt.z.imag])

        def sigma(q):
            point = tn_point_from_uz(complex(q[0], q[1]), complex(q[2], q[3]), p)
            return _iota_omega(action, tn_metric_holo(point, p), point.u, point.z)

        h = 1e-4
        for a in range(4):
            for b in range(a + 1, 4):
                qa_p, qa_m = q0.copy(), q0.copy()
                qa_p[a] += h
                qa_m[a] -= h
                qb_p, qb_m = q0.copy(), q0.copy()
                qb_p[b] += h
                qb_m[b] -= h
                curl = ((sigma(qa_p)[b] - sigma(qa_m)[b])
                        - (sigma(qb_p)[a] - sigma(qb_m)[a])) / (2 * h)
                assert abs(curl) < 1e-3


def test_so3_cotangent_moment():
    assert np.allclose(so3_cotangent_moment([1, 0, 0], [0, 1, 0]), [0, 0, 1])
    assert np.allclose(so3_cotangent_moment([2, 1, 3], [4, 2, 6]), [0, 0, 0])
    rng = np.random.default_rng(46)
    for _ in range(20):
        q = rng.normal(size=3)
        p_vec = rng.normal(size=3)
        mat, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        if np.linalg.det(mat) < 0:
            mat[:, 0] = -mat[:, 0]
        lhs = so3_cotangent_moment(mat @ q, mat @ p_vec)
        rhs = mat @ so3_cotangent_moment(q, p_vec)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_omega_matrix_antisymmetric():
    p = TNParams(1.0, 1.0)
    pt = tn_point_from_xz(0.8, 0.4 + 0.6j, p)
    W = omega_of_block(tn_metric_holo(pt, p))
    assert np.allclose(W, -W.T)
