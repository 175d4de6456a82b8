import numpy as np
import pytest

from girthlab import (
    EmbeddedSphere,
    IllConditionedInputError,
    NoIntersectionError,
    Phi,
    PreconditionError,
    Psi,
    UnsupportedInputError,
    induced_hamiltonian,
    phi,
    psi,
    restrict_covector,
    sample_cosphere,
    solve_line_sphere,
)
from girthlab.measures import action

RNG = np.random.default_rng(11)


@pytest.fixture(scope="module")
def spheres(aniso_ellipsoid, pm_body, pm_body6, tilted_ellipsoid):
    return [
        EmbeddedSphere(aniso_ellipsoid, pm_body),
        EmbeddedSphere(pm_body6, tilted_ellipsoid),
    ]


def test_line_sphere_roots_on_surface(spheres):
    for s in spheres:
        q, p = sample_cosphere(s, 10, np.random.default_rng(0))
        for i in range(10):
            sol = solve_line_sphere(s, q[i], 0.5 * p[i])
            assert sol.t_minus <= sol.t_plus
            assert not sol.tangent
            assert abs(s.dual2.gauge(sol.P_minus) - 1.0) <= 1e-10
            assert abs(s.dual2.gauge(sol.P_plus) - 1.0) <= 1e-10


def test_line_sphere_tangent_case(spheres):
    for s in spheres:
        q, p = sample_cosphere(s, 5, np.random.default_rng(1))
        for i in range(5):
            sol = solve_line_sphere(s, q[i], p[i])
            assert sol.tangent
            np.testing.assert_allclose(sol.P_minus, sol.P_plus)


def test_phi_image_residuals(spheres):
    for s in spheres:
        q, p = sample_cosphere(s, 64, np.random.default_rng(2))
        P, Q = phi(s, q, p)
        np.testing.assert_allclose(s.dual2.gauge(P), 1.0, atol=1e-10)
        # restriction of P back to the fiber over q reproduces p
        np.testing.assert_allclose(restrict_covector(s, P, q), p, atol=1e-10)
        # Q is the canonical restriction of q at P on the dual side
        np.testing.assert_allclose(np.einsum("ij,ij->i", Q, P), 0.0, atol=1e-12)


def test_phi_lands_on_dual_cosphere(spheres):
    for s in spheres:
        q, p = sample_cosphere(s, 32, np.random.default_rng(3))
        P, Q = psi(s, q, p)
        G = induced_hamiltonian(s.swapped(), P, Q)
        np.testing.assert_allclose(G, 1.0, atol=1e-9)


def test_phi_round_trip(spheres):
    for s in spheres:
        sw = s.swapped()
        q, p = sample_cosphere(s, 32, np.random.default_rng(4))
        P, Q = phi(s, q, p)
        q2, p2 = phi(sw, P, Q)
        np.testing.assert_allclose(q2, q, atol=1e-8)
        np.testing.assert_allclose(p2, p, atol=1e-8)


def test_phi_rejects_interior_point(spheres):
    s = spheres[0]
    q, p = sample_cosphere(s, 1, np.random.default_rng(5))
    with pytest.raises(PreconditionError):
        phi(s, q[0], 0.5 * p[0])


def test_psi_antipodal_equivariance(spheres):
    for s in spheres:
        q, p = sample_cosphere(s, 64, np.random.default_rng(6))
        P, Q = psi(s, q, p)
        Pm, Qm = psi(s, -q, -p)
        np.testing.assert_allclose(Pm, -P, atol=1e-9)
        np.testing.assert_allclose(Qm, -Q, atol=1e-9)


def test_interior_map_round_trip(spheres):
    for s in spheres:
        sw = s.swapped()
        q, p = sample_cosphere(s, 16, np.random.default_rng(7))
        lam = np.random.default_rng(8).uniform(0.1, 0.9, size=16)
        for i in range(16):
            P, Q = Phi(s, q[i], lam[i] * p[i])
            q2, p2 = Phi(sw, P, Q)
            np.testing.assert_allclose(q2, q[i], atol=1e-7)
            np.testing.assert_allclose(p2, lam[i] * p[i], atol=1e-7)


def test_interior_map_zero_section_regression(spheres):
    # the sign/orientation of the image of p = 0 is a recorded behavior:
    # the exit root along +n_q, i.e. P = t n_q with t > 0
    s = spheres[0]
    q, _ = sample_cosphere(s, 4, np.random.default_rng(9))
    for i in range(4):
        P, Q = Phi(s, q[i], np.zeros(3))
        n = s.body1.gradient(q[i])
        t = float(P @ n) / float(n @ n)
        assert t > 0.0
        np.testing.assert_allclose(P, t * n, atol=1e-10)


def test_interior_map_rejects_boundary_and_outside(spheres):
    s = spheres[0]
    q, p = sample_cosphere(s, 1, np.random.default_rng(10))
    with pytest.raises(IllConditionedInputError):
        Phi(s, q[0], p[0])
    with pytest.raises(NoIntersectionError):
        Phi(s, q[0], 2.0 * p[0])


def test_symmetrized_maps_require_symmetric_bodies(spheres):
    s = spheres[0]
    s.body2.symmetric = False
    try:
        q, p = sample_cosphere(s, 1, np.random.default_rng(11))
        with pytest.raises(UnsupportedInputError):
            psi(s, q[0], p[0])
        with pytest.raises(UnsupportedInputError):
            Psi(s, q[0], 0.5 * p[0])
    finally:
        s.body2.symmetric = True


def test_action_preserved_on_closed_loop(spheres):
    from girthlab.harness import _closed_cosphere_loop

    for s in spheres:
        q, p = _closed_cosphere_loop(s, 4096, seed=12)
        a0 = action(q, p, closed=True)
        P, Q = psi(s, q, p)
        a1 = action(P, Q, closed=True)
        assert abs(a1 - a0) <= 1e-5 * abs(a0)
        # the boundary map preserves action after orientation reversal
        BP, BQ = phi(s, q, p)
        a2 = action(BP[::-1], BQ[::-1], closed=True)
        assert abs(a2 - a0) <= 1e-5 * abs(a0)
