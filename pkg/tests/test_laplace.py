import math

import numpy as np
import pytest

from conc_toolkit.errors import DomainError, UnsupportedSizeError
from conc_toolkit.laplace import (
    ConcBound,
    LaplaceBound,
    conc_to_laplace,
    gibbs_check,
    herbst_laplace,
    laplace_sup_discrete,
    laplace_to_conc,
    log_laplace,
    mean_zero_lipschitz_vertices,
)
from conc_toolkit.measures import (
    atomize_1d,
    build_discrete_space,
    build_measure_1d,
    discrete_space_from_atoms,
)
from conc_toolkit.profiles import LOG2

TWO_POINT = build_discrete_space(np.array([[0.0, 1.0], [1.0, 0.0]]),
                                 np.array([0.5, 0.5]))


@pytest.fixture(scope="module")
def gamma2():
    return build_measure_1d(preset="gamma_p", p=2.0)


class TestLogLaplace:
    def test_zero_function(self, gamma2):
        assert log_laplace(gamma2, np.zeros_like(gamma2.grid), 1.7) == 0.0
        assert log_laplace(np.array([0.3, 0.7]), np.zeros(2), 2.0) == pytest.approx(
            0.0, abs=1e-15)

    def test_two_point_closed_form(self):
        val = log_laplace(np.array([0.5, 0.5]), np.array([0.0, 1.0]), 1.0)
        assert val == pytest.approx(math.log((1 + math.e) / 2), abs=1e-12)
        assert val == pytest.approx(0.62011, abs=1e-5)

    def test_gaussian_mgf(self, gamma2):
        lams = np.array([0.25, 0.5, 1.0, 2.0])
        vals = log_laplace(gamma2, gamma2.grid, lams)
        np.testing.assert_allclose(vals, lams**2 / 2, atol=1e-6)

    def test_convexity_in_lambda(self, gamma2):
        lams = np.linspace(-2, 2, 41)
        vals = log_laplace(gamma2, np.tanh(gamma2.grid), lams)
        assert np.all(np.diff(vals, 2) >= -1e-9)

    def test_derivative_at_zero_is_mean(self, gamma2):
        f = np.tanh(gamma2.grid) + 0.3
        h = 1e-5
        slope = (log_laplace(gamma2, f, h) - log_laplace(gamma2, f, -h)) / (2 * h)
        assert slope == pytest.approx(gamma2.integrate_nodes(f), abs=1e-8)


class TestGibbs:
    def test_zero_psi(self):
        chk = gibbs_check(np.array([0.5, 0.5]), np.zeros(2))
        assert chk.sup_value == pytest.approx(0.0, abs=1e-15)
        assert chk.log_mgf == pytest.approx(0.0, abs=1e-15)
        np.testing.assert_allclose(chk.theta_star, np.ones(2))

    def test_two_point_closed_form(self):
        chk = gibbs_check(np.array([0.5, 0.5]), np.array([0.0, 1.0]))
        target = math.log((1 + math.e) / 2)
        assert chk.log_mgf == pytest.approx(target, abs=1e-12)
        assert chk.gap <= 1e-12
        expected = np.array([2 / (1 + math.e), 2 * math.e / (1 + math.e)])
        np.testing.assert_allclose(chk.theta_star, expected, rtol=1e-12)

    def test_random_discrete_gap(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(2, 8))
            w = rng.random(n) + 0.01
            w /= w.sum()
            psi = rng.normal(size=n) * 2
            assert gibbs_check(w, psi).gap <= 1e-8

    def test_1d_gap(self, gamma2):
        psi = 0.5 * np.tanh(gamma2.grid)
        chk = gibbs_check(gamma2, psi)
        assert chk.gap <= 1e-6


class TestBoundTranslations:
    def test_laplace_to_conc_gaussian_offset(self):
        xs = np.linspace(0.0, 10.0, 16385)
        b = LaplaceBound(phi_x=xs, phi_vals=xs**2 / 2, rate=1.0)
        cb = laplace_to_conc(b)
        assert cb.offset == pytest.approx(math.sqrt(2 * LOG2), abs=1e-6)
        assert cb.offset == pytest.approx(1.17741, abs=1e-4)

    def test_eps_shifts_offset_linearly(self):
        xs = np.linspace(0.0, 10.0, 16385)
        b0 = LaplaceBound(phi_x=xs, phi_vals=xs**2 / 2, rate=1.0, eps=0.0)
        b1 = LaplaceBound(phi_x=xs, phi_vals=xs**2 / 2, rate=1.0, eps=1.0)
        z0 = laplace_to_conc(b0).offset
        z1 = laplace_to_conc(b1).offset
        assert z1 - z0 == pytest.approx(2.0, abs=1e-12)

    def test_linear_phi_with_delta(self):
        xs = np.linspace(0.0, 20.0, 16385)
        b = LaplaceBound(phi_x=xs, phi_vals=xs.copy(), rate=1.0, delta=LOG2)
        cb = laplace_to_conc(b)
        assert cb.offset == pytest.approx(2 * LOG2, abs=1e-9)

    def test_conc_to_laplace_linear_phi(self):
        xs = np.linspace(0.0, 60.0, 4001)
        cb = ConcBound(phi_x=xs, phi_vals=xs.copy(), rate=2.0)
        lb = conc_to_laplace(cb, tau=0.5)
        assert lb.rate == pytest.approx(1.0)
        assert lb.delta == pytest.approx(LOG2, abs=1e-12)
        # eps = (1/2) (Phi^{-1}(log 2) + int_0^oo e^{-r} dr) = (log 2 + 1)/2
        assert lb.eps == pytest.approx(0.5 * (LOG2 + 1.0), abs=1e-9)

    def test_conc_to_laplace_gaussian_phi(self):
        xs = np.linspace(0.0, 12.0, 8193)
        cb = ConcBound(phi_x=xs, phi_vals=xs**2 / 2, rate=1.0)
        lb = conc_to_laplace(cb, tau=0.5)
        expected = 0.5 * (math.sqrt(2 * LOG2) + math.sqrt(math.pi / 2))
        assert lb.eps == pytest.approx(expected, abs=1e-5)

    def test_tau_limit(self):
        xs = np.linspace(0.0, 40.0, 2001)
        cb = ConcBound(phi_x=xs, phi_vals=xs.copy(), rate=1.0)
        taus = np.array([0.2, 0.1, 0.01, 1e-3])
        rates = [conc_to_laplace(cb, tau=t).rate for t in taus]
        deltas = [conc_to_laplace(cb, tau=t).delta for t in taus]
        assert np.all(np.diff(rates) < 0)
        assert rates[-1] == pytest.approx(1e-3)
        assert deltas[-1] == pytest.approx(cb.log_slack, abs=2e-3)

    def test_nonintegrable_tail_rejected(self):
        # Phi == 0 is the only convex nondecreasing table with a
        # non-positive tail slope; exp(-Phi) then has infinite mass
        xs = np.linspace(0.0, 5.0, 101)
        cb = ConcBound(phi_x=xs, phi_vals=np.zeros_like(xs), rate=1.0)
        with pytest.raises(DomainError, match="integrable"):
            conc_to_laplace(cb)


class TestHerbst:
    def test_half_rho_bound(self):
        _, cb = herbst_laplace(0.5)
        rs = np.array([0.5, 2.0, 4.0])
        expected = 0.5 * np.maximum(rs - math.sqrt(2 * LOG2), 0.0) ** 2
        np.testing.assert_allclose(np.atleast_1d(cb.alpha_at(rs)), expected,
                                   atol=1e-6)

    def test_boundary_zero(self):
        _, cb = herbst_laplace(1.0)
        assert cb.alpha_at(math.sqrt(LOG2)) == pytest.approx(0.0, abs=1e-9)

    def test_laplace_side_is_quadratic(self):
        lb, _ = herbst_laplace(0.5)
        lam = np.array([0.3, 1.0, 2.5])
        np.testing.assert_allclose(np.atleast_1d(lb.phi_star_at(lam)),
                                   lam**2 / (4 * 0.5), rtol=1e-5)


class TestLipschitzVertices:
    def test_two_point_vertices(self):
        verts = mean_zero_lipschitz_vertices(TWO_POINT, TWO_POINT.weights)
        expected = {(-0.5, 0.5), (0.5, -0.5)}
        got = {tuple(np.round(v, 9)) for v in verts}
        assert got == expected

    def test_two_point_sup_is_log_cosh(self):
        lams = np.array([0.5, 1.0, 3.0])
        vals, flag, _ = laplace_sup_discrete(TWO_POINT, TWO_POINT.weights, lams)
        assert flag == "exact"
        np.testing.assert_allclose(vals, np.log(np.cosh(lams / 2)), atol=1e-12)

    def test_three_point_path_beats_random_candidates(self):
        idx = np.arange(3)
        d = np.abs(idx[:, None] - idx[None, :]).astype(float)
        s = build_discrete_space(d, np.full(3, 1 / 3))
        lams = np.array([0.5, 1.5])
        vals, flag, _ = laplace_sup_discrete(s, s.weights, lams)
        assert flag == "exact"
        rng = np.random.default_rng(7)
        for _ in range(100):
            g = rng.normal(size=3)
            # project to 1-Lipschitz and mean zero
            for _ in range(3):
                g = np.min(g[None, :] + d, axis=1)
            g = g - np.dot(s.weights, g)
            for k, lam in enumerate(lams):
                cand = math.log(np.dot(s.weights, np.exp(lam * g)))
                assert cand <= vals[k] + 1e-9

    def test_lambda_zero(self):
        vals, _, _ = laplace_sup_discrete(TWO_POINT, TWO_POINT.weights,
                                          np.array([0.0]))
        assert vals[0] == pytest.approx(0.0, abs=1e-12)

    def test_size_cap_and_heuristic(self):
        rng = np.random.default_rng(9)
        pts = rng.random((9, 2))
        d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
        s = build_discrete_space(d, np.full(9, 1 / 9))
        with pytest.raises(UnsupportedSizeError):
            laplace_sup_discrete(s, s.weights, np.array([1.0]))
        vals, flag, _ = laplace_sup_discrete(s, s.weights, np.array([1.0]),
                                             exact=False)
        assert flag == "lower"
        assert vals[0] >= 0.0


class TestRoundTrip:
    def test_herbst_round_trip_holds_on_atomized_gaussian(self, gamma2):
        lb0, cb = herbst_laplace(0.5)
        lb = conc_to_laplace(cb, tau=0.5)
        pos, w = atomize_1d(gamma2, 7)
        space = discrete_space_from_atoms(pos, w)
        lams = np.linspace(0.0, 4.0, 17)
        sup_vals, flag, _ = laplace_sup_discrete(space, w, lams * lb.rate)
        assert flag == "exact"
        rhs = np.atleast_1d(lb.rhs_log(lams))
        assert np.all(sup_vals <= rhs + 1e-9)

    def test_exponential_family_round_trip(self):
        # Phi(x) = x is a valid concentration bound for the two-sided
        # exponential (K(r) = r + log 2 >= r); the derived Laplace bound
        # must hold on its atomizations
        g1 = build_measure_1d(preset="gamma_p", p=1.0)
        xs = np.linspace(0.0, 60.0, 4097)
        cb = ConcBound(phi_x=xs, phi_vals=xs.copy(), rate=1.0)
        lb = conc_to_laplace(cb, tau=0.5)
        pos, w = atomize_1d(g1, 7)
        space = discrete_space_from_atoms(pos, w)
        lams = np.linspace(0.0, 3.0, 13)
        sup_vals, flag, _ = laplace_sup_discrete(space, w, lams * lb.rate)
        assert flag == "exact"
        rhs = np.atleast_1d(lb.rhs_log(lams))
        assert np.all(sup_vals <= rhs + 1e-9)

    def test_log_mgf_of_kr_potential_is_subquadratic(self):
        # mechanism check: for an atomized Gaussian and a KR-optimal
        # potential, L(lam) behaves like (C lam)^2 / 2 on a small window
        from conc_toolkit.transport import gibbs_tilt_discrete, kr_dual

        g2 = build_measure_1d(preset="gamma_p", p=2.0)
        pos, w = atomize_1d(g2, 33)
        space = discrete_space_from_atoms(pos, w)
        nu = gibbs_tilt_discrete(w, pos, 0.4)
        f = kr_dual(space, nu, w).potential
        f = f - np.dot(w, f)
        lams = np.linspace(0.05, 0.5, 10)
        vals = np.array([log_laplace(w, f, la) for la in lams])
        curvature = 2.0 * vals / lams**2
        fitted_c = math.sqrt(curvature.max())
        assert fitted_c < 5.0
        # near-quadratic: the curvature is stable across the window
        assert curvature.max() / curvature.min() < 2.0

    def test_with_slack_renormalization(self):
        xs = np.linspace(0.0, 30.0, 2001)
        cb = ConcBound(phi_x=xs, phi_vals=xs**2 / 4, rate=1.0, offset=1.0,
                       log_slack=0.0)
        cb2 = cb.with_slack(0.5, 0.25)
        assert 0 < cb2.rate <= 1.0
        rs = np.linspace(0, 20, 301)
        old = np.maximum(np.atleast_1d(cb.alpha_at(rs)), LOG2)
        new = np.atleast_1d(cb2.alpha_at(rs))
        assert np.all(new <= old + 1e-9)
