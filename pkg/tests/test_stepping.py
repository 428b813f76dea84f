import math

import numpy as np
import pytest

from blowup import catalog
from blowup.stepping import (
    DegenerateJVP,
    NonpositiveDerivative,
    h_adaptive_1d,
    h_adaptive_nd,
    h_alt_nd,
    h_log_nd,
    h_taylor_1d,
    h_uniform_1d,
    h_uniform_nd,
)

B_SQ = lambda x: x * x
DB_SQ = lambda x: 2.0 * x


class TestAdaptive1D:
    def test_probe_below_radius(self):
        eps = 2.0**-10
        assert h_adaptive_1d(eps, 0.5, 1.1, 1024.0, DB_SQ) == eps / math.sqrt(
            DB_SQ(1.1 * 0.5)
        )

    def test_probe_clamps_at_radius(self):
        eps = 2.0**-10
        h = h_adaptive_1d(eps, 2000.0, 1.1, 1024.0, DB_SQ)
        assert h == eps / math.sqrt(2048.0)
        assert h == pytest.approx(2.1579e-5, rel=1e-4)

    def test_exponential_field(self):
        eps = 1e-3
        db = lambda x: 2.0 * x * math.exp(x * x)
        expected = eps / math.sqrt(2.2 * math.exp(1.21))
        assert h_adaptive_1d(eps, 1.0, 1.1, 100.0, db) == pytest.approx(expected, rel=1e-15)

    def test_nonpositive_derivative(self):
        with pytest.raises(NonpositiveDerivative):
            h_adaptive_1d(0.01, 1.0, 1.1, 10.0, lambda x: -1.0)

    def test_independent_of_state_once_clamped(self):
        eps = 2.0**-8
        r = 64.0
        ref = h_adaptive_1d(eps, r / 1.1, 1.1, r, DB_SQ)
        for i in range(10):
            xbar = r / 1.1 * (1.0 + 0.37 * (i + 1))
            assert h_adaptive_1d(eps, xbar, 1.1, r, DB_SQ) == ref


class TestTaylor1D:
    def test_second_order_example(self):
        eps = 2.0**-10
        h = h_taylor_1d(eps, 0.5, 1.1, 1024.0, DB_SQ, 2)
        assert h == math.sqrt(eps) / 1.1 ** (2.0 / 3.0)
        assert h == pytest.approx(0.029326, rel=1e-4)

    def test_identity_case(self):
        assert h_taylor_1d(1.0, 5.0, 1.1, 10.0, lambda x: 1.0, 2) == 1.0

    def test_third_order_formula(self):
        h = h_taylor_1d(2.0**-12, 1.0, 1.1, 10.0, lambda x: 16.0, 3)
        assert h == pytest.approx(0.0078125, rel=1e-15)

    def test_m_bar_validation(self):
        with pytest.raises(ValueError):
            h_taylor_1d(0.1, 1.0, 1.1, 10.0, DB_SQ, 1)


class TestUniform1D:
    def test_sq_example(self):
        eps = 2.0**-10
        h = h_uniform_1d(eps, 0.5, 1024.0, B_SQ, DB_SQ)
        h_bar = eps / math.log(B_SQ(1024.0) / B_SQ(0.5))
        assert math.log(B_SQ(1024.0) / B_SQ(0.5)) == pytest.approx(22 * math.log(2), rel=1e-15)
        assert h == min(h_bar, 1.0 / 4096.0)
        assert h == h_bar  # the log branch binds here

    def test_derivative_branch_binds_for_large_eps(self):
        h = h_uniform_1d(100.0, 0.5, 1024.0, B_SQ, DB_SQ)
        assert h == 1.0 / (2.0 * DB_SQ(1024.0))

    def test_equal_endpoints_rejected(self):
        with pytest.raises(ValueError):
            h_uniform_1d(0.1, 2.0, 2.0, B_SQ, DB_SQ)


class TestAdaptiveND:
    def test_example(self):
        assert h_adaptive_nd(0.01, 15.0) == pytest.approx(0.01 / math.sqrt(15.0), rel=1e-15)
        assert h_adaptive_nd(0.01, 15.0) == pytest.approx(2.5820e-3, rel=1e-4)

    def test_clamps_small_norms(self):
        assert h_adaptive_nd(0.01, 0.3) == 0.01

    def test_powers_of_two(self):
        assert h_adaptive_nd(2.0**-5, 4.0) == 2.0**-6


class TestAltND:
    def test_example(self):
        assert h_alt_nd(1e-3, 4.0, 16.0) == pytest.approx(5e-4, rel=1e-15)

    def test_identity_case(self):
        assert h_alt_nd(1e-3, 1.0, 1.0) == 1e-3

    def test_degenerate_jvp(self):
        with pytest.raises(DegenerateJVP):
            h_alt_nd(1e-3, 1.0, 0.0)

    def test_rd_initial_profile_against_dense_oracle(self):
        # oracle: dense tridiagonal assembly at m = 32
        m = 32
        prob = catalog.build_reaction_diffusion(m)
        x = prob.x0
        bx = prob.rhs(x)
        dense = np.diag(np.full(m - 1, -2.0 * m * m)) + np.diag(
            np.full(m - 2, float(m * m)), 1
        ) + np.diag(np.full(m - 2, float(m * m)), -1) + np.diag(2.0 * x)
        b_norm = float(np.linalg.norm(bx))
        jvp_norm_oracle = float(np.linalg.norm(dense @ bx))
        jvp_norm_matfree = float(np.linalg.norm(prob.jacobian.jvp(x, bx)))
        assert jvp_norm_matfree == pytest.approx(jvp_norm_oracle, rel=1e-12)

        eps = 2.0**-18
        h_alt = h_alt_nd(eps, b_norm, jvp_norm_oracle)
        cap = 1.0 / (2.0 * m * m)
        # the adaptive branch, not the cap, binds at t = 0 for this tolerance
        assert min(h_alt, cap) == h_alt
        assert h_alt == eps * math.sqrt(b_norm) / math.sqrt(jvp_norm_oracle)

    def test_relation_to_adaptive_law(self):
        # h_alt == h_adaptive * sqrt(norm * |b| / |b'b|) whenever norm >= 1
        rng = np.random.default_rng(5)
        for _ in range(25):
            eps = float(rng.uniform(1e-6, 1e-1))
            bn = float(rng.uniform(0.1, 1e3))
            jn = float(rng.uniform(0.1, 1e3))
            norm = float(rng.uniform(1.0, 1e4))
            lhs = h_alt_nd(eps, bn, jn)
            rhs = h_adaptive_nd(eps, norm) * math.sqrt(norm * bn / jn)
            assert lhs == pytest.approx(rhs, rel=1e-12)


class TestLogND:
    def test_example(self):
        assert h_log_nd(0.01, 100, 4.0) == pytest.approx(5e-3, rel=1e-15)

    def test_identity_case(self):
        assert h_log_nd(1.0, 1, 0.5) == 1.0

    def test_powers_of_two(self):
        assert h_log_nd(2.0**-8, 2**10, 2.0**6) == 2.0**-12

    def test_guess_validation(self):
        with pytest.raises(ValueError):
            h_log_nd(0.1, 0, 1.0)


class TestUniformND:
    def test_example(self):
        h = h_uniform_nd(2.0**-10, 2.0**10)
        assert h == pytest.approx(2.0**-10 / (10.0 * math.log(2.0)), rel=1e-15)

    def test_radius_must_exceed_e(self):
        with pytest.raises(ValueError):
            h_uniform_nd(0.1, math.e)

    def test_large_radius(self):
        assert h_uniform_nd(0.01, math.exp(100.0)) == pytest.approx(1e-4, rel=1e-12)


def test_every_law_increasing_in_eps():
    eps_grid = [2.0**-k for k in range(8, 13)]
    laws = [
        lambda e: h_adaptive_1d(e, 0.5, 1.1, 1024.0, DB_SQ),
        lambda e: h_taylor_1d(e, 0.5, 1.1, 1024.0, DB_SQ, 2),
        # small eps so the log branch binds; the 1/(2 b'(r)) cap has no eps in it
        lambda e: h_uniform_1d(e, 0.5, 1024.0, B_SQ, DB_SQ),
        lambda e: h_adaptive_nd(e, 7.0),
        lambda e: h_alt_nd(e, 3.0, 11.0),
        lambda e: h_log_nd(e, 64, 7.0),
        lambda e: h_uniform_nd(e, 100.0),
    ]
    for law in laws:
        hs = [law(e) for e in eps_grid]
        assert all(h1 > h2 for h1, h2 in zip(hs, hs[1:]))
