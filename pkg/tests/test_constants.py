import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coulomb2d import (DomainError, StabilityInputs, a_from_a_tilde,
                       a_tilde_sq_from_coupling, a_tilde_squared,
                       b_tilde_sq_from_couplings, b_tilde_squared,
                       beta_constant, derive_parameters, h_branches,
                       h_of_sigma, maximize_h, sharp_constant)

# Frozen reference values, computed with mpmath at 40 digits before the
# binary64 implementation existed.
BETA_REF = 5.904516943734008
FOUR_THIRDS_POW = 1.539600717839002
TWO_BETA = 11.809033887468017
C_HALF = 1.681792830507429          # 2^{3/4}
A_FROM_TILDE_15 = 1.47084137671644  # gamma=1.5, a~^2=sqrt(2)
BRANCH1_HALF = 0.8591068722613916   # sigma=1/2, gamma=2, a=1, b~^2=beta


class TestSharpConstant:
    def test_reference_points(self):
        assert sharp_constant(2.0) == 1.0
        assert abs(sharp_constant(1.0) - math.sqrt(2.0)) < 1e-15
        assert sharp_constant(3.0) == 1.0
        assert abs(sharp_constant(0.5) - C_HALF) < 1e-14

    def test_continuous_at_two(self):
        assert abs(sharp_constant(2.0 - 1e-12) - sharp_constant(2.0 + 1e-12)) < 1e-11

    def test_limits_and_monotonicity(self):
        assert abs(sharp_constant(1e-12) - 2.0) < 1e-11
        grid = np.linspace(0.01, 2.0, 500)
        vals = [sharp_constant(p) for p in grid]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert all(sharp_constant(p) == 1.0 for p in (2.0, 2.5, 10.0, 1e6))

    def test_rejects_nonpositive(self):
        for p in (0.0, -1.0):
            with pytest.raises(DomainError):
                sharp_constant(p)

    def test_norm_comparison_inequality_bulk(self):
        # |x|^p + |y|^p <= C(p) (x^2+y^2)^{p/2} on a large random sample
        rng = np.random.default_rng(2024)
        n = 10 ** 6
        x = rng.uniform(-10.0, 10.0, n)
        y = rng.uniform(-10.0, 10.0, n)
        p = rng.uniform(1e-3, 6.0, n)
        lhs = np.abs(x) ** p + np.abs(y) ** p
        cp = np.where(p <= 2.0, 2.0 ** (1.0 - p / 2.0), 1.0)
        rhs = cp * (x * x + y * y) ** (p / 2.0)
        assert np.all(lhs <= rhs * (1.0 + 1e-12))

    def test_norm_comparison_sharpness(self):
        # equality at |x| = |y| for p <= 2 and at y = 0 for p >= 2
        for p in (0.5, 1.0, 1.7, 2.0):
            t = 1.3
            lhs = 2.0 * t ** p
            rhs = sharp_constant(p) * (2.0 * t * t) ** (p / 2.0)
            assert abs(lhs - rhs) < 1e-12 * rhs
        for p in (2.0, 3.0, 4.5):
            t = 0.8
            lhs = t ** p
            rhs = sharp_constant(p) * (t * t) ** (p / 2.0)
            assert abs(lhs - rhs) < 1e-12 * rhs

    @given(x=st.floats(1e-6, 50.0), y=st.floats(1e-6, 50.0),
           p=st.floats(0.01, 6.0))
    @settings(max_examples=300, deadline=None)
    def test_norm_comparison_property(self, x, y, p):
        # magnitudes bounded away from 0 so x*x cannot underflow
        lhs = x ** p + y ** p
        rhs = sharp_constant(p) * (x * x + y * y) ** (p / 2.0)
        assert lhs <= rhs * (1.0 + 1e-10)


class TestDeriveParameters:
    @pytest.mark.parametrize("gamma,epsilon,alpha,delta", [
        (2.0, 0.1, 0.25, 2.0),
        (1.5, 1.0, 0.5, 3.0),
        (2.5, 0.5, 0.1, 5.0 / 3.0),
    ])
    def test_examples(self, gamma, epsilon, alpha, delta):
        p = derive_parameters(gamma, epsilon)
        assert abs(p.alpha - alpha) < 1e-15
        assert abs(p.delta - delta) < 1e-15

    def test_invariants_on_grid(self):
        for gamma in np.linspace(1.01, 2.99, 40):
            p = derive_parameters(gamma, 0.3)
            assert 0.0 < p.alpha < 1.0
            assert p.delta > 1.5
            assert abs(1.0 / p.gamma + 1.0 / p.delta - 1.0) < 1e-14

    def test_guard_band(self):
        derive_parameters(1.0 + 1e-6, 1.0)
        derive_parameters(3.0 - 1e-6, 1.0)
        for gamma in (1.0, 1.0 + 1e-7, 3.0 - 1e-7, 3.0, 0.5, 3.5):
            with pytest.raises(DomainError):
                derive_parameters(gamma, 1.0)

    def test_rejects_bad_epsilon(self):
        for eps in (0.0, -0.5):
            with pytest.raises(DomainError):
                derive_parameters(2.0, eps)


class TestBetaConstant:
    def test_value(self):
        assert abs(beta_constant() - 5.9045) < 1e-4
        assert abs(beta_constant() - BETA_REF) < 1e-14 * BETA_REF

    def test_four_thirds_power(self):
        assert abs((4.0 / 3.0) ** 1.5 - FOUR_THIRDS_POW) < 1e-14

    def test_matches_arbitrary_precision(self):
        mp.mp.dps = 40
        exact = mp.power(mp.mpf(4) / 3, mp.mpf(3) / 2) * mp.sqrt(5 * mp.pi - 1)
        assert abs(beta_constant() - float(exact)) < 1e-14 * float(exact)

    def test_equals_b_tilde_at_zero(self):
        assert beta_constant() == b_tilde_squared(0.0)

    def test_inverse_identity(self):
        # (3/4)^{3/2} (5 pi - 1)^{-1/2} is exactly 1/beta
        inv = 0.75 ** 1.5 / math.sqrt(5.0 * math.pi - 1.0)
        assert abs(inv * beta_constant() - 1.0) < 1e-14


class TestBTildeSquared:
    def test_scaling_in_epsilon(self):
        beta = beta_constant()
        assert b_tilde_squared(0.0) == beta
        assert abs(b_tilde_squared(0.1) - 1.1 * beta) < 1e-15 * beta
        assert abs(b_tilde_squared(1.0) - TWO_BETA) < 1e-14 * TWO_BETA

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            b_tilde_squared(-0.01)


class TestATildeSquared:
    @pytest.mark.parametrize("epsilon", [0.01, 0.1, 1.0, 10.0])
    def test_gamma_two_reduction(self, epsilon):
        # at gamma = 2 the coefficient must be exactly 4 / (beta epsilon)
        params = derive_parameters(2.0, epsilon)
        product = a_tilde_squared(params) * beta_constant() * epsilon
        assert abs(product - 4.0) < 1e-12 * 4.0

    def test_gamma_to_one_limit(self):
        params = derive_parameters(1.001, 0.37)
        assert abs(a_tilde_squared(params) - math.sqrt(2.0)) \
            < 1e-2 * math.sqrt(2.0)

    def test_limit_independent_of_epsilon(self):
        lo = a_tilde_squared(derive_parameters(1.001, 0.1))
        hi = a_tilde_squared(derive_parameters(1.001, 10.0))
        assert abs(lo - hi) < 1e-2

    def test_matches_arbitrary_precision(self):
        mp.mp.dps = 40
        beta = mp.power(mp.mpf(4) / 3, mp.mpf(3) / 2) * mp.sqrt(5 * mp.pi - 1)
        for gamma, epsilon in [(1.3, 0.2), (1.8, 1.5), (2.4, 0.05), (2.9, 3.0)]:
            g = mp.mpf(gamma)
            e = mp.mpf(epsilon)
            delta = g / (g - 1)
            cg = mp.power(2, 1 - g / 2) if g <= 2 else mp.mpf(1)
            cd = mp.power(2, 1 - delta / 2) if delta <= 2 else mp.mpf(1)
            exact = (mp.power(2, g) * cg / (3 - g)
                     * mp.power((1 / (beta * e)) * ((g - 1) / (3 - g)) * cd,
                                g - 1))
            got = a_tilde_squared(derive_parameters(gamma, epsilon))
            assert abs(got - float(exact)) < 1e-12 * float(exact)


class TestCouplingInversion:
    def test_gamma_two_is_square_root(self):
        params = derive_parameters(2.0, 1.0)
        for at2 in (0.5, 1.0, 7.3):
            assert abs(a_from_a_tilde(at2, params) - math.sqrt(at2)) < 1e-14

    def test_round_trip(self):
        for gamma in (1.2, 1.7, 2.0, 2.6):
            params = derive_parameters(gamma, 1.0)
            for at2 in (0.3, 1.0, 12.0):
                a = a_from_a_tilde(at2, params)
                back = a_tilde_sq_from_coupling(a, params)
                assert abs(back - at2) < 1e-12 * at2

    def test_frozen_value(self):
        params = derive_parameters(1.5, 1.0)
        a = a_from_a_tilde(math.sqrt(2.0), params)
        assert abs(a - A_FROM_TILDE_15) < 1e-13

    def test_rejects_nonpositive(self):
        params = derive_parameters(2.0, 1.0)
        with pytest.raises(DomainError):
            a_from_a_tilde(0.0, params)

    def test_b_composition(self):
        # b~^2 = b2^delta C(delta) / (2 alpha delta) + b1^2
        params = derive_parameters(2.0, 1.0)
        got = b_tilde_sq_from_couplings(1.5, 2.0, params)
        # at gamma = 2: delta = 2, alpha = 1/4, so b2^2 + b1^2
        assert abs(got - (2.0 ** 2 + 1.5 ** 2)) < 1e-14

    def test_stability_inputs_validation(self):
        StabilityInputs(a=1.0, b1=1.0, b2=1.0, z=1.0)
        with pytest.raises(DomainError):
            StabilityInputs(a=0.0, b1=1.0, b2=1.0, z=1.0)
        with pytest.raises(DomainError):
            StabilityInputs(a=1.0, b1=1.0, b2=1.0, z=-2.0)


class TestHOfSigma:
    def test_vanishes_at_both_ends(self):
        # branch2 ~ sigma^2 at 0; branch1 ~ sqrt(1 - sigma) at 1 (gamma = 2)
        beta = beta_constant()
        assert h_of_sigma(1e-9, 2.0, 1.0, beta) < 1e-15
        assert h_of_sigma(1.0 - 1e-9, 2.0, 1.0, beta) < 1e-4

    def test_frozen_branches_at_half(self):
        beta = beta_constant()
        b1, b2 = h_branches(0.5, 2.0, 1.0, beta)
        assert abs(b1 - BRANCH1_HALF) < 1e-14
        assert abs(b2 - 0.25) < 1e-14  # (27/64)(beta^2/(5 pi - 1))/4 == 1/4
        assert h_of_sigma(0.5, 2.0, 1.0, beta) == min(b1, b2)

    def test_rejects_sigma_outside(self):
        for sigma in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(DomainError):
                h_of_sigma(sigma, 2.0, 1.0, 5.0)


class TestMaximizeH:
    def test_crossing_condition(self):
        sigma, h_max = maximize_h(2.0, 1.0, beta_constant())
        b1, b2 = h_branches(sigma, 2.0, 1.0, beta_constant())
        assert abs(b1 - b2) <= 1e-9 * h_max

    def test_dominates_grid(self):
        args = (1.7, 0.8, 2.0 * beta_constant())
        _, h_max = maximize_h(*args)
        for sigma in np.arange(0.01, 1.0, 0.01):
            assert h_max >= h_of_sigma(sigma, *args) - 1e-12

    @pytest.mark.parametrize("gamma,epsilon", [(2.0, 0.5), (1.5, 1.0),
                                               (2.5, 0.25)])
    def test_threshold_is_one_on_proof_path(self, gamma, epsilon):
        # with the theorem couplings the maximizer is 1/(1+eps) and the
        # threshold is exactly the unit charge
        params = derive_parameters(gamma, epsilon)
        a = a_from_a_tilde(a_tilde_squared(params), params)
        sigma, h_max = maximize_h(gamma, a, b_tilde_squared(epsilon))
        assert abs(sigma - 1.0 / (1.0 + epsilon)) < 1e-9
        assert abs(h_max - 1.0) < 1e-9
