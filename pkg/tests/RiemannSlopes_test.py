# tests/RiemannSlopes_test.py

import math
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from src.Criterion import point_indicators
from src.GasBasics import DomainError
from src.GasState import GasParams, PrimitiveState
from src.Profile import remark1_profile, sample_point
from src.RiemannSlopes import (
    INFINITE,
    FirstIntegral,
    PVector,
    RayState,
    RState,
    first_integral,
    reduce_to_R,
    rhs_augmented_ray,
    rhs_P,
    rhs_R,
    riemann_slopes,
)

finite = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


def p_with_K(R1: float, R2: float, K: float) -> PVector:
    return PVector(R1 - R2, -2.0 * K * R2, R1 + R2)


class TestSlopes(unittest.TestCase):
    def test_slopes_match_indicators(self):
        gp = GasParams(1.4)
        pd = sample_point(remark1_profile(1.4, "-x*exp(-x^2)"), 0.4)
        P = riemann_slopes(pd.state, pd.slopes, gp)
        R1, R2, K = reduce_to_R(P)
        ind = point_indicators(pd, gp)
        self.assertAlmostEqual(R1, ind.R1, places=12)
        self.assertAlmostEqual(R2, ind.R2, places=12)
        self.assertAlmostEqual(K, ind.K, places=12)

    def test_reduce_special_cases(self):
        self.assertEqual(reduce_to_R(PVector(1.0, 2.0, 1.0)), (1.0, 0.0, INFINITE))
        self.assertEqual(reduce_to_R(PVector(1.0, 0.0, 1.0)), (1.0, 0.0, None))
        R1, R2, K = reduce_to_R(PVector(-1.0, 4.0, 3.0))
        self.assertEqual((R1, R2, K), (1.0, 2.0, -1.0))

    def test_invalid_state(self):
        with self.assertRaises(DomainError):
            riemann_slopes(PrimitiveState(0.0, -1.0, 1.0), (0.0, 0.0, 0.0), GasParams(1.4))
        with self.assertRaises(DomainError):
            rhs_augmented_ray(RayState(0.0, -1.0, 1.0, PVector()), GasParams(1.4))

    @given(finite, finite, finite, st.sampled_from([1.0, 1.4, 2.0, 3.0, -1.0]))
    @settings(max_examples=100, deadline=None)
    def test_swap_symmetry(self, P1, P2, P3, gamma):
        gp = GasParams(gamma)
        F = rhs_P(PVector(P1, P2, P3), gp)
        G = rhs_P(PVector(P3, -P2, P1), gp)
        np.testing.assert_allclose(G.as_array(), [F.P3, -F.P2, F.P1], atol=1e-12)

    @given(finite, finite, st.floats(min_value=-2.0, max_value=2.0), st.sampled_from([1.0, 1.4, 2.0, 3.0]))
    @settings(max_examples=100, deadline=None)
    def test_P_system_reduces_to_R_system(self, R1, R2, b, gamma):
        gp = GasParams(gamma)
        K = b + 0.5 * (gamma - 1.0)
        F = rhs_P(p_with_K(R1, R2, K), gp)
        dR1, dR2 = rhs_R(RState(R1, R2, b, gamma))
        self.assertAlmostEqual(0.5 * (F.P1 + F.P3), dR1, places=10)
        self.assertAlmostEqual(0.5 * (F.P3 - F.P1), dR2, places=10)
        # K = P2 / (P1 - P3) is transported unchanged
        dgap = F.P1 - F.P3
        gap = -2.0 * R2
        self.assertAlmostEqual(F.P2 * gap - (-2.0 * K * R2) * dgap, 0.0, places=9)


class TestFirstIntegral(unittest.TestCase):
    def gradient(self, fi: FirstIntegral, R1: float, R2: float, h: float = 1e-6):
        c1 = (fi.value(R1 + h, R2) - fi.value(R1 - h, R2)) / (2.0 * h)
        c2 = (fi.value(R1, R2 + h) - fi.value(R1, R2 - h)) / (2.0 * h)
        return c1, c2

    def test_conserved_along_field(self):
        rng = np.random.default_rng(7)
        for gamma in (1.0, 1.4, 2.0, 3.0):
            for _ in range(20):
                R1, R2, b = rng.uniform(-2.0, 2.0), rng.uniform(0.5, 2.0), rng.uniform(-2.0, 2.0)
                fi = FirstIntegral(b, gamma)
                c1, c2 = self.gradient(fi, R1, R2)
                dR1, dR2 = rhs_R(RState(R1, R2, b, gamma))
                scale = abs(c1 * dR1) + abs(c2 * dR2) + 1.0
                self.assertLess(abs(c1 * dR1 + c2 * dR2) / scale, 1e-6)

    def test_printed_coefficient_is_not_conserved(self):
        R1, R2, b, gamma = 0.7, 1.3, 1.0, 1.4
        printed = FirstIntegral(b * gamma, gamma)  # 2*gamma*b/(gamma-1) in place of 2b/(gamma-1)
        c1, c2 = self.gradient(printed, R1, R2)
        dR1, dR2 = rhs_R(RState(R1, R2, b, gamma))
        self.assertGreater(abs(c1 * dR1 + c2 * dR2), 1e-2)

    def test_undefined_branches(self):
        self.assertIsNone(first_integral(RState(1.0, 0.0, 1.0, 1.4)))
        self.assertIsNone(first_integral(RState(1.0, 1.0, 1.0, -1.0)))
        values = FirstIntegral(1.0, 1.4).values(np.array([1.0, 1.0]), np.array([1.0, 0.0]))
        self.assertTrue(np.isnan(values[1]))
        self.assertAlmostEqual(values[0], 6.0)

    def test_isothermal_form(self):
        self.assertAlmostEqual(first_integral(RState(2.0, 2.0, 0.5, 1.0)), 1.0 + math.log(2.0))

    def test_r1_squared_inverts_value(self):
        for gamma in (1.0, 1.4, 3.0):
            fi = FirstIntegral(-0.7, gamma)
            C = fi.value(0.9, 1.6)
            self.assertAlmostEqual(fi.r1_squared(C, 1.6), 0.81, places=12)

    def test_max_abs_r1_on_loop(self):
        for gamma in (1.0, 1.4, 2.0):
            R = RState(0.0, 1.0, 1.0, gamma)
            fi = FirstIntegral.of(R)
            C = fi.value(R.R1, R.R2)
            ys = np.linspace(1e-4, 3.0, 30001)
            r1sq = np.array([fi.r1_squared(C, y) for y in ys])
            expected = math.sqrt(max(r1sq.max(), 0.0))
            self.assertAlmostEqual(fi.max_abs_r1(R), expected, places=5)
        self.assertEqual(FirstIntegral(-1.0, 1.4).max_abs_r1(RState(-3.0, 1.0, -1.0, 1.4)), 3.0)


if __name__ == '__main__':
    unittest.main()
