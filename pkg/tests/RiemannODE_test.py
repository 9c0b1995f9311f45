# tests/RiemannODE_test.py

import math
import unittest
from unittest import mock

import numpy as np

from src import RiemannODE
from src.Criterion import Indicators, classify_point
from src.GasBasics import DomainError, Outcome, tightODE
from src.GasState import GasParams
from src.RiemannODE import (
    blowup_time_estimate,
    chaplygin_solve,
    circle_seeds,
    grid_seeds,
    integrate,
    integrate_P,
    integrate_ray,
    phase_portrait,
    quadrature_blowup_time,
    separatrix_seed,
)
from src.RiemannSlopes import FirstIntegral, PVector, RayState, RState


def p_with_K(R1: float, R2: float, K: float) -> PVector:
    return PVector(R1 - R2, -2.0 * K * R2, R1 + R2)


class TestRiccati(unittest.TestCase):
    def test_exact_blowup_time(self):
        for r in (-10.0, -2.0, -1.0, -0.1):
            traj = integrate(RState(r, 0.0, 0.0, 1.4), t_max=20.0)
            self.assertEqual(traj.outcome, Outcome.escaped)
            self.assertTrue(traj.riccati)
            self.assertAlmostEqual(traj.T, 1.0 / abs(r), delta=1e-6)
            self.assertLessEqual(traj.bracket[0], traj.T)

    def test_exact_along_the_trajectory(self):
        for r in (-3.0, -0.5, 0.25, 2.0):
            t_max = 0.9 / abs(r) if r < 0.0 else 5.0
            traj = integrate(RState(r, 0.0, 0.0, 1.4), t_max=t_max, ode=tightODE)
            self.assertEqual(traj.outcome, Outcome.bounded)
            exact = r / (1.0 + r * traj.times)
            np.testing.assert_array_less(np.abs(traj.R1 - exact), 1e-9 * np.maximum(1.0, np.abs(exact)))
            self.assertTrue(np.all(traj.R2 == 0.0))

    def test_positive_r1_decays(self):
        traj = integrate(RState(1.0, 0.0, 0.0, 1.4), t_max=5.0)
        self.assertEqual(traj.outcome, Outcome.bounded)
        self.assertAlmostEqual(traj.final[0], 1.0 / 6.0, places=8)
        self.assertIsNone(traj.T)

    def test_backward_run_blows_up(self):
        traj = integrate(RState(1.0, 0.0, 0.0, 1.4), t_max=5.0, direction=-1)
        self.assertEqual(traj.direction, -1)
        self.assertTrue(traj.escaped())
        self.assertAlmostEqual(traj.T, 1.0, delta=1e-6)

    def test_bad_arguments(self):
        with self.assertRaises(DomainError):
            integrate(RState(1.0, 1.0, 1.0), t_max=0.0)
        with self.assertRaises(DomainError):
            integrate(RState(1.0, 1.0, 1.0), tol=-1e-3)
        with self.assertRaises(DomainError):
            integrate_ray(RayState(0.0, -1.0, 1.0, PVector()), GasParams(1.4))

    def test_estimate_needs_escape(self):
        traj = integrate(RState(1.0, 0.0, 0.0, 1.4), t_max=1.0)
        with self.assertRaises(ValueError):
            blowup_time_estimate(traj)


class TestFirstIntegralDrift(unittest.TestCase):
    def test_drift_on_loops(self):
        rng = np.random.default_rng(11)
        for gamma in (1.4, 1.0):
            for _ in range(20):
                R2 = rng.uniform(1.5, 2.0) * rng.choice([-1.0, 1.0])
                R0 = RState(rng.uniform(-2.0, 2.0), R2, rng.uniform(0.5, 2.0), gamma)
                traj = integrate(R0, t_max=10.0, tol=1e-11)
                self.assertEqual(traj.outcome, Outcome.bounded, repr(R0))
                self.assertLessEqual(traj.c_drift, 1e-8, repr(R0))
                self.assertTrue(np.all(np.sign(traj.R2) == np.sign(R2)), repr(R0))

    def test_r2_keeps_its_sign(self):
        for R0 in (RState(-1.0, -0.5, -1.0, 1.4), RState(0.5, 1.0, -1.0, 3.0), RState(-0.2, -1.0, 2.0, 1.0)):
            traj = integrate(R0, t_max=20.0)
            self.assertTrue(np.all(np.sign(traj.R2) == np.sign(R0.R2)), repr(R0))

    def test_printed_coefficient_drifts(self):
        R0 = RState(0.7, 1.3, 1.0, 1.4)
        traj = integrate(R0, t_max=5.0)
        printed = FirstIntegral(R0.b * R0.gamma, R0.gamma).values(traj.R1, traj.R2)
        drift = np.max(np.abs(printed - printed[0])) / abs(printed[0])
        self.assertGreater(drift, 1e-2)
        self.assertLess(traj.c_drift, 1e-7)

    def test_riccati_branch_has_no_drift(self):
        traj = integrate(RState(0.5, 0.0, 1.0, 1.4), t_max=2.0)
        self.assertEqual(traj.c_drift, 0.0)
        self.assertIsNone(traj.rows()[0]["C"])


def random_state(rng: np.random.Generator) -> RState:
    gamma = float(rng.choice([1.0, 1.4, 3.0]))
    R1 = rng.uniform(-2.0, 2.0)
    R2 = 0.0 if rng.uniform() < 0.15 else rng.uniform(0.1, 2.0) * rng.choice([-1.0, 1.0])
    if rng.uniform() < 0.25:
        # near the b = 0 boundary; at gamma = 1 only from above
        sign = 1.0 if gamma == 1.0 else rng.choice([-1.0, 1.0])
        b = sign * 10.0 ** rng.uniform(-9.0, -3.0)
    else:
        b = rng.uniform(0.1, 2.0) * rng.choice([-1.0, 1.0])
    if gamma == 1.0 and b < 0.0 and R2 != 0.0 and R1 > 0.0:
        # isothermal turning point |R2| exp(-R1^2 / (2|b| R2^2)) kept within three e-folds
        R1 = min(R1, math.sqrt(6.0 * abs(b)) * abs(R2))
    return RState(R1, R2, b, gamma)


class TestCriterionAgainstDynamics(unittest.TestCase):
    def test_random_states(self):
        rng = np.random.default_rng(1234)
        for _ in range(200):
            R0 = random_state(rng)
            safe = classify_point(Indicators.with_b(R0.R1, R0.R2, R0.b, R0.gamma)).safe
            if safe:
                traj = integrate(R0, t_max=100.0)
                self.assertEqual(traj.outcome, Outcome.bounded, repr(R0))
                self.assertIsNone(traj.T, repr(R0))
            else:
                T = quadrature_blowup_time(R0)
                self.assertIsNotNone(T, repr(R0))
                self.assertTrue(math.isfinite(T), repr(R0))
                traj = integrate(R0, t_max=max(100.0, 1.5 * T + 1.0))
                self.assertTrue(traj.escaped(), repr(R0))

    def test_loop_peaking_above_the_threshold(self):
        R0 = RState(-0.788, -0.886, 1e-9, 1.4)
        self.assertTrue(classify_point(Indicators.with_b(R0.R1, R0.R2, R0.b, R0.gamma)).safe)
        self.assertGreater(FirstIntegral.of(R0).loop_peak(R0), 1e8)
        traj = integrate(R0, t_max=100.0)
        self.assertEqual(traj.outcome, Outcome.bounded)
        self.assertTrue(traj.threshold_exceeded)
        self.assertTrue(traj.low_confidence)
        self.assertIsNone(traj.T)
        self.assertTrue(traj.summary()["threshold_exceeded"])

    def test_unsafe_riccati_state_still_escapes(self):
        traj = integrate(RState(-0.788, 0.0, 1e-9, 1.4), t_max=100.0)
        self.assertTrue(traj.escaped())
        self.assertFalse(traj.threshold_exceeded)


class TestSystemsAgree(unittest.TestCase):
    def test_P_and_ray_match_reduced(self):
        rng = np.random.default_rng(77)
        grid = np.linspace(0.0, 1.0, 101)
        for _ in range(100):
            gp = GasParams(float(rng.choice([1.0, 1.4, 3.0])))
            R1 = rng.uniform(-0.3, 1.0)
            R2 = rng.uniform(0.1, 0.6) * rng.choice([-1.0, 1.0])
            b = rng.uniform(-0.5, 1.0)
            P0 = p_with_K(R1, R2, b + 0.5 * (gp.gamma - 1.0))
            foot = RayState(rng.uniform(-1.0, 1.0), 1.0 / rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), P0)
            R0 = RState(R1, R2, b, gp.gamma)

            reduced = integrate(R0, t_max=1.0, ode=tightODE, t_eval=grid)
            full = integrate_P(P0, gp, t_max=1.0, ode=tightODE, t_eval=grid)
            ray = integrate_ray(foot, gp, t_max=1.0, ode=tightODE, t_eval=grid)
            for traj in (reduced, full, ray):
                self.assertEqual(traj.outcome, Outcome.bounded, repr(R0))
                np.testing.assert_array_equal(traj.times, grid)
            for traj in (full, ray):
                sup = max(np.max(np.abs(traj.R1 - reduced.R1)), np.max(np.abs(traj.R2 - reduced.R2)))
                self.assertLessEqual(sup, 1e-7, f"{traj.kind} {R0!r}")
            self.assertLess(full.k_drift, 1e-9, repr(R0))
            np.testing.assert_allclose(ray.slopes, full.slopes, rtol=0.0, atol=1e-7)

    def test_trajectory_rows(self):
        gp = GasParams(1.4)
        traj = integrate_P(p_with_K(0.3, 0.8, 0.7), gp, t_max=0.5)
        row = traj.rows()[0]
        self.assertEqual(list(row), ["t", "R1", "R2", "P1", "P2", "P3", "C"])
        self.assertAlmostEqual(row["R1"], 0.3)
        self.assertEqual(traj.summary()["outcome"], "Bounded")


class TestChaplygin(unittest.TestCase):
    def test_blowup_region(self):
        for i in range(-20, 21):
            for j in range(-20, 21):
                R1, R2 = i / 10.0, j / 10.0
                out = chaplygin_solve(R1, R2)
                self.assertEqual(out.blows_up, R1 < -abs(R2), f"R1={R1}, R2={R2}")

    def test_closed_form_matches_integration(self):
        cases = ((-0.5, 1.0, 0.0), (0.5, -2.0, -0.5), (-2.0, 1.0, 0.0), (1.0, 1.0, -2.0), (-1.0, 0.0, 0.0), (0.7, 0.0, 3.0))
        for R1, R2, K0 in cases:
            out = chaplygin_solve(R1, R2, K0)
            t_max = 0.9 * out.T if out.blows_up else 3.0
            traj = integrate(RState(R1, R2, out.b, -1.0), t_max=t_max, ode=tightODE)
            self.assertEqual(traj.outcome, Outcome.bounded)
            exact = np.array([out.r1(t) for t in traj.times])
            np.testing.assert_array_less(np.abs(traj.R1 - exact), 1e-9 * np.maximum(1.0, np.abs(exact)))
            self.assertTrue(np.all(traj.R2 == R2))

        for R1, R2, K0 in ((-2.0, 1.0, 0.0), (1.0, 1.0, -2.0), (-1.0, 0.0, 0.0)):
            out = chaplygin_solve(R1, R2, K0)
            traj = integrate(RState(R1, R2, out.b, -1.0), t_max=10.0)
            self.assertTrue(traj.escaped())
            self.assertAlmostEqual(traj.T, out.T, delta=1e-6)
        self.assertAlmostEqual(chaplygin_solve(-2.0, 1.0).T, math.atanh(0.5))
        self.assertAlmostEqual(chaplygin_solve(1.0, 1.0, -2.0).T, 0.75 * math.pi)

    def test_quadrature_routes_to_closed_form(self):
        self.assertEqual(quadrature_blowup_time(RState(-2.0, 1.0, 1.0, -1.0)), chaplygin_solve(-2.0, 1.0).T)


class TestBlowupTimes(unittest.TestCase):
    def test_quadrature_matches_tail_fit(self):
        cases = [
            RState(-1.0, 0.5, -0.5, 1.4),
            RState(0.5, 1.0, -1.0, 1.4),
            RState(-1.0, 1.0, -0.5, 1.0),
            RState(-0.5, 1.0, -1.0, 3.0),
        ]
        for R0 in cases:
            T = quadrature_blowup_time(R0)
            traj = integrate(R0, t_max=2.0 * T + 1.0)
            self.assertTrue(traj.escaped(), repr(R0))
            self.assertAlmostEqual(traj.T, T, delta=1e-4 * max(T, 1.0), msg=repr(R0))
            self.assertLessEqual(traj.bracket[0], traj.T)
            self.assertGreaterEqual(traj.bracket[1], traj.T)

    def test_small_step_run_agrees(self):
        R0 = RState(-1.0, 1.0, -1.0, 1.4)
        k = 0.5 * (R0.gamma + 1.0)

        def field(r1, r2):
            return -r1 * r1 + R0.b * r2 * r2, -k * r1 * r2

        # classical RK4 at a fixed step until the escape threshold
        dt, t, r1, r2 = 1e-5, 0.0, R0.R1, R0.R2
        while math.isfinite(math.hypot(r1, r2)) and math.hypot(r1, r2) < 1e8:
            a1, a2 = field(r1, r2)
            b1, b2 = field(r1 + 0.5 * dt * a1, r2 + 0.5 * dt * a2)
            c1, c2 = field(r1 + 0.5 * dt * b1, r2 + 0.5 * dt * b2)
            d1, d2 = field(r1 + dt * c1, r2 + dt * c2)
            r1 += dt * (a1 + 2.0 * b1 + 2.0 * c1 + d1) / 6.0
            r2 += dt * (a2 + 2.0 * b2 + 2.0 * c2 + d2) / 6.0
            t += dt

        T = quadrature_blowup_time(R0)
        self.assertAlmostEqual(T, 0.62090414323, delta=1e-9)
        traj = integrate(R0, t_max=2.0)
        self.assertTrue(traj.escaped())
        self.assertAlmostEqual(t, traj.T, delta=1e-3)
        self.assertAlmostEqual(t, T, delta=1e-3)

    def test_quadrature_for_safe_states(self):
        self.assertIsNone(quadrature_blowup_time(RState(1.0, 0.1, -1.0, 1.4)))
        self.assertIsNone(quadrature_blowup_time(RState(-1.0, 1.0, 1.0, 1.4)))
        self.assertIsNone(quadrature_blowup_time(RState(1.0, 0.0, 1.0, 1.4)))
        self.assertEqual(quadrature_blowup_time(RState(-2.0, 0.0, 1.0, 1.4)), 0.5)
        with self.assertRaises(DomainError):
            quadrature_blowup_time(RState(-1.0, 1.0, -1.0, 0.5))


class TestPortrait(unittest.TestCase):
    def test_loops_for_positive_b(self):
        curves = phase_portrait(1.0, GasParams(1.4), circle_seeds(12), t_max=20.0)
        self.assertEqual(len(curves), 12)
        for curve in curves:
            self.assertIsNone(curve.error)
            self.assertEqual(curve.outcome, Outcome.bounded)
            self.assertTrue(curve.loop, repr(curve))
            self.assertGreater(len(curve.polyline()), len(curve.forward.times))

    def test_separatrix_and_riccati_seeds(self):
        gp = GasParams(1.4)
        seed = separatrix_seed(-1.0, 1.4)
        self.assertAlmostEqual(seed[0], math.sqrt(5.0))
        curves = phase_portrait(-1.0, gp, [seed, (-1.0, 0.0)], t_max=20.0)
        self.assertEqual(curves[0].outcome, Outcome.bounded)
        self.assertFalse(curves[0].loop)
        self.assertEqual(curves[1].outcome, Outcome.escaped)
        self.assertIsNone(curves[1].backward)
        self.assertIsNone(curves[1].asDict()["C"])

    def test_failing_seed_is_isolated(self):
        real = RiemannODE.integrate

        def flaky(R0, *args, **kwargs):
            if R0.R1 == 99.0:
                raise DomainError("seed rejected", field="state")
            return real(R0, *args, **kwargs)

        with mock.patch.object(RiemannODE, "integrate", side_effect=flaky):
            curves = phase_portrait(1.0, GasParams(1.4), [(0.0, 1.0), (99.0, 1.0), (0.5, -1.0)], t_max=5.0)
        self.assertEqual(len(curves), 3)
        self.assertIn("seed rejected", curves[1].error)
        self.assertIsNone(curves[1].outcome)
        self.assertIsNone(curves[0].error)
        self.assertIsNone(curves[2].error)

    def test_grid_seeds(self):
        seeds = grid_seeds((-1.0, 1.0), (0.5, 1.5), 3, 2)
        self.assertEqual(len(seeds), 6)
        self.assertEqual(seeds[0], (-1.0, 0.5))
        self.assertEqual(seeds[-1], (1.0, 1.5))


if __name__ == '__main__':
    unittest.main()
