# tests/GasState_test.py

import math
import unittest

from src.GasBasics import (
    BoundaryMode,
    Outcome,
    DomainError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
    ArityError,
    EvaluationError,
    ScenarioError,
    SimulationBreakdown,
    ODEAdjustment,
)
from src.GasState import GasParams, PrimitiveState, sound_speed, char_speeds, entropy, isentropic_pressure


class TestBasics(unittest.TestCase):
    def test_named_lookup(self):
        self.assertEqual(BoundaryMode.named("linear"), BoundaryMode.linear)
        self.assertIsNone(BoundaryMode.named("reflect"))
        self.assertEqual(Outcome.named("BlowUpEstimated"), Outcome.blowup)
        self.assertEqual(Outcome.named("escaped"), Outcome.escaped)
        self.assertIsNone(Outcome.named("Diverged"))

    def test_error_prefixes_are_distinct(self):
        errors = [
            DomainError("m"),
            ExpressionSyntaxError("m"),
            UnknownIdentifierError("m"),
            ArityError("m"),
            EvaluationError("m"),
            ScenarioError("m"),
            SimulationBreakdown("m"),
        ]
        prefixes = [str(e)[: -len("m")] for e in errors]
        self.assertEqual(len(set(prefixes)), len(prefixes))
        for e in errors:
            self.assertEqual(e.detail, "m")

    def test_with_tol(self):
        ode = ODEAdjustment(t_max=5.0).with_tol(1e-8)
        self.assertEqual(ode.rtol, 1e-8)
        self.assertAlmostEqual(ode.atol, 1e-10)
        self.assertEqual(ode.t_max, 5.0)


class TestGasState(unittest.TestCase):
    def test_gamma_validation(self):
        with self.assertRaises(DomainError):
            GasParams(0.0)
        with self.assertRaises(DomainError):
            GasParams(math.inf)
        self.assertTrue(GasParams(1.0).isothermal)
        self.assertTrue(GasParams(-1.0).chaplygin)

    def test_positivity(self):
        gp = GasParams(1.4)
        with self.assertRaises(DomainError) as ctx:
            PrimitiveState(0.0, -1.0, 1.0).check(gp)
        self.assertEqual(ctx.exception.field, "rho")
        with self.assertRaises(DomainError) as ctx:
            PrimitiveState(0.0, 1.0, 0.0).check(gp)
        self.assertEqual(ctx.exception.field, "p")

    def test_chaplygin_pressure_sign(self):
        gp = GasParams(-1.0)
        state = PrimitiveState(0.0, 2.0, -0.5)
        state.check(gp)
        self.assertAlmostEqual(sound_speed(state, gp), 0.5)
        with self.assertRaises(DomainError):
            PrimitiveState(0.0, 2.0, 0.5).check(gp)

    def test_speeds(self):
        gp = GasParams(1.4)
        state = PrimitiveState(0.3, 1.0, 1.0 / 1.4)
        self.assertAlmostEqual(sound_speed(state, gp), 1.0)
        xi = char_speeds(state, gp)
        self.assertAlmostEqual(xi.xi1, -0.7)
        self.assertAlmostEqual(xi.xi2, 0.3)
        self.assertAlmostEqual(xi.xi3, 1.3)

    def test_u_form(self):
        state = PrimitiveState(1.0, 4.0, 2.0)
        self.assertEqual(state.as_u(), (1.0, 0.25, 2.0))
        back = PrimitiveState.from_u(*state.as_u())
        self.assertAlmostEqual(back.rho, 4.0)

    def test_isentropic_state_has_zero_entropy(self):
        gp = GasParams(1.4)
        for rho in (0.5, 1.0, 3.0):
            state = PrimitiveState(0.0, rho, isentropic_pressure(rho, gp))
            self.assertAlmostEqual(entropy(state, gp), 0.0, places=12)


if __name__ == '__main__':
    unittest.main()
