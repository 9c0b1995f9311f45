# tests/Profile_test.py

import unittest

import numpy as np

from src.GasBasics import DomainError, EvaluationError
from src.GasState import GasParams
from src.Profile import (
    PROFILE_PRESETS,
    Profile,
    constant_profile,
    preset_profile,
    remark1_bounded_profile,
    remark1_profile,
    sample_arrays,
    sample_point,
    sample_profile,
)


class TestProfile(unittest.TestCase):
    def test_domain(self):
        with self.assertRaises(DomainError):
            Profile.from_text("0", "1", "1", (1.0, 1.0))
        pr = Profile.from_text("0", "1", "1", (-2.0, 3.0))
        self.assertEqual(pr.length, 5.0)
        self.assertEqual(len(pr.uniform_grid(11)), 11)

    def test_sample_point(self):
        pr = Profile.from_text("-x", "1 + x^2", "exp(x)", (-1.0, 1.0))
        pd = sample_point(pr, 0.5)
        self.assertAlmostEqual(pd.v0, -0.5)
        self.assertAlmostEqual(pd.dv0, -1.0)
        self.assertAlmostEqual(pd.rho0, 1.25)
        self.assertAlmostEqual(pd.drho0, 1.0)
        self.assertAlmostEqual(pd.dp0, np.exp(0.5))

    def test_grid_outside_window(self):
        pr = constant_profile()
        with self.assertRaises(DomainError):
            sample_profile(pr, [0.0, 2.0])
        with self.assertRaises(DomainError):
            sample_profile(pr, [0.5, 0.0])

    def test_first_offending_x(self):
        pr = Profile.from_text("0", "x", "1", (-1.0, 1.0))
        with self.assertRaises(DomainError) as ctx:
            sample_profile(pr, np.linspace(-1.0, 1.0, 5))
        self.assertEqual(ctx.exception.field, "rho0")
        self.assertEqual(ctx.exception.x, -1.0)
        pr = Profile.from_text("0", "1", "x - 0.2", (-1.0, 1.0))
        with self.assertRaises(DomainError) as ctx:
            sample_profile(pr, [0.0, 0.5])
        self.assertEqual(ctx.exception.field, "p0")
        self.assertEqual(ctx.exception.x, 0.0)

    def test_evaluation_fault(self):
        pr = Profile.from_text("ln(x)", "1", "1", (-1.0, 1.0))
        with self.assertRaises(EvaluationError):
            sample_profile(pr, [-0.5, 0.5])

    def test_chaplygin_sign(self):
        pr = Profile.from_text("0", "2", "1", (-1.0, 1.0)).isentropic(GasParams(-1.0))
        sample = sample_arrays(pr, [0.0], GasParams(-1.0))
        self.assertAlmostEqual(sample.p0[0], -0.5)
        with self.assertRaises(DomainError):
            sample_arrays(pr, [0.0], GasParams(1.4))

    def test_isentropic_pressure(self):
        gp = GasParams(1.4)
        pr = Profile.from_text("0", "1 + 0.5*x^2", "7", (-1.0, 1.0)).isentropic(gp)
        pd = sample_point(pr, 1.0)
        self.assertAlmostEqual(pd.p0, 1.5 ** 1.4 / 1.4)
        self.assertAlmostEqual(pd.dp0, 1.5 ** 0.4 * 1.0)


class TestPresets(unittest.TestCase):
    def test_remark1_b_is_one(self):
        for gamma in (1.2, 1.4, 2.0, 3.0):
            for pr in (remark1_profile(gamma), remark1_bounded_profile(gamma)):
                s = sample_arrays(pr, pr.uniform_grid(41))
                K = gamma * s.p0 * s.drho0 / (2.0 * s.rho0 * s.dp0) - 0.5
                b = K - (gamma - 1.0) / 2.0
                np.testing.assert_allclose(b, 1.0, atol=1e-12)

    def test_every_preset_samples(self):
        for name in PROFILE_PRESETS:
            gamma = -1.0 if name == "chaplygin-demo" else 1.4
            pr = preset_profile(name, gamma)
            self.assertEqual(pr.name, name)
            s = sample_arrays(pr, pr.uniform_grid(21), GasParams(gamma))
            self.assertEqual(len(s), 21)
        self.assertIsNone(preset_profile("no-such-profile", 1.4))

    def test_with_velocity(self):
        pr = remark1_profile(1.4).with_velocity("0")
        self.assertEqual(sample_point(pr, 0.3).dv0, 0.0)
        self.assertEqual(pr.asDict()["v0"], "0.0")


if __name__ == '__main__':
    unittest.main()
