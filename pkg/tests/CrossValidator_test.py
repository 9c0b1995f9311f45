# tests/CrossValidator_test.py

import json
import tempfile
import unittest

from src.CrossValidator import MAX_ODE_RUNS, CrossValidator
from src.GasBasics import ExitCode, XValStatus
from src.ReportExporter import ReportExporter
from src.Scenario import preset_scenario


class TestCrossValidator(unittest.TestCase):
    def linear_compression(self):
        scenario = preset_scenario("linear-compression")
        scenario.refine = [256, 512]
        return scenario

    def test_linear_compression_is_consistent(self):
        xval = CrossValidator(self.linear_compression())
        self.assertEqual(xval.run(), XValStatus.consistent)
        self.assertEqual(xval.exit_code, ExitCode.smooth)
        self.assertAlmostEqual(xval.verdict.predicted_T, 1.0, delta=1e-3)
        self.assertEqual([cells for cells, _ in xval.pde_runs], [256, 512])
        ts = xval.pde_runs[-1][1].t_steepen
        self.assertAlmostEqual(ts, 0.9, delta=0.05)
        self.assertEqual([s.status for s in xval.stages], ["ok", "ok", "ok"])
        self.assertTrue(xval.pde_summary()["t_steepen_decreasing"])
        self.assertLessEqual(len(xval.ode_runs), MAX_ODE_RUNS)
        self.assertTrue(all(run["outcome"] != "Bounded" for run in xval.ode_runs))

    def test_wrong_prediction_is_discrepant(self):
        xval = CrossValidator(self.linear_compression(), predicted_T=0.1)
        self.assertEqual(xval.run(), XValStatus.discrepant)
        self.assertEqual(xval.exit_code, ExitCode.blowup)
        self.assertIn("points", xval.details)
        self.assertIn("steepened", xval.details["pde"])

    def test_remark1_smooth_is_consistent(self):
        xval = CrossValidator(preset_scenario("remark1-pulse"))
        self.assertEqual(xval.run(), XValStatus.consistent)
        self.assertTrue(xval.verdict.smooth)
        self.assertGreater(xval.ode_bound, 10.0)
        self.assertEqual(xval.pde_runs[-1][0], 1024)
        finest = xval.pde_runs[-1][1]
        self.assertTrue(finest.completed)
        self.assertLessEqual(finest.max_gradient, 1.5 * xval.ode_bound)
        self.assertEqual(xval.pde_summary()["statement"], "bounded gradients")
        self.assertEqual(xval.report()["xval"]["details"]["pde"], "bounded")

    def test_chaplygin_is_partial(self):
        xval = CrossValidator(preset_scenario("chaplygin-demo"))
        self.assertEqual(xval.run(), XValStatus.partial)
        self.assertEqual(xval.exit_code, ExitCode.error)
        self.assertEqual([s.status for s in xval.stages], ["ok", "ok", "skipped"])
        self.assertIsNotNone(xval.verdict.predicted_T)
        self.assertTrue(all(run["kind"] == "chaplygin" for run in xval.ode_runs))
        self.assertEqual(xval.pde_summary(), {})

    def test_failed_stage_skips_the_rest(self):
        scenario = preset_scenario("constant")
        scenario.profile = scenario.profile.with_velocity("ln(x)")
        xval = CrossValidator(scenario)
        self.assertEqual(xval.run(), XValStatus.partial)
        self.assertEqual([s.status for s in xval.stages], ["failed", "skipped", "skipped"])
        self.assertTrue(xval.stages[0].error.startswith("evaluation error:"))
        self.assertIsNone(xval.verdict)

    def test_report_and_log(self):
        xval = CrossValidator(preset_scenario("chaplygin-demo"))
        xval.run()
        with tempfile.TemporaryDirectory() as tmp:
            paths = xval.write(ReportExporter(tmp))
            self.assertEqual([p.name for p in paths], ["report.json", "log.md"])
            with open(paths[0]) as handle:
                report = json.load(handle)
            self.assertEqual(report["command"], "xval")
            self.assertEqual(report["xval"]["status"], "Partial")
            self.assertEqual(report["scenario"]["name"], "chaplygin-demo")
            self.assertEqual(len(report["stages"]), 3)
            self.assertNotIn("started", json.dumps(report))
            log = paths[1].read_text()
        self.assertIn("# Cross-validation: chaplygin-demo", log)
        self.assertIn("## Stage Chain", log)
        self.assertIn("### Witnesses", log)
        self.assertIn("__Partial__", log)
        with tempfile.TemporaryDirectory() as tmp:
            self.assertEqual(len(xval.write(ReportExporter(tmp), "only.json", log=None)), 1)


if __name__ == '__main__':
    unittest.main()
