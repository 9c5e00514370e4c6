# Copyright (c) 2025, dynamatch contributors
# See license.txt

import json
import tempfile
from pathlib import Path

import click
from click.testing import CliRunner

from dynamatch import __version__
from dynamatch.commands import VERDICT_FAILED, cli, parse_and_dispatch, parse_values
from dynamatch.tests import IntegrationTestCase, UnitTestCase, slow

SMALL_MARKET = ["--m", "200", "--d", "5"]


class UnitTestParseValues(UnitTestCase):
	def test_range_includes_stop(self):
		self.assertEqual(parse_values("2:10:1"), tuple(float(d) for d in range(2, 11)))
		self.assertEqual(parse_values("0.1:0.3:0.1"), (0.1, 0.2, 0.3))

	def test_comma_list(self):
		self.assertEqual(parse_values("10, 20,40"), (10.0, 20.0, 40.0))

	def test_rejects_malformed(self):
		for text in ("1:2", "5:1:1", "1:2:0", "a,b", ""):
			with self.assertRaises(click.BadParameter):
				parse_values(text)


class IntegrationTestCommands(IntegrationTestCase):
	def setUp(self):
		self.runner = CliRunner()
		self._tmp = tempfile.TemporaryDirectory()
		self.out = Path(self._tmp.name)

	def tearDown(self):
		self._tmp.cleanup()

	def invoke(self, *args, out: Path | None = None):
		return self.runner.invoke(cli, ["--output-dir", str(out or self.out), *args])

	def manifest(self, out: Path | None = None) -> dict:
		return json.loads(((out or self.out) / "manifest.json").read_text())

	def test_stationary_writes_solution_and_manifest(self):
		result = self.invoke("stationary", "--policy", "greedy", "--p", "2", "--lambda", "0.2", "--m", "8000", "--d", "10")
		self.assertEqual(result.exit_code, 0, msg=result.output)

		solution = json.loads((self.out / "stationary.json").read_text())
		self.assertLess(solution["residual"], 1e-10)
		self.assertEqual(len(solution["sizes"]), 3)
		self.assertTrue((self.out / "stationary.csv").exists())

		manifest = self.manifest()
		self.assertEqual(manifest["command"], "stationary")
		self.assertEqual(manifest["version"], __version__)
		self.assertEqual(manifest["options"]["params"]["lambda"], 0.2)
		self.assertEqual(manifest["options"]["params"]["alpha"], 10 / 8000)
		self.assertEqual(manifest["verdicts"], {"converged": True})
		self.assertEqual(manifest["artifacts"], ["stationary.csv", "stationary.json"])

	def test_format_selects_artifacts(self):
		result = self.invoke("--format", "json", "stationary", "--policy", "patient")
		self.assertEqual(result.exit_code, 0, msg=result.output)
		self.assertTrue((self.out / "stationary.json").exists())
		self.assertFalse((self.out / "stationary.csv").exists())

	def test_density_and_alpha_are_exclusive(self):
		result = self.invoke("stationary", "--d", "10", "--alpha", "0.001")
		self.assertEqual(result.exit_code, 2)
		self.assertIn("mutually exclusive", result.output)

	def test_invalid_market_is_a_one_line_diagnostic(self):
		result = self.invoke("stationary", "--p", "2", "--lambda", "0.6")
		self.assertEqual(result.exit_code, 1)
		errors = [line for line in result.output.splitlines() if line.startswith("Error:")]
		self.assertEqual(len(errors), 1)
		self.assertIn("lambda < 1/p", errors[0])

	def test_plateau_assertion_needs_patient(self):
		result = self.invoke("scaling", "--policy", "greedy", "--assert-plateau")
		self.assertEqual(result.exit_code, 2)
		self.assertIn("patient", result.output)

	def test_failed_verdict_sets_exit_status(self):
		result = self.invoke("phase", "--hard-factor", "1000")
		self.assertEqual(result.exit_code, VERDICT_FAILED, msg=result.output)
		self.assertFalse(self.manifest()["verdicts"]["hard_jump"])
		self.assertTrue((self.out / "phase.json").exists())

	def test_phase_reports_ratio_against_target(self):
		result = self.invoke("phase")
		self.assertIn(result.exit_code, (0, VERDICT_FAILED), msg=result.output)
		self.assertIn("(target 5)", result.output)
		witness = json.loads((self.out / "phase.json").read_text())
		self.assertEqual(witness["hard_factor"], 5.0)
		self.assertEqual(self.manifest()["options"]["hard_factor"], 5.0)
		self.assertEqual(self.manifest()["verdicts"]["hard_jump"], witness["hard_ratio"] >= 5.0)
		self.assertEqual(result.exit_code == 0, witness["passed"])

	def test_waits_band_is_a_verdict(self):
		args = ("waits", "--policy", "patient", "--lambda", "0.3")
		self.assertEqual(self.invoke(*args).exit_code, 0)
		self.assertEqual(self.manifest()["verdicts"], {"plateau": True, "a0_band": True})

		result = self.invoke(*args, "--band", "0.95", "1.5")
		self.assertEqual(result.exit_code, VERDICT_FAILED, msg=result.output)
		self.assertFalse(self.manifest()["verdicts"]["a0_band"])
		self.assertFalse(json.loads((self.out / "waits.json").read_text())["in_band"])

	def test_greedy_waits_have_no_band_verdict(self):
		result = self.invoke("waits", "--policy", "greedy", "--m", "1000000")
		self.assertEqual(result.exit_code, 0, msg=result.output)
		self.assertEqual(self.manifest()["verdicts"], {"plateau": True})

	def test_ratio_curve_passes(self):
		result = self.invoke("ratio", "--values", "2:10:2")
		self.assertEqual(result.exit_code, 0, msg=result.output)
		curve = json.loads((self.out / "ratio.json").read_text())
		self.assertTrue(curve["monotone_decreasing"])
		self.assertEqual(curve["d"], [2.0, 4.0, 6.0, 8.0, 10.0])

	def test_ode_writes_trajectory(self):
		result = self.invoke("ode", *SMALL_MARKET, "--policy", "greedy", "--t-end", "5", "--samples", "11")
		self.assertEqual(result.exit_code, 0, msg=result.output)
		lines = (self.out / "trajectory.csv").read_text().splitlines()
		self.assertEqual(lines[0], "t,size_0,size_1,size_2")
		self.assertEqual(len(lines), 1 + 11)
		summary = json.loads((self.out / "ode.json").read_text())
		self.assertEqual(summary["clip_events"], [])
		self.assertEqual(len(summary["window_loss"]["per_type"]), 3)

	def test_simulate_is_reproducible(self):
		args = ("simulate", *SMALL_MARKET, "--policy", "patient", "--events", "2000", "--trace")
		first = self.invoke("--seed", "7", *args)
		self.assertEqual(first.exit_code, 0, msg=first.output)
		metrics = (self.out / "metrics.json").read_bytes()
		trace = (self.out / "trace.csv").read_bytes()

		second = self.invoke("--seed", "7", *args)
		self.assertEqual(second.exit_code, 0, msg=second.output)
		self.assertEqual((self.out / "metrics.json").read_bytes(), metrics)
		self.assertEqual((self.out / "trace.csv").read_bytes(), trace)
		self.assertEqual(self.manifest()["seed"], 7)
		self.assertEqual(self.manifest()["options"]["stop"], {"kind": "events", "bound": 2000.0})

	def test_sweep_outputs_are_byte_identical(self):
		args = ("sweep", *SMALL_MARKET, "--axis", "d", "--values", "4:6:2", "--reps", "2", "--events", "1000")
		with tempfile.TemporaryDirectory() as other:
			other = Path(other)
			self.assertEqual(self.invoke("--seed", "1", *args).exit_code, 0)
			self.assertEqual(self.invoke("--seed", "1", *args, out=other).exit_code, 0)
			for name in ("sweep.csv", "sweep.json"):
				self.assertEqual((self.out / name).read_bytes(), (other / name).read_bytes())
			self.assertEqual(len((other / "sweep.csv").read_text().splitlines()), 1 + 2 * 2 * 2)

	def test_seed_after_the_subcommand(self):
		argv = ["--output-dir", str(self.out), "simulate", "--p", "2", "--lambda", "0.2", "--m", "8000", "--d", "10"]
		argv += ["--policy", "patient", "--events", "20000", "--seed", "7"]
		self.assertEqual(parse_and_dispatch(argv), 0)
		self.assertEqual(self.manifest()["seed"], 7)
		self.assertTrue((self.out / "metrics.json").exists())

	def test_subcommand_seed_overrides_group_seed(self):
		args = ("sweep", *SMALL_MARKET, "--axis", "d", "--values", "4:6:2", "--reps", "2", "--events", "1000")
		with tempfile.TemporaryDirectory() as other:
			other = Path(other)
			self.assertEqual(self.invoke("--seed", "1", *args).exit_code, 0)
			result = self.invoke("--seed", "5", *args, "--seed", "1", out=other)
			self.assertEqual(result.exit_code, 0, msg=result.output)
			self.assertEqual(self.manifest(other)["seed"], 1)
			self.assertEqual((self.out / "sweep.csv").read_bytes(), (other / "sweep.csv").read_bytes())

	@slow
	def test_full_sweep_with_trailing_seed_is_byte_identical(self):
		argv = ["sweep", "--axis", "d", "--values", "2:10:1", "--engines", "discrete,ode", "--reps", "20", "--seed", "1"]
		with tempfile.TemporaryDirectory() as other:
			self.assertEqual(parse_and_dispatch(["--output-dir", str(self.out), *argv]), 0)
			self.assertEqual(parse_and_dispatch(["--output-dir", other, *argv]), 0)
			for name in ("sweep.csv", "sweep.json"):
				self.assertEqual((self.out / name).read_bytes(), (Path(other) / name).read_bytes())

	def test_parse_and_dispatch_statuses(self):
		self.assertEqual(parse_and_dispatch(["--version"]), 0)
		self.assertEqual(parse_and_dispatch(["--output-dir", str(self.out), "stationary", "--no-such-flag"]), 2)
		self.assertEqual(
			parse_and_dispatch(["--output-dir", str(self.out), "stationary", "--policy", "greedy"]),
			0,
		)
		self.assertTrue((self.out / "manifest.json").exists())
