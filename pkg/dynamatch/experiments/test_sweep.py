# Copyright (c) 2025, dynamatch contributors
# See license.txt

import pickle
import tempfile
from pathlib import Path
from unittest.mock import patch

from dynamatch import hooks
from dynamatch.exceptions import BracketingError, CellError, ValidationError
from dynamatch.experiments.export import sweep_columns, write_sweep_csv
from dynamatch.experiments.sweep import (
	POLICY_INDEX,
	Axis,
	Engine,
	SweepSpec,
	run_discrete_cell,
	run_sweep,
	validate_sweep,
)
from dynamatch.market.params import MarketParams, Policy
from dynamatch.ode.stationary import stationary_greedy, stationary_patient
from dynamatch.simulation.engine import replicate
from dynamatch.simulation.sim_config import SimConfig, StopRule
from dynamatch.tests import IntegrationTestCase, UnitTestCase

SMALL = MarketParams.from_density(p=2, lam=0.2, m=200, d=5)


def _spec(**overrides):
	values = {
		"base": SMALL,
		"axis": Axis.DENSITY,
		"values": (4.0, 6.0),
		"replications": 2,
		"seed": 3,
		"stop": StopRule.by_events(2000),
		"warm_start": False,
	} | overrides
	return SweepSpec(**values)


def _failing_cell(spec, index, policy):
	raise BracketingError("f and g do not cross", (1.0, 2.0))


class UnitTestSweepSpec(UnitTestCase):
	def test_cells(self):
		spec = _spec()
		self.assertEqual(len(spec.cells()), 2 * 2 * 2)
		self.assertEqual(spec.cell_params(6.0).alpha, 6.0 / 200)
		self.assertEqual(_spec(axis=Axis.LAMBDA, values=(0.1,)).cell_params(0.1).lam, 0.1)

	def test_invalid_cells_rejected(self):
		with self.assertRaises(ValidationError):
			validate_sweep(_spec(axis=Axis.LAMBDA, values=(0.2, 0.5)))
		with self.assertRaises(ValidationError):
			validate_sweep(_spec(values=()))
		with self.assertRaises(ValidationError):
			validate_sweep(_spec(values=(250.0,)))

	def test_cell_error_names_cell(self):
		with patch.dict(hooks.sweep_engines, {"ode": "dynamatch.experiments.test_sweep._failing_cell"}):
			with self.assertRaises(CellError) as raised:
				run_sweep(_spec(engines=(Engine.ODE,), values=(4.0,)), jobs=1)
		self.assertEqual(raised.exception.cell, (4.0, "greedy", "ode"))
		self.assertIsInstance(raised.exception.cause, BracketingError)
		self.assertIn("scanned interval", str(raised.exception))

		copy = pickle.loads(pickle.dumps(raised.exception))
		self.assertEqual(str(copy), str(raised.exception))
		self.assertEqual(copy.cause.interval, (1.0, 2.0))


class IntegrationTestRunSweep(IntegrationTestCase):
	def test_ode_cell_is_the_stationary_solution(self):
		result = run_sweep(_spec(engines=(Engine.ODE,), base=MarketParams.from_density(p=2, lam=0.2, m=8000, d=10), values=(10.0,)))
		self.assertEqual(len(result.rows), 2)
		params = MarketParams.from_density(p=2, lam=0.2, m=8000, d=10)
		self.assertEqual(result.row(10.0, Policy.GREEDY, Engine.ODE).loss, stationary_greedy(params).loss)
		self.assertEqual(result.row(10.0, Policy.PATIENT, Engine.ODE).pool_sizes, stationary_patient(params).sizes)

	def test_discrete_cell_is_a_direct_replication(self):
		spec = _spec(engines=(Engine.DISCRETE,))
		result = run_sweep(spec, jobs=1)
		config = SimConfig(params=SMALL.with_density(6.0), policy=Policy.PATIENT, stop=StopRule.by_events(2000), seed=3)
		direct = replicate(config, 2, spawn_prefix=(1, POLICY_INDEX[Policy.PATIENT]))
		row = result.row(6.0, Policy.PATIENT, Engine.DISCRETE)
		self.assertEqual(row.loss, direct.loss)
		self.assertEqual(row.replications, 2)
		self.assertEqual(run_discrete_cell(spec, 1, Policy.PATIENT).loss, row.loss)

	def test_same_spec_same_files(self):
		spec = _spec(warm_start=True)
		with tempfile.TemporaryDirectory() as tmp:
			first = write_sweep_csv(run_sweep(spec, jobs=1), Path(tmp) / "first.csv").read_bytes()
			second = write_sweep_csv(run_sweep(spec, jobs=2), Path(tmp) / "second.csv").read_bytes()
		self.assertEqual(first, second)
		header = first.decode().splitlines()[0].split(",")
		self.assertEqual(header, sweep_columns(2))
		self.assertEqual(len(first.decode().splitlines()), 1 + 8)

	def test_standard_errors_nonnegative(self):
		result = run_sweep(_spec(engines=(Engine.DISCRETE,)), jobs=1)
		for row in result.rows:
			self.assertTrue(all(se >= 0 for se in row.loss.standard_errors))
			self.assertGreaterEqual(row.loss.total_standard_error, 0)
