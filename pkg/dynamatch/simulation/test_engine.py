# Copyright (c) 2025, dynamatch contributors
# See license.txt

import math
import tempfile
from pathlib import Path

import numpy as np

from dynamatch.exceptions import EventBudgetExceeded, ValidationError
from dynamatch.market.params import MarketParams, Policy
from dynamatch.simulation.checks import (
	check_agent_records,
	check_conservation,
	check_hard_priority,
	check_pool_independence,
)
from dynamatch.simulation.engine import Simulator, replicate, run_simulation
from dynamatch.simulation.metrics import (
	SimMetrics,
	loss_from_metrics,
	loss_over_horizon,
	mean_pool_sizes,
	waiting_times,
)
from dynamatch.simulation.sim_config import Clock, EdgeMode, SimConfig, StopRule
from dynamatch.simulation.trace import read_trace_csv, trace_columns, write_trace_csv
from dynamatch.tests import IntegrationTestCase, UnitTestCase, slow

SMALL = MarketParams.from_density(p=2, lam=0.2, m=200, d=5, horizon=4)
EMPTY_MARKET = MarketParams.from_alpha(p=2, lam=0.2, m=100, alpha=1e-12, horizon=10)


def _config(params=SMALL, policy=Policy.GREEDY, **overrides):
	values = {"stop": StopRule.by_time(params.horizon), "seed": 7} | overrides
	return SimConfig(params=params, policy=policy, **values)


class UnitTestSimConfig(UnitTestCase):
	def test_default_warmup_is_three_quarters(self):
		self.assertEqual(_config().effective_warmup, 3.0)
		self.assertEqual(_config(stop=StopRule.by_events(20_000)).effective_warmup, 15_000)

	def test_warmup_must_precede_stop(self):
		with self.assertRaises(ValidationError):
			Simulator(_config(warmup=4.0))

	def test_event_budget(self):
		with self.assertRaises(ValidationError):
			Simulator(_config(stop=StopRule.by_events(100), max_events=50))
		simulator = Simulator(_config(max_events=50))
		with self.assertRaises(EventBudgetExceeded):
			simulator.run()

	def test_initial_sizes_length(self):
		with self.assertRaises(ValidationError):
			Simulator(_config(initial_sizes=(1, 2)))

	def test_explicit_graph_runs_on_calendar(self):
		self.assertEqual(_config(edge_mode=EdgeMode.EXPLICIT_GRAPH).effective_clock, Clock.CALENDAR)
		with self.assertRaises(ValidationError):
			Simulator(_config(edge_mode=EdgeMode.EXPLICIT_GRAPH, clock=Clock.AGGREGATE))


class UnitTestMetrics(UnitTestCase):
	def test_zero_perishes_zero_loss(self):
		metrics = SimMetrics.empty(1)
		metrics.window_end = 1.0
		metrics.window_arrivals_by_type = [5, 3]
		loss = loss_from_metrics(metrics)
		self.assertEqual(loss.per_type, (0.0, 0.0))
		self.assertEqual(loss.total, 0.0)

	def test_empty_window(self):
		with self.assertRaises(ValidationError):
			loss_from_metrics(SimMetrics.empty(1))

	def test_loss_over_horizon(self):
		metrics = SimMetrics.empty(1, [2, 0])
		metrics.arrivals_by_type = [8, 10]
		metrics.matched_by_type = [6, 6]
		metrics.perished_by_type = [3, 1]
		metrics.final_pool = (1, 3)
		self.assertEqual(check_conservation(metrics), [])
		loss = loss_over_horizon(metrics)
		self.assertEqual(loss.per_type, (0.3, 0.1))
		self.assertEqual(loss.total, 0.2)
		self.assertEqual(metrics.final_state().sizes, (1.0, 3.0))

	def test_conservation_violation_is_reported(self):
		metrics = SimMetrics.empty(1)
		metrics.arrivals_by_type = [1, 0]
		self.assertEqual(len(check_conservation(metrics)), 1)

	def test_no_departure_wait_is_nan(self):
		self.assertTrue(all(math.isnan(w) for w in waiting_times(SimMetrics.empty(2))))


class IntegrationTestSimulator(IntegrationTestCase):
	"""
	Whole runs of the event-driven market.
	"""

	def test_same_seed_same_run(self):
		for policy in Policy:
			first, first_trace = run_simulation(_config(policy=policy, record_trace=True))
			second, second_trace = run_simulation(_config(policy=policy, record_trace=True))
			self.assertEqual(first, second)
			self.assertEqual(first_trace, second_trace)
			third, _ = run_simulation(_config(policy=policy, seed=8))
			self.assertNotEqual(first, third)

	def test_conservation_every_mode(self):
		for policy in Policy:
			for edge_mode in EdgeMode:
				for clock in Clock:
					if edge_mode == EdgeMode.EXPLICIT_GRAPH and clock == Clock.AGGREGATE:
						continue
					for initial in (None, (120, 15, 15)):
						config = _config(policy=policy, edge_mode=edge_mode, clock=clock, initial_sizes=initial)
						metrics, _ = run_simulation(config)
						self.assertEqual(check_conservation(metrics), [], msg=f"{policy} {edge_mode} {clock}")
						self.assertTrue(all(v >= 0 for v in metrics.pool_time_integral_by_type))

	def test_event_count_stop(self):
		metrics, _ = run_simulation(_config(stop=StopRule.by_events(2000), warmup=1500))
		self.assertEqual(metrics.events, 2000)
		self.assertGreater(sum(metrics.window_arrivals_by_type), 0)
		self.assertLess(metrics.window_start, metrics.window_end)
		self.assertEqual(check_conservation(metrics), [])

	def test_agent_records(self):
		for policy in Policy:
			simulator = Simulator(_config(policy=policy, record_trace=True, clock=Clock.CALENDAR))
			simulator.run()
			self.assertEqual(check_agent_records(simulator.departed, simulator.time), [])
			self.assertEqual(check_hard_priority(simulator.trace), [])

	def test_agent_records_past_the_horizon(self):
		# an event-count stop runs well beyond the market horizon of 4
		for policy in Policy:
			simulator = Simulator(_config(policy=policy, stop=StopRule.by_events(6000), record_trace=True))
			simulator.run()
			self.assertGreater(simulator.time, SMALL.horizon)
			self.assertEqual(check_agent_records(simulator.departed, simulator.time), [])
			late = [a for a in simulator.departed if a.outcome.time > SMALL.horizon]
			self.assertTrue(late)
			self.assertEqual(len(check_agent_records(late, SMALL.horizon)), len(late))

	def test_explicit_graph_invariants(self):
		for policy in Policy:
			simulator = Simulator(_config(policy=policy, edge_mode=EdgeMode.EXPLICIT_GRAPH, record_trace=True))
			while simulator.step() is not None:
				self.assertEqual(check_pool_independence(simulator), [])
			self.assertEqual(check_hard_priority(simulator.trace), [])
			self.assertEqual(check_conservation(simulator.metrics), [])

	def test_trace_csv(self):
		_, trace = run_simulation(_config(policy=Policy.PATIENT, record_trace=True))
		with tempfile.TemporaryDirectory() as tmp:
			path = write_trace_csv(trace, Path(tmp) / "trace.csv", SMALL.p)
			self.assertEqual(path.read_text().splitlines()[0].split(","), trace_columns(SMALL.p))
			self.assertEqual(read_trace_csv(path), trace)

	def test_no_matching_market_is_infinite_server_queue(self):
		rates = EMPTY_MARKET.arrival_rates()
		config = _config(params=EMPTY_MARKET, initial_sizes=tuple(int(r) for r in rates), warmup=5.0)
		summary = replicate(config, 20)
		for metrics in summary.metrics:
			self.assertEqual(sum(metrics.matched_by_type), 0)
			self.assertEqual(check_conservation(metrics), [])
		for k, rate in enumerate(rates):
			band = 4 * summary.pool_standard_errors[k] + 0.01 * rate
			self.assertLess(abs(summary.mean_pool[k] - rate), band)
			self.assertLess(abs(summary.waits[k] - 1.0), 0.1)

	def test_patient_loses_everything_without_compatibility(self):
		params = EMPTY_MARKET.model_copy(update={"horizon": 40.0})
		metrics, _ = run_simulation(_config(params=params, policy=Policy.PATIENT, warmup=20.0))
		loss = loss_from_metrics(metrics)
		self.assertGreater(loss.total, 0.95)
		self.assertLess(loss.total, 1.05)

	def test_replicate_is_reproducible(self):
		first = replicate(_config(policy=Policy.PATIENT), 3)
		second = replicate(_config(policy=Policy.PATIENT), 3)
		self.assertEqual(first.loss, second.loss)
		self.assertEqual(first.replications, 3)
		self.assertTrue(all(e >= 0 for e in first.loss.standard_errors))

	def test_patient_beats_greedy(self):
		params = MarketParams.from_density(p=2, lam=0.2, m=400, d=8, horizon=6)
		greedy = replicate(_config(params=params, policy=Policy.GREEDY), 4).loss
		patient = replicate(_config(params=params, policy=Policy.PATIENT), 4).loss
		self.assertLess(patient.total, greedy.total)

	def _assert_same_law(self, first, second, bands):
		for k in range(len(first.loss.per_type)):
			combined = math.hypot(first.loss.standard_errors[k], second.loss.standard_errors[k])
			gap = abs(first.loss.per_type[k] - second.loss.per_type[k])
			self.assertLess(gap, bands * combined + 1e-12, msg=f"type {k}")

	def test_lazy_and_explicit_agree(self):
		params = MarketParams.from_density(p=2, lam=0.2, m=300, d=6, horizon=4)
		for policy in Policy:
			lazy = replicate(_config(params=params, policy=policy), 20)
			explicit = replicate(_config(params=params, policy=policy, edge_mode=EdgeMode.EXPLICIT_GRAPH), 20)
			self._assert_same_law(lazy, explicit, 4)

	def test_aggregate_and_calendar_agree(self):
		params = MarketParams.from_density(p=2, lam=0.2, m=300, d=6, horizon=4)
		for policy in Policy:
			aggregate = replicate(_config(params=params, policy=policy), 20)
			calendar = replicate(_config(params=params, policy=policy, clock=Clock.CALENDAR), 20)
			self._assert_same_law(aggregate, calendar, 4)

	@slow
	def test_lazy_and_explicit_agree_full_scale(self):
		params = MarketParams.from_density(p=2, lam=0.2, m=2000, d=8, horizon=6)
		for policy in Policy:
			lazy = replicate(_config(params=params, policy=policy), 50)
			explicit = replicate(_config(params=params, policy=policy, edge_mode=EdgeMode.EXPLICIT_GRAPH), 50)
			self._assert_same_law(lazy, explicit, 3)

	def test_window_pool_average(self):
		metrics, _ = run_simulation(_config(policy=Policy.PATIENT))
		sizes = np.array(mean_pool_sizes(metrics))
		self.assertEqual(metrics.window_duration, 1.0)
		self.assertTrue(np.all(sizes > 0))
