# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from dynamatch import hooks
from dynamatch.exceptions import EventBudgetExceeded
from dynamatch.market.params import LossReport
from dynamatch.simulation.agents import AgentPool, AgentRecord, CompatibilityGraph, Matched, PerishedAt
from dynamatch.simulation.metrics import SimMetrics, loss_from_metrics, mean_pool_sizes, waiting_times
from dynamatch.simulation.policies import JoinedPool, MatchedWith, join_pool
from dynamatch.simulation.sim_config import Clock, EdgeMode, SimConfig, validate_config
from dynamatch.simulation.trace import TraceRecord
from dynamatch.utils import get_attr, logger, rng_stream


class Simulator:
	"""
	Continuous-time market with Poisson(m) arrivals and an Exp(1) criticality clock per
	agent. The aggregate clock draws the next event from Exp(m + |S|) and picks the
	critical agent uniformly; the calendar clock keeps every agent's deadline in a heap.
	The two give the same law.
	"""

	def __init__(self, config: SimConfig, spawn_key: tuple[int, ...] = ()):
		self.config = validate_config(config)
		self.params = config.params
		self.rng = rng_stream(config.seed, *spawn_key)
		self.log = logger("simulation")

		p = self.params.p
		graph = CompatibilityGraph() if config.edge_mode == EdgeMode.EXPLICIT_GRAPH else None
		self.pool = AgentPool(p, graph)
		self.time = 0.0
		self.trace: list[TraceRecord] = []
		self.departed: list[AgentRecord] = []
		self.done = False

		handlers = hooks.policy_handlers[config.policy.value]
		self._on_arrival = get_attr(handlers["on_arrival"]) if "on_arrival" in handlers else None
		self._on_critical = get_attr(handlers["on_critical"]) if "on_critical" in handlers else None

		self._calendar_clock = config.effective_clock == Clock.CALENDAR
		self._calendar: list[tuple[float, int]] = []
		self._type_cdf = np.cumsum(self.params.type_probabilities())
		self._next_id = 0
		self._warmup = config.effective_warmup
		self._by_time = config.stop.kind == "time"

		initial = list(config.initial_sizes) if config.initial_sizes is not None else [0] * (p + 1)
		self.metrics = SimMetrics.empty(p, initial)
		self._seed_pool(initial)
		self._next_arrival = self._draw_arrival_gap() if self._calendar_clock else math.inf

		self._window_open = self._warmup == 0
		self.metrics.window_start = self._warmup if self._by_time else 0.0

	def _new_agent(self, type_index: int, initial: bool = False) -> AgentRecord:
		agent = AgentRecord(id=self._next_id, type_index=type_index, arrival_time=self.time, initial=initial)
		self._next_id += 1
		return agent

	def _seed_pool(self, initial: list[int]) -> None:
		"""Warm start. Greedy pools hold no compatible admissible pair, so seeded Greedy agents get no edges."""
		explicit = self.config.edge_mode == EdgeMode.EXPLICIT_GRAPH
		for k, count in enumerate(initial):
			for _ in range(count):
				agent = self._new_agent(k, initial=True)
				if explicit and self.config.policy.value == "patient":
					self.pool.graph.connect(agent, self.pool, self.params.alpha, self.rng)
				elif explicit:
					self.pool.graph.add_isolated(agent.id)
				self.pool.add(agent)
				self._schedule(agent)

	def _schedule(self, agent: AgentRecord) -> None:
		if self._calendar_clock:
			agent.criticality_time = self.time + self.rng.exponential(1.0)
			heapq.heappush(self._calendar, (agent.criticality_time, agent.id))

	def _draw_arrival_gap(self) -> float:
		return self.time + self.rng.exponential(1.0 / self.params.m)

	def _draw_type(self) -> int:
		return min(int(np.searchsorted(self._type_cdf, self.rng.random(), side="right")), self.params.p)

	def _advance(self, t_new: float) -> None:
		sizes = self.pool.sizes()
		start = max(self.time, self._warmup) if self._by_time else self.time
		if (self._by_time or self._window_open) and t_new > start:
			for k, size in enumerate(sizes):
				self.metrics.pool_time_integral_by_type[k] += size * (t_new - start)
		self.time = t_new

	def _next_event(self) -> tuple[float, int | None]:
		"""Time of the next event and the critical agent, None for an arrival."""
		if not self._calendar_clock:
			rate = self.params.m + len(self.pool)
			t_new = self.time + self.rng.exponential(1.0 / rate)
			if self.rng.random() * rate < self.params.m:
				return t_new, None
			return t_new, self.pool.sample_any(self.rng)

		while self._calendar and self._calendar[0][1] not in self.pool:
			heapq.heappop(self._calendar)
		if self._calendar and self._calendar[0][0] < self._next_arrival:
			deadline, agent_id = heapq.heappop(self._calendar)
			return deadline, agent_id
		return self._next_arrival, None

	def _depart(self, agent: AgentRecord, outcome) -> None:
		agent.outcome = outcome
		k = agent.type_index
		if isinstance(outcome, Matched):
			self.metrics.matched_by_type[k] += 1
		else:
			self.metrics.perished_by_type[k] += 1

		if self._in_window():
			if isinstance(outcome, Matched):
				self.metrics.window_matched_by_type[k] += 1
			else:
				self.metrics.window_perished_by_type[k] += 1
			if not agent.initial:
				self.metrics.waiting_time_sum_by_type[k] += self.time - agent.arrival_time
				self.metrics.departed_count_by_type[k] += 1

		if self.config.record_trace:
			self.departed.append(agent)

	def _in_window(self) -> bool:
		return self.time >= self._warmup if self._by_time else self._window_open

	def _record_match(self, mover: AgentRecord, result: MatchedWith) -> None:
		partner = result.partner
		self._depart(mover, Matched(partner.id, self.time))
		self._depart(partner, Matched(mover.id, self.time))
		if self._in_window():
			self.metrics.matches_by_pair[mover.type_index][partner.type_index] += 1

	def _handle_arrival(self) -> TraceRecord:
		agent = self._new_agent(self._draw_type())
		self.metrics.arrivals_by_type[agent.type_index] += 1
		if self._in_window():
			self.metrics.window_arrivals_by_type[agent.type_index] += 1

		alpha, rng, mode = self.params.alpha, self.rng, self.config.edge_mode
		if self._on_arrival is not None:
			result = self._on_arrival(self.pool, agent, alpha, self.config.tie_break, rng, mode)
		else:
			result = join_pool(self.pool, agent, alpha, rng, mode)

		if isinstance(result, JoinedPool):
			self._schedule(agent)
			return self._trace_record("arrival", agent, "joined", None, result)

		self._record_match(agent, result)
		return self._trace_record("arrival", agent, "matched", result, result)

	def _handle_critical(self, agent_id: int) -> TraceRecord:
		agent = self.pool.get(agent_id)
		if agent.criticality_time is None:
			agent.criticality_time = self.time

		if self._on_critical is None:
			self.pool.remove(agent_id)
			self._depart(agent, PerishedAt(self.time))
			return self._trace_record("critical", agent, "perished", None, None)

		result = self._on_critical(
			self.pool, agent, self.params.alpha, self.config.tie_break, self.rng, self.config.edge_mode
		)
		if isinstance(result, MatchedWith):
			self._record_match(agent, result)
			return self._trace_record("critical", agent, "matched", result, result)

		self._depart(agent, PerishedAt(self.time))
		return self._trace_record("critical", agent, "perished", None, result)

	def _trace_record(self, kind, agent, outcome, match: MatchedWith | None, result) -> TraceRecord:
		return TraceRecord(
			time=self.time,
			event_kind=kind,
			agent_id=agent.id,
			agent_type=agent.type_index,
			outcome=outcome,
			partner_id=match.partner_id if match else None,
			partner_type=match.partner_type if match else None,
			hard_candidates=result.hard_candidates if result is not None else 0,
			easy_candidates=result.easy_candidates if result is not None else None,
			pool_sizes=self.pool.sizes(),
		)

	def step(self) -> TraceRecord | None:
		"""Processes one event; returns None once the stop rule is reached."""
		if self.done:
			return None
		if self.metrics.events >= self.config.event_budget:
			raise EventBudgetExceeded(
				f"run reached the event budget of {self.config.event_budget} at t = {self.time:.6g}"
			)

		t_new, critical_id = self._next_event()
		if self._by_time and t_new > self.config.stop.bound:
			self._advance(self.config.stop.bound)
			self._finish()
			return None

		self._advance(t_new)
		if critical_id is None:
			if self._calendar_clock:
				self._next_arrival = self._draw_arrival_gap()
			record = self._handle_arrival()
		else:
			record = self._handle_critical(critical_id)

		self.metrics.events += 1
		if not self._by_time and not self._window_open and self.metrics.events >= self._warmup:
			self._window_open = True
			self.metrics.window_start = self.time
		if self.config.record_trace:
			self.trace.append(record)
		if not self._by_time and self.metrics.events >= self.config.stop.bound:
			self._finish()
		return record

	def _finish(self) -> None:
		self.done = True
		self.metrics.final_pool = self.pool.sizes()
		self.metrics.end_time = self.time
		self.metrics.window_end = self.time
		if not self._window_open and not self._by_time:
			self.metrics.window_start = self.time

	def run(self) -> SimMetrics:
		self.log.debug(
			f"simulating {self.config.policy.value} p={self.params.p} lambda={self.params.lam} "
			f"m={self.params.m} d={self.params.d} stop={self.config.stop.kind}:{self.config.stop.bound:g}"
		)
		while self.step() is not None:
			pass
		self.log.debug(f"finished after {self.metrics.events} events at t = {self.time:.6g}")
		return self.metrics


def run_simulation(config: SimConfig, spawn_key: tuple[int, ...] = ()) -> tuple[SimMetrics, list[TraceRecord] | None]:
	simulator = Simulator(config, spawn_key)
	metrics = simulator.run()
	return metrics, simulator.trace if config.record_trace else None


@dataclass
class ReplicationSummary:
	loss: LossReport
	waits: tuple[float, ...]
	wait_standard_errors: tuple[float, ...]
	mean_pool: tuple[float, ...]
	pool_standard_errors: tuple[float, ...]
	metrics: list[SimMetrics] = field(repr=False, default_factory=list)

	@property
	def replications(self) -> int:
		return len(self.metrics)


def mean_and_error(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
	"""Column means and standard errors of the mean over rows (zero error for one row)."""
	samples = np.atleast_2d(np.asarray(samples, dtype=float))
	mean = samples.mean(axis=0)
	if samples.shape[0] < 2:
		return mean, np.zeros_like(mean)
	return mean, samples.std(axis=0, ddof=1) / math.sqrt(samples.shape[0])


def replicate(config: SimConfig, replications: int, spawn_prefix: tuple[int, ...] = ()) -> ReplicationSummary:
	"""
	Runs `replications` independent copies of `config`; replication r uses the stream
	spawned from (config.seed, *spawn_prefix, r).
	"""
	runs = [run_simulation(config, (*spawn_prefix, r))[0] for r in range(replications)]

	losses = np.array([(*loss.per_type, loss.total) for loss in map(loss_from_metrics, runs)])
	loss_mean, loss_error = mean_and_error(losses)
	waits_mean, waits_error = mean_and_error(np.array([waiting_times(run) for run in runs]))
	pool_mean, pool_error = mean_and_error(np.array([mean_pool_sizes(run) for run in runs]))

	loss = LossReport(
		per_type=tuple(loss_mean[:-1]),
		total=float(loss_mean[-1]),
		standard_errors=tuple(loss_error[:-1]),
		total_standard_error=float(loss_error[-1]),
	)
	return ReplicationSummary(
		loss=loss,
		waits=tuple(waits_mean),
		wait_standard_errors=tuple(waits_error),
		mean_pool=tuple(pool_mean),
		pool_standard_errors=tuple(pool_error),
		metrics=runs,
	)
