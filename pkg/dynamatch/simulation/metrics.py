# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

import math
from dataclasses import asdict, dataclass, field

from dynamatch.market.params import LossReport, PoolState
from dynamatch.utils import throw


def _zeros(n: int) -> list:
	return [0] * n


@dataclass
class SimMetrics:
	"""
	Counters of one run. Run-level counters cover the whole run and satisfy
	initial + arrivals = matched + perished + final pool per type. The `window_*`
	counters, `matches_by_pair`, the pool-time integral and the waiting sums cover
	the measurement window only.
	"""

	p: int
	initial_by_type: list[int]
	arrivals_by_type: list[int] = field(default_factory=list)
	matched_by_type: list[int] = field(default_factory=list)
	perished_by_type: list[int] = field(default_factory=list)
	final_pool: tuple[int, ...] = ()

	window_start: float = 0.0
	window_end: float = 0.0
	window_arrivals_by_type: list[int] = field(default_factory=list)
	window_matched_by_type: list[int] = field(default_factory=list)
	window_perished_by_type: list[int] = field(default_factory=list)
	# ordered (mover type, partner type); the mover is the arriving or critical agent
	matches_by_pair: list[list[int]] = field(default_factory=list)
	pool_time_integral_by_type: list[float] = field(default_factory=list)
	waiting_time_sum_by_type: list[float] = field(default_factory=list)
	departed_count_by_type: list[int] = field(default_factory=list)

	events: int = 0
	end_time: float = 0.0

	@classmethod
	def empty(cls, p: int, initial_by_type: list[int] | None = None) -> "SimMetrics":
		n = p + 1
		return cls(
			p=p,
			initial_by_type=list(initial_by_type) if initial_by_type is not None else _zeros(n),
			arrivals_by_type=_zeros(n),
			matched_by_type=_zeros(n),
			perished_by_type=_zeros(n),
			final_pool=tuple(_zeros(n)),
			window_arrivals_by_type=_zeros(n),
			window_matched_by_type=_zeros(n),
			window_perished_by_type=_zeros(n),
			matches_by_pair=[_zeros(n) for _ in range(n)],
			pool_time_integral_by_type=[0.0] * n,
			waiting_time_sum_by_type=[0.0] * n,
			departed_count_by_type=_zeros(n),
		)

	@property
	def window_duration(self) -> float:
		return self.window_end - self.window_start

	def final_state(self) -> PoolState:
		return PoolState.of(self.final_pool)

	def conservation_gaps(self) -> list[int]:
		"""initial + arrivals - matched - perished - final per type; all zeros on a consistent run."""
		return [
			self.initial_by_type[k]
			+ self.arrivals_by_type[k]
			- self.matched_by_type[k]
			- self.perished_by_type[k]
			- self.final_pool[k]
			for k in range(self.p + 1)
		]

	def to_dict(self) -> dict:
		values = asdict(self)
		values["final_pool"] = list(self.final_pool)
		values["window_duration"] = self.window_duration
		return values


def loss_from_metrics(metrics: SimMetrics) -> LossReport:
	"""Perished over arrived per type within the measurement window."""
	arrivals = metrics.window_arrivals_by_type
	if metrics.window_duration <= 0 or sum(arrivals) == 0:
		throw("the measurement window holds no arrivals")

	per_type = tuple(
		metrics.window_perished_by_type[k] / arrivals[k] if arrivals[k] else math.nan for k in range(metrics.p + 1)
	)
	return LossReport(per_type=per_type, total=sum(metrics.window_perished_by_type) / sum(arrivals))


def loss_over_horizon(metrics: SimMetrics) -> LossReport:
	"""
	Whole-run loss: agents that ever were in the market, minus those matched and those
	still waiting at the end, over agents that ever were in the market.
	"""
	present = [metrics.initial_by_type[k] + metrics.arrivals_by_type[k] for k in range(metrics.p + 1)]
	if sum(present) == 0:
		throw("no agent was ever in the market")
	lost = [present[k] - metrics.matched_by_type[k] - metrics.final_pool[k] for k in range(metrics.p + 1)]
	per_type = tuple(lost[k] / present[k] if present[k] else math.nan for k in range(metrics.p + 1))
	return LossReport(per_type=per_type, total=sum(lost) / sum(present))


def waiting_times(metrics: SimMetrics) -> tuple[float, ...]:
	"""Mean sojourn of agents that departed inside the window, NaN for types with no departure."""
	return tuple(
		metrics.waiting_time_sum_by_type[k] / metrics.departed_count_by_type[k]
		if metrics.departed_count_by_type[k]
		else math.nan
		for k in range(metrics.p + 1)
	)


def mean_pool_sizes(metrics: SimMetrics) -> tuple[float, ...]:
	if metrics.window_duration <= 0:
		throw("the measurement window has zero length")
	return tuple(integral / metrics.window_duration for integral in metrics.pool_time_integral_by_type)
