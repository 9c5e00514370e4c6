# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from dynamatch.config import get_settings
from dynamatch.market.params import MarketParams, Policy, TieBreak, validate_params
from dynamatch.utils import throw


class EdgeMode(str, Enum):
	# binomial count of compatible candidates per type, then a uniform member
	LAZY = "lazy"
	# one fresh Bernoulli draw per admissible candidate
	LAZY_BERNOULLI = "lazy_bernoulli"
	# persistent edges drawn when an agent enters the pool
	EXPLICIT_GRAPH = "explicit_graph"


class Clock(str, Enum):
	AGGREGATE = "aggregate"
	CALENDAR = "calendar"


class StopRule(BaseModel):
	"""Run until `bound` time units (`time`) or `bound` events (`events`)."""

	model_config = ConfigDict(frozen=True)

	kind: Literal["time", "events"]
	bound: float = Field(gt=0)

	@classmethod
	def by_time(cls, horizon: float) -> "StopRule":
		return cls(kind="time", bound=horizon)

	@classmethod
	def by_events(cls, events: int) -> "StopRule":
		return cls(kind="events", bound=events)


class SimConfig(BaseModel):
	model_config = ConfigDict(frozen=True)

	params: MarketParams
	policy: Policy
	tie_break: TieBreak = TieBreak.TYPE_UNIFORM
	edge_mode: EdgeMode = EdgeMode.LAZY
	clock: Clock = Clock.AGGREGATE
	stop: StopRule
	# same unit as `stop`; None means the configured warmup fraction of the bound
	warmup: float | None = None
	seed: int = Field(default=1, ge=0, lt=2**64)
	initial_sizes: tuple[int, ...] | None = None
	max_events: int | None = None
	record_trace: bool = False

	@property
	def effective_clock(self) -> Clock:
		return Clock.CALENDAR if self.edge_mode == EdgeMode.EXPLICIT_GRAPH else self.clock

	@property
	def effective_warmup(self) -> float:
		if self.warmup is not None:
			return self.warmup
		warmup = get_settings().warmup_fraction * self.stop.bound
		return float(int(warmup)) if self.stop.kind == "events" else warmup

	@property
	def event_budget(self) -> int:
		return self.max_events if self.max_events is not None else get_settings().max_events


def validate_config(config: SimConfig) -> SimConfig:
	validate_params(config.params)
	p = config.params.p

	if not 0 <= config.effective_warmup < config.stop.bound:
		throw(f"warmup {config.effective_warmup:g} must lie in [0, {config.stop.bound:g})")
	if config.stop.kind == "events":
		if config.stop.bound != int(config.stop.bound):
			throw(f"an event-count stop rule needs an integer bound, got {config.stop.bound}")
		if config.stop.bound > config.event_budget:
			throw(f"{int(config.stop.bound)} events exceed the event budget of {config.event_budget}")
	if config.initial_sizes is not None:
		if len(config.initial_sizes) != p + 1:
			throw(f"initial_sizes needs {p + 1} entries, got {len(config.initial_sizes)}")
		if any(n < 0 for n in config.initial_sizes):
			throw(f"initial_sizes must be nonnegative, got {config.initial_sizes}")
	if config.edge_mode == EdgeMode.EXPLICIT_GRAPH and config.clock == Clock.AGGREGATE and "clock" in (
		config.model_fields_set
	):
		throw("the explicit-graph mode runs on the calendar clock")
	return config
