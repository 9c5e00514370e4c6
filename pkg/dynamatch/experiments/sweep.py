# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

"""
Parameter sweeps over density or arrival share.

A sweep is a grid of cells (axis value, policy, engine). Every cell is an
independent unit of work: the discrete engine derives its replication streams
from (seed, value index, policy index, replication), so a cell recomputed alone
gives the same numbers as inside the full sweep.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from multiprocessing import Pool

from pydantic import BaseModel, ConfigDict, Field

from dynamatch import hooks
from dynamatch.config import get_settings
from dynamatch.exceptions import CellError, DynamatchError
from dynamatch.market.params import LossReport, MarketParams, Policy, TieBreak, validate_params
from dynamatch.simulation.engine import replicate
from dynamatch.simulation.sim_config import EdgeMode, SimConfig, StopRule
from dynamatch.utils import get_attr, log_error, logger, throw


class Axis(str, Enum):
	DENSITY = "d"
	LAMBDA = "lambda"


class Engine(str, Enum):
	DISCRETE = "discrete"
	ODE = "ode"


POLICY_INDEX = {policy: i for i, policy in enumerate(Policy)}


class SweepSpec(BaseModel):
	model_config = ConfigDict(frozen=True)

	base: MarketParams
	axis: Axis
	values: tuple[float, ...]
	policies: tuple[Policy, ...] = (Policy.GREEDY, Policy.PATIENT)
	engines: tuple[Engine, ...] = (Engine.DISCRETE, Engine.ODE)
	replications: int = Field(default=20, ge=1)
	seed: int = Field(default=1, ge=0, lt=2**64)
	# discrete stop rule; None means the configured event count
	stop: StopRule | None = None
	# start discrete runs from the rounded ODE stationary sizes
	warm_start: bool = True
	tie_break: TieBreak = TieBreak.TYPE_UNIFORM
	edge_mode: EdgeMode = EdgeMode.LAZY

	def cell_params(self, value: float) -> MarketParams:
		if self.axis == Axis.DENSITY:
			return self.base.with_density(value)
		return self.base.with_lambda(value)

	def discrete_stop(self) -> StopRule:
		return self.stop or StopRule.by_events(get_settings().events)

	def cells(self) -> list[tuple[int, Policy, Engine]]:
		return [
			(index, policy, engine)
			for index in range(len(self.values))
			for policy in self.policies
			for engine in self.engines
		]


def validate_sweep(spec: SweepSpec) -> SweepSpec:
	if not spec.values:
		throw("a sweep needs at least one axis value")
	if not spec.policies or not spec.engines:
		throw("a sweep needs at least one policy and one engine")
	for value in spec.values:
		try:
			validate_params(spec.cell_params(value))
		except DynamatchError as e:
			throw(f"{spec.axis.value} = {value:g}: {e}")
	return spec


@dataclass
class SweepRow:
	axis_value: float
	policy: Policy
	engine: Engine
	params: MarketParams
	loss: LossReport
	waits: tuple[float, ...]
	pool_sizes: tuple[float, ...]
	wait_standard_errors: tuple[float, ...] | None = None
	pool_standard_errors: tuple[float, ...] | None = None
	replications: int = 0
	residual: float | None = None

	@property
	def key(self) -> tuple[float, str, str]:
		return (self.axis_value, self.policy.value, self.engine.value)


@dataclass
class SweepResult:
	spec: SweepSpec
	rows: list[SweepRow] = field(default_factory=list)

	def row(self, axis_value: float, policy: Policy, engine: Engine) -> SweepRow:
		for row in self.rows:
			if row.axis_value == axis_value and row.policy == policy and row.engine == engine:
				return row
		throw(f"no row for {axis_value:g}, {Policy(policy).value}, {Engine(engine).value}")

	def series(self, policy: Policy, engine: Engine) -> list[SweepRow]:
		return [row for row in self.rows if row.policy == policy and row.engine == engine]


def _warm_start_sizes(spec: SweepSpec, params: MarketParams, policy: Policy) -> tuple[int, ...] | None:
	if not spec.warm_start:
		return None
	solution = get_attr(hooks.stationary_solvers[policy.value])(params)
	return tuple(int(round(s)) for s in solution.sizes)


def run_discrete_cell(spec: SweepSpec, index: int, policy: Policy) -> SweepRow:
	value = spec.values[index]
	params = spec.cell_params(value)
	config = SimConfig(
		params=params,
		policy=policy,
		tie_break=spec.tie_break,
		edge_mode=spec.edge_mode,
		stop=spec.discrete_stop(),
		seed=spec.seed,
		initial_sizes=_warm_start_sizes(spec, params, policy),
	)
	summary = replicate(config, spec.replications, spawn_prefix=(index, POLICY_INDEX[policy]))
	return SweepRow(
		axis_value=value,
		policy=policy,
		engine=Engine.DISCRETE,
		params=params,
		loss=summary.loss,
		waits=summary.waits,
		pool_sizes=summary.mean_pool,
		wait_standard_errors=summary.wait_standard_errors,
		pool_standard_errors=summary.pool_standard_errors,
		replications=summary.replications,
	)


def run_ode_cell(spec: SweepSpec, index: int, policy: Policy) -> SweepRow:
	value = spec.values[index]
	params = spec.cell_params(value)
	solution = get_attr(hooks.stationary_solvers[policy.value])(params)
	return SweepRow(
		axis_value=value,
		policy=policy,
		engine=Engine.ODE,
		params=params,
		loss=solution.loss,
		waits=solution.waits,
		pool_sizes=solution.sizes,
		residual=solution.residual,
	)


def _run_cell(job: tuple[SweepSpec, tuple[int, Policy, Engine]]) -> SweepRow:
	spec, (index, policy, engine) = job
	try:
		return get_attr(hooks.sweep_engines[engine.value])(spec, index, policy)
	except DynamatchError as e:
		cell = (spec.values[index], policy.value, engine.value)
		log_error(str(e), f"Sweep cell {cell}")
		raise CellError(cell, e) from e


def run_sweep(spec: SweepSpec, jobs: int | None = None) -> SweepResult:
	"""
	Runs every cell of `spec`, in worker processes when `jobs` > 1. Rows come back in
	cell order whatever the parallelism.
	"""
	validate_sweep(spec)
	jobs = jobs or get_settings().jobs
	work = [(spec, cell) for cell in spec.cells()]
	logger("experiments").info(f"sweep over {spec.axis.value}: {len(work)} cells, {jobs} job(s)")

	if jobs > 1 and len(work) > 1:
		with Pool(processes=min(jobs, len(work))) as pool:
			rows = pool.map(_run_cell, work)
	else:
		rows = [_run_cell(job) for job in work]
	return SweepResult(spec, rows)


def relative_gap(value: float, reference: float) -> float:
	if reference == 0:
		return math.inf if value else 0.0
	return abs(value - reference) / abs(reference)
