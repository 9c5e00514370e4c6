# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

"""
The market studies built on sweeps: the Patient/Greedy loss ratio, the e^{d/2}
scaling of the easy-type Patient loss, the phase transition in the hard-type loss,
the waiting-time laws and discrete-versus-mean-field coherence.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from dynamatch.experiments.sweep import Axis, Engine, SweepResult, SweepSpec, relative_gap, run_sweep
from dynamatch.market.params import MarketParams, Policy
from dynamatch.simulation.sim_config import StopRule

PLATEAU_RATIO = 2.0


def _sweep(
	base: MarketParams,
	axis: Axis,
	values: Sequence[float],
	policies: Sequence[Policy],
	engine: Engine,
	replications: int,
	seed: int,
	jobs: int | None,
	stop: StopRule | None = None,
) -> SweepResult:
	spec = SweepSpec(
		base=base,
		axis=axis,
		values=tuple(float(v) for v in values),
		policies=tuple(policies),
		engines=(engine,),
		replications=replications,
		seed=seed,
		stop=stop,
	)
	return run_sweep(spec, jobs)


def _plateau(values: Sequence[float]) -> tuple[bool, float]:
	values = np.asarray(values, dtype=float)
	if len(values) < 2:
		return True, 1.0
	if np.any(values <= 0):
		return False, math.inf
	ratio = float(values.max() / values.min())
	return ratio <= PLATEAU_RATIO, ratio


@dataclass
class ScalingTable:
	policy: Policy
	d_values: tuple[float, ...]
	easy_losses: tuple[float, ...]
	rescaled: tuple[float, ...]
	plateau: bool
	spread: float

	def to_dict(self) -> dict:
		return {
			"policy": self.policy.value,
			"d": list(self.d_values),
			"easy_loss": list(self.easy_losses),
			"rescaled_easy_loss": list(self.rescaled),
			"plateau": self.plateau,
			"max_over_min": self.spread,
		}


def scaling_check(
	base: MarketParams,
	d_values: Sequence[float],
	policy: Policy = Policy.PATIENT,
	engine: Engine = Engine.ODE,
	replications: int = 20,
	seed: int = 1,
	jobs: int | None = None,
) -> ScalingTable:
	"""e^{d/2} times the easy-type loss over `d_values`, flagged as a plateau when max/min <= 2."""
	result = _sweep(base, Axis.DENSITY, d_values, (policy,), engine, replications, seed, jobs)
	rows = result.series(policy, engine)
	easy = tuple(row.loss.per_type[0] for row in rows)
	rescaled = tuple(math.exp(row.axis_value / 2) * loss for row, loss in zip(rows, easy, strict=True))
	plateau, spread = _plateau(rescaled)
	return ScalingTable(policy, tuple(row.axis_value for row in rows), easy, rescaled, plateau, spread)


@dataclass
class RatioCurve:
	d_values: tuple[float, ...]
	ratios: tuple[float, ...]
	standard_errors: tuple[float, ...]
	monotone: bool
	first_violation: tuple[float, float] | None = None

	def to_dict(self) -> dict:
		return {
			"d": list(self.d_values),
			"patient_over_greedy": list(self.ratios),
			"standard_errors": list(self.standard_errors),
			"monotone_decreasing": self.monotone,
			"first_violation": list(self.first_violation) if self.first_violation else None,
		}


def _ratio_error(patient, greedy) -> float:
	"""Delta-method standard error of patient.total / greedy.total (zero for mean-field rows)."""
	if patient.total_standard_error is None or greedy.total_standard_error is None:
		return 0.0
	ratio = patient.total / greedy.total
	return abs(ratio) * math.hypot(
		patient.total_standard_error / patient.total if patient.total else 0.0,
		greedy.total_standard_error / greedy.total,
	)


def ratio_curve(
	base: MarketParams,
	d_values: Sequence[float],
	engine: Engine = Engine.ODE,
	replications: int = 30,
	seed: int = 1,
	bands: float = 2.0,
	jobs: int | None = None,
) -> RatioCurve:
	"""
	Patient total loss over Greedy total loss per density. Mean-field curves must fall
	strictly; discrete curves may rise by at most `bands` combined standard errors.
	"""
	result = _sweep(base, Axis.DENSITY, d_values, tuple(Policy), engine, replications, seed, jobs)
	greedy = result.series(Policy.GREEDY, engine)
	patient = result.series(Policy.PATIENT, engine)
	ratios = tuple(p.loss.total / g.loss.total for p, g in zip(patient, greedy, strict=True))
	errors = tuple(_ratio_error(p.loss, g.loss) for p, g in zip(patient, greedy, strict=True))
	d = tuple(row.axis_value for row in greedy)

	for i in range(len(ratios) - 1):
		allowed = bands * math.hypot(errors[i], errors[i + 1])
		rise = ratios[i + 1] - ratios[i]
		if rise > allowed or (allowed == 0 and rise >= 0):
			return RatioCurve(d, ratios, errors, False, (d[i], d[i + 1]))
	return RatioCurve(d, ratios, errors, True)


@dataclass
class PhaseTransitionWitness:
	lambda_low: float
	lambda_high: float
	hard_losses: tuple[float, float]
	easy_losses: tuple[float, float]
	hard_ratio: float
	easy_ratio: float
	hard_factor: float
	hard_jump: bool
	easy_stable: bool

	@property
	def passed(self) -> bool:
		return self.hard_jump and self.easy_stable

	def to_dict(self) -> dict:
		return {
			"lambda": [self.lambda_low, self.lambda_high],
			"hard_loss": list(self.hard_losses),
			"easy_loss": list(self.easy_losses),
			"hard_ratio": self.hard_ratio,
			"hard_factor": self.hard_factor,
			"easy_ratio": self.easy_ratio,
			"hard_jump": self.hard_jump,
			"easy_stable": self.easy_stable,
			"passed": self.passed,
		}


def phase_transition_witness(
	base: MarketParams,
	lambda_low: float = 0.15,
	lambda_high: float = 0.35,
	engine: Engine = Engine.ODE,
	hard_factor: float = 5.0,
	easy_band: tuple[float, float] = (0.5, 2.0),
	replications: int = 20,
	seed: int = 1,
	jobs: int | None = None,
) -> PhaseTransitionWitness:
	"""
	Compares the Patient losses on both sides of lambda*p = 1/2: the hard-type loss
	should grow by at least `hard_factor` while the easy-type loss stays in `easy_band`.
	"""
	result = _sweep(
		base, Axis.LAMBDA, (lambda_low, lambda_high), (Policy.PATIENT,), engine, replications, seed, jobs
	)
	low, high = result.series(Policy.PATIENT, engine)
	hard = (float(np.mean(low.loss.per_type[1:])), float(np.mean(high.loss.per_type[1:])))
	easy = (low.loss.per_type[0], high.loss.per_type[0])
	hard_ratio = hard[1] / hard[0] if hard[0] else math.inf
	easy_ratio = easy[1] / easy[0] if easy[0] else math.inf
	return PhaseTransitionWitness(
		lambda_low,
		lambda_high,
		hard,
		easy,
		hard_ratio,
		easy_ratio,
		hard_factor,
		hard_jump=hard_ratio >= hard_factor,
		easy_stable=easy_band[0] <= easy_ratio <= easy_band[1],
	)


@dataclass
class WaitingLawTable:
	policy: Policy
	d_values: tuple[float, ...]
	waits: tuple[tuple[float, ...], ...]
	# Greedy: d * wait per type; Patient: the easy-type wait itself
	checked: tuple[tuple[float, ...], ...]
	plateau: bool
	spreads: tuple[float, ...]
	# Patient only: every easy-type wait inside `band`
	in_band: bool | None = None
	band: tuple[float, float] | None = None

	@property
	def passed(self) -> bool:
		return self.plateau and self.in_band is not False

	def to_dict(self) -> dict:
		return {
			"policy": self.policy.value,
			"d": list(self.d_values),
			"waits": [list(w) for w in self.waits],
			"checked": [list(c) for c in self.checked],
			"plateau": self.plateau,
			"max_over_min": list(self.spreads),
			"band": list(self.band) if self.band else None,
			"in_band": self.in_band,
			"passed": self.passed,
		}


def waiting_law_check(
	base: MarketParams,
	d_values: Sequence[float],
	policy: Policy = Policy.GREEDY,
	engine: Engine = Engine.ODE,
	replications: int = 20,
	seed: int = 1,
	jobs: int | None = None,
	band: tuple[float, float] = (0.5, 1.5),
	stop: StopRule | None = None,
) -> WaitingLawTable:
	"""
	Greedy waits fall like 1/d, so d*wait should plateau for every type. The Patient
	easy-type wait stays of order one: it must plateau and lie inside `band` at every d.
	"""
	result = _sweep(base, Axis.DENSITY, d_values, (policy,), engine, replications, seed, jobs, stop)
	rows = result.series(policy, engine)
	waits = tuple(row.waits for row in rows)
	if policy == Policy.GREEDY:
		checked = tuple(tuple(row.axis_value * w for w in row.waits) for row in rows)
	else:
		checked = tuple((row.waits[0],) for row in rows)

	columns = list(zip(*checked, strict=True))
	verdicts = [_plateau(column) for column in columns]
	in_band = None
	if policy == Policy.PATIENT:
		in_band = all(band[0] <= wait[0] <= band[1] for wait in checked)
	return WaitingLawTable(
		policy,
		tuple(row.axis_value for row in rows),
		waits,
		checked,
		all(ok for ok, _ in verdicts),
		tuple(spread for _, spread in verdicts),
		in_band=in_band,
		band=band if policy == Policy.PATIENT else None,
	)


@dataclass
class CoherenceVerdict:
	axis_value: float
	policy: Policy
	d: float
	discrete: tuple[float, ...]
	ode: tuple[float, ...]
	standard_errors: tuple[float, ...]
	exempt: bool
	per_type: tuple[bool, ...] = field(default=())

	@property
	def passed(self) -> bool:
		return self.exempt or all(self.per_type)

	def to_dict(self) -> dict:
		return {
			"axis_value": self.axis_value,
			"policy": self.policy.value,
			"d": self.d,
			"discrete_loss": list(self.discrete),
			"ode_loss": list(self.ode),
			"standard_errors": list(self.standard_errors),
			"exempt": self.exempt,
			"per_type": list(self.per_type),
			"passed": self.passed,
		}


def engine_coherence(
	result: SweepResult, min_d: float = 4.0, relative: float = 0.10, bands: float = 3.0
) -> list[CoherenceVerdict]:
	"""
	Per cell run by both engines: each per-type discrete loss must lie within
	max(`relative` * ODE value, `bands` standard errors) of the ODE loss. Cells below
	`min_d` are reported but exempt.
	"""
	verdicts = []
	if not {Engine.DISCRETE, Engine.ODE} <= set(result.spec.engines):
		return verdicts
	for value in result.spec.values:
		for policy in result.spec.policies:
			discrete = result.row(value, policy, Engine.DISCRETE)
			ode = result.row(value, policy, Engine.ODE)
			errors = discrete.loss.standard_errors or (0.0,) * len(discrete.loss.per_type)
			per_type = tuple(
				abs(x - y) <= max(relative * abs(y), bands * se)
				for x, y, se in zip(discrete.loss.per_type, ode.loss.per_type, errors, strict=True)
			)
			verdicts.append(
				CoherenceVerdict(
					axis_value=value,
					policy=policy,
					d=discrete.params.d,
					discrete=discrete.loss.per_type,
					ode=ode.loss.per_type,
					standard_errors=tuple(errors),
					exempt=discrete.params.d < min_d,
					per_type=per_type,
				)
			)
	return verdicts


def max_relative_gap(verdicts: Sequence[CoherenceVerdict]) -> float:
	gaps = [
		relative_gap(x, y) for v in verdicts if not v.exempt for x, y in zip(v.discrete, v.ode, strict=True)
	]
	return max(gaps, default=0.0)
