# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import trapezoid

from dynamatch.config import get_settings
from dynamatch.market.params import LossReport, MarketParams, Policy, validate_params
from dynamatch.market.probability import q_pow
from dynamatch.ode.integrator import Trajectory
from dynamatch.utils import throw


class Regime(str, Enum):
	GREEDY_LINEAR = "greedy_linear"
	PATIENT_SUPERCRITICAL = "patient_supercritical"
	PATIENT_SUBCRITICAL = "patient_subcritical"
	PATIENT_CRITICAL = "patient_critical"


def lost_flow(policy: Policy, sizes, params: MarketParams) -> np.ndarray:
	"""
	Expected rate at which agents of each type perish at pool sizes `sizes`. Rows of a
	2-D array are evaluated independently.

	Greedy: every waiting agent perishes at its criticality. Patient: a critical agent
	perishes only when it has no admissible compatible agent in the pool.
	"""
	s = np.asarray(sizes, dtype=float)
	if Policy(policy) == Policy.GREEDY:
		return s.copy()

	s0 = s[..., :1]
	hard = s[..., 1:]
	easy = s0 * q_pow(s.sum(axis=-1, keepdims=True), params.alpha)
	return np.concatenate([easy, hard * q_pow(s0 + hard, params.alpha)], axis=-1)


def stationary_loss(policy: Policy, sizes: Sequence[float], params: MarketParams) -> LossReport:
	flow = lost_flow(policy, sizes, params)
	rates = params.arrival_rates()
	return LossReport(
		per_type=tuple(float(x) for x in flow / rates),
		total=math.fsum(flow) / params.m,
	)


def trajectory_loss(
	policy: Policy, trajectory: Trajectory, params: MarketParams, window: tuple[float, float] | None = None
) -> LossReport:
	"""
	Time-averaged loss over `window` (default: the last quarter of the trajectory, by
	the lab's warmup fraction), integrated with the trapezoidal rule over the samples.
	"""
	if window is None:
		t_end = float(trajectory.times[-1])
		window = (get_settings().warmup_fraction * t_end, t_end)
	times, states = trajectory.window(*window)
	if len(times) < 2 or times[-1] <= times[0]:
		throw(f"window {window} holds fewer than two trajectory samples")

	duration = times[-1] - times[0]
	flow = trapezoid(lost_flow(policy, states, params), times, axis=0) / duration
	rates = params.arrival_rates()
	return LossReport(
		per_type=tuple(float(x) for x in flow / rates),
		total=math.fsum(flow) / params.m,
	)


def loss_ode(policy: Policy, source, params: MarketParams, window: tuple[float, float] | None = None) -> LossReport:
	"""Loss at a stationary solution, at a bare size vector, or averaged over a trajectory window."""
	if isinstance(source, Trajectory):
		return trajectory_loss(policy, source, params, window)
	sizes = getattr(source, "sizes", source)
	return stationary_loss(policy, sizes, params)


def little_waiting_times(source, params: MarketParams) -> tuple[float, ...]:
	"""Mean waits by Little's Law: stationary size over the type's arrival rate."""
	sizes = np.asarray(getattr(source, "sizes", source), dtype=float)
	return tuple(float(w) for w in sizes / params.arrival_rates())


@dataclass(frozen=True)
class AsymptoticPrediction:
	"""
	Leading-order large-d behaviour. For Greedy, `exponent` is the power of 1/d in the
	loss; for Patient it is the rate c in a hard-type loss of order exp(-c*d).
	"""

	regime: Regime
	exponent: float
	easy_exponent: float | None
	predicted_sizes: tuple[float, ...] | None

	def predicted_loss_scale(self, d: float) -> float:
		if self.regime == Regime.GREEDY_LINEAR:
			return d ** -self.exponent
		return math.exp(-self.exponent * d)

	def to_dict(self) -> dict:
		return {
			"regime": self.regime.value,
			"exponent": self.exponent,
			"easy_exponent": self.easy_exponent,
			"predicted_sizes": (
				[None if math.isnan(s) else s for s in self.predicted_sizes] if self.predicted_sizes is not None else None
			),
		}


def patient_regime(params: MarketParams) -> Regime:
	load = params.p * params.lam
	if math.isclose(load, 0.5, rel_tol=1e-12, abs_tol=1e-12):
		return Regime.PATIENT_CRITICAL
	return Regime.PATIENT_SUPERCRITICAL if load > 0.5 else Regime.PATIENT_SUBCRITICAL


def asymptotic_prediction(policy: Policy, params: MarketParams) -> AsymptoticPrediction:
	validate_params(params)
	if Policy(policy) == Policy.GREEDY:
		return AsymptoticPrediction(Regime.GREEDY_LINEAR, 1.0, None, None)

	p, lam, m = params.p, params.lam, params.m
	regime = patient_regime(params)

	if regime == Regime.PATIENT_SUPERCRITICAL:
		exponent = 1 - 1 / (2 * p) - (p - 1) * lam
		sizes = ((1 - p * lam) * m,) + ((lam - 1 / (2 * p)) * m,) * p
	elif regime == Regime.PATIENT_SUBCRITICAL:
		exponent = 0.5
		load = 2 * p * lam
		hard = math.log(1 / (1 - load)) / (p * params.alpha) + math.log(1 - load) / (2 * p)
		sizes = (m / 2,) + (hard,) * p
	else:
		# logarithmic corrections at the boundary; only the easy size has a leading term
		exponent = 0.5
		sizes = (m / 2,) + (math.nan,) * p

	return AsymptoticPrediction(regime, exponent, 0.5, sizes)
