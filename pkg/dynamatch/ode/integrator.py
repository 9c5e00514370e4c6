# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

"""
Trajectory integration for the mean-field fields.

The default stepper is the embedded Dormand-Prince 5(4) pair from scipy, driven one
step at a time; negative iterates are projected back onto the nonnegative orthant.
A fixed-step classical RK4 stepper is kept for debugging.
"""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.integrate import RK45
from scipy.interpolate import CubicHermiteSpline

from dynamatch.config import get_settings
from dynamatch.exceptions import StepSizeUnderflow
from dynamatch.market.params import MarketParams, Policy, validate_params
from dynamatch.ode.fields import rhs_for
from dynamatch.utils import logger, throw

Method = Literal["rk45", "rk4"]

Field = Callable[[float, np.ndarray], np.ndarray]


@dataclass
class Trajectory:
	times: np.ndarray
	states: np.ndarray  # one row per sample time
	clip_events: list[float] = field(default_factory=list)
	steps: int = 0
	method: str = "rk45"
	policy: Policy | None = None

	def final(self) -> np.ndarray:
		return self.states[-1]

	def hard_spread(self) -> float:
		"""Largest gap between hard coordinates over the whole trajectory."""
		hard = self.states[:, 1:]
		if hard.shape[1] < 2:
			return 0.0
		return float(np.max(hard.max(axis=1) - hard.min(axis=1)))

	def window(self, t_start: float, t_end: float) -> tuple[np.ndarray, np.ndarray]:
		keep = (self.times >= t_start) & (self.times <= t_end)
		return self.times[keep], self.states[keep]


def _sample_times(t_eval: Sequence[float] | None, t_end: float) -> np.ndarray | None:
	if t_eval is None:
		return None
	times = np.asarray(t_eval, dtype=float)
	if np.any(np.diff(times) < 0):
		throw("sample times must be sorted")
	if len(times) and (times[0] < 0 or times[-1] > t_end):
		throw(f"sample times must lie in [0, {t_end}]")
	return times


def _clip(y: np.ndarray, t: float, clip_events: list[float], nonnegative: bool) -> bool:
	if not nonnegative or np.all(y >= 0):
		return False
	np.maximum(y, 0.0, out=y)
	clip_events.append(t)
	return True


def solve(
	fun: Field,
	y0,
	t_end: float,
	*,
	rtol: float,
	atol: float,
	t_eval: Sequence[float] | None = None,
	nonnegative: bool = True,
) -> Trajectory:
	"""
	Adaptive Dormand-Prince integration of dy/dt = fun(t, y) on [0, t_end].

	Without `t_eval` the trajectory holds every accepted step; otherwise it holds the
	dense-output values at the requested times.
	"""
	if not t_end > 0:
		throw(f"t_end must be positive, got {t_end}")
	samples = _sample_times(t_eval, t_end)
	y0 = np.array(y0, dtype=float)

	solver = RK45(fun, 0.0, y0, t_end, rtol=rtol, atol=atol)
	clip_events: list[float] = []
	times, states = [0.0], [y0.copy()]
	if samples is not None:
		times, states = list(samples[samples == 0.0]), [y0.copy() for _ in samples[samples == 0.0]]
	next_sample = len(times)
	steps = 0

	while solver.status == "running":
		message = solver.step()
		if solver.status == "failed":
			logger("ode").debug(f"integration stopped at t={solver.t}: {message}")
			raise StepSizeUnderflow(f"step size underflow at t = {solver.t:.6g}: {message}", solver.t, solver.h_abs)
		steps += 1

		if samples is None:
			times.append(solver.t)
			states.append(solver.y.copy())
		else:
			upto = np.searchsorted(samples, solver.t, side="right")
			if upto > next_sample:
				dense = solver.dense_output()
				for t in samples[next_sample:upto]:
					times.append(float(t))
					states.append(dense(t))
				next_sample = upto

		if _clip(solver.y, solver.t, clip_events, nonnegative):
			solver.f = solver.fun(solver.t, solver.y)
			if samples is None:
				states[-1] = solver.y.copy()

	if clip_events:
		logger("ode").debug(f"{len(clip_events)} negative iterates clipped to zero")
	return Trajectory(np.array(times), np.array(states), clip_events, steps, "rk45")


def solve_rk4(
	fun: Field,
	y0,
	t_end: float,
	*,
	step: float,
	t_eval: Sequence[float] | None = None,
	nonnegative: bool = True,
) -> Trajectory:
	"""Classical fixed-step RK4; sample times are read off a cubic Hermite interpolant."""
	if not t_end > 0 or not step > 0:
		throw(f"t_end and step must be positive, got {t_end} and {step}")
	samples = _sample_times(t_eval, t_end)

	n = max(1, math.ceil(t_end / step))
	nodes = np.linspace(0.0, t_end, n + 1)
	y = np.array(y0, dtype=float)
	states, slopes = [y.copy()], [fun(0.0, y)]
	clip_events: list[float] = []

	for t, t_next in zip(nodes[:-1], nodes[1:], strict=True):
		h = t_next - t
		k1 = slopes[-1]
		k2 = fun(t + 0.5 * h, y + 0.5 * h * k1)
		k3 = fun(t + 0.5 * h, y + 0.5 * h * k2)
		k4 = fun(t_next, y + h * k3)
		y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
		_clip(y, t_next, clip_events, nonnegative)
		states.append(y.copy())
		slopes.append(fun(t_next, y))

	states_arr = np.array(states)
	if samples is None:
		return Trajectory(nodes, states_arr, clip_events, n, "rk4")
	spline = CubicHermiteSpline(nodes, states_arr, np.array(slopes), axis=0)
	return Trajectory(samples, spline(samples), clip_events, n, "rk4")


def integrate(
	policy: Policy,
	initial,
	params: MarketParams,
	t_end: float,
	tol: float | None = None,
	t_eval: Sequence[float] | None = None,
	method: Method = "rk45",
	step: float = 1e-3,
) -> Trajectory:
	"""
	Integrates the mean-field field of `policy` from `initial`. The absolute tolerance
	scales with the arrival rate (tol*m) and the relative tolerance is tol.
	"""
	policy = Policy(policy)
	validate_params(params)
	initial = np.asarray(initial, dtype=float)
	if initial.shape != (params.p + 1,):
		throw(f"initial state needs {params.p + 1} entries, got {initial.shape}")
	if np.any(initial < 0) or not np.all(np.isfinite(initial)):
		throw(f"initial state must be finite and nonnegative, got {initial.tolist()}")

	tol = tol if tol is not None else get_settings().ode_tol
	rhs = rhs_for(policy)

	def fun(_t, y):
		return rhs(y, params)

	if method == "rk4":
		trajectory = solve_rk4(fun, initial, t_end, step=step, t_eval=t_eval)
	else:
		trajectory = solve(fun, initial, t_end, rtol=tol, atol=tol * params.m, t_eval=t_eval)
	trajectory.policy = policy
	logger("ode").debug(
		f"{policy.value} trajectory to t={t_end}: {trajectory.steps} steps, {len(trajectory.clip_events)} clips"
	)
	return trajectory
