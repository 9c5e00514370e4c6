# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

"""
Stationary points of the symmetric mean-field fields.

Both solvers eliminate s0 with one stationary equation, which leaves two curves
s0 = f(s1) and s0 = g(s1) in the plane. Their intersections are bracketed on a
log-spaced grid, bisected with brentq and then polished on the 2-D field with a
Powell-hybrid Newton step using the analytic Jacobian.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, root

from dynamatch.config import get_settings
from dynamatch.exceptions import BracketingError
from dynamatch.market.params import LossReport, MarketParams, Policy, PoolState, validate_params
from dynamatch.market.probability import one_minus_q_pow, q_pow
from dynamatch.ode.evaluation import asymptotic_prediction, little_waiting_times, stationary_loss
from dynamatch.ode.fields import rhs_for, symmetric_jacobian, symmetric_rhs
from dynamatch.utils import log_error, logger

GRID_POINTS = 400
# how close the Patient scan creeps up to the domain bound, as powers of ten
GUARD_DIGITS = 12


@dataclass(frozen=True)
class StationarySolution:
	policy: Policy
	params: MarketParams
	sizes: tuple[float, ...]
	residual: float
	loss: LossReport
	waits: tuple[float, ...]
	candidates: tuple[tuple[float, ...], ...] = ()
	multiple_roots: bool = False
	converged: bool = True

	def state(self) -> PoolState:
		return PoolState.of(self.sizes)

	def to_dict(self) -> dict:
		return {
			"policy": self.policy.value,
			"params": self.params.model_dump(by_alias=True),
			"sizes": list(self.sizes),
			"residual": self.residual,
			"converged": self.converged,
			"loss": self.loss.to_dict(),
			"waits": list(self.waits),
			"regime": asymptotic_prediction(self.policy, self.params).to_dict(),
			"multiple_roots": self.multiple_roots,
			"candidates": [list(c) for c in self.candidates],
		}


def full_residual(policy: Policy, sizes, params: MarketParams) -> float:
	"""Max-norm of the full p+1 dimensional field at `sizes`."""
	return float(np.max(np.abs(rhs_for(policy)(np.asarray(sizes, dtype=float), params))))


def _rates(params: MarketParams) -> tuple[float, float]:
	return params.easy_share * params.m, params.lam * params.m


def greedy_curves(s1, params: MarketParams) -> tuple[np.ndarray, np.ndarray]:
	"""
	(f, g) for Greedy. g solves the hard-type balance for s0; f is the easy-type
	balance with q^s0 taken from the hard-type balance.
	"""
	s1 = np.asarray(s1, dtype=float)
	easy_rate, hard_rate = _rates(params)
	p, alpha = params.p, params.alpha
	v = q_pow(s1, alpha)

	supply = hard_rate * one_minus_q_pow(s1, alpha) + easy_rate * one_minus_q_pow(p * s1, alpha) / p + s1
	g = np.log(supply / (hard_rate * v)) / math.log1p(-alpha)
	f = (
		2 * easy_rate * q_pow((p - 1) * s1, alpha) * supply / hard_rate
		- easy_rate * q_pow(p * s1, alpha)
		- hard_rate * p * v
		+ p * supply
	)
	return f, g


def patient_curves(s1, params: MarketParams) -> tuple[np.ndarray, np.ndarray]:
	"""
	(f, g) for Patient. f solves the hard-type balance for s0; g is the easy-type
	balance with s0 = f substituted in, +inf where its logarithm is undefined.
	"""
	s1 = np.asarray(s1, dtype=float)
	easy_rate, hard_rate = _rates(params)
	p, alpha = params.p, params.alpha
	f = p * (hard_rate - s1 * (1 + one_minus_q_pow(s1, alpha))) / one_minus_q_pow(p * s1, alpha)
	inner = _patient_log_argument(s1, f, params)
	with np.errstate(divide="ignore", invalid="ignore"):
		g = np.where(inner > 0, np.log(np.maximum(inner, 1e-300)) / math.log1p(-alpha), np.inf)
	return f, g


def _patient_log_argument(s1, f, params: MarketParams):
	easy_rate, _ = _rates(params)
	p, alpha = params.p, params.alpha
	return 1 + (f - easy_rate) / (p * s1 * q_pow(s1, alpha) + f * q_pow(p * s1, alpha))


def patient_domain_bound(params: MarketParams) -> tuple[float, float]:
	"""
	(s*, s**): s* is where f turns negative, s** the first point below s* where the
	logarithm in g stops being defined (inf if it never does).
	"""
	_, hard_rate = _rates(params)
	alpha = params.alpha
	s_star = brentq(lambda s: s * (1 + one_minus_q_pow(s, alpha)) - hard_rate, 0.0, hard_rate)

	grid = _approach_grid(s_star)
	inner = _patient_log_argument(grid, patient_curves(grid, params)[0], params)
	below = np.flatnonzero(inner <= 0)
	if len(below) == 0:
		return s_star, math.inf
	i = below[0]
	if i == 0:
		return s_star, float(grid[0])

	def argument(s):
		return float(_patient_log_argument(s, patient_curves(s, params)[0], params))

	return s_star, brentq(argument, grid[i - 1], grid[i])


def _approach_grid(bound: float) -> np.ndarray:
	"""Log grid on (0, bound) that also creeps geometrically up to `bound`."""
	body = np.geomspace(bound * 1e-9, bound * 0.9, GRID_POINTS)
	tail = bound * (1 - 10.0 ** -np.arange(2, GUARD_DIGITS + 1))
	return np.unique(np.concatenate([body, tail]))


def _sign_changes(h: np.ndarray) -> np.ndarray:
	finite = np.isfinite(h)
	s = np.sign(h)
	return np.flatnonzero(finite[:-1] & finite[1:] & (s[:-1] * s[1:] < 0))


def _polish(policy: Policy, s0: float, s1: float, params: MarketParams) -> tuple[float, float]:
	result = root(
		lambda x: symmetric_rhs(policy, x[0], x[1], params),
		np.array([s0, s1]),
		jac=lambda x: symmetric_jacobian(policy, x[0], x[1], params),
		method="hybr",
		options={"xtol": 1e-15},
	)
	return float(result.x[0]), float(result.x[1])


def _best_point(policy: Policy, s0: float, s1: float, params: MarketParams) -> tuple[tuple[float, ...], float]:
	"""The bracketed point or its polished version, whichever leaves the smaller residual."""
	p = params.p
	raw = (s0,) + (s1,) * p
	best, best_residual = raw, full_residual(policy, raw, params)

	polished_s0, polished_s1 = _polish(policy, s0, s1, params)
	if polished_s0 > 0 and polished_s1 > 0:
		polished = (polished_s0,) + (polished_s1,) * p
		residual = full_residual(policy, polished, params)
		if residual < best_residual:
			best, best_residual = polished, residual
	return best, best_residual


def _solve(policy: Policy, params: MarketParams, tol: float | None, grid: np.ndarray, curves, s0_of) -> StationarySolution:
	validate_params(params)
	tol = tol if tol is not None else get_settings().stationary_tol

	f, g = curves(grid, params)
	h = f - g
	changes = _sign_changes(h)
	if len(changes) == 0:
		log_error(f"no sign change of f - g for {policy.value} at {params.model_dump()}", "Stationary Solver")
		raise BracketingError(f"{policy.value}: f and g do not cross", (float(grid[0]), float(grid[-1])))

	def difference(s):
		f_s, g_s = curves(s, params)
		return float(f_s - g_s)

	candidates = []
	for i in changes:
		s1 = brentq(difference, grid[i], grid[i + 1], xtol=1e-12 * params.m)
		s0 = float(s0_of(s1, params))
		if s0 <= 0:
			continue
		candidates.append(_best_point(policy, s0, s1, params))

	if not candidates:
		raise BracketingError(f"{policy.value}: every crossing has a nonpositive easy-type size", (float(grid[0]), float(grid[-1])))

	candidates.sort(key=lambda c: c[1])
	sizes, residual = candidates[0]
	converged = residual < tol * max(1.0, params.m)
	if not converged:
		log_error(f"{policy.value} stationary residual {residual:.3g} above tolerance", "Stationary Solver")
	if len(candidates) > 1:
		logger("ode").info(f"{policy.value}: {len(candidates)} stationary candidates found")

	return StationarySolution(
		policy=policy,
		params=params,
		sizes=sizes,
		residual=residual,
		loss=stationary_loss(policy, sizes, params),
		waits=little_waiting_times(sizes, params),
		candidates=tuple(c[0] for c in candidates),
		multiple_roots=len(candidates) > 1,
		converged=converged,
	)


def stationary_greedy(params: MarketParams, tol: float | None = None) -> StationarySolution:
	grid = np.geomspace(1e-6 * params.m, params.m, GRID_POINTS)
	return _solve(Policy.GREEDY, params, tol, grid, greedy_curves, lambda s1, pr: greedy_curves(s1, pr)[1])


def stationary_patient(params: MarketParams, tol: float | None = None) -> StationarySolution:
	validate_params(params)
	s_star, s_star_star = patient_domain_bound(params)
	grid = _approach_grid(min(s_star, s_star_star))
	return _solve(Policy.PATIENT, params, tol, grid, patient_curves, lambda s1, pr: patient_curves(s1, pr)[0])
