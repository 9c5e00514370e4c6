# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

"""
Mean-field vector fields for the expected pool sizes, for general p and reduced to
the symmetric plane (s0, s1, ..., s1).
"""

import math

import numpy as np

from dynamatch import hooks
from dynamatch.market.params import MarketParams, Policy
from dynamatch.market.probability import one_minus_q_pow, pi_matrix, q_pow
from dynamatch.utils import get_attr


def greedy_rhs(state, params: MarketParams) -> np.ndarray:
	s = np.maximum(np.asarray(state, dtype=float), 0.0)
	pi = pi_matrix(s, params.alpha)
	easy_rate = params.easy_share * params.m
	hard_rate = params.lam * params.m

	ds = np.empty_like(s)
	ds[0] = (
		easy_rate * q_pow(s.sum(), params.alpha)
		- easy_rate * pi[0, 0]
		- hard_rate * pi[1:, 0].sum()
		- s[0]
	)
	hard = np.arange(1, params.p + 1)
	ds[1:] = (
		-easy_rate * pi[0, 1:]
		- hard_rate * pi[hard, hard]
		+ hard_rate * (1.0 - pi[hard, 0] - pi[hard, hard])
		- s[1:]
	)
	return ds


def patient_rhs(state, params: MarketParams) -> np.ndarray:
	s = np.maximum(np.asarray(state, dtype=float), 0.0)
	pi = pi_matrix(s, params.alpha)
	hard = np.arange(1, params.p + 1)

	ds = np.empty_like(s)
	ds[0] = params.easy_share * params.m - s @ pi[:, 0] - s[0]
	ds[1:] = params.lam * params.m - s[0] * pi[0, 1:] - s[1:] * pi[hard, hard] - s[1:]
	return ds


def rhs_for(policy: Policy):
	"""The registered full-p field for `policy`."""
	return get_attr(hooks.ode_fields[Policy(policy).value])


def _powers(s0: float, s1: float, params: MarketParams) -> dict[str, float]:
	alpha, p = params.alpha, params.p
	return {
		"Q0": q_pow(s0, alpha),
		"R0": one_minus_q_pow(s0, alpha),
		"v": q_pow(s1, alpha),
		"r": one_minus_q_pow(s1, alpha),
		"V": q_pow(p * s1, alpha),
		"RV": one_minus_q_pow(p * s1, alpha),
	}


def symmetric_rhs(policy: Policy, s0: float, s1: float, params: MarketParams) -> tuple[float, float]:
	"""The field on symmetric states, as (ds0/dt, ds1/dt) with ds1 common to every hard type."""
	s0, s1 = max(s0, 0.0), max(s1, 0.0)
	x = _powers(s0, s1, params)
	p = params.p
	easy_rate = params.easy_share * params.m
	hard_rate = params.lam * params.m

	if policy == Policy.GREEDY:
		ds0 = easy_rate * x["V"] * (x["Q0"] - x["R0"]) - hard_rate * p * x["R0"] * x["v"] - s0
		ds1 = -easy_rate * x["RV"] / p - hard_rate * x["r"] + hard_rate * x["Q0"] * x["v"] - s1
	else:
		ds0 = easy_rate - s0 * x["R0"] * x["V"] - p * s1 * x["R0"] * x["v"] - s0
		ds1 = hard_rate - s0 * x["RV"] / p - s1 * x["r"] - s1
	return ds0, ds1


def symmetric_jacobian(policy: Policy, s0: float, s1: float, params: MarketParams) -> np.ndarray:
	"""Analytic Jacobian of `symmetric_rhs` with respect to (s0, s1)."""
	x = _powers(s0, s1, params)
	p = params.p
	a = math.log1p(-params.alpha)
	easy_rate = params.easy_share * params.m
	hard_rate = params.lam * params.m
	Q0, R0, v, r, V = x["Q0"], x["R0"], x["v"], x["r"], x["V"]

	if policy == Policy.GREEDY:
		return np.array(
			[
				[
					2 * easy_rate * V * a * Q0 + hard_rate * p * v * a * Q0 - 1,
					easy_rate * (Q0 - R0) * p * a * V - hard_rate * p * R0 * a * v,
				],
				[
					hard_rate * a * Q0 * v,
					easy_rate * a * V + hard_rate * a * v + hard_rate * Q0 * a * v - 1,
				],
			]
		)
	return np.array(
		[
			[
				-R0 * V + s0 * a * Q0 * V + p * s1 * a * Q0 * v - 1,
				-s0 * R0 * p * a * V - p * R0 * v - p * s1 * R0 * a * v,
			],
			[
				-x["RV"] / p,
				s0 * a * V - r + s1 * a * v - 1,
			],
		]
	)
