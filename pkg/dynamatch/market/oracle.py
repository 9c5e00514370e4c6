# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

"""
Monte-Carlo edge-draw oracle. Each draw samples the compatible count of every
admissible pool type (a Binomial(n, alpha) count is the same law as n Bernoulli
edges), then applies the hard-first, tie-broken selection rule.
"""

import numpy as np

from dynamatch.market.params import PoolState, TieBreak
from dynamatch.utils import throw

NO_PARTNER = -1


def _integer_counts(state: PoolState) -> np.ndarray:
	counts = state.as_array()
	if not np.all(counts == np.round(counts)):
		throw(f"the edge-draw oracle needs integer pool sizes, got {state.sizes}")
	return counts.astype(np.int64)


def draw_partner_types(
	state: PoolState,
	k: int,
	alpha: float,
	draws: int,
	tie_break: TieBreak,
	rng: np.random.Generator,
) -> np.ndarray:
	"""Partner type for each of `draws` independent edge draws, NO_PARTNER when unmatched."""
	if not 0 <= k <= state.p:
		throw(f"type index k={k} out of range 0..{state.p}")
	counts = _integer_counts(state)

	hard_types = np.arange(1, state.p + 1) if k == 0 else np.array([k])
	compatible = rng.binomial(counts[hard_types], alpha, size=(draws, len(hard_types)))
	has_hard = compatible.sum(axis=1) > 0

	if tie_break == TieBreak.TYPE_UNIFORM:
		keys = np.where(compatible > 0, rng.random(compatible.shape), -1.0)
		choice = keys.argmax(axis=1)
	else:
		cumulative = compatible.cumsum(axis=1)
		u = rng.random(draws) * cumulative[:, -1]
		choice = (cumulative > u[:, None]).argmax(axis=1)

	partner = np.full(draws, NO_PARTNER)
	partner[has_hard] = hard_types[choice[has_hard]]

	easy_compatible = rng.binomial(counts[0], alpha, size=draws)
	partner[~has_hard & (easy_compatible > 0)] = 0
	return partner


def estimate_match_probs(
	state: PoolState,
	k: int,
	alpha: float,
	draws: int,
	tie_break: TieBreak = TieBreak.TYPE_UNIFORM,
	rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, np.ndarray]:
	"""Estimates of pi(k, k') for every k' with their binomial standard errors."""
	rng = rng or np.random.default_rng()
	partner = draw_partner_types(state, k, alpha, draws, tie_break, rng)
	estimates = np.bincount(partner[partner != NO_PARTNER], minlength=state.p + 1) / draws
	return estimates, np.sqrt(estimates * (1 - estimates) / draws)


def estimate_perish_prob(
	state: PoolState,
	k: int,
	alpha: float,
	draws: int,
	rng: np.random.Generator | None = None,
) -> tuple[float, float]:
	rng = rng or np.random.default_rng()
	partner = draw_partner_types(state, k, alpha, draws, TieBreak.TYPE_UNIFORM, rng)
	estimate = float(np.mean(partner == NO_PARTNER))
	return estimate, float(np.sqrt(estimate * (1 - estimate) / draws))
