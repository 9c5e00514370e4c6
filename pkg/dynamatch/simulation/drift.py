# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

import numpy as np

from dynamatch.market.oracle import NO_PARTNER, draw_partner_types
from dynamatch.market.params import MarketParams, Policy, PoolState, TieBreak
from dynamatch.utils import throw


def one_event_drift(
	policy: Policy,
	sizes,
	params: MarketParams,
	restarts: int,
	rng: np.random.Generator,
	tie_break: TieBreak = TieBreak.TYPE_UNIFORM,
) -> tuple[np.ndarray, np.ndarray]:
	"""
	Monte-Carlo estimate of E[dS]/dt at an integer pool state: restart the chain at
	`sizes` `restarts` times, run one event, and scale the mean jump by the total event
	rate m + |S|. Returns the estimate and its standard errors.
	"""
	state = PoolState.of(sizes)
	counts = state.as_array()
	if not np.all(counts == np.round(counts)):
		throw(f"one-event restarts need integer pool sizes, got {state.sizes}")

	p = params.p
	rate = params.m + state.total()
	jumps = np.zeros((restarts, p + 1))

	# event kind per restart: 0..p arrival of that type, p+1+k criticality of a type-k agent
	arrival_weights = params.arrival_rates()
	weights = np.concatenate([arrival_weights, counts]) / rate
	kinds = rng.choice(2 * (p + 1), size=restarts, p=weights)

	for kind in range(2 * (p + 1)):
		rows = np.flatnonzero(kinds == kind)
		if len(rows) == 0:
			continue
		k = kind % (p + 1)
		arrival = kind <= p

		if policy == Policy.GREEDY and not arrival:
			jumps[rows, k] -= 1
			continue
		if policy == Policy.PATIENT and arrival:
			jumps[rows, k] += 1
			continue

		pool = counts.copy()
		if not arrival:
			pool[k] -= 1
			jumps[rows, k] -= 1
		partner = draw_partner_types(PoolState.of(pool), k, params.alpha, len(rows), tie_break, rng)
		matched = partner != NO_PARTNER
		np.subtract.at(jumps, (rows[matched], partner[matched]), 1)
		if arrival:
			jumps[rows[~matched], k] += 1

	drift = rate * jumps.mean(axis=0)
	errors = rate * jumps.std(axis=0, ddof=1) / np.sqrt(restarts)
	return drift, errors
