# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

"""
Match attempts of the two policies. Both look for a compatible partner among the
admissible pool types, hard types before the easy type, and both mutate the pool:
matched pairs leave, a Greedy arrival without a partner joins, a Patient critical
agent without a partner perishes.
"""

from dataclasses import dataclass

import numpy as np

from dynamatch.market.params import TieBreak
from dynamatch.simulation.agents import AgentPool, AgentRecord
from dynamatch.simulation.sim_config import EdgeMode
from dynamatch.utils import throw


@dataclass(frozen=True)
class MatchedWith:
	partner: AgentRecord
	hard_candidates: int
	easy_candidates: int | None = None

	@property
	def partner_id(self) -> int:
		return self.partner.id

	@property
	def partner_type(self) -> int:
		return self.partner.type_index


@dataclass(frozen=True)
class JoinedPool:
	hard_candidates: int = 0
	easy_candidates: int | None = None


@dataclass(frozen=True)
class Perished:
	hard_candidates: int = 0
	easy_candidates: int | None = None


@dataclass(frozen=True)
class _Search:
	partner_id: int | None
	hard_candidates: int
	easy_candidates: int | None


def _pick_weighted(counts: list[int], rng: np.random.Generator) -> int:
	u = int(rng.integers(sum(counts)))
	for index, count in enumerate(counts):
		if u < count:
			return index
		u -= count
	raise AssertionError("weights exhausted")


def _pick_hard_index(counts: list[int], tie_break: TieBreak, rng: np.random.Generator) -> int:
	if tie_break == TieBreak.TYPE_UNIFORM:
		nonempty = [index for index, count in enumerate(counts) if count > 0]
		return nonempty[int(rng.integers(len(nonempty)))]
	return _pick_weighted(counts, rng)


def _available(pool: AgentPool, k: int, agent: AgentRecord) -> int:
	return pool.count(k) - (1 if agent.id in pool and agent.type_index == k else 0)


def _search_binomial(pool, agent, alpha, tie_break, rng) -> _Search:
	hard_types = pool.admissible_types(agent.type_index)[:-1]
	counts = [int(rng.binomial(_available(pool, k, agent), alpha)) for k in hard_types]
	if sum(counts) > 0:
		k = hard_types[_pick_hard_index(counts, tie_break, rng)]
		# the compatible subset is uniform given its size, so a uniform member is a uniform compatible one
		return _Search(pool.sample(k, rng, exclude=agent.id), sum(counts), None)

	easy = int(rng.binomial(_available(pool, 0, agent), alpha))
	partner = pool.sample(0, rng, exclude=agent.id) if easy > 0 else None
	return _Search(partner, 0, easy)


def _compatible_lists(pool, agent, alpha, rng, edge_mode) -> dict[int, list[int]]:
	compatible: dict[int, list[int]] = {}
	if edge_mode == EdgeMode.EXPLICIT_GRAPH:
		neighbours = sorted(pool.graph.neighbours(agent.id))
		for k in pool.admissible_types(agent.type_index):
			compatible[k] = [b for b in neighbours if b in pool and pool.get(b).type_index == k]
		return compatible

	for k in pool.admissible_types(agent.type_index):
		members = [b for b in pool.members(k) if b != agent.id]
		draws = rng.random(len(members)) < alpha
		compatible[k] = [b for b, hit in zip(members, draws) if hit]
	return compatible


def _search_lists(pool, agent, alpha, tie_break, rng, edge_mode) -> _Search:
	compatible = _compatible_lists(pool, agent, alpha, rng, edge_mode)
	hard_types = pool.admissible_types(agent.type_index)[:-1]
	counts = [len(compatible[k]) for k in hard_types]
	if sum(counts) > 0:
		chosen = compatible[hard_types[_pick_hard_index(counts, tie_break, rng)]]
		return _Search(chosen[int(rng.integers(len(chosen)))], sum(counts), len(compatible[0]))

	easy = compatible[0]
	partner = easy[int(rng.integers(len(easy)))] if easy else None
	return _Search(partner, 0, len(easy))


def find_partner(
	pool: AgentPool,
	agent: AgentRecord,
	alpha: float,
	tie_break: TieBreak,
	rng: np.random.Generator,
	edge_mode: EdgeMode = EdgeMode.LAZY,
) -> _Search:
	if edge_mode == EdgeMode.LAZY:
		return _search_binomial(pool, agent, alpha, tie_break, rng)
	if edge_mode == EdgeMode.EXPLICIT_GRAPH and pool.graph is None:
		throw("the explicit-graph mode needs a pool with a compatibility graph")
	return _search_lists(pool, agent, alpha, tie_break, rng, edge_mode)


def join_pool(
	pool: AgentPool,
	agent: AgentRecord,
	alpha: float,
	rng: np.random.Generator,
	edge_mode: EdgeMode = EdgeMode.LAZY,
) -> JoinedPool:
	if edge_mode == EdgeMode.EXPLICIT_GRAPH:
		pool.graph.connect(agent, pool, alpha, rng)
	pool.add(agent)
	return JoinedPool()


def greedy_match_attempt(
	pool: AgentPool,
	new_agent: AgentRecord,
	alpha: float,
	tie_break: TieBreak,
	rng: np.random.Generator,
	edge_mode: EdgeMode = EdgeMode.LAZY,
) -> MatchedWith | JoinedPool:
	if new_agent.id in pool:
		throw(f"arriving agent {new_agent.id} is already in the pool")
	if edge_mode == EdgeMode.EXPLICIT_GRAPH:
		pool.graph.connect(new_agent, pool, alpha, rng)

	search = find_partner(pool, new_agent, alpha, tie_break, rng, edge_mode)
	if search.partner_id is None:
		pool.add(new_agent)
		return JoinedPool(search.hard_candidates, search.easy_candidates)

	partner = pool.remove(search.partner_id)
	if pool.graph is not None:
		pool.graph.remove(new_agent.id)
	return MatchedWith(partner, search.hard_candidates, search.easy_candidates)


def patient_match_attempt(
	pool: AgentPool,
	critical_agent: AgentRecord,
	alpha: float,
	tie_break: TieBreak,
	rng: np.random.Generator,
	edge_mode: EdgeMode = EdgeMode.LAZY,
) -> MatchedWith | Perished:
	if critical_agent.id not in pool:
		throw(f"critical agent {critical_agent.id} is not in the pool")

	search = find_partner(pool, critical_agent, alpha, tie_break, rng, edge_mode)
	pool.remove(critical_agent.id)
	if search.partner_id is None:
		return Perished(search.hard_candidates, search.easy_candidates)

	partner = pool.remove(search.partner_id)
	return MatchedWith(partner, search.hard_candidates, search.easy_candidates)
