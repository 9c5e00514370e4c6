# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

from dataclasses import dataclass, field

import numpy as np

from dynamatch.utils import throw


@dataclass(frozen=True)
class InPool:
	pass


@dataclass(frozen=True)
class Matched:
	partner_id: int
	time: float


@dataclass(frozen=True)
class PerishedAt:
	time: float


Outcome = InPool | Matched | PerishedAt


@dataclass(slots=True)
class AgentRecord:
	"""
	One agent. `criticality_time` is known from arrival under the calendar clock and
	filled in when the agent turns critical under the aggregate clock.
	"""

	id: int
	type_index: int
	arrival_time: float
	criticality_time: float | None = None
	outcome: Outcome = field(default_factory=InPool)
	initial: bool = False

	@property
	def departure_time(self) -> float | None:
		return None if isinstance(self.outcome, InPool) else self.outcome.time


class CompatibilityGraph:
	"""
	Persistent compatibility edges between admissible pairs, drawn once when an agent
	enters the pool. Only used as the explicit-graph validation mode.
	"""

	def __init__(self):
		self._adjacency: dict[int, set[int]] = {}

	def connect(self, agent: AgentRecord, pool: "AgentPool", alpha: float, rng: np.random.Generator) -> None:
		neighbours = self._adjacency.setdefault(agent.id, set())
		for k in pool.admissible_types(agent.type_index):
			members = pool.members(k)
			if not members:
				continue
			compatible = rng.random(len(members)) < alpha
			for other_id in np.asarray(members)[compatible]:
				other_id = int(other_id)
				if other_id == agent.id:
					continue
				neighbours.add(other_id)
				self._adjacency.setdefault(other_id, set()).add(agent.id)

	def add_isolated(self, agent_id: int) -> None:
		self._adjacency.setdefault(agent_id, set())

	def neighbours(self, agent_id: int) -> set[int]:
		return self._adjacency.get(agent_id, set())

	def remove(self, agent_id: int) -> None:
		for other_id in self._adjacency.pop(agent_id, set()):
			self._adjacency.get(other_id, set()).discard(agent_id)

	def edge_count(self) -> int:
		return sum(len(v) for v in self._adjacency.values()) // 2


class AgentPool:
	"""
	Agents currently waiting, kept per type with O(1) insertion, removal and uniform
	sampling (swap-with-last removal over per-type id lists).
	"""

	def __init__(self, p: int, graph: CompatibilityGraph | None = None):
		self.p = p
		self.graph = graph
		self._members: list[list[int]] = [[] for _ in range(p + 1)]
		self._position: dict[int, int] = {}
		self._agents: dict[int, AgentRecord] = {}

	def __contains__(self, agent_id: int) -> bool:
		return agent_id in self._agents

	def __len__(self) -> int:
		return len(self._agents)

	def add(self, agent: AgentRecord) -> None:
		if agent.id in self._agents:
			throw(f"agent {agent.id} is already in the pool")
		members = self._members[agent.type_index]
		self._position[agent.id] = len(members)
		members.append(agent.id)
		self._agents[agent.id] = agent

	def remove(self, agent_id: int) -> AgentRecord:
		agent = self._agents.pop(agent_id)
		members = self._members[agent.type_index]
		index = self._position.pop(agent_id)
		last = members.pop()
		if last != agent_id:
			members[index] = last
			self._position[last] = index
		if self.graph is not None:
			self.graph.remove(agent_id)
		return agent

	def get(self, agent_id: int) -> AgentRecord:
		return self._agents[agent_id]

	def members(self, k: int) -> list[int]:
		return self._members[k]

	def count(self, k: int) -> int:
		return len(self._members[k])

	def sizes(self) -> tuple[int, ...]:
		return tuple(len(members) for members in self._members)

	def agents(self) -> list[AgentRecord]:
		return list(self._agents.values())

	def admissible_types(self, k: int) -> list[int]:
		"""Pool types an agent of type k can be compatible with, hard types first."""
		hard = list(range(1, self.p + 1)) if k == 0 else [k]
		return [*hard, 0]

	def sample(self, k: int, rng: np.random.Generator, exclude: int | None = None) -> int:
		"""A uniform member of type k, skipping `exclude` when it belongs to that type."""
		members = self._members[k]
		n = len(members)
		if exclude in self._agents and self._agents[exclude].type_index == k:
			index = int(rng.integers(n - 1))
			return members[n - 1] if members[index] == exclude else members[index]
		return members[int(rng.integers(n))]

	def sample_any(self, rng: np.random.Generator) -> int:
		"""A member chosen uniformly over the whole pool."""
		position = int(rng.integers(len(self._agents)))
		for members in self._members:
			if position < len(members):
				return members[position]
			position -= len(members)
		raise AssertionError("pool size bookkeeping out of sync")
