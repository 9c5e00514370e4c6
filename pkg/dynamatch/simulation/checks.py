# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

"""
Invariant checkers over finished or running simulations. Each returns a list of
violations, empty when the invariant holds.
"""

from dynamatch.market.params import Policy
from dynamatch.simulation.agents import AgentRecord, InPool, Matched
from dynamatch.simulation.engine import Simulator
from dynamatch.simulation.metrics import SimMetrics
from dynamatch.simulation.trace import TraceRecord


def check_conservation(metrics: SimMetrics) -> list[str]:
	return [
		f"type {k}: initial + arrivals - matched - perished - final = {gap}"
		for k, gap in enumerate(metrics.conservation_gaps())
		if gap != 0
	]


def check_hard_priority(trace: list[TraceRecord]) -> list[str]:
	"""No easy partner while a compatible hard partner was found at the same event."""
	return [
		f"t={record.time:.6g}: agent {record.agent_id} matched an easy partner with "
		f"{record.hard_candidates} compatible hard candidates"
		for record in trace
		if record.outcome == "matched" and record.partner_type == 0 and record.hard_candidates > 0
	]


def check_pool_independence(simulator: Simulator) -> list[str]:
	"""Under Greedy with explicit edges, no two waiting agents are compatible."""
	if simulator.config.policy != Policy.GREEDY or simulator.pool.graph is None:
		return []
	violations = []
	for agent in simulator.pool.agents():
		linked = sorted(b for b in simulator.pool.graph.neighbours(agent.id) if b in simulator.pool)
		if linked:
			violations.append(f"agent {agent.id} is compatible with waiting agents {linked}")
	return violations


def check_agent_records(departed: list[AgentRecord], end_time: float) -> list[str]:
	"""
	Timestamps within [arrival, end_time] and reciprocal match records. `end_time` is
	the clock at which the run stopped, whichever stop rule ended it.
	"""
	by_id = {agent.id: agent for agent in departed}
	violations = []
	for agent in departed:
		if isinstance(agent.outcome, InPool):
			violations.append(f"agent {agent.id} departed without an outcome")
			continue
		if not agent.arrival_time <= agent.outcome.time <= end_time:
			violations.append(f"agent {agent.id} departs at {agent.outcome.time} outside its lifetime")
		if agent.criticality_time is not None and agent.criticality_time <= agent.arrival_time:
			violations.append(f"agent {agent.id} turns critical before arriving")
		if isinstance(agent.outcome, Matched):
			partner = by_id.get(agent.outcome.partner_id)
			if partner is None or partner.outcome != Matched(agent.id, agent.outcome.time):
				violations.append(f"agent {agent.id} has no reciprocal match record")
	return violations
