from dynamatch.simulation.engine import ReplicationSummary, Simulator, replicate, run_simulation
from dynamatch.simulation.metrics import SimMetrics, loss_from_metrics, loss_over_horizon, waiting_times
from dynamatch.simulation.policies import JoinedPool, MatchedWith, Perished, greedy_match_attempt, patient_match_attempt
from dynamatch.simulation.sim_config import Clock, EdgeMode, SimConfig, StopRule, validate_config

__all__ = [
	"Clock",
	"EdgeMode",
	"JoinedPool",
	"MatchedWith",
	"Perished",
	"ReplicationSummary",
	"SimConfig",
	"SimMetrics",
	"Simulator",
	"StopRule",
	"greedy_match_attempt",
	"loss_from_metrics",
	"loss_over_horizon",
	"patient_match_attempt",
	"replicate",
	"run_simulation",
	"validate_config",
	"waiting_times",
]
