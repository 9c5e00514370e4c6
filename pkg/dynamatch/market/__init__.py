from dynamatch.market.params import LossReport, MarketParams, PoolState, Policy, TieBreak, validate_params
from dynamatch.market.probability import (
	MatchProbTable,
	match_prob,
	match_prob_identity_residual,
	match_prob_table,
	perish_prob,
)

__all__ = [
	"LossReport",
	"MarketParams",
	"MatchProbTable",
	"PoolState",
	"Policy",
	"TieBreak",
	"match_prob",
	"match_prob_identity_residual",
	"match_prob_table",
	"perish_prob",
	"validate_params",
]
