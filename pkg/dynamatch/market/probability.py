# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

"""
Closed-form matching and perishing probabilities for one agent of interest facing
a pool. All (1 - alpha)^x terms and their complements go
through log1p/expm1.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from dynamatch.exceptions import SubsetEnumerationError
from dynamatch.market.params import PoolState
from dynamatch.utils import throw

# exact enumeration of the easy-to-hard subset sum visits 2**(p-1) subsets
EXACT_SUBSET_CAP = 20

Method = Literal["auto", "subset", "symmetric"]


def _log_q(alpha: float) -> float:
	if not 0.0 <= alpha <= 1.0:
		throw(f"alpha must lie in [0,1], got {alpha}")
	return -math.inf if alpha == 1.0 else math.log1p(-alpha)


def q_pow(x, alpha: float):
	"""(1 - alpha)**x, elementwise for arrays. x = 0 gives exactly 1."""
	log_q = _log_q(alpha)
	x = np.asarray(x, dtype=float)
	with np.errstate(invalid="ignore"):
		out = np.where(x == 0, 1.0, np.exp(x * log_q))
	return float(out) if out.ndim == 0 else out


def one_minus_q_pow(x, alpha: float):
	"""1 - (1 - alpha)**x without cancellation for small alpha*x."""
	log_q = _log_q(alpha)
	x = np.asarray(x, dtype=float)
	with np.errstate(invalid="ignore"):
		out = np.where(x == 0, 0.0, -np.expm1(x * log_q))
	return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MatchProbTable:
	"""pi[k, k'] for one pool state. Rows need not sum to one and the table is not symmetric."""

	pi: np.ndarray

	@property
	def p(self) -> int:
		return self.pi.shape[0] - 1

	def __getitem__(self, pair: tuple[int, int]) -> float:
		return float(self.pi[pair])

	def row_sums(self) -> np.ndarray:
		return self.pi.sum(axis=1)

	def as_dict(self) -> dict[tuple[int, int], float]:
		n = self.p + 1
		return {(k, kp): float(self.pi[k, kp]) for k in range(n) for kp in range(n)}


def _is_symmetric(hard: np.ndarray) -> bool:
	return bool(np.all(hard == hard[0]))


def _subset_weights(r_hard: np.ndarray, z_hard: np.ndarray, j: int) -> float:
	"""
	Sum over subsets T of the other hard types of 1/(|T|+1) times the probability that
	exactly the types in T hold a compatible agent.
	"""
	p = len(r_hard)
	if p > EXACT_SUBSET_CAP:
		raise SubsetEnumerationError(
			f"exact subset enumeration is capped at p = {EXACT_SUBSET_CAP}, got p = {p} on an asymmetric state"
		)
	others_r = np.delete(r_hard, j)
	others_z = np.delete(z_hard, j)
	if len(others_r) == 0:
		return 1.0

	masks = np.arange(2 ** len(others_r))
	beta = np.ones(len(masks))
	sizes = np.zeros(len(masks), dtype=int)
	for col in range(len(others_r)):
		present = ((masks >> col) & 1).astype(bool)
		beta *= np.where(present, others_r[col], others_z[col])
		sizes += present
	return math.fsum(beta / (sizes + 1))


def _easy_to_hard(sizes: np.ndarray, alpha: float, method: Method) -> np.ndarray:
	"""pi(0, j) for every hard type j, as an array of length p."""
	hard = sizes[1:]
	p = len(hard)

	if method == "symmetric" and not _is_symmetric(hard):
		throw("the symmetric evaluation needs equal hard-type sizes")

	if method == "symmetric" or (method == "auto" and _is_symmetric(hard)):
		# every hard type is equally likely to be picked once some hard type has a compatible agent
		return np.full(p, one_minus_q_pow(p * hard[0], alpha) / p)

	r_hard = np.asarray(one_minus_q_pow(hard, alpha), dtype=float)
	z_hard = np.asarray(q_pow(hard, alpha), dtype=float)
	return np.array([r_hard[j] * _subset_weights(r_hard, z_hard, j) for j in range(p)])


def pi_matrix(sizes: np.ndarray, alpha: float, method: Method = "auto") -> np.ndarray:
	"""
	Full (p+1)x(p+1) matrix of match probabilities at real-valued sizes. Negative
	entries, which only appear inside integrator stages, are read as zero.
	"""
	sizes = np.maximum(np.asarray(sizes, dtype=float), 0.0)
	p = len(sizes) - 1
	r = np.asarray(one_minus_q_pow(sizes, alpha), dtype=float)
	z = np.asarray(q_pow(sizes, alpha), dtype=float)

	pi = np.zeros((p + 1, p + 1))
	pi[0, 0] = r[0] * np.prod(z[1:])
	pi[0, 1:] = _easy_to_hard(sizes, alpha, method)
	for j in range(1, p + 1):
		pi[j, 0] = r[0] * z[j]
		pi[j, j] = r[j]
	return pi


def match_prob_table(state: PoolState, alpha: float, method: Method = "auto") -> MatchProbTable:
	return MatchProbTable(pi_matrix(state.as_array(), alpha, method))


def _check_type(state: PoolState, k: int, name: str = "k") -> None:
	if not 0 <= k <= state.p:
		throw(f"type index {name}={k} out of range 0..{state.p}")


def match_prob(state: PoolState, k: int, k_prime: int, alpha: float, method: Method = "auto") -> float:
	"""
	Probability that the planner matches the type-k agent of interest with a type-k'
	agent of `state`, hard partners first and uniformly over hard types that hold a
	compatible agent.
	"""
	_check_type(state, k)
	_check_type(state, k_prime, "k_prime")
	sizes = state.as_array()

	if k >= 1 and k_prime >= 1 and k != k_prime:
		return 0.0
	if k == 0 and k_prime == 0:
		return float(one_minus_q_pow(sizes[0], alpha) * np.prod(q_pow(sizes[1:], alpha)))
	if k == 0:
		return float(_easy_to_hard(sizes, alpha, method)[k_prime - 1])
	if k_prime == 0:
		return float(one_minus_q_pow(sizes[0], alpha) * q_pow(sizes[k], alpha))
	return float(one_minus_q_pow(sizes[k], alpha))


def match_prob_identity_residual(state: PoolState, alpha: float) -> float:
	"""(1 - alpha)^|S| - (1 - sum_k pi(0, k)); zero up to rounding."""
	no_match = q_pow(state.total(), alpha)
	row = pi_matrix(state.as_array(), alpha)[0]
	return no_match - (1.0 - math.fsum(row))


def perish_prob(state: PoolState, k: int, alpha: float) -> float:
	"""Probability that a critical type-k agent has no compatible admissible neighbour."""
	_check_type(state, k)
	if k == 0:
		return q_pow(state.total(), alpha)
	return q_pow(state.sizes[0] + state.sizes[k], alpha)
