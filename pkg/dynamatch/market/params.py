# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from dynamatch.utils import throw


class Policy(str, Enum):
	GREEDY = "greedy"
	PATIENT = "patient"


class TieBreak(str, Enum):
	# uniform over hard types that have a compatible agent (the closed forms assume this)
	TYPE_UNIFORM = "type_uniform"
	# uniform over all compatible hard agents
	AGENT_UNIFORM = "agent_uniform"


class MarketParams(BaseModel):
	"""
	One easy type A_0 and p hard types A_1..A_p. Agents arrive at rate m; an arrival
	is hard type j with probability lam and easy with probability 1 - p*lam. Admissible
	pairs are compatible with probability alpha, and d = alpha*m.

	Construction only checks field types; call `validate_params` for the market invariants.
	"""

	model_config = ConfigDict(frozen=True, populate_by_name=True)

	p: int
	lam: float = Field(alias="lambda")
	m: float
	alpha: float
	d: float
	horizon: float = 20.0

	@classmethod
	def from_density(cls, p: int, lam: float, m: float, d: float, horizon: float = 20.0) -> "MarketParams":
		return cls(p=p, lam=lam, m=m, alpha=d / m, d=d, horizon=horizon)

	@classmethod
	def from_alpha(cls, p: int, lam: float, m: float, alpha: float, horizon: float = 20.0) -> "MarketParams":
		return cls(p=p, lam=lam, m=m, alpha=alpha, d=alpha * m, horizon=horizon)

	def with_density(self, d: float) -> "MarketParams":
		return self.model_copy(update={"d": d, "alpha": d / self.m})

	def with_lambda(self, lam: float) -> "MarketParams":
		return self.model_copy(update={"lam": lam})

	@property
	def easy_share(self) -> float:
		return 1.0 - self.p * self.lam

	def arrival_rates(self) -> np.ndarray:
		"""Per-type arrival rates ((1 - p*lam)m, lam*m, ..., lam*m)."""
		rates = np.full(self.p + 1, self.lam * self.m)
		rates[0] = self.easy_share * self.m
		return rates

	def type_probabilities(self) -> np.ndarray:
		probabilities = np.full(self.p + 1, self.lam)
		probabilities[0] = self.easy_share
		return probabilities


def validate_params(params: MarketParams) -> MarketParams:
	values = (params.lam, params.m, params.alpha, params.d, params.horizon)
	if not all(math.isfinite(v) for v in values):
		throw("market parameters must be finite")
	if params.p < 1:
		throw(f"p must be a positive integer, got {params.p}")
	if params.lam <= 0:
		throw(f"lambda must be positive, got {params.lam}")
	if params.p * params.lam >= 1:
		throw(f"p*lambda = {params.p * params.lam:g} violates lambda < 1/p")
	if params.m < 1:
		throw(f"arrival rate m must be at least 1, got {params.m}")
	if not 0 < params.alpha < 1:
		throw(f"alpha must lie in (0,1), got {params.alpha}")
	if not math.isclose(params.d, params.alpha * params.m, rel_tol=1e-12):
		throw(f"density d = {params.d} differs from alpha*m = {params.alpha * params.m}")
	if params.horizon <= 0:
		throw(f"horizon must be positive, got {params.horizon}")
	return params


@dataclass(frozen=True)
class PoolState:
	"""
	Per-type pool sizes, index 0 the easy type. Integer counts in the simulator,
	real sizes in the mean-field engine.
	"""

	sizes: tuple[float, ...]

	def __post_init__(self):
		if len(self.sizes) < 2:
			throw(f"a pool state needs at least one hard type, got {len(self.sizes)} entries")
		if any(not s >= 0 for s in self.sizes):
			throw(f"pool sizes must be nonnegative, got {self.sizes}")

	@classmethod
	def of(cls, sizes: Sequence[float] | np.ndarray) -> "PoolState":
		return cls(tuple(float(s) for s in sizes))

	@classmethod
	def empty(cls, p: int) -> "PoolState":
		return cls((0.0,) * (p + 1))

	@property
	def p(self) -> int:
		return len(self.sizes) - 1

	def total(self) -> float:
		return math.fsum(self.sizes)

	def as_array(self) -> np.ndarray:
		return np.asarray(self.sizes, dtype=float)


@dataclass(frozen=True)
class LossReport:
	per_type: tuple[float, ...]
	total: float
	standard_errors: tuple[float, ...] | None = None
	total_standard_error: float | None = None

	def to_dict(self) -> dict:
		return {
			"per_type": list(self.per_type),
			"total": self.total,
			"standard_errors": list(self.standard_errors) if self.standard_errors is not None else None,
			"total_standard_error": self.total_standard_error,
		}
