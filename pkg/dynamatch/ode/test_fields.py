# Copyright (c) 2025, dynamatch contributors
# See license.txt

import numpy as np

from dynamatch.market.params import MarketParams, Policy
from dynamatch.ode.fields import greedy_rhs, patient_rhs, rhs_for, symmetric_jacobian, symmetric_rhs
from dynamatch.simulation.drift import one_event_drift
from dynamatch.tests import IntegrationTestCase, UnitTestCase

BASE_MARKET = MarketParams.from_density(p=2, lam=0.2, m=8000, d=10)
NO_EDGES = MarketParams.from_alpha(p=2, lam=0.2, m=8000, alpha=1e-15)


class UnitTestFields(UnitTestCase):
	def test_empty_pool_grows_at_arrival_rates(self):
		for policy in Policy:
			np.testing.assert_allclose(rhs_for(policy)(np.zeros(3), BASE_MARKET), [4800, 1600, 1600], rtol=1e-15)
			self.assertEqual(symmetric_rhs(policy, 0.0, 0.0, BASE_MARKET), (4800.0, 1600.0))

	def test_no_compatibility_is_infinite_server_drift(self):
		sizes = np.array([1000.0, 250.0, 400.0])
		for policy in Policy:
			np.testing.assert_allclose(rhs_for(policy)(sizes, NO_EDGES), NO_EDGES.arrival_rates() - sizes, rtol=1e-9)
			ds0, ds1 = symmetric_rhs(policy, 1000.0, 250.0, NO_EDGES)
			self.assertAlmostEqual(ds0, 4800 - 1000, delta=1e-6)
			self.assertAlmostEqual(ds1, 1600 - 250, delta=1e-6)

	def test_patient_with_certain_compatibility(self):
		# alpha = 1: pi(0,1) = pi(0,2) = 1/2, pi(j,j) = 1, every other entry vanishes
		params = MarketParams.from_alpha(p=2, lam=0.2, m=10, alpha=1.0)
		np.testing.assert_allclose(patient_rhs([2.0, 1.0, 3.0], params), [4.0, -1.0, -5.0], atol=1e-12)

	def test_negative_sizes_read_as_zero(self):
		np.testing.assert_array_equal(greedy_rhs([-1e-9, 0.0, 0.0], BASE_MARKET), greedy_rhs([0.0, 0.0, 0.0], BASE_MARKET))

	def test_symmetric_reduction(self):
		rng = np.random.default_rng(5)
		for p in (1, 2, 3, 5):
			params = MarketParams.from_density(p=p, lam=0.8 / (p + 1), m=8000, d=10)
			for _ in range(50):
				s0, s1 = rng.uniform(0, 4000), rng.uniform(0, 1000)
				for policy in Policy:
					full = rhs_for(policy)(np.array([s0] + [s1] * p), params)
					reduced = symmetric_rhs(policy, s0, s1, params)
					self.assertTrue(np.all(full[1:] == full[1]))
					np.testing.assert_allclose(full[:2], reduced, rtol=1e-12, atol=1e-9)

	def test_jacobian_matches_finite_differences(self):
		h = 1e-4
		for policy in Policy:
			for s0, s1 in ((3000.0, 400.0), (300.0, 120.0)):
				jacobian = symmetric_jacobian(policy, s0, s1, BASE_MARKET)
				plus = np.array(symmetric_rhs(policy, s0 + h, s1, BASE_MARKET))
				minus = np.array(symmetric_rhs(policy, s0 - h, s1, BASE_MARKET))
				np.testing.assert_allclose(jacobian[:, 0], (plus - minus) / (2 * h), rtol=1e-5, atol=1e-6)
				plus = np.array(symmetric_rhs(policy, s0, s1 + h, BASE_MARKET))
				minus = np.array(symmetric_rhs(policy, s0, s1 - h, BASE_MARKET))
				np.testing.assert_allclose(jacobian[:, 1], (plus - minus) / (2 * h), rtol=1e-5, atol=1e-6)


class IntegrationTestFieldAgainstDiscreteChain(IntegrationTestCase):
	"""
	The mean-field fields are the expected one-event drift of the discrete market.
	"""

	def test_one_event_drift_agreement(self):
		rng = np.random.default_rng(2024)
		sizes = (500, 300, 300)
		for policy in Policy:
			drift, errors = one_event_drift(policy, sizes, BASE_MARKET, 100_000, rng)
			field = rhs_for(policy)(np.array(sizes, dtype=float), BASE_MARKET)
			for k in range(3):
				self.assertLess(abs(drift[k] - field[k]), 4 * errors[k], msg=f"{policy} type {k}")

	def test_one_event_drift_asymmetric_state(self):
		rng = np.random.default_rng(77)
		params = MarketParams.from_density(p=2, lam=0.2, m=2000, d=6)
		sizes = (900, 40, 350)
		for policy in Policy:
			drift, errors = one_event_drift(policy, sizes, params, 100_000, rng)
			field = rhs_for(policy)(np.array(sizes, dtype=float), params)
			np.testing.assert_array_less(np.abs(drift - field), 4 * errors + 1e-9)
