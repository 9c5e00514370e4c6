# Copyright (c) 2025, dynamatch contributors
# See license.txt

import math

import numpy as np

from dynamatch.exceptions import StepSizeUnderflow, ValidationError
from dynamatch.market.params import MarketParams, Policy
from dynamatch.ode.fields import rhs_for
from dynamatch.ode.integrator import integrate, solve, solve_rk4
from dynamatch.tests import IntegrationTestCase, UnitTestCase

SMALL = MarketParams.from_density(p=2, lam=0.2, m=800, d=8)


def _decay(_t, y):
	return -y


class UnitTestSolvers(UnitTestCase):
	def test_exponential_decay(self):
		trajectory = solve(_decay, [1.0], 1.0, rtol=1e-10, atol=1e-12)
		self.assertEqual(trajectory.times[-1], 1.0)
		self.assertAlmostEqual(trajectory.final()[0], math.exp(-1), delta=1e-9)
		self.assertAlmostEqual(trajectory.final()[0], 0.367879441, delta=1e-9)

	def test_dense_output_at_requested_times(self):
		times = np.linspace(0.0, 2.0, 41)
		trajectory = solve(_decay, [1.0], 2.0, rtol=1e-10, atol=1e-12, t_eval=times)
		np.testing.assert_array_equal(trajectory.times, times)
		np.testing.assert_allclose(trajectory.states[:, 0], np.exp(-times), atol=1e-8)

	def test_rk4_fallback(self):
		trajectory = solve_rk4(_decay, [1.0], 1.0, step=1e-2)
		self.assertAlmostEqual(trajectory.final()[0], math.exp(-1), delta=1e-9)
		sampled = solve_rk4(_decay, [1.0], 1.0, step=1e-2, t_eval=[0.255, 0.5])
		np.testing.assert_allclose(sampled.states[:, 0], np.exp(-sampled.times), atol=1e-7)

	def test_blow_up_underflows(self):
		with self.assertRaises(StepSizeUnderflow) as raised:
			solve(lambda _t, y: y**2, [1.0], 2.0, rtol=1e-9, atol=1e-12, nonnegative=False)
		self.assertLess(raised.exception.t, 1.0 + 1e-6)

	def test_clipping_is_recorded(self):
		# leaves zero in finite time; the projection keeps it there
		trajectory = solve(lambda _t, y: -np.ones_like(y), [0.5], 2.0, rtol=1e-9, atol=1e-12)
		self.assertTrue(trajectory.clip_events)
		self.assertGreaterEqual(trajectory.states.min(), 0.0)

	def test_sample_times_validated(self):
		with self.assertRaises(ValidationError):
			solve(_decay, [1.0], 1.0, rtol=1e-9, atol=1e-9, t_eval=[0.5, 0.2])
		with self.assertRaises(ValidationError):
			solve(_decay, [1.0], 1.0, rtol=1e-9, atol=1e-9, t_eval=[0.5, 1.5])


class IntegrationTestMarketTrajectories(IntegrationTestCase):
	def test_initial_state_validated(self):
		with self.assertRaises(ValidationError):
			integrate(Policy.GREEDY, [1.0, -1.0, 0.0], SMALL, 1.0)
		with self.assertRaises(ValidationError):
			integrate(Policy.GREEDY, [1.0, 1.0], SMALL, 1.0)

	def test_symmetric_start_stays_symmetric(self):
		tol = 1e-9
		for policy in Policy:
			trajectory = integrate(policy, [100.0, 50.0, 50.0], SMALL, 5.0, tol)
			self.assertLessEqual(trajectory.hard_spread(), 10 * tol)
			self.assertGreaterEqual(trajectory.states.min(), -tol)
			self.assertEqual(trajectory.clip_events, [])

	def test_dense_output_follows_the_field(self):
		h = 1e-3
		for policy in Policy:
			trajectory = integrate(policy, [0.0, 0.0, 0.0], SMALL, 3.0, t_eval=[1.0 - h, 1.0, 1.0 + h])
			central = (trajectory.states[2] - trajectory.states[0]) / (2 * h)
			field = rhs_for(policy)(trajectory.states[1], SMALL)
			np.testing.assert_allclose(central, field, rtol=1e-4, atol=1e-3 * SMALL.m)

	def test_rk4_and_rk45_agree(self):
		for policy in Policy:
			adaptive = integrate(policy, [200.0, 10.0, 80.0], SMALL, 2.0)
			fixed = integrate(policy, [200.0, 10.0, 80.0], SMALL, 2.0, method="rk4", step=1e-3)
			np.testing.assert_allclose(adaptive.final(), fixed.final(), atol=1e-6 * SMALL.m)
