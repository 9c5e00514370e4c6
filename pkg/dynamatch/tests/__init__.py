import os
import unittest

from dynamatch import hooks


class UnitTestCase(unittest.TestCase):
	"""
	Base class for tests of individual functions and methods.
	"""


class IntegrationTestCase(unittest.TestCase):
	"""
	Base class for tests exercising several components together.
	"""


def slow(test_item):
	"""Skips acceptance-scale tests unless DYNAMATCH_SLOW_TESTS=1."""
	return unittest.skipUnless(
		os.environ.get(hooks.slow_tests_env) == "1",
		f"acceptance-scale study; set {hooks.slow_tests_env}=1 to run",
	)(test_item)
