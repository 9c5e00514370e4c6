import importlib
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, NoReturn

import numpy as np

from dynamatch.exceptions import DynamatchError, ValidationError

ROOT_LOGGER = "dynamatch"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_configured = False


def configure_logging(level: str | int = "INFO", log_dir: Path | None = None) -> logging.Logger:
	"""
	Attaches handlers to the package logger once. A later call only adjusts the level
	and adds the file handler if a log directory is given for the first time.
	"""
	global _configured
	root = logging.getLogger(ROOT_LOGGER)
	root.setLevel(level)

	if not _configured:
		handler = logging.StreamHandler()
		handler.setFormatter(logging.Formatter(LOG_FORMAT))
		root.addHandler(handler)
		root.propagate = False
		_configured = True

	if log_dir is not None and not any(isinstance(h, logging.FileHandler) for h in root.handlers):
		log_dir.mkdir(parents=True, exist_ok=True)
		file_handler = logging.FileHandler(log_dir / "dynamatch.log")
		file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
		root.addHandler(file_handler)

	return root


def logger(module: str | None = None) -> logging.Logger:
	"""Returns the package logger, or a child logger for `module`."""
	return logging.getLogger(f"{ROOT_LOGGER}.{module}" if module else ROOT_LOGGER)


def log_error(message: str, title: str | None = None) -> None:
	logger("error").error(f"{title}: {message}" if title else message)


def throw(message: str, exc: type[DynamatchError] = ValidationError, title: str | None = None) -> NoReturn:
	"""Logs at debug level and raises `exc(message)`."""
	logger().debug(f"{title or exc.title}: {message}")
	raise exc(message)


@lru_cache(maxsize=None)
def get_attr(method_string: str) -> Any:
	"""Resolves a dotted path like `dynamatch.ode.fields.greedy_rhs`."""
	module_name, _, attr = method_string.rpartition(".")
	if not module_name:
		throw(f"'{method_string}' is not a dotted path")
	return getattr(importlib.import_module(module_name), attr)


def rng_stream(seed: int, *spawn_key: int) -> np.random.Generator:
	"""
	Derives an independent generator from a master seed.

	The stream for replication r of cell c is `SeedSequence(seed, spawn_key=(c, r))`,
	so any subset of a sweep can be recomputed alone and gives the same numbers.
	"""
	if seed < 0 or seed >= 2**64:
		throw(f"seed must be a 64-bit unsigned integer, got {seed}")
	return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in spawn_key)))
