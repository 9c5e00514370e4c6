import json
import os
from functools import lru_cache
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError as PydanticValidationError

from dynamatch import hooks
from dynamatch.exceptions import ValidationError
from dynamatch.utils import log_error


class LabSettings(BaseModel):
	"""
	Lab-wide defaults. Values come from, in increasing priority: the field defaults,
	the JSON file named by DYNAMATCH_CONFIG, and the DYNAMATCH_* environment variables.
	"""

	output_dir: Path = Path("dynamatch-output")
	jobs: int = Field(default=1, ge=1)
	log_level: str = "INFO"
	default_seed: int = Field(default=1, ge=0, lt=2**64)
	replications: int = Field(default=20, ge=1)
	events: int = Field(default=20_000, ge=1)
	warmup_fraction: float = Field(default=0.75, ge=0.0, lt=1.0)
	max_events: int = Field(default=50_000_000, ge=1)
	stationary_tol: float = Field(default=1e-10, gt=0.0)
	ode_tol: float = Field(default=1e-9, gt=0.0)


def _read_settings_file(path: str) -> dict:
	try:
		with open(path) as settings_file:
			values = json.load(settings_file)
	except (OSError, json.JSONDecodeError) as e:
		log_error(f"Could not read settings file {path}: {e}", "Settings")
		raise ValidationError(f"unreadable settings file {path}: {e}")

	if not isinstance(values, dict):
		raise ValidationError(f"settings file {path} must hold a JSON object")
	return values


@lru_cache(maxsize=1)
def get_settings() -> LabSettings:
	values: dict = {}

	settings_file = os.environ.get(hooks.settings_file_env)
	if settings_file:
		values.update(_read_settings_file(settings_file))

	for field, env_name in hooks.settings_env.items():
		if os.environ.get(env_name):
			values[field] = os.environ[env_name]

	try:
		return LabSettings(**values)
	except PydanticValidationError as e:
		raise ValidationError(f"invalid lab settings: {e.errors()[0]['loc'][0]}: {e.errors()[0]['msg']}")
