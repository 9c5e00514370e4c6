# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

import csv
import json
from pathlib import Path

from dynamatch.experiments.sweep import SweepResult, SweepRow


def sweep_columns(p: int) -> list[str]:
	types = range(p + 1)
	return (
		["axis_value", "policy", "engine", "loss_total"]
		+ [f"loss_type_{k}" for k in types]
		+ ["se_total"]
		+ [f"se_type_{k}" for k in types]
		+ [f"wait_type_{k}" for k in types]
		+ [f"pool_{k}" for k in types]
		+ ["replications", "residual"]
	)


def _blank(value) -> str:
	return "" if value is None else repr(float(value))


def _row_values(row: SweepRow) -> list[str]:
	n = len(row.loss.per_type)
	errors = row.loss.standard_errors or (None,) * n
	return (
		[repr(float(row.axis_value)), row.policy.value, row.engine.value, repr(float(row.loss.total))]
		+ [repr(float(x)) for x in row.loss.per_type]
		+ [_blank(row.loss.total_standard_error)]
		+ [_blank(se) for se in errors]
		+ [repr(float(w)) for w in row.waits]
		+ [repr(float(s)) for s in row.pool_sizes]
		+ [str(row.replications), _blank(row.residual)]
	)


def write_sweep_csv(result: SweepResult, path: Path) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	with open(path, "w", newline="") as out:
		writer = csv.writer(out)
		writer.writerow(sweep_columns(result.spec.base.p))
		for row in result.rows:
			writer.writerow(_row_values(row))
	return path


def write_json(record: dict, path: Path) -> Path:
	"""Writes `record` with sorted keys, so equal records give byte-identical files."""
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	path.write_text(json.dumps(record, indent=1, sort_keys=True, default=str) + "\n")
	return path
