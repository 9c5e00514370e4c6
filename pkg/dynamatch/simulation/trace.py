# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

import csv
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class TraceRecord:
	time: float
	event_kind: str  # arrival | critical
	agent_id: int
	agent_type: int
	outcome: str  # matched | joined | perished
	partner_id: int | None
	partner_type: int | None
	hard_candidates: int
	easy_candidates: int | None
	pool_sizes: tuple[int, ...]


def trace_columns(p: int) -> list[str]:
	return [
		"time",
		"event_kind",
		"agent_id",
		"agent_type",
		"outcome",
		"partner_id",
		"partner_type",
		"hard_candidates",
		"easy_candidates",
		*(f"pool_{k}" for k in range(p + 1)),
	]


def _blank(value) -> str | int:
	return "" if value is None else value


def write_trace_csv(trace: list[TraceRecord], path: Path, p: int) -> Path:
	path.parent.mkdir(parents=True, exist_ok=True)
	with open(path, "w", newline="") as trace_file:
		writer = csv.writer(trace_file, lineterminator="\n")
		writer.writerow(trace_columns(p))
		for record in trace:
			writer.writerow(
				[
					repr(record.time),
					record.event_kind,
					record.agent_id,
					record.agent_type,
					record.outcome,
					_blank(record.partner_id),
					_blank(record.partner_type),
					record.hard_candidates,
					_blank(record.easy_candidates),
					*record.pool_sizes,
				]
			)
	return path


def read_trace_csv(path: Path) -> list[TraceRecord]:
	records = []
	with open(path, newline="") as trace_file:
		for row in csv.DictReader(trace_file):
			pool = tuple(int(v) for k, v in row.items() if k.startswith("pool_"))
			records.append(
				TraceRecord(
					time=float(row["time"]),
					event_kind=row["event_kind"],
					agent_id=int(row["agent_id"]),
					agent_type=int(row["agent_type"]),
					outcome=row["outcome"],
					partner_id=int(row["partner_id"]) if row["partner_id"] else None,
					partner_type=int(row["partner_type"]) if row["partner_type"] else None,
					hard_candidates=int(row["hard_candidates"]),
					easy_candidates=int(row["easy_candidates"]) if row["easy_candidates"] else None,
					pool_sizes=pool,
				)
			)
	return records
