# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

import csv
import json
from pathlib import Path

import numpy as np

from dynamatch.ode.integrator import Trajectory
from dynamatch.ode.stationary import StationarySolution


def trajectory_columns(p: int) -> list[str]:
	return ["t"] + [f"size_{k}" for k in range(p + 1)]


def write_trajectory_csv(trajectory: Trajectory, path: Path) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	p = trajectory.states.shape[1] - 1
	with open(path, "w", newline="") as out:
		writer = csv.writer(out)
		writer.writerow(trajectory_columns(p))
		for t, state in zip(trajectory.times, trajectory.states, strict=True):
			writer.writerow([repr(float(t))] + [repr(float(s)) for s in state])
	return path


def read_trajectory_csv(path: Path) -> Trajectory:
	with open(path, newline="") as source:
		rows = list(csv.reader(source))[1:]
	data = np.array([[float(x) for x in row] for row in rows])
	return Trajectory(times=data[:, 0], states=data[:, 1:])


def write_stationary_json(solution: StationarySolution, path: Path) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	path.write_text(json.dumps(solution.to_dict(), indent=1, sort_keys=True) + "\n")
	return path
