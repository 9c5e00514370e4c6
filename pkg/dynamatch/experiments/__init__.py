from dynamatch.experiments.studies import (
	engine_coherence,
	phase_transition_witness,
	ratio_curve,
	scaling_check,
	waiting_law_check,
)
from dynamatch.experiments.sweep import Axis, Engine, SweepResult, SweepRow, SweepSpec, run_sweep

__all__ = [
	"Axis",
	"Engine",
	"SweepResult",
	"SweepRow",
	"SweepSpec",
	"engine_coherence",
	"phase_transition_witness",
	"ratio_curve",
	"run_sweep",
	"scaling_check",
	"waiting_law_check",
]
