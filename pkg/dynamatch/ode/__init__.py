from dynamatch.ode.evaluation import (
	AsymptoticPrediction,
	Regime,
	asymptotic_prediction,
	little_waiting_times,
	loss_ode,
)
from dynamatch.ode.fields import greedy_rhs, patient_rhs, symmetric_rhs
from dynamatch.ode.integrator import Trajectory, integrate
from dynamatch.ode.stationary import StationarySolution, stationary_greedy, stationary_patient

__all__ = [
	"AsymptoticPrediction",
	"Regime",
	"StationarySolution",
	"Trajectory",
	"asymptotic_prediction",
	"greedy_rhs",
	"integrate",
	"little_waiting_times",
	"loss_ode",
	"patient_rhs",
	"stationary_greedy",
	"stationary_patient",
	"symmetric_rhs",
]
