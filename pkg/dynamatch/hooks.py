app_name = "dynamatch"
app_title = "Dynamatch"
app_publisher = "dynamatch contributors"
app_description = "Dynamic matching market laboratory"
app_license = "unlicense"

# Policies
# --------
# Match attempt handlers, resolved by dotted path.
# Greedy attempts a match when an agent arrives, Patient when it becomes critical.

policy_handlers = {
	"greedy": {
		"on_arrival": "dynamatch.simulation.policies.greedy_match_attempt",
	},
	"patient": {
		"on_critical": "dynamatch.simulation.policies.patient_match_attempt",
	},
}

# Mean-field fields
# -----------------

ode_fields = {
	"greedy": "dynamatch.ode.fields.greedy_rhs",
	"patient": "dynamatch.ode.fields.patient_rhs",
}

stationary_solvers = {
	"greedy": "dynamatch.ode.stationary.stationary_greedy",
	"patient": "dynamatch.ode.stationary.stationary_patient",
}

# Sweep engines
# -------------
# Each engine evaluates one (axis value, policy) cell of a sweep.

sweep_engines = {
	"discrete": "dynamatch.experiments.sweep.run_discrete_cell",
	"ode": "dynamatch.experiments.sweep.run_ode_cell",
}

# Environment
# -----------
# Variables read by dynamatch.config.get_settings

settings_env = {
	"output_dir": "DYNAMATCH_OUTPUT_DIR",
	"jobs": "DYNAMATCH_JOBS",
	"log_level": "DYNAMATCH_LOG_LEVEL",
	"default_seed": "DYNAMATCH_SEED",
}
settings_file_env = "DYNAMATCH_CONFIG"

# Testing
# -------
# Acceptance-scale studies run only when this variable is set to "1".

slow_tests_env = "DYNAMATCH_SLOW_TESTS"
