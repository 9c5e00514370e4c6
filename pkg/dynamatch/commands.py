# Copyright (c) 2025, dynamatch contributors
# For license information, please see license.txt

"""
The `dynamatch` command line. Every subcommand writes its artifacts and a
`manifest.json` holding the resolved configuration into the output directory,
and exits nonzero when a requested verdict fails.
"""

import csv
import functools
import logging
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from dynamatch import __version__, hooks
from dynamatch.config import get_settings
from dynamatch.exceptions import DynamatchError
from dynamatch.experiments.export import write_json, write_sweep_csv
from dynamatch.experiments.studies import (
	engine_coherence,
	max_relative_gap,
	phase_transition_witness,
	ratio_curve,
	scaling_check,
	waiting_law_check,
)
from dynamatch.experiments.sweep import Axis, Engine, SweepRow, SweepSpec, run_sweep
from dynamatch.market.params import MarketParams, Policy, TieBreak, validate_params
from dynamatch.ode.evaluation import little_waiting_times, loss_ode
from dynamatch.ode.export import write_stationary_json, write_trajectory_csv
from dynamatch.ode.integrator import integrate
from dynamatch.simulation.engine import replicate, run_simulation
from dynamatch.simulation.sim_config import Clock, EdgeMode, SimConfig, StopRule
from dynamatch.simulation.trace import write_trace_csv
from dynamatch.utils import configure_logging, get_attr, log_error, logger

VERDICT_FAILED = 3
FORMATS = ("csv", "json", "both")


@dataclass
class RunContext:
	output_dir: Path
	format: str
	jobs: int
	seed: int
	log_level: str
	artifacts: list[str] = field(default_factory=list)

	@property
	def wants_csv(self) -> bool:
		return self.format in ("csv", "both")

	@property
	def wants_json(self) -> bool:
		return self.format in ("json", "both")

	def path(self, name: str) -> Path:
		self.artifacts.append(name)
		return self.output_dir / name

	def finish(self, command: str, options: dict, verdicts: dict[str, bool] | None = None) -> None:
		"""Writes the manifest and exits with VERDICT_FAILED if any verdict is false."""
		verdicts = verdicts or {}
		manifest = {
			"command": command,
			"version": __version__,
			"output_dir": str(self.output_dir),
			"format": self.format,
			"jobs": self.jobs,
			"seed": self.seed,
			"options": options,
			"artifacts": sorted(self.artifacts),
			"verdicts": verdicts,
		}
		write_json(manifest, self.output_dir / "manifest.json")
		for name, passed in verdicts.items():
			click.echo(f"{name}: {'passed' if passed else 'FAILED'}")
		if not all(verdicts.values()):
			raise click.exceptions.Exit(VERDICT_FAILED)


def parse_values(text: str) -> tuple[float, ...]:
	"""Parses `start:stop:step` (stop included) or a comma-separated list."""
	text = text.strip()
	try:
		if ":" in text:
			start, stop, step = (float(x) for x in text.split(":"))
			if step <= 0 or stop < start:
				raise ValueError
			count = int(np.floor((stop - start) / step + 1e-9)) + 1
			return tuple(round(start + i * step, 12) for i in range(count))
		values = tuple(float(x) for x in text.split(",") if x.strip())
	except ValueError:
		raise click.BadParameter(f"'{text}' is neither start:stop:step nor a comma list")
	if not values:
		raise click.BadParameter("no values given")
	return values


def _choices(enum, text: str) -> tuple:
	try:
		return tuple(enum(x.strip()) for x in text.split(",") if x.strip())
	except ValueError:
		raise click.BadParameter(f"'{text}' must list values among {', '.join(e.value for e in enum)}")


def _diagnosed(command):
	"""Turns lab errors into a single-line diagnostic."""

	@functools.wraps(command)
	def wrapper(*args, **kwargs):
		try:
			return command(*args, **kwargs)
		except DynamatchError as e:
			log_error(str(e), e.title)
			raise click.ClickException(f"{e.title}: {' '.join(str(e).split())}")

	return wrapper


SEED_RANGE = click.IntRange(min=0, max=2**64 - 1)


def _override_seed(ctx: click.Context, param: click.Parameter, value: int | None) -> None:
	if value is not None:
		ctx.find_object(RunContext).seed = value


def market_options(command):
	options = [
		click.option(
			"--seed",
			type=SEED_RANGE,
			default=None,
			expose_value=False,
			callback=_override_seed,
			help="Master seed, overriding the one given before the subcommand.",
		),
		click.option("--p", "p", type=int, default=2, show_default=True, help="Number of hard types."),
		click.option("--lambda", "lam", type=float, default=0.2, show_default=True, help="Arrival share of each hard type."),
		click.option("--m", "m", type=float, default=8000.0, show_default=True, help="Arrival rate."),
		click.option("--d", "d", type=float, default=None, help="Density d = alpha*m (default 10)."),
		click.option("--alpha", "alpha", type=float, default=None, help="Compatibility probability."),
		click.option("--horizon", type=float, default=20.0, show_default=True),
	]
	for option in reversed(options):
		command = option(command)
	return command


def _market(p: int, lam: float, m: float, d: float | None, alpha: float | None, horizon: float) -> MarketParams:
	if d is not None and alpha is not None:
		raise click.UsageError("--d and --alpha are mutually exclusive")
	if alpha is not None:
		params = MarketParams.from_alpha(p=p, lam=lam, m=m, alpha=alpha, horizon=horizon)
	else:
		params = MarketParams.from_density(p=p, lam=lam, m=m, d=10.0 if d is None else d, horizon=horizon)
	return validate_params(params)


def _write_type_table(path: Path, sizes: Sequence[float], losses: Sequence[float], waits: Sequence[float]) -> None:
	path.parent.mkdir(parents=True, exist_ok=True)
	with open(path, "w", newline="") as out:
		writer = csv.writer(out, lineterminator="\n")
		writer.writerow(["type", "size", "loss", "wait"])
		for k, row in enumerate(zip(sizes, losses, waits, strict=True)):
			writer.writerow([k, *(repr(float(x)) for x in row)])


def _write_table(path: Path, header: list[str], rows: Sequence[Sequence]) -> None:
	path.parent.mkdir(parents=True, exist_ok=True)
	with open(path, "w", newline="") as out:
		writer = csv.writer(out, lineterminator="\n")
		writer.writerow(header)
		writer.writerows(rows)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option(
	"--output-dir",
	type=click.Path(file_okay=False, path_type=Path),
	envvar="DYNAMATCH_OUTPUT_DIR",
	default=None,
	help="Directory for artifacts [env DYNAMATCH_OUTPUT_DIR].",
)
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="both", show_default=True)
@click.option("-v", "--verbose", count=True, help="Repeat for more detail.")
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker processes for sweeps.")
@click.option("--seed", type=SEED_RANGE, default=None, help="Master seed.")
@click.version_option(__version__, prog_name="dynamatch")
@click.pass_context
def cli(ctx, output_dir, fmt, verbose, jobs, seed):
	"""Dynamic matching market laboratory."""
	try:
		settings = get_settings()
	except DynamatchError as e:
		raise click.ClickException(str(e))

	output_dir = output_dir or settings.output_dir
	base_level = logging.getLevelName(settings.log_level.upper())
	if not isinstance(base_level, int):
		raise click.ClickException(f"unknown log level {settings.log_level}")
	level = max(logging.DEBUG, base_level - 10 * verbose)
	try:
		output_dir.mkdir(parents=True, exist_ok=True)
	except OSError as e:
		raise click.ClickException(f"output directory {output_dir} is not writable: {e.strerror}")
	configure_logging(level, output_dir / "logs")

	ctx.obj = RunContext(
		output_dir=output_dir,
		format=fmt,
		jobs=jobs or settings.jobs,
		seed=settings.default_seed if seed is None else seed,
		log_level=logging.getLevelName(level),
	)


@cli.command("simulate")
@market_options
@click.option("--policy", type=click.Choice([p.value for p in Policy]), default="patient", show_default=True)
@click.option("--events", type=click.IntRange(min=1), default=None, help="Stop after this many events.")
@click.option("--time", "time_bound", type=float, default=None, help="Stop at this time instead.")
@click.option("--warmup", type=float, default=None, help="Warmup in the stop rule's unit.")
@click.option("--reps", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--tie-break", type=click.Choice([t.value for t in TieBreak]), default=TieBreak.TYPE_UNIFORM.value)
@click.option("--edge-mode", type=click.Choice([e.value for e in EdgeMode]), default=EdgeMode.LAZY.value)
@click.option("--clock", type=click.Choice([c.value for c in Clock]), default=Clock.AGGREGATE.value)
@click.option("--initial", default=None, help="Comma-separated initial pool sizes.")
@click.option("--trace", is_flag=True, help="Write the event trace of the first replication.")
@click.pass_obj
@_diagnosed
def simulate(run: RunContext, p, lam, m, d, alpha, horizon, policy, events, time_bound, warmup, reps, tie_break, edge_mode, clock, initial, trace):
	"""Run the discrete market simulator."""
	if events is not None and time_bound is not None:
		raise click.UsageError("--events and --time are mutually exclusive")
	params = _market(p, lam, m, d, alpha, horizon)
	stop = StopRule.by_time(time_bound) if time_bound is not None else StopRule.by_events(events or get_settings().events)
	config = SimConfig(
		params=params,
		policy=Policy(policy),
		tie_break=TieBreak(tie_break),
		edge_mode=EdgeMode(edge_mode),
		clock=Clock(clock),
		stop=stop,
		warmup=warmup,
		seed=run.seed,
		initial_sizes=tuple(int(x) for x in parse_values(initial)) if initial else None,
	)
	summary = replicate(config, reps)

	if run.wants_json:
		write_json(
			{
				"params": params.model_dump(by_alias=True),
				"policy": policy,
				"replications": summary.replications,
				"loss": summary.loss.to_dict(),
				"waits": list(summary.waits),
				"wait_standard_errors": list(summary.wait_standard_errors),
				"mean_pool": list(summary.mean_pool),
				"pool_standard_errors": list(summary.pool_standard_errors),
				"runs": [metrics.to_dict() for metrics in summary.metrics],
			},
			run.path("metrics.json"),
		)
	if run.wants_csv:
		_write_type_table(run.path("metrics.csv"), summary.mean_pool, summary.loss.per_type, summary.waits)
	if trace:
		_, records = run_simulation(config.model_copy(update={"record_trace": True}), (0,))
		write_trace_csv(records, run.path("trace.csv"), params.p)

	click.echo(f"loss {summary.loss.total:.6g} over {summary.replications} replication(s)")
	run.finish("simulate", config.model_dump(mode="json", by_alias=True) | {"replications": reps})


@cli.command("ode")
@market_options
@click.option("--policy", type=click.Choice([p.value for p in Policy]), default="patient", show_default=True)
@click.option("--t-end", type=float, default=None, help="Integration horizon (default: the market horizon).")
@click.option("--initial", default=None, help="Comma-separated initial sizes (default: empty pools).")
@click.option("--samples", type=click.IntRange(min=2), default=201, show_default=True)
@click.option("--method", type=click.Choice(["rk45", "rk4"]), default="rk45", show_default=True)
@click.option("--step", type=float, default=1e-3, show_default=True, help="Step of the rk4 method.")
@click.option("--tol", type=float, default=None, help="Relative tolerance (default: lab setting).")
@click.pass_obj
@_diagnosed
def ode(run: RunContext, p, lam, m, d, alpha, horizon, policy, t_end, initial, samples, method, step, tol):
	"""Integrate the mean-field equations."""
	params = _market(p, lam, m, d, alpha, horizon)
	t_end = params.horizon if t_end is None else t_end
	start = parse_values(initial) if initial else (0.0,) * (params.p + 1)
	trajectory = integrate(
		Policy(policy), start, params, t_end, tol=tol, t_eval=np.linspace(0.0, t_end, samples), method=method, step=step
	)
	loss = loss_ode(Policy(policy), trajectory, params)
	final = trajectory.final()

	if run.wants_csv:
		write_trajectory_csv(trajectory, run.path("trajectory.csv"))
	if run.wants_json:
		write_json(
			{
				"params": params.model_dump(by_alias=True),
				"policy": policy,
				"method": trajectory.method,
				"steps": trajectory.steps,
				"clip_events": list(trajectory.clip_events),
				"final_sizes": final.tolist(),
				"final_waits": list(little_waiting_times(final, params)),
				"window_loss": loss.to_dict(),
			},
			run.path("ode.json"),
		)
	click.echo(f"final sizes {np.array2string(final, precision=6)}")
	run.finish(
		"ode",
		{
			"params": params.model_dump(by_alias=True),
			"policy": policy,
			"t_end": t_end,
			"initial": list(start),
			"samples": samples,
			"method": method,
			"step": step,
			"tol": tol if tol is not None else get_settings().ode_tol,
		},
	)


@cli.command("stationary")
@market_options
@click.option("--policy", type=click.Choice([p.value for p in Policy]), default="patient", show_default=True)
@click.option("--tol", type=float, default=None, help="Residual tolerance (default: lab setting).")
@click.pass_obj
@_diagnosed
def stationary(run: RunContext, p, lam, m, d, alpha, horizon, policy, tol):
	"""Solve for the mean-field fixed point."""
	params = _market(p, lam, m, d, alpha, horizon)
	solution = get_attr(hooks.stationary_solvers[policy])(params, tol=tol)

	if run.wants_json:
		write_stationary_json(solution, run.path("stationary.json"))
	if run.wants_csv:
		_write_type_table(run.path("stationary.csv"), solution.sizes, solution.loss.per_type, solution.waits)
	click.echo(f"residual {solution.residual:.3g}, loss {solution.loss.total:.6g}")
	run.finish(
		"stationary",
		{
			"params": params.model_dump(by_alias=True),
			"policy": policy,
			"tol": tol if tol is not None else get_settings().stationary_tol,
		},
		{"converged": solution.converged},
	)


def sweep_options(values: str, with_engines: bool = True):
	def decorate(command):
		options = [
			click.option("--axis", type=click.Choice([a.value for a in Axis]), default=Axis.DENSITY.value, show_default=True),
			click.option("--values", "values", default=values, show_default=True, help="start:stop:step or a comma list."),
			click.option("--policies", default="greedy,patient", show_default=True),
			click.option("--engines", default="discrete,ode", show_default=True),
			click.option("--reps", type=click.IntRange(min=1), default=None, help="Replications per discrete cell."),
			click.option("--events", type=click.IntRange(min=1), default=None, help="Events per discrete run."),
			click.option("--warm-start/--cold-start", default=True, show_default=True),
		]
		if not with_engines:
			del options[3]
		for option in reversed(options):
			command = option(command)
		return command

	return decorate


def _sweep_spec(run: RunContext, params, axis, values, policies, engines, reps, events, warm_start) -> SweepSpec:
	return SweepSpec(
		base=params,
		axis=Axis(axis),
		values=parse_values(values),
		policies=_choices(Policy, policies),
		engines=_choices(Engine, engines),
		replications=reps or get_settings().replications,
		seed=run.seed,
		stop=StopRule.by_events(events) if events else None,
		warm_start=warm_start,
	)


@cli.command("sweep")
@market_options
@sweep_options("2:10:1")
@click.pass_obj
@_diagnosed
def sweep(run: RunContext, p, lam, m, d, alpha, horizon, axis, values, policies, engines, reps, events, warm_start):
	"""Run a parameter sweep on one or both engines."""
	spec = _sweep_spec(run, _market(p, lam, m, d, alpha, horizon), axis, values, policies, engines, reps, events, warm_start)
	result = run_sweep(spec, run.jobs)
	if run.wants_csv:
		write_sweep_csv(result, run.path("sweep.csv"))
	if run.wants_json:
		write_json(
			{
				"spec": spec.model_dump(mode="json", by_alias=True),
				"rows": [_row_dict(row) for row in result.rows],
			},
			run.path("sweep.json"),
		)
	click.echo(f"{len(result.rows)} cells")
	run.finish("sweep", spec.model_dump(mode="json", by_alias=True))


def _row_dict(row: SweepRow) -> dict:
	return {
		"axis_value": row.axis_value,
		"policy": row.policy.value,
		"engine": row.engine.value,
		"loss": row.loss.to_dict(),
		"waits": list(row.waits),
		"pool_sizes": list(row.pool_sizes),
		"replications": row.replications,
		"residual": row.residual,
	}


@cli.command("compare")
@market_options
@sweep_options("4:10:2", with_engines=False)
@click.option("--relative", type=float, default=0.10, show_default=True, help="Relative band around the ODE loss.")
@click.option("--bands", type=float, default=3.0, show_default=True, help="Standard-error band.")
@click.pass_obj
@_diagnosed
def compare(run: RunContext, p, lam, m, d, alpha, horizon, axis, values, policies, reps, events, warm_start, relative, bands):
	"""Check the discrete engine against the mean-field engine cell by cell."""
	spec = _sweep_spec(run, _market(p, lam, m, d, alpha, horizon), axis, values, policies, "discrete,ode", reps, events, warm_start)
	result = run_sweep(spec, run.jobs)
	verdicts = engine_coherence(result, relative=relative, bands=bands)

	if run.wants_csv:
		write_sweep_csv(result, run.path("compare.csv"))
	if run.wants_json:
		write_json(
			{
				"cells": [v.to_dict() for v in verdicts],
				"max_relative_gap": max_relative_gap(verdicts),
				"coherent": all(v.passed for v in verdicts),
			},
			run.path("compare.json"),
		)
	options = spec.model_dump(mode="json", by_alias=True) | {"relative": relative, "bands": bands}
	run.finish("compare", options, {"coherent": all(v.passed for v in verdicts)})


def study_options(values: str):
	def decorate(command):
		options = [
			click.option("--values", "values", default=values, show_default=True, help="Densities, start:stop:step or a comma list."),
			click.option("--engine", type=click.Choice([e.value for e in Engine]), default=Engine.ODE.value, show_default=True),
			click.option("--reps", type=click.IntRange(min=1), default=None, help="Replications per discrete cell."),
		]
		for option in reversed(options):
			command = option(command)
		return command

	return decorate


def _study_options(params: MarketParams, **extra) -> dict:
	return {"params": params.model_dump(by_alias=True)} | extra


@cli.command("scaling")
@market_options
@study_options("6:14:2")
@click.option("--policy", type=click.Choice([p.value for p in Policy]), default="patient", show_default=True)
@click.option("--assert-plateau", is_flag=True, help="Fail unless e^{d/2} times the easy loss plateaus.")
@click.pass_obj
@_diagnosed
def scaling(run: RunContext, p, lam, m, d, alpha, horizon, values, engine, reps, policy, assert_plateau):
	"""Tabulate e^{d/2} times the easy-type loss over densities."""
	if assert_plateau and Policy(policy) == Policy.GREEDY:
		raise click.UsageError("the plateau assertion holds for the patient policy only")
	params = _market(p, lam, m, d, alpha, horizon)
	replications = reps or get_settings().replications
	table = scaling_check(
		params, parse_values(values), Policy(policy), Engine(engine), replications, run.seed, run.jobs
	)
	if run.wants_csv:
		_write_table(
			run.path("scaling.csv"),
			["d", "easy_loss", "rescaled_easy_loss"],
			[[repr(float(x)) for x in row] for row in zip(table.d_values, table.easy_losses, table.rescaled, strict=True)],
		)
	if run.wants_json:
		write_json(table.to_dict(), run.path("scaling.json"))
	click.echo(f"max/min of the rescaled loss: {table.spread:.4g}")
	options = _study_options(params, values=list(table.d_values), engine=engine, replications=replications, policy=policy)
	run.finish("scaling", options | {"assert_plateau": assert_plateau}, {"plateau": table.plateau} if assert_plateau else None)


@cli.command("ratio")
@market_options
@study_options("2:10:1")
@click.option("--bands", type=float, default=2.0, show_default=True, help="Standard-error band for discrete curves.")
@click.pass_obj
@_diagnosed
def ratio(run: RunContext, p, lam, m, d, alpha, horizon, values, engine, reps, bands):
	"""Patient over Greedy total loss against density."""
	params = _market(p, lam, m, d, alpha, horizon)
	replications = reps or get_settings().replications
	curve = ratio_curve(params, parse_values(values), Engine(engine), replications, run.seed, bands, run.jobs)
	if run.wants_csv:
		_write_table(
			run.path("ratio.csv"),
			["d", "patient_over_greedy", "standard_error"],
			[[repr(float(x)) for x in row] for row in zip(curve.d_values, curve.ratios, curve.standard_errors, strict=True)],
		)
	if run.wants_json:
		write_json(curve.to_dict(), run.path("ratio.json"))
	options = _study_options(params, values=list(curve.d_values), engine=engine, replications=replications, bands=bands)
	run.finish("ratio", options, {"monotone_decreasing": curve.monotone})


@cli.command("phase")
@market_options
@click.option("--lambda-low", type=float, default=0.15, show_default=True)
@click.option("--lambda-high", type=float, default=0.35, show_default=True)
@click.option("--hard-factor", type=float, default=5.0, show_default=True, help="Required growth of the hard-type loss.")
@click.option("--engine", type=click.Choice([e.value for e in Engine]), default=Engine.ODE.value, show_default=True)
@click.option("--reps", type=click.IntRange(min=1), default=None)
@click.pass_obj
@_diagnosed
def phase(run: RunContext, p, lam, m, d, alpha, horizon, lambda_low, lambda_high, hard_factor, engine, reps):
	"""Witness the Patient phase transition at lambda*p = 1/2."""
	params = _market(p, lam, m, d, alpha, horizon)
	replications = reps or get_settings().replications
	witness = phase_transition_witness(
		params,
		lambda_low,
		lambda_high,
		Engine(engine),
		hard_factor=hard_factor,
		replications=replications,
		seed=run.seed,
		jobs=run.jobs,
	)
	if run.wants_json:
		write_json(witness.to_dict(), run.path("phase.json"))
	if run.wants_csv:
		_write_table(
			run.path("phase.csv"),
			["lambda", "hard_loss", "easy_loss"],
			[
				[repr(float(lam_k)), repr(float(hard)), repr(float(easy))]
				for lam_k, hard, easy in zip((lambda_low, lambda_high), witness.hard_losses, witness.easy_losses, strict=True)
			],
		)
	click.echo(f"hard-type loss ratio {witness.hard_ratio:.4g} (target {hard_factor:g}), easy-type {witness.easy_ratio:.4g}")
	options = _study_options(
		params,
		lambda_low=lambda_low,
		lambda_high=lambda_high,
		hard_factor=hard_factor,
		engine=engine,
		replications=replications,
	)
	run.finish("phase", options, {"hard_jump": witness.hard_jump, "easy_stable": witness.easy_stable})


@cli.command("waits")
@market_options
@study_options("10,20,40")
@click.option("--policy", type=click.Choice([p.value for p in Policy]), default="greedy", show_default=True)
@click.option(
	"--band",
	type=(float, float),
	default=(0.5, 1.5),
	show_default=True,
	help="Band for the Patient easy-type wait.",
)
@click.pass_obj
@_diagnosed
def waits(run: RunContext, p, lam, m, d, alpha, horizon, values, engine, reps, policy, band):
	"""Check the waiting-time laws over densities."""
	params = _market(p, lam, m, d, alpha, horizon)
	replications = reps or get_settings().replications
	table = waiting_law_check(
		params, parse_values(values), Policy(policy), Engine(engine), replications, run.seed, run.jobs, band=band
	)
	if run.wants_csv:
		n = len(table.waits[0]) if table.waits else 0
		_write_table(
			run.path("waits.csv"),
			["d"] + [f"wait_type_{k}" for k in range(n)],
			[[repr(float(d_k)), *(repr(float(w)) for w in row)] for d_k, row in zip(table.d_values, table.waits, strict=True)],
		)
	if run.wants_json:
		write_json(table.to_dict(), run.path("waits.json"))
	options = _study_options(params, values=list(table.d_values), engine=engine, replications=replications, policy=policy)
	verdicts = {"plateau": table.plateau}
	if table.in_band is not None:
		verdicts["a0_band"] = table.in_band
		options["band"] = list(band)
	run.finish("waits", options, verdicts)


def parse_and_dispatch(argv: Sequence[str] | None = None) -> int:
	"""Runs the command line on `argv` and returns the process exit status."""
	try:
		status = cli.main(args=list(argv) if argv is not None else None, prog_name="dynamatch", standalone_mode=False)
	except click.exceptions.Exit as e:
		return e.exit_code
	except click.ClickException as e:
		e.show()
		return e.exit_code
	except click.Abort:
		click.echo("Aborted!", err=True)
		return 1
	except DynamatchError as e:
		logger().debug("unhandled lab error", exc_info=True)
		click.echo(f"Error: {' '.join(str(e).split())}", err=True)
		return 1
	return status if isinstance(status, int) else 0


def main() -> None:
	sys.exit(parse_and_dispatch())

