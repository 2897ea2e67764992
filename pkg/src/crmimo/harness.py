"""Monte Carlo experiment engine: seeded sweeps over K, M_b, P0, I0, or R0.

Each trial runs the full pipeline (scenario -> channels -> estimates ->
interference bases -> beams -> allocators) from a seed derived from
(master seed, sweep value, trial index), so every solver inside a trial
sees identical channels and any trial can be re-run in isolation.
"""

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import admission
from .admission import AdmissionProblem, AdmissionResult, ConstraintSet
from .beamforming import BeamformerSet, design_beamformers
from .estimation import ChannelEstimate, EstimationConfig, estimate_channels
from .geometry import ChannelSet, GeometryConfig, Scenario, compute_channels, make_scenario
from .interference import interference_basis
from .units import dbm_to_mw

SOLVER_ORDER = ("equal_power", "equal_rate", "ilp")
SWEEPABLE = ("K", "M_b", "P0_dbm", "I0_dbm", "R0")

RECORD_FIELDS = (
    "sweep_var", "sweep_value", "solver", "trial", "admitted",
    "total_power_mw", "est_int_pu1_mw", "est_int_pu2_mw",
    "true_int_pu1_mw", "true_int_pu2_mw",
)
SUMMARY_FIELDS = ("sweep_var", "sweep_value", "solver", "mean_admitted", "stderr")

_CHUNK = 64


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: GeometryConfig = GeometryConfig()
    estimation: EstimationConfig = EstimationConfig()
    p0_dbm: float = 60.0
    i0_dbm: float = 0.0
    r0: float = 1.0
    sigma_w_sq_dbm: float = 0.0
    sweep_var: str = "K"
    sweep_values: tuple = (10,)
    trials: int = 1000
    seed: int = 1
    solvers: tuple = SOLVER_ORDER
    redistribute_after_interference: bool = False
    ilp_exhaustive_limit: int = 16

    def __post_init__(self):
        if self.sweep_var not in SWEEPABLE:
            raise ValueError(
                f"sweep variable {self.sweep_var!r} not one of {SWEEPABLE}"
            )
        if not self.sweep_values:
            raise ValueError("sweep_values must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.solvers:
            raise ValueError("at least one solver must be selected")
        for s in self.solvers:
            if s not in SOLVER_ORDER:
                raise ValueError(f"unknown solver {s!r}")
        if self.r0 <= 0:
            raise ValueError("r0 must be positive")


@dataclass
class TrialRecord:
    sweep_var: str
    sweep_value: float
    solver: str
    trial: int
    admitted: int
    total_power_mw: float
    est_int_pu1_mw: float
    est_int_pu2_mw: float
    true_int_pu1_mw: float
    true_int_pu2_mw: float
    rates: tuple
    wall_time: float


@dataclass
class SummaryRow:
    sweep_var: str
    sweep_value: float
    solver: str
    mean_admitted: float
    stderr: float


@dataclass
class TrialContext:
    """Everything the pipeline produced ahead of the allocators."""

    scenario: Scenario
    channels: ChannelSet
    estimates: ChannelEstimate
    bases: tuple
    beams: BeamformerSet
    problem: AdmissionProblem


def trial_rng(seed: int, sweep_value, trial_index: int) -> np.random.Generator:
    """Generator keyed on (seed, sweep value, trial) via the float's bits."""
    value_bits = int(np.float64(sweep_value).view(np.uint64))
    ss = np.random.SeedSequence(entropy=(int(seed), value_bits, int(trial_index)))
    return np.random.default_rng(ss)


def resolve_point(config: ExperimentConfig, sweep_value):
    """Geometry and constraint set with the sweep value substituted in."""
    geom = config.geometry
    p0_dbm, i0_dbm, r0 = config.p0_dbm, config.i0_dbm, config.r0
    if config.sweep_var == "K":
        geom = replace(geom, num_ue=int(sweep_value))
    elif config.sweep_var == "M_b":
        geom = replace(geom, m_bs=int(sweep_value))
    elif config.sweep_var == "P0_dbm":
        p0_dbm = float(sweep_value)
    elif config.sweep_var == "I0_dbm":
        i0_dbm = float(sweep_value)
    elif config.sweep_var == "R0":
        r0 = float(sweep_value)
    constraints = ConstraintSet(
        p0=dbm_to_mw(p0_dbm),
        i0=dbm_to_mw(i0_dbm),
        r0=r0,
        sigma_w_sq=dbm_to_mw(config.sigma_w_sq_dbm),
    )
    return geom, constraints


def prepare_trial(config: ExperimentConfig, sweep_value, trial_index: int) -> TrialContext:
    """Run the pipeline up to (and including) the admission problem."""
    geom, constraints = resolve_point(config, sweep_value)
    rng = trial_rng(config.seed, sweep_value, trial_index)
    scenario = make_scenario(geom, rng)
    channels = compute_channels(scenario, geom.gamma, rng)
    estimates = estimate_channels(channels, scenario, rng, config.estimation)
    bases = (
        interference_basis(estimates.sp_phi_hat[0], geom.m_bs),
        interference_basis(estimates.sp_phi_hat[1], geom.m_bs),
    )
    beams = design_beamformers(channels, estimates, bases)
    problem = AdmissionProblem(
        gamma=beams.gamma,
        g1=beams.g1,
        g2=beams.g2,
        alpha_hat_sq=estimates.sp_alpha_hat ** 2,
        constraints=constraints,
        ue_phi=np.array([link.phi for link in channels.ss_links]),
        pu_phi_hat=estimates.sp_phi_hat.copy(),
    )
    return TrialContext(
        scenario=scenario, channels=channels, estimates=estimates,
        bases=bases, beams=beams, problem=problem,
    )


def solve(problem: AdmissionProblem, solver: str, config: ExperimentConfig) -> AdmissionResult:
    if solver == "equal_power":
        return admission.equal_power_allocate(
            problem, config.redistribute_after_interference
        )
    if solver == "equal_rate":
        return admission.equal_rate_allocate(problem)
    if solver == "ilp":
        return admission.ilp_admit(
            problem, exhaustive_limit=config.ilp_exhaustive_limit
        )
    raise ValueError(f"unknown solver {solver!r}")


def run_trial(config: ExperimentConfig, sweep_value, trial_index: int):
    """One trial; returns one TrialRecord per selected solver."""
    ctx = prepare_trial(config, sweep_value, trial_index)
    records = []
    for solver in config.solvers:
        t0 = time.perf_counter()
        result = solve(ctx.problem, solver, config)
        elapsed = time.perf_counter() - t0
        true_int = admission.true_interference(result, ctx.channels, ctx.beams)
        records.append(TrialRecord(
            sweep_var=config.sweep_var,
            sweep_value=float(sweep_value),
            solver=solver,
            trial=trial_index,
            admitted=result.admitted_count,
            total_power_mw=float(result.p.sum()),
            est_int_pu1_mw=float(result.est_interference[0]),
            est_int_pu2_mw=float(result.est_interference[1]),
            true_int_pu1_mw=float(true_int[0]),
            true_int_pu2_mw=float(true_int[1]),
            rates=tuple(result.rates),
            wall_time=elapsed,
        ))
    return records


def _run_chunk(args):
    config, value, start, stop = args
    out = []
    for t in range(start, stop):
        out.extend(run_trial(config, value, t))
    return out


def _iter_record_chunks(config: ExperimentConfig, threads: int):
    """Chunks of records in deterministic order regardless of threads."""
    chunks = []
    for value in config.sweep_values:
        for start in range(0, config.trials, _CHUNK):
            stop = min(start + _CHUNK, config.trials)
            chunks.append((config, value, start, stop))
    if threads <= 1 or len(chunks) == 1:
        for chunk in chunks:
            yield _run_chunk(chunk)
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            yield from pool.map(_run_chunk, chunks)


def summarize(config: ExperimentConfig, records):
    """Mean admitted count and its standard error per (value, solver) cell."""
    counts = {}
    for r in records:
        counts.setdefault((r.sweep_value, r.solver), []).append(r.admitted)
    rows = []
    for value in config.sweep_values:
        for solver in config.solvers:
            cell = np.array(counts[(float(value), solver)], dtype=float)
            stderr = float(cell.std(ddof=1) / np.sqrt(cell.size)) if cell.size > 1 else 0.0
            rows.append(SummaryRow(
                sweep_var=config.sweep_var,
                sweep_value=float(value),
                solver=solver,
                mean_admitted=float(cell.mean()),
                stderr=stderr,
            ))
    return rows


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".9g")
    return str(x)


def write_records_csv(path, records):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_FIELDS)
        for r in records:
            writer.writerow([_fmt(getattr(r, f)) for f in RECORD_FIELDS])


def write_summary_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_FIELDS)
        for r in rows:
            writer.writerow([_fmt(getattr(r, f)) for f in SUMMARY_FIELDS])


def run_sweep(config: ExperimentConfig, threads: int = 1, out_dir=None):
    """Run the full sweep; optionally stream records.csv and write summary.csv.

    Output is byte-identical for a fixed (config, seed) regardless of
    threads: trial seeds ignore chunking and records are emitted in sweep
    order.
    """
    records = []
    writer = None
    fh = None
    if out_dir is not None:
        fh = open(f"{out_dir}/records.csv", "w", newline="")
        writer = csv.writer(fh)
        writer.writerow(RECORD_FIELDS)
    try:
        for chunk in _iter_record_chunks(config, threads):
            records.extend(chunk)
            if writer is not None:
                for r in chunk:
                    writer.writerow([_fmt(getattr(r, f)) for f in RECORD_FIELDS])
    finally:
        if fh is not None:
            fh.close()
    summary = summarize(config, records)
    if out_dir is not None:
        write_summary_csv(f"{out_dir}/summary.csv", summary)
    return records, summary
