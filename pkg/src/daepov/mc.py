"""Monte Carlo harness: repeated simulate -> corrupt -> discover runs.

Per-combination admissibility decisions are tallied against the noise-free
rank oracle to produce type I (false positive) and type II (false negative)
rates. Per-run seeds derive from the base seed and run index alone, so the
table is identical no matter how runs are scheduled.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, NoAdmissiblePartitionError, PovError
from .pipeline import DiscoverOptions, discover
from .simulate import SourceSignalSpec, add_noise, simulate_noise_free
from .sysmodel import LtiDaeSystem, build_constraint_matrix, ground_truth_partitions


@dataclass(frozen=True)
class McConfig:
    system: LtiDaeSystem
    sources: tuple[SourceSignalSpec, ...]
    snr: tuple[float, ...]
    n_total: int
    runs: int
    base_seed: int = 0
    burn_in: int = 500
    options: DiscoverOptions = field(default_factory=DiscoverOptions)

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigurationError("runs must be at least 1")


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one realization."""

    run: int
    structure: tuple[int, int, int] | None
    admissible: dict[tuple[int, ...], bool] | None
    sigmas: np.ndarray | None
    true_sigmas: np.ndarray
    error: str | None


@dataclass(frozen=True)
class ErrorRow:
    dependent: tuple[int, ...]
    truth_admissible: bool
    observed_admissible: int
    type1_pct: float | None
    type2_pct: float | None


@dataclass(frozen=True)
class ErrorTable:
    rows: tuple[ErrorRow, ...]
    runs: int
    failed_runs: int
    records: tuple[RunRecord, ...]


def run_seeds(base_seed: int, run: int) -> tuple[int, int]:
    """Deterministic (simulation, noise) seed pair for one run."""
    state = np.random.SeedSequence([int(base_seed), int(run)]).generate_state(2)
    return int(state[0]), int(state[1])


def _one_run(cfg: McConfig, run: int, n_dep_true: int) -> RunRecord:
    sim_seed, noise_seed = run_seeds(cfg.base_seed, run)
    traj = simulate_noise_free(
        cfg.system, list(cfg.sources), cfg.n_total, burn_in=cfg.burn_in, seed=sim_seed
    )
    meas = add_noise(traj, snr=cfg.snr, seed=noise_seed)
    try:
        report = discover(meas.data, names=cfg.system.variables, options=cfg.options)
        structure = (report.structure.n_a, report.structure.n_d, report.structure.n_s)
        partitions = report.partitions
        sigmas = report.noise.sigmas
        error = None
    except NoAdmissiblePartitionError as err:
        structure = (err.structure.n_a, err.structure.n_d, err.structure.n_s)
        partitions = err.partitions
        sigmas = err.noise.sigmas
        error = "no-admissible-partition"
    except PovError as err:
        return RunRecord(
            run=run,
            structure=None,
            admissible=None,
            sigmas=None,
            true_sigmas=meas.true_sigmas,
            error=f"{type(err).__name__}: {err}",
        )
    # combination verdicts are only comparable when the dependent-set size matches
    admissible = None
    if structure[0] + structure[1] == n_dep_true:
        admissible = {p.dependent: p.admissible for p in partitions}
    return RunRecord(
        run=run,
        structure=structure,
        admissible=admissible,
        sigmas=sigmas,
        true_sigmas=meas.true_sigmas,
        error=error,
    )


def run_montecarlo(cfg: McConfig, workers: int = 1) -> ErrorTable:
    """Tally per-combination type I / type II rates over ``cfg.runs`` realizations.

    Percentages use the total run count as denominator. Runs whose pipeline
    fails outright (or estimates a different dependent-set size) are counted
    against every truly-admissible combination and reported in
    ``failed_runs``; runs that merely find no admissible partition still
    contribute their per-combination verdicts.
    """
    truth = ground_truth_partitions(build_constraint_matrix(cfg.system))
    n_dep_true = len(truth[0].dependent)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda r: _one_run(cfg, r, n_dep_true), range(cfg.runs)))
    else:
        records = [_one_run(cfg, r, n_dep_true) for r in range(cfg.runs)]

    failed = sum(1 for rec in records if rec.admissible is None)
    rows = []
    for part in truth:
        votes = [rec.admissible[part.dependent] for rec in records if rec.admissible is not None]
        observed = sum(votes)
        if part.admissible:
            misses = sum(1 for v in votes if not v) + failed
            row = ErrorRow(
                dependent=part.dependent,
                truth_admissible=True,
                observed_admissible=observed,
                type1_pct=None,
                type2_pct=100.0 * misses / cfg.runs,
            )
        else:
            row = ErrorRow(
                dependent=part.dependent,
                truth_admissible=False,
                observed_admissible=observed,
                type1_pct=100.0 * observed / cfg.runs,
                type2_pct=None,
            )
        rows.append(row)
    return ErrorTable(
        rows=tuple(rows), runs=cfg.runs, failed_runs=failed, records=tuple(records)
    )
