"""Noise-free trajectory generation and heteroskedastic measurement noise.

Sources (variables that are no equation's output) are driven by explicit
signal generators; every other variable is computed from its equation, with
difference outputs depending only on lagged values and algebraic outputs
solved in topological order of their instantaneous dependencies.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass

import numpy as np

from .errors import CannotSetSnrError, ConfigurationError, UnsupportedSystemError
from .sysmodel import LtiDaeSystem, build_constraint_matrix


class GaussianWhite:
    """I.i.d. Gaussian samples with the given mean and variance."""

    def __init__(self, mean: float = 0.0, variance: float = 1.0):
        if variance < 0:
            raise ConfigurationError("variance must be nonnegative")
        self.mean = float(mean)
        self.variance = float(variance)

    def generate(self, n: int, rng: np.random.Generator, burn_in: int) -> np.ndarray:
        return rng.normal(self.mean, np.sqrt(self.variance), size=n)

    def to_dict(self):
        return {"kind": "gaussian", "mean": self.mean, "variance": self.variance}


class Prbs:
    """Random binary signal at +/- amplitude; ``band`` is the per-step switch probability."""

    def __init__(self, amplitude: float = 1.0, band: float = 0.1):
        if not 0.0 < band <= 1.0:
            raise ConfigurationError("band must lie in (0, 1]")
        self.amplitude = float(amplitude)
        self.band = float(band)

    def generate(self, n, rng, burn_in):
        flips = rng.random(n) < self.band
        flips[0] = False
        sign = rng.choice([-1.0, 1.0])
        signs = sign * np.cumprod(np.where(flips, -1.0, 1.0))
        return self.amplitude * signs

    def to_dict(self):
        return {"kind": "prbs", "amplitude": self.amplitude, "band": self.band}


class Step:
    """Zero until ``time`` (counted from the first retained sample), then ``height``."""

    def __init__(self, time: int = 0, height: float = 1.0):
        self.time = int(time)
        self.height = float(height)

    def generate(self, n, rng, burn_in):
        out = np.zeros(n)
        start = max(burn_in + self.time, 0)
        out[start:] = self.height
        return out

    def to_dict(self):
        return {"kind": "step", "time": self.time, "height": self.height}


class External:
    """Caller-supplied samples; must cover burn-in plus the retained window."""

    def __init__(self, samples):
        self.samples = np.asarray(samples, dtype=float).ravel()

    def generate(self, n, rng, burn_in):
        if self.samples.size < n:
            raise ConfigurationError(
                f"external source supplies {self.samples.size} samples, {n} needed "
                "(burn-in included)"
            )
        return self.samples[:n].copy()

    def to_dict(self):
        return {"kind": "external", "samples": self.samples.tolist()}


@dataclass(frozen=True)
class SourceSignalSpec:
    """Binds one free variable to a signal generator.

    ``seed_offset`` decorrelates sources sharing a simulation seed; it
    defaults to the variable index.
    """

    variable: int
    signal: object = None
    seed_offset: int | None = None

    def __post_init__(self):
        if self.signal is None:
            object.__setattr__(self, "signal", GaussianWhite())

    @property
    def offset(self) -> int:
        return self.variable if self.seed_offset is None else self.seed_offset


@dataclass(frozen=True)
class Trajectory:
    """Noise-free samples, one row per variable."""

    data: np.ndarray
    names: tuple[str, ...]


@dataclass(frozen=True)
class MeasurementSet:
    """Trajectory plus additive Gaussian measurement noise."""

    data: np.ndarray
    true_sigmas: np.ndarray
    snr: np.ndarray
    seed: int
    names: tuple[str, ...]


def _solve_order(system: LtiDaeSystem, source_vars: set[int]) -> list[int]:
    """Topological order of equation indices by instantaneous dependencies."""
    out_of = {eq.output: i for i, eq in enumerate(system.equations)}
    graph: dict[int, set[int]] = {}
    for i, eq in enumerate(system.equations):
        deps = set()
        for var, lag, coeff in eq.terms:
            if lag == 0 and var != eq.output and coeff != 0.0 and var not in source_vars:
                deps.add(out_of[var])
        graph[i] = deps
    try:
        return list(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as err:
        raise UnsupportedSystemError(
            "instantaneous dependencies form an algebraic loop"
        ) from err


def simulate_noise_free(
    system: LtiDaeSystem,
    sources: list[SourceSignalSpec],
    n_total: int,
    burn_in: int = 500,
    seed: int = 0,
) -> Trajectory:
    """Run the system forward and return the post-burn-in trajectory.

    Initial conditions are zero. Per-source RNG streams derive from
    ``(seed, source offset)``, so results are reproducible regardless of how
    many sources there are or in which order they are listed.
    """
    M = system.n_variables
    eta = system.eta
    if n_total <= eta:
        raise ConfigurationError(f"n_total={n_total} must exceed the lag order {eta}")
    src_vars = {s.variable for s in sources}
    expected = set(system.source_variables)
    if src_vars != expected:
        raise ConfigurationError(
            f"sources {sorted(src_vars)} do not match the non-output variables {sorted(expected)}"
        )
    if len(src_vars) != len(sources):
        raise ConfigurationError("duplicate source specification")

    order = _solve_order(system, src_vars)
    total = burn_in + n_total
    x = np.zeros((M, eta + total))
    for spec in sources:
        rng = np.random.default_rng([int(seed), int(spec.offset)])
        x[spec.variable, eta:] = spec.signal.generate(total, rng, burn_in)

    # (coefficients, column offsets) per equation, output term excluded
    compiled = []
    for i in order:
        eq = system.equations[i]
        c0 = eq.output_coefficient()
        coeffs = [c for v, l, c in eq.terms if not (v == eq.output and l == 0)]
        refs = [(v, l) for v, l, c in eq.terms if not (v == eq.output and l == 0)]
        compiled.append((eq.output, c0, tuple(refs), np.asarray(coeffs)))

    for k in range(eta, eta + total):
        for out, c0, refs, coeffs in compiled:
            acc = 0.0
            for (v, l), c in zip(refs, coeffs):
                acc += c * x[v, k - l]
            x[out, k] = -acc / c0

    data = x[:, eta + burn_in :].copy()
    _check_residuals(system, x[:, burn_in:])
    return Trajectory(data=data, names=system.variables)


def _check_residuals(system, window, tol=1e-8):
    """Guard against solve-order bugs: constraints must annihilate the trajectory."""
    A = build_constraint_matrix(system)
    M, n = window.shape
    eta = system.eta
    stacked = np.vstack([window[:, eta - l : n - l] for l in range(eta + 1)])
    resid = A.entries @ stacked
    scale = max(np.max(np.abs(window)), 1.0)
    worst = np.max(np.abs(resid)) if resid.size else 0.0
    if worst > tol * scale:
        raise UnsupportedSystemError(
            f"simulated trajectory violates its own constraints (residual {worst:.3e})"
        )


def add_noise(traj: Trajectory, snr, seed: int = 0) -> MeasurementSet:
    """Add independent Gaussian noise sized to per-variable SNR targets.

    SNR is the variance ratio var(x_i) / var(e_i) computed on the retained
    noise-free trajectory, so ``sigma_i = sqrt(var(x_i) / snr_i)``.
    """
    data = traj.data
    M, n = data.shape
    snr = np.broadcast_to(np.asarray(snr, dtype=float), (M,)).copy()
    if np.any(snr <= 0):
        raise ConfigurationError("snr targets must be positive")
    variances = data.var(axis=1)
    if np.any(variances == 0.0):
        dead = [traj.names[i] for i in np.flatnonzero(variances == 0.0)]
        raise CannotSetSnrError(f"zero-variance variable(s) {dead}: SNR target is meaningless")
    sigmas = np.sqrt(variances / snr)
    rng = np.random.default_rng(int(seed))
    noisy = data + sigmas[:, None] * rng.standard_normal((M, n))
    return MeasurementSet(
        data=noisy, true_sigmas=sigmas, snr=snr, seed=int(seed), names=traj.names
    )
