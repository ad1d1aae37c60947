"""End-to-end discovery: measurements in, source report out.

Stages: noise estimation at the working lag, algebraic count at lag 0,
difference count from the unity-count slope, then partition scoring on the
unity basis and source classification. Every intermediate artifact is kept
on the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import pov
from .dipca import DEFAULT_UNITY_CEILING, NoiseModel, count_unity, estimate_noise, scaled_spectrum
from .errors import NoAdmissiblePartitionError, PovError, StructuralMismatchError
from .pov import DEFAULT_COMBINATION_CAP, DEFAULT_THRESHOLD, PartitionResult, SourceReport
from .structure import StructureEstimate, nd_from_counts
from .errors import NoFreeVariablesError


@dataclass(frozen=True)
class DiscoverOptions:
    lag_max: int = 5
    lag2: int | None = None
    threshold: float = DEFAULT_THRESHOLD
    unity_ceiling: float = DEFAULT_UNITY_CEILING
    center: bool = True
    max_combinations: int = DEFAULT_COMBINATION_CAP

    def to_dict(self):
        return {
            "lag_max": self.lag_max,
            "lag2": self.lag2,
            "threshold": self.threshold,
            "unity_ceiling": self.unity_ceiling,
            "center": self.center,
            "max_combinations": self.max_combinations,
        }


@dataclass(frozen=True)
class DiscoveryReport:
    names: tuple[str, ...]
    noise: NoiseModel
    structure: StructureEstimate
    partitions: tuple[PartitionResult, ...]
    sources: SourceReport
    options: DiscoverOptions
    spectrum: np.ndarray = field(repr=False, default=None)


def _staged(stage, exc):
    if isinstance(exc, NoAdmissiblePartitionError):
        return exc
    wrapped = type(exc)(f"[{stage}] {exc}")
    wrapped.__cause__ = exc
    return wrapped


def discover(measurements, names=None, options: DiscoverOptions | None = None) -> DiscoveryReport:
    """Run the full pure-source discovery algorithm on raw measurements.

    ``measurements`` is an M x N array (row per variable). Raises a
    :class:`~daepov.errors.PovError` subclass labelled with the failing stage;
    a :class:`~daepov.errors.NoAdmissiblePartitionError` still carries the
    scored partitions.
    """
    opts = options or DiscoverOptions()
    X = np.asarray(measurements, dtype=float)
    M = X.shape[0]
    names = tuple(names) if names is not None else tuple(f"z{i + 1}" for i in range(M))
    if len(names) != M:
        raise ValueError(f"{len(names)} names for {M} variables")

    try:
        noise = estimate_noise(
            X, opts.lag_max, center=opts.center, unity_ceiling=opts.unity_ceiling
        )
    except PovError as err:
        raise _staged("estimate-noise", err) from err

    try:
        basis0 = scaled_spectrum(
            X, 0, noise, unity_ceiling=opts.unity_ceiling, center=opts.center
        )
        n_a = count_unity(basis0.singular_values, opts.unity_ceiling)
        lag2 = opts.lag2 if opts.lag2 is not None else (0 if n_a > 0 else 1)
        basis_L = scaled_spectrum(
            X, opts.lag_max, noise, unity_ceiling=opts.unity_ceiling, center=opts.center
        )
        d1 = count_unity(basis_L.singular_values, opts.unity_ceiling)
        if lag2 == 0:
            d2 = n_a
        else:
            d2 = count_unity(
                scaled_spectrum(
                    X, lag2, noise, unity_ceiling=opts.unity_ceiling, center=opts.center
                ).singular_values,
                opts.unity_ceiling,
            )
        n_d = nd_from_counts(d1, opts.lag_max, d2, lag2, n_a)
        n_s = M - n_a - n_d
        if n_s <= 0:
            raise NoFreeVariablesError(
                f"n_a={n_a}, n_d={n_d} leave no free variables among M={M}"
            )
        structure = StructureEstimate(
            n_a=n_a,
            n_d=n_d,
            n_s=n_s,
            d_at_lag={0: n_a, int(lag2): d2, int(opts.lag_max): d1},
            lags=(int(opts.lag_max), int(lag2)),
        )
    except PovError as err:
        raise _staged("estimate-structure", err) from err

    # the constraint count assumed while estimating noise and the unity count
    # of the resulting spectrum must agree, else a threshold is misconfigured
    if d1 != noise.d_used:
        raise StructuralMismatchError(
            f"[consistency] unity count {d1} at lag {opts.lag_max} disagrees with the "
            f"constraint count {noise.d_used} used for noise estimation"
        )

    n_dep = n_a + n_d
    try:
        partitions = pov.enumerate_partitions(
            basis_L, n_dep, opts.threshold, max_combinations=opts.max_combinations
        )
    except PovError as err:
        raise _staged("partition", err) from err

    try:
        sources = pov.classify_sources(partitions, threshold=opts.threshold)
    except NoAdmissiblePartitionError as err:
        # keep the run's evidence available to callers that tally outcomes
        err.structure = structure
        err.noise = noise
        raise
    return DiscoveryReport(
        names=names,
        noise=noise,
        structure=structure,
        partitions=tuple(partitions),
        sources=sources,
        options=opts,
        spectrum=basis_L.singular_values,
    )
