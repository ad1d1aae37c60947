"""Partition-of-variables scoring and pure-source classification.

Every size-``n_dep`` subset of variables is treated as a candidate dependent
set; the square submatrix of the constraint basis's instantaneous columns is
scored by its condition number. Well-conditioned subsets are admissible, and
their complements are candidate pure-source sets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .dipca import ConstraintBasis
from .errors import (
    NoAdmissiblePartitionError,
    StructuralMismatchError,
    TooManyCombinationsError,
)

DEFAULT_THRESHOLD = 10.0
DEFAULT_COMBINATION_CAP = 10**6


@dataclass(frozen=True)
class PartitionResult:
    dependent: tuple[int, ...]
    cond: float
    admissible: bool
    free: tuple[int, ...]


@dataclass(frozen=True)
class SourceReport:
    unambiguous: tuple[int, ...]
    ambiguous: tuple[int, ...]
    admissible: tuple[PartitionResult, ...]
    threshold: float | None


def condition_number(mat) -> float:
    """``sigma_max / sigma_min`` of a square matrix; +inf when numerically singular."""
    A = np.asarray(mat, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"condition number needs a square matrix, got shape {A.shape}")
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] < 1e-300:
        return math.inf
    return float(s[0] / s[-1])


def instantaneous_coefficients(basis: ConstraintBasis, n_dep: int) -> np.ndarray:
    """Canonical ``n_dep x M`` instantaneous coefficient matrix of a basis.

    At stacking lags above the system order the unity group holds more rows
    than there are equations, but every row's instantaneous part lies in the
    row space of the true instantaneous coefficients. The principal ``n_dep``
    right singular vectors of the stacked instantaneous block recover that
    row space with all rows contributing, and are invariant to the unknown
    rotation of the basis. Row signs are fixed for determinism.
    """
    M = basis.n_variables
    if basis.n_rows < n_dep:
        raise StructuralMismatchError(
            f"constraint basis has {basis.n_rows} rows, need at least n_dep={n_dep}"
        )
    block = basis.rows[:, :M]
    _, _, Vt = np.linalg.svd(block, full_matrices=False)
    inst = Vt[:n_dep].copy()
    for r in range(inst.shape[0]):
        lead = int(np.argmax(np.abs(inst[r]) >= np.abs(inst[r]).max()))
        if inst[r, lead] < 0:
            inst[r] = -inst[r]
    return inst


def enumerate_partitions(
    basis: ConstraintBasis,
    n_dep: int,
    threshold: float = DEFAULT_THRESHOLD,
    *,
    max_combinations: int = DEFAULT_COMBINATION_CAP,
) -> list[PartitionResult]:
    """Score all C(M, n_dep) candidate dependent sets, worst-conditioned first.

    The square matrix under test for each subset is the corresponding column
    selection of the canonical instantaneous coefficient matrix (see
    :func:`instantaneous_coefficients`). Ties in the descending
    condition-number ordering are broken lexicographically by dependent set.
    """
    M = basis.n_variables
    total = math.comb(M, n_dep)
    if total > max_combinations:
        raise TooManyCombinationsError(
            f"C({M}, {n_dep}) = {total} exceeds the cap of {max_combinations}"
        )
    inst = instantaneous_coefficients(basis, n_dep)
    results = []
    for subset in itertools.combinations(range(M), n_dep):
        cond = condition_number(inst[:, subset])
        free = tuple(i for i in range(M) if i not in subset)
        results.append(
            PartitionResult(dependent=subset, cond=cond, admissible=cond < threshold, free=free)
        )
    results.sort(key=lambda p: (-p.cond, p.dependent))
    return results


def classify_sources(
    partitions: list[PartitionResult], threshold: float | None = None
) -> SourceReport:
    """Split pure-source candidates into unambiguous and ambiguous sets.

    Unambiguous sources appear in the free set of every admissible partition;
    ambiguous ones appear in some but not all.
    """
    admissible = [p for p in partitions if p.admissible]
    if not admissible:
        min_cond = min((p.cond for p in partitions), default=math.inf)
        raise NoAdmissiblePartitionError(
            f"no admissible partition; smallest condition number was {min_cond:.4g}",
            min_cond=min_cond,
            partitions=partitions,
        )
    free_sets = [set(p.free) for p in admissible]
    everywhere = set.intersection(*free_sets)
    anywhere = set.union(*free_sets)
    return SourceReport(
        unambiguous=tuple(sorted(everywhere)),
        ambiguous=tuple(sorted(anywhere - everywhere)),
        admissible=tuple(admissible),
        threshold=threshold,
    )
