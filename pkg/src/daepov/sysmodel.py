"""Symbolic LTI difference-algebraic systems and their constraint matrices.

A system of ``M`` variables is described by linear equations of two kinds:
algebraic (instantaneous only) and difference (at least one lagged term).
Every equation designates an output variable whose instantaneous coefficient
is nonzero, which makes the system simulatable and fixes the row
normalization of the assembled constraint matrix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedSystemError

ALGEBRAIC = "algebraic"
DIFFERENCE = "difference"

#: relative singular-value cutoff for exact-arithmetic rank decisions
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class Equation:
    """One linear relation ``sum_j coeff_j * x[var_j][k - lag_j] = 0``.

    ``output`` is the variable the equation is solved for during simulation;
    its lag-0 coefficient must be nonzero.
    """

    kind: str
    output: int
    terms: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((int(v), int(l), float(c)) for v, l, c in self.terms))
        if self.kind not in (ALGEBRAIC, DIFFERENCE):
            raise MalformedSystemError(f"unknown equation kind {self.kind!r}")

    @property
    def max_lag(self) -> int:
        return max(lag for _, lag, _ in self.terms)

    def output_coefficient(self) -> float:
        for var, lag, coeff in self.terms:
            if var == self.output and lag == 0:
                return coeff
        return 0.0


@dataclass(frozen=True)
class LtiDaeSystem:
    """An LTI-DAE system: named variables plus algebraic/difference equations.

    ``eta`` is the maximum lag order; it defaults to the largest lag that
    appears in any equation but may be declared larger (rows are then padded
    with zeros).
    """

    variables: tuple[str, ...]
    equations: tuple[Equation, ...]
    eta: int | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(str(v) for v in self.variables))
        object.__setattr__(self, "equations", tuple(self.equations))
        if not self.equations:
            raise MalformedSystemError("a system needs at least one equation")
        max_lag = max(eq.max_lag for eq in self.equations)
        eta = max_lag if self.eta is None else int(self.eta)
        if eta < max_lag:
            raise MalformedSystemError(f"eta={eta} smaller than largest equation lag {max_lag}")
        object.__setattr__(self, "eta", eta)
        self._validate()

    def _validate(self):
        M = len(self.variables)
        if len(set(self.variables)) != M:
            raise MalformedSystemError("duplicate variable names")
        if len(self.equations) >= M:
            raise MalformedSystemError(
                f"{len(self.equations)} equations over {M} variables leaves no free variable"
            )
        for i, eq in enumerate(self.equations):
            seen = set()
            for var, lag, coeff in eq.terms:
                if not 0 <= var < M:
                    raise MalformedSystemError(f"equation {i}: variable index {var} out of range")
                if not 0 <= lag <= self.eta:
                    raise MalformedSystemError(f"equation {i}: lag {lag} outside [0, {self.eta}]")
                if (var, lag) in seen:
                    raise MalformedSystemError(
                        f"equation {i}: duplicate term for variable {var} at lag {lag}"
                    )
                seen.add((var, lag))
            if eq.kind == ALGEBRAIC and eq.max_lag != 0:
                raise MalformedSystemError(f"equation {i}: algebraic equation has lagged terms")
            if eq.kind == DIFFERENCE and eq.max_lag < 1:
                raise MalformedSystemError(f"equation {i}: difference equation has no lagged term")
            if eq.output_coefficient() == 0.0:
                raise MalformedSystemError(
                    f"equation {i}: output variable {eq.output} needs a nonzero lag-0 coefficient"
                )

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_algebraic(self) -> int:
        return sum(eq.kind == ALGEBRAIC for eq in self.equations)

    @property
    def n_difference(self) -> int:
        return sum(eq.kind == DIFFERENCE for eq in self.equations)

    @property
    def output_variables(self) -> tuple[int, ...]:
        return tuple(eq.output for eq in self.equations)

    @property
    def source_variables(self) -> tuple[int, ...]:
        """Variables not designated as any equation's output."""
        outs = set(self.output_variables)
        return tuple(i for i in range(self.n_variables) if i not in outs)


@dataclass(frozen=True)
class ConstraintMatrix:
    """Dense constraint matrix over instantaneous and lagged variable columns.

    Column ``lag * M + var`` carries the coefficient of variable ``var`` at
    lag ``lag``; the first ``M`` columns therefore form the instantaneous
    block.
    """

    entries: np.ndarray
    variables: tuple[str, ...]
    eta: int

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return self.entries.shape[0]

    @property
    def instantaneous(self) -> np.ndarray:
        return self.entries[:, : self.n_variables]

    @property
    def lagged(self) -> np.ndarray:
        return self.entries[:, self.n_variables :]

    def column_index(self, var: int, lag: int) -> int:
        return lag * self.n_variables + var

    def row_orders(self) -> np.ndarray:
        """Effective lag order of each row (largest lag block with a nonzero entry)."""
        M = self.n_variables
        orders = np.zeros(self.n_rows, dtype=int)
        for lag in range(self.eta + 1):
            block = self.entries[:, lag * M : (lag + 1) * M]
            orders[np.any(block != 0.0, axis=1)] = lag
        return orders

    def padded_to_lag(self, L: int) -> np.ndarray:
        """All shifted copies of the rows over an ``M * (L+1)``-column window.

        A row of effective order ``eta_r`` yields ``L - eta_r + 1`` shifts, so
        the stack has ``(L+1) n_a + sum_i (L - eta_i + 1)`` rows over the
        difference equations of orders ``eta_i``.
        """
        M = self.n_variables
        if L < self.eta:
            raise ValueError(f"padding lag {L} below system order {self.eta}")
        orders = self.row_orders()
        rows = []
        for r in range(self.n_rows):
            width = (orders[r] + 1) * M
            base = self.entries[r, :width]
            for shift in range(L - orders[r] + 1):
                row = np.zeros(M * (L + 1))
                row[shift * M : shift * M + width] = base
                rows.append(row)
        return np.asarray(rows)


@dataclass(frozen=True)
class GroundTruthPartition:
    """Rank verdict for one candidate dependent set (noise-free oracle)."""

    dependent: tuple[int, ...]
    rank: int
    admissible: bool
    free: tuple[int, ...]


def build_constraint_matrix(system: LtiDaeSystem) -> ConstraintMatrix:
    """Assemble the system's constraint matrix ``A`` so that ``A x[k, eta] = 0``.

    Each row collects one equation with every term moved to the left-hand
    side and is scaled so the output variable's lag-0 coefficient is +1.
    """
    M = system.n_variables
    A = np.zeros((len(system.equations), M * (system.eta + 1)))
    for r, eq in enumerate(system.equations):
        scale = eq.output_coefficient()
        for var, lag, coeff in eq.terms:
            A[r, lag * M + var] = coeff / scale
    return ConstraintMatrix(entries=A, variables=system.variables, eta=system.eta)


def numerical_rank(mat: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Count singular values above ``rtol`` times the largest one."""
    s = np.linalg.svd(np.atleast_2d(mat), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def ground_truth_partitions(
    A: ConstraintMatrix, rtol: float = RANK_RTOL
) -> list[GroundTruthPartition]:
    """Rank-test every size-``n_rows`` dependent set against the instantaneous block.

    A subset is admissible when the square submatrix of instantaneous columns
    has full numerical rank; the complement is then a valid free-variable
    (pure source) set. Subsets are returned in lexicographic order.
    """
    M = A.n_variables
    n_dep = A.n_rows
    if n_dep > M:
        raise MalformedSystemError("more constraint rows than variables")
    inst = A.instantaneous
    out = []
    for subset in itertools.combinations(range(M), n_dep):
        sub = inst[:, subset]
        rank = numerical_rank(sub, rtol=rtol)
        free = tuple(i for i in range(M) if i not in subset)
        out.append(
            GroundTruthPartition(
                dependent=subset, rank=rank, admissible=rank == n_dep, free=free
            )
        )
    return out


def theoretical_constraint_count(A: ConstraintMatrix, L: int) -> int:
    """Number of shifted constraint rows at stacking lag ``L``."""
    orders = A.row_orders()
    return int(np.sum(L - orders + 1))


def admissible_sets(partitions: list[GroundTruthPartition]) -> set[tuple[int, ...]]:
    return {p.dependent for p in partitions if p.admissible}


def count_partitions(M: int, n_dep: int) -> int:
    return math.comb(M, n_dep)
