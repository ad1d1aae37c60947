"""Scaled lagged data matrices.

The stacked matrix puts sample ``k`` of every variable first, then the
lag-1 copies, up to lag ``L`` — the same column order as the constraint
matrices — and carries the ``1/sqrt(N)`` factor so its singular values sit
on the covariance scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataTooShortError


@dataclass(frozen=True)
class LagMatrix:
    entries: np.ndarray
    n_variables: int
    lag: int
    centered: bool

    @property
    def n_rows(self) -> int:
        return self.entries.shape[0]

    def column_index(self, var: int, lag: int) -> int:
        return lag * self.n_variables + var

    def column_of(self, col: int) -> tuple[int, int]:
        """Inverse of :meth:`column_index`: column -> (variable, lag)."""
        return col % self.n_variables, col // self.n_variables


def build_lag_matrix(measurements, L: int, center: bool = True) -> LagMatrix:
    """Stack measurements with lags 0..L into an ``(N_total - L) x M(L+1)`` matrix.

    Row ``r`` holds ``[z_1[k] .. z_M[k], z_1[k-1] .. z_M[k-L]]`` for
    ``k = L + r``; columns are optionally mean-centered, then everything is
    scaled by ``1/sqrt(N)``.
    """
    X = np.asarray(measurements, dtype=float)
    if X.ndim != 2:
        raise ValueError("measurements must be a 2-D (variables x samples) array")
    if L < 0:
        raise ValueError("lag must be nonnegative")
    M, n_total = X.shape
    cols = M * (L + 1)
    if n_total - L <= cols:
        raise DataTooShortError(
            f"{n_total} samples give {n_total - L} stacked rows for {cols} columns; "
            "need more rows than columns"
        )
    N = n_total - L
    Z = np.empty((N, cols))
    for lag in range(L + 1):
        Z[:, lag * M : (lag + 1) * M] = X[:, L - lag : n_total - lag].T
    if center:
        Z -= Z.mean(axis=0)
    Z /= np.sqrt(N)
    return LagMatrix(entries=Z, n_variables=M, lag=L, centered=center)
