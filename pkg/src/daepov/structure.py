"""Constraint counting: algebraic / difference equation counts from unity spectra.

At stacking lag ``L`` the number of unity singular values is
``d_L = (L+1) n_a + sum_i (L - eta_i + 1) n_di``, so ``n_a`` is the count at
lag 0 and ``n_d`` follows from the slope of ``d_L`` between two lags.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dipca import DEFAULT_UNITY_CEILING, NoiseModel, count_unity, scaled_spectrum
from .errors import InconsistentCountsError, NoFreeVariablesError

#: how far from an integer the (d1-d2)/(L1-L2) quotient may fall
INTEGER_TOLERANCE = 0.05


@dataclass(frozen=True)
class StructureEstimate:
    n_a: int
    n_d: int
    n_s: int
    d_at_lag: dict[int, int]
    lags: tuple[int, int]


def nd_from_counts(d1: int, L1: int, d2: int, L2: int, n_a: int) -> int:
    """Difference-equation count from unity counts at two lags.

    Solves ``(d1 - d2) / (L1 - L2) - n_a`` and fails loudly when the quotient
    is not an integer or comes out negative — both symptoms of lags below the
    system order or a miscounted spectrum.
    """
    if L1 <= L2:
        raise ValueError(f"need L1 > L2, got {L1} <= {L2}")
    q = (d1 - d2) / (L1 - L2) - n_a
    n_d = round(q)
    if abs(q - n_d) > INTEGER_TOLERANCE:
        raise InconsistentCountsError(
            f"counts d={d1}@L={L1}, d={d2}@L={L2}, n_a={n_a} give non-integer n_d={q:.3f}"
        )
    if n_d < 0:
        raise InconsistentCountsError(
            f"counts d={d1}@L={L1}, d={d2}@L={L2}, n_a={n_a} give negative n_d={n_d}"
        )
    return int(n_d)


def estimate_na(
    measurements,
    noise: NoiseModel,
    *,
    unity_ceiling: float = DEFAULT_UNITY_CEILING,
    center: bool = True,
) -> int:
    """Algebraic constraint count: unity singular values at lag 0."""
    basis = scaled_spectrum(measurements, 0, noise, unity_ceiling=unity_ceiling, center=center)
    return count_unity(basis.singular_values, unity_ceiling)


def estimate_nd(
    measurements,
    noise: NoiseModel,
    L1: int,
    L2: int,
    n_a: int,
    *,
    unity_ceiling: float = DEFAULT_UNITY_CEILING,
    center: bool = True,
) -> int:
    d1 = count_unity(
        scaled_spectrum(
            measurements, L1, noise, unity_ceiling=unity_ceiling, center=center
        ).singular_values,
        unity_ceiling,
    )
    d2 = count_unity(
        scaled_spectrum(
            measurements, L2, noise, unity_ceiling=unity_ceiling, center=center
        ).singular_values,
        unity_ceiling,
    )
    return nd_from_counts(d1, L1, d2, L2, n_a)


def estimate_structure(
    measurements,
    noise: NoiseModel,
    L1: int,
    L2: int | None = None,
    *,
    unity_ceiling: float = DEFAULT_UNITY_CEILING,
    center: bool = True,
) -> StructureEstimate:
    """Estimate (n_a, n_d, n_S) from unity counts at lags 0, L2 and L1.

    ``L2`` defaults to 0 when algebraic constraints are present (that count
    is already available) and to 1 otherwise.
    """
    import numpy as np

    M = np.asarray(measurements).shape[0]
    spectrum = lambda L: scaled_spectrum(
        measurements, L, noise, unity_ceiling=unity_ceiling, center=center
    ).singular_values
    d0 = count_unity(spectrum(0), unity_ceiling)
    n_a = d0
    if L2 is None:
        L2 = 0 if n_a > 0 else 1
    d1 = count_unity(spectrum(L1), unity_ceiling)
    d2 = d0 if L2 == 0 else count_unity(spectrum(L2), unity_ceiling)
    n_d = nd_from_counts(d1, L1, d2, L2, n_a)
    n_s = M - n_a - n_d
    if n_s <= 0:
        raise NoFreeVariablesError(
            f"n_a={n_a}, n_d={n_d} leave no free variables among M={M}"
        )
    return StructureEstimate(
        n_a=n_a,
        n_d=n_d,
        n_s=n_s,
        d_at_lag={0: d0, int(L2): d2, int(L1): d1},
        lags=(int(L1), int(L2)),
    )
