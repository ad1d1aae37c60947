"""Iterative estimation of diagonal measurement-noise variances.

The estimator alternates two steps on the lagged data matrix: an SVD of the
noise-scaled matrix to extract candidate constraint directions, and a
maximum-likelihood update of the per-variable noise variances given those
directions. After convergence, scaling the data by the estimated standard
deviations maps constraint-direction singular values to ~1, so constraints
can be counted by thresholding the spectrum.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import minimize

from .errors import ConstraintCountSelectionError, NotIdentifiableError
from .lagstack import build_lag_matrix

# Upper edge of the unity band. Constraint-direction singular values land on
# 1 within the Marchenko-Pastur-type spread 1 + sqrt(cols/N) (~1.10 for the
# sample sizes of interest) once the data are scaled by good noise estimates,
# while the weakest signal direction sits near sqrt(1 + min SNR), which can
# be as low as ~1.35; the ceiling must fall between the two.
DEFAULT_UNITY_CEILING = 1.15

#: lower sanity edge for unity values during constraint-count selection
UNITY_FLOOR = 0.75


@dataclass(frozen=True)
class NoiseModel:
    """Per-variable noise standard deviations plus convergence diagnostics."""

    sigmas: np.ndarray
    d_used: int
    iterations: int
    converged: bool
    lag: int


@dataclass(frozen=True)
class ConstraintBasis:
    """Singular spectrum of the noise-scaled lag matrix and its unity-group basis.

    ``rows`` are the right singular vectors (in scaled coordinates, one per
    row, orthonormal) for the singular values counted as unity; they are
    ordered by descending singular value, so ``rows[-1]`` pairs with the
    smallest one. ``singular_values`` is the full descending spectrum.
    """

    singular_values: np.ndarray
    rows: np.ndarray
    lag: int
    noise: NoiseModel
    n_variables: int
    unity_ceiling: float

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]


def count_unity(spectrum, unity_ceiling: float = DEFAULT_UNITY_CEILING) -> int:
    """Number of trailing singular values below the unity ceiling."""
    s = np.asarray(spectrum, dtype=float)
    if s.size == 0:
        return 0
    if np.any(np.diff(s) > 1e-9 * max(s[0], 1.0)):
        raise ValueError("spectrum must be sorted in descending order")
    return int(np.count_nonzero(s < unity_ceiling))


def _column_sigmas(sigmas, n_blocks):
    return np.tile(np.asarray(sigmas, dtype=float), n_blocks)


def _scaled_eig(gram, col_sigmas):
    """Descending singular values and right singular vectors of the scaled matrix."""
    inv = 1.0 / col_sigmas
    Gs = gram * inv[:, None] * inv[None, :]
    w, V = np.linalg.eigh(Gs)
    svals = np.sqrt(np.clip(w, 0.0, None))[::-1]
    vectors = V[:, ::-1].T
    return svals, vectors


def _negative_loglik(theta, blocks, resid_cov):
    """Profile NLL (up to constants) of diagonal noise variances exp(theta)."""
    v = np.exp(theta)
    C = np.einsum("j,jkl->kl", v, blocks)
    C = C + (1e-12 * np.trace(C) / C.shape[0]) * np.eye(C.shape[0])
    try:
        cho = cho_factor(C, lower=True)
    except LinAlgError:
        return 1e20, np.zeros_like(theta)
    logdet = 2.0 * np.sum(np.log(np.diag(cho[0])))
    Cinv_S = cho_solve(cho, resid_cov)
    f = logdet + np.trace(Cinv_S)
    grad = np.empty_like(theta)
    for j in range(theta.size):
        Cinv_B = cho_solve(cho, blocks[j])
        grad[j] = v[j] * (np.trace(Cinv_B) - np.sum(Cinv_B.T * Cinv_S))
    return f, grad


def _ml_update(gram, basis_rows, col_sigmas, sigmas, M, std_scale):
    """One maximum-likelihood re-estimation of the M noise variances."""
    A_hat = basis_rows / col_sigmas[None, :]
    resid_cov = A_hat @ gram @ A_hat.T
    blocks = np.stack([A_hat[:, j::M] @ A_hat[:, j::M].T for j in range(M)])
    theta0 = 2.0 * np.log(sigmas)
    bounds = [(2.0 * np.log(1e-9 * s), 2.0 * np.log(10.0 * s)) for s in std_scale]
    res = minimize(
        _negative_loglik,
        theta0,
        args=(blocks, resid_cov),
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
    )
    return np.exp(0.5 * res.x)


def _run_iteration(gram, M, d, sigmas0, std_scale, tol, max_iter):
    n_blocks = gram.shape[0] // M
    sigmas = np.asarray(sigmas0, dtype=float).copy()
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        col_sigmas = _column_sigmas(sigmas, n_blocks)
        _, vectors = _scaled_eig(gram, col_sigmas)
        basis_rows = vectors[-d:]
        new = _ml_update(gram, basis_rows, col_sigmas, sigmas, M, std_scale)
        delta = np.max(np.abs(new - sigmas) / sigmas)
        sigmas = new
        if delta < tol:
            converged = True
            break
    svals, _ = _scaled_eig(gram, _column_sigmas(sigmas, n_blocks))
    return sigmas, iterations, converged, svals


def _candidate_ok(svals, d, ceiling):
    unity = svals[-d:]
    if np.any(unity < UNITY_FLOOR) or np.any(unity > ceiling):
        return False
    # the next singular value up must clear the band, else d is undercounted
    if svals.size > d and svals[-d - 1] <= ceiling:
        return False
    return True


def estimate_noise(
    measurements,
    L: int,
    d: int | None = None,
    *,
    center: bool = True,
    tol: float = 1e-6,
    max_iter: int = 200,
    init_fraction: float = 0.1,
    unity_ceiling: float = DEFAULT_UNITY_CEILING,
) -> NoiseModel:
    """Estimate per-variable noise standard deviations at stacking lag ``L``.

    When ``d`` (the assumed number of constraint directions) is omitted,
    candidates are tried from the structural maximum ``(M-1)(L+1)`` downward
    and the largest one whose converged scaled spectrum shows exactly ``d``
    unity values (inside ``[0.75, unity_ceiling]``, with the next value above
    the ceiling) is kept.

    Identifiability requires ``d(d+1) >= 2M``; the stricter form
    ``d(d+1) >= 2M(L+1)`` only triggers a warning.
    """
    X = np.asarray(measurements, dtype=float)
    M = X.shape[0]
    cols = M * (L + 1)
    Z = build_lag_matrix(X, L, center=center).entries
    gram = Z.T @ Z
    std_scale = X.std(axis=1)
    if np.any(std_scale == 0.0):
        raise ValueError("cannot estimate noise for a zero-variance variable")
    sigmas0 = init_fraction * std_scale

    def identifiable(dd):
        return dd * (dd + 1) >= 2 * M

    if d is not None:
        d = int(d)
        if not 1 <= d <= cols:
            raise ValueError(f"d={d} outside [1, {cols}]")
        if not identifiable(d):
            raise NotIdentifiableError(
                f"d={d} gives d(d+1)={d * (d + 1)} < 2M={2 * M}: variances not identifiable"
            )
        if d * (d + 1) < 2 * M * (L + 1):
            warnings.warn(
                f"d(d+1)={d * (d + 1)} below the strict bound 2M(L+1)={2 * M * (L + 1)}",
                stacklevel=2,
            )
        sigmas, iterations, converged, _ = _run_iteration(
            gram, M, d, sigmas0, std_scale, tol, max_iter
        )
        if not converged:
            warnings.warn(
                f"noise estimation did not converge in {max_iter} iterations", stacklevel=2
            )
        return NoiseModel(
            sigmas=sigmas, d_used=d, iterations=iterations, converged=converged, lag=L
        )

    d_max = (M - 1) * (L + 1)
    tried = []
    for cand in range(d_max, 0, -1):
        if not identifiable(cand):
            break
        sigmas, iterations, converged, svals = _run_iteration(
            gram, M, cand, sigmas0, std_scale, tol, max_iter
        )
        tried.append(cand)
        if converged and _candidate_ok(svals, cand, unity_ceiling):
            if cand * (cand + 1) < 2 * M * (L + 1):
                warnings.warn(
                    f"d(d+1)={cand * (cand + 1)} below the strict bound "
                    f"2M(L+1)={2 * M * (L + 1)}",
                    stacklevel=2,
                )
            return NoiseModel(
                sigmas=sigmas, d_used=cand, iterations=iterations, converged=converged, lag=L
            )
    raise ConstraintCountSelectionError(
        f"no constraint count in {tried} produced a unity spectrum "
        f"(band {UNITY_FLOOR:.2f}..{unity_ceiling:.2f})"
    )


def scaled_spectrum(
    measurements,
    L: int,
    noise: NoiseModel,
    *,
    unity_ceiling: float = DEFAULT_UNITY_CEILING,
    center: bool = True,
) -> ConstraintBasis:
    """Full singular spectrum of the noise-scaled lag matrix plus the unity basis.

    Each basis row's sign is fixed by making its first maximal-magnitude
    entry positive, so repeated runs serialize identically.
    """
    X = np.asarray(measurements, dtype=float)
    sigmas = np.asarray(noise.sigmas, dtype=float)
    if np.any(sigmas <= 0.0):
        raise ValueError("noise sigmas must be positive")
    scaled = X / sigmas[:, None]
    Z = build_lag_matrix(scaled, L, center=center).entries
    svals = np.linalg.svd(Z, compute_uv=False)
    d = count_unity(svals, unity_ceiling)
    if d > 0:
        _, _, Vt = np.linalg.svd(Z, full_matrices=False)
        rows = Vt[Vt.shape[0] - d :].copy()
        for r in range(rows.shape[0]):
            lead = int(np.argmax(np.abs(rows[r]) >= np.abs(rows[r]).max() - 0.0))
            if rows[r, lead] < 0:
                rows[r] = -rows[r]
        if np.max(svals[-d:]) < 0.1:
            warnings.warn(
                "unity-group singular values are near zero, not one; the noise model "
                "likely overstates the actual noise (e.g. noise-free data)",
                stacklevel=2,
            )
    else:
        rows = np.empty((0, Z.shape[1]))
    return ConstraintBasis(
        singular_values=svals,
        rows=rows,
        lag=L,
        noise=noise,
        n_variables=X.shape[0],
        unity_ceiling=unity_ceiling,
    )
