"""Dense linear algebra for the beta field: H matrices, Schur reductions,
wired weights, and the u potential.

All solves go through a pivot-checked Cholesky factorization (tolerance
relative to the largest diagonal entry); breakdown signals either a
non-realizable beta field or a disconnected reduction and raises
:class:`SingularReductionError`.  Matrices here are small and dense on
purpose; iterative or sparse paths are out of scope.
"""

from __future__ import annotations

import numpy as np

PIVOT_RTOL = 1e-12


class SingularReductionError(ValueError):
    """A symmetric factorization hit a nonpositive (or negligible) pivot."""


class InvalidBetaError(ValueError):
    """A beta field produced a non-realizable intermediate quantity."""


def cholesky_pivot(h: np.ndarray, rtol: float = PIVOT_RTOL):
    """Lower Cholesky factor of ``h``, or ``None`` on pivot breakdown.

    A pivot counts as a breakdown when it does not exceed
    ``rtol * max(diag(h))``.
    """
    h = np.asarray(h, dtype=np.float64)
    n = h.shape[0]
    if h.shape != (n, n):
        raise ValueError("matrix must be square")
    if n == 0:
        return np.zeros((0, 0))
    dmax = float(np.max(np.diag(h)))
    if dmax <= 0.0:
        return None
    tol = rtol * dmax
    low = np.zeros_like(h)
    for j in range(n):
        d = h[j, j] - low[j, :j] @ low[j, :j]
        if d <= tol:
            return None
        low[j, j] = np.sqrt(d)
        if j + 1 < n:
            low[j + 1:, j] = (h[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]) / low[j, j]
    return low


def is_positive_definite(h: np.ndarray) -> bool:
    """Positive definiteness via the pivot-checked factorization."""
    return cholesky_pivot(h) is not None


def solve_spd(h: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``h x = b`` for symmetric positive definite ``h``."""
    low = cholesky_pivot(h)
    if low is None:
        raise SingularReductionError("matrix block is not positive definite")
    b = np.asarray(b, dtype=np.float64)
    squeeze = b.ndim == 1
    y = np.linalg.solve(low, b.reshape(low.shape[0], -1))
    x = np.linalg.solve(low.T, y)
    return x.ravel() if squeeze else x


def logdet_spd(h: np.ndarray) -> float:
    low = cholesky_pivot(h)
    if low is None:
        raise SingularReductionError("matrix is not positive definite")
    return 2.0 * float(np.sum(np.log(np.diag(low))))


def h_matrix(w: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """``2 diag(beta) - w``."""
    w = np.asarray(w, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if w.shape != (beta.size, beta.size):
        raise ValueError("dimension mismatch between weights and beta")
    return 2.0 * np.diag(beta) - w


def effective_weights(w: np.ndarray, beta_i: np.ndarray,
                      i_idx, j_idx) -> np.ndarray:
    """Schur-reduced weights ``w_JJ + w_JI ([H]_II)^{-1} w_IJ`` on ``j_idx``.

    ``beta_i`` holds the beta values on ``i_idx`` (same order).  The result
    may carry a positive diagonal even when ``w`` does not.
    """
    w = np.asarray(w, dtype=np.float64)
    i_idx = np.asarray(i_idx, dtype=np.intp)
    j_idx = np.asarray(j_idx, dtype=np.intp)
    w_jj = w[np.ix_(j_idx, j_idx)].copy()
    if i_idx.size == 0:
        return w_jj
    beta_i = np.asarray(beta_i, dtype=np.float64)
    h_ii = h_matrix(w[np.ix_(i_idx, i_idx)], beta_i)
    x = solve_spd(h_ii, w[np.ix_(i_idx, j_idx)])
    return w_jj + w[np.ix_(j_idx, i_idx)] @ x


def effective_weights_batch(w, beta_i_batch: np.ndarray, i_idx, j_idx) -> np.ndarray:
    """Schur-reduced weights for a batch of beta fields, shape (N, |J|, |J|).

    Monte Carlo pipeline variant of :func:`effective_weights`: solves the
    per-sample blocks with batched LU (np.linalg.solve).  ``w`` may be one
    shared matrix or one matrix per sample.
    """
    w = np.asarray(w, dtype=np.float64)
    beta_i_batch = np.asarray(beta_i_batch, dtype=np.float64)
    i_idx = np.asarray(i_idx, dtype=np.intp)
    j_idx = np.asarray(j_idx, dtype=np.intp)
    n_samples = beta_i_batch.shape[0]
    if w.ndim == 2:
        w3 = np.broadcast_to(w, (n_samples,) + w.shape)
    else:
        w3 = w
    samples = np.arange(n_samples)
    w_jj = w3[np.ix_(samples, j_idx, j_idx)]
    if i_idx.size == 0:
        return w_jj.copy()
    h_ii = -w3[np.ix_(samples, i_idx, i_idx)].copy()
    d = np.arange(i_idx.size)
    h_ii[:, d, d] += 2.0 * beta_i_batch
    x = np.linalg.solve(h_ii, w3[np.ix_(samples, i_idx, j_idx)])
    return w_jj + w3[np.ix_(samples, j_idx, i_idx)] @ x


def drop_diagonal(w_j: np.ndarray, beta_j: np.ndarray):
    """Move self-loop weights into the betas: zero diagonal, shifted field.

    The associated H matrix is unchanged: 2(beta - w_jj/2) - 0 = 2 beta - w_jj.
    """
    w_j = np.asarray(w_j, dtype=np.float64)
    beta_j = np.asarray(beta_j, dtype=np.float64)
    diag = np.diag(w_j).copy()
    w_neq = w_j - np.diag(diag)
    return w_neq, beta_j - 0.5 * diag


def wire_weights(w: np.ndarray, j_idx, rho: int):
    """Merge all of J into the pin: weights on I + [rho], rho placed last.

    Returns ``(w_hat, order)`` where ``order`` lists the original indices of
    the rows/columns of ``w_hat`` (all of I in original order, then rho).
    """
    w = np.asarray(w, dtype=np.float64)
    j_set = set(int(j) for j in j_idx)
    if int(rho) not in j_set:
        raise ValueError("pin vertex must belong to the wired subset")
    i_idx = [k for k in range(w.shape[0]) if k not in j_set]
    order = i_idx + [int(rho)]
    m = len(i_idx)
    w_hat = np.zeros((m + 1, m + 1))
    w_hat[:m, :m] = w[np.ix_(i_idx, i_idx)]
    j_list = sorted(j_set)
    for a, i in enumerate(i_idx):
        s = float(w[i, j_list].sum())
        w_hat[a, m] = w_hat[m, a] = s
    return w_hat, order


def u_field(w: np.ndarray, beta: np.ndarray, rho: int) -> np.ndarray:
    """Potential with ``exp(u)`` solving ``[H]_{--} exp(u_-) = w_{-, rho}``.

    Pinned at ``u[rho] = 0``.  Raises :class:`InvalidBetaError` when a solved
    component fails to be strictly positive (a beta outside the support of
    the field's law).
    """
    w = np.asarray(w, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    n = beta.size
    rho = int(rho)
    minus = [k for k in range(n) if k != rho]
    u = np.zeros(n)
    if minus:
        h_mm = h_matrix(w, beta)[np.ix_(minus, minus)]
        eu = solve_spd(h_mm, w[minus, rho])
        if np.any(eu <= 0.0):
            raise InvalidBetaError("u field has a nonpositive exp(u) component")
        u[minus] = np.log(eu)
    return u
