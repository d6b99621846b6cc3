"""Independent oracles used only by the tests.

These deliberately avoid the production code paths they cross-check:
matrix inverses come from truncated geometric series instead of
factorizations, and special-function values from adaptive quadrature
instead of series/continued fractions.
"""

import numpy as np
from scipy import integrate


def geometric_inverse_h(w_ii: np.ndarray, beta_i: np.ndarray,
                        tol: float = 1e-14, max_terms: int = 100_000):
    """([H]_II)^{-1} summed as sum_l [(2 beta)^{-1} W]^l (2 beta)^{-1}."""
    d = 1.0 / (2.0 * np.asarray(beta_i, dtype=np.float64))
    m = d[:, None] * np.asarray(w_ii, dtype=np.float64)
    term = np.diag(d)
    total = term.copy()
    for _ in range(max_terms):
        term = m @ term
        total += term
        if np.abs(term).max() < tol:
            return total
    raise RuntimeError("geometric series did not converge")


def restricted_p_series(p: np.ndarray, j_idx, i_idx, tol: float = 1e-14,
                        max_terms: int = 100_000) -> np.ndarray:
    """p^J as the convergent series p_JJ + sum_l p_JI p_II^l p_IJ."""
    j_idx = list(j_idx)
    i_idx = list(i_idx)
    out = p[np.ix_(j_idx, j_idx)].copy()
    if not i_idx:
        return out
    p_ji = p[np.ix_(j_idx, i_idx)]
    p_ii = p[np.ix_(i_idx, i_idx)]
    p_ij = p[np.ix_(i_idx, j_idx)]
    carry = p_ji.copy()
    for _ in range(max_terms):
        out += carry @ p_ij
        # bound all remaining terms by the carry mass (rows of p sum to <= 1),
        # not the current increment, which can vanish structurally
        if np.abs(carry).sum(axis=1).max() < tol:
            return out
        carry = carry @ p_ii
    raise RuntimeError("restriction series did not converge")


def quad_e1(x: float) -> float:
    """E1 by adaptive quadrature of exp(-u)/u on (x, inf)."""
    val, _ = integrate.quad(lambda u: np.exp(-u) / u, x, np.inf,
                            epsabs=1e-14, epsrel=1e-13, limit=300)
    return val


def quad_log_moment_smallform(w: float) -> float:
    """exp(2W) int_0^{2W} (log t + gamma) exp(-t) dt + c2."""
    from vrjp.invgauss import C2, GAMMA_EULER

    val, _ = integrate.quad(lambda t: (np.log(t) + GAMMA_EULER) * np.exp(-t),
                            0.0, 2.0 * w, epsabs=1e-13, epsrel=1e-12,
                            limit=300)
    return float(np.exp(2.0 * w)) * val + C2


def quad_c2() -> float:
    """gamma + log 2 with gamma from its defining integral."""
    val, _ = integrate.quad(lambda t: np.exp(-t) * np.log(t), 0, np.inf,
                            epsabs=1e-13, epsrel=1e-13, limit=400)
    return -val + np.log(2.0)
