"""Vertex-reinforced jump processes and linearly edge-reinforced walks.

Two routes to the same laws: direct simulation (competing clocks whose rates
grow with the other vertices' local times; Polya-type weight updates for the
edge-reinforced walk) and the mixture representation (draw a beta field,
solve the u potential, run the conditional reversible chain).  Discrete-law
comparisons between the routes always use the jump sequence alone, which the
time change to the exchangeable scale leaves untouched.
"""

from __future__ import annotations

from typing import Hashable, Sequence

import numpy as np

from . import betafield, jumps, linalg
from ._kernels import chain_paths_many, errw_paths, vrjp_paths, vrjp_paths_many
from .graphs import Graph


def _as_weight_matrix(w: np.ndarray, zero_diag: bool = True) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("weight matrix must be square")
    if not np.allclose(w, w.T, rtol=1e-12, atol=0):
        raise ValueError("weight matrix must be symmetric")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if zero_diag and np.any(np.diag(w) != 0):
        raise ValueError("direct simulation expects a zero diagonal; "
                         "decorate with self-loops separately")
    return w


def simulate_vrjp_direct(w: np.ndarray, rho: int, n_steps: int,
                         rng: np.random.Generator,
                         vertices: Sequence[Hashable] | None = None) -> jumps.JumpPath:
    """One direct VRJP path (original time scale) started at index ``rho``.

    From vertex i the walk jumps to j at rate w_ij * L_j(t); rates are frozen
    per sojourn because only the occupied vertex accrues local time.
    """
    w = _as_weight_matrix(w)
    u_wait = rng.random((1, n_steps))
    u_choice = rng.random((1, n_steps))
    x, t = vrjp_paths(w, int(rho), u_wait, u_choice)
    ids = tuple(vertices) if vertices is not None else tuple(range(w.shape[0]))
    return jumps.JumpPath(tuple(ids[i] for i in x[0]), t[0])


def vrjp_direct_batch(w: np.ndarray, rho: int, n_steps: int, n_paths: int,
                      rng: np.random.Generator):
    """Batch of direct VRJP paths; returns (states, waits) index arrays."""
    w = _as_weight_matrix(w)
    u_wait = rng.random((n_paths, n_steps))
    u_choice = rng.random((n_paths, n_steps))
    return vrjp_paths(w, int(rho), u_wait, u_choice)


def vrjp_direct_batch_many(w3: np.ndarray, rho: int, n_steps: int,
                           rng: np.random.Generator):
    """Direct VRJP paths with one zero-diagonal weight matrix per sample."""
    w3 = np.asarray(w3, dtype=np.float64)
    n_paths = w3.shape[0]
    u_wait = rng.random((n_paths, n_steps))
    u_choice = rng.random((n_paths, n_steps))
    return vrjp_paths_many(w3, int(rho), u_wait, u_choice)


def local_times_along(path: jumps.JumpPath):
    """Local-time offsets (1 + occupation time) of the occupied vertex at the
    start of each sojourn."""
    occ: dict = {}
    out = []
    waits = np.asarray(path.waits, dtype=np.float64)
    for n, v in enumerate(path.states[:len(waits)]):
        out.append(1.0 + occ.get(v, 0.0))
        occ[v] = occ.get(v, 0.0) + waits[n]
    return np.asarray(out)


def time_change(path: jumps.JumpPath) -> jumps.JumpPath:
    """Map waits to the exchangeable scale D(t) = sum_i (L_i(t)^2 - 1).

    The jump sequence is untouched; a sojourn of length s at a vertex with
    local-time offset ell contributes (ell + s)^2 - ell^2.
    """
    ell = local_times_along(path)
    waits = np.asarray(path.waits, dtype=np.float64)
    new = (ell + waits) ** 2 - ell ** 2
    return jumps.JumpPath(path.states, new)


def simulate_vrjp_mixture(w: np.ndarray, rho: int, n_steps: int,
                          rng: np.random.Generator,
                          vertices: Sequence[Hashable] | None = None) -> jumps.JumpPath:
    """VRJP in exchangeable scale via its mixture-of-chains representation."""
    w = _as_weight_matrix(w, zero_diag=False)
    sample = betafield.sample_beta(w, rng)
    u = linalg.u_field(w, sample.beta, int(rho))
    params = jumps.conductances(w, u, vertices)
    return jumps.simulate_mjp(params, params.vertices[int(rho)], n_steps, rng)


def vrjp_mixture_batch(w: np.ndarray, rho: int, n_steps: int, n_paths: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Discrete skeletons of the mixture route, one fresh beta per path."""
    w = _as_weight_matrix(w, zero_diag=False)
    n = w.shape[0]
    rho = int(rho)
    betas = betafield.sample_beta_batch(w, n_paths, rng)
    ccum = conditional_chain_cumulatives(w, betas, rho)
    return chain_paths_many(ccum, rho, rng.random((n_paths, n_steps)))


def conditional_chain_cumulatives(w, betas: np.ndarray, rho: int) -> np.ndarray:
    """Cumulative conductance rows of the conditional chains for a beta batch.

    Solves the u potential for every sample (pinned at ``rho``) and returns
    cumsum(C, axis=2) with C_ij = w_ij exp(u_i + u_j).  ``w`` may be a single
    matrix or one per sample.
    """
    w = np.asarray(w, dtype=np.float64)
    n = betas.shape[1]
    rho = int(rho)
    minus = [k for k in range(n) if k != rho]
    if w.ndim == 2:
        w3 = np.broadcast_to(w, (betas.shape[0], n, n))
    else:
        w3 = w
    h = -w3.copy()
    idx = np.arange(n)
    h[:, idx, idx] += 2.0 * betas
    h_mm = h[np.ix_(np.arange(betas.shape[0]), minus, minus)]
    eu = np.linalg.solve(h_mm, w3[:, minus, rho][..., None])[..., 0]
    if np.any(eu <= 0):
        raise linalg.InvalidBetaError("batched u field hit a nonpositive component")
    eu_full = np.ones((betas.shape[0], n))
    eu_full[:, minus] = eu
    c = w3 * eu_full[:, :, None] * eu_full[:, None, :]
    return np.cumsum(c, axis=2)


def decorate_self_loops(path: jumps.JumpPath, w_diag: np.ndarray | dict,
                        rng: np.random.Generator) -> jumps.JumpPath:
    """Insert Poisson(w_ii/2 per unit time) self-loop events into each sojourn."""
    states = list(path.states)
    waits = np.asarray(path.waits, dtype=np.float64)

    def loop_rate(v):
        r = w_diag[v] if not isinstance(w_diag, dict) else w_diag.get(v, 0.0)
        if r < 0:
            raise ValueError("negative self-loop weight")
        return 0.5 * r

    new_states = []
    new_waits = []
    for n, v in enumerate(states):
        if n >= len(waits):
            new_states.append(v)
            break
        s = waits[n]
        count = int(rng.poisson(loop_rate(v) * s))
        while True:
            cuts = np.sort(rng.random(count)) * s if count else np.empty(0)
            pieces = np.diff(np.concatenate(([0.0], cuts, [s])))
            if not count or np.all(pieces > 0):  # ties have probability zero
                break
        new_states.extend([v] * (count + 1))
        new_waits.extend(pieces.tolist())
    return jumps.JumpPath(tuple(new_states), np.asarray(new_waits))


def _initial_errw_weights(g: Graph, a) -> np.ndarray:
    w0 = np.zeros((g.n, g.n))
    for e in g.edges:
        wt = a[e] if isinstance(a, dict) else float(a)
        if wt <= 0:
            raise ValueError("initial reinforcement weights must be positive")
        i, j = g.index(e[0]), g.index(e[1])
        w0[i, j] = w0[j, i] = wt
    return w0


def simulate_errw(g: Graph, a, rho, n_steps: int,
                  rng: np.random.Generator) -> tuple:
    """Linearly edge-reinforced walk on ``g``; every traversal adds 1."""
    w0 = _initial_errw_weights(g, a)
    x = errw_paths(w0, g.index(rho), rng.random((1, n_steps)))[0]
    return tuple(g.vertices[i] for i in x)


def errw_batch(g: Graph, a, rho, n_steps: int, n_paths: int,
               rng: np.random.Generator) -> np.ndarray:
    w0 = _initial_errw_weights(g, a)
    return errw_paths(w0, g.index(rho), rng.random((n_paths, n_steps)))


def errw_as_mixture(g: Graph, a: float, rho, n_steps: int,
                    rng: np.random.Generator) -> tuple:
    """One walk from the Gamma(a, 1)-weight mixture representation."""
    w = np.zeros((g.n, g.n))
    for e in g.edges:
        wt = rng.gamma(a)
        i, j = g.index(e[0]), g.index(e[1])
        w[i, j] = w[j, i] = wt
    path = simulate_vrjp_mixture(w, g.index(rho), n_steps, rng,
                                 vertices=g.vertices)
    return path.states


def errw_mixture_batch(g: Graph, a: float, rho, n_steps: int, n_paths: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Discrete skeletons of the Gamma-mixture route, fresh weights per path."""
    rho_i = g.index(rho)
    n = g.n
    pairs = [(g.index(u), g.index(v)) for u, v in g.edges]
    gammas = rng.gamma(a, size=(n_paths, len(pairs)))
    w3 = np.zeros((n_paths, n, n))
    for k, (i, j) in enumerate(pairs):
        w3[:, i, j] = gammas[:, k]
        w3[:, j, i] = gammas[:, k]
    betas = betafield.sample_beta_batch_many(w3, rng)
    ccum = conditional_chain_cumulatives(w3, betas, rho_i)
    return chain_paths_many(ccum, rho_i, rng.random((n_paths, n_steps)))
