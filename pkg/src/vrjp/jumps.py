"""Reversible Markov jump processes: simulation, path surgery, restricted
parameters, and exact path-law oracles.

A process is parametrized by its conductance matrix C (self-loop entries on
the diagonal) and reversible measure pi; rates are q_ij = C_ij / pi_i and the
discrete skeleton steps with p_ij = C_ij / C_i.  Restriction to a vertex
subset and self-loop removal act both on simulated paths (pure bookkeeping)
and on the parameters (Schur reduction on conductances), and the two routes
must produce the same laws; the transfer-operator oracle at the bottom checks
that without ever using the parameter reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np
from scipy import sparse

from . import linalg
from ._kernels import chain_paths

_ENUM_MAX_DEPTH = 12
_ENUM_MAX_VERTICES = 8


@dataclass(frozen=True)
class JumpPath:
    """Visited vertices and the waiting times between them.

    ``waits`` has one entry per completed sojourn: its length is
    ``len(states) - 1`` (no wait recorded for the final position) or
    ``len(states)`` for open-ended paths.
    """

    states: tuple
    waits: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        n_waits = len(self.waits)
        if n_waits and n_waits not in (len(self.states), len(self.states) - 1):
            raise ValueError("waits must cover all sojourns or all but the last"
                             " (or be absent for a discrete-only path)")
        if np.any(np.asarray(self.waits) <= 0):
            raise ValueError("waiting times must be strictly positive")


class MJPParams:
    """Conductances and reversible measure of a reversible Markov jump process."""

    def __init__(self, c: np.ndarray, pi: np.ndarray, vertices: Sequence[Hashable] | None = None):
        c = np.asarray(c, dtype=np.float64)
        pi = np.asarray(pi, dtype=np.float64)
        n = pi.size
        if c.shape != (n, n):
            raise ValueError("conductance matrix and measure sizes differ")
        if not np.allclose(c, c.T, rtol=1e-10, atol=0):
            raise ValueError("conductance matrix must be symmetric")
        if np.any(c < 0) or np.any(pi <= 0):
            raise ValueError("conductances must be nonnegative and pi positive")
        self.c = c
        self.pi = pi
        self.vertices = tuple(vertices) if vertices is not None else tuple(range(n))
        self._index = {v: i for i, v in enumerate(self.vertices)}
        self.total = c.sum(axis=1)
        if np.any(self.total <= 0):
            raise ValueError("absorbing vertex: zero total conductance")

    @property
    def n(self) -> int:
        return self.pi.size

    def index(self, v) -> int:
        return self._index[v]

    @property
    def p(self) -> np.ndarray:
        """Discrete transition probabilities C_ij / C_i."""
        return self.c / self.total[:, None]

    @property
    def q(self) -> np.ndarray:
        """Jump rates C_ij / pi_i."""
        return self.c / self.pi[:, None]

    @property
    def rate(self) -> np.ndarray:
        """Total exit rates q_i = C_i / pi_i (self-loop events included)."""
        return self.total / self.pi


def conductances(w: np.ndarray, u: np.ndarray,
                 vertices: Sequence[Hashable] | None = None) -> MJPParams:
    """Parameters of the conditional chain: C_ij = w_ij e^{u_i+u_j}, pi = 2 e^{2u}."""
    w = np.asarray(w, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    eu = np.exp(u)
    return MJPParams(w * np.outer(eu, eu), 2.0 * eu ** 2, vertices)


def simulate_mjp(params: MJPParams, rho, n_steps: int,
                 rng: np.random.Generator) -> JumpPath:
    """Simulate ``n_steps`` jumps from ``rho`` (waits exponential at rate q_i)."""
    start = params.index(rho)
    ccum = np.cumsum(params.c, axis=1)
    u_choice = rng.random((1, n_steps))
    u_wait = rng.random(n_steps)
    x = chain_paths(ccum, start, u_choice)[0]
    waits = -np.log1p(-u_wait) / params.rate[x[:-1]]
    return JumpPath(tuple(params.vertices[i] for i in x), waits)


def mjp_paths_batch(params: MJPParams, rho, n_steps: int, n_paths: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Discrete skeletons only, as an (n_paths, n_steps+1) index array."""
    ccum = np.cumsum(params.c, axis=1)
    return chain_paths(ccum, params.index(rho), rng.random((n_paths, n_steps)))


def remove_self_loops(path: JumpPath) -> JumpPath:
    """Collapse consecutive repeats, summing their waits.

    The final run is kept as a state but its (incomplete) wait is dropped,
    matching the finite-sample truncation of the defining recursion.
    """
    states = path.states
    waits = np.asarray(path.waits, dtype=np.float64)
    if not states:
        return path
    starts = [0]
    for idx in range(1, len(states)):
        if states[idx] != states[starts[-1]]:
            starts.append(idx)
    new_states = tuple(states[s] for s in starts)
    new_waits = []
    for k, s in enumerate(starts):
        end = starts[k + 1] if k + 1 < len(starts) else None
        if end is None:
            if len(waits) == len(states):
                block = waits[s:]
            else:
                break
        else:
            block = waits[s:end]
            if len(block) != end - s:
                break
        new_waits.append(float(block.sum()))
    return JumpPath(new_states, np.asarray(new_waits))


def restrict_path(path: JumpPath, subset) -> JumpPath:
    """Keep the successive visits to ``subset`` with their single waits."""
    subset = set(subset)
    if not path.states or path.states[0] not in subset:
        raise ValueError("path must start inside the restriction subset")
    keep = [i for i, v in enumerate(path.states) if v in subset]
    states = tuple(path.states[i] for i in keep)
    waits = np.asarray(path.waits, dtype=np.float64)
    kept_waits = [float(waits[i]) for i in keep if i < len(waits)]
    return JumpPath(states, np.asarray(kept_waits))


def restricted_params(params: MJPParams, subset) -> MJPParams:
    """Parameters of the restriction to ``subset``: Schur reduction on C.

    Equivalent to p^J = p_JJ + p_JI (Id - p_II)^{-1} p_IJ, carried out on
    conductances where the reduced block D_I - C_II is symmetric positive
    definite for any subset reachable from the rest of the graph.
    """
    j_idx = [params.index(v) for v in subset]
    if len(j_idx) < 2:
        raise ValueError("restriction subset needs at least two vertices")
    j_set = set(j_idx)
    i_idx = [k for k in range(params.n) if k not in j_set]
    c = params.c
    c_jj = c[np.ix_(j_idx, j_idx)].copy()
    if i_idx:
        block = np.diag(params.total[i_idx]) - c[np.ix_(i_idx, i_idx)]
        x = linalg.solve_spd(block, c[np.ix_(i_idx, j_idx)])
        c_jj += c[np.ix_(j_idx, i_idx)] @ x
    return MJPParams(c_jj, params.pi[j_idx],
                     [params.vertices[k] for k in j_idx])


def drop_loop_params(params: MJPParams) -> MJPParams:
    """Zero the conductance diagonal; rates pick up the factor (1 - p_ii)."""
    c = params.c.copy()
    np.fill_diagonal(c, 0.0)
    if np.any(c.sum(axis=1) <= 0):
        raise ValueError("absorbing self-loop: p_ii = 1 somewhere")
    return MJPParams(c, params.pi, params.vertices)


def exact_path_law(params: MJPParams, rho, depth: int) -> dict:
    """Exact law of the first ``depth`` discrete steps, by enumeration.

    Keys are vertex tuples (X_0, ..., X_depth) with X_0 = rho; values are
    products of one-step probabilities and sum to one.
    """
    if depth > _ENUM_MAX_DEPTH or params.n > _ENUM_MAX_VERTICES:
        raise ValueError("enumeration guard exceeded")
    p = params.p
    start = params.index(rho)
    law = {(start,): 1.0}
    for _ in range(depth):
        new = {}
        for seq, prob in law.items():
            row = p[seq[-1]]
            for j in np.nonzero(row > 0)[0]:
                new[seq + (int(j),)] = new.get(seq + (int(j),), 0.0) + prob * row[j]
        law = new
    return {tuple(params.vertices[i] for i in seq): prob for seq, prob in law.items()}


def _restriction_operator(params: MJPParams, j_idx, depth: int, collapse: bool):
    """Transfer operator over (emitted prefix, current vertex) states.

    Prefixes form a forest rooted at every subset vertex; a prefix reaching
    ``depth + 1`` symbols is absorbed into its completed sequence.  Returns
    (alive operator A, absorption operator B, prefix index, completed index).
    """
    j_set = set(j_idx)
    p = params.p
    n = params.n
    prefixes = {}
    frontier = []
    for j in j_idx:
        prefixes[(j,)] = len(prefixes)
        frontier.append((j,))
    while frontier:
        seq = frontier.pop()
        if len(seq) >= depth:
            continue
        for j in j_idx:
            if collapse and j == seq[-1]:
                continue
            child = seq + (j,)
            if child not in prefixes:
                prefixes[child] = len(prefixes)
                frontier.append(child)

    completed = {}
    rows_a, cols_a, vals_a = [], [], []
    rows_b, cols_b, vals_b = [], [], []
    for seq, pid in prefixes.items():
        for v in range(n):
            row = p[v]
            for w in np.nonzero(row > 0)[0]:
                w = int(w)
                if w not in j_set:
                    tgt = (pid, w)
                elif collapse and w == seq[-1]:
                    tgt = (pid, w)
                else:
                    child = seq + (w,)
                    if len(child) <= depth:
                        tgt = (prefixes[child], w)
                    else:
                        key = completed.setdefault(child, len(completed))
                        rows_b.append(key)
                        cols_b.append(pid * n + v)
                        vals_b.append(row[w])
                        continue
                rows_a.append(tgt[0] * n + tgt[1])
                cols_a.append(pid * n + v)
                vals_a.append(row[w])

    n_states = len(prefixes) * n
    a = sparse.csr_matrix((vals_a, (rows_a, cols_a)), shape=(n_states, n_states))
    b = sparse.csr_matrix((vals_b, (rows_b, cols_b)),
                          shape=(len(completed), n_states))
    return a, b, prefixes, completed


def restricted_prefix_laws(params: MJPParams, roots, subset, depth: int,
                           collapse: bool = True, tail_tol: float = 1e-7,
                           max_steps: int = 200_000):
    """Exact laws of the first ``depth`` restricted steps, without Schur.

    Pushes the full chain's path probabilities forward through
    restriction-to-``subset`` (and self-loop removal when ``collapse``) with
    a transfer operator over (emitted prefix, current vertex) states: the
    result is the exact push-forward of the full path law up to the returned
    tail mass (paths that have not yet produced ``depth`` restricted steps
    when every root's tail fell below ``tail_tol``).  Returns one
    (law dict, tail) pair per root.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    j_idx = sorted(params.index(v) for v in subset)
    root_idx = [params.index(v) for v in roots]
    if any(r not in j_idx for r in root_idx):
        raise ValueError("start vertices must lie in the restriction subset")
    a, b, prefixes, completed = _restriction_operator(params, j_idx, depth,
                                                      collapse)
    n = params.n
    v = np.zeros((a.shape[0], len(root_idx)))
    for col, r in enumerate(root_idx):
        v[prefixes[(r,)] * n + r, col] = 1.0
    out = np.zeros((len(completed), len(root_idx)))
    steps = 0
    while np.max(v.sum(axis=0)) >= tail_tol:
        out += b @ v
        v = a @ v
        steps += 1
        if steps > max_steps:
            raise RuntimeError("restricted prefix law did not absorb fast enough")
    tails = v.sum(axis=0)
    ids = params.vertices
    results = []
    for col in range(len(root_idx)):
        law = {tuple(ids[i] for i in seq): float(out[key, col])
               for seq, key in completed.items() if out[key, col] > 0.0}
        results.append((law, float(tails[col])))
    return results


def restricted_prefix_law(params: MJPParams, rho, subset, depth: int,
                          collapse: bool = True, tail_tol: float = 1e-7,
                          max_steps: int = 200_000):
    """Single-root version of :func:`restricted_prefix_laws`."""
    return restricted_prefix_laws(params, [rho], subset, depth,
                                  collapse=collapse, tail_tol=tail_tol,
                                  max_steps=max_steps)[0]
