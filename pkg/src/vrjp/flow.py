"""Weight renormalization flow on subdivided graphs, with moment bounds.

One flow step eliminates the level-l midpoints: each level-(l-1) edge gets
weight ``w' w'' / (2 beta_v)`` from its two children, where ``1/(2 beta_v)``
is inverse Gaussian with mean ``1/(w' + w'')`` given the current weights.
Two modes:

* weights-only (``beta_neq is None``): midpoint betas are drawn fresh at
  every step, which reproduces the law of the effective weights exactly and
  is the mode used for Monte Carlo moment studies;
* tracked (``beta_neq`` present): the state carries the shifted betas of all
  interior vertices, midpoint values are consumed from the state and the
  surviving vertices' betas are updated in place of fresh draws.  This mode
  is deterministic given the initial field and must agree with a direct
  Schur reduction of the full graph to machine precision.

Weights driven doubly exponentially small are kept as-is; no flushing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import betafield
from ._kernels import ig_transform
from .graphs import Graph, SubdividedGraph
from .invgauss import C2, c_alpha


class FlowConsistencyError(AssertionError):
    """A tracked flow produced a nonpositive surviving beta."""


@dataclass(frozen=True)
class FlowState:
    """Flow data at one level: per-edge weights and interior shifted betas.

    ``weights`` has shape (n_samples, n_base_edges, 2**level); axis 2 walks
    the pieces of one base edge in order.  ``beta_neq`` (same layout with
    2**level - 1 interior positions) is ``None`` in weights-only mode.
    """

    level: int
    weights: np.ndarray
    beta_neq: np.ndarray | None = None

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        if self.weights.shape[-1] != 2 ** self.level:
            raise ValueError("weight array does not match the level")
        if np.any(self.weights <= 0):
            raise ValueError("flow weights must be strictly positive")
        if self.beta_neq is not None:
            if self.beta_neq.shape[-1] != 2 ** self.level - 1:
                raise ValueError("beta array does not match the level")
            if np.any(self.beta_neq <= 0):
                raise FlowConsistencyError("interior betas must be positive")


def flow_step(state: FlowState, rng: np.random.Generator | None = None) -> FlowState:
    """One elimination step, level l -> l-1."""
    if state.level < 1:
        raise ValueError("cannot step below level 0")
    w = state.weights
    we1 = w[..., 0::2]
    we2 = w[..., 1::2]
    if state.beta_neq is None:
        if rng is None:
            raise ValueError("weights-only mode needs an rng for the midpoint draws")
        phi = we1 + we2
        inv2b = ig_transform(phi, 1.0, rng.standard_normal(phi.shape),
                             rng.random(phi.shape))
        new_beta = None
    else:
        inv2b = 1.0 / (2.0 * state.beta_neq[..., 0::2])
        b = state.beta_neq
        # surviving vertex at odd grid index s picks up the self-loop weight
        # (w_e1)^2/(2 beta_{s-1}) + (w_e2)^2/(2 beta_{s+1}) of its two
        # eliminated neighbours
        new_two = (2.0 * b[..., 1:-1:2]
                   - w[..., 1:-2:2] ** 2 / (2.0 * b[..., 0:-2:2])
                   - w[..., 2:-1:2] ** 2 / (2.0 * b[..., 2::2]))
        if np.any(new_two <= 0):
            raise FlowConsistencyError("surviving beta update went nonpositive")
        new_beta = 0.5 * new_two
    return FlowState(state.level - 1, we1 * we2 * inv2b, new_beta)


def _initial_weights(base: Graph, r: int, n_samples: int,
                     rng: np.random.Generator, weights) -> np.ndarray:
    shape = (n_samples, len(base.edges), 2 ** r)
    if callable(weights):
        w0 = np.asarray(weights(rng, shape), dtype=np.float64)
    elif np.isscalar(weights):
        w0 = np.full(shape, float(weights))
    else:
        w0 = np.broadcast_to(np.asarray(weights, dtype=np.float64), shape).copy()
    if w0.shape != shape or np.any(w0 <= 0):
        raise ValueError("initial weights must be positive with shape "
                         f"{shape}")
    return w0


def _tracked_initial_betas(base: Graph, r: int, w0: np.ndarray,
                           rng: np.random.Generator) -> np.ndarray:
    """Interior betas of the subdivided graph given the level-r weights."""
    sg = SubdividedGraph(base, r)
    n_samples = w0.shape[0]
    flat = w0.reshape(n_samples, -1)
    if np.all(flat == flat[0]):
        wmat = sg.weight_matrix(flat[0])
        betas = betafield.sample_beta_batch(wmat, n_samples, rng)
    else:
        n = sg.n
        w3 = np.zeros((n_samples, n, n))
        for k, e in enumerate(sg.edges):
            a, b = sg.endpoints(e)
            i, j = sg.index(a), sg.index(b)
            w3[:, i, j] = flat[:, k]
            w3[:, j, i] = flat[:, k]
        betas = betafield.sample_beta_batch_many(w3, rng)
    interior = betas[:, base.n:]
    return interior.reshape(n_samples, len(base.edges), 2 ** r - 1)


def run_flow(base: Graph, r: int, l: int, n_samples: int,
             rng: np.random.Generator, weights=1.0, track: bool = False,
             return_history: bool = False):
    """Run the flow from level r down to level l.

    ``weights`` is a scalar, an array broadcastable to
    (n_samples, n_edges, 2**r), or a callable ``f(rng, shape)`` drawing
    i.i.d. initial weights.  With ``track=True`` the initial interior betas
    are sampled from their conditional law given the weights and carried
    through the recursion (so the final state exposes the self-loop
    corrections); otherwise only weights are evolved.
    """
    if not 0 <= l <= r:
        raise ValueError("need 0 <= l <= r")
    w0 = _initial_weights(base, r, n_samples, rng, weights)
    beta0 = _tracked_initial_betas(base, r, w0, rng) if (track and r > 0) else None
    state = FlowState(r, w0, beta0)
    history = [state]
    for _ in range(r - l):
        state = flow_step(state, rng)
        history.append(state)
    return (state, history) if return_history else state


@dataclass(frozen=True)
class BoundReport:
    """The three decay bounds with their per-m arrays and minimizers.

    ``alpha_terms`` and ``log_terms`` evaluate the combined bounds' argument
    at every m in l..r; the reported minima are attained at the clamped
    minimizer indices ``m0`` / ``m1``.
    """

    alpha: float
    r: int
    l: int
    phase1: float | None
    m_values: np.ndarray
    alpha_terms: np.ndarray | None
    alpha_log_terms: np.ndarray | None
    m0: int | None
    combined_alpha: float | None
    log_terms: np.ndarray | None
    m1: int | None
    combined_log: float | None


def _clamp(m: int, lo: int, hi: int) -> int:
    return lo if m < lo else hi if m > hi else m


def moment_bound(alpha: float, r: int, l: int, moment_alpha: float | None = None,
                 log_moment_in: float | None = None) -> BoundReport:
    """Evaluate the decay bounds for input moments at level r.

    ``moment_alpha`` is E[W^alpha] (enables the single-phase bound for
    alpha in [0, 1] and the combined bound for alpha < 1/2);
    ``log_moment_in`` is E[log W] (enables the combined log bound).
    """
    if not 0 <= l <= r:
        raise ValueError("need 0 <= l <= r")
    m_values = np.arange(l, r + 1)
    phase1 = None
    alpha_terms = None
    alpha_log_terms = None
    m0 = None
    combined_alpha = None
    if moment_alpha is not None:
        if not (moment_alpha > 0 and math.isfinite(moment_alpha)):
            raise ValueError("E[W^alpha] must be positive and finite")
        if not 0 <= alpha <= 1:
            raise ValueError("single-phase bound needs alpha in [0, 1]")
        phase1 = float(2.0 ** (-alpha * (r - l)) * moment_alpha)
        if alpha < 0.5:
            ca = c_alpha(alpha)
            log_arg = (math.log(ca) + math.log(moment_alpha)
                       - alpha * (r - m_values) * math.log(2.0))
            alpha_log_terms = (np.exp2((m_values - l).astype(np.float64)) * log_arg
                               - math.log(ca))
            with np.errstate(over="ignore"):
                alpha_terms = np.exp(alpha_log_terms)
            if alpha > 0:
                raw = r - 2 - math.floor(
                    math.log2(ca * moment_alpha) / alpha)
                m0 = _clamp(raw, l, r)
            else:
                m0 = l
            combined_alpha = float(alpha_terms[m0 - l])
    log_terms = None
    m1 = None
    combined_log = None
    if log_moment_in is not None:
        y = log_moment_in - (r - m_values) * math.log(2.0) + C2
        log_terms = np.exp2((m_values - l).astype(np.float64)) * y - C2
        raw = r - 2 - math.floor((log_moment_in + C2) / math.log(2.0))
        m1 = _clamp(raw, l, r)
        combined_log = float(log_terms[m1 - l])
    return BoundReport(alpha=alpha, r=r, l=l, phase1=phase1, m_values=m_values,
                       alpha_terms=alpha_terms, alpha_log_terms=alpha_log_terms,
                       m0=m0, combined_alpha=combined_alpha,
                       log_terms=log_terms, m1=m1, combined_log=combined_log)


def batch_mean_se(values: np.ndarray, n_batches: int = 32):
    """Mean and batch-means standard error over the sample axis.

    ``values`` has samples along axis 0 (further axes are pooled into each
    batch mean)."""
    n = values.shape[0]
    usable = (n // n_batches) * n_batches
    batches = values[:usable].reshape(n_batches, -1).mean(axis=1)
    mean = float(values.mean())
    se = float(batches.std(ddof=1) / math.sqrt(n_batches))
    return mean, se


def verify_bounds(base: Graph, r: int, l: int, alphas, n_samples: int,
                  rng: np.random.Generator, weights,
                  moment_alpha_fn, log_moment_value: float):
    """Monte Carlo moments along the flow against the theoretical bounds.

    ``moment_alpha_fn(alpha)`` and ``log_moment_value`` supply the exact
    input moments at level r.  Returns one row per (level, alpha) plus a
    "log" row per level, each carrying the MC estimate, its 4-SE margin, the
    bound values, and the minimizer indices.
    """
    _, history = run_flow(base, r, l, n_samples, rng, weights=weights,
                          return_history=True)
    rows = []
    for state in history:
        m = state.level
        w = state.weights
        for alpha in alphas:
            mc, se = batch_mean_se(w ** alpha)
            rep = moment_bound(alpha, r, m, moment_alpha=moment_alpha_fn(alpha))
            bound = rep.phase1 if rep.combined_alpha is None else min(
                rep.phase1, rep.combined_alpha)
            rows.append({
                "level": m, "alpha": alpha, "mc_moment": mc, "mc_se": se,
                "bound_phase1": rep.phase1, "bound_combined": rep.combined_alpha,
                "bound_log": None, "m0": rep.m0, "m1": None,
                "ok": moment_within_bound(mc, se, bound),
            })
        mc, se = batch_mean_se(np.log(w))
        rep = moment_bound(0.0, r, m, log_moment_in=log_moment_value)
        rows.append({
            "level": m, "alpha": "log", "mc_moment": mc, "mc_se": se,
            "bound_phase1": None, "bound_combined": None,
            "bound_log": rep.combined_log, "m0": None, "m1": rep.m1,
            "ok": moment_within_bound(mc, se, rep.combined_log),
        })
    return rows


def moment_within_bound(mc: float, se: float, bound: float) -> bool:
    """mc <= bound + 4 se, with rounding slack so that degenerate
    (deterministic, se = 0) estimates equal to the bound still pass."""
    slack = 1e-12 * max(abs(bound), abs(mc))
    return mc <= bound + 4.0 * se + slack


def one_step_bounds(alpha: float, moment: float):
    """The two one-step bounds and which is tighter.

    Returns (plain, squared, plain_is_stronger); the crossover happens
    exactly at moment = 2^{-alpha} / C_alpha.
    """
    if not 0 <= alpha < 0.5:
        raise ValueError("both one-step bounds need alpha in [0, 1/2)")
    plain = 2.0 ** (-alpha) * moment
    squared = c_alpha(alpha) * moment ** 2
    return plain, squared, plain < squared


def recurrence_threshold(d: int, alpha: float, c3: float, moment: float,
                         r: int, l: int):
    """Check the positive-recurrence hypothesis and the minimal level gap.

    The hypothesis is ``moment <= c3 * 2^{alpha (r - l)}`` with the external
    constant ``c3 = c3(d, alpha)`` supplied by the caller (no default
    exists).  Returns (holds, minimal r - l making it hold).
    """
    if not 0 < alpha <= 0.25:
        raise ValueError("threshold applies for alpha in (0, 1/4]")
    if c3 <= 0 or moment <= 0:
        raise ValueError("moment and c3 must be positive")
    holds = bool(moment <= c3 * 2.0 ** (alpha * (r - l)))
    required = max(0, math.ceil(math.log2(moment / c3) / alpha))
    return holds, required
