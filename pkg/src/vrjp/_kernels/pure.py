"""Pure-numpy implementations of the Monte Carlo hot kernels.

Every kernel consumes pre-drawn random arrays (uniforms, standard normals)
instead of an RNG object.  This makes the functions deterministic and lets
the compiled backend reproduce them draw for draw: both backends apply the
same arithmetic to the same inputs in the same order.

Conventions shared with the compiled twin:

* jump selection from a cumulative-rate row ``cum`` uses the first index
  ``j`` with ``cum[j] > u * cum[-1]``,
* waiting times are ``-log1p(-u) / rate``,
* inverse Gaussian draws use the two-root transform parametrized by
  ``phi = 1/mu`` so that ``phi = 0`` degenerates smoothly to the
  one-sided stable law ``1/Z^2``.
"""

import numpy as np

BACKEND = "pure"


def ig_transform(phi, lam, z, u):
    """Map standard normals ``z`` and uniforms ``u`` to IG(1/phi, lam) draws.

    ``phi`` and ``lam`` broadcast against ``z``/``u``.  ``phi = 0`` is the
    infinite-mean limit and yields ``lam / z**2`` draws.
    """
    phi = np.asarray(phi, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    nu = z * z
    t2 = 2.0 * lam * phi
    root = np.sqrt(nu * (nu + 2.0 * t2))
    x = 2.0 * lam / (nu + t2 + root)
    with np.errstate(divide="ignore"):
        big = 1.0 / (phi * phi * x)
    return np.where(u * (1.0 + phi * x) <= 1.0, x, big)


def beta_eliminate(w, order, z, u):
    """Draw ``N`` beta fields for one shared weight matrix ``w``.

    Sequential conditioning: eliminate vertices in ``order``; at each stage
    draw ``g ~ IG(1/s, 1)`` with ``s`` the off-diagonal row sum over the
    remaining vertices, set ``beta_i = (1/g + w_ii)/2`` and fold the rank-one
    Schur update ``w_jk += g * w_ji * w_ik`` into the remainder.
    """
    w = np.asarray(w, dtype=np.float64)
    n = w.shape[0]
    n_samples = z.shape[0]
    wt = np.broadcast_to(w, (n_samples, n, n)).copy()
    beta = np.empty((n_samples, n), dtype=np.float64)
    remaining = list(range(n))
    for k, i in enumerate(order):
        i = int(i)
        remaining.remove(i)
        s = np.zeros(n_samples, dtype=np.float64)
        for j in remaining:
            s += wt[:, i, j]
        g = ig_transform(s, 1.0, z[:, k], u[:, k])
        beta[:, i] = 0.5 * (1.0 / g + wt[:, i, i])
        for j in remaining:
            gw = g * wt[:, j, i]
            for m in remaining:
                wt[:, j, m] += gw * wt[:, i, m]
    return beta


def beta_eliminate_many(w3, order, z, u):
    """Like :func:`beta_eliminate` with one weight matrix per sample."""
    wt = np.array(w3, dtype=np.float64, copy=True)
    n_samples, n, _ = wt.shape
    beta = np.empty((n_samples, n), dtype=np.float64)
    remaining = list(range(n))
    for k, i in enumerate(order):
        i = int(i)
        remaining.remove(i)
        s = np.zeros(n_samples, dtype=np.float64)
        for j in remaining:
            s += wt[:, i, j]
        g = ig_transform(s, 1.0, z[:, k], u[:, k])
        beta[:, i] = 0.5 * (1.0 / g + wt[:, i, i])
        for j in remaining:
            gw = g * wt[:, j, i]
            for m in remaining:
                wt[:, j, m] += gw * wt[:, i, m]
    return beta


def _select(cum, u):
    """First index per row with ``cum > u * total`` (unnormalized inverse CDF)."""
    target = u * cum[:, -1]
    return (cum <= target[:, None]).sum(axis=1, dtype=np.int64)


def chain_paths(ccum, start, u):
    """Discrete chains from one shared cumulative-conductance matrix.

    ``ccum[i]`` is the cumulative sum of conductance row ``i`` (self-loop
    entries included at their diagonal position).
    """
    ccum = np.asarray(ccum, dtype=np.float64)
    n_samples, n_steps = u.shape
    x = np.empty((n_samples, n_steps + 1), dtype=np.int32)
    cur = np.full(n_samples, start, dtype=np.int64)
    x[:, 0] = cur
    for t in range(n_steps):
        cur = _select(ccum[cur], u[:, t])
        x[:, t + 1] = cur
    return x


def chain_paths_many(ccum3, start, u):
    """Discrete chains with one cumulative-conductance matrix per sample."""
    ccum3 = np.asarray(ccum3, dtype=np.float64)
    n_samples, n_steps = u.shape
    rows = np.arange(n_samples)
    x = np.empty((n_samples, n_steps + 1), dtype=np.int32)
    cur = np.full(n_samples, start, dtype=np.int64)
    x[:, 0] = cur
    for t in range(n_steps):
        cur = _select(ccum3[rows, cur], u[:, t])
        x[:, t + 1] = cur
    return x


def vrjp_paths(w, start, u_wait, u_choice):
    """Direct vertex-reinforced jump paths, one shared weight matrix.

    Jump rates to neighbours are ``w[i, j] * L_j`` with ``L`` the local time
    offset by one.  Rates are constant within a sojourn because only the
    occupied vertex accrues local time and its own rate never enters (the
    diagonal of ``w`` must be zero).  Returns the visited vertices and the
    sojourn times (original time scale).
    """
    w = np.asarray(w, dtype=np.float64)
    n = w.shape[0]
    n_samples, n_steps = u_wait.shape
    rows = np.arange(n_samples)
    x = np.empty((n_samples, n_steps + 1), dtype=np.int32)
    t_out = np.empty((n_samples, n_steps), dtype=np.float64)
    loc = np.ones((n_samples, n), dtype=np.float64)
    cur = np.full(n_samples, start, dtype=np.int64)
    x[:, 0] = cur
    for t in range(n_steps):
        rates = w[cur] * loc
        cum = np.cumsum(rates, axis=1)
        total = cum[:, -1]
        wait = -np.log1p(-u_wait[:, t]) / total
        loc[rows, cur] += wait
        t_out[:, t] = wait
        cur = (cum <= (u_choice[:, t] * total)[:, None]).sum(axis=1, dtype=np.int64)
        x[:, t + 1] = cur
    return x, t_out


def vrjp_paths_many(w3, start, u_wait, u_choice):
    """Direct VRJP paths with one weight matrix per sample."""
    w3 = np.asarray(w3, dtype=np.float64)
    n_samples, n_steps = u_wait.shape
    rows = np.arange(n_samples)
    n = w3.shape[1]
    x = np.empty((n_samples, n_steps + 1), dtype=np.int32)
    t_out = np.empty((n_samples, n_steps), dtype=np.float64)
    loc = np.ones((n_samples, n), dtype=np.float64)
    cur = np.full(n_samples, start, dtype=np.int64)
    x[:, 0] = cur
    for t in range(n_steps):
        rates = w3[rows, cur] * loc
        cum = np.cumsum(rates, axis=1)
        total = cum[:, -1]
        wait = -np.log1p(-u_wait[:, t]) / total
        loc[rows, cur] += wait
        t_out[:, t] = wait
        cur = (cum <= (u_choice[:, t] * total)[:, None]).sum(axis=1, dtype=np.int64)
        x[:, t + 1] = cur
    return x, t_out


def errw_paths(w0, start, u):
    """Linearly edge-reinforced walks; each traversal adds 1 to the edge weight."""
    w0 = np.asarray(w0, dtype=np.float64)
    n_samples, n_steps = u.shape
    n = w0.shape[0]
    rows = np.arange(n_samples)
    wt = np.broadcast_to(w0, (n_samples, n, n)).copy()
    x = np.empty((n_samples, n_steps + 1), dtype=np.int32)
    cur = np.full(n_samples, start, dtype=np.int64)
    x[:, 0] = cur
    for t in range(n_steps):
        cum = np.cumsum(wt[rows, cur], axis=1)
        nxt = (cum <= (u[:, t] * cum[:, -1])[:, None]).sum(axis=1, dtype=np.int64)
        wt[rows, cur, nxt] += 1.0
        wt[rows, nxt, cur] += 1.0
        x[:, t + 1] = nxt
        cur = nxt
    return x
