"""Named verification suites: each runs one family of equivalence or bound
checks end to end and returns auditable verdicts.

Suites: restriction-mjp (exact restriction law on every small graph),
mixture-vrjp (restriction of the reinforced process is a mixture, plus
direct-vs-mixture), errw-gamma (edge reinforcement as a Gamma mixture),
flow-oracle (renormalization flow against full-field Schur reduction),
ig-appendix (inverse Gaussian identities, moments and bounds), and bounds
(decay bounds, crossover and minimizer formulas).
"""

from __future__ import annotations

import math
from itertools import combinations, permutations

import numpy as np

from . import betafield, flow, invgauss, jumps, linalg, processes, stats
from .graphs import Graph
from .stats import TestVerdict

TRIANGLE = Graph(["a", "b", "c"],
                 {("a", "b"): 1.0, ("b", "c"): 2.0, ("a", "c"): 0.5})
FOUR_CYCLE = Graph(["a", "b", "c", "d"],
                   {("a", "b"): 1.0, ("b", "c"): 1.5, ("c", "d"): 0.8,
                    ("a", "d"): 1.2})
TRIANGLE_PENDANT = Graph(["a", "b", "c", "d"],
                         {("a", "b"): 1.0, ("b", "c"): 1.3, ("a", "c"): 0.7,
                          ("c", "d"): 1.6})
PATH3 = Graph(["a", "b", "c"], {("a", "b"): 1.0, ("b", "c"): 1.0})


def connected_graphs_up_to_iso(max_n: int):
    """Edge lists of all connected graphs with 2..max_n vertices, one per
    isomorphism class (brute-force canonicalization; fine through n = 5)."""
    out = []
    for n in range(2, max_n + 1):
        pairs = list(combinations(range(n), 2))
        perms = list(permutations(range(n)))
        seen = set()
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            adj = {v: set() for v in range(n)}
            for a, b in edges:
                adj[a].add(b)
                adj[b].add(a)
            comp = {0}
            stack = [0]
            while stack:
                for w in adj[stack.pop()]:
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            if len(comp) != n:
                continue
            canon = min(tuple(sorted(tuple(sorted((p[a], p[b])))
                                     for a, b in edges)) for p in perms)
            if canon not in seen:
                seen.add(canon)
                out.append((n, edges))
    return out


def _random_params(n, edges, rng) -> jumps.MJPParams:
    c = np.zeros((n, n))
    for a, b in edges:
        c[a, b] = c[b, a] = rng.uniform(0.5, 2.0)
    c[np.arange(n), np.arange(n)] = np.where(rng.random(n) < 0.5,
                                             rng.uniform(0.2, 1.0, n), 0.0)
    pi = rng.uniform(0.5, 2.0, n)
    return jumps.MJPParams(c, pi)


def suite_restriction_mjp(seed: int, quick: bool = False) -> list[TestVerdict]:
    """Exact restriction law: push-forward of the full path law equals the
    chain with Schur-reduced parameters, for every small graph and subset."""
    rng = np.random.default_rng(seed)
    depth = 4
    verdicts = []
    for g_i, (n, edges) in enumerate(connected_graphs_up_to_iso(4 if quick
                                                                else 5)):
        params = _random_params(n, edges, rng)
        worst = 0.0
        max_tail = 0.0
        combos = 0
        for size in range(2, n + 1):
            for subset in combinations(range(n), size):
                sub_neq = jumps.drop_loop_params(
                    jumps.restricted_params(params, subset))
                pushed = jumps.restricted_prefix_laws(
                    params, list(subset), subset, depth, collapse=True,
                    tail_tol=2e-7)
                for root, (law_dp, tail) in zip(subset, pushed):
                    law_chain = jumps.exact_path_law(sub_neq, root, depth)
                    worst = max(worst, stats.tv_exact(law_dp, law_chain))
                    max_tail = max(max_tail, tail)
                    combos += 1
        name = f"restriction-law-{g_i:02d}-n{n}-e{len(edges)}"
        verdicts.append(TestVerdict(
            name=name, statistic=worst, threshold=1e-5,
            passed=worst < 1e-5, n=combos,
            notes=f"max tail={max_tail:.2e}, depth={depth}"))
    return verdicts


def mixture_restricted_histogram(w: np.ndarray, j_idx, rho_idx: int, depth: int,
                                 n_paths: int, rng: np.random.Generator,
                                 mixing: str) -> dict:
    """Histogram of the mixture side of the restriction theorem.

    Draws the mixing field (either on the wired graph I + pin or on the full
    vertex set), forms the loop-removed effective weights from the beta
    values on I, and runs a fresh reinforced process on the subset.  Keys are
    tuples of original vertex indices.
    """
    n = w.shape[0]
    j_idx = list(j_idx)
    i_idx = [i for i in range(n) if i not in set(j_idx)]
    if mixing == "wired":
        w_hat, order = linalg.wire_weights(w, j_idx, rho_idx)
        betas = betafield.sample_beta_batch(w_hat, n_paths, rng)
        beta_i = betas[:, :len(i_idx)]
    elif mixing == "full":
        betas = betafield.sample_beta_batch(w, n_paths, rng)
        beta_i = betas[:, i_idx]
    else:
        raise ValueError("mixing must be 'wired' or 'full'")
    w_j = linalg.effective_weights_batch(w, beta_i, i_idx, j_idx)
    d = np.arange(len(j_idx))
    w_j[:, d, d] = 0.0
    x, _ = processes.vrjp_direct_batch_many(w_j, j_idx.index(rho_idx), depth,
                                            rng)
    return stats.path_histogram(np.asarray(j_idx, dtype=np.int32)[x])


def direct_restricted_histogram(w: np.ndarray, j_idx, rho_idx: int, depth: int,
                                n_raw_steps: int, n_paths: int,
                                rng: np.random.Generator) -> dict:
    """Histogram of the direct side: simulate on the full graph, restrict,
    remove self-loops, keep the first ``depth`` restricted steps."""
    x, _ = processes.vrjp_direct_batch(w, rho_idx, n_raw_steps, n_paths, rng)
    mask = np.zeros(w.shape[0], dtype=bool)
    mask[list(j_idx)] = True
    prefixes, completed = stats.restrict_collapse_batch(x, mask, depth)
    return stats.histogram_with_incomplete(prefixes, completed)


def suite_mixture_vrjp(seed: int, quick: bool = False) -> list[TestVerdict]:
    """Restriction-of-VRJP mixture theorem (both mixing forms) and the
    direct-vs-mixture representation on small graphs."""
    rng = np.random.default_rng(seed)
    n_paths = 20_000 if quick else 100_000
    verdicts = []

    for g, label in [(TRIANGLE, "triangle"), (PATH3, "path3")]:
        w = g.weight_matrix()
        k = 6
        xd, _ = processes.vrjp_direct_batch(w, 0, k, n_paths, rng)
        xm = processes.vrjp_mixture_batch(w, 0, k, n_paths, rng)
        verdicts.append(stats.two_sample_tv(
            stats.path_histogram(xd), stats.path_histogram(xm), n_paths,
            n_paths, name=f"vrjp-direct-vs-mixture-{label}"))

    depth = 5
    for g, label in [(FOUR_CYCLE, "4cycle"), (TRIANGLE_PENDANT, "tri-pendant")]:
        w = g.weight_matrix()
        j_idx = [0, 1, 2]
        rho = 0
        direct = direct_restricted_histogram(w, j_idx, rho, depth, 100,
                                             n_paths, rng)
        for mixing in ("wired", "full"):
            mixed = mixture_restricted_histogram(w, j_idx, rho, depth,
                                                 n_paths, rng, mixing)
            verdicts.append(stats.two_sample_tv(
                direct, mixed, n_paths, n_paths,
                name=f"mixture-restriction-{label}-{mixing}"))
    return verdicts


def suite_errw_gamma(seed: int, quick: bool = False) -> list[TestVerdict]:
    """Edge-reinforced walk equals the Gamma(a,1) mixture of discrete VRJPs."""
    rng = np.random.default_rng(seed)
    n_paths = 20_000 if quick else 100_000
    g = TRIANGLE
    k = 6
    verdicts = []
    for a in (0.5, 1.0, 2.0):
        xd = processes.errw_batch(g, a, "a", k, n_paths, rng)
        xm = processes.errw_mixture_batch(g, a, "a", k, n_paths, rng)
        verdicts.append(stats.two_sample_tv(
            stats.path_histogram(xd), stats.path_histogram(xm), n_paths,
            n_paths, name=f"errw-vs-gamma-mixture-a{a}"))
    return verdicts


def _schur_reduced_batch(g: Graph, r: int, n_samples: int,
                         rng: np.random.Generator) -> np.ndarray:
    """Full-field route: sample the beta field on the subdivided graph and
    Schur-reduce to the base vertex set; returns per-base-edge weights."""
    from .graphs import SubdividedGraph

    sg = SubdividedGraph(g, r)
    wmat = sg.weight_matrix()
    betas = betafield.sample_beta_batch(wmat, n_samples, rng)
    i_idx = list(range(g.n, sg.n))
    j_idx = list(range(g.n))
    w_j = linalg.effective_weights_batch(wmat, betas[:, i_idx], i_idx, j_idx)
    out = np.empty((n_samples, len(g.edges)))
    for k, (u, v) in enumerate(g.edges):
        out[:, k] = w_j[:, g.index(u), g.index(v)]
    return out


def suite_flow_oracle(seed: int, quick: bool = False) -> list[TestVerdict]:
    """Flow weights against the full-field Schur reduction, plus exactness
    of the tracked recursion."""
    rng = np.random.default_rng(seed)
    n_samples = 2_000 if quick else 10_000
    r = 2
    verdicts = []
    for g, label in [(Graph(["a", "b"], {("a", "b"): 1.0}), "edge"),
                     (Graph(["a", "b", "c"],
                            {("a", "b"): 1.0, ("b", "c"): 1.0}), "path3")]:
        st = flow.run_flow(g, r, 0, n_samples, rng, weights=1.0)
        schur = _schur_reduced_batch(g, r, n_samples, rng)
        for k in range(len(g.edges)):
            v = stats.ks_two_sample(st.weights[:, k, 0], schur[:, k],
                                    name=f"flow-vs-schur-{label}-edge{k}")
            verdicts.append(v)

    g = PATH3
    _, history = flow.run_flow(g, r, 0, 200, rng, weights=1.0, track=True,
                               return_history=True)
    err = _tracked_flow_error(g, r, history)
    verdicts.append(TestVerdict(name="tracked-flow-vs-schur",
                                statistic=err, threshold=1e-10,
                                passed=err < 1e-10, n=200,
                                notes="max rel err over levels 0..r-1"))
    return verdicts


def _tracked_flow_error(g: Graph, r: int, history) -> float:
    """Max relative deviation of tracked flow weights and betas from a
    direct Schur reduction with the same initial field and weights."""
    from .graphs import SubdividedGraph

    sg = SubdividedGraph(g, r)
    beta0 = history[0].beta_neq
    w0 = history[0].weights
    n_samples = beta0.shape[0]
    interior = list(range(g.n, sg.n))
    err = 0.0
    for state in history[1:]:
        l = state.level
        j_ids = [sg.index(v) for v in sg.vertices_at_level(l)]
        i_ids = [k for k in range(sg.n) if k not in set(j_ids)]
        pos = {idx: t for t, idx in enumerate(interior)}
        for s in range(n_samples):
            wmat = sg.weight_matrix(w0[s].reshape(-1))
            flat = beta0[s].reshape(-1)
            beta_i = np.array([flat[pos[i]] for i in i_ids])
            w_l = linalg.effective_weights(wmat, beta_i, i_ids, j_ids)
            loc = {idx: t for t, idx in enumerate(j_ids)}
            for kk, e in enumerate(sg.edges_at_level(l)):
                a, b = sg.endpoints(e)
                got = state.weights[s, kk // 2 ** l, kk % 2 ** l]
                want = w_l[loc[sg.index(a)], loc[sg.index(b)]]
                err = max(err, abs(got - want) / abs(want))
            if state.beta_neq is not None and state.beta_neq.size:
                for kk, v in enumerate(vv for vv in sg.vertices_at_level(l)
                                       if sg.index(vv) >= g.n):
                    idx = sg.index(v)
                    want = flat[pos[idx]] - 0.5 * w_l[loc[idx], loc[idx]]
                    got = state.beta_neq[s].reshape(-1)[kk]
                    err = max(err, abs(got - want) / abs(want))
    return err


def suite_ig_appendix(seed: int, quick: bool = False) -> list[TestVerdict]:
    """Inverse Gaussian identities: Laplace transform, moment limits, and
    the logarithmic-moment bounds."""
    rng = np.random.default_rng(seed)
    n = 100_000 if quick else 1_000_000
    verdicts = []

    a = 1.3
    p = invgauss.IGParams(a / 2.0, a * a / 2.0)
    x = invgauss.ig_sample(p, rng, n)
    for s in (0.25, 1.0, 4.0):
        vals = np.exp((1.0 - s) * x)
        target = math.exp(a * (1.0 - math.sqrt(s)))
        se = float(vals.std(ddof=1) / math.sqrt(n))
        dev = abs(float(vals.mean()) - target)
        threshold = 4.0 * se if s != 1.0 else 1e-15
        verdicts.append(TestVerdict(
            name=f"laplace-identity-s{s}", statistic=dev, threshold=threshold,
            passed=dev <= threshold, n=n,
            notes=f"target={target:.6f}, se={se:.2e}"))

    dev = abs(invgauss.frac_moment(1e-4, 0.25) - invgauss.c_alpha(0.25))
    verdicts.append(TestVerdict(
        name="frac-moment-limit-c-quarter", statistic=dev, threshold=1e-3,
        passed=dev < 1e-3, n=1,
        notes=f"C_1/4={invgauss.c_alpha(0.25):.6f}"))

    dev = abs(invgauss.log_moment(1e-6) - invgauss.C2)
    verdicts.append(TestVerdict(
        name="log-moment-limit-c2", statistic=dev, threshold=1e-3,
        passed=dev < 1e-3, n=1, notes=f"c2={invgauss.C2:.6f}"))

    grid = np.geomspace(1e-4, 20.0, 50)
    worst = -np.inf
    ok = True
    for w in grid:
        val = invgauss.log_moment(w)
        lo = -math.log(w + 0.5)
        hi = min(-math.log(w), invgauss.C2)
        margin = max(lo - val, val - hi)
        if w <= 0.5 * math.exp(-invgauss.GAMMA_EULER):
            small_lo = invgauss.C2 + 4.0 * w * (math.log(w) + invgauss.C2 - 1.0)
            margin = max(margin, small_lo - val)
        worst = max(worst, margin)
        ok = ok and margin <= 1e-12
    verdicts.append(TestVerdict(
        name="log-moment-bounds-grid", statistic=worst, threshold=1e-12,
        passed=ok, n=len(grid), notes="three bounds on 50-point grid"))

    n_ks = 20_000 if quick else 100_000
    for mu, lam in [(0.1, 1.0), (1.0, 1.0), (10.0, 1.0), (2.0, 0.5)]:
        pp = invgauss.IGParams(mu, lam)
        draws = invgauss.ig_sample(pp, rng, n_ks)
        cdf = _quadrature_cdf(pp, draws)
        v = stats.ks_against_cdf(draws, cdf, name=f"ig-sampler-ks-mu{mu}-lam{lam}")
        verdicts.append(v)
    return verdicts


def _quadrature_cdf(p: invgauss.IGParams, draws: np.ndarray):
    """CDF oracle by numerically integrating the density onto a dense grid."""
    from scipy import integrate, interpolate

    lo = float(draws.min()) * 0.999
    hi = float(draws.max()) * 1.001
    grid = np.geomspace(lo, hi, 600)
    pieces = np.zeros(grid.size)
    head, _ = integrate.quad(lambda t: float(invgauss.ig_density(t, p)),
                             0.0, grid[0], epsabs=1e-12, epsrel=1e-10)
    pieces[0] = head
    for i in range(1, grid.size):
        seg, _ = integrate.quad(lambda t: float(invgauss.ig_density(t, p)),
                                grid[i - 1], grid[i], epsabs=1e-12,
                                epsrel=1e-10)
        pieces[i] = seg
    cum = np.minimum(np.cumsum(pieces), 1.0)
    f = interpolate.PchipInterpolator(np.log(grid), cum)

    def cdf(x):
        x = np.asarray(x, dtype=np.float64)
        return np.clip(f(np.log(np.clip(x, lo, hi))), 0.0, 1.0)

    return cdf


def suite_bounds(seed: int, quick: bool = False) -> list[TestVerdict]:
    """Decay bounds along the flow, the one-step crossover rule, and the
    closed-form minimizers of the combined bounds."""
    rng = np.random.default_rng(seed)
    n_samples = 4096 if quick else 16384
    g = Graph(["a", "b"], {("a", "b"): 1.0})
    alphas = [0.1, 0.25, 0.4, 1.0]
    rows = flow.verify_bounds(
        g, r=6, l=0, alphas=alphas, n_samples=n_samples, rng=rng,
        weights=lambda rr, shape: rr.gamma(1.0, size=shape),
        moment_alpha_fn=lambda alpha: math.gamma(1.0 + alpha),
        log_moment_value=-invgauss.GAMMA_EULER)
    verdicts = []
    for alpha in alphas + ["log"]:
        sub = [row for row in rows if row["alpha"] == alpha]
        margin = max((row["mc_moment"]
                      - min(b for b in (row["bound_phase1"],
                                        row["bound_combined"],
                                        row["bound_log"]) if b is not None)
                      - 4.0 * row["mc_se"]) for row in sub)
        verdicts.append(TestVerdict(
            name=f"moment-bounds-alpha-{alpha}", statistic=margin,
            threshold=0.0, passed=all(row["ok"] for row in sub),
            n=len(sub), notes="max(mc - bound - 4se) over levels"))

    worst_cross = 0
    for alpha in (0.1, 0.25, 0.4):
        pivot = 2.0 ** (-alpha) / invgauss.c_alpha(alpha)
        for moment in np.geomspace(1e-3, 1e3, 41):
            plain, squared, plain_stronger = flow.one_step_bounds(alpha, moment)
            if plain_stronger != (moment > pivot):
                worst_cross += 1
    verdicts.append(TestVerdict(
        name="one-step-crossover-rule", statistic=float(worst_cross),
        threshold=0.0, passed=worst_cross == 0, n=3 * 41,
        notes="tighter-bound prediction vs direct comparison"))

    failures = 0
    for _ in range(500):
        alpha = rng.uniform(0.02, 0.48)
        r = int(rng.integers(1, 25))
        l = int(rng.integers(0, r + 1))
        rep = flow.moment_bound(alpha, r, l,
                                moment_alpha=float(np.exp(rng.uniform(-8, 4))),
                                log_moment_in=float(rng.uniform(-10, 5)))
        if rep.alpha_log_terms[rep.m0 - l] != rep.alpha_log_terms.min():
            failures += 1
        if rep.log_terms[rep.m1 - l] != rep.log_terms.min():
            failures += 1
    verdicts.append(TestVerdict(
        name="minimizer-clamping-rule", statistic=float(failures),
        threshold=0.0, passed=failures == 0, n=500,
        notes="m0/m1 reproduce argmin exactly"))
    return verdicts


SUITES = {
    "restriction-mjp": suite_restriction_mjp,
    "mixture-vrjp": suite_mixture_vrjp,
    "errw-gamma": suite_errw_gamma,
    "flow-oracle": suite_flow_oracle,
    "ig-appendix": suite_ig_appendix,
    "bounds": suite_bounds,
}


def run_suite(name: str, seed: int, quick: bool = False) -> list[TestVerdict]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](seed, quick=quick)
