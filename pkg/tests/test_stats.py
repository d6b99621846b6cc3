import numpy as np
import pytest

from vrjp import jumps, stats


class TestTwoSampleTV:
    def test_identical_histograms(self):
        h = {(0, 1): 50, (1, 0): 50}
        v = stats.two_sample_tv(h, h, 100, 100)
        assert v.statistic == 0.0 and v.passed

    def test_disjoint_supports(self):
        v = stats.two_sample_tv({(0,): 10_000}, {(1,): 10_000},
                                10_000, 10_000)
        assert v.statistic == 1.0 and not v.passed

    def test_same_law_calibration(self, rng):
        # same-law multinomial pairs should essentially always pass
        probs = np.full(32, 1 / 32)
        n = 10_000
        outcomes = []
        for _ in range(30):
            a = rng.multinomial(n, probs)
            b = rng.multinomial(n, probs)
            ha = {(i,): int(c) for i, c in enumerate(a) if c}
            hb = {(i,): int(c) for i, c in enumerate(b) if c}
            outcomes.append(stats.two_sample_tv(ha, hb, n, n).passed)
        assert all(outcomes)

    def test_tv_against_exact(self):
        law = {(0,): 0.5, (1,): 0.5}
        v = stats.tv_against_exact({(0,): 5000, (1,): 5000}, law, 10_000)
        assert v.statistic == 0.0 and v.passed


class TestPathHistogram:
    def test_exact_counting(self):
        x = np.array([[0, 1], [0, 1], [1, 0]], dtype=np.int32)
        h = stats.path_histogram(x)
        assert h == {(0, 1): 2, (1, 0): 1}


class TestRestrictCollapseBatch:
    def test_matches_per_path_surgery(self, rng):
        # glue used by the MC batteries must agree with the per-path ops
        n, steps, depth = 300, 25, 3
        p = np.array([[0.0, 0.5, 0.5],
                      [0.4, 0.2, 0.4],
                      [0.3, 0.3, 0.4]])
        cum = np.cumsum(p, axis=1)
        from vrjp._kernels import chain_paths

        x = chain_paths(cum, 0, rng.random((n, steps)))
        mask = np.array([True, True, False])
        pref, done = stats.restrict_collapse_batch(x, mask, depth)
        for s in range(n):
            path = jumps.JumpPath(tuple(int(v) for v in x[s]),
                                  np.ones(x.shape[1] - 1))
            reduced = jumps.remove_self_loops(
                jumps.restrict_path(path, {0, 1}))
            want = reduced.states[:depth + 1]
            if len(want) == depth + 1:
                assert done[s]
                assert tuple(pref[s]) == want
            else:
                assert not done[s]

    def test_no_collapse_variant(self, rng):
        x = np.array([[0, 2, 0, 0, 1]], dtype=np.int32)
        mask = np.array([True, True, False])
        pref, done = stats.restrict_collapse_batch(x, mask, 2, collapse=False)
        assert done[0] and tuple(pref[0]) == (0, 0, 0)
        pref2, done2 = stats.restrict_collapse_batch(x, mask, 2)
        assert not done2[0]

    def test_requires_start_in_subset(self):
        x = np.array([[2, 0]], dtype=np.int32)
        mask = np.array([True, True, False])
        with pytest.raises(ValueError):
            stats.restrict_collapse_batch(x, mask, 1)


class TestHistogramWithIncomplete:
    def test_incomplete_mass_keyed(self):
        pref = np.array([[0, 1], [0, -1]], dtype=np.int32)
        done = np.array([True, False])
        h = stats.histogram_with_incomplete(pref, done)
        assert h == {(0, 1): 1, "incomplete": 1}


class TestChi2Helpers:
    def test_uniform_pass(self, rng):
        counts = rng.multinomial(20_000, np.full(10, 0.1))
        assert stats.chi2_binned(counts, np.full(10, 0.1)).passed

    def test_wrong_law_fails(self, rng):
        counts = rng.multinomial(20_000, np.full(10, 0.1))
        skew = np.linspace(1, 3, 10)
        assert not stats.chi2_binned(counts, skew / skew.sum()).passed

    def test_mass_outside_support_fails(self):
        v = stats.chi2_binned(np.array([10, 10]), np.array([1.0, 0.0]))
        assert not v.passed


class TestDistanceCorrelation:
    def test_independent_passes(self, rng):
        x = rng.standard_normal(300)
        y = rng.standard_normal(300)
        assert stats.dcor_permutation_test(x, y, rng).passed

    def test_nonlinear_dependence_detected(self, rng):
        x = rng.standard_normal(300)
        y = x ** 2 + 0.1 * rng.standard_normal(300)
        assert not stats.dcor_permutation_test(x, y, rng).passed


class TestKS:
    def test_two_sample_same_law(self, rng):
        a = rng.standard_normal(5_000)
        b = rng.standard_normal(5_000)
        assert stats.ks_two_sample(a, b).passed

    def test_two_sample_shifted(self, rng):
        a = rng.standard_normal(5_000)
        assert not stats.ks_two_sample(a, a + 0.2).passed
