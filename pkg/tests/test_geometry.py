import math

import numpy as np
import pytest
from scipy import stats

from overlaytc.errors import DivergentTailError, InvalidParameterError
from overlaytc.geometry import (
    DiscWindow,
    PointPattern,
    mark_uniform,
    sample_ppp,
    select_mark,
    superpose,
    thin,
    truncation_radius,
)
from overlaytc.rng import StreamKey

W100 = DiscWindow(100.0)


def key(i, purpose="geom"):
    return StreamKey(2024, purpose, i)


def test_window_validation():
    with pytest.raises(InvalidParameterError):
        DiscWindow(0.0)
    with pytest.raises(InvalidParameterError):
        DiscWindow(math.inf)


def test_zero_density_is_empty():
    p = sample_ppp(0.0, W100, key(0))
    assert len(p) == 0
    assert p.density_used == 0.0


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf])
def test_bad_density(bad):
    with pytest.raises(InvalidParameterError):
        sample_ppp(bad, W100, key(0))


def test_sample_is_deterministic_per_key():
    a = sample_ppp(0.01, W100, key(5))
    b = sample_ppp(0.01, W100, key(5))
    c = sample_ppp(0.01, W100, key(6))
    np.testing.assert_array_equal(a.points, b.points)
    assert len(a) != len(c) or not np.array_equal(a.points, c.points)


def test_points_inside_window_and_immutable():
    p = sample_ppp(0.01, DiscWindow(30.0, (5.0, -2.0)), key(1))
    assert p.window.contains(p.points).all()
    with pytest.raises(ValueError):
        p.points[0, 0] = 1.0


def test_mean_count():
    # Poisson mean: 0.01 * pi * 100^2
    counts = np.array([len(sample_ppp(0.01, W100, key(i))) for i in range(10_000)])
    expected = 0.01 * math.pi * 100**2
    assert abs(counts.mean() - expected) / expected < 0.01


def test_count_distribution_chi_square():
    window = DiscWindow(20.0)
    mu = 0.01 * window.area  # ~12.6
    counts = np.array([len(sample_ppp(0.01, window, key(i, "chi"))) for i in range(10_000)])
    edges = np.arange(3, 24)
    observed = np.array(
        [np.sum(counts <= edges[0])]
        + [np.sum(counts == k) for k in edges[1:]]
        + [np.sum(counts > edges[-1])]
    )
    probs = np.concatenate((
        [stats.poisson.cdf(edges[0], mu)],
        stats.poisson.pmf(edges[1:], mu),
        [stats.poisson.sf(edges[-1], mu)],
    ))
    _, pval = stats.chisquare(observed, probs * counts.size)
    assert pval > 0.01


def test_uniform_radial_law():
    # given the count, P(|x| <= s) = (s/R)^2
    p = sample_ppp(0.05, W100, key(9))
    u = (p.distances / 100.0) ** 2
    assert stats.kstest(u, "uniform").pvalue > 0.01


def test_interior_subdisc_density_within_3_sigma():
    inner = 40.0
    hits = 0
    n = 2000
    for i in range(n):
        p = sample_ppp(0.01, W100, key(i, "sub"))
        hits += int(np.sum(p.distances <= inner))
    mean = 0.01 * math.pi * inner**2 * n
    assert abs(hits - mean) <= 3 * math.sqrt(mean)


class TestThin:
    def test_identity_and_empty(self):
        p = sample_ppp(0.01, W100, key(0))
        assert thin(p, 1.0, key(1)) is p
        q = thin(p, 0.0, key(1))
        assert len(q) == 0 and q.density_used == 0.0

    @pytest.mark.parametrize("bad", [-0.1, 1.5])
    def test_bad_prob(self, bad):
        with pytest.raises(InvalidParameterError):
            thin(sample_ppp(0.01, W100, key(0)), bad, key(1))

    def test_density(self):
        total = 0
        for i in range(10_000):
            p = thin(sample_ppp(0.02, W100, key(i, "t0")), 0.25, key(i, "t1"))
            total += len(p)
        assert p.density_used == pytest.approx(0.005)
        emp = total / (10_000 * W100.area)
        assert abs(emp - 0.005) / 0.005 < 0.02

    def test_complement_reconstructs_count(self):
        g = np.random.default_rng(3)
        for i in range(50):
            p = sample_ppp(0.01, W100, key(i))
            u = g.random(len(p))
            kept = PointPattern(p.window, p.points[u < 0.3], 0.003)
            rest = PointPattern(p.window, p.points[u >= 0.3], 0.007)
            both = superpose(kept, rest)
            assert len(both) == len(p)
            assert both.density_used == pytest.approx(p.density_used)


class TestMarks:
    def test_single_mark(self):
        p = mark_uniform(sample_ppp(0.01, W100, key(0)), 1, key(1))
        assert (p.marks == 1).all()

    def test_zero_marks_rejected(self):
        with pytest.raises(InvalidParameterError):
            mark_uniform(sample_ppp(0.01, W100, key(0)), 0, key(1))

    def test_mark_class_densities(self):
        totals = np.zeros(4)
        for i in range(10_000):
            p = mark_uniform(sample_ppp(0.02, W100, key(i, "m0")), 4, key(i, "m1"))
            for k in range(1, 5):
                totals[k - 1] += len(select_mark(p, k))
        assert select_mark(p, 2).density_used == pytest.approx(0.005)
        emp = totals / (10_000 * W100.area)
        np.testing.assert_allclose(emp, 0.005, rtol=0.02)

    def test_chi_square_uniform(self):
        marks = []
        i = 0
        while sum(map(len, marks)) < 100_000:
            marks.append(mark_uniform(sample_ppp(0.02, W100, key(i, "mc0")), 7, key(i, "mc1")).marks)
            i += 1
        allm = np.concatenate(marks)
        observed = np.bincount(allm, minlength=8)[1:]
        assert stats.chisquare(observed).pvalue > 0.01

    def test_marks_validated(self):
        with pytest.raises(InvalidParameterError):
            PointPattern(W100, np.zeros((2, 2)), 0.1, np.array([1, 5]), 4)


class TestSuperpose:
    def test_empty_identity(self):
        b = sample_ppp(0.01, W100, key(1))
        out = superpose(sample_ppp(0.0, W100, key(0)), b)
        np.testing.assert_array_equal(out.points, b.points)

    def test_window_mismatch(self):
        with pytest.raises(InvalidParameterError):
            superpose(sample_ppp(0.01, W100, key(0)), sample_ppp(0.01, DiscWindow(50.0), key(1)))

    def test_counts_and_density(self):
        total = 0
        for i in range(10_000):
            a = sample_ppp(0.003, W100, key(i, "sa"))
            b = mark_uniform(sample_ppp(0.007, W100, key(i, "sb")), 3, key(i, "sc"))
            u = superpose(a, b)
            assert len(u) == len(a) + len(b)
            assert u.marks is None
            total += len(u)
        assert u.density_used == pytest.approx(0.010)
        emp = total / (10_000 * W100.area)
        assert abs(emp - 0.010) / 0.010 < 0.01


class TestTruncationRadius:
    def test_floor_of_fifty_links(self):
        assert truncation_radius(1e-4, 4.0, 5.0, 3.0, 1e-3) == 250.0

    def test_tail_branch(self):
        # direct evaluation of the closed form with a large density
        lam, alpha, d, theta, eta = 0.5, 3.0, 5.0, 3.0, 1e-3
        expected = (2 * math.pi * lam * theta * d**alpha / ((alpha - 2) * eta)) ** (1 / (alpha - 2))
        assert expected > 250
        assert truncation_radius(lam, alpha, d, theta, eta) == pytest.approx(expected, rel=1e-12)

    def test_tail_bias_meets_tolerance(self):
        lam, alpha, d, theta, eta = 0.5, 3.0, 5.0, 3.0, 1e-3
        R = truncation_radius(lam, alpha, d, theta, eta)
        tail = 2 * math.pi * lam * R ** (2 - alpha) / (alpha - 2)
        assert tail <= eta * d**-alpha / theta * (1 + 1e-12)

    @pytest.mark.parametrize("alpha", [2.0, 1.5])
    def test_divergent(self, alpha):
        with pytest.raises(DivergentTailError):
            truncation_radius(1e-4, alpha, 5.0, 3.0)
