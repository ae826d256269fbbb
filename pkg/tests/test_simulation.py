import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from regfield.correlation import CorrelationSequence, correlations_from_symbol
from regfield.errors import (
    DegenerateDesign,
    EmbeddingNotPSD,
    InsufficientData,
    NotMinimumPhase,
)
from regfield.factorization import OneSidedModel
from regfield.simulation import (
    Generator,
    SamplePath,
    empirical_correlations,
    estimate_one_sided,
    estimate_two_sided,
    simulate_ar,
    simulate_circulant,
)
from regfield.symbol import build_symbol

from conftest import B_32

WHITE = OneSidedModel([], 1.0)
BRYC = OneSidedModel([0.5], 0.75)


@pytest.fixture(scope="module")
def bryc_path():
    return simulate_ar(BRYC, 1_000_000, seed=11)


@pytest.fixture(scope="module")
def two_term_path():
    corr = correlations_from_symbol(build_symbol(B_32))
    w = 1 - 0.3 * corr.r[1] - 0.2 * corr.r[2]
    return simulate_ar(OneSidedModel([0.3, 0.2], w), 1_000_000, seed=12), corr, w


@pytest.fixture(scope="module")
def white_path():
    return simulate_ar(WHITE, 100_000, seed=13)


class TestSimulateAR:
    def test_white_noise_variance(self):
        p = simulate_ar(WHITE, 10_000, seed=1)
        assert p.T == 10_000
        assert p.generator_tag is Generator.AR
        assert abs(np.var(p.values) - 1) < 0.05

    def test_deterministic(self):
        a = simulate_ar(BRYC, 1000, seed=5)
        b = simulate_ar(BRYC, 1000, seed=5)
        assert_array_equal(a.values, b.values)
        assert not np.array_equal(a.values, simulate_ar(BRYC, 1000, seed=6).values)

    def test_streams_independent(self):
        a = simulate_ar(BRYC, 1000, seed=5, stream=0)
        b = simulate_ar(BRYC, 1000, seed=5, stream=1)
        assert not np.array_equal(a.values, b.values)
        assert_array_equal(a.values, simulate_ar(BRYC, 1000, seed=5, stream=0).values)

    def test_recursion(self):
        # the path obeys X_k = 0.5 X_{k-1} + sqrt(0.75) eps_k from a zero start
        p = simulate_ar(BRYC, 50, burn_in=0, seed=3)
        eps = np.random.Generator(np.random.PCG64(np.random.SeedSequence(3))).standard_normal(50)
        x = np.zeros(50)
        prev = 0.0
        for k in range(50):
            prev = 0.5 * prev + np.sqrt(0.75) * eps[k]
            x[k] = prev
        assert_allclose(p.values, x, atol=1e-14)

    def test_burn_in_metadata(self):
        p = simulate_ar(OneSidedModel([0.1, 0.1], 0.9), 10, seed=0)
        assert p.burn_in == 10 * 2 + 1000
        assert p.metadata()["rng_algorithm"].startswith("numpy.PCG64")

    def test_lag_one(self, bryc_path):
        r, se = empirical_correlations(bryc_path, 3)
        assert abs(r[1] - 0.5) < 0.003

    def test_not_minimum_phase(self):
        with pytest.raises(NotMinimumPhase):
            simulate_ar(OneSidedModel([1.2], 1.0), 100)


class TestCirculant:
    def test_white_noise(self):
        corr = CorrelationSequence(np.array([1.0, 0.0]), 1.0)
        p = simulate_circulant(corr, 10_000, seed=2)
        r, _ = empirical_correlations(p, 1)
        assert abs(r[1]) < 0.03
        assert p.burn_in == 0 and p.generator_tag is Generator.CIRCULANT

    def test_bryc_lag_two(self):
        corr = correlations_from_symbol(build_symbol([0.4]))
        p = simulate_circulant(corr, 100_000, seed=4)
        r, _ = empirical_correlations(p, 2)
        assert abs(r[2] - 0.25) < 0.01

    def test_deterministic(self):
        corr = correlations_from_symbol(build_symbol([0.4]))
        assert_array_equal(simulate_circulant(corr, 500, seed=9).values,
                           simulate_circulant(corr, 500, seed=9).values)

    def test_not_psd(self):
        # r_1 = 0.9 alone is not a valid circulant covariance
        corr = CorrelationSequence(np.array([1.0, 0.9, 0.9, 0.9]), 0.1)
        with pytest.raises(EmbeddingNotPSD):
            simulate_circulant(corr, 100)

    def test_generators_agree(self):
        corr = correlations_from_symbol(build_symbol(B_32))
        w = 1 - 0.3 * corr.r[1] - 0.2 * corr.r[2]
        pa = simulate_ar(OneSidedModel([0.3, 0.2], w), 200_000, seed=21)
        pc = simulate_circulant(corr, 200_000, seed=22)
        ra, sa = empirical_correlations(pa, 4)
        rc, sc = empirical_correlations(pc, 4)
        assert np.all(np.abs(ra - rc)[1:] <= 3 * np.hypot(sa, sc)[1:])
        assert np.all(np.abs(ra - corr.r[:5])[1:] <= 3 * sa[1:])
        assert np.all(np.abs(rc - corr.r[:5])[1:] <= 3 * sc[1:])


class TestEmpiricalCorrelations:
    def test_white(self, white_path):
        r, se = empirical_correlations(white_path, 3)
        assert r[0] == 1.0
        assert np.all(np.abs(r[1:]) <= 3 * se[1:])
        assert_allclose(se[1:], 1 / np.sqrt(white_path.T), rtol=0.1)

    def test_bartlett_ar1(self, bryc_path):
        # AR(1) lag-1 Bartlett variance is (1 - phi^2) / T
        _, se = empirical_correlations(bryc_path, 1)
        assert se[1] == pytest.approx(np.sqrt(0.75 / 1e6), rel=0.05)

    def test_two_term(self, two_term_path):
        path, corr, _ = two_term_path
        r, se = empirical_correlations(path, 5)
        assert np.all(np.abs(r - corr.r[:6])[1:] <= 3 * se[1:])

    def test_short_path(self):
        p = SamplePath(np.ones(20), 0, 0, Generator.AR)
        with pytest.raises(InsufficientData):
            empirical_correlations(p, 2)


class TestRegressions:
    def test_two_sided_bryc(self, bryc_path):
        est = estimate_two_sided(bryc_path, 3)
        assert np.all(np.abs(est.coeffs - [0.4, 0, 0]) <= 3 * est.stderr)
        assert abs(est.residual_variance - 0.6) < 0.01
        assert np.all(est.stderr > 0) and est.residual_variance > 0

    def test_one_sided_bryc(self, bryc_path):
        est = estimate_one_sided(bryc_path, 2)
        assert np.all(np.abs(est.coeffs - [0.5, 0]) <= 3 * est.stderr)
        assert abs(est.residual_variance - 0.75) < 0.01

    def test_white(self, white_path):
        two = estimate_two_sided(white_path, 2)
        one = estimate_one_sided(white_path, 2)
        for est in (two, one):
            assert np.all(np.abs(est.coeffs) <= 3 * est.stderr)
            assert abs(est.residual_variance - 1) <= 3 * est.residual_variance_stderr

    def test_two_term(self, two_term_path):
        path, corr, w = two_term_path
        two = estimate_two_sided(path, 4)
        one = estimate_one_sided(path, 4)
        assert np.all(np.abs(two.coeffs - [*B_32, 0, 0]) <= 3 * two.stderr)
        assert np.all(np.abs(one.coeffs - [0.3, 0.2, 0, 0]) <= 3 * one.stderr)
        assert abs(two.residual_variance - corr.v) <= 3 * two.residual_variance_stderr
        assert abs(one.residual_variance - w) <= 3 * one.residual_variance_stderr
        # coefficients beyond the band are indistinguishable from zero
        assert np.all(np.abs(one.coeffs[2:]) <= 3 * one.stderr[2:])

    def test_sample_size(self, white_path):
        assert estimate_one_sided(white_path, 3).sample_size == white_path.T - 3
        assert estimate_two_sided(white_path, 3).sample_size == white_path.T - 6

    def test_degenerate(self):
        p = SamplePath(np.zeros(1000), 0, 0, Generator.AR)
        with pytest.raises(DegenerateDesign):
            estimate_one_sided(p, 2)

    def test_too_short(self, white_path):
        p = SamplePath(white_path.values[:100], 0, 0, Generator.AR)
        with pytest.raises(InsufficientData):
            estimate_two_sided(p, 2)
        with pytest.raises(InsufficientData):
            estimate_one_sided(p, 2)
