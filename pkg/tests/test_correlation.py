import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from regfield.correlation import (
    CorrelationSequence,
    check_v_identity,
    correlations_from_symbol,
    min_section_eigenvalue,
    symbol_identity_residual,
    toeplitz_section,
)
from regfield.errors import InsufficientCorrelations, SymbolNotInvertible
from regfield.symbol import build_symbol

from conftest import B_32_ROUNDED, random_positive_band

# scipy.integrate.quad of cos(k t) / b(t) over [0, pi], normalised by the k = 0 value
R_ROUNDED_QUAD = [1.0, 0.3749988764223588, 0.31249909043783186, 0.168749150897438, 0.11312434340394424]
V_ROUNDED_QUAD = 0.7300896742396986


def test_bryc_chain():
    corr = correlations_from_symbol(build_symbol([0.4]), K=3)
    assert_allclose(corr.r, [1, 0.5, 0.25, 0.125], atol=1e-14)
    assert corr.v == pytest.approx(0.6, abs=1e-14)
    assert corr.r[0] == 1.0


def test_white_noise():
    corr = correlations_from_symbol(build_symbol([]), K=2)
    assert_array_equal(corr.r, [1.0, 0.0, 0.0])
    assert corr.v == 1.0


def test_two_term_against_quadrature():
    sym = build_symbol(B_32_ROUNDED)
    corr = correlations_from_symbol(sym, K=4)
    assert_allclose(corr.r, R_ROUNDED_QUAD, atol=1e-12)
    assert corr.v == pytest.approx(V_ROUNDED_QUAD, abs=1e-12)
    assert check_v_identity(sym, corr) < 1e-10


def test_default_K():
    corr = correlations_from_symbol(build_symbol([0.4]))
    assert corr.K >= 128
    corr = correlations_from_symbol(build_symbol([0.4999]))
    assert corr.K > 128
    assert abs(corr.r[-1]) < 1e-12


def test_not_positive():
    with pytest.raises(SymbolNotInvertible):
        correlations_from_symbol(build_symbol([0.5]))


def test_invariants_validated():
    with pytest.raises(ValueError):
        CorrelationSequence(np.array([0.9, 0.1]), 1.0)
    with pytest.raises(ValueError):
        CorrelationSequence(np.array([1.0, 0.1]), 0.0)


class TestToeplitzSection:
    def test_bryc(self):
        corr = correlations_from_symbol(build_symbol([0.4]), K=3)
        assert_allclose(toeplitz_section(corr, 2), [[1, 0.5], [0.5, 1]], atol=1e-14)

    def test_size_one(self):
        corr = correlations_from_symbol(build_symbol([0.3]), K=3)
        assert_array_equal(toeplitz_section(corr, 1), [[1.0]])

    def test_white_noise_identity(self):
        corr = correlations_from_symbol(build_symbol([]), K=2)
        assert_array_equal(toeplitz_section(corr, 3), np.eye(3))

    def test_insufficient(self):
        corr = correlations_from_symbol(build_symbol([0.3]), K=3)
        with pytest.raises(InsufficientCorrelations):
            toeplitz_section(corr, 5)

    def test_shift_invariance(self, rng):
        corr = correlations_from_symbol(build_symbol(random_positive_band(rng)))
        T = toeplitz_section(corr, 20)
        assert_array_equal(T[:-1, :-1], T[1:, 1:])
        assert_array_equal(T, T.T)


def test_v_identity_white_noise():
    s = build_symbol([])
    assert check_v_identity(s, correlations_from_symbol(s, K=2)) == 0.0


def test_v_identity_bryc():
    s = build_symbol([0.4])
    assert check_v_identity(s, correlations_from_symbol(s, K=3)) < 1e-12


@pytest.mark.parametrize("trial", range(20))
def test_pointwise_identity_and_pd(trial):
    rng = np.random.default_rng(trial)
    sym = build_symbol(random_positive_band(rng))
    corr = correlations_from_symbol(sym)
    assert symbol_identity_residual(sym, corr) < 1e-10
    assert np.all(np.abs(corr.r) <= 1.0)
    assert min_section_eigenvalue(corr, 64) > 0
    assert check_v_identity(sym, corr) < 1e-10


@pytest.mark.parametrize("a", [-0.49, -0.3, 0.1, 0.25, 0.4, 0.45, 0.49])
def test_bryc_geometric_law(a):
    corr = correlations_from_symbol(build_symbol([a]))
    r1 = (1 - np.sqrt(1 - 4 * a * a)) / (2 * a)
    k = np.arange(corr.K + 1)
    assert_allclose(corr.r, r1**k, atol=1e-10)
    # a = r_1 / (1 + r_1^2)
    assert corr.r[1] / (1 + corr.r[1] ** 2) == pytest.approx(a, abs=1e-12)
