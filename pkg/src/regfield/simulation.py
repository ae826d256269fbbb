"""Gaussian sample paths of the field and regression estimates from data.

Two generators are provided: the autoregressive recursion driven by the
one-sided model, and exact circulant embedding of the correlation sequence.
Both use numpy's PCG64 bit generator; Gaussian variates come from
``Generator.standard_normal`` (ziggurat).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.signal import lfilter

from .correlation import CorrelationSequence
from .errors import DegenerateDesign, EmbeddingNotPSD, InsufficientData, NotMinimumPhase
from .factorization import OneSidedModel, is_minimum_phase
from .symbol import next_pow2

RNG_ALGORITHM = "numpy.PCG64/ziggurat"
EMBEDDING_NEG_TOL = 1e-10


class Generator(str, Enum):
    AR = "AR"
    CIRCULANT = "CIRCULANT"


@dataclass(frozen=True)
class SamplePath:
    values: np.ndarray
    seed: int
    burn_in: int
    generator_tag: Generator
    stream: int | None = None
    rng_algorithm: str = RNG_ALGORITHM

    def __post_init__(self):
        x = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.size < 1:
            raise ValueError("a sample path needs at least one value")
        if not np.all(np.isfinite(x)):
            raise ValueError("sample path contains non-finite values")
        x.setflags(write=False)
        object.__setattr__(self, "values", x)

    @property
    def T(self) -> int:
        return len(self.values)

    def metadata(self) -> dict:
        return {
            "T": self.T,
            "seed": self.seed,
            "stream": self.stream,
            "burn_in": self.burn_in,
            "generator": self.generator_tag.value,
            "rng_algorithm": self.rng_algorithm,
        }


@dataclass(frozen=True)
class RegressionEstimate:
    coeffs: np.ndarray
    stderr: np.ndarray
    residual_variance: float
    residual_variance_stderr: float
    sample_size: int
    extra: dict = field(default_factory=dict, compare=False)


def make_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    """PCG64 generator; ``stream`` selects an independent child of ``seed``."""
    if stream is None:
        ss = np.random.SeedSequence(seed)
    else:
        ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))


def default_burn_in(order: int) -> int:
    return 10 * order + 1000


def simulate_ar(
    model: OneSidedModel,
    T: int,
    burn_in: int | None = None,
    seed: int = 0,
    stream: int | None = None,
) -> SamplePath:
    """``X_k = sum_j beta_j X_{k-j} + sqrt(w) eps_k`` from a zero initial state."""
    if T < 1:
        raise ValueError("T must be positive")
    if not is_minimum_phase(model.betas):
        raise NotMinimumPhase("AR recursion would diverge: beta(z) has a zero in the closed unit disk")
    if burn_in is None:
        burn_in = default_burn_in(model.order)
    rng = make_rng(seed, stream)
    eps = rng.standard_normal(burn_in + T)
    x = lfilter([math.sqrt(model.w)], np.r_[1.0, -model.betas], eps)
    return SamplePath(x[burn_in:], seed, burn_in, Generator.AR, stream)


def circulant_eigenvalues(corr: CorrelationSequence, size: int) -> np.ndarray:
    K = corr.K
    if size < 2 * K + 2:
        raise ValueError(f"embedding size {size} too small for K={K}")
    row = np.zeros(size)
    row[: K + 1] = corr.r
    row[size - K:] = corr.r[1:][::-1]
    return np.fft.fft(row).real


def simulate_circulant(
    corr: CorrelationSequence,
    T: int,
    seed: int = 0,
    stream: int | None = None,
) -> SamplePath:
    """Exact stationary sample with covariance ``r_|i-j|`` (Wood-Chan embedding).

    Correlations beyond ``K`` are taken as zero; the embedding has the
    smallest power-of-two size ``>= 2 (T + K)``.
    """
    if T < 1:
        raise ValueError("T must be positive")
    size = next_pow2(2 * (T + corr.K))
    lam = circulant_eigenvalues(corr, size)
    if lam.min() < -EMBEDDING_NEG_TOL:
        raise EmbeddingNotPSD(
            f"circulant embedding has eigenvalue {lam.min():.3e}; increase K or the embedding"
        )
    lam = np.clip(lam, 0.0, None)
    rng = make_rng(seed, stream)
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    x = np.fft.fft(np.sqrt(lam / size) * z).real[:T]
    return SamplePath(x, seed, 0, Generator.CIRCULANT, stream)


def _raw_autocov(x: np.ndarray, maxlag: int) -> np.ndarray:
    """``(1/(T-k)) sum_i x_i x_{i+k}`` for ``k = 0..maxlag`` (no demeaning)."""
    T = len(x)
    n = next_pow2(2 * T)
    f = np.fft.rfft(x, n)
    acov = np.fft.irfft(f * np.conj(f), n)[: maxlag + 1]
    return acov / (T - np.arange(maxlag + 1))


def empirical_correlations(path: SamplePath, K: int) -> tuple[np.ndarray, np.ndarray]:
    """Sample correlations ``r_0..r_K`` and their Bartlett standard errors.

    The standard error of lag ``k`` uses Bartlett's asymptotic formula

        var(r_k) ~ (1/T) sum_{m>=1} (r_{m+k} + r_{m-k} - 2 r_k r_m)^2

    with the sum truncated at ``L = max(10K, 100)`` lags (capped by ``T/10``)
    and sample correlations plugged in.
    """
    x = path.values
    T = len(x)
    if T <= 10 * K:
        raise InsufficientData(f"need T > 10K = {10 * K}, got T={T}")
    L = max(10 * K, 100)
    L = max(K, min(L, T // 10 - K))
    acov = _raw_autocov(x, L + K)
    rho = acov / acov[0]
    se = np.zeros(K + 1)
    m = np.arange(1, L + 1)
    for k in range(1, K + 1):
        terms = rho[m + k] + rho[np.abs(m - k)] - 2.0 * rho[k] * rho[m]
        se[k] = math.sqrt(np.sum(terms**2) / T)
    return rho[: K + 1].copy(), se


def newey_west_lags(n: int) -> int:
    return int(math.ceil(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def _long_run_cov(u: np.ndarray, lags: int) -> np.ndarray:
    """Bartlett-weighted long-run covariance of the rows of ``u``."""
    n = u.shape[0]
    S = u.T @ u
    for lag in range(1, lags + 1):
        g = u[lag:].T @ u[:-lag]
        S += (1.0 - lag / (lags + 1.0)) * (g + g.T)
    return S / n


def _ols(y: np.ndarray, D: np.ndarray, lags: int) -> RegressionEstimate:
    n, p = D.shape
    if n <= p:
        raise InsufficientData("fewer observations than regressors")
    G = D.T @ D
    try:
        c = np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        raise DegenerateDesign("design matrix is singular") from None
    if np.linalg.cond(c) ** 2 > 1e12:
        raise DegenerateDesign("design matrix is numerically singular")
    coeffs = np.linalg.solve(G, D.T @ y)
    e = y - D @ coeffs
    s2 = float(e @ e) / (n - p)
    if not s2 > 0:
        raise DegenerateDesign("zero residual variance")
    Ginv = np.linalg.inv(G / n)
    if lags == 0:
        cov = s2 * Ginv / n
    else:
        S = _long_run_cov(D * e[:, None], lags)
        cov = Ginv @ S @ Ginv / n
    u = (e * e - s2)[:, None]
    s2_var = float(_long_run_cov(u, lags)[0, 0]) / n
    return RegressionEstimate(
        coeffs=coeffs,
        stderr=np.sqrt(np.diag(cov)),
        residual_variance=s2,
        residual_variance_stderr=math.sqrt(s2_var),
        sample_size=n,
        extra={"hac_lags": lags},
    )


def estimate_two_sided(path: SamplePath, J: int, lags: int | None = None) -> RegressionEstimate:
    """OLS of ``X_k`` on ``X_{k-j} + X_{k+j}``, ``j = 1..J``.

    Coefficients estimate ``b_1..b_J`` and the residual variance estimates
    ``v``.  Interpolation residuals are serially correlated (their
    covariance is ``v`` times the Laurent matrix of ``b``), so standard
    errors are Bartlett/Newey-West by default.
    """
    x = path.values
    T = len(x)
    if J < 1:
        raise ValueError("J must be positive")
    if T <= 50 * J:
        raise InsufficientData(f"need T > 50J = {50 * J}, got T={T}")
    k = np.arange(J, T - J)
    D = np.column_stack([x[k - j] + x[k + j] for j in range(1, J + 1)])
    if lags is None:
        lags = newey_west_lags(len(k))
    return _ols(x[k], D, lags)


def estimate_one_sided(path: SamplePath, M: int, lags: int | None = None) -> RegressionEstimate:
    """OLS of ``X_k`` on ``X_{k-1}..X_{k-M}``; estimates ``beta`` and ``w``."""
    x = path.values
    T = len(x)
    if M < 1:
        raise ValueError("M must be positive")
    if T <= 50 * M:
        raise InsufficientData(f"need T > 50M = {50 * M}, got T={T}")
    k = np.arange(M, T)
    D = np.column_stack([x[k - j] for j in range(1, M + 1)])
    if lags is None:
        lags = 0
    return _ols(x[k], D, lags)
