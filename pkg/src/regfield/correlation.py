"""Correlation sequence and conditional variance induced by a positive symbol.

With ``r(theta) = 1 + 2 sum_k r_k cos(k theta)`` the covariance symbol, the
relation ``L(b) R = v I`` reads ``b(theta) r(theta) = v`` on the circle, so
``r = v / b``.  Normalising ``r_0 = 1`` fixes ``v = 1 / g_0`` where ``g_0`` is
the mean of ``1 / b``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .errors import InsufficientCorrelations
from .symbol import SymbolCoefficients, invert_symbol

DEFAULT_K = 128
R_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class CorrelationSequence:
    """Correlations ``r_0..r_K`` (``r_0 = 1``) and two-sided variance ``v``."""

    r: np.ndarray
    v: float

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float).copy()
        if r.ndim != 1 or r.size == 0:
            raise ValueError("r must be a non-empty 1-d sequence")
        if r[0] != 1.0:
            raise ValueError(f"r_0 must equal 1, got {r[0]!r}")
        if not self.v > 0:
            raise ValueError(f"v must be positive, got {self.v!r}")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "v", float(self.v))

    @property
    def K(self) -> int:
        return len(self.r) - 1

    def spectral_values(self, theta) -> np.ndarray:
        """Truncated covariance symbol ``1 + 2 sum_{k<=K} r_k cos(k theta)``."""
        theta = np.asarray(theta, dtype=float)
        k = np.arange(1, self.K + 1)
        return 1.0 + 2.0 * np.cos(np.multiply.outer(theta, k)) @ self.r[1:]


def correlations_from_symbol(sym: SymbolCoefficients, K: int | None = None) -> CorrelationSequence:
    """Stationary correlations of the field with regression symbol ``sym``.

    When ``K`` is omitted it is at least 128 and grows until ``|r_K|`` drops
    below 1e-12.  Raises ``SymbolNotInvertible`` for non-positive symbols.
    """
    if K is None:
        g = invert_symbol(sym, tol=R_TAIL_TOL)
        if len(g) <= DEFAULT_K:
            g = invert_symbol(sym, K=DEFAULT_K)
    else:
        g = invert_symbol(sym, K=K)
    v = 1.0 / g[0]
    r = v * g
    r[0] = 1.0
    return CorrelationSequence(r, v)


def toeplitz_section(corr: CorrelationSequence, n: int) -> np.ndarray:
    """``n x n`` covariance block with entries ``r_|i-j|``."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > len(corr.r):
        raise InsufficientCorrelations(f"section of size {n} needs r up to lag {n - 1}, have K={corr.K}")
    return toeplitz(corr.r[:n])


def check_v_identity(sym: SymbolCoefficients, corr: CorrelationSequence) -> float:
    """``|v - (1 - 2 sum_j b_j r_j)|``."""
    if corr.K < sym.N:
        raise InsufficientCorrelations(f"need r up to lag {sym.N}, have K={corr.K}")
    return abs(corr.v - (1.0 - 2.0 * float(np.dot(sym.coeffs, corr.r[1:sym.N + 1]))))


def symbol_identity_residual(sym: SymbolCoefficients, corr: CorrelationSequence, M: int = 1024) -> float:
    """Max over an ``M`` grid of ``|b(theta) r(theta) - v|``."""
    theta = 2.0 * np.pi * np.arange(M) / M
    return float(np.max(np.abs(sym(theta) * corr.spectral_values(theta) - corr.v)))


def min_section_eigenvalue(corr: CorrelationSequence, n_check: int = 64) -> float:
    """Smallest eigenvalue over the sections ``T_1..T_n``; the largest one bounds the rest."""
    n = min(n_check, len(corr.r))
    return float(np.linalg.eigvalsh(toeplitz_section(corr, n))[0])
