"""Laurent symbol of the two-sided regression coefficients.

The coefficients ``b_1..b_N`` define the real even trigonometric polynomial

    b(theta) = 1 - 2 * sum_j b_j cos(j theta),

which is the symbol of the Laurent matrix with ones on the diagonal and
``-b_|i-j|`` off it.  The field exists (and is stationary) when ``b`` is
strictly positive on the circle; its covariance is then the Laurent matrix
of ``v / b``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.linalg import toeplitz
from scipy.optimize import minimize_scalar

from .errors import (
    GridTooCoarse,
    InvalidCoefficient,
    SymbolNearSingular,
    SymbolNotInvertible,
    TruncationWarning,
)

POSITIVITY_TOL = 1e-9
TRUNCATION_TOL = 1e-10
DEFAULT_CHECK_GRID = 4096
MAX_GRID = 2**24
# FFT round-off floor used to decide that a reciprocal grid is alias-free.
_ALIAS_FLOOR = 1e-14


@dataclass(frozen=True)
class SymbolCoefficients:
    """Canonical band coefficients ``b_1..b_N`` (trailing zeros removed)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float).copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self) -> int:
        return len(self.coeffs)

    @property
    def wiener_norm(self) -> float:
        return 1.0 + 2.0 * float(np.abs(self.coeffs).sum())

    def laurent_section(self, n: int) -> np.ndarray:
        """Central ``n x n`` block of the Laurent matrix ``L(b)``."""
        col = np.zeros(n)
        col[0] = 1.0
        m = min(n - 1, self.N)
        col[1:m + 1] = -self.coeffs[:m]
        return toeplitz(col)

    def __call__(self, theta):
        return symbol_values(self, theta)

    def tolist(self) -> list[float]:
        return [float(x) for x in self.coeffs]


@dataclass(frozen=True)
class SpectralGrid:
    size: int
    values: np.ndarray

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.size) / self.size


class Verdict(str, Enum):
    POSITIVE = "positive"
    NEAR_SINGULAR = "near_singular"
    NOT_POSITIVE = "not_positive"


@dataclass(frozen=True)
class PositivityReport:
    min_value: float
    argmin_angle: float
    is_positive: bool
    wiener_sum: float
    sufficient_condition_met: bool
    verdict: Verdict

    def to_dict(self) -> dict:
        return {
            "min_value": self.min_value,
            "argmin_angle": self.argmin_angle,
            "is_positive": self.is_positive,
            "wiener_sum": self.wiener_sum,
            "sufficient_condition_met": self.sufficient_condition_met,
            "verdict": self.verdict.value,
        }


def build_symbol(coeffs: Sequence[float] = ()) -> SymbolCoefficients:
    """Validate ``coeffs`` and strip trailing zeros.

    An empty sequence is the white-noise symbol ``b == 1``.
    """
    arr = np.atleast_1d(np.asarray(coeffs, dtype=float)) if len(coeffs) else np.zeros(0)
    if arr.ndim != 1:
        raise InvalidCoefficient("coefficients must be a flat sequence")
    if not np.all(np.isfinite(arr)):
        raise InvalidCoefficient(f"non-finite coefficient in {arr.tolist()}")
    nz = np.flatnonzero(arr)
    arr = arr[: nz[-1] + 1] if nz.size else arr[:0]
    return SymbolCoefficients(arr)


def _is_pow2(m: int) -> bool:
    return m > 0 and (m & (m - 1)) == 0


def min_grid_size(N: int) -> int:
    return 4 * N + 4


def next_pow2(n: int) -> int:
    return 1 << max(0, math.ceil(math.log2(max(n, 1))))


def symbol_values(sym: SymbolCoefficients, theta) -> np.ndarray:
    """Direct evaluation of ``b(theta)`` at arbitrary angles."""
    theta = np.asarray(theta, dtype=float)
    out = np.ones_like(theta)
    for j, bj in enumerate(sym.coeffs, start=1):
        out = out - 2.0 * bj * np.cos(j * theta)
    return out


def evaluate_grid(sym: SymbolCoefficients, M: int) -> SpectralGrid:
    """Sample ``b`` at ``theta_m = 2 pi m / M`` with one FFT.

    ``M`` must be a power of two and at least ``4N + 4``.
    """
    M = int(M)
    if not _is_pow2(M):
        raise ValueError(f"grid size must be a power of two, got {M}")
    if M < min_grid_size(sym.N):
        raise GridTooCoarse(f"grid size {M} < 4N+4 = {min_grid_size(sym.N)}")
    if sym.N == 0:
        return SpectralGrid(M, np.ones(M))
    h = np.zeros(M)
    h[0] = 1.0
    h[1:sym.N + 1] = -sym.coeffs
    h[M - sym.N:] = -sym.coeffs[::-1]
    spec = np.fft.fft(h)
    if np.max(np.abs(spec.imag)) > 1e-12:
        raise ArithmeticError("symbol grid has a non-negligible imaginary part")
    return SpectralGrid(M, spec.real.copy())


def check_positivity(sym: SymbolCoefficients, M: int | None = None) -> PositivityReport:
    """Decide strict positivity of ``b`` on the circle.

    The grid minimum is polished inside its bracketing cell, then compared
    against ``POSITIVITY_TOL``.  The Wiener-sum test ``sum |b_j| < 1/2`` is
    evaluated exactly and independently.
    """
    wiener_sum = float(np.abs(sym.coeffs).sum())
    sufficient = wiener_sum < 0.5
    if sym.N == 0:
        return PositivityReport(1.0, 0.0, True, 0.0, True, Verdict.POSITIVE)
    if M is None:
        M = max(DEFAULT_CHECK_GRID, next_pow2(min_grid_size(sym.N)))
    grid = evaluate_grid(sym, M)
    m = int(np.argmin(grid.values))
    h = 2.0 * np.pi / M
    theta0 = m * h
    best_theta, best_val = theta0, float(symbol_values(sym, theta0))

    res = minimize_scalar(
        lambda t: float(symbol_values(sym, t)),
        bounds=(theta0 - h, theta0 + h),
        method="bounded",
        options={"xatol": 1e-12},
    )
    if res.fun < best_val:
        best_theta, best_val = float(res.x), float(res.fun)
    # b is even, report the angle in [0, pi]
    best_theta = math.remainder(best_theta, 2.0 * np.pi)
    best_theta = abs(best_theta)

    if best_val > POSITIVITY_TOL:
        verdict = Verdict.POSITIVE
    elif best_val > 0.0:
        verdict = Verdict.NEAR_SINGULAR
    else:
        verdict = Verdict.NOT_POSITIVE
    return PositivityReport(
        min_value=best_val,
        argmin_angle=best_theta,
        is_positive=verdict is Verdict.POSITIVE,
        wiener_sum=wiener_sum,
        sufficient_condition_met=sufficient,
        verdict=verdict,
    )


def require_positive(sym: SymbolCoefficients) -> PositivityReport:
    report = check_positivity(sym)
    if report.verdict is Verdict.NEAR_SINGULAR:
        raise SymbolNearSingular(
            f"symbol minimum {report.min_value:.3e} is below {POSITIVITY_TOL:g}"
        )
    if not report.is_positive:
        raise SymbolNotInvertible(
            f"symbol attains {report.min_value:.3e} <= 0 at theta={report.argmin_angle:.6f}"
        )
    return report


def _reciprocal_coefficients(sym: SymbolCoefficients, M: int) -> tuple[np.ndarray, float]:
    """Reciprocal coefficients on an ``M`` grid and their round-off floor."""
    recip = 1.0 / evaluate_grid(sym, M).values
    g = np.fft.ifft(recip).real
    # b carries absolute error ~eps, so 1/b carries ~eps / b^2
    floor = max(_ALIAS_FLOOR, 8 * np.finfo(float).eps * np.mean(recip**2) / abs(g[0]))
    return g, floor


def _alias_level(g: np.ndarray) -> float:
    M = len(g)
    mid = np.abs(g[3 * M // 8: M // 2 + 1])
    return float(mid.max() / abs(g[0]))


def invert_symbol(
    sym: SymbolCoefficients,
    K: int | None = None,
    M: int | None = None,
    tol: float = TRUNCATION_TOL,
) -> np.ndarray:
    """Fourier coefficients ``g_0..g_K`` of ``1 / b``.

    Parameters
    ----------
    sym : SymbolCoefficients
        Must be strictly positive.
    K : int, optional
        Last lag returned.  By default ``K`` starts at 16 and doubles until
        ``|g_K| / g_0 < tol``.
    M : int, optional
        FFT grid size.  By default it is doubled until the reciprocal series
        has decayed to round-off at ``M / 2``, so aliasing is negligible.
        With an explicit ``M`` a ``TruncationWarning`` is issued when the
        aliasing level exceeds ``tol``.
    tol : float
        Tail tolerance, relative to ``g_0``.

    Returns
    -------
    g : ndarray, shape (K + 1,)
        ``g_k = g_{-k}`` since the symbol is real and even.
    """
    require_positive(sym)
    if K is not None and K < 0:
        raise ValueError("K must be non-negative")

    if sym.N == 0:
        k = 0 if K is None else K
        g = np.zeros(k + 1)
        g[0] = 1.0
        return g

    if M is not None:
        M = int(M)
        if K is not None and K > M // 2:
            raise GridTooCoarse(f"K={K} needs a grid of at least {2 * K}, got {M}")
        g, _ = _reciprocal_coefficients(sym, M)
        alias = _alias_level(g)
        if alias > tol:
            warnings.warn(
                f"reciprocal series not resolved on grid {M} (tail {alias:.2e})",
                TruncationWarning,
                stacklevel=2,
            )
        if K is None:
            K = _decay_lag(g, tol, limit=M // 2)
        return g[: K + 1].copy()

    M = next_pow2(max(min_grid_size(sym.N), 4 * ((K or 16) + 1), 256))
    while True:
        g, floor = _reciprocal_coefficients(sym, M)
        resolved = _alias_level(g) < floor
        k = K if K is not None else _decay_lag(g, max(tol, floor), limit=M // 2)
        if resolved and k is not None and k <= M // 2:
            if floor > max(tol, TRUNCATION_TOL):
                warnings.warn(
                    f"symbol is ill-conditioned: reciprocal coefficients carry "
                    f"round-off {floor:.1e} above the requested {tol:g}",
                    TruncationWarning,
                    stacklevel=2,
                )
            return g[: k + 1].copy()
        if M >= MAX_GRID:
            warnings.warn(
                f"reciprocal series not resolved on the largest grid {M}",
                TruncationWarning,
                stacklevel=2,
            )
            k = M // 2 if k is None else min(k, M // 2)
            return g[: k + 1].copy()
        M *= 2


def _decay_lag(g: np.ndarray, tol: float, limit: int) -> int | None:
    """First ``K`` in 16, 32, 64, ... with ``|g_K| / g_0 < tol``."""
    k = 16
    g0 = abs(g[0])
    while k <= limit:
        if abs(g[k]) / g0 < tol:
            return k
        k *= 2
    return None
