"""One-sided (autoregressive) representation of the field.

A positive band symbol factors as ``b = |C(e^{i theta})|^2`` with ``C`` a real
polynomial free of zeros in the closed unit disk.  Writing
``C(z) = c_0 (1 - sum_j beta_j z^j)`` gives the one-sided regression
coefficients ``beta`` and ``v / w = c_0^2``.  Three independent routes are
provided: polynomial rooting (Fejer-Riesz), the cepstral exponential
(Szego), and Levinson-Durbin on the correlations (Yule-Walker).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .correlation import CorrelationSequence, correlations_from_symbol
from .errors import (
    InsufficientCorrelations,
    NotMinimumPhase,
    NotPositiveDefinite,
    SymbolNearSingular,
    TruncationWarning,
)
from .symbol import (
    SymbolCoefficients,
    build_symbol,
    evaluate_grid,
    min_grid_size,
    next_pow2,
    require_positive,
)

UNIT_CIRCLE_TOL = 1e-8
LEVINSON_BREAKDOWN = 1.0 - 1e-12
CEPSTRAL_TAIL_TOL = 1e-10
MAX_ROOTING_DEGREE = 64


@dataclass(frozen=True)
class SpectralFactor:
    """Coefficients ``c_0..c_M`` of the outer factor, ``c_0 > 0``, ``sum c_j^2 = 1``."""

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("c must be a non-empty 1-d sequence")
        if not c[0] > 0:
            raise ValueError(f"c_0 must be positive, got {c[0]!r}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class OneSidedModel:
    """AR coefficients ``beta_1..beta_M`` and innovation variance ``w``."""

    betas: np.ndarray
    w: float

    def __post_init__(self):
        b = np.asarray(self.betas, dtype=float).reshape(-1).copy()
        b.setflags(write=False)
        object.__setattr__(self, "betas", b)
        if not (np.isfinite(self.w) and self.w > 0):
            raise ValueError(f"innovation variance must be positive, got {self.w!r}")
        object.__setattr__(self, "w", float(self.w))

    @property
    def order(self) -> int:
        return len(self.betas)


def ar_reciprocal_roots(betas: Sequence[float]) -> np.ndarray:
    """Zeros of the monic ``z^M - sum_j beta_j z^{M-j}``, i.e. ``1 / rho`` for each zero ``rho`` of ``beta``."""
    b = np.asarray(betas, dtype=float)
    nz = np.flatnonzero(b)
    if nz.size == 0:
        return np.zeros(0, dtype=complex)
    return np.roots(np.r_[1.0, -b[: nz[-1] + 1]])


def ar_roots(betas: Sequence[float]) -> np.ndarray:
    """Zeros of ``beta(z) = 1 - sum_j beta_j z^j`` (companion eigenvalues)."""
    mu = ar_reciprocal_roots(betas)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return 1.0 / mu


def is_minimum_phase(betas: Sequence[float], margin: float = 0.0) -> bool:
    """All zeros of ``beta(z)`` lie strictly outside the circle of radius ``1 + margin``."""
    mu = ar_reciprocal_roots(betas)
    return bool(np.all(np.abs(mu) * (1.0 + margin) < 1.0))


def symbol_from_factor(f: SpectralFactor) -> SymbolCoefficients:
    """``b_r = -sum_j c_j c_{j+r}`` (autocorrelation of ``c``)."""
    c = f.c
    acf = np.correlate(c, c, mode="full")[len(c) - 1:]
    return build_symbol(-acf[1:] / acf[0])


def fejer_riesz(sym: SymbolCoefficients) -> SpectralFactor:
    """Outer factor of a positive band symbol by polynomial rooting.

    The Laurent polynomial ``z^N b(z)`` has palindromic coefficients, so its
    ``2N`` roots come in pairs ``(rho, 1/rho)``.  Keeping the ``N`` roots
    outside the unit circle gives ``C(z) ~ prod (1 - z / rho)``.
    """
    require_positive(sym)
    N = sym.N
    if N == 0:
        return SpectralFactor(np.ones(1))
    if N > MAX_ROOTING_DEGREE:
        raise ValueError(
            f"band width {N} exceeds {MAX_ROOTING_DEGREE}; use szego_factor instead"
        )
    p = np.r_[-sym.coeffs[::-1], 1.0, -sym.coeffs]
    roots = np.roots(p)
    mod = np.abs(roots)
    if np.any(np.abs(mod - 1.0) < UNIT_CIRCLE_TOL):
        raise SymbolNearSingular("symbol has a root within 1e-8 of the unit circle")
    order = np.lexsort((np.angle(roots), mod))
    roots = roots[order]
    outer = roots[N:]
    if np.any(np.abs(outer) <= 1.0) or np.any(np.abs(roots[:N]) >= 1.0):
        raise SymbolNearSingular("root moduli do not split evenly about the unit circle")
    outer = _polish_roots(p, outer)

    # np.poly(1/rho)[j] is the z^j coefficient of prod (1 - z / rho)
    c = np.poly(1.0 / outer)
    if np.max(np.abs(c.imag)) > 1e-12 * np.max(np.abs(c.real)):
        raise ArithmeticError("outer factor is not real; conjugate roots were split")
    c = c.real
    c /= np.sqrt(np.sum(c**2))
    return SpectralFactor(c)


def _polish_roots(p: np.ndarray, roots: np.ndarray, steps: int = 3) -> np.ndarray:
    """A few Newton steps on the full polynomial; the companion roots lose digits near clusters."""
    dp = np.polyder(p)
    z = roots.astype(complex)
    for _ in range(steps):
        d = np.polyval(dp, z)
        ok = np.abs(d) > 0
        step = np.zeros_like(z)
        step[ok] = np.polyval(p, z[ok]) / d[ok]
        small = np.abs(step) < 1e-6 * np.abs(z)
        z = np.where(small, z - step, z)
    return z


def szego_factor(
    sym: SymbolCoefficients,
    M: int | None = None,
    grid: int | None = None,
) -> SpectralFactor:
    """Outer factor from the cepstrum of ``log b``.

    ``a_n`` are the Fourier coefficients of ``log b`` and
    ``C(z) = exp(a_0 / 2 + sum_{n>=1} a_n z^n)``; the exponential is expanded
    with ``k c_k = sum_{j=1}^k j a_j c_{k-j}`` and cut at ``M``.

    Without ``M`` the order starts at ``max(4N, 64)`` and doubles until
    ``|a_M| < 1e-10``.  With an explicit ``M`` a slow cepstral tail raises a
    ``TruncationWarning`` instead.
    """
    require_positive(sym)
    N = sym.N
    if N == 0:
        return SpectralFactor(np.r_[1.0, np.zeros(M or 0)])

    auto = M is None
    if auto:
        M = max(4 * N, 64)
    while True:
        G = grid if grid is not None else next_pow2(max(8 * (M + 1), min_grid_size(N)))
        if M >= G // 2:
            raise ValueError(f"cepstral order {M} needs a grid larger than {G}")
        cep = np.fft.ifft(np.log(evaluate_grid(sym, G).values)).real
        tail = abs(cep[M])
        if tail < CEPSTRAL_TAIL_TOL or not auto or M >= 2**16:
            break
        M *= 2
    if tail >= CEPSTRAL_TAIL_TOL:
        warnings.warn(
            f"cepstral tail |a_{M}| = {tail:.2e} exceeds {CEPSTRAL_TAIL_TOL:g}",
            TruncationWarning,
            stacklevel=2,
        )

    a = cep[: M + 1]
    c = np.zeros(M + 1)
    c[0] = np.exp(a[0] / 2.0)
    ja = np.arange(M + 1) * a
    for k in range(1, M + 1):
        c[k] = np.dot(ja[1:k + 1], c[k - 1::-1]) / k
    c /= np.sqrt(np.sum(c**2))
    return SpectralFactor(c)


def beta_from_factor(
    f: SpectralFactor,
    corr: CorrelationSequence | None = None,
) -> tuple[OneSidedModel, float]:
    """Split ``C = c_0 beta`` into AR coefficients and ``v / w = c_0^2``.

    ``w = 1 - sum_j beta_j r_j`` is taken from ``corr``; when it is omitted
    the correlations of the symbol ``|C|^2`` are computed first.
    """
    c = f.c
    betas = -c[1:] / c[0]
    nz = np.flatnonzero(betas)
    betas = betas[: nz[-1] + 1] if nz.size else betas[:0]
    v_over_w = float(c[0] ** 2)
    if betas.size == 0:
        return OneSidedModel(betas, 1.0), v_over_w
    if corr is None:
        corr = correlations_from_symbol(symbol_from_factor(f))
    if corr.K < betas.size:
        raise InsufficientCorrelations(f"need r up to lag {betas.size}, have K={corr.K}")
    w = 1.0 - float(np.dot(betas, corr.r[1:betas.size + 1]))
    return OneSidedModel(betas, w), v_over_w


def levinson_durbin(r: np.ndarray, n: int) -> tuple[np.ndarray, float, np.ndarray]:
    """Solve ``T_n(r) x = (r_1..r_n)`` by the Levinson-Durbin recursion.

    Returns the solution, the final prediction-error variance (relative to
    ``r_0``) and the reflection coefficients.
    """
    r = np.asarray(r, dtype=float)
    if len(r) < n + 1:
        raise InsufficientCorrelations(f"order {n} needs r up to lag {n}, have {len(r) - 1}")
    a = np.zeros(n)
    refl = np.zeros(n)
    err = r[0]
    for m in range(n):
        acc = r[m + 1] - np.dot(a[:m], r[m:0:-1])
        k = acc / err
        if abs(k) >= LEVINSON_BREAKDOWN:
            raise NotPositiveDefinite(
                f"reflection coefficient {k:.15f} at order {m + 1}: section not positive definite"
            )
        refl[m] = k
        a[:m] = a[:m] - k * a[m - 1::-1][:m]
        a[m] = k
        err *= 1.0 - k * k
    return a, err / r[0], refl


def yule_walker(corr: CorrelationSequence, n: int) -> tuple[np.ndarray, float]:
    """Order-``n`` one-sided coefficients and prediction-error variance."""
    if n > corr.K:
        raise InsufficientCorrelations(f"order {n} needs r up to lag {n}, have K={corr.K}")
    if n == 0:
        return np.zeros(0), 1.0
    beta, w, _ = levinson_durbin(corr.r, n)
    return beta, w


def band_beta_to_b(betas: Sequence[float]) -> SymbolCoefficients:
    """Two-sided coefficients of the band-``N`` field with AR coefficients ``betas``.

    ``b_r = (beta_r - sum_{j=1}^{N-r} beta_j beta_{j+r}) / (1 + sum beta_j^2)``,
    i.e. minus the normalised lag-``r`` coefficient of ``beta(z) beta(1/z)``.
    """
    b = np.asarray(betas, dtype=float).reshape(-1)
    if not np.all(np.isfinite(b)):
        raise ValueError("non-finite beta coefficient")
    nz = np.flatnonzero(b)
    b = b[: nz[-1] + 1] if nz.size else b[:0]
    if b.size == 0:
        return build_symbol([])
    if not is_minimum_phase(b):
        raise NotMinimumPhase("beta(z) has a zero in the closed unit disk")
    gamma = np.r_[1.0, -b]
    acf = np.correlate(gamma, gamma, mode="full")[b.size:]
    return build_symbol(-acf[1:] / acf[0])


def verify_bbeta_identity(
    sym: SymbolCoefficients,
    model: OneSidedModel,
    v: float,
    w: float,
    grid: int = 1024,
) -> float:
    """Max over the grid of ``|b(theta) - (v/w) |beta(e^{i theta})|^2|``."""
    L = max(grid, next_pow2(min_grid_size(max(sym.N, model.order))))
    bvals = evaluate_grid(sym, L).values
    gamma = np.zeros(L)
    gamma[0] = 1.0
    gamma[1:model.order + 1] = -model.betas
    beta_vals = np.fft.fft(gamma)
    return float(np.max(np.abs(bvals - (v / w) * np.abs(beta_vals) ** 2)))
