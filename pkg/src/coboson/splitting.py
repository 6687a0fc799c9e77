"""Beam-splitter output of |N>: mode distribution, purity and counting.

Purity of mode 1 in the projected state with M pairs in mode 1:

    P_1 = 1/C(N,M) + sum_{m=0}^{N-2} a_m e_m e_{2N-m} / e_N^2

with ``a_m = alpha_m m! (2N-m)! / N!^2``.  The integers ``A_m = a_m N!^2``
obey the triangular recursion

    A_L = Dt_L - sum_{m=L+1}^{N} A_m C(2N-2L, m-L)
    Dt_L = (2N-2L)! sum_{L1} C(L, L1) ff(M, L1)^2 ff(N-M, L-L1)^2

(ff = falling factorial); ``A_N = C(N,M) M!^2 (N-M)!^2`` reproduces the
1/C(N,M) term and ``A_{N-1} = 0``.
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .ensemble import EnsembleSpec, CountWindow, count_distribution
from .sympoly import RangeError

log = logging.getLogger(__name__)

PRECISION_ENV = "COBOSON_PRECISION"
PRECISION_MODES = ("double", "extended-fallback")
ALPHA_NEG_TOL = 1e-8
DOUBLE_REL_TOL = 1e-12


class InstabilityError(ArithmeticError):
    pass


def precision_mode() -> str:
    mode = os.environ.get(PRECISION_ENV, "extended-fallback")
    if mode not in PRECISION_MODES:
        raise ValueError(f"{PRECISION_ENV} must be one of {PRECISION_MODES}, got {mode!r}")
    return mode


@dataclass(frozen=True)
class SplitConfig:
    R: float
    M: int
    N: int

    def __post_init__(self):
        if not 0.0 <= self.R <= 1.0:
            raise ValueError("reflection probability must lie in [0, 1]")
        if not 0 <= self.M <= self.N:
            raise ValueError(f"M={self.M} outside 0..N={self.N}")

    @property
    def T(self) -> float:
        return 1.0 - self.R


def split_amplitudes(N: int, R: float) -> np.ndarray:
    """``sqrt(C(N,M) R^M T^(N-M))`` for M = 0..N."""
    if not 0.0 <= R <= 1.0:
        raise ValueError("reflection probability must lie in [0, 1]")
    M = np.arange(N + 1)
    T = 1.0 - R
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = (gammaln(N + 1) - gammaln(M + 1) - gammaln(N - M + 1)
                + np.where(M > 0, M * np.log(R) if R > 0 else -np.inf, 0.0)
                + np.where(M < N, (N - M) * np.log(T) if T > 0 else -np.inf, 0.0))
    p = np.exp(logp)
    return np.sqrt(p / math.fsum(p.tolist()))


# ---------------------------------------------------------------------------
# alpha coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlphaCoefficients:
    """``a_m`` (and ``alpha_m``) for m = 0..N as sign + log magnitude."""

    N: int
    M: int
    log_a: np.ndarray
    sign: np.ndarray
    method: str

    @property
    def log_alpha(self) -> np.ndarray:
        m = np.arange(self.N + 1)
        return self.log_a + 2 * gammaln(self.N + 1) - gammaln(m + 1) - gammaln(2 * self.N - m + 1)

    @property
    def a(self) -> np.ndarray:
        return self.sign * np.exp(self.log_a)

    @property
    def alpha(self) -> np.ndarray:
        return self.sign * np.exp(self.log_alpha)


def _ff(n: int, k: int) -> int:
    return math.perm(n, k) if 0 <= k <= n else 0


def _pascal_row(n: int, kmax: int):
    row = [1] * (kmax + 1)
    for k in range(kmax):
        row[k + 1] = row[k] * (n - k) // (k + 1)
    return row


@lru_cache(maxsize=64)
def alpha_integers(N: int, M: int) -> tuple:
    """Exact ``A_m = a_m N!^2`` for m = 0..N (Python integers)."""
    K = N - M
    ffM = [_ff(M, i) ** 2 for i in range(N + 1)]
    ffK = [_ff(K, i) ** 2 for i in range(N + 1)]
    A = [0] * (N + 1)
    fact = math.factorial
    for L in range(N, -1, -1):
        s = 0
        lo, hi = max(0, L - K), min(L, M)
        binL = _pascal_row(L, L) if hi >= lo else []
        for L1 in range(lo, hi + 1):
            s += binL[L1] * ffM[L1] * ffK[L - L1]
        v = fact(2 * N - 2 * L) * s
        if L < N:
            row = _pascal_row(2 * N - 2 * L, N - L)
            for m in range(L + 1, N + 1):
                v -= A[m] * row[m - L]
        A[L] = v
    return tuple(A)


def _alpha_exact(N: int, M: int) -> AlphaCoefficients:
    A = alpha_integers(N, M)
    lf = 2 * math.lgamma(N + 1)
    log_a = np.array([math.log(abs(x)) - lf if x else -np.inf for x in A])
    sign = np.array([(x > 0) - (x < 0) for x in A], dtype=float)
    return AlphaCoefficients(N, M, log_a, sign, "exact")


def _alpha_double(N: int, M: int):
    """Same recursion in sign-tracked log doubles; returns (coeffs, rel_error_bound)."""
    K = N - M
    lg = math.lgamma
    lf = 2 * lg(N + 1)
    log_a = np.full(N + 1, -np.inf)
    sign = np.zeros(N + 1)
    err = np.zeros(N + 1)  # absolute error bound, in units of exp(log scale) per entry
    eps = np.finfo(float).eps
    for L in range(N, -1, -1):
        lo, hi = max(0, L - K), min(L, M)
        terms, signs = [], []
        for L1 in range(lo, hi + 1):
            L2 = L - L1
            terms.append(lg(L + 1) - lg(L1 + 1) - lg(L2 + 1)
                         + 2 * (lg(M + 1) - lg(M - L1 + 1)) + 2 * (lg(K + 1) - lg(K - L2 + 1))
                         + lg(2 * N - 2 * L + 1) - lf)
            signs.append(1.0)
        prop = 0.0
        for m in range(L + 1, N + 1):
            if sign[m] == 0:
                continue
            n = 2 * N - 2 * L
            lc = lg(n + 1) - lg(m - L + 1) - lg(n - m + L + 1)
            terms.append(log_a[m] + lc)
            signs.append(-sign[m])
            prop += err[m] * math.exp(lc)
        if not terms:
            continue
        t = np.array(terms)
        sg = np.array(signs)
        top = t.max()
        w = np.exp(t - top) * sg
        val = math.fsum(w.tolist())
        mag = float(np.sum(np.abs(w)))
        absval = abs(val)
        # error of this entry relative to exp(top)
        e_here = (eps * len(terms) * mag) + prop * math.exp(-top) if np.isfinite(top) else 0.0
        if absval == 0.0:
            log_a[L], sign[L] = -np.inf, 0.0
            err[L] = e_here * math.exp(top)
            continue
        log_a[L] = top + math.log(absval)
        sign[L] = math.copysign(1.0, val)
        err[L] = e_here * math.exp(top)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(sign != 0, err / np.exp(log_a), np.where(err > 0, np.inf, 0.0))
    # A_{N-1} is exactly zero; its rounding residue is harmless and not counted
    if N >= 1:
        rel[N - 1] = 0.0
        log_a[N - 1], sign[N - 1] = -np.inf, 0.0
    return AlphaCoefficients(N, M, log_a, sign, "double"), float(np.max(rel))


def alpha_coeffs(N: int, M: int, mode: str | None = None) -> AlphaCoefficients:
    """Coefficients of the purity expansion for (N, M).

    ``mode='double'`` runs the recursion in doubles and raises
    :class:`InstabilityError` if its error bound exceeds 1e-12 relative;
    ``'extended-fallback'`` (default) switches to exact integers instead.
    """
    if N < 1 or not 0 <= M <= N:
        raise ValueError(f"need N >= 1 and 0 <= M <= N (got N={N}, M={M})")
    mode = mode or precision_mode()
    M = min(M, N - M)  # a_m(N, M) = a_m(N, N-M)
    if M == 0:
        log_a = np.full(N + 1, -np.inf)
        log_a[N] = 0.0
        sign = np.zeros(N + 1)
        sign[N] = 1.0
        return AlphaCoefficients(N, 0, log_a, sign, "closed")
    if N <= 48:
        coeffs, rel = _alpha_double(N, M)
        if rel <= DOUBLE_REL_TOL:
            _check_positive(coeffs)
            return coeffs
        if mode == "double":
            raise InstabilityError(f"alpha recursion lost precision (bound {rel:.3g}) at N={N}, M={M}")
        log.info("alpha recursion error bound %.3g at N=%d; using exact integers", rel, N)
    elif mode == "double":
        raise InstabilityError(f"alpha recursion in double precision is unreliable at N={N}")
    coeffs = _alpha_exact(N, M)
    _check_positive(coeffs)
    return coeffs


def _check_positive(c: AlphaCoefficients):
    vals = c.alpha[: c.N - 1] if c.N >= 2 else np.zeros(0)
    if vals.size == 0:
        return
    big = np.max(np.abs(vals))
    neg = vals[vals < 0]
    if neg.size and np.max(-neg) > ALPHA_NEG_TOL * big:
        raise InstabilityError(f"negative alpha coefficient {neg.min():.3g} (max {big:.3g})")
    if neg.size:
        log.warning("alpha has %d eps-scale negative entries", neg.size)


# ---------------------------------------------------------------------------
# purity
# ---------------------------------------------------------------------------

def purity_terms(log_e: np.ndarray, N: int, coeffs: AlphaCoefficients) -> np.ndarray:
    """log of each ``a_m e_m e_{2N-m} / e_N^2`` for m = 0..N-2."""
    m = np.arange(N - 1)
    with np.errstate(invalid="ignore"):
        t = coeffs.log_a[m] + log_e[m] + log_e[2 * N - m] - 2 * log_e[N]
    t[coeffs.sign[m] == 0] = -np.inf
    return t


def log_purity(ens: EnsembleSpec, M: int, coeffs: AlphaCoefficients | None = None) -> float:
    """Natural log of the mode-1 purity (safe where the purity underflows)."""
    N = ens.N
    if not 0 <= M <= N:
        raise ValueError(f"M={M} outside 0..N={N}")
    if M in (0, N):
        return 0.0
    if ens.table.K < 2 * N:
        raise RangeError(f"purity needs the table to order 2N={2 * N} (have {ens.table.K})")
    coeffs = coeffs or alpha_coeffs(N, M)
    t = purity_terms(ens.log_e, N, coeffs)
    if np.any(coeffs.sign[: N - 1] < 0):
        raise InstabilityError("negative alpha reached the purity sum")
    base = -(gammaln(N + 1) - gammaln(M + 1) - gammaln(N - M + 1))
    allt = np.sort(np.concatenate([[base], t[np.isfinite(t)]]))
    top = allt[-1]
    # sum from smallest to largest
    acc = 0.0
    for x in allt:
        acc += math.exp(x - top)
    return float(top + math.log(acc))


def purity(ens: EnsembleSpec, M: int, coeffs: AlphaCoefficients | None = None) -> float:
    """Purity of the mode-1 reduced state for the (M, N-M) projection."""
    return math.exp(log_purity(ens, M, coeffs))


def purity_lower_bound(N: int, M: int) -> float:
    return 1.0 / math.comb(N, M)


# ---------------------------------------------------------------------------
# counting after the splitter
# ---------------------------------------------------------------------------

def joint_count_distribution(ens: EnsembleSpec, M: int, window: CountWindow | int) -> np.ndarray:
    """``P_12[n1, n2]`` for n1 = 0..M, n2 = 0..N-M.

    The window count n = n1+n2 follows ``P(n)`` of the unsplit state and is
    split hypergeometrically: ``C(M,n1) C(N-M,n2) / C(N,n)``.
    """
    N = ens.N
    if not 0 <= M <= N:
        raise ValueError(f"M={M} outside 0..N={N}")
    P = count_distribution(ens, window)
    K = N - M
    n1 = np.arange(M + 1)[:, None]
    n2 = np.arange(K + 1)[None, :]
    n = n1 + n2
    lw = (gammaln(M + 1) - gammaln(n1 + 1) - gammaln(M - n1 + 1)
          + gammaln(K + 1) - gammaln(n2 + 1) - gammaln(K - n2 + 1)
          - (gammaln(N + 1) - gammaln(n + 1) - gammaln(N - n + 1)))
    return np.exp(lw) * P[n]


def marginal_count(ens: EnsembleSpec, M: int, window: CountWindow | int) -> np.ndarray:
    """``P_1(n1) = sum_{n2} P_12(n1, n2)``."""
    J = joint_count_distribution(ens, M, window)
    return np.array([math.fsum(row) for row in J.tolist()])


def binomial_pmf(t: int, p: float = 0.5) -> np.ndarray:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    k = np.arange(t + 1)
    if p in (0.0, 1.0):
        return (k == (0 if p == 0.0 else t)).astype(float)
    lp = gammaln(t + 1) - gammaln(k + 1) - gammaln(t - k + 1)
    return np.exp(lp + k * math.log(p) + (t - k) * math.log1p(-p))


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    p, q = np.asarray(p, float), np.asarray(q, float)
    n = max(p.size, q.size)
    a = np.zeros(n)
    b = np.zeros(n)
    a[: p.size] = p
    b[: q.size] = q
    return 0.5 * float(np.sum(np.abs(a - b)))
