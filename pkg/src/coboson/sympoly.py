"""Elementary symmetric polynomials of Schmidt spectra in log domain.

Two independent routes are provided:

* ``chi_table``: the cancellation-free product expansion
  ``e_k <- e_k + lam_j * e_{k-1}`` (all terms nonnegative).
* ``chi_newton``: Newton's identities driven by power sums, with a
  first-order error bound that triggers a fallback to the product route.

Degenerate (shell) spectra with many states use a hybrid of the two: the
largest coefficients go through the product expansion, the small-coefficient
tail through Newton's identities (well conditioned there, and the tail power
sums cost one pass over shells rather than states).

Tables store ``log e_k`` (natural log, ``-inf`` for exact zeros).  The
normalisation factor of an N-pair state is ``chi_N = N! * e_N``; use
:meth:`ChiTable.log_chi` for it.
"""
from __future__ import annotations

import hashlib
import math
import os
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.special import gammaln

EPS = np.finfo(float).eps
NORM_TOL = 1e-12
IDENTITY_TOL = 1e-8
CROSS_TOL = 1e-8
# tightest representable log: below this exp() is zero in double
LOG_FLOOR = -1e300


class RangeError(ValueError):
    """Requested order leaves the representable log range."""


class CancellationWarning(RuntimeWarning):
    pass


def fingerprint(lambdas, degeneracy=None) -> str:
    """Content hash of a spectrum; shell form hashes (lambda, g) pairs."""
    arr = np.ascontiguousarray(np.asarray(lambdas, dtype="<f8"))
    h = hashlib.sha256(arr.tobytes())
    if degeneracy is not None:
        g = np.asarray(degeneracy, dtype="<i8")
        if np.any(g != 1):
            h.update(b"g")
            h.update(np.ascontiguousarray(g).tobytes())
    return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

@numba.njit(cache=True)
def _logadd(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@numba.njit(cache=True)
def _dp_log_step(L, ll, top):
    for k in range(top, 0, -1):
        b = L[k - 1] + ll
        a = L[k]
        if a == -np.inf:
            L[k] = b
        elif b != -np.inf:
            if a > b:
                L[k] = a + math.log1p(math.exp(b - a))
            else:
                L[k] = b + math.log1p(math.exp(a - b))


@numba.njit(cache=True)
def _offsets(o, c, K):
    for k in range(1, K + 1):
        d = o[k - 1] - o[k]
        if d > 600.0:
            return False
        c[k] = math.exp(d)
    return True


@numba.njit(cache=True, nogil=True)
def _dp_kernel(loglam, K, block):
    """Product expansion over ``loglam`` truncated at order K.

    Runs in log domain until every order up to K is populated, then switches
    to linear accumulation ``v_k`` against frozen per-order log offsets
    ``o_k`` (``e_k = v_k exp(o_k)``).  Every update adds a nonnegative term.
    Offsets are refreshed only when ``v`` grows large; a block that would
    overflow is replayed in log domain.
    """
    n = loglam.shape[0]
    o = np.full(K + 1, -np.inf)
    o[0] = 0.0
    i = 0
    # warm-up: orders above the processed count are still exactly zero
    while i < n and i < K:
        _dp_log_step(o, loglam[i], min(i + 1, K))
        i += 1
    if i >= n or K == 0:
        return o
    c = np.empty(K + 1)
    v = np.ones(K + 1)
    v0 = np.ones(K + 1)
    linear = _offsets(o, c, K)
    while i < n:
        stop = min(n, i + block)
        if linear:
            v0[:] = v
            for t in range(i, stop):
                lam = math.exp(loglam[t])
                for k in range(K, 0, -1):
                    v[k] += lam * c[k] * v[k - 1]
            vmax = 0.0
            for k in range(K + 1):
                if v[k] > vmax:
                    vmax = v[k]
            if vmax < 1e250:
                if vmax > 1e100:
                    for k in range(1, K + 1):
                        o[k] += math.log(v[k])
                        v[k] = 1.0
                    linear = _offsets(o, c, K)
                i = stop
                continue
            v[:] = v0
        # log-domain replay of this block
        for k in range(1, K + 1):
            o[k] += math.log(v[k])
            v[k] = 1.0
        for t in range(i, stop):
            _dp_log_step(o, loglam[t], K)
        linear = _offsets(o, c, K)
        i = stop
    for k in range(1, K + 1):
        o[k] += math.log(v[k])
    return o


@numba.njit(cache=True)
def _log_convolve(A, B, K):
    out = np.full(K + 1, -np.inf)
    na = A.shape[0]
    nb = B.shape[0]
    for k in range(K + 1):
        m = -np.inf
        lo = max(0, k - nb + 1)
        hi = min(k, na - 1)
        for i in range(lo, hi + 1):
            x = A[i] + B[k - i]
            if x > m:
                m = x
        if m == -np.inf:
            continue
        s = 0.0
        for i in range(lo, hi + 1):
            x = A[i] + B[k - i]
            if x != -np.inf:
                s += math.exp(x - m)
        out[k] = m + math.log(s)
    return out


@numba.njit(cache=True)
def _newton_kernel(logM, K, S):
    """Newton identities k e_k = sum_m (-1)^{m-1} M(m) e_{k-m} (log/sign form).

    Returns (log e_k, condition ratio per k) where the ratio is the sum of
    term magnitudes over the magnitude of the signed sum.  Orders above S are
    exact zeros by construction.
    """
    L = np.full(K + 1, -np.inf)
    err = np.zeros(K + 1)
    L[0] = 0.0
    top = min(K, S)
    for k in range(1, top + 1):
        m_hi = k
        big = -np.inf
        for m in range(1, m_hi + 1):
            x = logM[m] + L[k - m]
            if x > big:
                big = x
        if big == -np.inf:
            return L, err
        s = 0.0
        a = 0.0
        for m in range(1, m_hi + 1):
            x = logM[m] + L[k - m]
            if x == -np.inf:
                continue
            t = math.exp(x - big)
            if m % 2 == 1:
                s += t
            else:
                s -= t
            a += t
        if s <= 0.0:
            # total cancellation: flag as unusable
            L[k] = np.nan
            err[k] = np.inf
            for q in range(k + 1, K + 1):
                L[q] = np.nan
                err[q] = np.inf
            return L, err
        L[k] = big + math.log(s) - math.log(k)
        err[k] = a / s
    return L, err


@numba.njit(cache=True)
def _shell_power_kernel(lam, g, m_max):
    """``log sum_s g_s lam_s^m`` for m = 1..m_max; lam sorted descending."""
    out = np.full(m_max + 1, -np.inf)
    n = lam.shape[0]
    if n == 0:
        return out
    top = lam[0]
    r = np.empty(n)
    pw = np.empty(n)
    for i in range(n):
        r[i] = lam[i] / top
        pw[i] = g[i]
    live = n
    for m in range(1, m_max + 1):
        s = 0.0
        new_live = 0
        for i in range(live):
            pw[i] *= r[i]
            s += pw[i]
            if pw[i] > 1e-300:
                new_live = i + 1
        live = new_live
        out[m] = math.log(s) + m * math.log(top)
    return out


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChiTable:
    """Log-domain table of ``e_k(Lambda)`` for ``k = 0..K``."""

    log_e: np.ndarray
    fingerprint: str
    method: str
    size: int
    notes: tuple = ()
    _lambdas: np.ndarray | None = field(default=None, repr=False, compare=False)
    _blocks: tuple | None = field(default=None, repr=False, compare=False)
    _shells: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.log_e.setflags(write=False)

    @property
    def rank(self) -> int:
        """Number of positive coefficients behind the table."""
        if self._shells is not None:
            lam, g = self._shells
            return int(g[lam > 0].sum())
        if self._lambdas is not None:
            return int(np.count_nonzero(self._lambdas > 0))
        return self.size

    @property
    def K(self) -> int:
        return self.log_e.shape[0] - 1

    def e(self, k: int) -> float:
        if k < 0 or k > self.K:
            raise IndexError(f"order {k} outside table (K={self.K})")
        return float(np.exp(self.log_e[k]))

    def log_chi(self, k: int) -> float:
        """log of the coboson convention chi_k = k! e_k."""
        return float(self.log_e[k] + gammaln(k + 1))

    def require(self, k: int):
        if k > self.K:
            raise RangeError(f"table order {self.K} too short; need k={k}")

    def to_rows(self):
        return [(k, float(v), self.method) for k, v in enumerate(self.log_e)]


@dataclass(frozen=True)
class PowerSums:
    """``log M(m)`` with ``M(m) = sum_j lam_j^m`` for m = 0..m_max (M(0) = S)."""

    log_M: np.ndarray
    size: int
    fingerprint: str
    _lambdas: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def m_max(self) -> int:
        return self.log_M.shape[0] - 1

    def M(self, m: int) -> float:
        return float(np.exp(self.log_M[m]))


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def _as_lambdas(spectrum) -> np.ndarray:
    lam = getattr(spectrum, "lambdas", spectrum)
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1:
        raise ValueError("spectrum must be one-dimensional")
    if np.any(lam < 0) or not np.all(np.isfinite(lam)):
        raise ValueError("spectrum entries must be finite and nonnegative")
    return lam


THREADS_ENV = "COBOSON_THREADS"


def num_threads() -> int:
    """Worker threads for block-parallel tables (env COBOSON_THREADS, else CPU count)."""
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)


def _n_blocks(S: int) -> int:
    return int(min(32, max(num_threads(), S // 65536, 1)))


def _dp_blocks(loglam: np.ndarray, K: int):
    nb = _n_blocks(loglam.shape[0])
    bounds = np.linspace(0, loglam.shape[0], nb + 1).astype(np.int64)
    tables = [None] * nb
    threads = num_threads()
    if nb > 1 and threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        # the kernel runs without the GIL, so threads overlap
        with ThreadPoolExecutor(threads) as ex:
            futs = [ex.submit(_dp_kernel, loglam[bounds[b]:bounds[b + 1]], K, 512)
                    for b in range(nb)]
            tables = [f.result() for f in futs]
    else:
        for b in range(nb):
            tables[b] = _dp_kernel(loglam[bounds[b]:bounds[b + 1]], K, 512)
    return bounds, tables


def _merge(tables, K):
    out = tables[0]
    for t in tables[1:]:
        out = _log_convolve(out, t, K)
    return out


def _check_range(L, K):
    bad = np.flatnonzero(np.isfinite(L) & (L < -7e307))
    if bad.size:
        raise RangeError(f"log e_k underflows at k={int(bad[0])}")


def _shell_arrays(spectrum):
    """(lam, g) of a shell spectrum with real degeneracy, else None."""
    lam = getattr(spectrum, "shell_lambdas", None)
    if lam is None:
        return None
    g = spectrum.degeneracy
    return (lam, g) if np.any(g != 1) else None


def chi_table(spectrum, K: int) -> ChiTable:
    """All ``e_k`` up to order K by the nonnegative product expansion.

    Degenerate shell spectra are routed through :func:`chi_shells`.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    sh = _shell_arrays(spectrum)
    if sh is not None:
        return chi_shells(sh[0], sh[1], K)
    lam = _as_lambdas(spectrum)
    lam_pos = lam[lam > 0]
    with np.errstate(divide="ignore"):
        loglam = np.log(lam_pos)
    if lam_pos.size == 0:
        L = np.full(K + 1, -np.inf)
        L[0] = 0.0
        return ChiTable(L, fingerprint(lam), "dp", lam.size, _lambdas=lam)
    bounds, tables = _dp_blocks(loglam, K)
    L = _merge(tables, K)
    _check_range(L, K)
    return ChiTable(L, fingerprint(lam), "dp", lam.size,
                    _lambdas=lam, _blocks=(bounds, tables, loglam))


HEAD_STATES = 20000
TAIL_COND = 4.0


def _expand(lam, g):
    return np.repeat(np.asarray(lam, float), np.asarray(g, np.int64))


def chi_shells(lam, g, K: int, head: int | None = None) -> ChiTable:
    """Table of a degenerate spectrum given per shell (coefficient, multiplicity).

    The largest coefficients covering at least ``head`` states are expanded
    exactly; the rest enters through Newton's identities on shell power
    sums.  If the tail recursion's condition ratio exceeds ``TAIL_COND`` the
    head is doubled (ultimately the whole spectrum is expanded).
    """
    lam = np.asarray(lam, float)
    g = np.asarray(g, np.int64)
    if lam.shape != g.shape or np.any(g < 0):
        raise ValueError("shell coefficients and multiplicities must match")
    if np.any(lam < 0) or not np.all(np.isfinite(lam)):
        raise ValueError("spectrum entries must be finite and nonnegative")
    fp = fingerprint(lam, g)
    size = int(g.sum())
    keep = (lam > 0) & (g > 0)
    order = np.argsort(-lam[keep], kind="stable")
    ls, gs = lam[keep][order], g[keep][order]
    cum = np.cumsum(gs)
    H = max(HEAD_STATES, 8 * K) if head is None else head
    notes = ()
    while True:
        cut = int(np.searchsorted(cum, H)) + 1 if cum.size else 0
        if cut >= ls.size:
            t = chi_table(_expand(ls, gs), K)
            return ChiTable(t.log_e.copy(), fp, "dp", size, notes, _shells=(lam, g))
        A = chi_table(_expand(ls[:cut], gs[:cut]), K).log_e
        logM = _shell_power_kernel(ls[cut:], gs[cut:].astype(float), K)
        logM[0] = math.log(float(cum[-1] - cum[cut - 1]))
        B, err = _newton_kernel(logM, K, int(cum[-1] - cum[cut - 1]))
        worst = float(np.max(err)) if err.size else 0.0
        if np.isfinite(worst) and worst <= TAIL_COND:
            notes = (f"head {int(cum[cut - 1])} states, tail condition ratio {worst:.3g}",)
            break
        H *= 2
    L = _log_convolve(A, B, K)
    _check_range(L, K)
    return ChiTable(L, fp, "dp+newton-tail", size, notes, _shells=(lam, g))


def power_sums(spectrum, m_max: int) -> PowerSums:
    """Power sums of the spectrum, kept as logarithms.

    ``M(1)`` is accumulated exactly (``math.fsum``); higher orders only see
    coefficients whose contribution is above double resolution.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    sh = _shell_arrays(spectrum)
    if sh is not None:
        lam_s, g = sh
        keep = lam_s > 0
        order = np.argsort(-lam_s[keep], kind="stable")
        out = _shell_power_kernel(lam_s[keep][order], g[keep][order].astype(float), m_max)
        size = int(g.sum())
        out[0] = math.log(size)
        out[1] = math.log(math.fsum((lam_s * g).tolist()))
        return PowerSums(out, size, fingerprint(lam_s, g), _lambdas=spectrum)
    lam = _as_lambdas(spectrum)
    pos = np.sort(lam[lam > 0])[::-1]
    out = np.full(m_max + 1, -np.inf)
    out[0] = math.log(lam.size) if lam.size else -np.inf
    if pos.size == 0:
        return PowerSums(out, lam.size, fingerprint(lam), _lambdas=lam)
    logs = np.log(pos)
    out[1] = math.log(math.fsum(pos.tolist()))
    top = logs[0]
    neg = -logs  # ascending
    for m in range(2, m_max + 1):
        # drop terms below 2^-60 of the leading one
        cut = np.searchsorted(neg, -(top - 42.0 / m), side="right")
        x = m * logs[:max(cut, 1)]
        out[m] = m * top + math.log(float(np.sum(np.exp(x - m * top))))
    return PowerSums(out, lam.size, fingerprint(lam), _lambdas=lam)


def chi_newton(sums: PowerSums, K: int, cond_ratio: float = 1e3) -> ChiTable:
    """``e_k`` from Newton's identities.

    At every order the alternating partial sums are compared with the result;
    if their magnitude exceeds the result by more than ``cond_ratio`` the
    table is recomputed by :func:`chi_table` (requires the power sums to carry
    their spectrum) and a :class:`CancellationWarning` is emitted.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    if sums.m_max < min(K, sums.size):
        raise ValueError(f"power sums only to order {sums.m_max}; need {min(K, sums.size)}")
    logM = np.full(K + 1, -np.inf)
    n = min(K, sums.m_max)
    logM[: n + 1] = sums.log_M[: n + 1]
    L, err = _newton_kernel(logM, K, sums.size)
    worst = float(np.max(err)) if err.size else 0.0
    if not np.isfinite(worst) or worst > cond_ratio:
        if sums._lambdas is None:
            raise ArithmeticError(f"Newton recursion ill-conditioned (ratio {worst:.3g}) "
                                  "and no spectrum available for fallback")
        warnings.warn(f"Newton recursion condition ratio {worst:.3g} > {cond_ratio:g}; "
                      "falling back to product expansion", CancellationWarning, stacklevel=2)
        t = chi_table(sums._lambdas, K)
        return ChiTable(t.log_e.copy(), t.fingerprint, "newton->" + t.method, t.size,
                        notes=(f"newton condition ratio {worst:.3g}",),
                        _lambdas=t._lambdas, _blocks=t._blocks, _shells=t._shells)
    sh = _shell_arrays(sums._lambdas) if sums._lambdas is not None else None
    return ChiTable(L, sums.fingerprint, "newton", sums.size,
                    notes=(f"condition ratio {worst:.3g}",),
                    _lambdas=None if sh is not None else sums._lambdas, _shells=sh)


def chi_subset(spectrum, index_set, K: int) -> ChiTable:
    """Table over the sub-spectrum of states ``index_set`` (1-based, like j)."""
    lam = _as_lambdas(spectrum)
    idx = np.asarray(sorted(set(int(i) for i in index_set)), dtype=np.int64)
    if idx.size and (idx[0] < 1 or idx[-1] > lam.size):
        raise IndexError(f"subset index outside 1..{lam.size}")
    return chi_table(lam[idx - 1], K)


def log_convolve(a: ChiTable | np.ndarray, b: ChiTable | np.ndarray, K: int) -> np.ndarray:
    """log of ``sum_n e_n(A) e_{k-n}(B)`` (the table of the union A + B)."""
    A = getattr(a, "log_e", a)
    B = getattr(b, "log_e", b)
    return _log_convolve(np.asarray(A, float), np.asarray(B, float), K)


# ---------------------------------------------------------------------------
# leave-one-out
# ---------------------------------------------------------------------------

def _log_sub(a: float, b: float) -> float:
    """log(exp(a) - exp(b)) for a >= b; -inf on exact cancellation."""
    if b == -np.inf:
        return a
    d = b - a
    if d >= 0.0:
        return -np.inf if d == 0.0 else np.nan
    return a + math.log(-math.expm1(d))


def _exclude_dp(table: ChiTable, index: int, K: int) -> np.ndarray:
    """Exact table of the spectrum with one entry removed."""
    if table._shells is not None:
        # index is a shell index here
        lam_s, g = table._shells
        g = g.copy()
        if g[index] < 1:
            raise IndexError(f"shell {index} is empty")
        g[index] -= 1
        return chi_shells(lam_s, g, K).log_e.copy()
    lam = table._lambdas
    if lam is None:
        raise ArithmeticError("table does not carry its spectrum; cannot recompute")
    if table._blocks is None:
        rest = np.delete(lam, index)
        return chi_table(rest, K).log_e.copy()
    bounds, tables, loglam = table._blocks
    # positions refer to the positive entries kept in loglam
    pos_index = int(np.count_nonzero(lam[:index] > 0))
    if lam[index] <= 0:
        return _merge([t[: K + 1] for t in tables], K)
    b = int(np.searchsorted(bounds, pos_index, side="right") - 1)
    own = np.delete(loglam[bounds[b]:bounds[b + 1]], pos_index - bounds[b])
    parts = [_dp_kernel(own, K, 512)]
    parts += [t[: K + 1] for i, t in enumerate(tables) if i != b]
    return _merge(parts, K)


def chi_leave_one_out(table: ChiTable, lambda_j: float, K: int | None = None,
                      index: int | None = None, tol: float = 1e-10) -> ChiTable:
    """Table of the spectrum with one coefficient ``lambda_j`` removed.

    Uses ``e_k^(j) = e_k - lambda_j e_{k-1}^(j)`` with a running relative
    error bound; falls back to an exact product expansion over the reduced
    spectrum if the bound exceeds ``tol`` or an intermediate turns negative.
    For shell tables ``index`` is the 0-based shell index.
    """
    K = table.K if K is None else K
    table.require(K)
    lam_arr = table._shells[0] if table._shells is not None else table._lambdas
    if index is None and lam_arr is not None:
        hits = np.flatnonzero(lam_arr == lambda_j)
        if hits.size == 0:
            raise ValueError("lambda_j is not a coefficient of this spectrum")
        index = int(hits[0])
    if lam_arr is not None and index is not None:
        lambda_j = float(lam_arr[index])
    if lambda_j <= 0:
        return ChiTable(table.log_e[: K + 1].copy(), table.fingerprint + "-0", table.method,
                        table.size - 1)
    ll = math.log(lambda_j)
    L = table.log_e
    out = np.full(K + 1, -np.inf)
    out[0] = 0.0
    bound = 0.0
    failed = False
    # orders >= rank of the reduced spectrum vanish exactly; never compute them
    rank = table.rank
    for k in range(1, min(K, rank - 1) + 1):
        sub = ll + out[k - 1]
        v = _log_sub(L[k], sub)
        if np.isnan(v):
            failed = True
            break
        if v == -np.inf:
            failed = True
            break
        out[k] = v
        ratio = math.exp(sub - v) if sub > -np.inf else 0.0
        bound = ratio * bound + EPS * (1.0 + 2.0 * ratio)
        if bound > tol:
            failed = True
            break
    note = ()
    method = table.method + "-loo"
    if failed:
        out = _exclude_dp(table, index, K) if index is not None else None
        if out is None:
            raise ArithmeticError("leave-one-out recursion unstable and no index to recompute")
        note = ("fallback: exact recompute",)
        method = "dp-loo-exact"
    if table.size - 1 < K:
        out[table.size:] = -np.inf
    return ChiTable(out, table.fingerprint + f"-{index}", method, table.size - 1, notes=note)


def leave_one_out_ratio(table: ChiTable, lambdas, k: int, tol: float = 1e-10):
    """``e_k(Lambda without lambda) / e_k(Lambda)`` for many lambdas at once.

    Returns ``(ratio, ok)``; entries with ``ok == False`` exceeded the error
    bound and must be recomputed exactly.
    """
    table.require(k)
    lam = np.asarray(lambdas, float)
    L = table.log_e
    r = np.ones_like(lam)
    bound = np.zeros_like(lam)
    ok = np.ones(lam.shape, dtype=bool)
    for q in range(1, k + 1):
        if L[q] == -np.inf:
            r[:] = 0.0
            break
        step = lam * math.exp(L[q - 1] - L[q])
        t = step * r
        r_new = 1.0 - t
        with np.errstate(divide="ignore", invalid="ignore"):
            amp = np.where(r_new > 0, t / r_new, np.inf)
            bound = amp * bound + EPS * (1.0 + 2.0 * amp)
        ok &= (r_new > 0) & (bound <= tol)
        r = np.where(r_new > 0, r_new, 0.0)
    return r, ok


def newton_inequality_ok(table: ChiTable, rtol: float = 1e-9) -> bool:
    """Normalised Newton inequalities ``E_k^2 >= E_{k-1} E_{k+1}``."""
    S = table.size
    L = table.log_e
    top = min(table.K, S) - 1
    for k in range(1, top + 1):
        lb = lambda q: L[q] - (gammaln(S + 1) - gammaln(q + 1) - gammaln(S - q + 1))
        lhs = 2 * lb(k)
        rhs = lb(k - 1) + lb(k + 1)
        if rhs - lhs > rtol * max(1.0, abs(lhs)):
            return False
    return True
