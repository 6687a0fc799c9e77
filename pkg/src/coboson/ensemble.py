"""Observables of the unsplit N-coboson state.

Everything is evaluated in units of ``e_k = e_k(Lambda)``; binomials and
factorials of the coboson convention cancel analytically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectrum import SchmidtSpectrum, from_lambdas
from .sympoly import (ChiTable, RangeError, chi_leave_one_out, chi_newton, chi_shells,
                      chi_table, leave_one_out_ratio, power_sums)


class EnsembleError(ValueError):
    pass


def as_spectrum(spectrum) -> SchmidtSpectrum:
    if isinstance(spectrum, SchmidtSpectrum):
        return spectrum
    return from_lambdas(spectrum)


@dataclass(frozen=True)
class EnsembleSpec:
    """|N> over a spectrum, with a table reaching at least order N."""

    N: int
    spectrum: SchmidtSpectrum
    table: ChiTable

    def __post_init__(self):
        if self.N < 1:
            raise EnsembleError("N must be >= 1")
        if self.N > self.spectrum.S:
            raise EnsembleError(f"N={self.N} exceeds Schmidt rank S={self.spectrum.S}: state vanishes")
        if self.table.K < self.N:
            raise RangeError(f"table order {self.table.K} < N={self.N}")
        if self.table.fingerprint != self.spectrum.fingerprint:
            raise EnsembleError("table does not belong to this spectrum")

    @property
    def lambdas(self) -> np.ndarray:
        return self.spectrum.lambdas

    @property
    def log_e(self) -> np.ndarray:
        return self.table.log_e


def make_ensemble(spectrum, N: int, K: int | None = None, method: str = "dp") -> EnsembleSpec:
    """Build the ensemble; ``K`` defaults to N+1 (enough for every |N> observable)."""
    spec = as_spectrum(spectrum)
    if N < 1:
        raise EnsembleError("N must be >= 1")
    if N > spec.S:
        raise EnsembleError(f"N={N} exceeds Schmidt rank S={spec.S}: state vanishes")
    K = N + 1 if K is None else max(K, N)
    if method == "dp":
        table = chi_table(spec, K)
    elif method == "newton":
        table = chi_newton(power_sums(spec, K), K)
    else:
        raise ValueError(f"unknown method {method!r}")
    return EnsembleSpec(N, spec, table)


@dataclass(frozen=True)
class CountWindow:
    """The t lowest states (inside) and the rest (outside)."""

    t: int
    inside: ChiTable
    outside: ChiTable

    @classmethod
    def build(cls, ens: EnsembleSpec, t: int, K: int | None = None):
        S = ens.spectrum.S
        if not 1 <= t <= S:
            raise EnsembleError(f"window size t={t} outside 1..{S}")
        K = ens.N if K is None else K
        spec = ens.spectrum
        if np.all(spec.degeneracy == 1):
            lam = spec.shell_lambdas
            return cls(t, chi_table(lam[:t], K), chi_table(lam[t:], K))
        g_in, g_out = spec.split(t)
        lam = spec.shell_lambdas
        return cls(t, chi_shells(lam, g_in, K), chi_shells(lam, g_out, K))


# ---------------------------------------------------------------------------
# occupations
# ---------------------------------------------------------------------------

def _leave_out(ens: EnsembleSpec, index: int, K: int) -> ChiTable:
    """Table without state ``index`` (0-based); shell tables take shell indices."""
    spec = ens.spectrum
    if ens.table._shells is not None:
        s = spec.shell_of(index + 1)
        return chi_leave_one_out(ens.table, float(spec.shell_lambdas[s]), K=K, index=s)
    return chi_leave_one_out(ens.table, float(spec.lambdas[index]), K=K, index=index)


def _log_occupation_exact(ens: EnsembleSpec, index: int) -> float:
    N, L = ens.N, ens.log_e
    lam = float(ens.spectrum.lambdas[index]) if ens.table._shells is None else \
        float(ens.spectrum.shell_lambdas[ens.spectrum.shell_of(index + 1)])
    loo = _leave_out(ens, index, N - 1)
    v = loo.log_e[N - 1]
    if not np.isfinite(v) and v != -np.inf:
        raise ArithmeticError(f"leave-one-out failed for j={index + 1}")
    return math.log(lam) + v - math.log(N) - L[N]


def occupation(ens: EnsembleSpec, j: int) -> float:
    """``D_j[N] = lambda_j e_{N-1}(Lambda_j) / (N e_N)`` for 1-based j."""
    if not 1 <= j <= ens.spectrum.S:
        raise EnsembleError(f"state index j={j} outside 1..{ens.spectrum.S}")
    return math.exp(_log_occupation_exact(ens, j - 1))


def vacancy(ens: EnsembleSpec, j: int) -> float:
    """``1 - N D_j = e_N(Lambda_j) / e_N``, free of the cancellation in 1 - N D_j."""
    if not 1 <= j <= ens.spectrum.S:
        raise EnsembleError(f"state index j={j} outside 1..{ens.spectrum.S}")
    N = ens.N
    loo = _leave_out(ens, j - 1, N)
    return math.exp(loo.log_e[N] - ens.log_e[N])


def shell_occupations(ens: EnsembleSpec) -> np.ndarray:
    """D for the representative (first) state of every shell."""
    spec = ens.spectrum
    first = spec.shell_first_index()
    lam = np.array(spec.shell_lambdas)
    N, L = ens.N, ens.log_e
    if N == 1:
        return lam.copy()
    ratio, ok = leave_one_out_ratio(ens.table, lam, N - 1)
    with np.errstate(divide="ignore"):
        D = lam * ratio * np.exp(L[N - 1] - L[N]) / N
    for s in np.flatnonzero(~ok):
        D[s] = math.exp(_log_occupation_exact(ens, int(first[s])))
    return D


def occupations(ens: EnsembleSpec) -> np.ndarray:
    """D_j for all j (one computation per shell, replicated over m)."""
    return np.repeat(shell_occupations(ens), ens.spectrum.degeneracy)


def spectral_density(ens: EnsembleSpec):
    """``n_spect(nl) = g_l N D`` per shell; returns (shells, values)."""
    spec = ens.spectrum
    D = shell_occupations(ens)
    return spec.shells, spec.degeneracy * ens.N * D


def occupation_approx(lambda_j, N: int):
    """``lambda_j / (1 + lambda_j (N-1))``."""
    if N < 1:
        raise EnsembleError("N must be >= 1")
    lam = np.asarray(lambda_j, dtype=float)
    out = lam / (1.0 + lam * (N - 1))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# counting in a window
# ---------------------------------------------------------------------------

def count_distribution(ens: EnsembleSpec, window: CountWindow | int) -> np.ndarray:
    """``P(n) = e_n(inside) e_{N-n}(outside) / e_N`` for n = 0..N."""
    if not isinstance(window, CountWindow):
        window = CountWindow.build(ens, int(window))
    N = ens.N
    A, B = window.inside.log_e, window.outside.log_e
    if A.shape[0] <= N or B.shape[0] <= N:
        raise RangeError(f"window tables must reach order N={N}")
    n = np.arange(N + 1)
    logP = A[n] + B[N - n] - ens.log_e[N]
    P = np.exp(logP)
    P[n > window.t] = 0.0
    return P


def mean_population(ens: EnsembleSpec, t: int) -> float:
    """``<N_t> = N sum_{j<=t} D_j``."""
    S = ens.spectrum.S
    if not 1 <= t <= S:
        raise EnsembleError(f"window size t={t} outside 1..{S}")
    if t == S:
        return float(ens.N)
    g_in, _ = ens.spectrum.split(t)
    D = shell_occupations(ens)
    return ens.N * math.fsum((g_in * D).tolist())


def window_report(ens: EnsembleSpec, t: int) -> dict:
    """Mean and variance of the window population with reference variances.

    ``poisson_var`` is the mean; ``binomial_var`` is ``mean (1 - mean/t)``,
    the variance of t independent two-level states with the same mean.
    """
    P = count_distribution(ens, t)
    n = np.arange(P.size)
    mean = math.fsum((n * P).tolist())
    var = math.fsum(((n - mean) ** 2 * P).tolist())
    return {"t": t, "mean": mean, "variance": var, "poisson_var": mean,
            "binomial_var": mean * (1.0 - mean / t)}


def normalization_ratio(ens: EnsembleSpec) -> float:
    """``chi_{N+1} / chi_N = (N+1) e_{N+1} / e_N`` (exactly 0 if N+1 > S)."""
    N = ens.N
    if N + 1 > ens.spectrum.S:
        return 0.0
    if ens.table.K < N + 1:
        raise RangeError(f"table order {ens.table.K} too short; need N+1={N + 1}")
    return (N + 1) * math.exp(ens.log_e[N + 1] - ens.log_e[N])


def universality_diagnostic(ens_a: EnsembleSpec, ens_b: EnsembleSpec) -> dict:
    """Relative deviation of the normalization ratio between two ensembles.

    Meant for solver spectra at equal k_F a but different (N, a/L); the
    deviation is reported, not asserted.
    """
    ra, rb = normalization_ratio(ens_a), normalization_ratio(ens_b)
    return {"ratio_a": ra, "ratio_b": rb, "N_a": ens_a.N, "N_b": ens_b.N,
            "relative_deviation": abs(ra - rb) / max(abs(ra), abs(rb), 1e-300)}
