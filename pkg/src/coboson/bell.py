"""CHSH correlators for the split coboson state.

With respect to a single-fermion state j the projected state decomposes as

    sqrt(M D) |o>_1|e>_2 + sqrt((N-M) D) |e>_1|o>_2 + sqrt(1 - N D) |e>_1|e>_2

(o/e: j occupied/empty in that mode).  With Q = Z_1, R = X_1,
S = (X_2 - Z_2)/sqrt2, T = (X_2 + Z_2)/sqrt2 the correlators follow from
<Z1 Z2> = 1 - 2ND, <Z1 X2> = 2 beta gamma, <X1 X2> = 2 alpha beta and
<X1 Z2> = 2 alpha gamma, where alpha, beta, gamma are the three amplitudes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SQRT2 = math.sqrt(2.0)
TSIRELSON = 2.0 * SQRT2
CLASSICAL = 2.0
OCC_TOL = 1e-12


class OccupationError(ValueError):
    pass


@dataclass(frozen=True)
class BellSetting:
    j: int
    N: float
    M: float
    D: float
    provenance: str = "exact"     # exact | approx | measured
    empty: float | None = None    # 1 - N D if known without cancellation

    def __post_init__(self):
        _check(self.N, self.M, self.D)


@dataclass(frozen=True)
class CorrelatorSet:
    QS: float
    RS: float
    RT: float
    QT: float
    M: float
    errors: dict = field(default_factory=dict)

    def as_dict(self):
        d = {"QS": self.QS, "RS": self.RS, "RT": self.RT, "QT": self.QT, "M": self.M}
        d.update({f"d{k}": v for k, v in self.errors.items()})
        return d


@dataclass(frozen=True)
class FluctuatingEnsemble:
    N1: float
    N2: float
    D: float
    dN1: float = 0.0
    dN2: float = 0.0
    dD: float = 0.0

    def __post_init__(self):
        if not (self.N1 > 0 and self.N2 > 0 and self.D >= 0):
            raise OccupationError("mean particle numbers must be positive and D >= 0")
        if min(self.dN1, self.dN2, self.dD) < 0:
            raise ValueError("uncertainties must be nonnegative")
        _check(self.N, self.N1, self.D)

    @property
    def N(self) -> float:
        return self.N1 + self.N2


def _check(N, M, D):
    if not 0 <= M <= N:
        raise OccupationError(f"need 0 <= M <= N (got M={M}, N={N})")
    x = N * D
    if D < 0 or x > 1.0 + OCC_TOL:
        raise OccupationError(f"invalid occupation N*D = {x!r} (must lie in [0, 1])")


def _amplitudes(N, M, D, empty=None):
    if empty is None:
        empty = max(0.0, 1.0 - N * D)
    return math.sqrt(M * D), math.sqrt((N - M) * D), math.sqrt(empty)


def _correlators(N, M, D, empty=None):
    a, b, g = _amplitudes(N, M, D, empty)
    zz = 1.0 - 2.0 * min(N * D, 1.0)
    QS = (2 * b * g - zz) / SQRT2
    QT = (2 * b * g + zz) / SQRT2
    RS = (2 * a * b - 2 * a * g) / SQRT2
    RT = (2 * a * b + 2 * a * g) / SQRT2
    return QS, RS, RT, QT


def chsh_correlators(setting: BellSetting | None = None, *, N=None, M=None, D=None,
                     empty=None) -> CorrelatorSet:
    """<QS>, <RS>, <RT>, <QT> and <M> = QS + RS + RT - QT.

    ``empty`` (= 1 - N D) may be supplied from an independent evaluation;
    the square root in the correlators amplifies rounding near N D = 1.
    """
    if setting is not None:
        N, M, D, empty = setting.N, setting.M, setting.D, setting.empty
    _check(N, M, D)
    QS, RS, RT, QT = _correlators(N, M, D, empty)
    return CorrelatorSet(QS, RS, RT, QT, QS + RS + RT - QT)


def chsh_value(N, M, D):
    """``sqrt2 (2 D (N + sqrt(M (N-M))) - 1)``; vectorised over D."""
    D = np.asarray(D, dtype=float)
    if np.any(D < 0) or np.any(N * D > 1.0 + OCC_TOL) or not 0 <= M <= N:
        raise OccupationError("invalid occupation: need 0 <= N*D <= 1 and 0 <= M <= N")
    out = SQRT2 * (2.0 * D * (N + np.sqrt(M * (N - M))) - 1.0)
    return float(out) if out.ndim == 0 else out


def violation_threshold(balanced: bool = True, N=None, M=None) -> float:
    """Smallest N*D with <M> > 2.

    Balanced splitting gives (1 + sqrt2)/3; otherwise N and M are needed.
    """
    if balanced:
        return (1.0 + SQRT2) / 3.0
    if N is None or M is None:
        raise ValueError("unbalanced threshold needs N and M")
    return N * (1.0 + SQRT2) / (2.0 * (N + math.sqrt(M * (N - M))))


def chsh_fluctuating(ens: FluctuatingEnsemble) -> CorrelatorSet:
    """Mean-value correlators with first-order error propagation.

    The means (N1 + N2, N1, D) are inserted in the deterministic formulas;
    uncertainties of N1, N2 and D are treated as independent.
    """
    x0 = np.array([ens.N1, ens.N2, ens.D])
    dx = np.array([ens.dN1, ens.dN2, ens.dD])

    def f(v):
        n1, n2, d = v
        QS, RS, RT, QT = _correlators(n1 + n2, n1, d)
        return np.array([QS, RS, RT, QT, QS + RS + RT - QT])

    c = f(x0)
    J = np.zeros((5, 3))
    for i in range(3):
        if dx[i] == 0:
            continue
        h = 1e-6 * max(abs(x0[i]), 1e-3)
        # central difference; one-sided if the step leaves the physical region
        xp, xm = x0.copy(), x0.copy()
        xp[i] += h
        xm[i] -= h
        try:
            fp = f(xp)
        except (OccupationError, ValueError):
            fp = None
        try:
            fm = f(xm) if xm[i] >= 0 else None
        except (OccupationError, ValueError):
            fm = None
        if fp is not None and fm is not None:
            J[:, i] = (fp - fm) / (2 * h)
        elif fp is not None:
            J[:, i] = (fp - c) / h
        else:
            J[:, i] = (c - fm) / h
    # <M> is linear in D: use the exact derivative
    J[4, 2] = SQRT2 * 2.0 * (ens.N + math.sqrt(ens.N1 * ens.N2))
    err = np.sqrt((J ** 2) @ (dx ** 2))
    names = ("QS", "RS", "RT", "QT", "M")
    return CorrelatorSet(*c.tolist(), errors=dict(zip(names, err.tolist())))



# ---------------------------------------------------------------------------
# sweeps over N for a given spectrum
# ---------------------------------------------------------------------------

SWEEP_COLUMNS = ["j", "N", "M", "NDj", "chsh", "QS", "RS", "RT", "QT", "source"]


def _sweep_row(j, N, frac, D, empty, source):
    M = int(round(frac * N))
    c = chsh_correlators(N=N, M=M, D=min(D, 1.0 / N), empty=empty)
    return (j, N, M, N * D, c.M, c.QS, c.RS, c.RT, c.QT, source)


def chsh_sweep(spec, j: int, Ns, frac: float = 0.5, approx: bool = False):
    """Rows ``(j, N, M, N D_j, chsh, QS, RS, RT, QT, source)`` for each N.

    ``approx`` uses ``D_j = lambda_j / (1 + lambda_j (N-1))``; otherwise one
    table to the largest N serves every point (exact D_j and 1 - N D_j).
    """
    from . import ensemble

    spec = ensemble.as_spectrum(spec)
    lam_j = float(spec.shell_lambdas[spec.shell_of(j)])
    Ns = [int(n) for n in Ns]
    if approx:
        return [_sweep_row(j, N, frac, ensemble.occupation_approx(lam_j, N), None, "approx")
                for N in Ns]
    K = max(Ns)
    ens = ensemble.make_ensemble(spec, K, K=K)
    L = ens.log_e
    Lj = ensemble._leave_out(ens, j - 1, K).log_e
    return [_sweep_row(j, N, frac, lam_j * math.exp(Lj[N - 1] - L[N]) / N,
                       math.exp(Lj[N] - L[N]), "exact") for N in Ns]
