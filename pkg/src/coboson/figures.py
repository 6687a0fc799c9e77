"""Data sets behind the figures, computed from the shipped preset spectra.

Each builder returns ``{name: (columns, rows, meta)}``.  All sweeps are
fixed grids, so the tables are deterministic.  Figures use the presets'
reference pair number (``PRESET_N``) unless a panel needs a sweep over N.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import bell, ensemble, splitting
from .ensemble import EnsembleSpec
from .solver import PRESET_N, PRESETS, load_preset
from .sympoly import chi_table

T_WINDOW = 56
FIG1A_N = tuple(range(20, PRESET_N + 1, 20))
FIG1B_STEP = 12
FIG1C_STATES = 500
FIG2A_T = 2000
FIG4_PRESET = "0.5"
FIG4_NS = (1, 100000, 40)
FIG4_EXACT_MAX = 1000
FIG5_NS = (1, 1000, 60)


def _order(names=PRESETS):
    # strongest pairing last so series run 2 -> 0.5 as in the trend statements
    return sorted(names, key=lambda s: -float(s))


@lru_cache(maxsize=6)
def preset_table(name: str, K: int):
    spec = load_preset(name)
    return spec, chi_table(spec, K)


def preset_ensemble(name: str, N: int, K: int | None = None) -> EnsembleSpec:
    """Ensemble over a preset; tables are shared between N (cached per K)."""
    K = max(K or N + 1, N)
    spec, table = preset_table(name, K)
    return EnsembleSpec(N, spec, table)


def _meta(names, **extra):
    out = {"presets": {n: load_preset(n).fingerprint for n in names}}
    out.update(extra)
    return out


def _grid(lo, hi, steps):
    g = np.unique(np.round(np.logspace(math.log10(lo), math.log10(hi), steps)).astype(int))
    return [int(x) for x in g]


def fig1a(threads: int = 1):
    rows = []
    for name in _order():
        for N in FIG1A_N:
            ens = preset_ensemble(name, N, 2 * PRESET_N)
            M = N // 2
            lp = splitting.log_purity(ens, M)
            rows.append((float(name), N, M, math.exp(lp), lp / math.log(10), 1 / math.comb(N, M)))
    cols = ["invkfa", "N", "M", "purity", "log10_purity", "lower_bound"]
    return {"fig1a": (cols, rows, _meta(PRESETS))}


def fig1b(threads: int = 1):
    N = PRESET_N
    Ms = list(range(0, N + 1, FIG1B_STEP))
    coeffs = {m: splitting.alpha_coeffs(N, m) for m in sorted({min(m, N - m) for m in Ms})}
    rows = []
    for name in _order():
        ens = preset_ensemble(name, N, 2 * N)
        for M in Ms:
            lp = splitting.log_purity(ens, M, coeffs[min(M, N - M)])
            rows.append((float(name), N, M, 1 - 2 * M / N, math.exp(lp), lp / math.log(10),
                         1 / math.comb(N, M)))
    cols = ["invkfa", "N", "M", "x", "purity", "log10_purity", "lower_bound"]
    return {"fig1b": (cols, rows, _meta(PRESETS))}


def fig1c(threads: int = 1):
    rows = []
    for name in _order():
        spec = load_preset(name)
        first = spec.shell_first_index()
        for i in range(spec.n_shells):
            if first[i] >= FIG1C_STATES:
                break
            rows.append((float(name), int(first[i]) + 1, int(spec.shell_n[i]), int(spec.shell_l[i]),
                         int(spec.degeneracy[i]), float(spec.shell_lambdas[i]),
                         float(spec.shell_energy[i])))
    cols = ["invkfa", "j", "n", "l", "g", "lambda", "energy"]
    return {"fig1c": (cols, rows, _meta(PRESETS))}


def fig2(threads: int = 1):
    N, t = PRESET_N, T_WINDOW
    rows_a, rows_b, reports = [], [], {}
    for name in _order():
        ens = preset_ensemble(name, N)
        spec = ens.spectrum
        D = ensemble.shell_occupations(ens)
        top = min(FIG2A_T, spec.S)
        per_state = _first_states(D, spec.degeneracy, top)
        cum = N * np.cumsum(per_state)
        for tt in range(1, top + 1):
            rows_a.append((float(name), tt, float(cum[tt - 1])))
        P = ensemble.count_distribution(ens, t)
        rep = ensemble.window_report(ens, t)
        reports[name] = rep
        mean = rep["mean"]
        pois = _poisson(mean, P.size)
        binom = splitting.binomial_pmf(t, min(1.0, mean / t))
        for n in range(P.size):
            rows_b.append((float(name), n, float(P[n]), float(pois[n]),
                           float(binom[n]) if n <= t else 0.0))
    return {
        "fig2a": (["invkfa", "t", "mean_population"], rows_a,
                  _meta(PRESETS, N=N)),
        "fig2b": (["invkfa", "n", "P", "poisson", "binomial"], rows_b,
                  _meta(PRESETS, N=N, t=t, window=reports)),
    }


def _first_states(D, g, top):
    cum = np.cumsum(g)
    k = int(np.searchsorted(cum, top)) + 1
    return np.repeat(D[:k], g[:k])[:top]


def _poisson(mean, size):
    n = np.arange(size)
    if mean <= 0:
        return (n == 0).astype(float)
    from scipy.special import gammaln
    return np.exp(n * math.log(mean) - mean - gammaln(n + 1))


def fig3(threads: int = 1):
    N, t = PRESET_N, T_WINDOW
    M = N // 2
    b = splitting.binomial_pmf(t, 0.5)
    rows, tv = [], {}
    for name in _order():
        ens = preset_ensemble(name, N)
        P1 = splitting.marginal_count(ens, M, t)
        tv[name] = splitting.total_variation(P1, b)
        for n1 in range(max(P1.size, t + 1)):
            rows.append((float(name), n1, float(P1[n1]) if n1 < P1.size else 0.0,
                         float(b[n1]) if n1 <= t else 0.0))
    return {"fig3": (["invkfa", "n1", "P1", "binomial"], rows,
                     _meta(PRESETS, N=N, M=M, t=t, tv_binomial=tv))}


def s_wave_states(spec, count: int = 5):
    """1-based index of the first state of the lowest ``count`` l = 0 shells."""
    first = spec.shell_first_index()
    idx = np.flatnonzero(spec.shell_l == 0)[:count]
    return [int(first[i]) + 1 for i in idx]


def fig4(threads: int = 1):
    spec = load_preset(FIG4_PRESET)
    Ns = _grid(*FIG4_NS)
    exact = [n for n in Ns if n <= min(FIG4_EXACT_MAX, spec.S)]
    rest = [n for n in Ns if n not in exact]
    rows = []
    for j in s_wave_states(spec):
        rows += bell.chsh_sweep(spec, j, exact, 0.5, approx=False) if exact else []
        rows += bell.chsh_sweep(spec, j, rest, 0.5, approx=True) if rest else []
    return {"fig4": (bell.SWEEP_COLUMNS, rows,
                     _meta((FIG4_PRESET,), threshold=bell.violation_threshold()))}


def fig5(threads: int = 1):
    spec = load_preset(FIG4_PRESET)
    Ns = _grid(*FIG5_NS)
    K = max(Ns)
    ens = preset_ensemble(FIG4_PRESET, K, K)
    loo = ensemble._leave_out(ens, 0, K)
    lam1 = float(spec.shell_lambdas[0])
    rows = []
    for N in Ns:
        ND = lam1 * math.exp(loo.log_e[N - 1] - ens.log_e[N])
        fit = 1.0 / (1.0 + lam1 * (N - 1))
        rows.append((N, ND, ND / (N * lam1), fit, ND / (N * lam1) - fit))
    return {"fig5": (["N", "ND1", "ND1_over_Nlambda1", "fit", "deviation"], rows,
                     _meta((FIG4_PRESET,), lambda1=lam1))}


BUILDERS = {"fig1a": fig1a, "fig1b": fig1b, "fig1c": fig1c, "fig2": fig2, "fig3": fig3,
            "fig4": fig4, "fig5": fig5}


def render(name, columns, rows, path):
    """SVG rendering of a data set (matplotlib, imported on demand)."""
    try:
        import matplotlib
    except ImportError as e:  # pragma: no cover - optional dependency
        raise RuntimeError("--render needs matplotlib (pip install 'artifact[plot]')") from e
    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "coboson"
    import matplotlib.pyplot as plt

    meta = BUILDERS_PLOT.get(name, {})
    x, y, series = meta.get("x", columns[0]), meta.get("y", columns[1]), meta.get("series")
    ix, iy = columns.index(x), columns.index(y)
    groups = {}
    for r in rows:
        if r[-1] == "bound" or isinstance(r[iy], str):
            continue
        key = r[columns.index(series)] if series else ""
        groups.setdefault(key, ([], []))
        groups[key][0].append(r[ix])
        groups[key][1].append(r[iy])
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for key, (xs, ys) in groups.items():
        ax.plot(xs, ys, marker=".", lw=1, label=f"{series}={key}" if series else None)
    if meta.get("logx"):
        ax.set_xscale("log")
    if meta.get("logy"):
        ax.set_yscale("log")
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    if series:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


BUILDERS_PLOT = {
    "fig1a": {"x": "N", "y": "log10_purity", "series": "invkfa"},
    "fig1b": {"x": "x", "y": "log10_purity", "series": "invkfa"},
    "fig1c": {"x": "j", "y": "lambda", "series": "invkfa", "logy": True},
    "fig2a": {"x": "t", "y": "mean_population", "series": "invkfa", "logx": True},
    "fig2b": {"x": "n", "y": "P", "series": "invkfa"},
    "fig3": {"x": "n1", "y": "P1", "series": "invkfa"},
    "fig4": {"x": "N", "y": "chsh", "series": "j", "logx": True},
    "fig5": {"x": "N", "y": "ND1_over_Nlambda1", "logx": True},
}
