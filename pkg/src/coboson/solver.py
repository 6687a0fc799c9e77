"""Model two-body problem in an isotropic trap and its Schmidt decomposition.

Units: hbar = m = omega = 1, so the trap length L = 1.  The pair state is
``psi(r_a, r_b) = Phi_cm(R) g(r)`` with the centre of mass in its oscillator
ground state and the relative motion in the ground state of

    -u'' + [l(l+1)/r^2 + r^2/4 + V(r)] u = E u       (reduced mass 1/2)

with a Gaussian well ``V(r) = -V0 exp(-r^2 / (2 b^2))``.  The depth is
calibrated so that the ground energy equals the free-space binding energy
``-1/a^2``.

The pair state is projected on partial waves of the single-particle
angles; each channel l gives a symmetric kernel ``k_l(r_a, r_b)`` whose
squared eigenvalues are the Schmidt coefficients ``lambda_{nl}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from functools import lru_cache
from importlib import resources

import numba
import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.optimize import brentq
from scipy.integrate import solve_ivp

from .spectrum import SchmidtSpectrum, Shell, SpectrumError, from_shells, read_spectrum

PRESET_N = 360
PRESETS = ("0.5", "1", "2")


class NoBoundState(SpectrumError):
    pass


class GridTooCoarse(SpectrumError):
    pass


@dataclass(frozen=True)
class PhysicalParams:
    a: float                 # scattering length
    L: float = 1.0           # trap length sqrt(hbar / m omega)
    omega: float = 1.0
    N: int = PRESET_N

    def __post_init__(self):
        if not self.a > 0:
            raise SpectrumError("scattering length must be positive (BEC side)")
        if not (self.L > 0 and self.omega > 0):
            raise SpectrumError("trap length and frequency must be positive")

    @property
    def volume(self) -> float:
        return 4.0 * math.pi * self.L ** 3 / 3.0

    @property
    def density(self) -> float:
        return self.N / self.volume

    @property
    def k_F(self) -> float:
        return (6.0 * math.pi ** 2 * self.density) ** (1.0 / 3.0)

    @property
    def inv_kfa(self) -> float:
        return 1.0 / (self.k_F * self.a)

    @classmethod
    def from_inv_kfa(cls, inv_kfa: float, N: int = PRESET_N, L: float = 1.0):
        kf = (6.0 * math.pi ** 2 * N / (4.0 * math.pi * L ** 3 / 3.0)) ** (1.0 / 3.0)
        return cls(a=1.0 / (inv_kfa * kf), L=L, N=N)


@dataclass(frozen=True)
class PairPotentialSpec:
    """Gaussian well; ``range_ratio`` is b / a.  ``depth=None`` calibrates."""

    kind: str = "gaussian"
    range_ratio: float = 0.25
    depth: float | None = None

    def range(self, a: float) -> float:
        return self.range_ratio * a

    def __call__(self, r, depth, b):
        return -depth * np.exp(-0.5 * (r / b) ** 2)


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid ``r_i = i h``, i = 1..points, hard wall at ``extent * L``."""

    points: int = 4000
    extent: float = 10.0

    def __post_init__(self):
        if self.points < 4 or not self.extent > 0:
            raise SpectrumError("grid needs >= 4 points and a positive extent")

    @property
    def h(self) -> float:
        return self.extent / (self.points + 1)

    @property
    def r(self) -> np.ndarray:
        return self.h * np.arange(1, self.points + 1)


@dataclass
class RadialSolution:
    l: int
    r: np.ndarray
    u: np.ndarray            # columns normalised so that sum(u^2) h = 1
    energies: np.ndarray
    meta: dict = field(default_factory=dict)


def _radial_eigs(r, h, Veff, n_states):
    d = 2.0 / h ** 2 + Veff
    e = np.full(r.size - 1, -1.0 / h ** 2)
    w, v = eigh_tridiagonal(d, e, select="i", select_range=(0, n_states - 1))
    v = v / math.sqrt(h)
    v *= np.sign(v[np.argmax(np.abs(v), axis=0), np.arange(v.shape[1])])
    return w, v


def relative_hamiltonian_diag(r, l, potential: PairPotentialSpec, depth, b):
    Veff = l * (l + 1) / r ** 2 + 0.25 * r ** 2
    if depth:
        Veff = Veff + potential(r, depth, b)
    return Veff


def ground_energy(grid: GridSpec, potential: PairPotentialSpec, depth: float, b: float) -> float:
    r = grid.r
    w, _ = _radial_eigs(r, grid.h, relative_hamiltonian_diag(r, 0, potential, depth, b), 1)
    return float(w[0])


def calibrate_depth(params: PhysicalParams, potential: PairPotentialSpec, grid: GridSpec) -> float:
    """Depth whose relative ground energy equals ``-1/a^2``."""
    b = potential.range(params.a)
    target = -1.0 / params.a ** 2
    f = lambda V0: ground_energy(grid, potential, V0, b) - target
    lo, hi = 0.0, 1.0 / b ** 2
    while f(hi) > 0:
        hi *= 2.0
        if hi > 1e6 / b ** 2:
            raise NoBoundState("no depth reaches the target binding energy")
    return brentq(f, lo, hi, xtol=1e-14 * hi, rtol=1e-13)


def scattering_length(potential: PairPotentialSpec, depth: float, b: float) -> float:
    """Zero-energy free-space scattering length of the well (diagnostic)."""
    rmax = 12.0 * b
    # u'' = V(r) u in relative units (2 mu / hbar^2 = 1)
    sol = solve_ivp(lambda r, y: [y[1], potential(r, depth, b) * y[0]],
                    (0.0, rmax), [0.0, 1.0], rtol=1e-11, atol=1e-14)
    u, du = sol.y[0, -1], sol.y[1, -1]
    return float(rmax - u / du)


def solve_two_body(params: PhysicalParams, potential: PairPotentialSpec = PairPotentialSpec(),
                   grid: GridSpec = GridSpec(), l_max: int = 0, n_states: int = 3,
                   drift_tol: float | None = None):
    """Relative-motion eigenpairs per channel l = 0..l_max.

    The potential depth is calibrated unless given.  If ``drift_tol`` is set,
    the ground energy is recomputed on a grid of half the resolution and a
    :class:`GridTooCoarse` error is raised when the two differ by more than
    ``drift_tol`` relative.
    """
    if l_max < 0:
        raise SpectrumError("l_max must be >= 0")
    b = potential.range(params.a)
    depth = calibrate_depth(params, potential, grid) if potential.depth is None else potential.depth
    r, h = grid.r, grid.h
    out = []
    for l in range(l_max + 1):
        w, v = _radial_eigs(r, h, relative_hamiltonian_diag(r, l, potential, depth, b), n_states)
        out.append(RadialSolution(l, r, v, w, {"depth": depth, "range": b}))
    if depth > 0 and out[0].energies[0] >= 0:
        raise NoBoundState(f"ground energy {out[0].energies[0]:.6g} is not bound")
    if drift_tol is not None:
        coarse = GridSpec(max(4, grid.points // 2), grid.extent)
        e2 = ground_energy(coarse, potential, depth, b)
        drift = abs(e2 - out[0].energies[0]) / max(1.0, abs(out[0].energies[0]))
        out[0].meta["grid_drift"] = drift
        if drift > drift_tol:
            raise GridTooCoarse(f"ground energy drifts by {drift:.3e} under grid halving")
    return out


def refinement_sequence(params, potential=PairPotentialSpec(), points=(32, 64, 128, 256, 512),
                        extent: float = 10.0, depth: float | None = None):
    """Ground energies for a fixed potential on successively finer grids."""
    b = potential.range(params.a)
    if depth is None:
        depth = calibrate_depth(params, potential, GridSpec(max(points), extent))
    return np.array([ground_energy(GridSpec(p, extent), potential, depth, b) for p in points])


# ---------------------------------------------------------------------------
# Schmidt decomposition
# ---------------------------------------------------------------------------

@dataclass
class PairKernel:
    """Isotropic two-particle amplitude ``psi(r_a, r_b, r)``.

    ``r`` is the interparticle distance.  ``r_cut`` bounds the support in r
    (``inf`` for none).
    """

    psi: object
    r_cut: float = math.inf
    label: str = "kernel"
    scale: float = 1.0       # shortest length on which psi varies


def pair_kernel(solution: RadialSolution, scale: float | None = None) -> PairKernel:
    """Centre-of-mass ground state times the relative ground state."""
    r, u = solution.r, solution.u[:, 0]
    rr = np.concatenate([[0.0], r, [r[-1] + (r[1] - r[0])]])
    uu = np.concatenate([[0.0], u, [0.0]])
    spline = CubicSpline(rr, uu)
    big = np.abs(u).max()
    support = r[np.abs(u) > 1e-10 * big]
    r_cut = float(min(support[-1] + 2 * (r[1] - r[0]), rr[-1]))
    if scale is None:
        scale = solution.meta.get("range", 1.0)
    norm_cm = (2.0 / math.pi) ** 0.75
    inv_4pi = 1.0 / math.sqrt(4.0 * math.pi)

    def psi(ra, rb, x):
        R2 = 0.5 * (ra ** 2 + rb ** 2) - 0.25 * x ** 2
        g = spline(x) / x * inv_4pi
        return norm_cm * np.exp(-R2) * g

    return PairKernel(psi, r_cut, "trap-pair", scale)


def mehler_kernel(c: float) -> PairKernel:
    """``psi ~ exp(-(r_a^2 + r_b^2)/2 - c r_a.r_b)``, normalised, |c| < 1."""
    if not abs(c) < 1:
        raise SpectrumError("Mehler squeezing must satisfy |c| < 1")
    norm = (math.sqrt(1.0 - c * c) / math.pi) ** 1.5

    def psi(ra, rb, x):
        dot = 0.5 * (ra ** 2 + rb ** 2 - x ** 2)
        return norm * np.exp(-0.5 * (ra ** 2 + rb ** 2) - c * dot)

    return PairKernel(psi, math.inf, f"mehler(c={c})", 1.0)


def mehler_lambdas(c: float, n_max: int = 40):
    """Closed-form shells ``(n, l, lambda)``: lambda = (1-q)^3 q^(2n+l)."""
    q = ((1.0 - math.sqrt(1.0 - c * c)) / c) ** 2 if c else 0.0
    out = []
    for n in range(n_max):
        for l in range(2 * n_max):
            out.append((n, l, (1.0 - q) ** 3 * q ** (2 * n + l)))
    return q, out


@numba.njit(cache=True)
def _project(cos, f, l_min, l_max, out):
    """out[l - l_min, p] = sum_q P_l(cos[p, q]) f[p, q] for l_min <= l <= l_max."""
    npair, nq = cos.shape
    for p in range(npair):
        for q in range(nq):
            x = cos[p, q]
            w = f[p, q]
            p0 = 1.0
            p1 = x
            if l_min == 0:
                out[0, p] += w
            if l_min <= 1 <= l_max:
                out[1 - l_min, p] += w * x
            for l in range(2, l_max + 1):
                p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l
                if l >= l_min:
                    out[l - l_min, p] += w * p2
                p0 = p1
                p1 = p2


_NODE_CLASSES = (32, 64, 128, 256, 512, 1024)
L_BLOCK = 64
L_CAP = 1024


def _nodes_needed(ra, rb, lo, hi, l_max, scale):
    th_lo = np.arccos(np.clip((ra ** 2 + rb ** 2 - lo ** 2) / (2 * ra * rb), -1, 1))
    th_hi = np.arccos(np.clip((ra ** 2 + rb ** 2 - hi ** 2) / (2 * ra * rb), -1, 1))
    osc = l_max * (th_hi - th_lo) / math.pi
    return 1.5 * osc + 4.0 * (hi - lo) / scale + 24.0


def channel_kernels(kernel: PairKernel, r: np.ndarray, l_max: int, nq: int | None = None,
                    scale: float | None = None, l_min: int = 0):
    """Band-stored ``k_l(r_i, r_j)`` for i <= j and l = l_min..l_max.

    ``k_l = 2 pi int_{|ra-rb|}^{min(ra+rb, r_cut)} x psi(ra, rb, x) P_l(cos) dx``,
    by Gauss-Legendre in x.  With ``nq=None`` the node count per pair is
    chosen from the number of P_l oscillations over the angular span and
    the kernel's length ``scale``.  Returns ``(I, J, K)`` with
    ``K.shape == (l_max - l_min + 1, len(I))``.
    """
    if not 0 <= l_min <= l_max:
        raise SpectrumError("need 0 <= l_min <= l_max")
    n = r.size
    I, J = np.triu_indices(n)
    ra, rb = r[I], r[J]
    lo = np.abs(ra - rb)
    hi = np.minimum(ra + rb, kernel.r_cut)
    keep = hi > lo
    I, J, ra, rb, lo, hi = I[keep], J[keep], ra[keep], rb[keep], lo[keep], hi[keep]
    nl = l_max - l_min + 1
    K = np.zeros((nl, I.size))
    if nq is None:
        need = _nodes_needed(ra, rb, lo, hi, l_max, scale or kernel.scale)
        cls = np.searchsorted(_NODE_CLASSES, need).clip(0, len(_NODE_CLASSES) - 1)
    else:
        cls = np.full(I.size, -1)
    for c in np.unique(cls):
        m = nq if c < 0 else _NODE_CLASSES[c]
        xg, wg = np.polynomial.legendre.leggauss(m)
        sel = np.flatnonzero(cls == c)
        chunk = max(1, min(4_000_000 // m, 20_000_000 // nl))
        for s in range(0, sel.size, chunk):
            ix = sel[s:s + chunk]
            a_, b_ = ra[ix, None], rb[ix, None]
            half = 0.5 * (hi[ix] - lo[ix])[:, None]
            x = 0.5 * (hi[ix] + lo[ix])[:, None] + half * xg[None, :]
            cos = np.clip((a_ ** 2 + b_ ** 2 - x ** 2) / (2 * a_ * b_), -1.0, 1.0)
            f = x * kernel.psi(a_, b_, x) * (half * wg[None, :]) * (2.0 * math.pi)
            out = np.zeros((nl, ix.size))
            _project(np.ascontiguousarray(cos), np.ascontiguousarray(f), l_min, l_max, out)
            K[:, ix] = out
    return I, J, K


def channel_weights(I, J, K, h, l_min: int = 0):
    """(2l+1) * ||k_l||_F^2 h^2 per channel from band storage."""
    mult = np.where(I == J, 1.0, 2.0)
    l = l_min + np.arange(K.shape[0])
    return (2 * l + 1) * (K ** 2 @ mult) * h * h


def schmidt_decompose(kernel: PairKernel, grid: GridSpec, l_max: int | None = None,
                      nq: int | None = None, energies: bool = True,
                      deficit_tol: float | None = 1e-4, keep: float | None = None,
                      provenance=None, tail: float = 1e-7,
                      l_block: int = L_BLOCK) -> SchmidtSpectrum:
    """Schmidt spectrum of an isotropic pair kernel on a uniform radial grid.

    Each channel matrix ``k_l h`` is diagonalised (symmetric); the squared
    eigenvalues are the coefficients of the 2l+1 states of that channel.
    Channels are projected ``l_block`` at a time.  With ``l_max=None`` the
    expansion stops at (and includes) the first channel whose weight is
    below ``tail``.
    """
    if l_max is not None and l_max < 0:
        raise SpectrumError("l_max must be >= 0")
    r, h = grid.r, grid.h
    shells = []
    A = np.zeros((r.size, r.size))
    top = L_CAP if l_max is None else l_max
    l0, last_w, done = 0, float("nan"), False
    while l0 <= top and not done:
        l1 = min(l0 + l_block - 1, top)
        I, J, K = channel_kernels(kernel, r, l1, nq, l_min=l0)
        w = channel_weights(I, J, K, h, l0)
        for i, l in enumerate(range(l0, l1 + 1)):
            A[I, J] = K[i] * h
            mu, V = eigh(A, lower=False)
            lam = mu ** 2
            order = np.argsort(lam)[::-1]
            lam, V = lam[order], V[:, order]
            for n in range(lam.size):
                if lam[n] < 1e-20:
                    break
                E = _mode_energy(r, h, l, V[:, n]) if energies else float("nan")
                shells.append(Shell(n, l, float(lam[n]), E))
            last_w, l_done = float(w[i]), l
            if l_max is None and w[i] < tail:
                done = True
                break
        del K
        l0 = l1 + 1
    if l_max is None and not done:
        raise SpectrumError(f"partial-wave weight above {tail:g} up to l={L_CAP}")
    prov = {"kind": "solver", "kernel": kernel.label, "grid_points": grid.points,
            "grid_extent": grid.extent, "l_max": l_done, "quadrature": nq or "adaptive",
            "last_channel_weight": last_w}
    if l_max is None:
        prov["channel_tail"] = tail
    prov.update(provenance or {})
    kw = {} if keep is None else {"keep": keep}
    return from_shells(shells, prov, deficit_tol=deficit_tol, sort=energies, **kw)


def _mode_energy(r, h, l, v):
    """<h_sp> = <-lap/2 + r^2/2> of a radial mode u(r) sampled on the grid."""
    u = v / math.sqrt(np.sum(v * v))
    up = np.concatenate([[0.0], u, [0.0]])
    lap = (up[2:] - 2 * up[1:-1] + up[:-2]) / h ** 2
    return float(np.sum(u * (-0.5 * lap + (0.5 * l * (l + 1) / r ** 2 + 0.5 * r ** 2) * u)))


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def preset_params(name: str) -> PhysicalParams:
    if name not in PRESETS:
        raise SpectrumError(f"unknown preset {name!r}; choose from {PRESETS}")
    return PhysicalParams.from_inv_kfa(float(name), N=PRESET_N)


def preset_path(name: str):
    """Location of the shipped spectrum for preset ``name``."""
    if name not in PRESETS:
        raise SpectrumError(f"unknown preset {name!r}; choose from {PRESETS}")
    return resources.files("coboson") / "data" / f"preset_{name}.shells.csv.gz"


@lru_cache(maxsize=3)
def load_preset(name: str) -> SchmidtSpectrum:
    """Shipped solver spectrum for (k_F a)^-1 = name (cached per process)."""
    path = preset_path(name)
    if not path.is_file():
        raise SpectrumError(f"preset {name!r} data missing at {path}; "
                            "regenerate with `coboson spectrum solve --preset`")
    with resources.as_file(path) as f:
        return read_spectrum(f)


def solver_spectrum(params: PhysicalParams, potential: PairPotentialSpec = PairPotentialSpec(),
                    rel_points: int | None = None, sp_points: int | None = None,
                    l_max: int | None = None, tail: float = 1e-7,
                    deficit_tol: float = 1e-5, keep: float | None = None) -> SchmidtSpectrum:
    """Full pipeline: calibrate, solve, decompose.

    Grids scale with the pair size a: the relative grid resolves the well
    range, the single-particle grid resolves the bound-state width.  With
    ``l_max=None`` channels are added until one carries less than ``tail``.
    """
    a = params.a
    b = potential.range(a)
    rel_points = rel_points or int(min(40000, max(4000, 10.0 / (b / 12.0))))
    rel = GridSpec(rel_points, 10.0)
    sols = solve_two_body(params, potential, rel, l_max=0, n_states=1)
    kern = pair_kernel(sols[0])
    h_sp = min(a / 5.0, 0.05)
    extent = 5.5
    sp = GridSpec(sp_points or int(extent / h_sp), extent)
    meta = {"a": a, "inv_kfa": params.inv_kfa, "N_ref": params.N, "L": params.L,
            "potential": asdict(potential), "depth": sols[0].meta["depth"],
            "range": b, "relative_ground_energy": float(sols[0].energies[0]),
            "a_scatt_diagnostic": scattering_length(potential, sols[0].meta["depth"], b),
            "rel_grid_points": rel_points, "model": "gaussian-well stand-in"}
    return schmidt_decompose(kern, sp, l_max, provenance=meta, deficit_tol=deficit_tol,
                             keep=keep, tail=tail)
