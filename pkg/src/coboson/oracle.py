"""Exhaustive small-instance reference: explicit Fock states and dense algebra.

Nothing here uses symmetric-polynomial shortcuts; states are built
configuration by configuration and normalised numerically.  Configurations
are 1-based index tuples in lexicographic order.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

S_CAP = 14
N_CAP = 6


class OracleCapError(ValueError):
    """Instance exceeds the exhaustive-enumeration caps."""


def _cap(S: int, N: int | None = None):
    if S > S_CAP:
        raise OracleCapError(f"S={S} exceeds oracle cap {S_CAP}")
    if N is not None and N > N_CAP:
        raise OracleCapError(f"N={N} exceeds oracle cap {N_CAP}")


@dataclass(frozen=True)
class FockBasis:
    S: int
    n: int
    configs: tuple

    def __len__(self):
        return len(self.configs)

    def index(self):
        return {c: i for i, c in enumerate(self.configs)}


@dataclass(frozen=True)
class DensityMatrix:
    rho: np.ndarray
    basis: FockBasis

    def trace(self) -> float:
        return float(np.trace(self.rho))

    def purity(self) -> float:
        return float(np.sum(self.rho * self.rho.conj()).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.rho)


def enumerate_states(S: int, n: int) -> FockBasis:
    """All n-subsets of {1..S}, lexicographic."""
    _cap(S)
    if not 0 <= n <= S:
        raise ValueError(f"need 0 <= n <= S (got n={n}, S={S})")
    return FockBasis(S, n, tuple(itertools.combinations(range(1, S + 1), n)))


def _lam(spectrum):
    lam = np.asarray(getattr(spectrum, "lambdas", spectrum), dtype=float)
    if lam.ndim != 1 or np.any(lam < 0):
        raise ValueError("spectrum must be a nonnegative sequence")
    return lam


def _weight(lam, conf):
    return math.prod(math.sqrt(lam[j - 1]) for j in conf)


@dataclass(frozen=True)
class CobosonState:
    basis: FockBasis
    amp: np.ndarray


@dataclass(frozen=True)
class SplitState:
    """Amplitudes ``psi[i1, i2]`` over mode-1 x mode-2 configurations."""

    basis1: FockBasis
    basis2: FockBasis
    psi: np.ndarray
    N: int
    M: int


def build_coboson_state(spectrum, N: int) -> CobosonState:
    lam = _lam(spectrum)
    _cap(lam.size, N)
    B = enumerate_states(lam.size, N)
    amp = np.array([_weight(lam, c) for c in B.configs])
    nrm = math.sqrt(math.fsum((amp ** 2).tolist()))
    if nrm == 0:
        raise ValueError("state vanishes (N exceeds the Schmidt rank)")
    return CobosonState(B, amp / nrm)


def build_split_state(spectrum, N: int, M: int) -> SplitState:
    """Projected splitter output with M pairs in mode 1 (Pauli across both modes)."""
    lam = _lam(spectrum)
    _cap(lam.size, N)
    if not 0 <= M <= N:
        raise ValueError(f"M={M} outside 0..N={N}")
    B1, B2 = enumerate_states(lam.size, M), enumerate_states(lam.size, N - M)
    psi = np.zeros((len(B1), len(B2)))
    for i, c1 in enumerate(B1.configs):
        s1 = set(c1)
        w1 = _weight(lam, c1)
        for k, c2 in enumerate(B2.configs):
            if s1.isdisjoint(c2):
                psi[i, k] = w1 * _weight(lam, c2)
    nrm = math.sqrt(math.fsum((psi.ravel() ** 2).tolist()))
    if nrm == 0:
        raise ValueError("state vanishes (N exceeds the Schmidt rank)")
    return SplitState(B1, B2, psi / nrm, N, M)


def reduced_density(state: SplitState) -> DensityMatrix:
    """Partial trace over mode 2."""
    return DensityMatrix(state.psi @ state.psi.T, state.basis1)


def brute_purity(state: SplitState) -> float:
    return reduced_density(state).purity()


def brute_occupation(state: CobosonState) -> np.ndarray:
    """D_j = <n_j>/N for j = 1..S."""
    S, N = state.basis.S, state.basis.n
    occ = np.zeros(S)
    p = state.amp ** 2
    for c, w in zip(state.basis.configs, p):
        for j in c:
            occ[j - 1] += w
    return occ / N


def brute_counts(state: CobosonState, t: int) -> np.ndarray:
    """P(n) of finding n pairs among states 1..t, n = 0..N."""
    N = state.basis.n
    P = np.zeros(N + 1)
    for c, w in zip(state.basis.configs, state.amp ** 2):
        P[sum(1 for j in c if j <= t)] += w
    return P


def brute_joint_counts(state: SplitState, t: int) -> np.ndarray:
    """P_12[n1, n2]: n_q pairs of mode q among states 1..t."""
    P = np.zeros((state.M + 1, state.N - state.M + 1))
    n1 = [sum(1 for j in c if j <= t) for c in state.basis1.configs]
    n2 = [sum(1 for j in c if j <= t) for c in state.basis2.configs]
    p = state.psi ** 2
    for i in range(p.shape[0]):
        for k in range(p.shape[1]):
            if p[i, k]:
                P[n1[i], n2[k]] += p[i, k]
    return P


# ---------------------------------------------------------------------------
# CHSH operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChshOperators:
    Z1: np.ndarray
    Z2: np.ndarray
    X1: np.ndarray
    X2: np.ndarray
    frame: np.ndarray   # columns: normalised oe, eo, ee, oo components


def _occupied(basis: FockBasis, j: int) -> np.ndarray:
    return np.array([j in c for c in basis.configs])


def chsh_operators(state: SplitState, j: int) -> ChshOperators:
    """Z_q = 1 - 2 n_{q,j} on the product basis; X_q flips the occupancy of j.

    The split state has components with j occupied in mode 1 (oe), in mode 2
    (eo) or in neither (ee); Pauli exclusion leaves oo empty.  X_q is the
    bit flip of mode q on the orthonormal frame spanned by the normalised
    components (plus a fixed unit vector in the oo class).
    """
    o1 = _occupied(state.basis1, j)
    o2 = _occupied(state.basis2, j)
    d1, d2 = len(state.basis1), len(state.basis2)
    z1 = np.where(o1, -1.0, 1.0)
    z2 = np.where(o2, -1.0, 1.0)
    Z1 = np.diag(np.kron(z1, np.ones(d2)))
    Z2 = np.diag(np.kron(np.ones(d1), z2))
    psi = state.psi
    classes = {"oe": np.outer(o1, ~o2), "eo": np.outer(~o1, o2),
               "ee": np.outer(~o1, ~o2), "oo": np.outer(o1, o2)}
    frame = []
    for key in ("oe", "eo", "ee", "oo"):
        mask = classes[key]
        comp = np.where(mask, psi, 0.0)
        nrm = np.linalg.norm(comp)
        if nrm == 0.0:
            # fixed representative when the component is absent
            comp = np.zeros_like(psi)
            if mask.any():
                idx = np.argwhere(mask)[0]
                comp[tuple(idx)] = 1.0
            nrm = np.linalg.norm(comp)
        frame.append((comp / nrm).ravel() if nrm else comp.ravel())
    V = np.array(frame).T
    # qubit order (mode1, mode2) with o=1, e=0: oe=|10>, eo=|01>, ee=|00>, oo=|11>
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    I2 = np.eye(2)
    # rows/cols of the 2-qubit basis |00>,|01>,|10>,|11> mapped onto frame columns
    perm = [2, 1, 0, 3]  # |00>=ee, |01>=eo, |10>=oe, |11>=oo
    W = V[:, perm]
    X1 = W @ np.kron(sx, I2) @ W.T
    X2 = W @ np.kron(I2, sx) @ W.T
    return ChshOperators(Z1, Z2, X1, X2, V)


def brute_chsh(state: SplitState, j: int) -> dict:
    """Correlators from explicit operator matrices."""
    ops = chsh_operators(state, j)
    v = state.psi.ravel()
    r2 = math.sqrt(2.0)
    S = (ops.X2 - ops.Z2) / r2
    T = (ops.X2 + ops.Z2) / r2
    ev = lambda A, B: float(v @ (A @ (B @ v)))
    QS, RS, RT, QT = ev(ops.Z1, S), ev(ops.X1, S), ev(ops.X1, T), ev(ops.Z1, T)
    return {"QS": QS, "RS": RS, "RT": RT, "QT": QT, "M": QS + RS + RT - QT}


def operator_checks(state: SplitState, j: int) -> dict:
    """Residuals of X^2 = 1 and {X, Z} = 0 on the effective frame."""
    ops = chsh_operators(state, j)
    V = ops.frame
    out = {}
    for q, (X, Z) in enumerate(((ops.X1, ops.Z1), (ops.X2, ops.Z2)), start=1):
        out[f"X{q}^2-1"] = float(np.abs(V.T @ X @ X @ V - np.eye(4)).max())
        out[f"{{X{q},Z{q}}}"] = float(np.abs(V.T @ (X @ Z + Z @ X) @ V).max())
    return out
