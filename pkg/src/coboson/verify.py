"""Oracle equivalence sweep: closed-form paths against exhaustive enumeration.

Used by ``coboson verify`` and the test-suite.  Every closed-form observable
of ensemble/splitting/bell is compared with its explicit Fock-space
counterpart from :mod:`coboson.oracle` over random spectra.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bell, ensemble, oracle, splitting


@dataclass
class Check:
    name: str
    tol: float
    worst: float = 0.0
    count: int = 0
    failures: list = field(default_factory=list)

    def add(self, err: float, where):
        self.count += 1
        if not err <= self.worst:
            self.worst = err
        if not err <= self.tol:
            self.failures.append((where, err))

    @property
    def ok(self) -> bool:
        return not self.failures and self.count > 0

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (f"{status} {self.name}: {self.count} comparisons, worst {self.worst:.3e} "
                f"(tol {self.tol:g})")


def random_spectrum(rng: np.random.Generator, S: int) -> np.ndarray:
    """Positive normalised spectrum with a random degree of concentration."""
    lam = rng.random(S) ** rng.uniform(0.3, 4.0) + 1e-3
    return lam / math.fsum(lam.tolist())


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def equivalence_suite(n_spectra: int = 100, seed: int = 0, S_values=range(2, 7),
                      N_values=(2, 3), tol: float = 1e-10, chsh_S_max: int = 5) -> dict:
    """Run the sweep; returns ``{name: Check}``."""
    rng = np.random.default_rng(seed)
    checks = {k: Check(k, t) for k, t in [
        ("purity", tol), ("occupation", tol), ("counts", tol), ("joint_counts", tol),
        ("chsh", tol), ("operators", 1e-12), ("purity_symmetry", tol), ("purity_bound", 1e-12)]}
    for S in S_values:
        for N in N_values:
            if N > S:
                continue
            for r in range(n_spectra):
                lam = random_spectrum(rng, S)
                where = (S, N, r)
                ens = ensemble.make_ensemble(lam, N, K=2 * N)
                st = oracle.build_coboson_state(lam, N)
                D = ensemble.occupations(ens)
                checks["occupation"].add(float(np.max(np.abs(D - oracle.brute_occupation(st)))), where)
                for t in range(1, S + 1):
                    err = np.max(np.abs(ensemble.count_distribution(ens, t) - oracle.brute_counts(st, t)))
                    checks["counts"].add(float(err), where + (t,))
                P = {}
                for M in range(N + 1):
                    sst = oracle.build_split_state(lam, N, M)
                    P[M] = splitting.purity(ens, M)
                    checks["purity"].add(_rel(P[M], oracle.brute_purity(sst)), where + (M,))
                    checks["purity_bound"].add(max(0.0, 1.0 / math.comb(N, M) - P[M]), where + (M,))
                    t = int(rng.integers(1, S + 1))
                    J = splitting.joint_count_distribution(ens, M, t)
                    checks["joint_counts"].add(float(np.max(np.abs(J - oracle.brute_joint_counts(sst, t)))),
                                               where + (M, t))
                    if S > chsh_S_max:
                        continue
                    for j in range(1, S + 1):
                        ref = oracle.brute_chsh(sst, j)
                        c = bell.chsh_correlators(N=N, M=M, D=ensemble.occupation(ens, j),
                                                  empty=ensemble.vacancy(ens, j)).as_dict()
                        checks["chsh"].add(max(abs(ref[k] - c[k]) for k in ref), where + (M, j))
                        if 0 < M < N:
                            res = oracle.operator_checks(sst, j)
                            checks["operators"].add(max(res.values()), where + (M, j))
                for M in range(N + 1):
                    checks["purity_symmetry"].add(abs(P[M] - P[N - M]), where + (M,))
    return checks


def run(n_spectra: int = 100, seed: int = 0, echo=print, s_max: int = 6, n_max: int = 3) -> bool:
    # refuse up front rather than half-way through a long sweep
    oracle._cap(s_max, n_max)
    checks = equivalence_suite(n_spectra, seed, S_values=range(2, s_max + 1),
                               N_values=range(2, n_max + 1))
    for c in checks.values():
        echo(c.line())
        for where, err in c.failures[:5]:
            echo(f"    at {where}: {err:.3e}")
    return all(c.ok for c in checks.values())
