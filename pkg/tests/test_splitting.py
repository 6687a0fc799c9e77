import math

import numpy as np
import pytest

from coboson import splitting as sp
from coboson.ensemble import make_ensemble
from coboson.spectrum import synth_spectrum
from coboson.sympoly import RangeError, chi_table
from coboson.ensemble import EnsembleSpec

LAM3 = (0.5, 0.3, 0.2)
LAM4 = (0.4, 0.3, 0.2, 0.1)


def test_split_amplitudes():
    assert np.allclose(sp.split_amplitudes(2, 0.5) ** 2, [0.25, 0.5, 0.25], atol=1e-15)
    a = sp.split_amplitudes(5, 1.0)
    assert a[-1] == 1.0 and np.all(a[:-1] == 0)
    p = sp.split_amplitudes(4, 0.3) ** 2
    ref = [math.comb(4, m) * 0.3 ** m * 0.7 ** (4 - m) for m in range(5)]
    assert np.allclose(p, ref, atol=1e-15)
    assert math.fsum(p.tolist()) == pytest.approx(1.0, abs=1e-12)


def test_split_config():
    c = sp.SplitConfig(0.3, 1, 3)
    assert c.R + c.T == 1.0
    with pytest.raises(ValueError):
        sp.SplitConfig(1.5, 1, 3)
    with pytest.raises(ValueError):
        sp.SplitConfig(0.5, 4, 3)


def test_alpha_examples():
    assert sp.alpha_coeffs(2, 1).alpha[0] == pytest.approx(0.5, abs=1e-12)
    assert np.all(sp.alpha_coeffs(2, 0).alpha[:1] == 0)
    for N in range(2, 9):
        for M in range(N + 1):
            a, b = sp.alpha_coeffs(N, M), sp.alpha_coeffs(N, N - M)
            assert np.array_equal(a.alpha, b.alpha)


def test_alpha_double_bound_is_honest():
    for N, M in [(4, 2), (6, 3), (10, 3), (20, 10), (40, 17)]:
        d, rel = sp._alpha_double(N, M)
        e = sp._alpha_exact(N, M)
        m = np.flatnonzero(e.sign[: N - 1] != 0)
        err = np.max(np.abs(np.expm1(d.log_a[m] - e.log_a[m]))) if m.size else 0.0
        assert err <= max(rel, 1e-13)
        assert sp.alpha_coeffs(N, M).method == ("double" if rel <= sp.DOUBLE_REL_TOL else "exact")


def test_alpha_positive_large_N():
    c = sp.alpha_coeffs(120, 60)
    assert c.method == "exact"
    assert np.all(c.sign[:119] > 0)


def test_alpha_integers_structure():
    A = sp.alpha_integers(7, 3)
    assert A[6] == 0  # A_{N-1} vanishes identically
    assert A[7] == math.comb(7, 3) * math.factorial(3) ** 2 * math.factorial(4) ** 2


def test_double_mode_refuses_large_N(monkeypatch):
    monkeypatch.setenv(sp.PRECISION_ENV, "double")
    with pytest.raises(sp.InstabilityError):
        sp.alpha_coeffs(80, 40)
    monkeypatch.setenv(sp.PRECISION_ENV, "bogus")
    with pytest.raises(ValueError):
        sp.alpha_coeffs(4, 2)


def test_purity_anchors():
    assert sp.purity(make_ensemble(LAM3, 2, K=4), 1) == pytest.approx(0.5, abs=1e-9)
    assert sp.purity(make_ensemble(LAM4, 2, K=4), 1) == pytest.approx(0.5587755102040816, abs=1e-12)
    assert sp.purity(make_ensemble(LAM4, 2, K=4), 0) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("N", [2, 5, 12, 20])
def test_slater_limit(N):
    ens = make_ensemble(synth_spectrum("flat", N), N, K=2 * N)
    for M in range(N + 1):
        assert sp.purity(ens, M) == pytest.approx(1 / math.comb(N, M), abs=1e-12)


def test_purity_needs_order_2N():
    spec = synth_spectrum("flat", 10)
    ens = EnsembleSpec(3, spec, chi_table(spec, 4))
    with pytest.raises(RangeError, match="6"):
        sp.purity(ens, 1)


def test_purity_bounds_and_symmetry_moderate_N():
    lam = np.random.default_rng(4).random(300) ** 2
    ens = make_ensemble(lam / lam.sum(), 30, K=60)
    P = [sp.purity(ens, M) for M in range(31)]
    for M in range(31):
        assert P[M] >= 1 / math.comb(30, M) - 1e-12
        assert P[M] <= 1.0 + 1e-12
        assert P[M] == pytest.approx(P[30 - M], abs=1e-10)


def test_log_purity_slater_extreme():
    # 1/C(600, 300) ~ 1e-179: the log path keeps full relative accuracy
    ens = make_ensemble(synth_spectrum("flat", 600), 600, K=1200)
    lp = sp.log_purity(ens, 300)
    ref = -(math.lgamma(601) - 2 * math.lgamma(301))
    assert lp == pytest.approx(ref, rel=1e-13)


def test_joint_counts_examples():
    ens = make_ensemble(LAM3, 2)
    J = sp.joint_count_distribution(ens, 1, 1)
    assert np.allclose(J, [[0.193548, 0.403226], [0.403226, 0.0]], atol=1e-6)
    assert np.allclose(sp.marginal_count(ens, 1, 1), [0.596774, 0.403226], atol=1e-6)
    J = sp.joint_count_distribution(ens, 1, 3)
    assert J[1, 1] == 1.0 and J.sum() == 1.0
    assert np.allclose(sp.marginal_count(ens, 0, 2), [1.0], atol=1e-15)


def test_joint_marginal_at_M_equals_N_is_count_distribution():
    from coboson.ensemble import count_distribution
    lam = np.random.default_rng(8).random(12)
    ens = make_ensemble(lam / lam.sum(), 4)
    J = sp.joint_count_distribution(ens, 4, 5)
    assert np.allclose(J.sum(axis=1), count_distribution(ens, 5), atol=1e-14)


def test_flat_slater_marginal_hypergeometric():
    from scipy.stats import hypergeom
    N, t, M = 8, 5, 4
    ens = make_ensemble(synth_spectrum("flat", N), N)
    P1 = sp.marginal_count(ens, M, t)
    # t of the N occupied levels in the window, M of N pairs sent to mode 1
    ref = hypergeom(N, M, t).pmf(np.arange(P1.size))
    assert np.allclose(P1, ref, atol=1e-13)
    assert np.allclose(sp.marginal_count(ens, 4, N), np.eye(5)[4], atol=1e-14)


def test_binomial_and_tv():
    b = sp.binomial_pmf(4, 0.5)
    assert np.allclose(b, np.array([1, 4, 6, 4, 1]) / 16)
    assert np.array_equal(sp.binomial_pmf(3, 0.0), [1, 0, 0, 0])
    assert np.array_equal(sp.binomial_pmf(3, 1.0), [0, 0, 0, 1])
    with pytest.raises(ValueError):
        sp.binomial_pmf(3, 1.5)
    assert sp.total_variation(b, b) == 0.0
    assert sp.total_variation([1.0], [0.0, 1.0]) == pytest.approx(1.0)
