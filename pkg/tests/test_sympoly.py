import math
import warnings

import numpy as np
import pytest
from scipy.special import gammaln

from coboson import sympoly as sp
from coboson.spectrum import from_shells, Shell, synth_spectrum

LAM3 = np.array([0.5, 0.3, 0.2])


def test_chi_table_examples():
    t = sp.chi_table(LAM3, 2)
    assert t.e(2) == pytest.approx(0.31, rel=1e-14)
    assert math.exp(t.log_chi(2)) == pytest.approx(0.62, rel=1e-14)
    assert sp.chi_table(synth_spectrum("flat", 4), 2).e(2) == pytest.approx(0.375, rel=1e-14)
    t = sp.chi_table(LAM3, 4)
    assert t.log_e[3] > -np.inf and t.log_e[4] == -np.inf
    assert t.method == "dp" and t.log_e[0] == 0.0


def test_power_sums_examples():
    assert sp.power_sums(LAM3, 3).M(2) == pytest.approx(0.38, rel=1e-14)
    ps = sp.power_sums(synth_spectrum("flat", 7), 5)
    for m in range(1, 6):
        assert ps.M(m) == pytest.approx(7.0 ** (1 - m), rel=1e-13)
    ps = sp.power_sums([1.0], 4)
    assert all(ps.M(m) == 1.0 for m in range(1, 5))


def test_power_sums_decreasing():
    lam = np.random.default_rng(1).random(50)
    ps = sp.power_sums(lam / lam.sum(), 30)
    assert np.all(np.diff(ps.log_M[1:]) < 0)
    assert abs(ps.M(1) - 1) < 1e-12


def test_newton_examples():
    t = sp.chi_newton(sp.power_sums(LAM3, 2), 2)
    assert t.method == "newton"
    assert t.e(2) == pytest.approx(0.31, rel=1e-14)
    assert sp.chi_newton(sp.power_sums(LAM3, 1), 1).e(1) == pytest.approx(1.0, rel=1e-15)
    assert sp.chi_newton(sp.power_sums(synth_spectrum("flat", 4), 4), 4).e(4) == pytest.approx(
        1 / 256, rel=1e-12)


def test_newton_falls_back_on_cancellation():
    flat = np.full(300, 1 / 300)
    with pytest.warns(sp.CancellationWarning):
        t = sp.chi_newton(sp.power_sums(flat, 200), 200)
    assert t.method.startswith("newton->")
    ref = gammaln(301) - gammaln(201) - gammaln(101) - 200 * math.log(300)
    assert t.log_e[200] == pytest.approx(ref, rel=1e-12)


def test_leave_one_out_examples():
    t = sp.chi_table(LAM3, 3)
    loo = sp.chi_leave_one_out(t, 0.5)
    assert loo.e(1) == pytest.approx(0.5, rel=1e-14)
    assert loo.e(2) == pytest.approx(0.06, rel=1e-13)
    assert loo.log_e[3] == -np.inf
    assert loo.e(2) + 0.5 * loo.e(1) == pytest.approx(t.e(2), rel=1e-14)
    one = sp.chi_leave_one_out(sp.chi_table([1.0], 3), 1.0)
    assert one.log_e[0] == 0.0 and np.all(one.log_e[1:] == -np.inf)


def test_leave_one_out_fallback_recorded():
    # the dominant coefficient of a steep spectrum forces the exact path
    lam = 0.5 ** np.arange(40)
    lam /= lam.sum()
    t = sp.chi_table(lam, 30)
    loo = sp.chi_leave_one_out(t, float(lam[0]), index=0)
    ref = sp.chi_table(lam[1:], 30)
    assert np.allclose(loo.log_e, ref.log_e, rtol=1e-12, atol=0)
    assert loo.method == "dp-loo-exact" and loo.notes


def test_leave_one_out_identity_residual_random():
    rng = np.random.default_rng(7)
    for _ in range(20):
        lam = rng.random(60) ** 3
        lam /= lam.sum()
        K = 25
        t = sp.chi_table(lam, K)
        j = int(rng.integers(60))
        loo = sp.chi_leave_one_out(t, float(lam[j]), index=j)
        e, ej = np.exp(t.log_e), np.exp(loo.log_e)
        res = np.abs(e[1:] - ej[1:] - lam[j] * ej[:-1]) / e[1:]
        assert res.max() < 1e-8
        assert np.all(ej >= 0)


def test_subset_examples():
    t = sp.chi_subset(LAM3, {1}, 2)
    assert t.e(1) == pytest.approx(0.5) and t.log_e[2] == -np.inf
    assert sp.chi_subset(LAM3, {2, 3}, 2).e(2) == pytest.approx(0.06, rel=1e-14)
    t = sp.chi_subset(LAM3, set(), 3)
    assert t.log_e[0] == 0.0 and np.all(t.log_e[1:] == -np.inf)
    with pytest.raises(IndexError):
        sp.chi_subset(LAM3, {0}, 2)


def test_vandermonde_split():
    rng = np.random.default_rng(3)
    lam = rng.random(200)
    lam /= lam.sum()
    K = 80
    full = sp.chi_table(lam, K).log_e
    for cut in (1, 37, 150):
        both = sp.log_convolve(sp.chi_table(lam[:cut], K), sp.chi_table(lam[cut:], K), K)
        assert np.max(np.abs(np.expm1(both[1:] - full[1:]))) < 1e-9


def test_newton_inequality_and_order_bound():
    rng = np.random.default_rng(5)
    for S in (5, 40):
        lam = rng.random(S)
        t = sp.chi_table(lam / lam.sum(), S + 3)
        assert sp.newton_inequality_ok(t)
        assert np.all(t.log_e[S + 1:] == -np.inf)


def test_dp_vs_newton_small_sweep():
    rng = np.random.default_rng(11)
    for _ in range(30):
        S = int(rng.integers(2, 400))
        lam = rng.random(S) ** rng.uniform(0.5, 3)
        lam /= lam.sum()
        K = int(min(S, rng.integers(1, 200)))
        dp = sp.chi_table(lam, K)
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            nt = sp.chi_newton(sp.power_sums(lam, K), K)
        if nt.method != "newton":
            assert w
            continue
        ok = np.isfinite(dp.log_e)
        assert np.max(np.abs(np.expm1(nt.log_e[ok] - dp.log_e[ok]))) < 1e-8


def test_block_parallel_matches_single(monkeypatch):
    rng = np.random.default_rng(2)
    lam = rng.random(30000)
    lam /= lam.sum()
    monkeypatch.setenv(sp.THREADS_ENV, "1")
    a = sp.chi_table(lam, 60).log_e
    monkeypatch.setenv(sp.THREADS_ENV, "4")
    b = sp.chi_table(lam, 60).log_e
    assert np.max(np.abs(a - b)) < 1e-12


def test_shell_hybrid_matches_expansion():
    # many degenerate shells with a slowly decaying tail
    n = np.arange(400)
    shells = [Shell(int(k), int(k % 7), float(0.97 ** k), float(k)) for k in n]
    spec = from_shells(shells)
    K = 50
    hyb = sp.chi_shells(spec.shell_lambdas, spec.degeneracy, K, head=200)
    full = sp.chi_table(spec.lambdas, K)
    assert hyb.method == "dp+newton-tail"
    assert np.max(np.abs(hyb.log_e - full.log_e)) < 1e-10
    # a degenerate spectrum is routed through the shell path by default
    assert sp.chi_table(spec, K).rank == spec.S


def test_shell_leave_one_out_uses_shell_index():
    spec = from_shells([Shell(0, 0, 0.3, 1.0), Shell(0, 1, 0.1, 2.0), Shell(1, 2, 0.02, 3.0)])
    t = sp.chi_table(spec, 6)
    loo = sp.chi_leave_one_out(t, 0.1, index=1)
    ref = sp.chi_table(np.delete(spec.lambdas, 1), 6)
    assert np.allclose(loo.log_e, ref.log_e, rtol=1e-12)


def test_fingerprint_sensitivity():
    a = sp.fingerprint([0.5, 0.5])
    assert a == sp.fingerprint(np.array([0.5, 0.5]))
    assert a != sp.fingerprint([0.5, 0.5], [1, 3])
    assert sp.chi_table(LAM3, 2).fingerprint == sp.fingerprint(LAM3)


def test_require_range():
    with pytest.raises(sp.RangeError):
        sp.chi_table(LAM3, 2).require(5)
    with pytest.raises(ValueError):
        sp.chi_table(LAM3, -1)
