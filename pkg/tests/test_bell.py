import math

import numpy as np
import pytest

from coboson import bell
from coboson.bell import BellSetting, FluctuatingEnsemble, OccupationError
from coboson.ensemble import make_ensemble, occupation, vacancy
from coboson import oracle

R2 = math.sqrt(2)
D1 = 0.25 / 0.62
D1_6 = 0.403226  # D_1 = 0.25/0.62 rounded to six digits


def test_three_level_example():
    c = bell.chsh_correlators(N=2, M=1, D=D1_6)
    assert c.M == pytest.approx(2.007273, abs=1e-6)
    # formula and oracle both give 0.8284670; a six-digit 0.828469 is only good to 3e-6
    assert c.QS == pytest.approx(0.828467, abs=1e-6)
    assert c.QS == pytest.approx(0.828469, abs=3e-6)
    c = bell.chsh_correlators(N=2, M=1, D=D1)
    assert c.M == pytest.approx(R2 * (6 * D1 - 1), abs=1e-15)
    assert c.M == pytest.approx(c.QS + c.RS + c.RT - c.QT, abs=1e-15)
    assert c.M == pytest.approx(bell.chsh_value(2, 1, D1), abs=1e-12)


def test_empty_state():
    c = bell.chsh_correlators(N=3, M=1, D=0.0)
    assert c.QS == pytest.approx(-R2 / 2) and c.QT == pytest.approx(R2 / 2)
    assert c.RS == 0.0 and c.RT == 0.0
    assert bell.chsh_value(3, 1, 0.0) == pytest.approx(-R2)


def test_bell_pair_reaches_tsirelson():
    ens = make_ensemble([0.5, 0.5], 2)
    D = occupation(ens, 1)
    assert 2 * D == pytest.approx(1.0, abs=1e-15)
    c = bell.chsh_correlators(N=2, M=1, D=D, empty=vacancy(ens, 1))
    assert c.M == pytest.approx(2 * R2, abs=1e-12)
    ref = oracle.brute_chsh(oracle.build_split_state([0.5, 0.5], 2, 1), 1)
    assert ref["M"] == pytest.approx(2 * R2, abs=1e-12)


def test_threshold():
    x = bell.violation_threshold()
    assert x == pytest.approx((1 + R2) / 3)
    assert bell.chsh_value(2, 1, x / 2) == pytest.approx(2.0, abs=1e-12)
    assert bell.chsh_value(2, 1, 0.806452 / 2) == pytest.approx(2.007273, abs=1e-6)
    assert bell.chsh_value(10, 5, 0.1) == pytest.approx(2 * R2)
    xu = bell.violation_threshold(False, N=7, M=2)
    assert bell.chsh_value(7, 2, xu / 7) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        bell.violation_threshold(False)


def test_balanced_identity_and_monotone():
    D = np.linspace(0, 1 / 8, 101)
    v = bell.chsh_value(8, 4, D)
    assert np.allclose(v, R2 * (3 * 8 * D - 1), atol=1e-14)
    assert np.all(np.diff(v) > 0)


def test_tsirelson_cap_dense_sweep():
    worst = -np.inf
    for N in range(1, 25):
        for M in range(N + 1):
            for x in np.linspace(0, 1, 41):
                c = bell.chsh_correlators(N=N, M=M, D=x / N)
                worst = max(worst, abs(c.M))
                for k in ("QS", "RS", "RT", "QT"):
                    assert abs(getattr(c, k)) <= R2 + 1e-12
    assert worst <= 2 * R2 + 1e-12


def test_invalid_occupation():
    with pytest.raises(OccupationError):
        bell.chsh_correlators(N=2, M=1, D=0.6)
    with pytest.raises(OccupationError):
        BellSetting(j=1, N=2, M=3, D=0.1)
    with pytest.raises(OccupationError):
        bell.chsh_value(2, 1, -0.1)


def test_setting_route_matches_keywords():
    s = BellSetting(j=1, N=2, M=1, D=D1, provenance="exact")
    assert bell.chsh_correlators(s) == bell.chsh_correlators(N=2, M=1, D=D1)


def test_correlators_match_oracle_unbalanced():
    lam = [0.4, 0.3, 0.2, 0.1]
    ens = make_ensemble(lam, 3)
    for M in range(4):
        st = oracle.build_split_state(lam, 3, M)
        for j in range(1, 5):
            ref = oracle.brute_chsh(st, j)
            c = bell.chsh_correlators(N=3, M=M, D=occupation(ens, j), empty=vacancy(ens, j)).as_dict()
            for k in ref:
                assert c[k] == pytest.approx(ref[k], abs=1e-12)


def test_fluctuating_reduces_to_deterministic():
    f = bell.chsh_fluctuating(FluctuatingEnsemble(1.0, 1.0, D1_6))
    assert f.M == pytest.approx(2.007273, abs=1e-6)
    assert all(v == 0 for v in f.errors.values())
    d = bell.chsh_correlators(N=2, M=1, D=D1_6)
    assert f.QS == pytest.approx(d.QS, abs=1e-14)


def test_fluctuating_error_in_D_only():
    n1, n2, dD = 40.0, 60.0, 1e-4
    f = bell.chsh_fluctuating(FluctuatingEnsemble(n1, n2, 0.004, dD=dD))
    assert f.errors["M"] == pytest.approx(R2 * 2 * (n1 + n2 + math.sqrt(n1 * n2)) * dD, rel=1e-12)
    g = bell.chsh_fluctuating(FluctuatingEnsemble(n1, n2, 0.004, dN1=2.0, dN2=1.0))
    assert g.errors["M"] > 0


def test_fluctuating_validation():
    with pytest.raises(OccupationError):
        FluctuatingEnsemble(1.0, 1.0, 0.6)
    with pytest.raises(OccupationError):
        FluctuatingEnsemble(0.0, 1.0, 0.1)


def test_sweep_exact_and_approx():
    lam = np.random.default_rng(2).random(30)
    lam /= lam.sum()
    rows = bell.chsh_sweep(lam, 1, [1, 2, 5, 10])
    assert [r[1] for r in rows] == [1, 2, 5, 10]
    for r in rows:
        ens = make_ensemble(lam, r[1])
        assert r[3] == pytest.approx(r[1] * occupation(ens, 1), rel=1e-12)
        assert r[-1] == "exact"
    ap = bell.chsh_sweep(lam, 1, [1, 10], approx=True)
    assert ap[0][3] == pytest.approx(lam[0], rel=1e-14)
    assert ap[1][-1] == "approx"
