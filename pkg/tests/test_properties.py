"""Randomised invariants over arbitrary small spectra."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coboson import bell, oracle, splitting, sympoly
from coboson.ensemble import count_distribution, make_ensemble, occupations, vacancy

R2 = math.sqrt(2)


@st.composite
def spectra(draw, min_size=2, max_size=8):
    w = draw(st.lists(st.floats(1e-3, 1.0), min_size=min_size, max_size=max_size))
    lam = np.array(w)
    return lam / math.fsum(w)


@settings(max_examples=60, deadline=None)
@given(spectra(), st.data())
def test_occupation_sum_rule_and_range(lam, data):
    N = data.draw(st.integers(1, lam.size))
    D = occupations(make_ensemble(lam, N))
    assert math.fsum(D.tolist()) == pytest.approx(1.0, abs=1e-8)
    assert np.all(D >= 0) and np.all(N * D <= 1 + 1e-10)


@settings(max_examples=60, deadline=None)
@given(spectra(), st.data())
def test_counts_normalised(lam, data):
    N = data.draw(st.integers(1, lam.size))
    t = data.draw(st.integers(1, lam.size))
    P = count_distribution(make_ensemble(lam, N), t)
    assert math.fsum(P.tolist()) == pytest.approx(1.0, abs=1e-12)
    assert np.all(P >= -1e-15)


@settings(max_examples=40, deadline=None)
@given(spectra(max_size=7), st.data())
def test_purity_matches_oracle(lam, data):
    N = data.draw(st.integers(1, min(lam.size, 3)))
    M = data.draw(st.integers(0, N))
    ens = make_ensemble(lam, N, K=2 * N)
    ref = oracle.brute_purity(oracle.build_split_state(lam, N, M))
    got = splitting.purity(ens, M)
    assert got == pytest.approx(ref, rel=1e-10)
    assert 1 / math.comb(N, M) - 1e-12 <= got <= 1 + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 200), st.data())
def test_chsh_within_tsirelson(N, data):
    M = data.draw(st.integers(0, N))
    D = data.draw(st.floats(0, 1)) / N
    c = bell.chsh_correlators(N=N, M=M, D=D)
    assert abs(c.M) <= 2 * R2 + 1e-12
    assert c.M == pytest.approx(bell.chsh_value(N, M, D), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(spectra(max_size=5), st.data())
def test_chsh_with_vacancy_matches_oracle(lam, data):
    N = data.draw(st.integers(1, min(lam.size, 3)))
    M = data.draw(st.integers(0, N))
    j = data.draw(st.integers(1, lam.size))
    ens = make_ensemble(lam, N)
    ref = oracle.brute_chsh(oracle.build_split_state(lam, N, M), j)
    c = bell.chsh_correlators(N=N, M=M, D=occupations(ens)[j - 1], empty=vacancy(ens, j)).as_dict()
    for k in ref:
        assert c[k] == pytest.approx(ref[k], abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(spectra(min_size=3, max_size=60), st.data())
def test_vandermonde_random_split(lam, data):
    K = data.draw(st.integers(1, lam.size))
    cut = data.draw(st.integers(1, lam.size - 1))
    full = sympoly.chi_table(lam, K).log_e
    both = sympoly.log_convolve(sympoly.chi_table(lam[:cut], K), sympoly.chi_table(lam[cut:], K), K)
    assert np.max(np.abs(np.expm1(both[1:] - full[1:]))) < 1e-10
