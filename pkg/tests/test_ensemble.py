import math

import numpy as np
import pytest

from coboson import ensemble as en
from coboson.spectrum import Shell, from_shells, synth_spectrum
from coboson.sympoly import chi_table

LAM3 = (0.5, 0.3, 0.2)


def test_ensemble_validation():
    with pytest.raises(en.EnsembleError):
        en.make_ensemble(LAM3, 4)
    with pytest.raises(en.EnsembleError):
        en.make_ensemble(LAM3, 0)
    spec = synth_spectrum("custom", weights=LAM3)
    with pytest.raises(en.EnsembleError):
        en.EnsembleSpec(2, spec, chi_table([0.6, 0.4], 3))


def test_occupation_examples():
    ens = en.make_ensemble(LAM3, 2)
    assert en.occupation(ens, 1) == pytest.approx(0.25 / 0.62, abs=1e-14)
    assert np.allclose(en.occupations(en.make_ensemble(LAM3, 1)), LAM3, atol=1e-15)
    flat = en.make_ensemble(synth_spectrum("flat", 9), 4)
    assert np.allclose(en.occupations(flat), 1 / 9, atol=1e-14)
    with pytest.raises(en.EnsembleError):
        en.occupation(ens, 4)


def test_vacancy_complements():
    ens = en.make_ensemble(LAM3, 2)
    for j in (1, 2, 3):
        assert en.vacancy(ens, j) == pytest.approx(1 - 2 * en.occupation(ens, j), abs=1e-14)


def test_spectral_density_examples():
    _, v = en.spectral_density(en.make_ensemble(LAM3, 2))
    assert np.allclose(v, [0.806452, 0.677419, 0.516129], atol=1e-6)
    assert math.fsum(v.tolist()) == pytest.approx(2.0, abs=1e-12)
    p = from_shells([Shell(0, 1, 1 / 3, 1.0)])
    _, v = en.spectral_density(en.make_ensemble(p, 1))
    assert v[0] == pytest.approx(1.0, abs=1e-14)


def test_occupation_approx():
    assert en.occupation_approx(0.5, 2) == pytest.approx(1 / 3)
    assert en.occupation_approx(0.123, 1) == pytest.approx(0.123)
    assert np.allclose(en.occupation_approx(np.array([0.1, 0.2]), 3), [0.1 / 1.2, 0.2 / 1.4])


def test_count_distribution_examples():
    ens = en.make_ensemble(LAM3, 2)
    assert np.allclose(en.count_distribution(ens, 1), [0.193548, 0.806452, 0], atol=1e-6)
    assert np.array_equal(en.count_distribution(ens, 3), [0.0, 0.0, 1.0])
    P = en.count_distribution(en.make_ensemble(LAM3, 1), 1)
    assert P[1] == pytest.approx(0.5, abs=1e-15)


def test_hard_cutoff_beyond_window():
    ens = en.make_ensemble(np.full(10, 0.1), 5)
    P = en.count_distribution(ens, 2)
    assert np.all(P[3:] == 0.0)
    assert math.fsum(P.tolist()) == pytest.approx(1.0, abs=1e-12)


def test_mean_population_examples():
    ens = en.make_ensemble(LAM3, 2)
    assert en.mean_population(ens, 1) == pytest.approx(0.806452, abs=1e-6)
    assert en.mean_population(ens, 3) == 2.0
    flat = en.make_ensemble(synth_spectrum("flat", 12), 5)
    assert en.mean_population(flat, 4) == pytest.approx(5 * 4 / 12, abs=1e-12)


def test_window_report_consistent():
    lam = np.random.default_rng(0).random(40)
    ens = en.make_ensemble(lam / lam.sum(), 9)
    r = en.window_report(ens, 11)
    assert r["mean"] == pytest.approx(en.mean_population(ens, 11), abs=1e-10)
    assert r["variance"] > 0 and r["poisson_var"] == r["mean"]


def test_normalization_ratio_examples():
    assert en.normalization_ratio(en.make_ensemble(LAM3, 1)) == pytest.approx(0.62, rel=1e-14)
    assert en.normalization_ratio(en.make_ensemble(synth_spectrum("flat", 4), 4)) == 0.0
    assert en.normalization_ratio(en.make_ensemble([1.0], 1)) == 0.0


def test_degenerate_matches_expanded():
    shells = [Shell(0, 0, 0.2, 1.0), Shell(0, 1, 0.1, 2.0), Shell(1, 0, 0.08, 3.0),
              Shell(0, 2, 0.0244, 4.0)]
    spec = from_shells(shells)
    flat = synth_spectrum("custom", weights=spec.lambdas)
    a, b = en.make_ensemble(spec, 4), en.make_ensemble(flat, 4)
    assert np.allclose(en.occupations(a), en.occupations(b), rtol=1e-12)
    for t in (1, 2, 5, 9):
        assert np.allclose(en.count_distribution(a, t), en.count_distribution(b, t), atol=1e-13)
        assert en.mean_population(a, t) == pytest.approx(en.mean_population(b, t), rel=1e-12)
    assert en.occupation(a, 3) == pytest.approx(en.occupation(b, 3), rel=1e-12)


def test_universality_diagnostic_reports():
    a = en.make_ensemble(np.full(20, 0.05), 3)
    b = en.make_ensemble(np.full(20, 0.05), 4)
    d = en.universality_diagnostic(a, b)
    assert set(d) >= {"ratio_a", "ratio_b", "relative_deviation"}
    assert d["relative_deviation"] >= 0
