import math

import numpy as np
import pytest

from coboson import figures
from coboson.cli import main
from coboson.solver import PRESETS, load_preset


@pytest.mark.parametrize("name", PRESETS)
def test_preset_invariants(name):
    s = load_preset(name)
    assert abs(math.fsum((s.shell_lambdas * s.degeneracy).tolist()) - 1) < 1e-12
    assert np.all(s.shell_lambdas > 0)
    assert np.array_equal(s.degeneracy, 2 * s.shell_l + 1)
    assert np.all(np.diff(s.shell_energy) >= 0)
    assert s.truncation["discarded_weight"] <= 1e-10 + 1e-15


def test_presets_spread_with_binding():
    S = [load_preset(p).S for p in PRESETS]
    top = [load_preset(p).shell_lambdas.max() for p in PRESETS]
    assert S[0] < S[1] < S[2]
    assert top[0] > top[1] > top[2]


def test_fig5_deviation_small_at_N1():
    cols, rows, meta = figures.fig5()["fig5"]
    assert rows[0][0] == 1 and rows[0][-1] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.slow
def test_figures_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        d.mkdir()
        assert main(["figures", "all", "--outdir", str(d)]) == 0
    capsys.readouterr()
    fa = sorted(p.name for p in a.iterdir())
    assert fa == sorted(p.name for p in b.iterdir()) and len(fa) == 8
    for n in fa:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n
