from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phyper import pfun, zeros3
from phyper.checks import interlacing_violations

# [DERIVED] mpmath findroot on the series of s_k at 40 digits
ORACLE = {
    0: [-1.849812799190143476, -5.4412333550236633554, -9.0689975348715776581, -12.696595546546757294],
    1: [0.0, -3.0167442120840785179, -6.6506245189075155822, -10.278196280969976183],
    2: [0.0, -4.2332071924389565609, -7.8597928673515401559, -11.487395992453510993],
}


@pytest.fixture(scope="module")
def tables():
    return [zeros3.find_zeros(k, 20) for k in range(3)]


@pytest.mark.parametrize("k", range(3))
def test_frozen_zeros(tables, k):
    assert np.allclose(tables[k].zeros[:4], ORACLE[k], rtol=0, atol=1e-13)


def test_origin_zeros_exact(tables):
    assert tables[1].zeros[0] == 0.0 and tables[2].zeros[0] == 0.0
    assert tables[1].multiplicities[0] == 1 and tables[2].multiplicities[0] == 2


def test_residuals_small(tables):
    assert max(r for t in tables for r in t.residuals) <= 1e-11


def test_interlacing(tables):
    assert interlacing_violations(tables) == 0


def test_offsets_decrease(tables):
    for t in tables:
        assert np.all(np.diff(t.offsets[2:]) < 0)


def test_zeros_are_zeros_of_s_k(tables):
    for t in tables:
        for x in t.zeros:
            assert abs(pfun.eval_s(3, t.k, x)) <= 1e-11 * np.exp(abs(x) / 2)


def test_rotated_zeros_vanish(tables):
    for m in (1, 2):
        for z in zeros3.rotate_zeros(tables[0], m)[:5]:
            assert abs(pfun.eval_s(3, 0, z)) < 1e-11 * np.exp(abs(z) / 2)


def test_bad_index():
    with pytest.raises(ValueError):
        zeros3.find_zeros(3, 2)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-4, 50))
def test_off_axis_margin_positive(y):
    assert zeros3.off_axis_margin(y) > 0


def test_off_axis_margin_small_y_series():
    y = np.geomspace(1e-4, 1e-2, 10)
    assert np.allclose(zeros3.off_axis_margin(y) / y**3, 3 / 16, rtol=0.01)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.3, 6), st.floats(-np.pi, np.pi))
def test_no_zeros_off_rays(r, ang):
    z = r * np.exp(1j * ang)
    if zeros3.distance_to_rays(np.array([z]))[0] >= 0.2:
        assert np.min(np.abs(pfun.eval_all(3, z))) > 1e-2
