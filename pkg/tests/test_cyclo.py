from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phyper.cyclo import dft_matrix, kp_component, roots_of_unity


def test_quarter_turns_exact():
    z = roots_of_unity(4)
    assert [z[m] for m in range(4)] == [1, 1j, -1, -1j]


def test_conjugate_pairs_exact():
    z = roots_of_unity(7)
    for m in range(1, 7):
        assert z[7 - m] == np.conj(z[m])


def test_rejects_nonpositive_order():
    with pytest.raises(ValueError):
        roots_of_unity(0)


@pytest.mark.parametrize("p", range(1, 17))
def test_dft_unitary(p):
    u = dft_matrix(p)
    assert np.max(np.abs(u @ u.conj().T - np.eye(p))) <= p**2 * 1e-13


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.floats(-2, 2), st.floats(-2, 2))
def test_components_of_exp_sum_back(p, x, y):
    z = complex(x, y)
    total = sum(kp_component(np.exp, p, k, z) for k in range(p))
    assert abs(total - np.exp(z)) < 1e-12 * max(1, abs(np.exp(z)))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(0, 8), st.integers(0, 8), st.floats(-2, 2), st.floats(-2, 2))
def test_component_evenness(p, k, m, x, y):
    k, m = k % p, m % p
    z = complex(x, y)
    zeta = roots_of_unity(p)
    lhs = kp_component(np.exp, p, k, zeta[m] * z)
    assert abs(lhs - zeta[m * k] * kp_component(np.exp, p, k, z)) < 1e-12 * np.exp(abs(z))
