from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phyper import sabc


@pytest.mark.parametrize("p", range(1, 8))
def test_jp_symmetry(p):
    j = sabc.concomitant_matrix(p)
    assert np.array_equal(j.T, (-1) ** (p - 1) * j)


@pytest.mark.parametrize("p", range(2, 8))
def test_eigenbasis_orthonormal(p):
    m = sabc.jp_eigenbasis(p).matrix()
    assert np.allclose(m.conj().T @ m, np.eye(p), atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_cayley_round_trip(k, seed):
    rng = np.random.default_rng(seed)
    v = sabc.random_unitary(k, rng)
    try:
        b = sabc.cayley_b(v)
    except np.linalg.LinAlgError:
        return
    assert np.array_equal(b, b.conj().T)
    assert np.max(np.abs(sabc.cayley_v(b) - v)) < 1e-12 * np.linalg.cond(np.eye(k) - v)


def test_cayley_singular_rejected():
    with pytest.raises(np.linalg.LinAlgError):
        sabc.cayley_b(np.eye(2))


def test_cayley_scalar():
    # V = i  ->  B = i (1 + i) / (1 - i) = -1
    assert abs(sabc.cayley_b(np.array([[1j]]))[0, 0] + 1) < 1e-15


def test_spec_validation():
    with pytest.raises(ValueError):
        sabc.BoundarySpecEven(1, "separated", B0=np.array([[1j]]), Bl=np.array([[0.0]]))
    with pytest.raises(ValueError):
        sabc.BoundarySpecEven(1, "unseparated", V=np.array([[2.0]]), Vt=np.array([[1.0]]))


@settings(max_examples=12, deadline=None)
@given(st.integers(2, 5), st.sampled_from(["separated", "unseparated"]), st.integers(0, 10**6))
def test_witness(p, kind, seed):
    rng = np.random.default_rng(seed)
    rep = sabc.selfadjointness_check(sabc.random_spec(p, kind, rng), 1.0, 5, rng)
    assert rep.max_relative <= 1e-9
    assert rep.max_bc_residual <= 1e-9
