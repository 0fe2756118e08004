from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phyper import cauchy, checks


def test_rejects_wrong_init_count():
    with pytest.raises(ValueError):
        cauchy.CauchyProblem(3, 1.0, (1, 2))


def test_homogeneous_p2_is_cos_sin():
    # (-iD)^2 y = lam^2 y  <=>  y'' = -lam^2 y
    prob = cauchy.CauchyProblem(2, 1.3, (1.0, 0.0))
    x = np.linspace(0, 1, 5)
    assert np.allclose(cauchy.solve(prob, x), np.cos(1.3 * x), atol=1e-14)


def test_constant_forcing_series_oracle():
    prob = cauchy.CauchyProblem(3, 0.7 + 0.2j, (0, 0, 0), lambda t: np.ones_like(t))
    for x in (0.1, 0.6, 1.0):
        assert abs(cauchy.solve_inhomogeneous(prob, x) - cauchy.constant_forcing_series(0.7 + 0.2j, x)) < 1e-13


def test_lambda_zero_polynomial():
    # (-iD)^3 y = i y''' = 1 with zero data: y = -i x^3 / 6
    prob = cauchy.CauchyProblem(3, 0.0, (0, 0, 0), lambda t: np.ones_like(t))
    assert abs(cauchy.solve_inhomogeneous(prob, 0.8) + 1j * 0.8**3 / 6) < 1e-14


@settings(max_examples=8, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_random_problem_satisfies_ode(p, seed):
    rng = np.random.default_rng(seed)
    prob = checks.random_cauchy(rng, p)
    assert checks.cauchy_initial_defect(prob) <= 1e-6
    assert checks.cauchy_ode_residual(prob, [0.3, 0.7]) <= 1e-5


def test_derivatives_match_initial_data_exactly():
    prob = cauchy.CauchyProblem(4, 1.1 - 0.4j, (1, 2j, -0.5, 0.25), lambda t: np.sin(t) + 0j)
    for k in range(4):
        assert abs(cauchy.solve_inhomogeneous(prob, 0.0, deriv=k) - prob.inits[k]) < 1e-14
