"""Closed-form solutions of the Cauchy problem (-iD)^p y = lam^p y + f."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Sequence

import numpy as np

from .numutil import DEFAULT_QUADRATURE, QuadraturePolicy, integrate_or_raise
from .pfun import eval_all

Forcing = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CauchyProblem:
    """Initial data ``y^(k)(0) = inits[k]`` on the interval ``(0, l)``.

    ``forcing`` must accept an array of points and be free of side effects.
    """

    p: int
    lam: complex
    inits: tuple[complex, ...]
    forcing: Forcing | None = None
    l: float = 1.0
    breakpoints: Sequence[float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"order p must be >= 1, got {self.p}")
        if len(self.inits) != self.p:
            raise ValueError(f"expected {self.p} initial values, got {len(self.inits)}")
        if not (np.isfinite(self.l) and self.l > 0):
            raise ValueError(f"interval length must be finite and positive, got {self.l}")
        object.__setattr__(self, "inits", tuple(complex(v) for v in self.inits))
        object.__setattr__(self, "lam", complex(self.lam))


def _homogeneous(p: int, lam: complex, inits, x, deriv: int = 0):
    x = np.asarray(x, dtype=float)
    if lam == 0:
        # y = sum_k y_k x^k / k!
        out = np.zeros(x.shape, dtype=complex)
        for k, yk in enumerate(inits):
            if yk != 0 and k >= deriv:
                out += yk * x ** (k - deriv) / factorial(k - deriv)
        return out
    il = 1j * lam
    s = eval_all(p, il * x)
    out = np.zeros(x.shape, dtype=complex)
    for k, yk in enumerate(inits):
        if yk != 0:
            # d^deriv/dx^deriv of s_k(il x)/(il)^k = (il)^(deriv-k) s_{k-deriv}(il x)
            out += yk * il ** (deriv - k) * s[(k - deriv) % p]
    return out


def solve_homogeneous(prob: CauchyProblem, x, deriv: int = 0):
    """``sum_k y_k s_k(i lam x) / (i lam)**k`` (or its ``deriv``-th derivative)."""
    if prob.lam == 0 and deriv >= prob.p:
        return np.zeros(np.shape(x), dtype=complex) if np.ndim(x) else 0j
    out = _homogeneous(prob.p, prob.lam, prob.inits, x, deriv)
    return complex(out) if out.ndim == 0 else out


def _kernel(p: int, lam: complex, deriv: int):
    """Green kernel ``K(r)`` with ``y_part(x) = int_0^x K(x - t) f(t) dt`` and its ``deriv`` derivative."""
    if lam == 0:
        # (1/i D)^p y = f  =>  y = i^p * p-fold integral
        c = 1j**p / factorial(p - 1 - deriv)

        def k0(r):
            return c * r ** (p - 1 - deriv)

        return k0
    il = 1j * lam
    c = 1j / lam ** (p - 1) * il**deriv
    idx = (p - 1 - deriv) % p

    def k1(r):
        return c * eval_all(p, il * r)[idx]

    return k1


def forced_part(prob: CauchyProblem, x: float, deriv: int = 0,
                policy: QuadraturePolicy = DEFAULT_QUADRATURE) -> complex:
    """``(i / lam^(p-1)) int_0^x s_{p-1}(i lam (x-t)) f(t) dt`` and its derivatives.

    Derivatives of order below ``p`` differentiate only the kernel because
    the kernel and its first ``p-2`` derivatives vanish at ``r = 0``.
    """
    if prob.forcing is None:
        return 0j
    if not 0 <= deriv < prob.p:
        raise ValueError(f"derivative order {deriv} outside 0..{prob.p - 1}")
    x = float(x)
    kern = _kernel(prob.p, prob.lam, deriv)
    f = prob.forcing

    def integrand(t):
        return kern(x - t) * np.asarray(f(t), dtype=complex)

    return integrate_or_raise(integrand, 0.0, x, policy, prob.breakpoints)


def solve_inhomogeneous(prob: CauchyProblem, x: float,
                        policy: QuadraturePolicy = DEFAULT_QUADRATURE, deriv: int = 0) -> complex:
    """Homogeneous part plus the forced response at a single point ``x``.

    Negative ``x`` is allowed (the integral is then taken with orientation).
    ``lam = 0`` falls back to the polynomial solution with a ``p``-fold
    integral of ``f``.
    """
    hom = complex(_homogeneous(prob.p, prob.lam, prob.inits, x, deriv))
    return hom + forced_part(prob, x, deriv, policy)


def solve(prob: CauchyProblem, xs, policy: QuadraturePolicy = DEFAULT_QUADRATURE) -> np.ndarray:
    """Solution sampled at each point of ``xs``."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    hom = _homogeneous(prob.p, prob.lam, prob.inits, xs)
    if prob.forcing is None:
        return hom
    forced = np.array([forced_part(prob, x, 0, policy) for x in xs])
    return hom + forced


def constant_forcing_series(lam: complex, x: float, terms: int = 40) -> complex:
    """Series oracle for ``p = 3``, zero data, ``f = 1``.

    Term-by-term integration of the kernel gives
    ``(i/lam^2) sum_n (i lam)^(2+3n) x^(3+3n) / (3+3n)!``.
    """
    il = 1j * lam
    total = 0j
    for n in range(terms):
        total += il ** (2 + 3 * n) * x ** (3 + 3 * n) / factorial(3 + 3 * n)
    return 1j / lam**2 * total
