"""Shared numerical services: quadrature, bracketed roots, finite differences."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np

ABS_TOL = 1e-12
REL_TOL = 1e-10

_EPS = np.finfo(float).eps


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature does not reach its target."""

    def __init__(self, message: str, value: complex, error: float):
        super().__init__(message)
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadraturePolicy:
    nodes_per_panel: int = 16
    target_abs_error: float = 1e-11
    target_rel_error: float = 1e-11
    max_panels: int = 4096

    def __post_init__(self):
        if self.nodes_per_panel < 2:
            raise ValueError("nodes_per_panel must be >= 2")
        if self.target_abs_error <= 0:
            raise ValueError("target_abs_error must be positive")
        if self.target_rel_error < 0:
            raise ValueError("target_rel_error must be non-negative")
        if self.max_panels < 1:
            raise ValueError("max_panels must be >= 1")


DEFAULT_QUADRATURE = QuadraturePolicy()


class Quadrature(NamedTuple):
    value: complex
    error: float
    converged: bool
    panels: int


@lru_cache(maxsize=None)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel_rule(f, lo: np.ndarray, hi: np.ndarray, n: int):
    x, w = _gauss_legendre(n)
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=complex).reshape(nodes.shape)
    total = half * (vals @ w)
    mass = half * (np.abs(vals) @ w)
    return total, mass


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    policy: QuadraturePolicy = DEFAULT_QUADRATURE,
    breakpoints: Sequence[float] | None = None,
) -> Quadrature:
    """Adaptive composite Gauss-Legendre quadrature of ``f`` over ``[a, b]``.

    ``f`` must accept a 1-D array of nodes and return values of the same
    length. Each panel is compared against the sum over its two halves; a
    panel is accepted once that difference falls under its share of the
    tolerance (or under the rounding floor of the panel). The reported error
    is the sum of those differences, which bounds the error of the coarse
    rule and so is conservative for the returned (refined) value.

    ``breakpoints`` inside ``(a, b)`` seed the initial panels, which is
    useful for integrands with known kinks (e.g. interpolated data).
    """
    a = float(a)
    b = float(b)
    if b < a:
        raise ValueError("integrate requires a <= b")
    if a == b:
        return Quadrature(0j, 0.0, True, 0)
    n = policy.nodes_per_panel
    edges = [a, b]
    if breakpoints is not None:
        edges += [float(t) for t in breakpoints if a < t < b]
    edges = np.unique(np.asarray(edges))
    lo, hi = edges[:-1], edges[1:]
    coarse, _ = _panel_rule(f, lo, hi, n)
    length = b - a

    value = 0j
    error = 0.0
    npanels = len(lo)
    converged = True
    while len(lo):
        mid = 0.5 * (lo + hi)
        left, lmass = _panel_rule(f, lo, mid, n)
        right, rmass = _panel_rule(f, mid, hi, n)
        fine = left + right
        est = np.abs(fine - coarse)
        floor = 64 * _EPS * (lmass + rmass)
        scale = abs(value + fine.sum())
        tol = max(policy.target_abs_error, policy.target_rel_error * scale)
        share = tol * (hi - lo) / length
        ok = (est <= share) | (est <= floor)
        value += fine[ok].sum()
        error += float(np.maximum(est[ok], floor[ok]).sum())
        keep = ~ok
        if not keep.any():
            break
        if npanels + keep.sum() > policy.max_panels:
            value += fine[keep].sum()
            error += float(est[keep].sum())
            converged = False
            break
        npanels += int(keep.sum())
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        coarse = np.concatenate([left[keep], right[keep]])
    return Quadrature(complex(value), error, converged, npanels)


def integrate_or_raise(f, a, b, policy: QuadraturePolicy = DEFAULT_QUADRATURE, breakpoints=None) -> complex:
    """Like :func:`integrate` but signed over any orientation; raises on failure."""
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    q = integrate(f, a, b, policy, breakpoints)
    if not q.converged:
        raise QuadratureError(
            f"quadrature did not converge on [{a}, {b}]: estimate {q.error:.3e} "
            f"after {q.panels} panels",
            q.value,
            q.error,
        )
    return sign * q.value


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    tol: float = 1e-13


class Root(NamedTuple):
    x: float
    fx: float
    newton_steps: int


def find_root(f: Callable[[float], float], bracket: RootBracket, newton_steps: int = 3) -> Root:
    """Bisection down to ``bracket.tol`` followed by up to three Newton steps.

    The Newton derivative is a centred difference. A step that leaves the
    final bracket or fails to reduce ``|f|`` is discarded and the bisection
    midpoint is kept.
    """
    lo, hi = float(bracket.lo), float(bracket.hi)
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return Root(lo, 0.0, 0)
    if fhi == 0:
        return Root(hi, 0.0, 0)
    if np.sign(flo) == np.sign(fhi):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > bracket.tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0:
            return Root(mid, 0.0, 0)
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    x = 0.5 * (lo + hi)
    fx = f(x)
    taken = 0
    h = max(bracket.tol, 1e-8 * (1.0 + abs(x)))
    for _ in range(newton_steps):
        if fx == 0:
            break
        d = (f(x + h) - f(x - h)) / (2 * h)
        if d == 0 or not np.isfinite(d):
            break
        x_new = x - fx / d
        if not lo - bracket.tol <= x_new <= hi + bracket.tol:
            break
        f_new = f(x_new)
        if abs(f_new) >= abs(fx):
            break
        x, fx = x_new, f_new
        taken += 1
    return Root(float(x), float(abs(fx)), taken)


@lru_cache(maxsize=None)
def central_stencil(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Offsets and weights of a fourth-order central difference for ``order``."""
    if order < 1:
        raise ValueError("derivative order must be >= 1")
    m = (order + 1) // 2 + 1
    offsets = np.arange(-m, m + 1, dtype=float)
    vander = np.vander(offsets, increasing=True).T
    rhs = np.zeros(len(offsets))
    rhs[order] = float(np.prod(np.arange(1, order + 1)))
    weights = np.linalg.solve(vander, rhs)
    offsets.setflags(write=False)
    weights.setflags(write=False)
    return offsets, weights


def default_step(order: int, x: float) -> float:
    return 0.5 * (1.0 + abs(x)) * _EPS ** (1.0 / (order + 6))


def derivative(
    y: Callable[[np.ndarray], np.ndarray],
    x: float,
    order: int,
    h: float | None = None,
    domain: tuple[float, float] | None = None,
) -> complex:
    """``order``-th derivative of ``y`` at ``x`` by central differences.

    A fourth-order stencil at steps ``h`` and ``h/2`` is combined by one
    Richardson step, so the truncation error is O(h**6) for smooth ``y``.
    ``y`` is called once with the array of all stencil points.
    """
    if h is None:
        h = default_step(order, x)
    offsets, weights = central_stencil(order)
    reach = offsets[-1] * h
    if domain is not None and (x - reach < domain[0] or x + reach > domain[1]):
        raise ValueError(f"stencil around x={x} with h={h} leaves {domain}")
    pts = np.concatenate([x + offsets * h, x + offsets * (h / 2)])
    vals = np.asarray(y(pts), dtype=complex)
    k = len(offsets)
    d_h = vals[:k] @ weights / h**order
    d_h2 = vals[k:] @ weights / (h / 2) ** order
    return complex((16 * d_h2 - d_h) / 15)


def apply_minus_iD_pow(
    p: int,
    y: Callable[[np.ndarray], np.ndarray],
    x: float,
    h: float | None = None,
    domain: tuple[float, float] | None = None,
) -> complex:
    """Apply ``(-i d/dx)**p`` to ``y`` at ``x`` by finite differences."""
    return (-1j) ** p * derivative(y, x, p, h, domain)
