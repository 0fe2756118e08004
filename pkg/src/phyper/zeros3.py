"""Real zeros of the order-3 functions s_0, s_1, s_2.

For real ``x`` one has ``s_k(x) = (2/3) e^{-x/2} g_k(x)`` with
``g_k(x) = cos(x sqrt3/2 - 2 pi k/3) + e^{3x/2}/2``, so the zeros on the
negative axis are the roots of ``g_k``. Zeros on the other two rays follow
by rotation with ``zeta_m``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cyclo import roots_of_unity
from .numutil import RootBracket, find_root

SQ3 = np.sqrt(3.0)
SPACING = 2 * np.pi / SQ3
SCAN_STEP = np.pi / (2 * SQ3)
MERGE_TOL = 1e-8


@dataclass(frozen=True)
class ZeroTable:
    k: int
    zeros: tuple[float, ...]
    residuals: tuple[float, ...]
    seeds: tuple[float, ...]
    offsets: tuple[float, ...]
    multiplicities: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.zeros)


def _check_k(k: int) -> None:
    if k not in (0, 1, 2):
        raise ValueError(f"index k must be 0, 1 or 2, got {k}")


def _phase(k: int, x):
    return x * SQ3 / 2 - 2 * np.pi * k / 3


def zero_residual(k: int, x: float) -> float:
    _check_k(k)
    return float(np.cos(_phase(k, x)) + 0.5 * np.exp(1.5 * x))


def zero_residual_derivative(k: int, x: float) -> float:
    return float(-SQ3 / 2 * np.sin(_phase(k, x)) + 0.75 * np.exp(1.5 * x))


def asymptotic_roots(k: int, count: int, below: float = 0.0) -> np.ndarray:
    """The ``count`` largest roots of ``cos(x sqrt3/2 - 2 pi k/3) = 0`` below ``below``."""
    _check_k(k)
    # x = (2/sqrt3)(pi/2 + n pi + 2 pi k/3)
    base = 2 / SQ3 * (np.pi / 2 + 2 * np.pi * k / 3)
    step = 2 / SQ3 * np.pi
    n0 = int(np.floor((below - base) / step))
    while base + n0 * step >= below:
        n0 -= 1
    return base + step * np.arange(n0, n0 - count, -1)


def nearest_asymptotic_root(k: int, x: float) -> float:
    base = 2 / SQ3 * (np.pi / 2 + 2 * np.pi * k / 3)
    step = 2 / SQ3 * np.pi
    return float(base + step * np.round((x - base) / step))


def asymptotic_offset(k: int, seed: float, iterations: int = 60) -> float:
    """Signed distance from ``seed`` to the nearby zero of ``g_k``, in full precision.

    Writing ``x = seed + d`` turns ``g_k(x) = 0`` into
    ``sigma sin(d sqrt3/2) = e^{3(seed+d)/2}/2`` with
    ``sigma = sin(phase(seed)) = +-1``. A fixed point iteration solves that
    directly for ``d``, which stays resolvable long after ``x - seed``
    disappears below the spacing of doubles around ``x``.
    """
    sigma = np.sign(np.sin(_phase(k, seed)))
    d = 0.0
    for _ in range(iterations):
        rhs = sigma * 0.5 * np.exp(1.5 * (seed + d))
        if abs(rhs) > 1:
            raise ValueError(f"no small offset near seed {seed}")
        d_new = 2 / SQ3 * np.arcsin(rhs)
        if d_new == d:
            break
        d = d_new
    return float(d)


def find_zeros(k: int, count: int) -> ZeroTable:
    """The first ``count`` zeros of ``s_k`` on the closed negative axis.

    The axis is scanned leftwards in steps of ``SCAN_STEP``; each sign change
    is refined by bisection and a Newton step. For ``k = 1, 2`` the zero at
    the origin is listed first. It is simple for ``k = 1`` and double for
    ``k = 2`` (no sign change), so the scan starts just left of it.
    """
    _check_k(k)
    if count < 1:
        raise ValueError("count must be >= 1")
    zeros: list[float] = []
    mult: list[int] = []
    if k in (1, 2):
        zeros.append(0.0)
        mult.append(k)
    start = 0.0 if k == 0 else -1e-3

    def g(x):
        return zero_residual(k, x)

    x_hi = start
    g_hi = g(x_hi)
    misses = 0
    while len(zeros) < count:
        x_lo = x_hi - SCAN_STEP
        g_lo = g(x_lo)
        if np.sign(g_lo) != np.sign(g_hi):
            root = find_root(g, RootBracket(x_lo, x_hi, 1e-13), newton_steps=0).x
            d = zero_residual_derivative(k, root)
            if d != 0:
                polished = root - g(root) / d
                if x_lo <= polished <= x_hi and abs(g(polished)) <= abs(g(root)):
                    root = polished
            if zeros and abs(root - zeros[-1]) < MERGE_TOL:
                mult[-1] = 2
            else:
                zeros.append(root)
                mult.append(1 if abs(d) > 1e-8 else 2)
            misses = 0
        else:
            misses += 1
            if misses > 4 * 3:
                raise RuntimeError(
                    f"no sign change within 3 asymptotic spacings below x={x_hi:.6g} (k={k})"
                )
        x_hi, g_hi = x_lo, g_lo
    zeros = zeros[:count]
    mult = mult[:count]
    seeds = [nearest_asymptotic_root(k, x) for x in zeros]
    offsets = []
    for x, a in zip(zeros, seeds):
        try:
            offsets.append(abs(asymptotic_offset(k, a)))
        except ValueError:
            offsets.append(abs(x - a))
    return ZeroTable(
        k=k,
        zeros=tuple(float(x) for x in zeros),
        residuals=tuple(abs(zero_residual(k, x)) for x in zeros),
        seeds=tuple(seeds),
        offsets=tuple(offsets),
        multiplicities=tuple(mult),
    )


def rotate_zeros(table: ZeroTable, m: int) -> np.ndarray:
    """Zeros of ``s_k`` on the ray ``zeta_m`` times the negative axis."""
    return roots_of_unity(3)[m] * np.asarray(table.zeros, dtype=complex)


def off_axis_margin(y):
    """``sqrt3 tanh(y sqrt3/2) - sin(3y/2)``; about ``3 y**3 / 16`` near zero."""
    y = np.asarray(y, dtype=float)
    direct = SQ3 * np.tanh(y * SQ3 / 2) - np.sin(1.5 * y)
    # Taylor form for small y avoids the cancellation between two O(y) terms.
    small = 3 * y**3 / 16 - 3 * y**5 / 128
    return np.where(np.abs(y) < 1e-3, small, direct)


def system_residuals(k: int, x: float, y: float) -> tuple[float, float]:
    """Defects of the real and imaginary equations whose common roots are zeros of ``s_k(x+iy)``."""
    _check_k(k)
    ph = _phase(k, x)
    e = 0.5 * np.exp(1.5 * x)
    first = np.cosh(y * SQ3 / 2) * np.cos(ph) + e * np.cos(1.5 * y)
    second = np.sinh(y * SQ3 / 2) * np.sin(ph) - e * np.sin(1.5 * y)
    return float(first), float(second)


def negative_rays() -> np.ndarray:
    """Unit directions of the three rays that carry zeros: ``-zeta_m``."""
    return -roots_of_unity(3).as_array()


def distance_to_rays(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    dist = np.full(z.shape, np.inf)
    for d in negative_rays():
        proj = np.real(z * np.conj(d))
        along = np.where(proj > 0, np.abs(z - proj * d), np.abs(z))
        dist = np.minimum(dist, along)
    return dist
