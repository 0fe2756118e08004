"""Roots of unity, the unitary DFT matrix and k_p-even decompositions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class RootSystem:
    p: int
    zeta: tuple[complex, ...]

    def __getitem__(self, m: int) -> complex:
        return self.zeta[m % self.p]

    def as_array(self) -> np.ndarray:
        return np.array(self.zeta, dtype=complex)


def _root(m: int, p: int) -> complex:
    # Quarter turns are exact; everything else is exp of the exact angle.
    if (4 * m) % p == 0:
        return (1, 1j, -1, -1j)[(4 * m // p) % 4]
    return complex(np.exp(2j * np.pi * m / p))


@lru_cache(maxsize=64)
def roots_of_unity(p: int) -> RootSystem:
    """The ``p`` roots ``exp(2 pi i m / p)``, ``m = 0..p-1``.

    ``zeta[p-m]`` is stored as the exact conjugate of ``zeta[m]`` so that the
    conjugation rule holds bit for bit.
    """
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise ValueError(f"order p must be a positive integer, got {p!r}")
    p = int(p)
    zeta: list[complex] = [0j] * p
    for m in range(p):
        if m <= p - m:
            zeta[m] = _root(m, p)
        else:
            zeta[m] = zeta[p - m].conjugate()
    zeta[0] = 1 + 0j
    return RootSystem(p, tuple(complex(z) for z in zeta))


def root_powers(p: int) -> np.ndarray:
    """Matrix ``P[j, m] = zeta_j**m`` built from exact index arithmetic."""
    z = roots_of_unity(p).as_array()
    j, m = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    return z[(j * m) % p]


def dft_matrix(p: int) -> np.ndarray:
    """Unitary matrix ``U[j, m] = zeta_j**m / sqrt(p)``."""
    return root_powers(p) / np.sqrt(p)


def kp_component(f: Callable[[complex], complex], p: int, k: int, z: complex) -> complex:
    """The ``k``-th ``p``-even component ``(1/p) sum_m zeta_m**(-k) f(zeta_m z)``."""
    if not 0 <= k < p:
        raise ValueError(f"index k={k} outside 0..{p - 1}")
    zeta = roots_of_unity(p)
    total = 0j
    for m in range(p):
        total += zeta[-k * m] * f(zeta[m] * z)
    return total / p
