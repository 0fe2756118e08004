"""p-hyperbolic functions s_k, p-trigonometric functions c_k and their identities."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .cyclo import dft_matrix, roots_of_unity

EXP_LIMIT = 700.0
TAYLOR_RADIUS = 1.0
TAYLOR_REL = 1e-17
TAYLOR_CAP = 200

POLICIES = ("auto", "taylor", "exponential")


@dataclass(frozen=True)
class PFunQuery:
    p: int
    k: int
    z: complex

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"order p must be >= 1, got {self.p}")
        if not 0 <= self.k < self.p:
            raise ValueError(f"index k={self.k} outside 0..{self.p - 1}")


def _taylor_all(p: int, z: np.ndarray) -> np.ndarray:
    """All ``s_k`` by the power series, vectorised over ``z``.

    Term ``z**j / j!`` feeds ``s_{j mod p}``. Summation stops once every
    component has seen a term below ``TAYLOR_REL`` times its partial sum
    (after its leading term), or after ``TAYLOR_CAP`` terms per component.
    """
    out = np.zeros((p,) + z.shape, dtype=complex)
    term = np.ones_like(z, dtype=complex)
    settled = np.zeros((p,) + z.shape, dtype=bool)
    nonzero = z != 0
    for j in range(p * TAYLOR_CAP):
        k = j % p
        out[k] += term
        if j >= p:
            small = np.abs(term) <= TAYLOR_REL * np.abs(out[k])
            settled[k] |= small | ~nonzero
            if k == p - 1 and settled.all():
                break
        term = term * z / (j + 1)
    return out


def _check_range(p: int, z: np.ndarray) -> None:
    zeta = roots_of_unity(p).as_array()
    re = np.real(np.multiply.outer(zeta, z))
    if re.size and np.nanmax(re) > EXP_LIMIT:
        raise OverflowError(
            f"Re(z*zeta_m) exceeds {EXP_LIMIT} for some argument; s_k would overflow"
        )


def _exponential_all(p: int, z: np.ndarray) -> np.ndarray:
    _check_range(p, z)
    zeta = roots_of_unity(p).as_array()
    u = dft_matrix(p)
    # s_k = (1/p) sum_m zeta_m^{-k} e^{z zeta_m}; conj(U)[k, m] = zeta_m^{-k}/sqrt(p)
    e = np.exp(np.multiply.outer(zeta, z))
    return np.tensordot(u.conj(), e, axes=(1, 0)) / np.sqrt(p)


def eval_all(p: int, z, policy: str = "auto") -> np.ndarray:
    """``[s_0(z), ..., s_{p-1}(z)]`` stacked along a new leading axis.

    ``policy`` picks the series (``taylor``), the exponential sum
    (``exponential``), or the series inside ``|z| <= 1`` and the sum outside
    (``auto``).
    """
    if p < 1:
        raise ValueError(f"order p must be >= 1, got {p}")
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    z = np.asarray(z, dtype=complex)
    if policy == "taylor":
        return _taylor_all(p, z)
    if policy == "exponential":
        return _exponential_all(p, z)
    near = np.abs(z) <= TAYLOR_RADIUS
    out = np.empty((p,) + z.shape, dtype=complex)
    if near.any():
        out[:, near] = _taylor_all(p, z[near])
    if (~near).any():
        out[:, ~near] = _exponential_all(p, z[~near])
    return out


def eval_s(p: int, k: int, z, policy: str = "auto"):
    """``s_k(z)`` of order ``p``; scalar in, scalar out."""
    PFunQuery(p, k, 0j)
    out = eval_all(p, z, policy)[k]
    return complex(out) if out.ndim == 0 else out


def eval_c(p: int, k: int, z, policy: str = "auto"):
    """``c_k(z) = s_k(iz) / i**k``."""
    PFunQuery(p, k, 0j)
    out = eval_all(p, 1j * np.asarray(z, dtype=complex), policy)[k] / 1j**k
    return complex(out) if out.ndim == 0 else out


def eval_query(q: PFunQuery, policy: str = "auto") -> complex:
    return eval_s(q.p, q.k, q.z, policy)


def circulant(values) -> np.ndarray:
    """Row ``r``, column ``c`` holds ``values[(c - r) mod p]``."""
    values = np.asarray(values)
    p = len(values)
    r, c = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    return values[(c - r) % p]


def w_matrix(p: int, z: complex) -> np.ndarray:
    return circulant(eval_all(p, z))


def w_matrix_spectral(p: int, z: complex) -> np.ndarray:
    """``U diag(e^{z zeta_m}) U*``, the diagonalised form of ``w_matrix``."""
    u = dft_matrix(p)
    lam = np.exp(complex(z) * roots_of_unity(p).as_array())
    return (u * lam) @ u.conj().T


def euler_reconstruct(p: int, k: int, z: complex) -> complex:
    """``sum_j zeta_k**j s_j(z)``, which should equal ``exp(z zeta_k)``."""
    PFunQuery(p, k, 0j)
    zeta = roots_of_unity(p)
    s = eval_all(p, z)
    return complex(sum(zeta[k * j] * s[j] for j in range(p)))


def taylor_oracle(p: int, k: int, z: complex, terms: int = 60, dps: int = 40) -> complex:
    """Series for ``s_k`` summed in mpmath at ``dps`` digits (test oracle)."""
    import mpmath as mp

    with mp.workdps(dps):
        zz = mp.mpc(z)
        total = mp.mpc(0)
        for n in range(terms):
            j = k + p * n
            total += zz**j / mp.factorial(j)
        return complex(total)


def _s3(z):
    return eval_all(3, z)


def triple_argument_variants(z: complex) -> dict[str, float]:
    """Residuals of the printed and corrected triple-argument formulas.

    The printed ``s_1(3z)`` and ``s_2(3z)`` lines repeat a product; the
    corrected lines follow from cubing the circulant.
    """
    s0, s1, s2 = _s3(z)
    t0, t1, t2 = _s3(3 * z)
    return {
        "s1_printed": abs(t1 - (3 * s0**2 * s1 + 3 * s0**2 * s2 + 3 * s1**2 * s2)),
        "s1_corrected": abs(t1 - (3 * s0**2 * s1 + 3 * s0 * s2**2 + 3 * s1**2 * s2)),
        "s2_printed": abs(t2 - (3 * s0 * s1**2 + 3 * s0 * s2**2 + 3 * s1 * s2**2)),
        "s2_corrected": abs(t2 - (3 * s0 * s1**2 + 3 * s0**2 * s2 + 3 * s1 * s2**2)),
    }


def product_to_sum(a: int, b: int, z: complex, w: complex) -> complex:
    """Right side of ``3 s_a(z) s_b(w) = sum_j zeta_j^{-b} s_{a+b}(z + zeta_j w)``."""
    zeta = roots_of_unity(3)
    k = (a + b) % 3
    return complex(sum(zeta[-b * j] * eval_s(3, k, z + zeta[j] * w) for j in range(3)))


def product_to_sum_last_line_variants(z: complex, w: complex) -> dict[str, float]:
    """Residuals of ``3 s_1(z) s_1(w)`` against both candidate right sides.

    The two candidates differ only in the index of the final term:
    ``zeta_1 s_2(z + zeta_2 w)`` versus ``zeta_1 s_1(z + zeta_2 w)``.
    """
    zeta = roots_of_unity(3)
    lhs = 3 * eval_s(3, 1, z) * eval_s(3, 1, w)
    head = eval_s(3, 2, z + w) + zeta[2] * eval_s(3, 2, z + zeta[1] * w)
    return {
        "s2_final_term": abs(lhs - (head + zeta[1] * eval_s(3, 2, z + zeta[2] * w))),
        "s1_final_term": abs(lhs - (head + zeta[1] * eval_s(3, 1, z + zeta[2] * w))),
    }


def identity_residuals_p3(z: complex, w: complex) -> dict[str, float]:
    """``|lhs - rhs|`` for every p = 3 identity line, keyed by a short name.

    The Euler lines cover ``e^{z zeta_k}``; the triple-argument and the final
    product-to-sum lines use the corrected right sides (see
    :func:`triple_argument_variants` and
    :func:`product_to_sum_last_line_variants`).
    """
    z = complex(z)
    w = complex(w)
    zeta = roots_of_unity(3)
    s0, s1, s2 = _s3(z)
    r0, r1, r2 = _s3(w)
    a0, a1, a2 = _s3(z + w)
    d0, d1, d2 = _s3(2 * z)
    t0, t1, t2 = _s3(3 * z)
    m0, m1, m2 = _s3(-z)
    out: dict[str, float] = {}
    for k in range(3):
        rhs = sum(zeta[k * j] * s for j, s in enumerate((s0, s1, s2)))
        out[f"euler_{k}"] = abs(np.exp(z * zeta[k]) - rhs)
    out["main"] = abs(s0**3 + s1**3 + s2**3 - 3 * s0 * s1 * s2 - 1)
    out["add_0"] = abs(a0 - (s0 * r0 + s1 * r2 + s2 * r1))
    out["add_1"] = abs(a1 - (s0 * r1 + s1 * r0 + s2 * r2))
    out["add_2"] = abs(a2 - (s0 * r2 + s1 * r1 + s2 * r0))
    out["double_0"] = abs(d0 - (s0**2 + 2 * s1 * s2))
    out["double_1"] = abs(d1 - (2 * s0 * s1 + s2**2))
    out["double_2"] = abs(d2 - (2 * s0 * s2 + s1**2))
    out["triple_0"] = abs(t0 - (1 + 9 * s0 * s1 * s2))
    out["triple_1"] = abs(t1 - (3 * s0**2 * s1 + 3 * s0 * s2**2 + 3 * s1**2 * s2))
    out["triple_2"] = abs(t2 - (3 * s0 * s1**2 + 3 * s0**2 * s2 + 3 * s1 * s2**2))
    s_z = (s0, s1, s2)
    s_w = (r0, r1, r2)
    for a, b in ((0, 0), (1, 2), (1, 0), (2, 2), (2, 0), (1, 1)):
        out[f"prod_{a}{b}"] = abs(3 * s_z[a] * s_w[b] - product_to_sum(a, b, z, w))
    out["opp_sum_0"] = abs(s0 * m0 + s1 * m2 + s2 * m1 - 1)
    out["opp_sum_1"] = abs(s0 * m1 + s1 * m0 + s2 * m2)
    out["opp_sum_2"] = abs(s0 * m2 + s1 * m1 + s2 * m0)
    out["opp_0"] = abs(m0 - (s0**2 - s1 * s2))
    out["opp_1"] = abs(m1 - (s2**2 - s0 * s1))
    out["opp_2"] = abs(m2 - (s1**2 - s0 * s2))
    return {k: float(v) for k, v in out.items()}


def solution_matrix(p: int, inits, x: complex) -> np.ndarray:
    """Circulant of ``(y, y', ..., y^(p-1))`` at ``x`` for ``y = sum_k inits[k] s_k``.

    Derivatives come from the index shift ``s_k' = s_{k-1}``. The determinant
    depends only on ``inits``: it equals the determinant of their circulant.
    """
    inits = np.asarray(inits, dtype=complex)
    s = eval_all(p, x)
    derivs = [sum(inits[k] * s[(k - r) % p] for k in range(p)) for r in range(p)]
    return circulant(np.array(derivs))


def series_coefficient(p: int, k: int, n: int) -> float:
    """Coefficient of ``z**(k + p n)`` in ``s_k``."""
    return 1.0 / factorial(k + p * n)
