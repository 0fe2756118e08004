"""Self-adjoint boundary conditions for (-iD)^p on (0, l).

Derivative stacks are ordered ``(y, y', ..., y^(p-1))``. For ``p = 2k`` the
stack splits into ``Y_0`` (first ``k`` entries) and ``Y_1`` (last ``k``).
For ``p = 2k+1`` the middle entry ``y^(k)`` is held apart and ``Y_1`` is
``(y^(k+1), ..., y^(p-1))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .cauchy import _homogeneous

Kind = Literal["separated", "unseparated"]
MATRIX_TOL = 1e-12


def concomitant_matrix(p: int) -> np.ndarray:
    """Anti-diagonal ``J[r, p-1-r] = (-1)**r`` as an integer matrix."""
    if p < 1:
        raise ValueError(f"order p must be >= 1, got {p}")
    j = np.zeros((p, p), dtype=int)
    for r in range(p):
        j[r, p - 1 - r] = (-1) ** r
    return j


def concomitant(p: int, y_derivs, z_derivs) -> complex:
    """``sum_r (-1)**r y^(p-1-r) conj(z^(r))``, i.e. ``<J_p Y, Z>``."""
    y = np.asarray(y_derivs, dtype=complex)
    z = np.asarray(z_derivs, dtype=complex)
    if y.shape != (p,) or z.shape != (p,):
        raise ValueError(f"derivative stacks must have length {p}, got {y.shape} and {z.shape}")
    return complex(sum((-1) ** r * y[p - 1 - r] * np.conj(z[r]) for r in range(p)))


def cayley_b(v: np.ndarray, hermitian: bool = True) -> np.ndarray:
    """``i (I - V)^{-1} (I + V)``: unitary to self-adjoint.

    The solve leaves an anti-Hermitian rounding part of size ``eps |B| cond``;
    with ``hermitian=True`` the Hermitian part is returned instead.
    """
    v = np.atleast_2d(np.asarray(v, dtype=complex))
    eye = np.eye(len(v))
    a = eye - v
    if np.linalg.cond(a) > 1e12:
        raise np.linalg.LinAlgError("I - V is singular: 1 is an eigenvalue of V")
    b = 1j * np.linalg.solve(a, eye + v)
    return (b + b.conj().T) / 2 if hermitian else b


def cayley_v(b: np.ndarray) -> np.ndarray:
    """Inverse of :func:`cayley_b`: ``(B - iI)(B + iI)^{-1}``."""
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    eye = np.eye(len(b))
    return np.linalg.solve((b + 1j * eye).T, (b - 1j * eye).T).T


@dataclass(frozen=True)
class EigenBasis:
    """Orthonormal eigenvectors of ``J_p`` grouped by eigenvalue."""

    p: int
    plus: np.ndarray  # columns, eigenvalue +i (even) or +1 (odd)
    minus: np.ndarray  # columns, eigenvalue -i (even) or -1 (odd)
    middle: np.ndarray | None  # odd p only: e_k, eigenvalue (-1)^k
    plus_value: complex
    minus_value: complex

    @property
    def middle_value(self) -> int | None:
        return None if self.middle is None else (-1) ** (self.p // 2)

    def matrix(self) -> np.ndarray:
        cols = [self.plus, self.minus]
        if self.middle is not None:
            cols.append(self.middle[:, None])
        return np.hstack(cols)


def jp_eigenbasis(p: int) -> EigenBasis:
    if p < 2:
        raise ValueError("eigenbasis requires p >= 2")
    k = p // 2
    plus = np.zeros((p, k), dtype=complex)
    minus = np.zeros((p, k), dtype=complex)
    odd = p % 2 == 1
    for s in range(1, k + 1):
        tail = (-1) ** (s - 1) * (1 if odd else 1j)
        plus[s - 1, s - 1] = 1
        minus[s - 1, s - 1] = -1
        plus[p - s, s - 1] = tail
        minus[p - s, s - 1] = tail
    plus /= np.sqrt(2)
    minus /= np.sqrt(2)
    if odd:
        middle = np.zeros(p, dtype=complex)
        middle[k] = 1
        return EigenBasis(p, plus, minus, middle, 1, -1)
    return EigenBasis(p, plus, minus, None, 1j, -1j)


@dataclass(frozen=True)
class Projection:
    plus: np.ndarray
    minus: np.ndarray
    middle: complex | None


def project(p: int, h) -> Projection:
    """Components of ``h`` along the ``J_p`` eigenspaces."""
    h = np.asarray(h, dtype=complex)
    basis = jp_eigenbasis(p)
    plus = basis.plus @ (basis.plus.conj().T @ h)
    minus = basis.minus @ (basis.minus.conj().T @ h)
    mid = None if basis.middle is None else complex(basis.middle.conj() @ h)
    return Projection(plus, minus, mid)


def quadratic_form_split(p: int, h) -> tuple[complex, complex]:
    """``<J_p h, h>`` directly and through the eigenspace split."""
    h = np.asarray(h, dtype=complex)
    direct = complex(np.vdot(h, concomitant_matrix(p) @ h))
    pr = project(p, h)
    basis = jp_eigenbasis(p)
    split = basis.plus_value * np.vdot(pr.plus, pr.plus) + basis.minus_value * np.vdot(pr.minus, pr.minus)
    if pr.middle is not None:
        split += basis.middle_value * abs(pr.middle) ** 2
    return direct, complex(split)


def _check_hermitian(name: str, m) -> np.ndarray:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    if np.max(np.abs(m - m.conj().T)) > MATRIX_TOL * max(1.0, np.max(np.abs(m))):
        raise ValueError(f"{name} is not self-adjoint")
    return m


def _check_unitary(name: str, m) -> np.ndarray:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    if np.max(np.abs(m @ m.conj().T - np.eye(len(m)))) > MATRIX_TOL * 10:
        raise ValueError(f"{name} is not unitary")
    return m


@dataclass(frozen=True)
class BoundarySpecEven:
    """Parameters for ``p = 2k``: ``(B0, Bl)`` separated or ``(V, Vt)`` unseparated."""

    k: int
    kind: Kind
    B0: np.ndarray | None = None
    Bl: np.ndarray | None = None
    V: np.ndarray | None = None
    Vt: np.ndarray | None = None

    def __post_init__(self):
        _validate(self)

    @property
    def p(self) -> int:
        return 2 * self.k


@dataclass(frozen=True)
class BoundarySpecOdd:
    """Parameters for ``p = 2k+1``; ``theta`` couples the middle derivatives."""

    k: int
    theta: complex
    kind: Kind
    B0: np.ndarray | None = None
    Bl: np.ndarray | None = None
    V: np.ndarray | None = None
    Vt: np.ndarray | None = None

    def __post_init__(self):
        if abs(abs(self.theta) - 1) > 1e-14:
            raise ValueError(f"theta must be unimodular, |theta| = {abs(self.theta)}")
        _validate(self)

    @property
    def p(self) -> int:
        return 2 * self.k + 1


def _validate(spec) -> None:
    if spec.k < 1:
        raise ValueError("half order k must be >= 1")
    shape = (spec.k, spec.k)
    if spec.kind == "separated":
        names = ("B0", "Bl")
        check = _check_hermitian
    elif spec.kind == "unseparated":
        names = ("V", "Vt")
        check = _check_unitary
    else:
        raise ValueError(f"unknown boundary kind {spec.kind!r}")
    for name in names:
        m = getattr(spec, name)
        if m is None:
            raise ValueError(f"{spec.kind} conditions need {name}")
        m = check(name, m)
        if m.shape != shape:
            raise ValueError(f"{name} must be {shape}, got {m.shape}")
        object.__setattr__(spec, name, m)


BoundarySpec = BoundarySpecEven | BoundarySpecOdd


def _selectors(p: int):
    """Row selectors of ``Y_0``, ``J_k Y_1`` and (odd p) ``y^(k)`` on a stack."""
    k = p // 2
    eye = np.eye(p)
    s0 = eye[:k]
    s1 = concomitant_matrix(k) @ eye[p - k:]
    mid = eye[k : k + 1] if p % 2 else None
    return s0, s1, mid


def constraint_blocks(spec: BoundarySpec) -> list[tuple[str, np.ndarray]]:
    """Named rows ``C`` with each condition reading ``C @ [Y(0); Y(l)] = 0``."""
    p = spec.p
    s0, s1, mid = _selectors(p)

    def at0(m):
        return np.hstack([m, np.zeros_like(m)])

    def atl(m):
        return np.hstack([np.zeros_like(m), m])

    out: list[tuple[str, np.ndarray]] = []
    odd = isinstance(spec, BoundarySpecOdd)
    if odd:
        out.append(("middle", np.hstack([-spec.theta * mid, mid])))
    c = 1j if odd else 1.0
    if spec.kind == "separated":
        out.append(("left", at0(s1) - c * spec.B0 @ at0(s0)))
        out.append(("right", atl(s1) - c * spec.Bl @ atl(s0)))
    else:
        vp = spec.V + spec.Vt
        vm = spec.V - spec.Vt
        if odd:
            out.append(("values", 2 * atl(s0) - vp @ at0(s0) - vm @ at0(s1)))
            out.append(("derivatives", 2 * atl(s1) - vm @ at0(s0) - vp @ at0(s1)))
        else:
            out.append(("values", 2 * atl(s0) - vp @ at0(s0) - 1j * vm @ at0(s1)))
            out.append(("derivatives", 2j * atl(s1) - vm @ at0(s0) - 1j * vp @ at0(s1)))
    return out


def constraint_matrix(spec: BoundarySpec) -> np.ndarray:
    return np.vstack([m for _, m in constraint_blocks(spec)])


def boundary_residual(spec: BoundarySpec, l: float, y0, yl) -> dict[str, float]:
    """Norm of the defect of each boundary equation for stacks ``Y(0)``, ``Y(l)``.

    ``l`` only documents where ``yl`` was sampled; the conditions themselves
    do not depend on it.
    """
    y0 = np.asarray(y0, dtype=complex)
    yl = np.asarray(yl, dtype=complex)
    if y0.shape != (spec.p,) or yl.shape != (spec.p,):
        raise ValueError(f"stacks must have length {spec.p}")
    u = np.concatenate([y0, yl])
    return {name: float(np.linalg.norm(m @ u)) for name, m in constraint_blocks(spec)}


def random_unitary(k: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    q, r = np.linalg.qr(a)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(k: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    return scale * (a + a.conj().T) / 2


def random_spec(p: int, kind: Kind, rng: np.random.Generator) -> BoundarySpec:
    k = p // 2
    if kind == "separated":
        mats = {"B0": random_hermitian(k, rng), "Bl": random_hermitian(k, rng)}
    else:
        mats = {"V": random_unitary(k, rng), "Vt": random_unitary(k, rng)}
    if p % 2 == 0:
        return BoundarySpecEven(k, kind, **mats)
    theta = complex(np.exp(1j * rng.uniform(-np.pi, np.pi)))
    return BoundarySpecOdd(k, theta, kind, **mats)


def _stacks(p: int, lam: complex, inits, l: float) -> tuple[np.ndarray, np.ndarray]:
    y0 = np.array([_homogeneous(p, lam, inits, 0.0, r) for r in range(p)], dtype=complex)
    yl = np.array([_homogeneous(p, lam, inits, l, r) for r in range(p)], dtype=complex)
    return y0, yl


@dataclass(frozen=True)
class WitnessReport:
    max_defect: float
    max_relative: float
    max_bc_residual: float
    trials: int


def admissible_stacks(spec: BoundarySpec, l: float, count: int, rng: np.random.Generator,
                      lam_scale: float = 2.0) -> list[np.ndarray]:
    """Endpoint stacks ``[Y(0); Y(l)]`` of solutions obeying the conditions.

    Trial solutions are combinations of ``2p`` functions
    ``sum_k c_k s_k(i lam_j x) / (i lam_j)^k`` with random ``lam_j`` and
    ``c``. Their endpoint stacks are linear in the combination weights, so
    admissible weights span the null space of the constraint matrix applied
    to that stack map.
    """
    p = spec.p
    cols = []
    for _ in range(2 * p):
        lam = complex(*rng.uniform(-lam_scale, lam_scale, 2))
        inits = rng.standard_normal(p) + 1j * rng.standard_normal(p)
        y0, yl = _stacks(p, lam, inits, l)
        cols.append(np.concatenate([y0, yl]))
    m = np.array(cols).T
    cm = constraint_matrix(spec) @ m
    _, sv, vh = np.linalg.svd(cm)
    rank = int(np.sum(sv > 1e-10 * sv[0]))
    if rank < p:
        raise np.linalg.LinAlgError(f"degenerate boundary specification: constraint rank {rank} < {p}")
    null = vh[rank:].conj().T
    out = []
    for _ in range(count):
        w = null @ (rng.standard_normal(null.shape[1]) + 1j * rng.standard_normal(null.shape[1]))
        out.append(m @ w)
    return out


def selfadjointness_check(spec: BoundarySpec, l: float, trial_count: int,
                          rng: np.random.Generator | int = 0) -> WitnessReport:
    """Largest ``|Q_l(y, z) - Q_0(y, z)|`` over admissible pairs.

    The relative figure divides by ``|Y| |Z|`` of the endpoint stacks.
    """
    rng = np.random.default_rng(rng)
    p = spec.p
    stacks = admissible_stacks(spec, l, 2 * trial_count, rng)
    worst = worst_rel = worst_bc = 0.0
    for t in range(trial_count):
        u, v = stacks[2 * t], stacks[2 * t + 1]
        dq = concomitant(p, u[p:], v[p:]) - concomitant(p, u[:p], v[:p])
        scale = np.linalg.norm(u) * np.linalg.norm(v)
        worst = max(worst, abs(dq))
        worst_rel = max(worst_rel, abs(dq) / scale)
        bc = boundary_residual(spec, l, u[:p], u[p:])
        worst_bc = max(worst_bc, max(bc.values()) / np.linalg.norm(u))
    return WitnessReport(worst, worst_rel, worst_bc, trial_count)
