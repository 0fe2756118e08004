"""Spectral data of L_theta = (-iD)^3 with y(0) = 0, y'(0) = theta y'(l), y(l) = 0.

The characteristic function is
``Delta(lam) = (s_2(i lam l) + theta s_2(-i lam l)) / lam**2``. On the real
axis it factors as ``(2 e^{i phi/2} / (3 lam**2)) F(lam l)`` with a real
function ``F``; roots are searched on ``F`` scaled by ``e^{-a sqrt3/2}`` so the
search never overflows.

Double precision cannot certify ``|Delta(mu)|`` directly once ``mu l`` is
large: ``Delta`` grows like ``e^{mu l sqrt3/2}``, so the rounding of ``mu``
alone produces huge residuals. Each root is therefore refined in mpmath and
``Delta`` is evaluated there at a precision that covers the growth; the
stored ``mu`` is that refined root rounded to a double.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal

import mpmath as mp
import numpy as np

from .cyclo import roots_of_unity
from .numutil import DEFAULT_QUADRATURE, QuadraturePolicy, RootBracket, find_root, integrate_or_raise
from .pfun import EXP_LIMIT, eval_all

SQ3 = np.sqrt(3.0)
THETA_GUARD = 1e-8
NEAR_EIGEN_ABS = 1e-8
NEAR_EIGEN_REL = 1e-10
SPURIOUS_NORM = 1e-13

Branch = Literal["positive", "negative"]


class NearEigenvalueError(ValueError):
    """Raised when ``lam**3`` is too close to the spectrum for the resolvent."""

    def __init__(self, message: str, delta: complex):
        super().__init__(message)
        self.delta = delta


@dataclass(frozen=True)
class OperatorSpec3:
    theta: complex
    l: float = 1.0

    def __post_init__(self):
        theta = complex(self.theta)
        if abs(abs(theta) - 1) > 1e-14:
            raise ValueError(f"theta must be unimodular, |theta| = {abs(theta)!r}")
        if abs(theta + 1) <= THETA_GUARD:
            raise ValueError("theta = -1 excluded: lam = 0 is then an eigenvalue (eigenfunction x^2 - x l)")
        if not (np.isfinite(self.l) and self.l > 0):
            raise ValueError(f"interval length must be finite and positive, got {self.l}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "l", float(self.l))

    @classmethod
    def from_phi(cls, phi: float, l: float = 1.0) -> "OperatorSpec3":
        if not -np.pi < phi <= np.pi:
            raise ValueError(f"phi must lie in (-pi, pi], got {phi}")
        return cls(complex(np.exp(1j * phi)), l)

    @property
    def phi(self) -> float:
        return float(np.angle(self.theta))

    def conjugate(self) -> "OperatorSpec3":
        return OperatorSpec3(self.theta.conjugate(), self.l)


def zero_mode_theta_minus_one(l: float, x, c: complex = 1.0):
    """Eigenfunction ``c (x**2 - x l)`` for eigenvalue 0 when ``theta = -1``."""
    x = np.asarray(x, dtype=float)
    return c * (x**2 - x * l)


# --- characteristic function ------------------------------------------------


def _s2_pair(spec: OperatorSpec3, lam):
    lam = np.asarray(lam, dtype=complex)
    a = eval_all(3, 1j * lam * spec.l)
    b = eval_all(3, -1j * lam * spec.l)
    return a, b


def char_fn(spec: OperatorSpec3, lam):
    """``(s_2(i lam l) + theta s_2(-i lam l)) / lam**2``."""
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam == 0):
        raise ValueError("char_fn is singular at lam = 0; use char_fn_at_zero")
    a, b = _s2_pair(spec, lam)
    out = (a[2] + spec.theta * b[2]) / lam**2
    return complex(out) if out.ndim == 0 else out


def char_fn_product_form(spec: OperatorSpec3, lam):
    """``(theta s_1^2 + s_2 (1 - theta s_0)) / lam**2`` at ``i lam l``."""
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam == 0):
        raise ValueError("char_fn is singular at lam = 0; use char_fn_at_zero")
    s0, s1, s2 = eval_all(3, 1j * lam * spec.l)
    out = (spec.theta * s1**2 + s2 * (1 - spec.theta * s0)) / lam**2
    return complex(out) if out.ndim == 0 else out


def char_fn_at_zero(spec: OperatorSpec3) -> complex:
    return complex(-spec.l**2 * (1 + spec.theta) / 2)


def _real_form(a, phi: float, scaled: bool):
    a = np.asarray(a, dtype=float)
    c1 = np.cos(a - phi / 2)
    c2 = np.cos((a + phi) / 2)
    s2 = np.sin((a + phi) / 2)
    if scaled:
        e = np.exp(-a * SQ3 / 2)
        e2 = e * e
        return c1 * e - c2 * (1 + e2) / 2 - SQ3 * s2 * (1 - e2) / 2
    b = a * SQ3 / 2
    if np.any(np.abs(b) > EXP_LIMIT):
        raise OverflowError("lam l sqrt3/2 exceeds the exponential range")
    return c1 - c2 * np.cosh(b) - SQ3 * s2 * np.sinh(b)


def char_fn_real(spec: OperatorSpec3, lam):
    """Real form ``F(lam l)`` whose real zeros are those of ``char_fn``.

    ``char_fn(lam) = 2 e^{i phi/2} F(lam l) / (3 lam**2)`` on the real axis.
    """
    out = _real_form(np.asarray(lam, dtype=float) * spec.l, spec.phi, scaled=False)
    return float(out) if out.ndim == 0 else out


def char_fn_real_scaled(spec: OperatorSpec3, lam):
    """``F(lam l) e^{-lam l sqrt3/2}`` for ``lam >= 0``; bounded, same zeros."""
    out = _real_form(np.asarray(lam, dtype=float) * spec.l, spec.phi, scaled=True)
    return float(out) if out.ndim == 0 else out


def char_fn_mp(phi: float, l: float, lam, dps: int) -> mp.mpc:
    """``Delta`` from the exponential sums, in mpmath at ``dps`` digits."""
    with mp.workdps(dps):
        theta = mp.expj(mp.mpf(phi))
        lam = mp.mpmathify(lam)
        zeta = [mp.expj(2 * mp.pi * m / 3) for m in range(3)]

        def s2(z):
            return sum(zeta[m] ** -2 * mp.exp(z * zeta[m]) for m in range(3)) / 3

        z = 1j * lam * l
        return (s2(z) + theta * s2(-z)) / lam**2


def kernel_identity_residual(x: complex, l: complex, t: complex) -> tuple[float, float]:
    """``|lhs - rhs|`` of the order-3 kernel identity and a magnitude scale."""
    sx = eval_all(3, x)
    sl = eval_all(3, l)
    slt = eval_all(3, l - t)
    lhs_terms = [
        sx[1] * slt[1] * sl[2],
        -sx[1] * slt[2] * sl[1],
        sx[2] * slt[2] * sl[0],
        -sx[2] * slt[1] * sl[1],
    ]
    rhs_terms = [
        eval_all(3, -t)[2] * eval_all(3, x - l)[2],
        -eval_all(3, x - t)[2] * eval_all(3, -l)[2],
    ]
    res = abs(sum(lhs_terms) - sum(rhs_terms))
    scale = sum(abs(v) for v in lhs_terms + rhs_terms)
    return float(res), float(scale)


# --- eigenvalues ------------------------------------------------------------


@dataclass(frozen=True)
class EigenRecord:
    """One eigenvalue ``mu**3``; ``delta_abs`` is ``|Delta(mu)|`` at the certified root."""

    branch: Branch
    n: int
    mu: float
    eigenvalue: float
    a_norm: float
    log_a_norm: float
    delta_abs: float
    delta_scaled: float
    eigen_denominator: float


def _label(a: float, phi: float) -> int:
    return int(np.round((a + phi + np.pi / 3) / (2 * np.pi)))


def _positive_roots_scaled(phi: float, n_max: int) -> list[tuple[int, float]]:
    """Roots ``a = lam l > 0`` of the scaled real form, labelled by index ``n``."""

    def g(a):
        return float(_real_form(a, phi, scaled=True))

    a_end = 2 * np.pi * (n_max + 1)
    grid = np.concatenate([np.geomspace(1e-6, 0.5, 40), np.arange(0.5, a_end, np.pi / 8)[1:]])
    vals = _real_form(grid, phi, scaled=True)
    roots: list[tuple[int, float]] = []
    for i in range(len(grid) - 1):
        if vals[i] == 0 or np.sign(vals[i]) != np.sign(vals[i + 1]):
            r = find_root(g, RootBracket(grid[i], grid[i + 1], 1e-13 * 2 * np.pi)).x
            n = _label(r, phi)
            if n <= n_max:
                roots.append((n, r))
    labels = [n for n, _ in roots]
    if len(set(labels)) != len(labels):
        raise RuntimeError(f"two roots share the index label at phi={phi}: {labels}")
    ordinary = [r for n, r in roots if n >= 1]
    for a, b in zip(ordinary, ordinary[1:]):
        if abs((b - a) - 2 * np.pi) > 0.5 * 2 * np.pi:
            raise RuntimeError(f"root spacing {b - a:.6g} departs from 2 pi by more than 50%: missed root")
    missing = set(range(1, n_max + 1)) - set(labels)
    if missing:
        raise RuntimeError(f"no root found for indices {sorted(missing)} at phi={phi}")
    return roots


def _refine_mp(a: float, phi: float) -> tuple[mp.mpf, int]:
    beta = a * SQ3 / 2
    dps = int(30 + beta / np.log(10)) + 5
    with mp.workdps(dps):
        p = mp.mpf(phi)
        s3 = mp.sqrt(3)

        def g(x):
            e = mp.exp(-x * s3 / 2)
            e2 = e * e
            return (mp.cos(x - p / 2) * e - mp.cos((x + p) / 2) * (1 + e2) / 2
                    - s3 * mp.sin((x + p) / 2) * (1 - e2) / 2)

        root = mp.findroot(g, mp.mpf(a), solver="newton", tol=mp.mpf(10) ** (-dps + 5))
        return root, dps


def _scaled_eigen_denominator(theta: complex, mu: float, l: float) -> float:
    """``|1 - theta s_0(i mu l)|``; ``inf`` where ``s_0`` would overflow."""
    b = abs(mu) * l * SQ3 / 2
    if b < 600:
        return float(abs(1 - theta * eval_all(3, 1j * mu * l)[0]))
    return float("inf")


@dataclass(frozen=True)
class _Coefficients:
    """``N(x) e^{-beta} = sum_m c[m] exp(i mu zeta_m (x - anchor[m]))``."""

    mu: float
    beta: float
    c: tuple[complex, complex, complex]
    anchor: tuple[float, float, float]


def _coefficients(theta: complex, mu: float, l: float) -> _Coefficients:
    zeta = roots_of_unity(3).as_array()
    rates = -mu * np.imag(zeta)  # |exp(i mu zeta_m x)| = exp(rate_m x)
    g = int(np.argmax(rates))
    beta = float(rates[g] * l)
    # s_k(i mu l) e^{-beta}
    e = np.exp(1j * mu * zeta * l - beta)
    s_hat = [np.sum(zeta ** (-k) * e) / 3 for k in range(3)]
    one_hat = np.exp(-beta)
    c = [(theta * s_hat[1] / zeta[m] + (one_hat - theta * s_hat[0]) / zeta[m] ** 2) / 3 for m in range(3)]
    # the growing coefficient cancels to leading order; fix it from N(l) = 0
    anchor = [0.0, 0.0, 0.0]
    c[g] = -sum(c[m] * np.exp(1j * mu * zeta[m] * l) for m in range(3) if m != g)
    anchor[g] = l
    return _Coefficients(mu, beta, tuple(complex(v) for v in c), tuple(anchor))


def _scaled_numerator(coef: _Coefficients, x, deriv: int = 0):
    x = np.asarray(x, dtype=float)
    zeta = roots_of_unity(3).as_array()
    out = np.zeros(x.shape, dtype=complex)
    for m in range(3):
        k = 1j * coef.mu * zeta[m]
        out += coef.c[m] * k**deriv * np.exp(k * (x - coef.anchor[m]))
    return out


def _norm(fn: Callable, l: float, policy: QuadraturePolicy) -> float:
    val = integrate_or_raise(lambda t: np.abs(fn(t)) ** 2, 0.0, l, policy)
    return float(np.sqrt(val.real))


@dataclass(frozen=True)
class Eigenfunction:
    spec: OperatorSpec3
    record: EigenRecord

    @cached_property
    def _coef(self) -> _Coefficients:
        return _coefficients(self.spec.theta, self.record.mu, self.spec.l)

    @cached_property
    def _scale(self) -> float:
        return float(np.exp(self.record.log_a_norm - self._coef.beta))

    def __call__(self, x, deriv: int = 0):
        out = _scaled_numerator(self._coef, x, deriv) / self._scale
        return complex(out) if out.ndim == 0 else out


def _make_record(spec: OperatorSpec3, branch: Branch, n: int, a_double: float,
                 phi_search: float, policy: QuadraturePolicy) -> EigenRecord:
    root, dps = _refine_mp(a_double, phi_search)
    sign = 1 if branch == "positive" else -1
    with mp.workdps(dps):
        mu_mp = sign * root / spec.l
        delta = char_fn_mp(spec.phi, spec.l, mu_mp, dps)
        delta_abs = float(abs(delta))
        mu = float(mu_mp)
    delta_scaled = abs(float(_real_form(abs(mu) * spec.l, phi_search, scaled=True)))
    coef = _coefficients(spec.theta, mu, spec.l)
    norm_hat = _norm(lambda t: _scaled_numerator(coef, t), spec.l, policy)
    if norm_hat < SPURIOUS_NORM:
        raise RuntimeError(f"spurious root mu={mu}: eigenfunction numerator vanishes")
    log_a = float(np.log(norm_hat) + coef.beta)
    return EigenRecord(
        branch=branch,
        n=n,
        mu=mu,
        eigenvalue=mu**3,
        a_norm=float(np.exp(log_a)) if log_a < 700 else float("inf"),
        log_a_norm=log_a,
        delta_abs=delta_abs,
        delta_scaled=delta_scaled,
        eigen_denominator=_scaled_eigen_denominator(spec.theta, mu, spec.l),
    )


def eigen_zeros(spec: OperatorSpec3, n_max: int,
                policy: QuadraturePolicy = DEFAULT_QUADRATURE) -> list[EigenRecord]:
    """Positive roots ``lam_n(phi)`` and negative roots ``-lam_n(-phi)``, ``n <= n_max``.

    A root below the first regular one is labelled ``n = 0`` if present.
    Negative roots come from the positive roots for the conjugate parameter,
    since ``Delta_theta(-lam) = theta Delta_conj(theta)(lam)``.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    out: list[EigenRecord] = []
    for branch, phi in (("positive", spec.phi), ("negative", -spec.phi)):
        for n, a in _positive_roots_scaled(phi, n_max):
            out.append(_make_record(spec, branch, n, a, phi, policy))
    return out


def eigenfunction(spec: OperatorSpec3, rec: EigenRecord, x, deriv: int = 0):
    """Normalised ``u(mu, x)`` (or a derivative) with ``a_n > 0``."""
    return Eigenfunction(spec, rec)(x, deriv)


def eigen_numerator(spec: OperatorSpec3, mu: complex, x):
    """Unnormalised numerator evaluated term by term (small ``|mu| l`` only)."""
    x = np.asarray(x, dtype=float)
    sx = eval_all(3, 1j * mu * x)
    sl = eval_all(3, 1j * mu * spec.l)
    th = spec.theta
    return th * sx[1] * sl[1] + sx[2] * (1 - th * sl[0])


def smallest_records(records: list[EigenRecord], count: int) -> list[EigenRecord]:
    return sorted(records, key=lambda r: abs(r.mu))[:count]


def gram_matrix(spec: OperatorSpec3, records: list[EigenRecord],
                policy: QuadraturePolicy = DEFAULT_QUADRATURE) -> np.ndarray:
    fns = [Eigenfunction(spec, r) for r in records]
    k = len(fns)
    g = np.zeros((k, k), dtype=complex)
    for i in range(k):
        for j in range(i, k):
            v = integrate_or_raise(lambda t: fns[i](t) * np.conj(fns[j](t)), 0.0, spec.l, policy)
            g[i, j] = v
            g[j, i] = np.conj(v)
    return g


@dataclass(frozen=True)
class AsymptoticReport:
    """Drift of the positive roots against the two readings of the asymptotic law."""

    n: tuple[int, ...]
    drift_phi_over_l: tuple[float, ...]
    drift_phi: tuple[float, ...]
    fitted_offset: float


def asymptotic_report(spec: OperatorSpec3, records: list[EigenRecord]) -> AsymptoticReport:
    pos = sorted((r for r in records if r.branch == "positive" and r.n >= 1), key=lambda r: r.n)
    ns = tuple(r.n for r in pos)
    l, phi = spec.l, spec.phi
    base = [2 * np.pi * r.n / l - np.pi / (3 * l) for r in pos]
    d_a = tuple(abs(r.mu - (b - phi / l)) for r, b in zip(pos, base))
    d_b = tuple(abs(r.mu - (b - phi)) for r, b in zip(pos, base))
    # offset c in mu_n = 2 pi n / l - c - pi/(3l), from the last root
    fitted = float(base[-1] - pos[-1].mu) if pos else float("nan")
    return AsymptoticReport(ns, d_a, d_b, fitted)


# --- resolvent ----------------------------------------------------------------


def _s_at(z, k: int):
    return eval_all(3, z)[k]


def resolvent_guard(spec: OperatorSpec3, lam: complex) -> complex:
    """``Delta(lam)``, raising :class:`NearEigenvalueError` if too small to divide by."""
    lam = complex(lam)
    if lam == 0:
        return char_fn_at_zero(spec)
    a, b = _s2_pair(spec, lam)
    num = a[2] + spec.theta * b[2]
    delta = complex(num / lam**2)
    rel = abs(num) / (abs(a[2]) + abs(b[2]))
    if abs(delta) <= NEAR_EIGEN_ABS * spec.l**2 or rel <= NEAR_EIGEN_REL:
        raise NearEigenvalueError(
            f"lam**3 is within guard distance of the spectrum: |Delta(lam)| = {abs(delta):.3e}"
            f" (relative to its terms {rel:.3e})",
            delta,
        )
    return delta


@dataclass
class Resolvent:
    """``(L_theta - lam**3)^{-1} f`` with the ``x``-independent integrals precomputed."""

    spec: OperatorSpec3
    lam: complex
    f: Callable[[np.ndarray], np.ndarray]
    policy: QuadraturePolicy = DEFAULT_QUADRATURE
    breakpoints: tuple[float, ...] | None = None

    def __post_init__(self):
        self.lam = complex(self.lam)
        if self.lam == 0:
            raise ValueError("the closed form divides by lam; use lam != 0")
        self.delta = resolvent_guard(self.spec, self.lam)
        il, l, th = 1j * self.lam, self.spec.l, self.spec.theta
        f = self.f
        self.s2l = complex(_s_at(il * l, 2))
        self.s2ml = complex(_s_at(-il * l, 2))
        self.a_int = self._int(lambda t: _s_at(-il * t, 2) * f(t), 0.0, l)
        self.b_int = self._int(lambda t: _s_at(il * (l - t), 2) * f(t), 0.0, l)
        self.pref = 1j / (self.lam**4 * self.delta)
        self._th = th

    def _int(self, g, a, b) -> complex:
        return integrate_or_raise(lambda t: np.asarray(g(t), dtype=complex), a, b, self.policy, self.breakpoints)

    def __call__(self, x: float, deriv: int = 0) -> complex:
        """Value (``deriv = 0``) or derivative up to second order at ``x``."""
        if not 0 <= deriv <= 2:
            raise ValueError("derivatives up to order 2 are available")
        x = float(x)
        il, l, th, f = 1j * self.lam, self.spec.l, self._th, self.f
        k = (2 - deriv) % 3
        w = il**deriv

        def kern(t):
            return w * _s_at(il * (x - t), k) * f(t)

        left = self._int(kern, 0.0, x) if x > 0 else 0j
        right = self._int(kern, x, l) if x < l else 0j
        tail = th * w * complex(_s_at(il * (x - l), k)) * self.a_int - w * complex(_s_at(il * x, k)) * self.b_int
        return complex(self.pref * (self.s2l * left - th * self.s2ml * right + tail))

    def sample(self, xs, deriv: int = 0) -> np.ndarray:
        return np.array([self(x, deriv) for x in np.atleast_1d(xs)])


def resolvent_apply(spec: OperatorSpec3, lam: complex, f, x, policy: QuadraturePolicy = DEFAULT_QUADRATURE):
    r = Resolvent(spec, lam, f, policy)
    if np.ndim(x) == 0:
        return r(x)
    return r.sample(x)


def _gauss_nodes(l: float, n: int = 96):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * l * (x + 1), 0.5 * l * w


@dataclass(frozen=True)
class ExpansionReport:
    """Truncated eigen-expansion of the resolvent against the closed form (L2 on (0, l))."""

    terms: int
    difference: float
    tail_bound: float
    residual_mass: float


def eigen_expansion(spec: OperatorSpec3, lam: complex, f, records: list[EigenRecord],
                    terms: int, resolvent: Resolvent | None = None, nodes: int = 96) -> ExpansionReport:
    """Compare ``sum <f, u_n> u_n / (mu_n^3 - lam^3)`` over the ``terms`` smallest ``|mu|``.

    The bound is ``sqrt(|f|^2 - sum |<f, u_n>|^2) / min_{excluded} |mu^3 - lam^3|``,
    valid because the eigenfunctions form an orthonormal basis. ``records``
    must contain more than ``terms`` entries so the minimum is taken over a
    genuine excluded eigenvalue.
    """
    ordered = sorted(records, key=lambda r: abs(r.mu))
    if len(ordered) <= terms:
        raise ValueError("need more records than expansion terms to bound the tail")
    used, excluded = ordered[:terms], ordered[terms:]
    xs, ws = _gauss_nodes(spec.l, nodes)
    fx = np.asarray(f(xs), dtype=complex)
    lam3 = complex(lam) ** 3
    approx = np.zeros_like(fx)
    mass = 0.0
    for r in used:
        u = Eigenfunction(spec, r)(xs)
        cn = np.sum(ws * fx * np.conj(u))
        mass += abs(cn) ** 2
        approx += cn * u / (r.eigenvalue - lam3)
    f2 = float(np.sum(ws * np.abs(fx) ** 2))
    residual = max(f2 - mass, 0.0)
    # every excluded mu, listed or beyond the listed range, is at least this large
    tops = [max(abs(r.mu) for r in records if r.branch == b) for b in ("positive", "negative")]
    mu_min = min([abs(r.mu) for r in excluded] + tops)
    gap = mu_min**3 - abs(lam3)
    bound = np.sqrt(residual) / gap if gap > 0 else float("inf")
    if resolvent is None:
        resolvent = Resolvent(spec, lam, f)
    exact = resolvent.sample(xs)
    diff = float(np.sqrt(np.sum(ws * np.abs(exact - approx) ** 2)))
    return ExpansionReport(terms, diff, float(bound), residual)
