"""Property suites behind ``phyper check``: one row per property."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import cauchy, cyclo, pfun, sabc, spectral3, zeros3
from .numutil import apply_minus_iD_pow, derivative


@dataclass(frozen=True)
class CheckRow:
    name: str
    samples: int
    max_residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_residual) and self.max_residual <= self.threshold)


def _disc(rng, n, radius):
    r = radius * np.sqrt(rng.uniform(0, 1, n))
    return r * np.exp(1j * rng.uniform(-np.pi, np.pi, n))


def _row(name, values, threshold) -> CheckRow:
    values = np.atleast_1d(np.asarray(values, dtype=float))
    return CheckRow(name, int(values.size), float(np.max(values)) if values.size else 0.0, threshold)


def suite_cyclo(rng) -> Iterator[CheckRow]:
    sums, prod, conj, unit = [], [], [], []
    for p in range(1, 17):
        z = cyclo.roots_of_unity(p).as_array()
        for n in range(-2 * p, 2 * p + 1):
            target = p if n % p == 0 else 0
            sums.append(abs(np.sum(z**n) - target) / p)
        for j in range(p):
            for m in range(p):
                prod.append(abs(z[j] * z[m] - z[(j + m) % p]))
            conj.append(abs(np.conj(z[j]) - z[(p - j) % p]))
        u = cyclo.dft_matrix(p)
        unit.append(np.max(np.abs(u @ u.conj().T - np.eye(p))) / p**2)
    yield _row("power_sums", sums, 1e-14)
    yield _row("product_rule", prod, 4 * np.finfo(float).eps)
    yield _row("conjugation_rule", conj, 4 * np.finfo(float).eps)
    yield _row("dft_unitarity_over_p2", unit, 1e-13)
    recon, even = [], []
    for _ in range(50):
        p = int(rng.integers(2, 8))
        coeffs = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        f = np.polynomial.Polynomial(coeffs)
        z = complex(_disc(rng, 1, 3)[0])
        comps = [cyclo.kp_component(f, p, k, z) for k in range(p)]
        recon.append(abs(sum(comps) - f(z)) / (1 + abs(f(z))))
        zeta = cyclo.roots_of_unity(p)
        for k in range(p):
            j = int(rng.integers(p))
            lhs = cyclo.kp_component(f, p, k, zeta[j] * z)
            even.append(abs(lhs - zeta[j * k] * comps[k]) / (1 + abs(comps[k])))
    yield _row("kp_reconstruction", recon, 1e-12)
    yield _row("kp_evenness", even, 1e-12)


def suite_pfun(rng) -> Iterator[CheckRow]:
    z = _disc(rng, 400, 5)
    s = pfun.eval_all(2, z)
    scale = np.exp(np.abs(z.real))
    yield _row("p2_cosh_sinh", np.maximum(np.abs(s[0] - np.cosh(z)), np.abs(s[1] - np.sinh(z))) / scale, 1e-12)
    euler, rot, det, group, spect = [], [], [], [], []
    for p in range(2, 8):
        zs = _disc(rng, 40, 3)
        s = pfun.eval_all(p, zs)
        euler.extend(np.abs(s.sum(axis=0) - np.exp(zs)) / np.abs(np.exp(zs)))
        zeta = cyclo.roots_of_unity(p)
        for m in range(1, p):
            sr = pfun.eval_all(p, zeta[m] * zs)
            for k in range(p):
                rot.extend(np.abs(sr[k] - zeta[m * k] * s[k]) / np.maximum(np.abs(s[k]), 1e-300))
        for z1 in zs[:10]:
            z2 = complex(_disc(rng, 1, 3)[0]) / 2
            w1 = pfun.w_matrix(p, z1 / 2)
            det.append(abs(np.linalg.det(pfun.w_matrix(p, z1)) - 1))
            group.append(np.max(np.abs(pfun.w_matrix(p, z1 / 2 + z2) - w1 @ pfun.w_matrix(p, z2))) / np.max(np.abs(w1)) ** 2)
            spect.append(np.max(np.abs(pfun.w_matrix(p, z1) - pfun.w_matrix_spectral(p, z1))))
    yield _row("sum_equals_exp", euler, 1e-12)
    yield _row("rotation_covariance", rot, 1e-12)
    yield _row("det_w_equals_one", det, 1e-9)
    yield _row("w_group_law", group, 1e-11)
    yield _row("w_spectral_form", spect, 1e-11)
    agree = []
    for p in range(2, 6):
        zs = rng.uniform(0.5, 2, 100) * np.exp(1j * rng.uniform(-np.pi, np.pi, 100))
        a = pfun.eval_all(p, zs, "taylor")
        b = pfun.eval_all(p, zs, "exponential")
        agree.extend((np.abs(a - b) / np.abs(a)).ravel())
    yield _row("regime_agreement", agree, 1e-11)
    xs = rng.uniform(-8, 8, 100)
    real = [np.max(np.abs(pfun.eval_all(p, xs).imag) / np.exp(np.abs(xs))) for p in range(2, 8)]
    yield _row("real_on_real_axis", real, 1e-14)
    cyc = []
    for p in (2, 3, 4, 5):
        for x in rng.uniform(-2, 2, 5):
            for k in range(p):
                d = derivative(lambda t: pfun.eval_all(p, t)[k], x, 1, h=1e-5)
                cyc.append(abs(d - pfun.eval_s(p, (k - 1) % p, x)))
    yield _row("derivative_cycle", cyc, 1e-7)
    wr = []
    for p in range(2, 7):
        y = rng.standard_normal(p) + 1j * rng.standard_normal(p)
        d0 = np.linalg.det(pfun.circulant(y))
        for x in rng.uniform(-2, 2, 5):
            wr.append(abs(np.linalg.det(pfun.solution_matrix(p, y, x)) - d0) / max(1, abs(d0)))
    yield _row("wronskian_constant", wr, 1e-9)
    resid: dict[str, list[float]] = {}
    for _ in range(100):
        z1, w1 = _disc(rng, 2, 2)
        scale = 1 + np.exp(2 * abs(z1))
        for key, v in pfun.identity_residuals_p3(z1, w1).items():
            resid.setdefault(key, []).append(v / scale)
    for key, vals in resid.items():
        yield _row(f"identity_{key}", vals, 1e-10)


def suite_zeros(rng) -> Iterator[CheckRow]:
    tables = [zeros3.find_zeros(k, 20) for k in range(3)]
    yield _row("zero_residuals", [r for t in tables for r in t.residuals], 1e-11)
    yield _row("origin_zeros", [tables[1].residuals[0], tables[2].residuals[0]], 1e-14)
    vanish = [abs(pfun.eval_s(3, t.k, x)) / np.exp(abs(x) / 2) for t in tables for x in t.zeros]
    yield _row("s_k_vanishes", vanish, 1e-11)
    yield _row("interlacing_violations", [interlacing_violations(tables)], 0)
    mono = 0
    for t in tables:
        off = np.asarray(t.offsets[2:])
        mono += int(np.sum(np.diff(off) >= 0))
    yield _row("offset_monotone_violations", [mono], 0)
    sep = [max(0.0, 0.5 - min(np.abs(np.diff(t.zeros)))) for t in tables]
    yield _row("separation_deficit", sep, 0)
    simple = [sum(1 for x, m in zip(t.zeros, t.multiplicities) if x < 0 and m != 1) for t in tables]
    yield _row("nonsimple_negative_zeros", simple, 0)
    y = np.linspace(1e-4, 50, 2000)
    margin = zeros3.off_axis_margin(y)
    yield _row("off_axis_margin_negative", [max(0.0, -np.min(margin))], 0)
    ys = np.geomspace(1e-4, 0.05, 50)
    yield _row("off_axis_margin_over_y3_small", zeros3.off_axis_margin(ys) / ys**3, 0.2)
    sysr = [max(map(abs, zeros3.system_residuals(t.k, x, 0.0))) for t in tables for x in t.zeros]
    yield _row("system_form", sysr, 1e-11)
    z = rng.uniform(0.3, 6, 10000) * np.exp(1j * rng.uniform(-np.pi, np.pi, 10000))
    z = z[zeros3.distance_to_rays(z) >= 0.2]
    low = np.min(np.abs(pfun.eval_all(3, z)))
    yield CheckRow("off_ray_min_modulus_inverse", int(z.size), float(1 / low), 100.0)


def interlacing_violations(tables) -> int:
    z0 = np.asarray(tables[0].zeros)
    bad = 0
    for a, b in zip(z0, z0[1:]):
        for t in tables[1:]:
            inside = sum(1 for x in t.zeros if b < x < a)
            bad += inside != 1
    return bad


def suite_cauchy(rng) -> Iterator[CheckRow]:
    init_def, ode, lin = [], [], []
    for _ in range(6):
        p = int(rng.integers(2, 5))
        prob = random_cauchy(rng, p)
        init_def.append(cauchy_initial_defect(prob))
        ode.append(cauchy_ode_residual(prob, rng.uniform(0.1, 0.9, 2)))
        other = random_cauchy(rng, p, lam=prob.lam)
        summed = cauchy.CauchyProblem(
            p, prob.lam, tuple(a + b for a, b in zip(prob.inits, other.inits)),
            lambda t, f=prob.forcing, g=other.forcing: f(t) + g(t), prob.l,
        )
        x = float(rng.uniform(0.1, 0.9))
        lhs = cauchy.solve_inhomogeneous(summed, x)
        rhs = cauchy.solve_inhomogeneous(prob, x) + cauchy.solve_inhomogeneous(other, x)
        lin.append(abs(lhs - rhs) / max(1.0, abs(rhs)))
    yield _row("initial_data_defect", init_def, 1e-6)
    yield _row("ode_residual", ode, 1e-5)
    yield _row("linearity", lin, 1e-12)
    zero = cauchy.CauchyProblem(3, 1.0, (0, 0, 0), lambda t: np.ones_like(t), 1.0)
    oracle = [abs(cauchy.solve_inhomogeneous(zero, x) - cauchy.constant_forcing_series(1.0, x)) for x in (0.2, 0.5, 1.0)]
    yield _row("constant_forcing_series", oracle, 1e-12)


def random_forcing(rng, terms: int = 4) -> Callable:
    a = rng.standard_normal(terms) + 1j * rng.standard_normal(terms)
    w = rng.uniform(0, 4, terms)
    ph = rng.uniform(0, 2 * np.pi, terms)

    def f(t):
        t = np.asarray(t, dtype=float)
        return sum(a[j] * np.cos(w[j] * t + ph[j]) for j in range(terms))

    return f


def random_cauchy(rng, p: int, lam: complex | None = None) -> cauchy.CauchyProblem:
    if lam is None:
        lam = complex(rng.uniform(0.3, 2.0) * np.exp(1j * rng.uniform(-np.pi, np.pi)))
    inits = tuple(rng.standard_normal(p) + 1j * rng.standard_normal(p))
    return cauchy.CauchyProblem(p, lam, inits, random_forcing(rng), 1.0)


def cauchy_initial_defect(prob: cauchy.CauchyProblem) -> float:
    """Largest ``|y^(k)(0) - y_k|`` with derivatives taken by finite differences."""
    def y(xs):
        return cauchy.solve(prob, xs)

    worst = abs(cauchy.solve_inhomogeneous(prob, 0.0) - prob.inits[0])
    for k in range(1, prob.p):
        worst = max(worst, abs(derivative(y, 0.0, k) - prob.inits[k]))
    return float(worst)


def cauchy_ode_residual(prob: cauchy.CauchyProblem, xs) -> float:
    """``|(-iD)^p y - lam^p y - f|`` relative to ``max(|lam^p y|, |f|, 1)``."""
    def y(t):
        return cauchy.solve(prob, t)

    worst = 0.0
    for x in np.atleast_1d(xs):
        yx = cauchy.solve_inhomogeneous(prob, x)
        fx = complex(prob.forcing(np.asarray(x))) if prob.forcing else 0j
        res = apply_minus_iD_pow(prob.p, y, x) - prob.lam**prob.p * yx - fx
        worst = max(worst, abs(res) / max(abs(prob.lam**prob.p * yx), abs(fx), 1.0))
    return float(worst)


def suite_sabc(rng) -> Iterator[CheckRow]:
    alg = []
    for p in range(1, 9):
        j = sabc.concomitant_matrix(p)
        alg.append(np.max(np.abs(j.T - (-1) ** (p - 1) * j)))
        alg.append(np.max(np.abs(j @ j - (1 if p % 2 else -1) * np.eye(p, dtype=int))))
    yield _row("jp_algebra", alg, 0)
    qf, gram, ann = [], [], []
    for p in range(2, 8):
        basis = sabc.jp_eigenbasis(p)
        m = basis.matrix()
        gram.append(np.max(np.abs(m.conj().T @ m - np.eye(p))))
        for _ in range(5):
            h = rng.standard_normal(p) + 1j * rng.standard_normal(p)
            a, b = sabc.quadratic_form_split(p, h)
            qf.append(abs(a - b) / np.vdot(h, h).real)
        k = p // 2
        v = sabc.random_unitary(k, rng)
        a_plus = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        h = basis.plus @ a_plus + basis.minus @ (v @ a_plus)
        ann.append(abs(np.vdot(h, sabc.concomitant_matrix(p) @ h)) / np.vdot(h, h).real)
    yield _row("eigenbasis_gram", gram, 1e-13)
    yield _row("quadratic_form_split", qf, 1e-12)
    yield _row("annulment", ann, 1e-12)
    herm, trip = [], []
    for k in (1, 2, 3, 4):
        v = sabc.random_unitary(k, rng)
        b = sabc.cayley_b(v)
        herm.append(np.max(np.abs(b - b.conj().T)))
        trip.append(np.max(np.abs(sabc.cayley_v(b) - v)))
    yield _row("cayley_self_adjoint", herm, 1e-12)
    yield _row("cayley_round_trip", trip, 1e-10)
    for p in (2, 3, 4, 5):
        for kind in ("separated", "unseparated"):
            worst = 0.0
            for _ in range(5):
                rep = sabc.selfadjointness_check(sabc.random_spec(p, kind, rng), 1.0, 5, rng)
                worst = max(worst, rep.max_relative)
            yield CheckRow(f"witness_p{p}_{kind}", 25, worst, 1e-9)


def suite_spectral(rng) -> Iterator[CheckRow]:
    sym = []
    for _ in range(60):
        spec = spectral3.OperatorSpec3.from_phi(float(rng.uniform(-3, 3)), float(rng.uniform(0.5, 2)))
        lam = complex(_disc(rng, 1, 4)[0])
        sym.extend(char_fn_symmetry_residuals(spec, lam))
    yield _row("char_fn_symmetries", sym, 1e-11)
    lim = []
    for _ in range(10):
        spec = spectral3.OperatorSpec3.from_phi(float(rng.uniform(-3, 3)), float(rng.uniform(0.5, 2)))
        d0 = spectral3.char_fn_at_zero(spec)
        lim.append(abs(spectral3.char_fn(spec, 1e-4) - d0) / abs(d0))
    yield _row("char_fn_zero_limit", lim, 1e-6)
    spec = spectral3.OperatorSpec3.from_phi(0.0, 1.0)
    recs = spectral3.eigen_zeros(spec, 10)
    yield _row("root_delta_certified", [r.delta_abs for r in recs], 1e-10)
    yield _row("eigen_denominator_inverse", [1 / r.eigen_denominator for r in recs], 1e6)
    small = spectral3.smallest_records(recs, 10)
    g = spectral3.gram_matrix(spec, small)
    yield _row("gram_defect", [np.max(np.abs(g - np.eye(len(small))))], 1e-7)
    bc = []
    for r in small:
        u = spectral3.Eigenfunction(spec, r)
        bc.extend([abs(u(0.0)), abs(u(spec.l)), abs(u(0.0, 1) - spec.theta * u(spec.l, 1))])
    yield _row("eigenfunction_boundary", bc, 1e-9)
    lam = 0.5 + 0.3j
    res = spectral3.Resolvent(spec, lam, random_forcing(rng))
    yield _row("resolvent_boundary", resolvent_boundary_defects(res), 1e-8)
    kid = []
    for _ in range(100):
        x, ll, t = _disc(rng, 3, 2)
        r, s = spectral3.kernel_identity_residual(x, ll, t)
        kid.append(r / (1 + s))
    yield _row("kernel_identity", kid, 1e-10)


def char_fn_symmetry_residuals(spec, lam) -> list[float]:
    """Relative residuals of the conjugation, reflection and rotation symmetries."""
    th = spec.theta
    conj = spec.conjugate()
    d = spectral3.char_fn(spec, lam)
    scale = max(abs(d), 1e-300)
    zeta = cyclo.roots_of_unity(3)
    out = [
        abs(np.conj(d) - np.conj(th) * spectral3.char_fn(spec, np.conj(lam))) / scale,
        abs(np.conj(d) - spectral3.char_fn(conj, -np.conj(lam))) / scale,
        abs(spectral3.char_fn(spec, -lam) - th * spectral3.char_fn(conj, lam)) / scale,
    ]
    for j in (1, 2):
        out.append(abs(spectral3.char_fn(spec, lam * zeta[j]) - d) / scale)
    out.append(abs(spectral3.char_fn_product_form(spec, lam) - d) / scale)
    return out


def resolvent_boundary_defects(res: spectral3.Resolvent) -> list[float]:
    l = res.spec.l
    return [abs(res(0.0)), abs(res(l)), abs(res(0.0, 1) - res.spec.theta * res(l, 1))]


SUITES: dict[str, Callable] = {
    "cyclo": suite_cyclo,
    "pfun": suite_pfun,
    "zeros": suite_zeros,
    "cauchy": suite_cauchy,
    "sabc": suite_sabc,
    "spectral": suite_spectral,
}


def run_suite(name: str, seed: int = 0) -> list[tuple[str, CheckRow]]:
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise KeyError(name)
    out = []
    for n in names:
        rng = np.random.default_rng([seed, list(SUITES).index(n)])
        out.extend((n, row) for row in SUITES[n](rng))
    return out
