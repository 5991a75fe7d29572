"""Divided-difference operator with reflections whose eigenfunctions are the
q-Bannai-Ito polynomials, and the realization J1, J2 of the q-BI algebra.

    D_z f(z) = B(z) (f(1/(q z)) - f(z)) + B(-1/z) (f(q/z) - f(z))

Reading the shift-reflection products as compositions (reflect first, then
shift) sends the B(z) term to z -> 1/(q z) and the B(-1/z) term to
z -> q/z. This is the only assignment under which D_z Q_n = Lambda_n Q_n.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import ExcludedPoint, RealizationDomainError
from .polyfamilies import ABCDParams, qbi_eval_all, qbi_recurrence_coeffs
from .qkernel import as_context

POLE_TOL = 1e-12


@dataclass(frozen=True)
class LaurentFunction:
    """A function of z held as a Laurent coefficient map, a callable, or both."""

    coeffs: Optional[Mapping[int, float]] = None
    func: Optional[Callable] = None

    def __post_init__(self):
        if self.coeffs is None and self.func is None:
            raise ValueError("need coefficients or an evaluation procedure")

    def __call__(self, z):
        if self.func is not None:
            return self.func(z)
        z = np.asarray(z, dtype=float)
        return sum(c * z**k for k, c in self.coeffs.items())

    def consistency(self, zs) -> float:
        """max |coefficient form - evaluation form| over ``zs``."""
        if self.coeffs is None or self.func is None:
            return 0.0
        zs = np.asarray(zs, dtype=float)
        poly = sum(c * zs**k for k, c in self.coeffs.items())
        return float(np.max(np.abs(poly - self.func(zs))))


def as_function(f) -> Callable:
    return f if callable(f) else LaurentFunction(coeffs=f)


def qbi_function(n: int, params: ABCDParams, ctx) -> Callable:
    return lambda z: qbi_eval_all(n, z, params, ctx)[n]


def b_coeff(z, params: ABCDParams, ctx):
    q = as_context(ctx).q
    z = np.asarray(z, dtype=float)
    den = (1 + z * z) * (1 - q * z * z)
    if np.any(np.abs(den) < POLE_TOL):
        raise ExcludedPoint("evaluation at excluded point")
    a, b, c, d = params.a, params.b, params.c, params.d
    out = (1 + a * z) * (1 + b * z) * (1 - c * z) * (1 - d * z) / den
    return float(out) if out.ndim == 0 else out


def apply_dz(f, z, params: ABCDParams, ctx):
    q = as_context(ctx).q
    f = as_function(f)
    z = np.asarray(z, dtype=float)
    if np.any(z == 0):
        raise ExcludedPoint("evaluation at excluded point")
    fz = f(z)
    out = (b_coeff(z, params, ctx) * (f(1 / (q * z)) - fz)
           + b_coeff(-1 / z, params, ctx) * (f(q / z) - fz))
    return float(out) if np.ndim(out) == 0 else out


def dz_eigenvalue(n: int, params: ABCDParams, ctx) -> float:
    p = as_context(ctx).p
    return p ** (-n) * (1 - p**n) * (1 - params.abcd * p ** (n - 1))


def sample_points(rng: np.random.Generator, k: int, ctx, lo=0.3, hi=3.0, gap=1e-3) -> np.ndarray:
    """Uniform z in [lo, hi] away from the real poles z = q^(+-1/2) of B(z), B(-1/z)."""
    q = as_context(ctx).q
    poles = np.array([q**0.5, q**-0.5])
    out = []
    while len(out) < k:
        z = rng.uniform(lo, hi)
        if np.all(np.abs(z - poles) > gap):
            out.append(z)
    return np.array(out)


def eigen_residual(n: int, zs, params: ABCDParams, ctx) -> float:
    """max |D_z Q_n - Lambda_n Q_n| / max(1, |Q_n|) over ``zs``."""
    zs = np.asarray(zs, dtype=float)
    Qn = qbi_function(n, params, ctx)
    lhs = apply_dz(Qn, zs, params, ctx)
    val = Qn(zs)
    rhs = dz_eigenvalue(n, params, ctx) * val
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(val))))


def omega_constants(params: ABCDParams, ctx) -> tuple[float, float, float]:
    q = as_context(ctx).q
    a, b, c, d = params.a, params.b, params.c, params.d
    abcd = params.abcd
    if abcd <= 0:
        raise RealizationDomainError("realization requires positive abcd")
    r = np.sqrt(abcd)
    pre = (1 + q) * (q - 1) ** 2
    w1 = (-(q**-0.5) * (abcd * q + a * b * q * q - a * c * q * q - b * c * q * q - a * d * q * q
                        - b * d * q * q + c * d * q * q + q**3) / (pre * r))
    w2 = ((a * a * b * c * d * q + a * b * b * c * d * q - a * b * c * c * d * q
           - a * b * c * d * d * q - a * b * c * q * q - a * b * d * q * q + a * c * d * q * q
           + b * c * d * q * q) / (pre * abcd))
    w3 = ((-a * b * c * q - a * b * d * q + a * c * d * q + b * c * d * q + a * q * q + b * q * q
           - c * q * q - d * q * q) / (pre * r))
    return w1, w2, w3


@dataclass(frozen=True)
class Realization:
    params: ABCDParams
    q: float

    def __post_init__(self):
        if self.params.abcd <= 0:
            raise RealizationDomainError("realization requires positive abcd")

    def J1(self, f):
        q, prm = self.q, self.params
        r = np.sqrt(prm.abcd)
        c1 = q**0.5 / ((q - 1 / q) * r)
        c0 = q**0.5 * (q - prm.abcd) / (r * (q * q - 1))
        return lambda z: c1 * apply_dz(f, z, prm, q) + c0 * f(z)

    def J2(self, f):
        q = self.q
        return lambda z: (z - 1 / z) / (q - 1 / q) * f(z)

    def word(self, letters: str, f):
        """Apply a word in J1, J2 read as an operator product: '211' is J2 J1 J1."""
        for ch in reversed(letters):
            f = self.J1(f) if ch == "1" else self.J2(f)
        return f


def realization_check(params: ABCDParams, ctx, K: int = 8, zs=None) -> dict[str, float]:
    """Both cubic relations of the realization on Q_0..Q_K at K+3 sample points.

    J2^2 J1 + (q+1/q) J2 J1 J2 + J1 J2^2 = J1 + s w3 J2 + w1
    J1^2 J2 + (q+1/q) J1 J2 J1 + J2 J1^2 = J2 + s w3 J1 + w2
    """
    ctx = as_context(ctx)
    q = ctx.q
    w1, w2, w3 = omega_constants(params, ctx)
    R = Realization(params, q)
    if zs is None:
        zs = sample_points(np.random.default_rng(0), K + 3, ctx)
    zs = np.asarray(zs, dtype=float)
    qq = q + 1 / q
    s = ctx.qsym
    worst = {"rel_1": 0.0, "rel_2": 0.0}
    for n in range(K + 1):
        f = qbi_function(n, params, ctx)
        for name, x, y, w in (("rel_1", "2", "1", w1), ("rel_2", "1", "2", w2)):
            terms = [R.word(x + x + y, f)(zs), qq * R.word(x + y + x, f)(zs),
                     R.word(y + x + x, f)(zs), -R.word(y, f)(zs),
                     -s * w3 * R.word(x, f)(zs), -w * f(zs)]
            scale = max(1.0, max(float(np.max(np.abs(t))) for t in terms))
            worst[name] = max(worst[name], float(np.max(np.abs(sum(terms)))) / scale)
    return worst


def realization_casimir_spread(params: ABCDParams, ctx, K: int = 6, zs=None) -> float:
    """C Q_n / Q_n should be one constant for all n and z; returns the spread
    relative to max(1, |constant|). C uses I1 = J2, I3 = J1 and
    (iota1, iota2, iota3) = (w2, w3, w1)."""
    ctx = as_context(ctx)
    q = ctx.q
    w1, w2, w3 = omega_constants(params, ctx)
    i1, i2, i3 = w2, w3, w1
    R = Realization(params, q)
    if zs is None:
        zs = sample_points(np.random.default_rng(1), 5, ctx)
    zs = np.asarray(zs, dtype=float)
    sq = q**0.5

    def I2(f):
        a, b = R.word("12", f), R.word("21", f)
        return lambda z: sq * a(z) + b(z) / sq - i2 * f(z)

    vals = []
    for n in range(K + 1):
        f = qbi_function(n, params, ctx)
        I3f = R.J1(f)
        terms = [(q**-0.5 - q**1.5) * R.J2(I2(I3f))(zs), q * R.word("22", f)(zs),
                 I2(I2(f))(zs) / q, q * R.word("11", f)(zs), -(1 - q) * i1 * R.J2(f)(zs),
                 -(1 - 1 / q) * i2 * I2(f)(zs), -(1 - q) * i3 * I3f(zs)]
        fz = f(zs)
        ok = np.abs(fz) > 1e-3
        vals.extend((sum(terms)[ok] / fz[ok]).tolist())
    vals = np.array(vals)
    return float((vals.max() - vals.min()) / max(1.0, np.abs(vals).max()))


def j2_recurrence_residual(n: int, zs, params: ABCDParams, ctx) -> float:
    """J2 Q_n against the three-term recurrence divided by (q - 1/q)."""
    ctx = as_context(ctx)
    zs = np.asarray(zs, dtype=float)
    Q = qbi_eval_all(n + 1, zs, params, ctx)
    A, C = qbi_recurrence_coeffs(n, params, ctx)
    a = params.a
    prev = Q[n - 1] if n > 0 else 0.0
    rhs = (A * Q[n + 1] + (a - 1 / a - A - C) * Q[n] + C * prev) / ctx.qdiff
    lhs = (zs - 1 / zs) / ctx.qdiff * Q[n]
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))))


def degree_preservation_residual(n: int, params: ABCDParams, ctx, rng=None) -> float:
    """D_z x^n is a polynomial of degree <= n in x = z - 1/z: least-squares
    degree-n fit through n + 4 sample points leaves no residual."""
    rng = np.random.default_rng(2) if rng is None else rng
    zs = sample_points(rng, n + 4, ctx)
    f = lambda z: (z - 1 / z) ** n
    y = apply_dz(f, zs, params, ctx)
    x = zs - 1 / zs
    fit = np.polynomial.Polynomial.fit(x, y, n)
    return float(np.max(np.abs(fit(x) - y)) / max(1.0, np.max(np.abs(y))))
