"""Scalar q-arithmetic: q-numbers, q-Pochhammer symbols and terminating
basic hypergeometric sums.

Terminating 4phi3 sums with base ``p = -q`` cancel catastrophically (terms
of size 1e50 summing to O(1) are routine at q = 0.3, n = 15), so
:func:`phi_terminating` escalates to MPFR arithmetic until a rigorous-ish
error bound ``eps * sum|terms|`` drops below the target accuracy. Parameters
whose exact value matters (``p**-n``, ``abcd * p**(n-1)``) are passed as
:class:`QParam` so they are formed inside the extended-precision context
rather than rounded to double first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .errors import SeriesUndefined

# relative accuracy requested from phi_terminating (about 1.4e-14)
_TARGET = 2.0**-46
_MAX_PREC = 1 << 14


@dataclass(frozen=True)
class QContext:
    """Deformation parameter ``q`` in (0, 1) and the derived base ``p = -q``."""

    q: float
    tol: float = 1e-12
    p: float = field(init=False)

    def __post_init__(self):
        q = float(self.q)
        if not 0.0 < q < 1.0:
            raise ValueError(f"q must satisfy 0 < q < 1, got {self.q!r}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", -q)

    @property
    def sqrt_q(self) -> float:
        return math.sqrt(self.q)

    @property
    def qsym(self) -> float:
        """q^{1/2} + q^{-1/2}."""
        return math.sqrt(self.q) + 1.0 / math.sqrt(self.q)

    @property
    def qdiff(self) -> float:
        """q - q^{-1} (negative)."""
        return self.q - 1.0 / self.q


def as_context(ctx: Union[QContext, float]) -> QContext:
    return ctx if isinstance(ctx, QContext) else QContext(ctx)


def q_number(n, ctx: Union[QContext, float]):
    """[n]_q = (q^n - q^-n) / (q - q^-1); works on arrays."""
    q = as_context(ctx).q
    return (q**n - q ** (-n)) / (q - 1.0 / q)


def q_pochhammer(a, base: float, s: int) -> float:
    """(a; base)_s.  ``a`` may be a sequence, giving (a1, a2, ...; base)_s."""
    if s < 0:
        raise ValueError("q_pochhammer needs s >= 0")
    if isinstance(a, (list, tuple)):
        out = 1.0
        for x in a:
            out *= q_pochhammer(x, base, s)
        return out
    out = 1.0
    bk = 1.0
    for _ in range(s):
        out *= 1.0 - bk * a
        bk *= base
    return out


@dataclass(frozen=True)
class QParam:
    """The parameter ``prod(factors) / prod(inverse) * base**power``."""

    factors: tuple = ()
    inverse: tuple = ()
    power: int = 0

    def value(self, base: float) -> float:
        v = 1.0
        for f in self.factors:
            v *= f
        for f in self.inverse:
            v /= f
        return v * base**self.power

    def mp_value(self, base):
        v = mpfr(1)
        for f in self.factors:
            v = v * _mp(f)
        for f in self.inverse:
            v = v / _mp(f)
        return v * base**self.power


_to_mpfr = np.frompyfunc(mpfr, 1, 1)


def _mp(x):
    """mpfr scalar, or an object array of mpfr for array input."""
    return _to_mpfr(x) if isinstance(x, np.ndarray) else mpfr(x)


def _to_double(x):
    return np.array([float(v) for v in x.ravel()]).reshape(x.shape) if isinstance(x, np.ndarray) \
        else float(x)


Param = Union[float, QParam]


def _as_qparam(x: Param) -> QParam:
    if isinstance(x, QParam):
        return x
    return QParam((x,)) if isinstance(x, np.ndarray) else QParam((float(x),))


def _any_zero(d) -> bool:
    return bool((d == 0.0).any()) if isinstance(d, np.ndarray) else d == 0.0


def _double_pass(num, den, base, arg, nmax, extra):
    total = 0.0
    abs_sum = 0.0
    term = 1.0
    bk = 1.0
    for k in range(nmax + 1):
        total += term
        abs_sum += abs(term)
        if k == nmax:
            break
        ratio = arg / (1.0 - bk * base)
        for x in den:
            d = 1.0 - x * bk
            if _any_zero(d):
                raise SeriesUndefined("series undefined for these parameters")
            ratio = ratio / d
        if extra:
            ratio = ratio * (-bk) ** extra
        for x in num:
            ratio = ratio * (1.0 - x * bk)
        term = term * ratio
        bk *= base
    return total, abs_sum


def _mp_pass(num, den, base, arg, nmax, extra, prec):
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        b = mpfr(base)
        g = mpfr(arg)
        num_mp = [x.mp_value(b) for x in num]
        den_mp = [x.mp_value(b) for x in den]
        total = mpfr(0)
        term = mpfr(1)
        bk = mpfr(1)
        for k in range(nmax + 1):
            total += term
            if k == nmax:
                break
            ratio = g / (1 - bk * b)
            if extra:
                ratio = ratio * (-bk) ** extra
            for x in den_mp:
                ratio = ratio / (1 - x * bk)
            for x in num_mp:
                ratio = ratio * (1 - x * bk)
            term = term * ratio
            bk *= b
        return _to_double(total)


def _shaped(value, shape):
    return np.broadcast_to(value, shape).astype(float) if shape else float(value)


def phi_terminating(numerators: Sequence[Param], denominators: Sequence[Param],
                    base: float, arg: float, nmax: int) -> float:
    """Terminating basic hypergeometric series r_phi_s.

    The first numerator must be ``base**-nmax``; it is rebuilt exactly from
    ``nmax`` (termination is never detected from floating point). Parameters
    may hold numpy arrays; the sum then broadcasts and returns an array.
    """
    if nmax < 0:
        raise ValueError("nmax must be non-negative")
    num = [_as_qparam(x) for x in numerators]
    den = [_as_qparam(x) for x in denominators]
    if not num:
        raise ValueError("need at least the terminating numerator")
    first = num[0].value(base)
    expected = base ** (-nmax)
    if abs(first - expected) > 1e-10 * abs(expected):
        raise ValueError("first numerator must equal base**-nmax for a terminating series")
    num[0] = QParam(power=-nmax)
    extra = 1 + len(den) - len(num)

    num_d = [x.value(base) for x in num]
    den_d = [x.value(base) for x in den]
    # scalar parameters first: the term ratio stays a scalar until the
    # array-valued factors enter
    order = sorted(range(len(num)), key=lambda i: isinstance(num_d[i], np.ndarray))
    num, num_d = [num[i] for i in order], [num_d[i] for i in order]
    arrays = [x for x in num_d + den_d if isinstance(x, np.ndarray)]
    shape = np.broadcast(*arrays).shape if arrays else ()
    for k in range(nmax):
        for x in den_d:
            if _any_zero(x * base**k - 1.0):
                raise SeriesUndefined("series undefined for these parameters")

    total, abs_sum = _double_pass(num_d, den_d, base, arg, nmax, extra)
    vector = isinstance(total, np.ndarray)
    if not (np.isfinite(total).all() if vector else math.isfinite(total)):
        raise SeriesUndefined("series undefined for these parameters")

    def good(prec, value):
        ok = abs_sum * 2.0**-prec * 4 * (nmax + 1) <= _TARGET * abs(value)
        return bool(ok.all()) if vector else ok

    if good(53, total):
        return _shaped(total, shape)
    # one extended pass serves the whole batch, at the precision its worst
    # element needs
    nz = np.abs(np.atleast_1d(total)) > 0
    lost = np.log2(np.atleast_1d(abs_sum)[nz] / np.abs(np.atleast_1d(total)[nz]))
    lost = int(lost.max()) if lost.size and np.all(nz) else 53
    # past ~48 lost bits the double total is noise and says nothing about
    # the true cancellation
    prec = 64 + lost if lost < 48 else 256
    prec = max(prec, 128)
    while True:
        value = _mp_pass(num, den, base, arg, nmax, extra, prec)
        if good(prec, value) or prec >= _MAX_PREC:
            return _shaped(value, shape)
        prec *= 2


def phi43_terminating(numerators: Sequence[Param], denominators: Sequence[Param],
                      base: float, arg: float, nmax: int) -> float:
    if len(numerators) != 4 or len(denominators) != 3:
        raise ValueError("4phi3 takes four numerator and three denominator parameters")
    return phi_terminating(numerators, denominators, base, arg, nmax)


def naive_phi_terminating(numerators, denominators, base, arg, nmax, dps: int = 200) -> float:
    """Direct term-by-term reference sum via mpmath q-Pochhammers.

    Slow and independent of :func:`phi_terminating`; used as a test oracle.
    """
    import mpmath

    with mpmath.workdps(dps):
        b = mpmath.mpf(base)

        def mp(x):
            x = _as_qparam(x)
            v = mpmath.mpf(1)
            for f in x.factors:
                v *= mpmath.mpf(f)
            for f in x.inverse:
                v /= mpmath.mpf(f)
            return v * b**x.power

        num = [mp(x) for x in numerators]
        num[0] = b ** (-nmax)
        den = [mp(x) for x in denominators]
        r, s = len(num), len(den)
        total = mpmath.mpf(0)
        for k in range(nmax + 1):
            t = mpmath.mpf(1)
            for x in num:
                t *= mpmath.qp(x, b, k)
            for x in den:
                t /= mpmath.qp(x, b, k)
            t *= ((-1) ** k * b ** (k * (k - 1) // 2)) ** (1 + s - r)
            t *= mpmath.mpf(arg) ** k / mpmath.qp(b, b, k)
            total += t
        return float(total)
