import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ospq_racah.errors import SeriesUndefined
from ospq_racah.qkernel import (QContext, QParam, naive_phi_terminating, phi43_terminating,
                                phi_terminating, q_number, q_pochhammer)

qs = st.floats(0.05, 0.95)


def test_context_rejects_q_outside_unit_interval():
    for bad in (0.0, 1.0, -0.3, 1.5):
        with pytest.raises(ValueError):
            QContext(bad)


def test_context_derived_quantities():
    c = QContext(0.49)
    assert c.p == -0.49
    assert c.sqrt_q == pytest.approx(0.7)
    assert c.qsym == pytest.approx(0.7 + 1 / 0.7)
    assert c.qdiff == pytest.approx(0.49 - 1 / 0.49)


def test_q_number_examples():
    assert q_number(0, 0.3) == 0.0
    assert q_number(1, 0.3) == pytest.approx(1.0, abs=1e-15)
    assert q_number(2, 0.5) == pytest.approx(2.5, rel=1e-15)


@given(n=st.floats(-20, 20), q=qs)
def test_q_number_is_odd(n, q):
    assert q_number(n, q) == pytest.approx(-q_number(-n, q), rel=1e-13, abs=1e-300)


@given(n=st.integers(1, 30))
def test_q_number_tends_to_n(n):
    """[n]_q -> n as q -> 1."""
    assert q_number(n, 1 - 1e-7) == pytest.approx(n, rel=1e-6)


def test_q_pochhammer_examples():
    assert q_pochhammer(0.37, -0.4, 0) == 1.0
    for k in range(1, 6):
        assert q_pochhammer(1.0, -0.4, k) == 0.0
    assert q_pochhammer(2.0, -0.5, 2) == pytest.approx(-2.0, rel=1e-15)
    with pytest.raises(ValueError):
        q_pochhammer(0.5, 0.5, -1)


@given(a=st.floats(-3, 3), base=st.floats(-0.95, 0.95), s=st.integers(0, 25))
def test_q_pochhammer_step(a, base, s):
    """(a; base)_{s+1} = (a; base)_s (1 - base^s a)."""
    lhs = q_pochhammer(a, base, s + 1)
    rhs = q_pochhammer(a, base, s) * (1 - base**s * a)
    assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-300)


@given(a=st.floats(-2, 2), b=st.floats(-2, 2), base=st.floats(-0.9, 0.9), s=st.integers(0, 10))
def test_q_pochhammer_multi_argument_is_product(a, b, base, s):
    assert q_pochhammer([a, b], base, s) == q_pochhammer(a, base, s) * q_pochhammer(b, base, s)


def test_qparam_value_matches_mpfr_value():
    prm = QParam((0.6, -0.4), (0.3,), power=-5)
    assert prm.value(-0.7) == pytest.approx(float(prm.mp_value(-0.7)), rel=1e-15)


def test_phi_trivial_cases():
    assert phi43_terminating([1.0, 0.3, 0.2, -0.5], [0.1, 0.4, 0.6], -0.7, -0.7, 0) == 1.0
    # a numerator equal to 1 kills every k >= 1 term
    p = -0.6
    n = 5
    assert phi43_terminating([p**-n, 0.3, 1.0, -0.5], [0.1, 0.4, 0.6], p, p, n) == pytest.approx(1.0)


def test_phi_requires_terminating_first_numerator():
    with pytest.raises(ValueError):
        phi43_terminating([0.5, 0.3, 0.2, 0.1], [0.1, 0.4, 0.6], -0.7, -0.7, 3)
    with pytest.raises(ValueError):
        phi43_terminating([1.0, 0.3, 0.2], [0.1, 0.4, 0.6], -0.7, -0.7, 0)


def test_phi_vanishing_denominator_is_reported():
    p = -0.5
    # denominator p^-2: the factor (p^-2; p)_k vanishes at k = 3 <= nmax
    with pytest.raises(SeriesUndefined) as exc:
        phi43_terminating([p**-4, 0.3, 0.2, 0.1], [p**-2, 0.4, 0.6], p, p, 4)
    assert exc.value.code == "series_undefined"


def _random_phi(rng):
    base = -float(rng.uniform(0.2, 0.95))
    n = int(rng.integers(0, 16))
    num = [QParam(power=-n)] + [float(x) for x in rng.uniform(-1.5, 1.5, 3)]
    den = [float(x) for x in rng.uniform(-1.5, 1.5, 3)]
    return num, den, base, base, n


def test_phi_matches_naive_summation():
    """30 random parameter sets against term-by-term mpmath summation."""
    rng = np.random.default_rng(7)
    for _ in range(30):
        args = _random_phi(rng)
        ref = naive_phi_terminating(*args)
        got = phi43_terminating(*args)
        assert got == pytest.approx(ref, rel=1e-12, abs=1e-300)


def test_phi_heavy_cancellation_matches_naive():
    """q = 0.3, n = 15: terms far larger than the sum."""
    p = -0.3
    n = 15
    a, b, c, d, z = 0.8, -0.7, 0.85, 0.6, 2.7
    num = [QParam(power=-n), QParam((a, b, c, d), power=n - 1), QParam((-a, z)), QParam((a,), (z,))]
    den = [QParam((-a, b)), QParam((a, c)), QParam((a, d))]
    ref = naive_phi_terminating(num, den, p, p, n)
    assert phi43_terminating(num, den, p, p, n) == pytest.approx(ref, rel=1e-12)


def test_phi_broadcasts_over_array_parameters():
    p = -0.55
    n = 9
    zs = np.array([0.4, 1.1, 2.9])
    num = [QParam(power=-n), 0.2, QParam((0.7, zs)), -0.3]
    den = [0.5, -0.6, 0.35]
    vec = phi43_terminating(num, den, p, p, n)
    assert vec.shape == zs.shape
    for z, v in zip(zs, vec):
        one = phi43_terminating([QParam(power=-n), 0.2, 0.7 * z, -0.3], den, p, p, n)
        assert v == pytest.approx(one, rel=1e-13)
    assert phi43_terminating([1.0, 0.2, QParam((0.7, zs)), -0.3], den, p, p, 0).tolist() == [1.0] * 3


@given(n=st.integers(0, 6), base=st.floats(-0.9, -0.2), u0=st.floats(-1.0, 1.0))
@settings(max_examples=40)
def test_phi_is_polynomial_in_a_numerator_parameter(n, base, u0):
    """The (n+1)-th finite difference in a free numerator parameter vanishes."""
    den = [0.31, -0.47, 0.63]
    h = 0.25
    us = u0 + h * np.arange(n + 2)
    vals = np.array([phi43_terminating([QParam(power=-n), 0.4, u, -0.2], den, base, base, n)
                     for u in us])
    diff = np.diff(vals, n + 1)[0]
    coef = [math.comb(n + 1, j) for j in range(n + 2)]
    scale = float(np.dot(coef, np.abs(vals)))
    assert abs(diff) <= 1e-11 * max(scale, 1.0)


def test_phi_generic_rphis_against_naive():
    """Unbalanced series (r != s + 1) carry the extra sign/power factor."""
    rng = np.random.default_rng(11)
    for r, s in ((2, 2), (3, 1), (1, 0)):
        base = -0.63
        n = 7
        num = [QParam(power=-n)] + [float(x) for x in rng.uniform(-1, 1, r - 1)]
        den = [float(x) for x in rng.uniform(-1, 1, s)]
        ref = naive_phi_terminating(num, den, base, 0.8, n)
        assert phi_terminating(num, den, base, 0.8, n) == pytest.approx(ref, rel=1e-12)
