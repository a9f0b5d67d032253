import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from voidcrack.symbol import (
    SymbolSpec, L, asymptote_c0, asymptote_c1, q, q_minus_s, remainder, remainder_over_s,
)


def L_mp(N, c2, s):
    """High-precision oracle with the bracket written exactly as defined."""
    with mpmath.workdps(60):
        N, c2, s = mpmath.mpf(N), mpmath.mpf(c2), mpmath.mpf(s)
        e = 1 - N
        qq = mpmath.sqrt(s * s + e)
        return s / qq * (2 * N * c2 * s * s * (qq - s) + e * (e - c2) * qq)


def test_q_examples():
    assert q(SymbolSpec(0.2, 0.36), 0.0) == pytest.approx(0.8)
    assert q(SymbolSpec(0.2, 0.0), 1.0) == pytest.approx(math.sqrt(2))
    assert q(SymbolSpec(0.2, 0.5), 2.0) == pytest.approx(2.1213203, abs=1e-7)


def test_L_examples():
    assert L(SymbolSpec(0.2, 0.5), 0.0) == 0.0
    assert L(SymbolSpec(0.2, 0.0), 2.0) == pytest.approx(1.6, rel=1e-15)
    # exact arithmetic gives 0.18670068; the seven-digit intermediates round to 0.1867008
    q1 = math.sqrt(1.5)
    assert L(SymbolSpec(0.2, 0.5), 1.0) == pytest.approx((0.2 * (q1 - 1) + 0.15 * q1) / q1, rel=1e-15)
    assert L(SymbolSpec(0.2, 0.5), 1.0) == pytest.approx(0.1867008, abs=5e-7)


def test_asymptote_examples():
    assert asymptote_c0(SymbolSpec(0.2, 0.0)) == pytest.approx(0.8)
    assert asymptote_c0(SymbolSpec(0.2, 0.5)) == pytest.approx(0.2)
    assert asymptote_c0(SymbolSpec(0.3, 1 - 1e-9)) < 1e-17
    assert asymptote_c1(SymbolSpec(0.4, 0.0)) == 0.0


@pytest.mark.parametrize("N, c2", [(0.5, 0.2), (0.9, 0.5), (0.2, 0.1), (0.8, 0.5)])
def test_c1_matches_numerical_limit(N, c2):
    s = mpmath.mpf(10) ** 4
    with mpmath.workdps(60):
        limit = s * (L_mp(N, c2, s) - (1 - mpmath.mpf(N)) ** 2 * (1 - mpmath.mpf(c2)) * s)
    assert abs(asymptote_c1(SymbolSpec(c2, N)) - float(limit)) <= 1e-6 * abs(float(limit))


@pytest.mark.parametrize("s", [0.0, 0.3, 1.0, 7.0, 150.0, 1e4, 1e7])
def test_L_against_high_precision(s):
    spec = SymbolSpec(0.35, 0.6)
    assert float(L(spec, s)) == pytest.approx(float(L_mp(0.6, 0.35, s)), rel=1e-13, abs=1e-300)


@pytest.mark.parametrize("s", [0.5, 3.0, 100.0, 1e5, 1e9])
def test_remainder_against_high_precision(s):
    spec = SymbolSpec(0.2, 0.5)
    with mpmath.workdps(80):
        c0 = (1 - mpmath.mpf(0.5)) ** 2 * (1 - mpmath.mpf(0.2))
        ref = L_mp(0.5, 0.2, s) - c0 * s
    assert float(remainder(spec, s)) == pytest.approx(float(ref), rel=1e-12)


def test_large_s_has_no_cancellation():
    spec = SymbolSpec(0.2, 0.5)
    s = 1e12
    assert q_minus_s(spec, s) == pytest.approx(0.5 / (2e12), rel=1e-14)
    assert s * remainder(spec, s) == pytest.approx(asymptote_c1(spec), rel=1e-10)


def test_validation():
    with pytest.raises(ValueError, match="coupling number"):
        SymbolSpec(0.2, 1.0)
    with pytest.raises(ValueError):
        SymbolSpec(0.0, 0.5)


specs = st.builds(SymbolSpec, c2=st.floats(0.01, 0.99), N=st.floats(0.0, 0.99))


@given(spec=specs)
def test_q_bounds_and_monotone_gap(spec):
    s = np.concatenate([[0.0], np.geomspace(1e-6, 1e6, 400)])
    qs = q(spec, s)
    assert np.all(qs >= np.maximum(s, math.sqrt(spec.eps)) * (1 - 1e-15))
    gap = q_minus_s(spec, s)
    if spec.eps > 1e-12:
        assert np.all(np.diff(gap) < 0)


@given(spec=specs)
def test_asymptotic_sandwich(spec):
    s = np.geomspace(100.0, 1e6, 50)
    lhs = np.abs(L(spec, s) / s - asymptote_c0(spec))
    assert np.all(lhs <= np.abs(asymptote_c1(spec)) / s**2 * 1.5 + 1e-15 * asymptote_c0(spec))


@given(c2=st.floats(0.01, 0.99), s=st.floats(0.0, 1e6))
def test_classical_symbol_is_linear(c2, s):
    spec = SymbolSpec(c2, 0.0)
    assert float(L(spec, s)) == pytest.approx((1 - c2) * s, rel=4e-16, abs=1e-300)
    assert remainder(spec, s) == 0.0


@given(spec=specs, s=st.floats(1e-3, 1e3))
def test_positive_when_slope_positive(spec, s):
    if spec.c2 < spec.eps:
        assert L(spec, s) > 0


@given(spec=specs, s=st.floats(1e-3, 1e3))
def test_remainder_consistency(spec, s):
    assert remainder(spec, s) == pytest.approx(s * remainder_over_s(spec, s), rel=1e-15)
    assert remainder(spec, s) == pytest.approx(L(spec, s) - asymptote_c0(spec) * s, rel=1e-7, abs=1e-12)
