import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from voidcrack import kernel
from voidcrack.hsie import Grid
from voidcrack.kernel import (
    KernelConfig, KernelDomainError, RegularKernel, characteristic_coefficient, full_kernel, panel_integrals,
    regular_antiderivative, regular_kernel,
)
from voidcrack.material import MaterialParams, derive_groups
from voidcrack.symbol import SymbolSpec, asymptote_c0, asymptote_c1

HALF = KernelConfig(SymbolSpec(0.2, 0.5))
CLASSICAL = KernelConfig(SymbolSpec(0.2, 0.0))


def test_characteristic_coefficient():
    assert characteristic_coefficient(SymbolSpec(0.2, 0.0)) == pytest.approx(-0.2546479, abs=1e-7)
    assert characteristic_coefficient(SymbolSpec(0.2, 0.5)) == pytest.approx(-0.0636620, abs=1e-7)
    assert abs(characteristic_coefficient(SymbolSpec(0.2, 1 - 1e-9))) < 1e-18


@pytest.mark.parametrize("c2", [0.1, 0.2, 0.5])
def test_regular_part_vanishes_classically(c2):
    cfg = KernelConfig(SymbolSpec(c2, 0.0))
    x = np.array([1e-3, 0.1, 1.0, 42.0])
    assert np.all(np.abs(regular_kernel(cfg, x)) <= 1e-10)


@given(x=st.floats(1e-3, 50.0))
def test_regular_kernel_even(x):
    assert regular_kernel(HALF, x) == regular_kernel(HALF, -x)
    assert regular_antiderivative(HALF, -x) == -regular_antiderivative(HALF, x)


def test_log_slope_against_fit():
    xs = np.geomspace(1e-4, 1e-2, 15)
    d1, d0 = np.polyfit(np.log(xs), regular_kernel(HALF, xs), 1)
    # increase from 0.001 to 0.01 divided by ln 10 is the slope in ln x
    slope = (regular_kernel(HALF, 0.01) - regular_kernel(HALF, 0.001)) / math.log(10)
    assert slope == pytest.approx(d1, rel=0.02)
    # analytic log coefficient: transform of c1/s gives -(c1/c0) * (-ln x)
    spec = HALF.spec
    assert d1 == pytest.approx(asymptote_c1(spec) / asymptote_c0(spec), rel=0.02)


def test_full_kernel_examples():
    assert full_kernel(CLASSICAL, 0.5) == pytest.approx(-1.0185916, abs=1e-7)
    x = 1e-3
    ratio = full_kernel(HALF, x) * math.pi * x * x / -asymptote_c0(HALF.spec)
    assert ratio == pytest.approx(1.0, abs=1e-4)
    assert full_kernel(HALF, 0.37) == full_kernel(HALF, -0.37)


@pytest.mark.parametrize("x", [1e-2, 0.1, 0.5, 2.0, 10.0])
def test_refinement_stable(x):
    base = regular_kernel(HALF, x)
    assert regular_kernel(HALF.refined(), x) == pytest.approx(base, rel=1e-8)


@pytest.mark.parametrize("x", [1e-2, 0.3, 3.0, 30.0])
def test_tail_subtraction_matches_plain_transform(x):
    # tail_order=1 integrates L - c0 s directly on the oscillatory tail
    plain = KernelConfig(HALF.spec, tail_order=1)
    assert full_kernel(plain, x) == pytest.approx(full_kernel(HALF, x), rel=1e-8)


def test_antiderivative_is_integral_of_kernel():
    for u in (0.05, 0.7, 3.0):
        ref, _ = integrate.quad(lambda v: regular_kernel(HALF, v), 0.0, u, limit=200, epsabs=1e-13)
        assert regular_antiderivative(HALF, u) == pytest.approx(ref, rel=1e-9)
    assert regular_antiderivative(HALF, 0.0) == 0.0


def test_kernel_depends_only_on_groups():
    p = MaterialParams(lam=3, mu=1, alpha=2, beta=1, xi=0.5)
    q = MaterialParams(lam=6, mu=2, alpha=4, beta=2, xi=1.0)
    cfg_p = KernelConfig(SymbolSpec.from_groups(derive_groups(p)))
    cfg_q = KernelConfig(SymbolSpec.from_groups(derive_groups(q)))
    xs = np.array([0.01, 0.4, 2.5])
    first = regular_kernel(cfg_p, xs)
    kernel._regular_value.cache_clear()
    second = regular_kernel(cfg_q, xs)
    assert np.array_equal(first, second)


def test_domain_errors():
    with pytest.raises(KernelDomainError):
        regular_kernel(HALF, 0.0)
    with pytest.raises(KernelDomainError):
        regular_kernel(HALF, 101.0)
    with pytest.raises(KernelDomainError):
        regular_antiderivative(HALF, 250.0)


def test_config_validation():
    with pytest.raises(ValueError):
        KernelConfig(HALF.spec, s_cut=5.0)
    with pytest.raises(ValueError):
        KernelConfig(HALF.spec, panel_tol=1e-2)
    with pytest.raises(ValueError):
        KernelConfig(HALF.spec, tail_order=3)


def test_panel_integrals_classical_zero():
    grid = Grid(1.0, 20)
    assert np.all(np.abs(panel_integrals(CLASSICAL, grid, grid.points[3])) <= 1e-10)


def test_panel_integrals_sum_to_whole_interval():
    grid = Grid(1.0, 40)
    xi = grid.points[11]
    whole, _ = integrate.quad(lambda t: regular_kernel(HALF, xi - t), -1.0, 1.0, points=[xi],
                              limit=400, epsabs=1e-13, epsrel=1e-12)
    assert panel_integrals(HALF, grid, xi).sum() == pytest.approx(whole, rel=1e-7)


def test_panel_methods_agree():
    grid = Grid(1.0, 16)
    xi = grid.points[5]
    exact = panel_integrals(HALF, grid, xi, method="antiderivative")
    adaptive = panel_integrals(HALF, grid, xi, method="adaptive")
    assert np.allclose(adaptive, exact, rtol=1e-8, atol=1e-12)
    with pytest.raises(ValueError):
        panel_integrals(HALF, grid, xi, method="simpson")


def test_panel_integrals_symmetric_about_centre():
    grid = Grid(1.0, 21)
    vals = panel_integrals(HALF, grid, 0.0)
    assert np.allclose(vals, vals[::-1], rtol=1e-13, atol=0)


def test_regular_kernel_object():
    rk = RegularKernel(HALF)
    assert rk(0.3) == regular_kernel(HALF, 0.3)
    assert not rk.vanishes and RegularKernel(CLASSICAL).vanishes
    s = np.array([1.0, 100.0])
    assert np.allclose(rk.symbol(s), -(HALF.spec.N * 0 + 1) * kernel.remainder(HALF.spec, s) / 0.2)
