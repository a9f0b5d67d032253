import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from voidcrack import crack, hsie, thermo
from voidcrack.crack import CrackProblem
from voidcrack.material import DimensionlessGroups, pde_residual
from voidcrack.symbol import SymbolSpec
from voidcrack.thermo import (
    FluxProfile, NetFluxWarning, ThermoConfigError, ThermoCrackProblem, raw_trace, theta_field, theta_trace,
    thermo_rhs, thermo_scf,
)

BASE = CrackProblem(SymbolSpec(0.2, 0.0), a=1.0, load=0.5)
ONE = FluxProfile.constant(1.0, 1.0)


@pytest.fixture(autouse=True)
def quiet_net_flux():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NetFluxWarning)
        yield


def test_constant_flux_trace():
    diff = raw_trace(ONE, 0.0) - raw_trace(ONE, 1.0)
    assert diff == pytest.approx(2 * math.log(2) / math.pi, abs=1e-6)
    assert theta_trace(ONE, 0.0) == 0.0


def test_zero_flux_trace():
    zero = FluxProfile.constant(0.0, 1.0)
    assert np.all(theta_trace(zero, np.array([-0.5, 0.3])) == 0.0)


def test_net_flux_warning():
    with pytest.warns(NetFluxWarning):
        theta_trace(ONE, 0.5)
    odd = FluxProfile.from_samples([-1.0, 1.0], [-1.0, 1.0], 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error", NetFluxWarning)
        theta_trace(odd, 0.5)


def test_odd_flux_gives_odd_trace():
    odd = FluxProfile.from_samples([-1.0, 1.0], [-1.0, 1.0], 1.0)
    x = np.array([0.2, 0.7, 1.5])
    assert np.allclose(theta_trace(odd, x), -theta_trace(odd, -x), atol=1e-12)


def test_trace_tolerance_independent():
    flux = FluxProfile.from_samples([-1.0, 0.0, 1.0], [0.5, 2.0, 1.0], 1.0)
    x = np.array([-0.8, 0.35, 1.0, 2.0])
    a = theta_trace(flux, x, tol=1e-10)
    b = theta_trace(flux, x, tol=5e-11)
    assert np.max(np.abs(a - b)) < 1e-8


def test_field_is_harmonic_and_matches_trace():
    groups = DimensionlessGroups(c2=0.2, H=0.0, N=0.0, l1=None, l2=1.0, B=0.1, l3=1.0)
    r = pde_residual(lambda x, y: (0.0, 0.0, 0.0, theta_field(ONE, x, y)), (0.2, 1.0), groups, h=1e-3)
    assert abs(r[3]) <= 1e-6
    assert theta_field(ONE, 0.4, 1e-9) == pytest.approx(float(raw_trace(ONE, 0.4)), abs=1e-7)


def test_flux_profiles(tmp_path):
    path = tmp_path / "flux.csv"
    path.write_text("-1,0\n0,1\n1,0\n")
    prof = FluxProfile.from_csv(path, 1.0)
    assert prof.f0(0.5) == pytest.approx(0.5)
    assert prof.net_flux() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        FluxProfile.from_samples([0.0, 1.0], [1.0, 1.0], 1.0)
    bad = tmp_path / "bad.csv"
    bad.write_text("-1,0,3\n1,0,3\n")
    with pytest.raises(ValueError):
        FluxProfile.from_csv(bad, 1.0)


def test_configuration_errors():
    with pytest.raises(ThermoConfigError):
        ThermoCrackProblem(BASE, FluxProfile.constant(1.0, 2.0), 0.1)
    with pytest.raises(ThermoConfigError):
        thermo_rhs(ThermoCrackProblem(BASE, ONE, None))


def test_trivial_cases_are_elastic():
    elastic = crack.assemble(BASE)
    x = np.linspace(-0.95, 0.95, 7)
    for prob in (ThermoCrackProblem(BASE, ONE, 0.0), ThermoCrackProblem(BASE, FluxProfile.constant(0.0, 1.0), 0.3)):
        hp = thermo_rhs(prob)
        assert np.array_equal(hp.rhs_values(x), elastic.rhs_values(x))
        res = thermo_scf(prob, None, 200)
        ref = crack.scf(crack.crack_opening(BASE, None, 200), BASE)
        assert res.ratio == ref.ratio and res.k == ref.k


def test_rhs_even_and_recomposition():
    B = 0.3
    prob = ThermoCrackProblem(BASE, ONE, B)
    hp = thermo_rhs(prob)
    x = np.array([0.1, 0.45, 0.9])
    assert np.allclose(hp.rhs_values(x), hp.rhs_values(-x), rtol=1e-12)
    diff = hp.rhs_values(x) - crack.assemble(BASE).rhs_values(x)
    expected = prob.kappa * B * math.pi * theta_trace(ONE, x) / (1 - BASE.spec.c2)
    assert np.allclose(diff, expected, rtol=1e-12, atol=1e-14)


@settings(max_examples=10)
@given(B=st.floats(0.01, 2.0), value=st.floats(-3.0, 3.0).filter(lambda v: abs(v) > 1e-3))
def test_superposition(B, value):
    prob = ThermoCrackProblem(BASE, FluxProfile.constant(value, 1.0), B)
    combined = hsie.solve(thermo_rhs(prob), 100).g
    mech = hsie.solve(crack.assemble(BASE), 100).g
    heat = hsie.solve(thermo.thermal_only(prob), 100).g
    assert np.max(np.abs(combined - (mech + heat))) <= 1e-9 * np.max(np.abs(combined))


def test_small_thermal_load_continuity():
    ref = thermo_scf(ThermoCrackProblem(BASE, FluxProfile.constant(0.0, 1.0), 0.2), None, 200).ratio
    small = thermo_scf(ThermoCrackProblem(BASE, FluxProfile.constant(1e-3, 1.0), 0.2), None, 200)
    assert abs(small.ratio - ref) < 1e-2
    assert small.diagnostics["thermal"]["thermal"] and not small.diagnostics["thermal"]["kernel_modified"]
