import warnings

import numpy as np
import pytest

from conftest import random_field
from polardirac.clifford import ConfigurationError, basis_for
from polardirac.connections import FieldSample
from polardirac.conservation import (
    EMField,
    RegimeWarning,
    compute_currents,
    compute_currents_polar,
    conservation_residuals,
    conservation_residuals_grid,
    cyclotron_radius,
    em_of,
    fit_circle,
    lorentz_orbit,
    magnetic_energy,
    navier_stokes_residual,
    nonrel_limit_energy,
    second_order_residual,
    spin_charge_identity,
)
from polardirac.madelung import state_from_sample
from polardirac.sources import PlaneWaveSpec, landau_field, plane_wave, superpose
from polardirac.spinor import polar_of

B4 = basis_for(4)
X = np.array([0.1, 0.2, 0.3, 0.4])


def landau():
    return landau_field(B4, 1.6, 0.5, 1.1, [(0.3, 0.2, 1, 1.0), (-0.4, -0.5, 1, 0.6 + 0.2j), (0.1, 0.7, -1, 0.3)])


def mixed_mass_field():
    return superpose(
        plane_wave(PlaneWaveSpec.from_spatial(1.0, [0.2, 0, 0]), B4),
        plane_wave(PlaneWaveSpec.from_spatial(1.5, [0, 0.3, 0.1]), B4),
    )


def test_rest_plane_wave_currents():
    m, q, t = 1.3, 0.7, 0.25
    psi = np.exp(-1j * m * t) * np.array([1, 0, 1, 0])
    dpsi = np.zeros((4, 4), complex)
    dpsi[0] = -1j * m * psi
    cur = compute_currents(FieldSample(psi, dpsi, np.zeros(4), q), B4)
    assert np.allclose(cur.J, [2 * q, 0, 0, 0])
    assert cur.T[0, 0] == pytest.approx(2 * m)
    assert np.allclose(cur.T - np.diag([2 * m, 0, 0, 0]), 0, atol=1e-14)


def test_zero_spinor_leaves_field_stress():
    em = EMField.uniform_magnetic([0.3, -0.2, 1.0], 0.4)
    cur = compute_currents(FieldSample(np.zeros(4), np.zeros((4, 4)), np.zeros(4), 0.4), B4, em)
    assert not np.any(cur.J) and not np.any(cur.Sspin)
    assert np.allclose(cur.T, em.stress())
    # magnetic energy density B^2 / 2
    assert cur.T[0, 0] == pytest.approx(0.5 * (0.09 + 0.04 + 1.0))


def test_uncharged_field_has_no_current():
    f = random_field(4, 0, q=0.0)
    assert not np.any(compute_currents(f.sample(X), B4).J)


@pytest.mark.parametrize("dim", [2, 3, 4])
@pytest.mark.parametrize("seed", range(3))
def test_conservation_on_solutions(dim, seed):
    f = random_field(dim, seed, modes=3)
    rep = conservation_residuals(f, np.linspace(-0.4, 0.5, dim))
    assert rep.max < 1e-10
    assert ("Secon" in rep) == (dim >= 3)


def test_conservation_landau_background():
    f = landau()
    assert f.dirac_residual(X) < 1e-12
    assert conservation_residuals(f, X).max < 1e-10


def test_wrong_mass_breaks_energy_and_spin_balance():
    rep = conservation_residuals(mixed_mass_field(), X)
    assert rep["Tcon"] > 1e-3 and rep["Secon"] > 1e-3


def test_spin_charge_identity_holds_off_shell():
    for f in (mixed_mass_field(), random_field(4, 5), landau()):
        lhs, rhs = spin_charge_identity(f, X)
        assert lhs == pytest.approx(rhs, abs=1e-12)
    with pytest.raises(ConfigurationError):
        spin_charge_identity(random_field(2, 0), X[:2])


def test_grid_conservation_second_order():
    f = random_field(4, 2)
    func = lambda y: f.evaluate(y)[0]  # noqa: E731
    coarse = conservation_residuals_grid(func, B4, X, 0.05, em_of(f)).max
    fine = conservation_residuals_grid(func, B4, X, 0.025, em_of(f)).max
    assert np.log2(coarse / fine) == pytest.approx(2.0, abs=0.1)


@pytest.mark.parametrize("seed", range(4))
def test_polar_currents_match_spinor_currents(seed):
    f = random_field(4, seed)
    s = f.sample(X)
    a = compute_currents(s, B4, em_of(f))
    p = compute_currents_polar(state_from_sample(s, B4, f.mass), em_of(f))
    assert np.allclose(a.J, p.J, atol=1e-12)
    assert np.allclose(a.Sspin, p.Sspin, atol=1e-12)
    assert np.allclose(a.T_matter, p.T_matter, atol=1e-11)


def test_navier_stokes_on_solutions():
    for f in [random_field(4, k, modes=3) for k in range(3)] + [landau()]:
        assert navier_stokes_residual(f.sample(X), B4, em_of(f)).max < 1e-10
    off = superpose(
        plane_wave(PlaneWaveSpec.from_spatial(1.0, [0.5, 0, 0]), B4),
        plane_wave(PlaneWaveSpec.from_spatial(2.0, [0, 0.6, 0.2], 1, 0.8), B4),
    )
    assert navier_stokes_residual(off.sample(X), B4).max > 1e-3


def test_second_order_equation_on_solutions():
    f = random_field(4, 1, modes=3)
    assert second_order_residual(f.sample(X), B4, f.mass) < 1e-10
    assert second_order_residual(f.sample(X), B4, f.mass * 1.1) > 1e-3


def test_cyclotron_orbit_matches_classical_radius():
    em = EMField.uniform_magnetic([0.0, 0.0, 2.0], 0.5)
    v = 0.3
    u0 = np.array([1, v, 0, 0]) / np.sqrt(1 - v * v)
    xs, us = lorentz_orbit(em, 1.0, np.zeros(4), u0, 0.01, 800)
    _, r = fit_circle(xs[:, 1:3])
    assert r == pytest.approx(cyclotron_radius(em, 1.0, u0), rel=1e-6)
    eta = B4.metric
    assert np.abs(np.einsum("ij,jk,ik->i", us, eta, us) - 1).max() < 1e-8


def test_fit_circle_exact():
    t = np.linspace(0, 5, 40)
    centre, r = fit_circle(np.column_stack([1 + 2 * np.cos(t), -3 + 2 * np.sin(t)]))
    assert np.allclose(centre, [1, -3]) and r == pytest.approx(2)


def test_lowest_landau_level_spin_energy():
    f = landau_field(B4, 1.6, 0.5, 1.1, [(0.0, 0.0, 1, 1.0)])
    p = polar_of(f.evaluate(X)[0], B4)
    assert np.allclose(p.u, [1, 0, 0, 0], atol=1e-12)
    # V = -q B.s / (2m) with the spin along B
    assert magnetic_energy(p.u, p.s, em_of(f), 1.1) == pytest.approx(-0.5 * 1.6 / 2.2)


def test_magnetic_energy_is_pauli_term():
    em = EMField.uniform_magnetic([0.4, -0.2, 0.9], 0.7)
    s = np.array([0, 0.6, 0.0, 0.8])
    assert magnetic_energy(np.array([1.0, 0, 0, 0]), s, em, 1.3) == pytest.approx(-0.7 * (0.24 + 0.72) / 2.6)


def test_nonrel_energy_slow_plane_wave():
    m = 1.0
    f = plane_wave(PlaneWaveSpec.from_spatial(m, [0.05, 0.0, 0.0]), B4)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        e = nonrel_limit_energy(f.sample(X), B4, m)
    assert e.regime_ok
    assert e.H_relativistic == pytest.approx(np.sqrt(1 + 0.05 ** 2) - 1)
    assert e.H_schrodinger == pytest.approx(0.05 ** 2 / 2)
    assert abs(e.H_relativistic - e.H_schrodinger) < 0.05 ** 4


def test_regime_warning_for_mixed_branches():
    f = superpose(
        plane_wave(PlaneWaveSpec.from_spatial(1.0, [0.1, 0, 0]), B4),
        plane_wave(PlaneWaveSpec.from_spatial(1.0, [0.1, 0, 0], -1, 0.5), B4),
    )
    with pytest.warns(RegimeWarning):
        e = nonrel_limit_energy(f.sample(X), B4, 1.0)
    assert not e.regime_ok


def test_em_field_gauges():
    em = EMField.uniform_magnetic([0.0, 0.0, 1.5], 1.0)
    assert np.allclose(em.magnetic(), [0, 0, 1.5])
    assert em.invariant == pytest.approx(2 * 1.5 ** 2)
    el = EMField.uniform_electric([0.7], 1.0)
    # F_{10} = d_1 A_0 = -E
    assert el.F[1, 0] == pytest.approx(-0.7)
    with pytest.raises(ConfigurationError):
        EMField(np.zeros(4), np.zeros((3, 3)))


def test_polar_currents_need_dim4():
    f = random_field(2, 0)
    with pytest.raises(ConfigurationError):
        compute_currents_polar(state_from_sample(f.sample(X[:2]), basis_for(2), f.mass))
