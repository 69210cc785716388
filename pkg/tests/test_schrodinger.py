import numpy as np
import pytest

from polardirac.clifford import ConfigurationError
from polardirac.schrodinger import (
    CrankNicolson,
    WaveFunction,
    evolve,
    evolve_step,
    free_width,
    gaussian_packet,
    hamiltonian,
    madelung_residuals_nr,
    nonrel_fields,
    packet_width,
    polar_split,
)


def free_packet(h=0.05, dt=0.01, L=20.0, sigma=1.0, k=1.5, m=1.0, V=None):
    x = np.arange(-L, L + h / 2, h)
    return WaveFunction((x,), gaussian_packet(x, 0.0, sigma, k), m, dt, V=V)


def exact_plane_wave_slices(k, m, h=0.1, dt=0.05, n=64, kick=0.0):
    x = np.arange(n) * h
    w = k * k / (2 * m)
    out = []
    for j, t in enumerate((0.0, dt, 2 * dt)):
        vals = np.exp(1j * (k * x - w * t))
        if j == 2:
            vals = vals * np.exp(1j * kick)
        out.append(WaveFunction((x,), vals, m, dt, t))
    return out


def test_gaussian_packet_normalised():
    w = free_packet()
    assert w.norm() == pytest.approx(1.0, abs=1e-10)
    assert packet_width(w) == pytest.approx(1.0, abs=1e-8)


def test_norm_conserved():
    states = evolve(free_packet(), 50)
    norms = np.array([s.norm() for s in states])
    assert np.abs(norms - norms[0]).max() < 1e-12
    assert states[-1].t == pytest.approx(0.5)


def test_free_width_spreads_like_oracle():
    w = free_packet(h=0.02, dt=0.005, k=0.0)
    states = evolve(w, 200)
    assert packet_width(states[-1]) == pytest.approx(free_width(1.0, 1.0, 1.0), abs=1e-3)
    assert free_width(1.0, 1.0, 0.0) == 1.0


def test_constant_potential_only_adds_a_phase():
    V0, T = 0.7, 0.2
    errs = []
    for dt in (0.01, 0.005):
        steps = round(T / dt)
        a = evolve(free_packet(dt=dt), steps)[-1]
        b = evolve(free_packet(dt=dt, V=V0), steps)[-1]
        errs.append(np.abs(b.values - np.exp(-1j * V0 * T) * a.values).max())
    # the split into a free evolution and a phase is exact up to O(dt^2)
    assert errs[0] < 1e-4
    assert np.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.1)


def test_harmonic_packet_centre_oscillates():
    m, omega, x0 = 1.0, 1.0, 2.0
    x = np.arange(-12, 12, 0.03)
    w = WaveFunction((x,), gaussian_packet(x, x0, 1 / np.sqrt(2)), m, 0.005, V=0.5 * m * omega ** 2 * x ** 2)
    states = evolve(w, 400)
    for s in states[::100]:
        rho = np.abs(s.values) ** 2
        centre = rho @ x / rho.sum()
        assert centre == pytest.approx(x0 * np.cos(omega * s.t), abs=2e-3)


def test_hamiltonian_is_hermitian():
    w = free_packet(L=2.0, V=np.linspace(0, 1, 81))
    H = hamiltonian(w).toarray()
    assert np.allclose(H, H.conj().T)


def test_solver_reuse_matches_fresh_step():
    w = free_packet()
    solver = CrankNicolson(w)
    assert np.array_equal(evolve_step(w, solver).values, evolve_step(w).values)


def test_polar_split_plane_wave():
    x = np.linspace(0, 10, 201)
    k = 3.3
    p = polar_split(WaveFunction((x,), 2.0 * np.exp(1j * k * x), 1.0, 0.1))
    assert np.allclose(p.phi, 2.0)
    assert np.allclose(p.S - p.S[0], k * (x - x[0]))
    assert np.abs(p.Q[1:-1]).max() < 1e-9
    assert np.isnan(p.Q[0]) and np.isnan(p.Q[-1])


def test_gaussian_quantum_potential_closed_form():
    m, sigma = 1.3, 0.8
    x = np.linspace(-3, 3, 601)
    p = polar_split(WaveFunction((x,), gaussian_packet(x, 0.0, sigma), m, 0.1))
    exact = -(x ** 2 / (4 * sigma ** 4) - 1 / (2 * sigma ** 2)) / (2 * m)
    assert np.nanmax(np.abs(p.Q - exact)) < 1e-3


def test_nodes_are_masked():
    x = np.linspace(-np.pi, np.pi, 101)
    p = polar_split(WaveFunction((x,), np.sin(x) + 0j, 1.0, 0.1))
    centre = 50
    assert p.mask[centre] and np.isnan(p.S[centre]) and np.isnan(p.Q[centre])
    assert not p.mask[25]


def test_exact_plane_wave_slices_have_zero_residual():
    rep = madelung_residuals_nr(exact_plane_wave_slices(1.1, 0.9))
    assert rep.max < 1e-10
    assert rep.info["nodes"] > 0


def test_corrupted_phase_is_detected():
    dt, kick = 0.05, 0.01
    rep = madelung_residuals_nr(exact_plane_wave_slices(1.1, 0.9, dt=dt, kick=kick))
    assert rep["enerpolar"] == pytest.approx(kick / (2 * dt), rel=1e-6)


def test_residuals_are_second_order():
    errs = []
    for h in (0.08, 0.04):
        w = free_packet(h=h, dt=h, k=1.0)
        errs.append(madelung_residuals_nr(evolve(w, 2), region=1e-2).max)
    assert np.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.15)


def test_two_dimensional_packet():
    x = np.linspace(-8, 8, 121)
    y = np.linspace(-8, 8, 121)
    X, Y = np.meshgrid(x, y, indexing="ij")
    vals = gaussian_packet(X, 0.0, 1.0, 1.0) * gaussian_packet(Y, 0.5, 1.2, -0.5)
    w = WaveFunction((x, y), vals, 1.0, 0.02)
    states = evolve(w, 10)
    assert abs(states[-1].norm() - w.norm()) < 1e-12
    f = nonrel_fields(states[4:7])
    assert len(f.P) == 2
    i, j = 60, 60
    assert f.P[0][i, j] == pytest.approx(1.0, abs=0.05)
    assert madelung_residuals_nr(states[4:7], region=1e-2).max < 0.05


def test_two_dimensional_phase_unwrapping():
    x = np.linspace(0, 6, 61)
    X, Y = np.meshgrid(x, x, indexing="ij")
    p = polar_split(WaveFunction((x, x), np.exp(1j * (2.0 * X - 1.5 * Y)), 1.0, 0.1))
    S = p.S - p.S[0, 0]
    assert np.allclose(S, 2.0 * X - 1.5 * Y, atol=1e-9)


def test_validation():
    x = np.linspace(0, 1, 5)
    with pytest.raises(ConfigurationError):
        WaveFunction((x,), np.ones(4), 1.0, 0.1)
    with pytest.raises(ConfigurationError):
        WaveFunction((x,), np.ones(5), -1.0, 0.1)
    with pytest.raises(ConfigurationError):
        WaveFunction((x,), np.full(5, np.nan), 1.0, 0.1)
    with pytest.raises(ConfigurationError):
        WaveFunction((x, x, x), np.ones((5, 5, 5)), 1.0, 0.1)
    s = exact_plane_wave_slices(1.0, 1.0)
    with pytest.raises(ConfigurationError):
        nonrel_fields(s[:2])
    with pytest.raises(ConfigurationError):
        nonrel_fields([s[0], s[2], s[1]])
