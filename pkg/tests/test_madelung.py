import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_field
from polardirac.clifford import ConfigurationError, basis_for
from polardirac.lorentz import boost_generator, rotation_generator, vector_transform
from polardirac.madelung import (
    PolarPointState,
    aux_vectors,
    d_system_residuals,
    dirac_polar_residuals,
    equivalence_backward,
    equivalence_forward,
    fixed_frame_check,
    madelung_residuals,
    q_system_residuals,
    state_from_sample,
)
from polardirac.spinor import SingularSpinorError, polar_of

E0 = np.array([1.0, 0, 0, 0])
E3 = np.array([0, 0, 0, 1.0])


def rest_state(m=1.5, beta=0.0, phi2=2.0):
    return PolarPointState(4, phi2, E0, np.array([m, 0, 0, 0]), np.zeros((4, 4, 4)), np.zeros(4), m, beta, E3, np.zeros(4))


def dim2_state(rapidity, m, beta=0.0, dbeta=(0.0, 0.0)):
    b = basis_for(2)
    u = vector_transform(boost_generator([rapidity], 2)) @ [1.0, 0.0]
    P = m * np.cos(beta) * (b.metric @ u)
    return PolarPointState(2, 1.3, u, P, np.zeros((2, 2, 2)), np.zeros(2), m, beta, None, np.array(dbeta))


def on_shell_state(dim, seed):
    b = basis_for(dim)
    f = random_field(dim, seed)
    rng = np.random.default_rng(seed)
    while True:
        s = f.sample(rng.normal(size=dim))
        try:
            if polar_of(s.psi, b).u[0] <= 10:
                return state_from_sample(s, b, f.mass)
        except SingularSpinorError:
            pass


def test_rest_plane_wave_satisfies_both_systems():
    st_ = rest_state()
    assert dirac_polar_residuals(st_).max < 1e-12
    assert madelung_residuals(st_).max < 1e-12


def test_chiral_angle_half_pi_breaks_dirac_by_2ms():
    m = 1.5
    rep = dirac_polar_residuals(rest_state(m, beta=np.pi / 2))
    assert rep["dp2"] == pytest.approx(2 * m)


def test_massless_static_state():
    st_ = PolarPointState(4, 1.0, E0, np.zeros(4), np.zeros((4, 4, 4)), np.zeros(4), 0.0, 0.3, E3, np.zeros(4))
    assert dirac_polar_residuals(st_).max == 0.0


def test_dim2_guidance_is_mass_times_velocity():
    st_ = dim2_state(0.7, 1.1)
    rep = madelung_residuals(st_)
    assert rep["M2-2"] < 1e-12
    assert dirac_polar_residuals(st_)["chan"] < 1e-12


def test_dim2_curl_sources_sin_beta():
    m, phi2 = 1.1, 1.3
    st_ = PolarPointState(2, phi2, np.array([1.0, 0]), np.array([m, 0]), np.zeros((2, 2, 2)), np.zeros(2), m, np.pi / 6, None, np.zeros(2))
    assert madelung_residuals(st_)["M2-3"] == pytest.approx(m * phi2 * 0.5)


def test_aux_vectors_rest():
    m = 1.5
    aux = aux_vectors(rest_state(m))
    eta = basis_for(4).metric
    assert np.allclose(eta @ aux.E, [0, 0, 0, m])
    assert np.allclose(aux.F, 0)


@pytest.mark.parametrize("seed", range(5))
def test_aux_definition(seed):
    st_ = on_shell_state(4, seed)
    aux = aux_vectors(st_)
    sl = basis_for(4).metric @ st_.s
    lhs = 2 * aux.E - (st_.Btrace + st_.dbeta + 2 * st_.m * sl * np.cos(st_.beta))
    assert np.abs(lhs).max() < 1e-12
    lhs = 2 * aux.F - (st_.Rtrace + st_.dlnphi2 + 2 * st_.m * sl * np.sin(st_.beta))
    assert np.abs(lhs).max() < 1e-12


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_equivalence_small_runs(dim):
    assert equivalence_forward(dim, seed=3, n=40).max < 1e-10
    assert equivalence_backward(dim, seed=3, n=40).max < 1e-10


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_equivalence_negative_controls(dim):
    assert equivalence_forward(dim, seed=1, n=30, corrupt="momentum").max > 1e-3
    assert equivalence_forward(dim, seed=1, n=30, corrupt="transport").max > 1e-3
    assert equivalence_backward(dim, seed=1, n=30, corrupt="momentum").max > 1e-3


def test_equivalence_empty_and_invalid():
    rep = equivalence_forward(4, n=0)
    assert rep.residuals == {} and rep.max == 0.0
    with pytest.raises(ConfigurationError):
        equivalence_forward(5, n=1)
    with pytest.raises(ConfigurationError):
        equivalence_forward(4, n=-1)
    with pytest.raises(ConfigurationError):
        equivalence_forward(4, n=1, corrupt="mass")


def test_equivalence_is_seeded():
    a, b = equivalence_forward(4, seed=9, n=20), equivalence_forward(4, seed=9, n=20)
    assert a.residuals == b.residuals and a.info == b.info
    assert a.info["n"] == 20


def test_fixed_frame_duplicates():
    rep = fixed_frame_check(rest_state())
    assert rep.duplicate_count == 3
    assert rep.independent == 8
    assert rep.frame_error < 1e-14
    assert set(rep.duplicates) == {("q2[03]", "q3[0]"), ("q2[13]", "q3[1]"), ("q2[23]", "q3[2]")}
    text = rep.to_text()
    assert "# duplicates,3" in text and "duplicate,q2[03],q3[0]" in text


def test_fixed_frame_solution_form():
    # E^1 = E^2 = F^0 = F^3 = 0 and P = (E^3, F^2, -F^1, E^0)
    exprs = dict(zip(fixed_frame_check(rest_state()).labels, fixed_frame_check(rest_state()).expressions))
    assert exprs["q1"] == "F^0" and exprs["q2[12]"] == "-F^3"
    assert exprs["q2[01]"] == "-E^1" and exprs["q2[02]"] == "-E^2"
    assert exprs["q3[0]"] == "-E^3 + P^0"
    assert exprs["q3[1]"] == "-F^2 + P^1"
    assert exprs["q3[2]"] == "F^1 + P^2"
    assert exprs["q3[3]"] == "-E^0 + P^3"


@pytest.mark.parametrize("seed", range(4))
def test_fixed_frame_on_shell_values_vanish(seed):
    rep = fixed_frame_check(on_shell_state(4, seed))
    assert np.abs(rep.values).max() < 1e-10
    assert rep.frame_error < 1e-10


def test_fixed_frame_requires_dim4():
    with pytest.raises(ConfigurationError):
        fixed_frame_check(dim2_state(0.1, 1.0))


@given(st.integers(0, 500), st.lists(st.floats(-1, 1), min_size=3, max_size=3), st.floats(0, 6))
def test_frame_covariance(seed, rap, angle):
    st_ = on_shell_state(4, seed)
    lam = vector_transform(boost_generator(rap, 4)) @ vector_transform(rotation_generator([1.0, 0.2, -0.4], angle))
    moved = st_.transformed(lam)
    scale = max(1.0, np.abs(lam).max()) ** 3
    assert madelung_residuals(moved).max < 1e-9 * scale
    assert dirac_polar_residuals(moved).max < 1e-9 * scale
    inv = np.linalg.inv(lam)
    assert np.allclose(aux_vectors(moved).E, aux_vectors(st_).E @ inv, atol=1e-9 * scale)


@pytest.mark.parametrize("dim", [2, 3, 4])
@pytest.mark.parametrize("seed", range(4))
def test_chain_on_analytic_fields(dim, seed):
    st_ = on_shell_state(dim, seed)
    assert dirac_polar_residuals(st_).max < 1e-10
    assert madelung_residuals(st_).max < 1e-9
    if dim == 4:
        assert q_system_residuals(st_).max < 1e-10
        assert d_system_residuals(st_).max < 1e-10


def test_state_validation():
    with pytest.raises(ConfigurationError):
        PolarPointState(4, 2.0, E0, np.zeros(4), np.zeros((4, 4, 4)), np.zeros(4), 1.0, 0.0, E0, np.zeros(4))
    with pytest.raises(ConfigurationError):
        PolarPointState(3, 2.0, E0[:3], np.zeros(3), np.zeros((3, 3, 3)), np.zeros(3), 1.0, 0.0, None, np.zeros(3))
    with pytest.raises(ConfigurationError):
        PolarPointState(4, -1.0, E0, np.zeros(4), np.zeros((4, 4, 4)), np.zeros(4), 1.0, 0.0, E3, np.zeros(4))
    with pytest.raises(ConfigurationError):
        aux_vectors(dim2_state(0.1, 1.0))
