import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from polardirac.clifford import ConfigurationError, basis_for
from polardirac.lorentz import boost_generator, rotation_generator, spin_transform, spinor_transform, vector_transform
from polardirac.spinor import (
    BilinearSet,
    PolarVariables,
    SingularSpinorError,
    angular_tensor,
    bilinear_jet,
    compute_bilinears,
    polar_decompose,
    polar_jet,
    polar_of,
    polar_of_batch,
    reconstruct_batch,
    reconstruct_spinor,
)

B4 = basis_for(4)
ETA = B4.metric


def spinors(size=4):
    parts = st.lists(st.floats(-3, 3, allow_nan=False), min_size=2 * size, max_size=2 * size)
    return parts.map(lambda v: np.array(v[:size]) + 1j * np.array(v[size:]))


def _regular(psi, basis=B4, bound=10.0):
    try:
        return polar_of(psi, basis).u[0] <= bound
    except SingularSpinorError:
        return False


def test_rest_spinor_bilinears():
    b = compute_bilinears(np.array([1, 0, 1, 0]), B4)
    assert b.Phi == pytest.approx(2.0)
    assert b.Theta == pytest.approx(0.0)
    assert np.allclose(b.U, [2, 0, 0, 0])
    assert np.allclose(b.S, [0, 0, 0, 2])


def test_zero_spinor_bilinears():
    b = compute_bilinears(np.zeros(4), B4)
    assert b.Phi == 0 and b.Theta == 0
    assert not np.any(b.U) and not np.any(b.S) and not np.any(b.M)


def test_theta_convention():
    b = compute_bilinears(np.array([1, 0, 1j, 0]), B4)
    assert b.Phi == pytest.approx(0.0, abs=1e-15)
    # Theta = i psibar parity psi gives -2 here, matching exp(-i beta parity / 2)
    assert b.Theta == pytest.approx(-2.0)
    assert polar_decompose(b).beta == pytest.approx(-np.pi / 2)
    p = PolarVariables(4, 2.0, np.array([1.0, 0, 0, 0]), -np.pi / 2, np.array([0, 0, 0, 1.0]))
    psi = reconstruct_spinor(p, np.eye(4), B4)
    assert np.allclose(psi / psi[0], [1, 0, 1j, 0])


def test_polar_decompose_examples():
    p = polar_decompose(BilinearSet(4, 2.0, np.array([2.0, 0, 0, 0]), 0.0, np.array([0, 0, 0, 2.0])))
    assert p.phi2 == 2 and p.beta == 0
    assert np.allclose(p.u, [1, 0, 0, 0]) and np.allclose(p.s, [0, 0, 0, 1])
    p = polar_decompose(BilinearSet(4, 0.0, np.array([2.0, 0, 0, 0]), 2.0, np.array([0, 0, 0, 2.0])))
    assert p.beta == pytest.approx(np.pi / 2) and p.phi2 == pytest.approx(2.0)


def test_singular_spinor_named():
    with pytest.raises(SingularSpinorError, match="Phi"):
        polar_decompose(BilinearSet(4, 0.0, np.array([1.0, 0, 0, 1]), 0.0, np.array([1.0, 0, 0, 1])))
    # a Weyl spinor is light-like and singular
    with pytest.raises(SingularSpinorError):
        polar_of(np.array([1, 0, 0, 0]), B4)


def test_beta_branch_and_flip():
    p = polar_decompose(BilinearSet(4, -2.0, np.array([2.0, 0, 0, 0]), 0.0, np.array([0, 0, 0, 2.0])))
    assert p.beta == np.pi
    b = compute_bilinears(np.array([0.3 + 0.2j, -0.4j, 0.9, 0.1 - 0.5j]), B4)
    flipped = BilinearSet(4, b.Phi, b.U, -b.Theta, b.S, b.M)
    assert polar_decompose(flipped).beta == -polar_decompose(b).beta


def test_reconstruct_identity_frame():
    p = PolarVariables(4, 2.0, np.array([1.0, 0, 0, 0]), 0.0, np.array([0, 0, 0, 1.0]))
    assert np.allclose(reconstruct_spinor(p, np.eye(4), B4), [1, 0, 1, 0])


def test_reconstruct_beta_pi():
    p = PolarVariables(4, 2.0, np.array([1.0, 0, 0, 0]), np.pi, np.array([0, 0, 0, 1.0]))
    psi = reconstruct_spinor(p, np.eye(4), B4)
    b = compute_bilinears(psi, B4)
    assert b.Phi == pytest.approx(-2.0)
    assert b.Theta == pytest.approx(0.0, abs=1e-14)
    assert polar_decompose(b).beta == pytest.approx(np.pi)


def test_reconstruct_with_boost_along_z():
    om = boost_generator([0.0, 0.0, 0.8], 4)
    lam = vector_transform(om)
    L = np.linalg.inv(spinor_transform(om, B4))
    u_expected = lam @ [1, 0, 0, 0]
    p = PolarVariables(4, 2.0, u_expected, 0.0, lam @ [0, 0, 0, 1])
    psi = reconstruct_spinor(p, L, B4)
    assert np.allclose(polar_of(psi, B4).u, u_expected, atol=1e-12)


def test_reconstruct_rejects_singular_L():
    p = PolarVariables(4, 2.0, np.array([1.0, 0, 0, 0]), 0.0, np.array([0, 0, 0, 1.0]))
    with pytest.raises(ValueError):
        reconstruct_spinor(p, np.zeros((4, 4)), B4)
    with pytest.raises(ConfigurationError):
        reconstruct_spinor(p)


def test_angular_tensor_rest_frame():
    p = PolarVariables(4, 2.0, np.array([1.0, 0, 0, 0]), 0.0, np.array([0, 0, 0, 1.0]))
    M = angular_tensor(p, B4)
    nonzero = {tuple(ix) for ix in np.argwhere(np.abs(M) > 1e-15)}
    assert nonzero == {(1, 2), (2, 1)}
    assert np.allclose(angular_tensor(PolarVariables(4, 0.0, p.u, 0.0, p.s), B4), 0)


@given(spinors())
def test_angular_tensor_matches_bilinear(psi):
    assume(_regular(psi))
    b = compute_bilinears(psi, B4)
    M = angular_tensor(polar_decompose(b), B4)
    assert np.allclose(M, ETA @ b.M @ ETA, atol=1e-10 * max(1.0, b.U[0]))


@given(spinors())
def test_fierz_orthonormality(psi):
    assume(_regular(psi))
    p = polar_of(psi, B4)
    assert abs(p.u @ ETA @ p.u - 1) < 1e-10
    assert abs(p.s @ ETA @ p.s + 1) < 1e-10
    assert abs(p.u @ ETA @ p.s) < 1e-10
    assert p.u[0] > 0


@given(spinors())
def test_round_trip_identity(psi):
    assume(_regular(psi))
    p = polar_of(psi, B4)
    q = polar_of(reconstruct_spinor(p, basis=B4), B4)
    assert q.phi2 == pytest.approx(p.phi2, rel=1e-10)
    assert abs(np.angle(np.exp(1j * (q.beta - p.beta)))) < 1e-10
    assert np.allclose(q.u, p.u, atol=1e-10) and np.allclose(q.s, p.s, atol=1e-10)


@given(spinors(), st.floats(0, 6))
def test_round_trip_any_frame(psi, angle):
    # a rest-frame rotation about e3 keeps (e0, e3), so L stays admissible
    assume(_regular(psi))
    p = polar_of(psi, B4)
    twist = spinor_transform(rotation_generator([0, 0, 1], angle), B4)
    Linv = np.linalg.inv(spin_transform(p.u, p.s, B4)) @ twist
    q = polar_of(reconstruct_spinor(p, np.linalg.inv(Linv), B4), B4)
    assert q.phi2 == pytest.approx(p.phi2, rel=1e-10)
    assert np.allclose(q.u, p.u, atol=1e-10) and np.allclose(q.s, p.s, atol=1e-10)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_batch_matches_scalar(dim):
    b = basis_for(dim)
    rng = np.random.default_rng(dim)
    psis = rng.normal(size=(300, b.spinor_size)) + 1j * rng.normal(size=(300, b.spinor_size))
    psis = np.array([v for v in psis if _regular(v, b)])
    batch = polar_of_batch(psis, b)
    rebuilt = reconstruct_batch(batch, b)
    for i in range(0, len(psis), 37):
        p = polar_of(psis[i], b)
        assert np.allclose(batch.u[i], p.u, atol=1e-13)
        assert np.allclose(rebuilt[i], reconstruct_spinor(p, basis=b), atol=1e-12)


def test_batch_rejects_singular():
    with pytest.raises(SingularSpinorError):
        polar_of_batch(np.array([[1, 0, 1, 0], [1, 0, 0, 0]]), B4)


def test_dim3_phi_is_density():
    b = basis_for(3)
    p = polar_of(np.array([1.0, 0.5j]), b)
    assert p.beta is None and p.s is None
    assert p.phi2 == pytest.approx(compute_bilinears(np.array([1.0, 0.5j]), b).Phi)


def test_wrong_size_spinor():
    with pytest.raises(ConfigurationError):
        compute_bilinears(np.ones(2), B4)


@pytest.mark.parametrize("dim", [2, 4])
def test_jets_match_finite_differences(dim):
    b = basis_for(dim)
    rng = np.random.default_rng(11)
    psi0 = rng.normal(size=b.spinor_size) + 1j * rng.normal(size=b.spinor_size)
    lin = rng.normal(size=(dim, b.spinor_size)) + 1j * rng.normal(size=(dim, b.spinor_size))
    field = lambda x: psi0 + x @ lin
    jet = polar_jet(psi0, lin, b)
    bj = bilinear_jet(psi0, lin, b)
    h = 1e-6
    for mu in range(dim):
        e = np.zeros(dim)
        e[mu] = h
        pp, pm = polar_of(field(e), b), polar_of(field(-e), b)
        assert (np.log(pp.phi2) - np.log(pm.phi2)) / (2 * h) == pytest.approx(jet.dlnphi2[mu], abs=1e-7)
        assert np.allclose((pp.u - pm.u) / (2 * h), jet.du[mu], atol=1e-6)
        assert (pp.beta - pm.beta) / (2 * h) == pytest.approx(jet.dbeta[mu], abs=1e-6)
        Up = compute_bilinears(field(e), b).U
        Um = compute_bilinears(field(-e), b).U
        assert np.allclose((Up - Um) / (2 * h), bj.d["U"][mu], atol=1e-6)
