"""Spinor bilinears and the polar decomposition.

In every dimension ``U = phi2 * u`` where ``phi2`` is the density
normalisation: ``phi2 = 2 phi^2 = sqrt(Phi^2 + Theta^2)`` in 1+1 and 1+3,
and ``phi2 = phi^2 = Phi`` in 1+2 (no chiral angle there).
The pseudo-scalar convention is ``Theta = i psibar parity psi`` which makes
``psi = phi exp(-i beta parity / 2) L^{-1} psi_rest`` carry ``beta`` with the
same sign as ``atan2(Theta, Phi)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import CliffordBasis, ConfigurationError
from .lorentz import spin_transform

SINGULAR_RELATIVE = 1e-12
IMAG_TOL = 1e-12


class SingularSpinorError(ValueError):
    """The polar decomposition is undefined (vanishing scalar invariants)."""


@dataclass(frozen=True)
class BilinearSet:
    """Real bilinears of one spinor; vectors and tensors carry upper indices."""

    dim: int
    Phi: float
    U: np.ndarray
    Theta: float | None = None
    S: np.ndarray | None = None
    M: np.ndarray | None = None


@dataclass(frozen=True)
class PolarVariables:
    """Module, chiral angle, velocity and spin (upper index)."""

    dim: int
    phi2: float
    u: np.ndarray
    beta: float | None = None
    s: np.ndarray | None = None


_FORM_CACHE: dict[tuple, dict[str, np.ndarray]] = {}


def _forms(basis: CliffordBasis) -> dict[str, np.ndarray]:
    """Hermitian matrices ``K`` with bilinear = ``psi^dagger K psi`` (cached per representation)."""
    key = (basis.dim, basis.gammas.tobytes())
    if key not in _FORM_CACHE:
        _FORM_CACHE[key] = _build_forms(basis)
    return _FORM_CACHE[key]


def _build_forms(basis: CliffordBasis) -> dict[str, np.ndarray]:
    g0 = basis.gammas[0]
    forms = {"Phi": g0, "U": np.einsum("ij,ajk->aik", g0, basis.gammas)}
    if basis.parity is not None:
        pi = basis.parity
        forms["Theta"] = 1j * g0 @ pi
    if basis.dim == 4:
        forms["S"] = np.einsum("ij,ajk,kl->ail", g0, basis.gammas, basis.parity)
        forms["M"] = 2j * np.einsum("ij,abjk->abik", g0, basis.sigmas)
    return forms


def _expect(K, left, right):
    return np.einsum("i,...ij,j->...", np.conj(left), K, right)


def _check_dims(psi: np.ndarray, basis: CliffordBasis) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (basis.spinor_size,):
        raise ConfigurationError(f"spinor of shape {psi.shape} does not match a {basis.dim}-dimensional basis")
    if not np.all(np.isfinite(psi)):
        raise ValueError("spinor has non-finite components")
    return psi


def compute_bilinears(psi, basis: CliffordBasis) -> BilinearSet:
    psi = _check_dims(psi, basis)
    scale = max(float(np.vdot(psi, psi).real), 1e-300)
    forms = _forms(basis)
    shapes = {name: K.shape[:-2] for name, K in forms.items()}
    stacked = np.concatenate([K.reshape(-1, *K.shape[-2:]) for K in forms.values()])
    flat = _expect(stacked, psi, psi)
    if np.max(np.abs(np.imag(flat))) > IMAG_TOL * scale:
        bad = [name for name, K in forms.items() if np.max(np.abs(np.imag(_expect(K, psi, psi))), initial=0.0) > IMAG_TOL * scale]
        raise ValueError(f"bilinear {bad[0]} has an imaginary part; representation inconsistent")
    vals, start = {}, 0
    for name, shape in shapes.items():
        size = int(np.prod(shape))
        vals[name] = np.real(flat[start:start + size]).reshape(shape)
        start += size
    return BilinearSet(
        basis.dim,
        float(vals["Phi"]),
        vals["U"],
        float(vals["Theta"]) if "Theta" in vals else None,
        vals.get("S"),
        vals.get("M"),
    )


def polar_decompose(b: BilinearSet) -> PolarVariables:
    """Invert ``Phi = phi2 cos(beta)``, ``Theta = phi2 sin(beta)``, ``U = phi2 u``."""
    norm2 = float(b.U[0])  # U^0 = psi^dagger psi
    threshold = SINGULAR_RELATIVE * max(norm2, 0.0)
    if b.dim == 3:
        if not b.Phi > max(threshold, 0.0):
            raise SingularSpinorError(f"scalar density Phi={b.Phi:.3e} vanishes; polar form undefined")
        return PolarVariables(3, b.Phi, b.U / b.Phi)
    phi2 = float(np.hypot(b.Phi, b.Theta))
    if not phi2 > threshold or phi2 == 0.0:
        raise SingularSpinorError(
            f"Phi^2 + Theta^2 = {phi2 ** 2:.3e} vanishes (Phi={b.Phi:.3e}, Theta={b.Theta:.3e}); spinor is singular"
        )
    beta = float(np.arctan2(b.Theta, b.Phi))
    if beta == -np.pi:
        beta = np.pi
    s = None if b.S is None else b.S / phi2
    return PolarVariables(b.dim, phi2, b.U / phi2, beta, s)


def polar_of(psi, basis: CliffordBasis) -> PolarVariables:
    return polar_decompose(compute_bilinears(psi, basis))


def chiral_rotation(beta: float, basis: CliffordBasis) -> np.ndarray:
    """``exp(-i beta parity / 2)`` (parity is diagonal in 1+1 and 1+3)."""
    return np.diag(np.exp(-0.5j * beta * np.diag(basis.parity)))


def reconstruct_spinor(p: PolarVariables, L=None, basis: CliffordBasis = None) -> np.ndarray:
    """``psi = phi exp(-i beta parity/2) L^{-1} psi_rest``.

    ``L`` defaults to the boost-times-rotation transform built from ``p.u``
    and ``p.s``; any invertible ``L`` is accepted.
    """
    if basis is None:
        raise ConfigurationError("a CliffordBasis is required")
    if p.dim != basis.dim:
        raise ConfigurationError("polar variables and basis dimensions differ")
    if L is None:
        L = spin_transform(p.u, p.s, basis)
    L = np.asarray(L, dtype=complex)
    if abs(np.linalg.det(L)) < 1e-300 or np.linalg.cond(L) > 1e14:
        raise ValueError("spinor transform L is not invertible")
    chi = np.linalg.solve(L, basis.rest_spinor)
    if p.dim == 3:
        return np.sqrt(p.phi2) * chi
    return np.sqrt(p.phi2 / 2.0) * chiral_rotation(p.beta, basis) @ chi


def angular_tensor(p: PolarVariables, basis: CliffordBasis) -> np.ndarray:
    """``M_{ab} = phi2 (cos(beta) u^j s^k eps_{jkab} + sin(beta) (u_a s_b - u_b s_a))``.

    Lower indices; equals the lowered bilinear ``2i psibar sigma^{ab} psi``.
    """
    if p.dim != 4:
        raise ConfigurationError("angular_tensor is defined in 1+3 dimensions only")
    ul = basis.metric @ p.u
    sl = basis.metric @ p.s
    dual = np.einsum("jkab,j,k->ab", basis.eps_lower, p.u, p.s)
    return p.phi2 * (np.cos(p.beta) * dual + np.sin(p.beta) * (np.outer(ul, sl) - np.outer(sl, ul)))


@dataclass(frozen=True)
class BilinearJet:
    """Bilinears with first and (optionally) second partial derivatives.

    Derivative axes come first: ``d["U"][mu, nu] = d_mu U^nu`` and
    ``dd["Phi"][rho, mu] = d_rho d_mu Phi``.
    """

    value: dict[str, np.ndarray]
    d: dict[str, np.ndarray]
    dd: dict[str, np.ndarray] | None = None


def bilinear_jet(psi, dpsi, basis: CliffordBasis, ddpsi=None) -> BilinearJet:
    """Exact derivatives of the Hermitian bilinears from a spinor jet."""
    psi = _check_dims(psi, basis)
    dpsi = np.asarray(dpsi, dtype=complex)
    value, first, second = {}, {}, {}
    for name, K in _forms(basis).items():
        value[name] = np.real(_expect(K, psi, psi))
        # d_mu <psi|K|psi> = 2 Re <psi|K|d_mu psi>
        first[name] = np.stack([2 * np.real(_expect(K, psi, dpsi[mu])) for mu in range(basis.dim)])
        if ddpsi is not None:
            ddpsi = np.asarray(ddpsi, dtype=complex)
            n = basis.dim
            second[name] = np.stack(
                [
                    np.stack(
                        [
                            2 * np.real(_expect(K, dpsi[r], dpsi[m]) + _expect(K, psi, ddpsi[r, m]))
                            for m in range(n)
                        ]
                    )
                    for r in range(n)
                ]
            )
    return BilinearJet(value, first, second if ddpsi is not None else None)


@dataclass(frozen=True)
class PolarJet:
    """Polar variables and their first derivatives ``d[...][mu, ...]``."""

    polar: PolarVariables
    dlnphi2: np.ndarray
    du: np.ndarray
    dbeta: np.ndarray | None = None
    ds: np.ndarray | None = None
    ddlnphi2: np.ndarray | None = None


def polar_jet(psi, dpsi, basis: CliffordBasis, ddpsi=None) -> PolarJet:
    """Derivatives of ``ln phi2``, ``beta``, ``u`` and ``s`` straight from bilinears."""
    jet = bilinear_jet(psi, dpsi, basis, ddpsi)
    v, d = jet.value, jet.d
    bil = BilinearSet(
        basis.dim,
        float(v["Phi"]),
        v["U"],
        float(v["Theta"]) if "Theta" in v else None,
        v.get("S"),
        v.get("M"),
    )
    p = polar_decompose(bil)
    if basis.dim == 3:
        dphi2 = d["Phi"]
        dbeta = None
    else:
        Phi, Th = v["Phi"], v["Theta"]
        dphi2 = (Phi * d["Phi"] + Th * d["Theta"]) / p.phi2
        dbeta = (Phi * d["Theta"] - Th * d["Phi"]) / p.phi2 ** 2
    dln = dphi2 / p.phi2
    du = (d["U"] - np.outer(dphi2, p.u)) / p.phi2
    ds = None
    if basis.dim == 4:
        ds = (d["S"] - np.outer(dphi2, p.s)) / p.phi2
    ddln = None
    if jet.dd is not None:
        dd = jet.dd
        if basis.dim == 3:
            ddphi2 = dd["Phi"]
        else:
            # phi2^2 = Phi^2 + Theta^2 differentiated twice
            num = (
                Phi * dd["Phi"] + np.outer(d["Phi"], d["Phi"]) + Th * dd["Theta"] + np.outer(d["Theta"], d["Theta"])
            )
            ddphi2 = (num - np.outer(dphi2, dphi2)) / p.phi2
        ddln = ddphi2 / p.phi2 - np.outer(dln, dln)
    return PolarJet(p, dln, du, dbeta, ds, ddln)


# --------------------------------------------------------------------------
# batched decomposition and reconstruction


@dataclass(frozen=True)
class PolarBatch:
    """Polar variables of ``n`` spinors stacked along the first axis."""

    dim: int
    phi2: np.ndarray
    u: np.ndarray
    beta: np.ndarray | None = None
    s: np.ndarray | None = None

    def __len__(self) -> int:
        return self.phi2.shape[0]

    def __getitem__(self, i: int) -> PolarVariables:
        return PolarVariables(
            self.dim, float(self.phi2[i]), self.u[i],
            None if self.beta is None else float(self.beta[i]),
            None if self.s is None else self.s[i],
        )


def polar_of_batch(psis, basis: CliffordBasis) -> PolarBatch:
    """Vectorised :func:`polar_of` for an ``(n, spinor_size)`` array."""
    psis = np.asarray(psis, dtype=complex)
    if psis.ndim != 2 or psis.shape[1] != basis.spinor_size:
        raise ConfigurationError(f"expected shape (n, {basis.spinor_size}), got {psis.shape}")
    forms = _forms(basis)
    val = {name: np.real(np.einsum("ni,...ij,nj->n...", np.conj(psis), K, psis)) for name, K in forms.items()}
    norm2 = val["U"][:, 0]
    if basis.dim == 3:
        phi2, beta = val["Phi"], None
    else:
        phi2 = np.hypot(val["Phi"], val["Theta"])
        beta = np.arctan2(val["Theta"], val["Phi"])
        beta = np.where(beta == -np.pi, np.pi, beta)
    bad = ~(phi2 > SINGULAR_RELATIVE * norm2) | (phi2 == 0)
    if np.any(bad):
        raise SingularSpinorError(f"{int(bad.sum())} spinors in the batch are singular")
    s = val["S"] / phi2[:, None] if "S" in val else None
    return PolarBatch(basis.dim, phi2, val["U"] / phi2[:, None], beta, s)


def _exp_batch(gen: np.ndarray) -> np.ndarray:
    # every generator used here squares to a multiple of the identity
    c = np.einsum("nij,nji->n", gen, gen) / gen.shape[-1]
    root = np.sqrt(c.astype(complex))
    small = np.abs(root) < 1e-8
    safe = np.where(small, 1.0, root)
    coef = np.where(small, 1.0 + c / 6, np.sinh(safe) / safe)
    eye = np.eye(gen.shape[-1])
    return np.cosh(root)[:, None, None] * eye + coef[:, None, None] * gen


def _rotation_generators(direction: np.ndarray) -> np.ndarray:
    d = direction / np.linalg.norm(direction, axis=1, keepdims=True)
    axis = np.cross([0.0, 0.0, 1.0], d)
    sin = np.linalg.norm(axis, axis=1)
    angle = np.arctan2(sin, d[:, 2])
    flip = sin < 1e-14
    n = np.where(flip[:, None], [1.0, 0.0, 0.0], axis / np.where(flip, 1.0, sin)[:, None])
    angle = np.where(flip, np.where(d[:, 2] > 0, 0.0, np.pi), angle)
    om = np.zeros((d.shape[0], 4, 4))
    for i, j, k in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        om[:, i, j] = angle * n[:, k - 1]
        om[:, j, i] = -angle * n[:, k - 1]
    return om


def reconstruct_batch(p: PolarBatch, basis: CliffordBasis) -> np.ndarray:
    """Vectorised :func:`reconstruct_spinor` with the default frame transform."""
    if p.dim != basis.dim:
        raise ConfigurationError("polar variables and basis dimensions differ")
    u = np.asarray(p.u, dtype=float)
    n, dim = u.shape
    spatial = u[:, 1:]
    norm = np.linalg.norm(spatial, axis=1)
    rap = np.arcsinh(norm / np.sqrt(u[:, 0] ** 2 - norm ** 2))
    dirn = spatial / np.where(norm == 0, 1.0, norm)[:, None]
    om = np.zeros((n, dim, dim))
    om[:, 0, 1:] = rap[:, None] * dirn
    om[:, 1:, 0] = -rap[:, None] * dirn
    inv = _exp_batch(0.5 * np.einsum("nab,abij->nij", om, basis.sigmas))
    if dim == 4:
        unit = u / np.sqrt(u[:, 0] ** 2 - norm ** 2)[:, None]
        back = np.zeros((n, 4, 4))
        back[:, 0, :] = unit * [1, -1, -1, -1]
        back[:, :, 0] = unit * [1, -1, -1, -1]
        back[:, 1:, 1:] = np.eye(3) + np.einsum("ni,nj->nij", spatial, spatial) / (1 + unit[:, 0])[:, None, None] / (
            u[:, 0] ** 2 - norm ** 2
        )[:, None, None]
        s_rest = np.einsum("nij,nj->ni", back, p.s)
        rot = _rotation_generators(s_rest[:, 1:])
        inv = inv @ _exp_batch(0.5 * np.einsum("nab,abij->nij", rot, basis.sigmas))
    chi = inv @ basis.rest_spinor
    if dim == 3:
        return np.sqrt(p.phi2)[:, None] * chi
    phase = np.exp(-0.5j * p.beta[:, None] * np.diag(basis.parity)[None, :])
    return np.sqrt(p.phi2 / 2.0)[:, None] * phase * chi
