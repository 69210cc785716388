"""Conserved currents, conservation laws and the dynamical consequences.

Currents are returned with upper indices: ``J^mu``, the spin tensor
``S^{a n s}`` and the energy tensor ``T^{rho sigma}`` whose first index is
the one contracted in ``d_rho T^{rho sigma} = 0``.

The electromagnetic field is a fixed background with a constant gradient
``dA[rho, mu] = d_rho A_mu``.  Its own stress tensor is conserved only once
Maxwell's equations are sourced by the matter current; the energy balance
therefore adds the background divergence ``-F^{sigma a} J_a`` that those
equations imply instead of solving them.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .clifford import CliffordBasis, ConfigurationError
from .connections import ConnectionJet, FieldSample, connection_jet
from .madelung import PolarPointState
from .report import ResidualReport, from_components
from .sources import GridField, finite_difference_derivatives
from .spinor import polar_jet


class RegimeWarning(UserWarning):
    """Inputs are outside the regime where a limiting formula applies."""


@dataclass(frozen=True)
class EMField:
    """Potential ``A_mu(x) = A0_mu + x^rho dA[rho, mu]`` and charge ``q``."""

    A0: np.ndarray
    gradient: np.ndarray
    q: float = 0.0

    def __post_init__(self):
        A0 = np.asarray(self.A0, dtype=float)
        g = np.asarray(self.gradient, dtype=float)
        if g.shape != (A0.size, A0.size):
            raise ConfigurationError("potential gradient must be a dim x dim array")
        object.__setattr__(self, "A0", A0)
        object.__setattr__(self, "gradient", g)

    @classmethod
    def free(cls, dim: int, q: float = 0.0) -> "EMField":
        return cls(np.zeros(dim), np.zeros((dim, dim)), q)

    @classmethod
    def constant_potential(cls, A0, q: float) -> "EMField":
        A0 = np.asarray(A0, dtype=float)
        return cls(A0, np.zeros((A0.size, A0.size)), q)

    @classmethod
    def uniform_magnetic(cls, B, q: float) -> "EMField":
        """1+3 field ``B`` (3-vector) in the symmetric gauge ``A^i = (B x r)^i / 2``."""
        B = np.asarray(B, dtype=float)
        g = np.zeros((4, 4))
        # A^i = (B x r)^i / 2, A_i = -A^i, so d_j A_i = eps_{ijk} B^k / 2
        for i, j, k in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
            g[j, i] += 0.5 * B[k - 1]
            g[i, j] -= 0.5 * B[k - 1]
        return cls(np.zeros(4), g, q)

    @classmethod
    def uniform_electric(cls, E, q: float) -> "EMField":
        """Static field ``E`` (spatial vector) with ``A_0 = -E.x``."""
        E = np.atleast_1d(np.asarray(E, dtype=float))
        dim = E.size + 1
        g = np.zeros((dim, dim))
        g[1:, 0] = -E
        return cls(np.zeros(dim), g, q)

    @property
    def dim(self) -> int:
        return self.A0.size

    def potential(self, x) -> np.ndarray:
        return self.A0 + np.asarray(x, dtype=float) @ self.gradient

    @property
    def F(self) -> np.ndarray:
        """``F_{mu nu} = d_mu A_nu - d_nu A_mu``."""
        return self.gradient - self.gradient.T

    @property
    def F_upper(self) -> np.ndarray:
        eta = _metric(self.dim)
        return eta @ self.F @ eta

    @property
    def invariant(self) -> float:
        """``F_{mu nu} F^{mu nu}``."""
        return float(np.sum(self.F * self.F_upper))

    def stress(self) -> np.ndarray:
        """``T_em^{rho sigma} = F^2 g^{rho sigma} / 4 - F^{rho a} F^sigma_a``."""
        eta = _metric(self.dim)
        Fu = self.F_upper
        return 0.25 * self.invariant * eta - Fu @ eta @ Fu.T

    def magnetic(self) -> np.ndarray:
        """``B^k`` from ``F_{ij} = -eps_{ijk} B^k`` (1+3 only)."""
        F = self.F
        return np.array([-F[2, 3], -F[3, 1], -F[1, 2]])

    def sample(self, psi, dpsi, x, ddpsi=None) -> FieldSample:
        return FieldSample(psi, dpsi, self.potential(x), self.q, np.asarray(x, dtype=float), ddpsi, self.gradient)


def _metric(dim):
    return np.diag([1.0] + [-1.0] * (dim - 1))


def em_of(field) -> EMField:
    """Background carried by an analytic source (plane waves or Landau modes)."""
    grad = getattr(field, "gradient", None)
    dim = field.basis.dim
    if grad is None:
        grad = np.zeros((dim, dim))
    return EMField(np.asarray(field.A0, dtype=float), grad, field.q)


@dataclass(frozen=True)
class ConservedCurrents:
    """``J^mu``, ``S^{a n s}`` and the matter and total energy tensors."""

    J: np.ndarray
    Sspin: np.ndarray
    T: np.ndarray
    T_matter: np.ndarray


# --------------------------------------------------------------------------
# spinor-form kernels (batched over leading axes)


def _spin_forms(basis: CliffordBasis) -> np.ndarray:
    """``(i/4) gamma^0 {gamma^a, sigma^{ns}}`` as Hermitian matrices."""
    g, s = basis.gammas, basis.sigmas
    anti = np.einsum("aij,nsjk->ansik", g, s) + np.einsum("nsij,ajk->ansik", s, g)
    return 0.25j * np.einsum("ij,ansjk->ansik", g[0], anti)


def _currents_from(psi, Dpsi, basis: CliffordBasis, q: float):
    eta = basis.metric
    bar = np.conj(psi) @ basis.gammas[0]
    J = q * np.real(np.einsum("...i,mij,...j->...m", bar, basis.gammas, psi))
    S = np.real(np.einsum("...i,ansij,...j->...ans", np.conj(psi), _spin_forms(basis), psi))
    Dup = np.einsum("sk,...kj->...sj", eta, Dpsi)
    T = -np.imag(np.einsum("...i,rij,...sj->...rs", bar, basis.gammas, Dup))
    return J, S, T


def compute_currents(sample: FieldSample, basis: CliffordBasis, em: EMField | None = None) -> ConservedCurrents:
    """Spinor-form currents ``J = q psibar gamma psi``,
    ``S = (i/4) psibar {gamma, sigma} psi`` and the energy tensor."""
    em = EMField.free(basis.dim, sample.q) if em is None else em
    J, S, Tm = _currents_from(np.asarray(sample.psi, complex), sample.covariant_derivative(), basis, em.q)
    return ConservedCurrents(J, S, Tm + em.stress(), Tm)


def compute_currents_polar(state: PolarPointState, em: EMField | None = None) -> ConservedCurrents:
    """Polar-form currents (1+3): ``J = q U``, ``S = eps S_mu / 4`` and
    ``T = ... + P^s U^r + d^s beta S^r / 2 - R_{an}^s S_k eps^{rank} / 4``."""
    if state.dim != 4:
        raise ConfigurationError("polar-form currents are implemented in 1+3")
    basis = state.basis
    eta = basis.metric
    em = EMField.free(4) if em is None else em
    U = state.phi2 * state.u
    S = state.phi2 * state.s
    Sl = eta @ S
    J = em.q * U
    Sspin = 0.25 * np.einsum("ansm,m->ans", basis.eps_upper, Sl)
    R_mixed = np.einsum("ank,ks->ans", state.R, eta)      # R_{an}^s
    Tm = (
        np.outer(U, eta @ state.P)
        + 0.5 * np.outer(S, eta @ state.dbeta)
        - 0.25 * np.einsum("ans,k,rank->rs", R_mixed, Sl, basis.eps_upper)
    )
    return ConservedCurrents(J, Sspin, Tm + em.stress(), Tm)


# --------------------------------------------------------------------------
# conservation laws


def _laws(divJ, divS, T_matter, divT_matter, J, em: EMField, basis) -> dict[str, np.ndarray]:
    comps = {"Jcon": np.atleast_1d(divJ)}
    if basis.dim >= 3:
        comps["Secon"] = divS + 0.5 * (T_matter - np.swapaxes(T_matter, -1, -2))
    # Maxwell-sourced background: d_r T_em^{r s} = -F^{s a} J_a
    back = -np.einsum("...sa,...a->...s", em.F_upper, np.einsum("ab,...b->...a", basis.metric, J))
    comps["Tcon"] = divT_matter + back
    return comps


def _analytic_divergences(psi, dpsi, ddpsi, basis: CliffordBasis, em: EMField, x):
    eta = basis.metric
    q = em.q
    A = em.potential(x)
    Dpsi = dpsi + 1j * q * np.outer(A, psi)
    # d_r D_s psi
    dD = ddpsi + 1j * q * (em.gradient[:, :, None] * psi + np.einsum("s,rj->rsj", A, dpsi))
    g0, g = basis.gammas[0], basis.gammas
    bar = np.conj(psi) @ g0
    dbar = np.conj(dpsi) @ g0                                  # (r, spinor)
    divJ = 2 * q * np.real(np.einsum("i,rij,rj->", bar, g, dpsi))
    # forms are Hermitian, so both product-rule terms are conjugate
    divS = 2 * np.real(np.einsum("ri,rnsij,j->ns", np.conj(dpsi), _spin_forms(basis), psi))
    Dup = eta @ Dpsi
    dDup = np.einsum("sk,rkj->rsj", eta, dD)
    divT = -np.imag(np.einsum("ri,rij,sj->s", dbar, g, Dup) + np.einsum("i,rij,rsj->s", bar, g, dDup))
    J, S, Tm = _currents_from(psi, Dpsi, basis, q)
    return divJ, divS, Tm, divT, J


def conservation_residuals(field, x, em: EMField | None = None) -> ResidualReport:
    """(Jcon), (Secon) and (Tcon) at ``x`` for an analytic field.

    ``field`` provides ``evaluate(x) -> (psi, dpsi, ddpsi)``; the background
    defaults to the one carried by the field.
    """
    basis = field.basis
    em = em_of(field) if em is None else em
    psi, dpsi, ddpsi = field.evaluate(x)
    if ddpsi is None:
        raise ConfigurationError("conservation residuals need second derivatives")
    divJ, divS, Tm, divT, J = _analytic_divergences(psi, dpsi, ddpsi, basis, em, np.asarray(x, float))
    return from_components(f"conservation-{basis.dim}", _laws(divJ, divS, Tm, divT, J, em, basis))


def conservation_residuals_grid(func, basis: CliffordBasis, x0, h: float, em: EMField | None = None, order: int = 2) -> ResidualReport:
    """The same laws with every derivative taken by finite differences.

    ``func(x)`` returns the spinor.  A small lattice centred on ``x0`` is
    sampled; ``D psi`` and then the current divergences are differenced
    with stencils of the given order, so the residual scales as ``h^order``.
    """
    em = EMField.free(basis.dim) if em is None else em
    n = basis.dim
    half = 2 if order == 2 else 4
    shape = (2 * half + 1,) * n
    origin = np.asarray(x0, dtype=float) - half * h
    g = GridField.sample(func, origin, np.full(n, h), shape, order)
    dpsi = finite_difference_derivatives(g)                         # (..., mu, spinor)
    coords = origin + h * np.stack(np.meshgrid(*[np.arange(s) for s in shape], indexing="ij"), axis=-1)
    A = em.A0 + coords @ em.gradient
    Dpsi = dpsi + 1j * em.q * A[..., :, None] * g.values[..., None, :]
    J, S, Tm = _currents_from(g.values, Dpsi, basis, em.q)
    centre = (half,) * n

    divJ = np.trace(finite_difference_derivatives(GridField(origin, np.full(n, h), J, order))[centre])
    dS = finite_difference_derivatives(GridField(origin, np.full(n, h), S, order))[centre]   # (rho, a, n, s)
    divS = np.einsum("rrns->ns", dS)
    dT = finite_difference_derivatives(GridField(origin, np.full(n, h), Tm, order))[centre]
    divT = np.einsum("rrs->s", dT)
    comps = _laws(divJ, divS, Tm[centre], divT, J[centre], em, basis)
    rep = from_components(f"conservation-grid-{n}", comps)
    rep.info.update({"h": h, "order": order})
    return rep


def spin_charge_identity(field, x) -> tuple[float, float]:
    """Dualised spin balance traced with ``u^a s^b`` against ``d_mu (psibar gamma^mu psi) / 4``.

    For any spinor field, solution or not, ``X^{mn} = d_r S^{rmn} + T^{[mn]}/2``
    satisfies ``u^a s^b eps_{abmn} X^{mn} / 2 = d_mu(psibar gamma^mu psi) / 4``,
    so spin conservation forces charge conservation.  Returns both sides.
    """
    from .spinor import polar_of

    basis = field.basis
    if basis.dim != 4:
        raise ConfigurationError("the spin-charge identity is stated in 1+3")
    em = em_of(field)
    unit = EMField(em.A0, em.gradient, 1.0) if em.q == 0 else em
    psi, dpsi, ddpsi = field.evaluate(x)
    divJ, divS, Tm, _, _ = _analytic_divergences(psi, dpsi, ddpsi, basis, unit, np.asarray(x, float))
    X = divS + 0.5 * (Tm - Tm.T)
    p = polar_of(psi, basis)
    dual = 0.5 * np.einsum("abmn,mn->ab", basis.eps_lower, X)
    return float(p.u @ dual @ p.s), float(divJ / (4 * unit.q))


# --------------------------------------------------------------------------
# Navier-Stokes and second-order equations (1+3)


def _dS(jet: ConnectionJet) -> np.ndarray:
    """``d_rho S^k`` with ``S = phi2 s`` from the connection jet."""
    p = jet.data.polar
    return p.phi2 * (np.outer(jet.data.dlnphi2, p.s) + jet.ds)


def navier_stokes_residual(sample: FieldSample, basis: CliffordBasis, em: EMField | None = None) -> ResidualReport:
    """``U^r d_r P^s - q F^{s a} U_a + (1/2) d_r (d^s beta S^r
    - (1/2) R_{an}^s S_k eps^{rank})``; needs ``sample.ddpsi``."""
    if basis.dim != 4:
        raise ConfigurationError("the Navier-Stokes form is implemented in 1+3")
    em = EMField.free(4, sample.q) if em is None else em
    jet = connection_jet(sample, basis)
    c = jet.data
    eta = basis.metric
    eps = basis.eps_upper
    p = c.polar
    U = p.phi2 * p.u
    S = p.phi2 * p.s
    Sl = eta @ S
    dS_up = _dS(jet)                       # d_r S^k
    dS_low = dS_up @ eta                   # d_r S_k
    lhs = U @ jet.dP @ eta                 # U^r d_r P^s
    force = em.q * em.F_upper @ (eta @ U)
    div_beta = np.einsum("rs,r->s", jet.ddbeta @ eta, S) + (eta @ c.dbeta) * np.trace(dS_up)
    R_mixed = np.einsum("ank,ks->ans", c.R, eta)
    dR_mixed = np.einsum("rank,ks->rans", jet.dR, eta)
    div_conn = np.einsum("rank,rans,k->s", eps, dR_mixed, Sl) + np.einsum("rank,ans,rk->s", eps, R_mixed, dS_low)
    res = lhs - force + 0.5 * (div_beta - 0.5 * div_conn)
    return from_components("navier-stokes", {"NS": res})


def lorentz_limit_residual(P_gradient, u, em: EMField) -> np.ndarray:
    """``u^r d_r P^s - q F^{s a} u_a`` (Newton law with Lorentz force)."""
    eta = _metric(em.dim)
    return np.asarray(u) @ np.asarray(P_gradient) @ eta - em.q * em.F_upper @ (eta @ u)


@dataclass(frozen=True)
class SecondOrderPotentials:
    Mvec: np.ndarray
    Sigvec: np.ndarray


def second_order_potentials(state: PolarPointState) -> SecondOrderPotentials:
    """``M = B - 2 P^n u_[n s_a]`` and ``Sigma = R_a - 2 P^r u^n s^s eps_{arns}``."""
    if state.dim != 4:
        raise ConfigurationError("second-order potentials are defined in 1+3")
    return _potentials(state.basis, state.P, state.u, state.s, state.Rtrace, state.Btrace)


def _potentials(basis, P, u, s, Rt, B):
    eta = basis.metric
    Pup = eta @ P
    ul, sl = eta @ u, eta @ s
    M = B - 2 * ((Pup @ ul) * sl - (Pup @ sl) * ul)
    Sig = Rt - 2 * np.einsum("arns,r,n,s->a", basis.eps_lower, Pup, u, s)
    return SecondOrderPotentials(M, Sig)


def second_order_residual(sample: FieldSample, basis: CliffordBasis, m: float) -> float:
    """Residual of ``(1/4) dbeta.dbeta - m^2 - box(phi)/phi
    + (1/2)(-div Sigma + Sigma.Sigma/2 - M.M/2)``."""
    if basis.dim != 4:
        raise ConfigurationError("the second-order equation is implemented in 1+3")
    jet = connection_jet(sample, basis)
    c = jet.data
    p = c.polar
    eta = basis.metric
    Rt, B = c.Rtrace, c.Btrace
    pot = _potentials(basis, c.P, p.u, p.s, Rt, B)
    # d_b Sigma_a
    dRt = np.einsum("bmnk,nk->bm", jet.dR, eta)
    dPup = jet.dP @ eta
    Pup = eta @ c.P
    epsl = basis.eps_lower
    dSig = dRt - 2 * (
        np.einsum("arns,br,n,s->ba", epsl, dPup, p.u, p.s)
        + np.einsum("arns,r,bn,s->ba", epsl, Pup, jet.du, p.s)
        + np.einsum("arns,r,n,bs->ba", epsl, Pup, p.u, jet.ds)
    )
    div_sig = float(np.einsum("ab,ba->", eta, dSig))
    dln = c.dlnphi2
    box_ln = float(np.einsum("ab,ab->", eta, jet.ddlnphi2))
    box_phi_over_phi = 0.5 * box_ln + 0.25 * float(dln @ eta @ dln)
    val = (
        0.25 * float(c.dbeta @ eta @ c.dbeta)
        - m ** 2
        - box_phi_over_phi
        + 0.5 * (-div_sig + 0.5 * float(pot.Sigvec @ eta @ pot.Sigvec) - 0.5 * float(pot.Mvec @ eta @ pot.Mvec))
    )
    return abs(val)


# --------------------------------------------------------------------------
# non-relativistic limit


@dataclass(frozen=True)
class NonRelEnergy:
    """Both sides of ``H = P.P/(2m) + V + Q`` at one point."""

    H_relativistic: float
    H_schrodinger: float
    kinetic: float
    V: float
    Q: float
    regime_ok: bool


def magnetic_energy(u, s, em: EMField, m: float) -> float:
    """``V = q F^{ar} u^n s^s eps_{arns} / (4m)``.

    With ``F_{ij} = -eps_{ijk} B^k`` this is ``-q B.s / (2m)`` in the rest
    frame, the Pauli spin energy.
    """
    from .clifford import basis_for

    basis = basis_for(4)
    return float(em.q * np.einsum("ar,n,s,arns->", em.F_upper, u, s, basis.eps_lower) / (4 * m))


def nonrel_limit_energy(
    sample: FieldSample,
    basis: CliffordBasis,
    m: float,
    em: EMField | None = None,
    beta_tol: float = 0.1,
    R_tol: float = 0.1,
) -> NonRelEnergy:
    """Relativistic ``H = P^0 - m`` against ``P.P/(2m) + V + Q`` built from
    the same field, with ``Q = -lap(phi)/(2 m phi)``.

    A :class:`RegimeWarning` is issued when ``|beta|`` or ``|R|/m`` exceed
    the tolerances (the reduction assumes both vanish).
    """
    from .connections import decompose_derivative

    if sample.ddpsi is None:
        raise ConfigurationError("the quantum potential needs second derivatives")
    em = EMField.free(basis.dim, sample.q) if em is None else em
    c = decompose_derivative(sample, basis)
    pj = polar_jet(sample.psi, sample.dpsi, basis, sample.ddpsi)
    P = c.P
    Pvec = -P[1:]
    dln = pj.dlnphi2[1:]
    lap_ln = float(np.trace(pj.ddlnphi2[1:, 1:]))
    lap_phi_over_phi = 0.5 * lap_ln + 0.25 * float(dln @ dln)
    Q = -lap_phi_over_phi / (2 * m)
    V = magnetic_energy(c.polar.u, c.polar.s, em, m) if basis.dim == 4 else 0.0
    kin = float(Pvec @ Pvec) / (2 * m)
    beta = c.polar.beta if c.polar.beta is not None else 0.0
    ok = abs(beta) <= beta_tol and float(np.abs(c.R).max()) <= R_tol * m
    if not ok:
        warnings.warn(f"non-relativistic reduction outside its regime (beta={beta:.3g}, |R|max={np.abs(c.R).max():.3g})", RegimeWarning, stacklevel=2)
    return NonRelEnergy(float(P[0] - m), kin + V + Q, kin, V, Q, ok)


# --------------------------------------------------------------------------
# classical Lorentz-force orbits


def lorentz_orbit(em: EMField, m: float, x0, u0, dtau: float, steps: int):
    """RK4 for ``dx/dtau = u``, ``du/dtau = (q/m) F^s_a u^a``; returns
    positions and velocities, each of shape ``(steps + 1, dim)``."""
    eta = _metric(em.dim)
    K = em.q / m * em.F_upper @ eta

    def rhs(y):
        n = em.dim
        return np.concatenate([y[n:], K @ y[n:]])

    y = np.concatenate([np.asarray(x0, float), np.asarray(u0, float)])
    out = [y]
    for _ in range(steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dtau * k1)
        k3 = rhs(y + 0.5 * dtau * k2)
        k4 = rhs(y + dtau * k3)
        y = y + dtau / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(y)
    arr = np.array(out)
    return arr[:, : em.dim], arr[:, em.dim:]


def fit_circle(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Algebraic least-squares circle through 2-D points: (centre, radius)."""
    pts = np.asarray(points, dtype=float)
    A = np.column_stack([2 * pts, np.ones(len(pts))])
    b = np.sum(pts ** 2, axis=1)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    centre = sol[:2]
    return centre, float(np.sqrt(sol[2] + centre @ centre))


def cyclotron_radius(em: EMField, m: float, u0) -> float:
    """Classical oracle ``r = |p_perp| / |q B|`` for a uniform magnetic field."""
    B = em.magnetic()
    Bn = np.linalg.norm(B)
    p = m * np.asarray(u0, float)[1:]
    p_perp = p - (p @ B) / Bn ** 2 * B
    return float(np.linalg.norm(p_perp) / abs(em.q * Bn))


@dataclass(frozen=True)
class NonRelComparison:
    """Dirac ``P^0 - m`` against the Schrödinger ``-d_t S`` for one packet."""

    v: float
    H_dirac: float
    H_schrodinger: float
    H_schrodinger_form: float
    discrepancy: float


def nonrel_packet_comparison(v: float, m: float = 1.0, width_cycles: float = 10.0, modes: int = 241, kh: float = 0.002) -> NonRelComparison:
    """Compare a slow 1+1 Dirac packet with its Schrödinger counterpart.

    Both packets have the Gaussian spectrum ``exp(-sigma^2 (k - m v)^2)``
    with ``sigma = width_cycles / (m v)``.  The Dirac side is a sum of
    positive-energy plane waves, the Schrödinger side a Crank-Nicolson
    evolution of the matching wave function on a lattice with
    ``k h = kh``.  Energies are compared at the packet centre after one
    step; ``discrepancy`` is relative to the Schrödinger value.
    """
    from .clifford import basis_for
    from .schrodinger import WaveFunction, evolve, gaussian_packet, nonrel_fields
    from .sources import PlaneWaveSpec, field_from_specs

    if not 0 < v < 1:
        raise ConfigurationError("packet velocity must lie in (0, 1)")
    basis = basis_for(2)
    k0 = m * v
    sigma = width_cycles / k0
    ks = k0 + np.linspace(-6.0, 6.0, modes) / sigma
    specs = [PlaneWaveSpec.from_spatial(m, [k], 1, np.exp(-(sigma * (k - k0)) ** 2)) for k in ks]
    dirac = field_from_specs(specs, basis)
    h = kh / k0
    dt = 1.0 / m
    x = np.arange(-8 * sigma, 8 * sigma + h / 2, h)
    w = WaveFunction((x,), gaussian_packet(x, 0.0, sigma, k0), m, dt)
    fields = nonrel_fields(evolve(w, 2))
    i = int(np.argmin(np.abs(x)))
    H_s = float(fields.H[i])
    H_form = float(fields.P[0][i] ** 2 / (2 * m) + fields.Q[i])
    e = nonrel_limit_energy(dirac.sample(np.array([dt, x[i]])), basis, m)
    return NonRelComparison(v, e.H_relativistic, H_s, H_form, abs(e.H_relativistic - H_s) / abs(H_s))
