"""Tensorial connections from a spinor field and its first derivatives.

The gauge-covariant derivative is ``D_mu psi = (d_mu + i q A_mu) psi`` and is
decomposed as

    D_mu psi = (1/2 dlnphi2_mu - i P_mu - (i/2) dbeta_mu parity
                - 1/2 R_{ij mu} sigma^{ij}) psi

for real unknowns.  With this sign of the coupling ``P`` is the kinetic
momentum ``p - q A`` and the classical limit of the energy balance is the
Lorentz force ``dP/dtau = q F u`` with ``F_{mu nu} = d_mu A_nu - d_nu A_mu``.

The map from unknowns to ``D psi`` has a one-dimensional kernel in 1+2 and
1+3 (a rotation in the plane transverse to velocity and spin is a phase on
the spinor).  It is removed by requiring that component of ``R`` to vanish:
``eps^{ijkl} u_k s_l R_{ij mu} = 0`` (1+3), ``eps^{ijk} u_k R_{ij mu} = 0``
(1+2).  Every polar equation is insensitive to this choice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import CliffordBasis, ConfigurationError
from .report import ResidualReport, norm
from .spinor import PolarVariables, polar_jet

FIT_TOL = 1e-8


class InconsistentSampleError(ValueError):
    """Derivative data cannot be written in polar form (fit defect too large)."""


@dataclass(frozen=True)
class FieldSample:
    """A spinor and its raw partial derivatives ``dpsi[mu]`` at one point."""

    psi: np.ndarray
    dpsi: np.ndarray
    A: np.ndarray | None = None       # A_mu
    q: float = 0.0
    point: np.ndarray | None = None
    ddpsi: np.ndarray | None = None   # d_rho d_mu psi, optional
    dA: np.ndarray | None = None      # dA[rho, mu] = d_rho A_mu, optional

    def covariant_derivative(self) -> np.ndarray:
        dpsi = np.asarray(self.dpsi, dtype=complex)
        if self.A is None or self.q == 0.0:
            return dpsi
        return dpsi + 1j * self.q * np.outer(np.asarray(self.A, dtype=float), self.psi)


@dataclass(frozen=True)
class ConnectionData:
    """Polar content of ``D psi``; ``P`` and traces are covariant (lower)."""

    polar: PolarVariables
    P: np.ndarray
    R: np.ndarray                # R_{ij mu}
    Rtrace: np.ndarray           # R_mu = R_{mu nu}^nu
    dlnphi2: np.ndarray
    fit_residual: float
    Btrace: np.ndarray | None = None   # 1+3
    dbeta: np.ndarray | None = None    # 1+1, 1+3
    axial: float | None = None         # 1+2: (1/2) R_{ija} eps^{ija}


@dataclass(frozen=True)
class ConnectionJet:
    """Connection data with first derivatives; derivative axis first."""

    data: ConnectionData
    dP: np.ndarray          # d_rho P_mu
    dR: np.ndarray          # d_rho R_{ij mu}
    ddlnphi2: np.ndarray    # d_rho dlnphi2_mu
    ddbeta: np.ndarray | None
    du: np.ndarray          # d_rho u^nu
    ds: np.ndarray | None


def _pairs(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _columns(psi, basis: CliffordBasis) -> np.ndarray:
    """Complex columns multiplying each unknown: d, P, [b], R_{ij} (i<j)."""
    cols = [0.5 * psi, -1j * psi]
    if basis.parity is not None:
        cols.append(-0.5j * basis.parity @ psi)
    cols += [-basis.sigmas[i, j] @ psi for i, j in _pairs(basis.dim)]
    return np.array(cols).T


def _gauge_row(u_lower, s_lower, basis: CliffordBasis) -> np.ndarray | None:
    n = basis.dim
    if n == 2:
        return None
    if n == 3:
        w = np.einsum("ijk,k->ij", basis.eps_upper, u_lower)
    else:
        w = np.einsum("ijkl,k,l->ij", basis.eps_upper, u_lower, s_lower)
    nfix = 2 if basis.parity is None else 3
    row = np.zeros(nfix + len(_pairs(n)))
    row[nfix:] = [2 * w[i, j] for i, j in _pairs(n)]
    return row


def _realify(mat):
    return np.concatenate([mat.real, mat.imag], axis=0)


def _unpack(x, basis):
    n = basis.dim
    nfix = 2 if basis.parity is None else 3
    d, P = x[0], x[1]
    b = x[2] if basis.parity is not None else None
    R = np.zeros((n, n))
    for k, (i, j) in enumerate(_pairs(n)):
        R[i, j] = x[nfix + k]
        R[j, i] = -x[nfix + k]
    return d, P, b, R


def trace_vectors(R, basis: CliffordBasis):
    """``(R_mu, B_mu)`` with ``R_mu = R_{mu nu}^nu`` and, in 1+3,
    ``B_mu = 1/2 eps_{mu a n i} R^{a n i}``; ``B`` is ``None`` otherwise."""
    R = np.asarray(R, dtype=float)
    n = basis.dim
    if R.shape != (n, n, n):
        raise ConfigurationError(f"R has shape {R.shape}, expected {(n, n, n)}")
    Rtrace = np.einsum("mnk,nk->m", R, basis.metric)
    if n != 4:
        return Rtrace, None
    Rup = basis.raise_index(R)
    return Rtrace, 0.5 * np.einsum("mani,ani->m", basis.eps_lower, Rup)


def axial_scalar(R, basis: CliffordBasis) -> float:
    """``(1/2) R_{ija} eps^{ija}`` in 1+2."""
    return 0.5 * float(np.einsum("ija,ija->", R, basis.eps_upper))


def connection_from_traces(Rtrace, basis: CliffordBasis, Btrace=None, axial=None, free=None) -> np.ndarray:
    """Build ``R_{ij mu}`` with prescribed traces.

    ``free`` (optional) is any tensor whose trace parts are projected out
    and replaced, so the result keeps its remaining components.
    """
    n = basis.dim
    eta = basis.metric
    R = np.zeros((n, n, n)) if free is None else np.array(free, dtype=float)
    R = 0.5 * (R - np.swapaxes(R, 0, 1))
    cur_tr, cur_b = trace_vectors(R, basis)
    a = (np.asarray(Rtrace, dtype=float) - cur_tr) / (n - 1)
    R = R + np.einsum("i,jm->ijm", a, eta) - np.einsum("j,im->ijm", a, eta)
    if n == 4 and Btrace is not None:
        b_up = basis.raise_index(np.asarray(Btrace, dtype=float) - cur_b)
        R = R + np.einsum("ijmk,k->ijm", basis.eps_lower, b_up) / 3.0
    if n == 3 and axial is not None:
        shift = axial - axial_scalar(R, basis)
        R = R + shift * basis.eps_lower / 3.0
    return R


def _solve(psi, Dpsi, u_l, s_l, basis):
    cols = _columns(psi, basis)
    Aspin = _realify(cols)
    g = _gauge_row(u_l, s_l, basis)
    if g is not None:
        scale = np.linalg.norm(g)
        gn = g / scale
        Aaug = np.vstack([Aspin, gn])
    else:
        scale, gn, Aaug = 1.0, None, Aspin
    xs, fit = [], 0.0
    for mu in range(basis.dim):
        rhs = np.concatenate([Dpsi[mu].real, Dpsi[mu].imag])
        rhs_aug = np.concatenate([rhs, [0.0]]) if g is not None else rhs
        x, *_ = np.linalg.lstsq(Aaug, rhs_aug, rcond=None)
        xs.append(x)
        fit = max(fit, float(np.linalg.norm(Aspin @ x - rhs)))
    return np.array(xs), fit, Aaug, scale


def _assemble(p, xs, fit, basis) -> ConnectionData:
    n = basis.dim
    d = np.zeros(n)
    P = np.zeros(n)
    b = np.zeros(n) if basis.parity is not None else None
    R = np.zeros((n, n, n))
    for mu in range(n):
        d[mu], P[mu], bm, R[:, :, mu] = _unpack(xs[mu], basis)
        if b is not None:
            b[mu] = bm
    Rtrace, Btrace = trace_vectors(R, basis)
    ax = axial_scalar(R, basis) if n == 3 else None
    return ConnectionData(p, P, R, Rtrace, d, fit, Btrace, b, ax)


def decompose_derivative(sample: FieldSample, basis: CliffordBasis, fit_tol: float = FIT_TOL) -> ConnectionData:
    """Extract ``P``, ``R`` and the gradients of ``ln phi2`` and ``beta``."""
    psi = np.asarray(sample.psi, dtype=complex)
    dpsi = np.asarray(sample.dpsi, dtype=complex)
    if dpsi.shape != (basis.dim, basis.spinor_size):
        raise ConfigurationError(f"dpsi has shape {dpsi.shape}, expected {(basis.dim, basis.spinor_size)}")
    pj = polar_jet(psi, dpsi, basis)
    p = pj.polar
    u_l = basis.metric @ p.u
    s_l = basis.metric @ p.s if p.s is not None else None
    Dpsi = sample.covariant_derivative()
    xs, fit, _, _ = _solve(psi, Dpsi, u_l, s_l, basis)
    scale = max(1.0, float(np.max(np.abs(Dpsi))))
    if fit > fit_tol * scale:
        raise InconsistentSampleError(f"derivative decomposition defect {fit:.3e} exceeds tolerance")
    return _assemble(p, xs, fit, basis)


def connection_jet(sample: FieldSample, basis: CliffordBasis) -> ConnectionJet:
    """Connection data plus exact first derivatives.

    Needs ``sample.ddpsi`` (and ``sample.dA`` when ``q A`` varies).  The
    augmented linear system is square and invertible, so derivatives follow
    from ``A dx = d(rhs) - dA x``.
    """
    if sample.ddpsi is None:
        raise ConfigurationError("connection_jet needs second derivatives ddpsi")
    n = basis.dim
    psi = np.asarray(sample.psi, dtype=complex)
    dpsi = np.asarray(sample.dpsi, dtype=complex)
    ddpsi = np.asarray(sample.ddpsi, dtype=complex)
    pj = polar_jet(psi, dpsi, basis)
    p = pj.polar
    eta = basis.metric
    u_l = eta @ p.u
    s_l = eta @ p.s if p.s is not None else None
    Dpsi = sample.covariant_derivative()
    xs, fit, Aaug, gscale = _solve(psi, Dpsi, u_l, s_l, basis)
    data = _assemble(p, xs, fit, basis)

    q = sample.q
    A = np.zeros(n) if sample.A is None else np.asarray(sample.A, dtype=float)
    dA = np.zeros((n, n)) if sample.dA is None else np.asarray(sample.dA, dtype=float)
    dxs = np.zeros((n, n, xs.shape[1]))  # [rho, mu, k]
    for rho in range(n):
        dAspin = _realify(_columns(dpsi[rho], basis))
        if n > 2:
            du_l = pj.du[rho] @ eta
            if n == 3:
                dg = np.einsum("ijk,k->ij", basis.eps_upper, du_l)
            else:
                ds_l = pj.ds[rho] @ eta
                dg = np.einsum("ijkl,k,l->ij", basis.eps_upper, du_l, s_l) + np.einsum(
                    "ijkl,k,l->ij", basis.eps_upper, u_l, ds_l
                )
            nfix = 2 if basis.parity is None else 3
            grow = np.zeros(xs.shape[1])
            grow[nfix:] = [2 * dg[i, j] for i, j in _pairs(n)]
            dAaug = np.vstack([dAspin, grow / gscale])
        else:
            dAaug = dAspin
        for mu in range(n):
            dD = ddpsi[rho, mu] + 1j * q * (dA[rho, mu] * psi + A[mu] * dpsi[rho])
            drhs = np.concatenate([dD.real, dD.imag])
            if n > 2:
                drhs = np.concatenate([drhs, [0.0]])
            dxs[rho, mu] = np.linalg.solve(Aaug, drhs - dAaug @ xs[mu])
    dP = dxs[:, :, 1]
    dd = dxs[:, :, 0]
    db = dxs[:, :, 2] if basis.parity is not None else None
    dR = np.zeros((n, n, n, n))
    nfix = 2 if basis.parity is None else 3
    for k, (i, j) in enumerate(_pairs(n)):
        dR[:, i, j, :] = dxs[:, :, nfix + k]
        dR[:, j, i, :] = -dxs[:, :, nfix + k]
    return ConnectionJet(data, dP, dR, dd, db, pj.du, pj.ds)


def frame_transport_residual(c: ConnectionData, du, ds=None, basis: CliffordBasis | None = None) -> ResidualReport:
    """Norm of ``d_mu u_nu - u^a R_{a nu mu}`` (and the same for ``s``).

    ``du[mu, nu] = d_mu u^nu`` with the vector index up, as returned by
    :func:`polar_jet`.
    """
    n = c.R.shape[0]
    eta = np.diag([1.0] + [-1.0] * (n - 1)) if basis is None else basis.metric
    res = {"u-transport": norm(np.asarray(du) @ eta - np.einsum("a,anm->mn", c.polar.u, c.R))}
    if ds is not None and c.polar.s is not None:
        res["s-transport"] = norm(np.asarray(ds) @ eta - np.einsum("a,anm->mn", c.polar.s, c.R))
    return ResidualReport(f"frame-transport-{n}", res)
