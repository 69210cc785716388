"""Polar Dirac systems, Madelung systems and their equivalence.

Index layout: ``u``, ``s`` and the density derivative ``dU[mu, nu] =
d_mu U^nu`` carry upper vector indices; ``P``, ``R_{ij mu}``, ``dlnphi2``
and ``dbeta`` are covariant.  Antisymmetrisation brackets are unnormalised,
``u_[a s_b] = u_a s_b - u_b s_a``.

Every residual is linear and homogeneous in the "jet" unknowns
``(P, R, dlnphi2, dbeta, m)`` once the point values ``(phi2, beta, u, s)``
are fixed and ``dU`` follows from the transport identity.  The randomized
equivalence suites exploit this: they draw a configuration from the null
space of one system and evaluate the other.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .clifford import ConfigurationError, basis_for
from .lorentz import boost_generator, frame_transform, vector_transform
from .report import ResidualReport, from_components
from .spinor import PolarVariables, angular_tensor

ORTHO_TOL = 1e-8
DUPLICATE_TOL = 1e-10


@dataclass(frozen=True)
class PolarPointState:
    """Everything the polar and Madelung equations need at one point.

    ``beta`` and ``dbeta`` are absent in 1+2, ``s`` exists only in 1+3.
    ``dU`` is optional; when missing it is derived from the transport
    identity ``d_mu u_nu = u^a R_{a nu mu}``.
    """

    dim: int
    phi2: float
    u: np.ndarray
    P: np.ndarray
    R: np.ndarray
    dlnphi2: np.ndarray
    m: float
    beta: float | None = None
    s: np.ndarray | None = None
    dbeta: np.ndarray | None = None
    dU: np.ndarray | None = None

    def __post_init__(self):
        n = self.dim
        if n not in (2, 3, 4):
            raise ConfigurationError(f"unsupported dimension {n}")
        for name, shape in (("u", (n,)), ("P", (n,)), ("R", (n, n, n)), ("dlnphi2", (n,))):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ConfigurationError(f"{name} has shape {arr.shape}, expected {shape}")
            object.__setattr__(self, name, arr)
        if (self.beta is None) != (n == 3) or (self.dbeta is None) != (n == 3):
            raise ConfigurationError("beta and dbeta are required in 1+1 and 1+3 and absent in 1+2")
        if (self.s is None) != (n != 4):
            raise ConfigurationError("s is required in 1+3 and absent otherwise")
        if self.dbeta is not None:
            object.__setattr__(self, "dbeta", np.asarray(self.dbeta, dtype=float))
        if self.s is not None:
            object.__setattr__(self, "s", np.asarray(self.s, dtype=float))
        if self.dU is not None:
            object.__setattr__(self, "dU", np.asarray(self.dU, dtype=float))
        if not self.phi2 > 0:
            raise ConfigurationError("phi2 must be positive")
        if self.m < 0:
            raise ConfigurationError("mass must be non-negative")
        eta = self.basis.metric
        if abs(self.u @ eta @ self.u - 1) > ORTHO_TOL:
            raise ConfigurationError("u is not unit timelike")
        if self.s is not None and (abs(self.s @ eta @ self.s + 1) > ORTHO_TOL or abs(self.u @ eta @ self.s) > ORTHO_TOL):
            raise ConfigurationError("s is not a unit spacelike vector orthogonal to u")

    @property
    def basis(self):
        return basis_for(self.dim)

    @property
    def polar(self) -> PolarVariables:
        return PolarVariables(self.dim, self.phi2, self.u, self.beta, self.s)

    @property
    def Rtrace(self) -> np.ndarray:
        return np.einsum("mnk,nk->m", self.R, self.basis.metric)

    @property
    def Btrace(self) -> np.ndarray | None:
        if self.dim != 4:
            return None
        return 0.5 * np.einsum("mani,ani->m", self.basis.eps_lower, self.basis.raise_index(self.R))

    def density_gradient(self) -> np.ndarray:
        """``d_mu U^nu``: stored value, else the transport-identity value."""
        if self.dU is not None:
            return self.dU
        return transport_density_gradient(self.phi2, self.u, self.R, self.dlnphi2)

    def transformed(self, lam) -> "PolarPointState":
        """Apply a global proper Lorentz transformation ``Lambda^mu_nu``."""
        lam = np.asarray(lam, dtype=float)
        inv = np.linalg.inv(lam)
        cov = lambda w: w @ inv  # noqa: E731
        R = np.einsum("abc,ai,bj,ck->ijk", self.R, inv, inv, inv)
        dU = None if self.dU is None else np.einsum("ab,am,nb->mn", self.dU, inv, lam)
        return replace(
            self,
            u=lam @ self.u,
            s=None if self.s is None else lam @ self.s,
            P=cov(self.P),
            R=R,
            dlnphi2=cov(self.dlnphi2),
            dbeta=None if self.dbeta is None else cov(self.dbeta),
            dU=dU,
        )


@dataclass(frozen=True)
class AuxiliaryVectors:
    E: np.ndarray
    F: np.ndarray


def transport_density_gradient(phi2, u, R, dlnphi2, scale: float = 1.0) -> np.ndarray:
    """``d_mu U^nu = phi2 (dlnphi2_mu u^nu + u^a R_a^nu_mu)``.

    ``scale`` multiplies the connection term; values other than one break
    the identity on purpose (negative controls).
    """
    n = np.asarray(u).shape[-1]
    eta = np.diag([1.0] + [-1.0] * (n - 1))
    dln = np.asarray(dlnphi2)
    conn = np.einsum("a,...abm,bn->...mn", u, R, eta)
    return phi2 * (dln[..., :, None] * u + scale * conn)


# --------------------------------------------------------------------------
# component kernels: batched over a leading axis, frame quantities shared


@dataclass(frozen=True)
class _Frame:
    dim: int
    phi2: float
    u: np.ndarray
    beta: float | None = None
    s: np.ndarray | None = None


@dataclass(frozen=True)
class _Jet:
    P: np.ndarray        # (B, n)
    R: np.ndarray        # (B, n, n, n)
    dln: np.ndarray      # (B, n)
    dbeta: np.ndarray | None
    m: np.ndarray        # (B,)
    dU: np.ndarray       # (B, n, n)


def _traces(R, basis):
    sg = np.diag(basis.metric)  # diagonal metric: raising is a sign flip
    Rt = np.einsum("...mnn,n->...m", R, sg)
    Rup = R * sg[:, None, None] * sg[None, :, None] * sg
    B = 0.5 * np.einsum("mani,...ani->...m", basis.eps_lower, Rup) if basis.dim == 4 else None
    return Rt, B, Rup


def _anti(X):
    return X - np.swapaxes(X, -1, -2)


def _aux(fr: _Frame, jet: _Jet, basis):
    eta = basis.metric
    Rt, B, _ = _traces(jet.R, basis)
    sl = eta @ fr.s
    E = 0.5 * (B + jet.dbeta + 2 * jet.m[:, None] * sl * np.cos(fr.beta))
    F = 0.5 * (Rt + jet.dln + 2 * jet.m[:, None] * sl * np.sin(fr.beta))
    return E, F


def _dirac_components(fr: _Frame, jet: _Jet) -> dict[str, np.ndarray]:
    basis = basis_for(fr.dim)
    eta = basis.metric
    Rt, B, _ = _traces(jet.R, basis)
    Pup = jet.P @ eta
    ul = eta @ fr.u
    m = jet.m[:, None]
    if fr.dim == 4:
        sl = eta @ fr.s
        Pu, Ps = Pup @ ul, Pup @ sl
        bracket = Pu[:, None] * sl - Ps[:, None] * ul  # P^nu u_[nu s_a]
        dual = np.einsum("arns,...r,n,s->...a", basis.eps_lower, Pup, fr.u, fr.s)
        return {
            "dp1": jet.dbeta + B - 2 * bracket + 2 * m * sl * np.cos(fr.beta),
            "dp2": jet.dln + Rt - 2 * dual + 2 * m * sl * np.sin(fr.beta),
        }
    if fr.dim == 3:
        axial = 0.5 * np.einsum("...ija,ija->...", jet.R, basis.eps_upper)
        return {
            "constraint": (axial + 2 * Pup @ ul - 2 * jet.m)[:, None],
            "trueequation": Rt + 2 * np.einsum("kab,...a,b->...k", basis.eps_lower, Pup, fr.u) + jet.dln,
        }
    eps = basis.eps_lower
    ue = fr.u @ eps  # u^a eps_{a mu}
    return {
        "chan": jet.dbeta - 2 * Pup @ eps + 2 * m * ue * np.cos(fr.beta),
        "mod": jet.dln + Rt + 2 * m * ue * np.sin(fr.beta),
    }


def _madelung_components(fr: _Frame, jet: _Jet) -> dict[str, np.ndarray]:
    basis = basis_for(fr.dim)
    eta = basis.metric
    n = fr.dim
    Rt, B, Rup = _traces(jet.R, basis)
    ul = eta @ fr.u
    m = jet.m[:, None]
    div = np.einsum("...mm->...", jet.dU)[:, None]
    if n == 4:
        sl = eta @ fr.s
        U, S = fr.phi2 * fr.u, fr.phi2 * fr.s
        Ul, Sl = eta @ U, eta @ S
        eps_up = basis.eps_upper
        grad_up = np.einsum("ab,...bn->...an", eta, jet.dU)          # d^a U^n
        Rt_up = Rt @ eta
        Mlow = angular_tensor(PolarVariables(4, fr.phi2, fr.u, fr.beta, fr.s), basis)
        Mup = eta @ Mlow @ eta
        curl = (
            _anti(grad_up)
            + _anti(Rt_up[:, :, None] * U[None, None, :])
            - np.einsum("...anm,m->...an", Rup, Ul)
            + np.einsum("anmr,...m,r->...an", eps_up, jet.dbeta, Ul)
            + 2 * np.einsum("anmr,...m,r->...an", eps_up, jet.P, Sl)
            - 2 * jet.m[:, None, None] * Mup
        )
        us = np.outer(fr.u, fr.s) - np.outer(fr.s, fr.u)                 # u^[nu s^mu]
        hj = (
            m * np.cos(fr.beta) * fr.u
            + 0.5 * (jet.dbeta + B) @ us
            + 0.5 * np.einsum("...n,a,s,nasm->...m", jet.dln + Rt, ul, sl, eps_up)
        )
        return {"M1": div, "M2": curl, "M3": jet.P @ eta - hj}
    if n == 3:
        eps_up = basis.eps_upper
        axial = 0.25 * np.einsum("...abc,abc->...", jet.R, eps_up)
        hj = (jet.m - axial)[:, None] * fr.u - 0.5 * np.einsum("ijk,j,...k->...i", eps_up, ul, jet.dln + Rt)
        return {"M3-1": div, "M3-2": jet.P @ eta - hj}
    eps_up = basis.eps_upper
    dUl = jet.dU @ eta
    curl = 0.5 * np.einsum("mn,...mn->...", eps_up, dUl) + jet.m * fr.phi2 * np.sin(fr.beta)
    return {
        "M2-1": div,
        "M2-2": jet.P @ eta - (m * np.cos(fr.beta) * fr.u - 0.5 * jet.dbeta @ eps_up.T),
        "M2-3": curl[:, None],
    }


def _q_components(u, s, E, F, P, basis) -> dict[str, np.ndarray]:
    """Residuals of the auxiliary (q) Madelung system; vectors lower."""
    eta = basis.metric
    ul, sl = eta @ u, eta @ s
    Fup, Eup, Pup = F @ eta, E @ eta, P @ eta
    q1 = (Fup @ ul)[..., None]
    q2 = (
        np.einsum("anst,...a,n->...st", basis.eps_lower, Fup, u)
        - (E[..., :, None] * ul - ul[:, None] * E[..., None, :])
        - (P[..., :, None] * sl - sl[:, None] * P[..., None, :])
    )
    us = np.outer(u, s) - np.outer(s, u)
    q3 = Pup - E @ us - np.einsum("...n,a,s,nasm->...m", F, ul, sl, basis.eps_upper)
    return {"q1": q1, "q2": q2, "q3": q3}


def _d_components(u, s, E, F, P, basis) -> dict[str, np.ndarray]:
    eta = basis.metric
    ul, sl = eta @ u, eta @ s
    Pup = P @ eta
    d1 = E - ((Pup @ ul)[..., None] * sl - (Pup @ sl)[..., None] * ul)
    d2 = F - np.einsum("mrns,...r,n,s->...m", basis.eps_lower, Pup, u, s)
    return {"d1": d1, "d2": d2}


def _split(state: PolarPointState) -> tuple[_Frame, _Jet]:
    fr = _Frame(state.dim, state.phi2, state.u, state.beta, state.s)
    jet = _Jet(
        state.P[None],
        state.R[None],
        state.dlnphi2[None],
        None if state.dbeta is None else state.dbeta[None],
        np.array([state.m], dtype=float),
        state.density_gradient()[None],
    )
    return fr, jet


def _squeeze(comps):
    return {k: v[0] for k, v in comps.items()}


# --------------------------------------------------------------------------
# public residuals


def dirac_polar_residuals(state: PolarPointState) -> ResidualReport:
    """Polar form of the Dirac equation: (dp1, dp2), (constraint, trueequation)
    or (chan, mod) depending on the dimension."""
    fr, jet = _split(state)
    return from_components(f"dirac-polar-{state.dim}", _squeeze(_dirac_components(fr, jet)))


def madelung_residuals(state: PolarPointState) -> ResidualReport:
    """Continuity, curl (1+1, 1+3) and Hamilton-Jacobi/guidance residuals."""
    fr, jet = _split(state)
    return from_components(f"madelung-{state.dim}", _squeeze(_madelung_components(fr, jet)))


def aux_vectors(state: PolarPointState) -> AuxiliaryVectors:
    """``2E = B + dbeta + 2 m s cos(beta)``, ``2F = Rtrace + dlnphi2 + 2 m s sin(beta)``."""
    if state.dim != 4:
        raise ConfigurationError("auxiliary vectors exist in 1+3 only")
    fr, jet = _split(state)
    E, F = _aux(fr, jet, state.basis)
    return AuxiliaryVectors(E[0], F[0])


def q_system_residuals(state: PolarPointState) -> ResidualReport:
    aux = aux_vectors(state)
    comps = _q_components(state.u, state.s, aux.E, aux.F, state.P, state.basis)
    return from_components("q-system", comps)


def d_system_residuals(state: PolarPointState) -> ResidualReport:
    aux = aux_vectors(state)
    comps = _d_components(state.u, state.s, aux.E, aux.F, state.P, state.basis)
    return from_components("d-system", comps)


def state_from_connection(c, m: float, dU=None) -> PolarPointState:
    """Wrap :class:`~polardirac.connections.ConnectionData` as a point state.

    Pass ``dU`` computed independently (e.g. from bilinear derivatives) to
    make the continuity and curl checks non-trivial.
    """
    p = c.polar
    return PolarPointState(p.dim, p.phi2, p.u, c.P, c.R, c.dlnphi2, float(m), p.beta, p.s, c.dbeta, dU)


def state_from_sample(sample, basis, m: float) -> PolarPointState:
    """Decompose a field sample; ``dU`` comes from the bilinear jet."""
    from .connections import decompose_derivative
    from .spinor import polar_jet

    c = decompose_derivative(sample, basis)
    pj = polar_jet(sample.psi, sample.dpsi, basis)
    dU = c.polar.phi2 * (np.outer(pj.dlnphi2, pj.polar.u) + pj.du)
    return state_from_connection(c, m, dU)


# --------------------------------------------------------------------------
# randomized equivalence suites


class _Layout:
    """Packing of the jet unknowns ``(P, R_{i<j, mu}, dlnphi2, dbeta, m)``."""

    def __init__(self, dim: int):
        self.dim = dim
        self.pairs = [(i, j) for i in range(dim) for j in range(i + 1, dim)]
        self.has_beta = dim != 3
        self.size = dim + len(self.pairs) * dim + dim + (dim if self.has_beta else 0) + 1

    def unpack(self, Z: np.ndarray, fr: _Frame, transport_scale: float = 1.0) -> _Jet:
        Z = np.atleast_2d(Z)
        n, batch = self.dim, Z.shape[0]
        pos = 0
        P = Z[:, pos:pos + n]
        pos += n
        R = np.zeros((batch, n, n, n))
        for i, j in self.pairs:
            R[:, i, j, :] = Z[:, pos:pos + n]
            R[:, j, i, :] = -Z[:, pos:pos + n]
            pos += n
        dln = Z[:, pos:pos + n]
        pos += n
        dbeta = None
        if self.has_beta:
            dbeta = Z[:, pos:pos + n]
            pos += n
        m = Z[:, pos]
        dU = transport_density_gradient(fr.phi2, fr.u, R, dln, transport_scale)
        return _Jet(P, R, dln, dbeta, m, dU)

    @property
    def mass_index(self) -> int:
        return self.size - 1


def random_frame(rng: np.random.Generator, dim: int, max_rapidity: float = 2.0):
    """``u`` = boosted rest vector; in 1+3 ``s`` = boosted random rest-frame axis."""
    rap = rng.uniform(0.0, max_rapidity)
    if dim == 2:
        direction = np.array([rng.choice([-1.0, 1.0])])
    else:
        direction = rng.normal(size=dim - 1)
        direction /= np.linalg.norm(direction)
    lam = vector_transform(boost_generator(rap * direction, dim))
    u = lam[:, 0].copy()
    s = None
    if dim == 4:
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        s = lam @ np.concatenate([[0.0], axis])
    return u, s


def _random_point(rng, dim) -> _Frame:
    u, s = random_frame(rng, dim)
    beta = None if dim == 3 else float(rng.uniform(-np.pi, np.pi))
    return _Frame(dim, float(rng.uniform(0.5, 2.0)), u, beta, s)


def _system(kind: str, fr: _Frame, jet: _Jet) -> dict[str, np.ndarray]:
    if kind == "dirac":
        comps = _dirac_components(fr, jet)
        if fr.dim == 4:
            E, F = _aux(fr, jet, basis_for(4))
            comps.update(_d_components(fr.u, fr.s, E, F, jet.P, basis_for(4)))
        return comps
    comps = _madelung_components(fr, jet)
    if fr.dim == 4:
        E, F = _aux(fr, jet, basis_for(4))
        comps.update(_q_components(fr.u, fr.s, E, F, jet.P, basis_for(4)))
    return comps


def _jacobian(kind, fr, layout, scale) -> np.ndarray:
    jet = layout.unpack(np.eye(layout.size), fr, scale)
    comps = _system(kind, fr, jet)
    return np.concatenate([v.reshape(layout.size, -1) for v in comps.values()], axis=1).T


def _null_space(J: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    _, sv, vt = np.linalg.svd(J)
    rank = int(np.sum(sv > rtol * sv[0])) if sv.size else 0
    return vt[rank:].T


NULLITY_PROBES = 10


def _equivalence(source: str, target: str, dim: int, seed: int, n: int, corrupt: str | None) -> ResidualReport:
    if dim not in (2, 3, 4):
        raise ConfigurationError(f"unsupported dimension {dim}")
    if n < 0:
        raise ConfigurationError("sample count must be non-negative")
    if corrupt not in (None, "momentum", "transport"):
        raise ConfigurationError(f"unknown corruption {corrupt!r}")
    system = f"equivalence-{'forward' if source == 'dirac' else 'backward'}-{dim}"
    layout = _Layout(dim)
    rng = np.random.default_rng(seed)
    # the corrupted transport map is used wherever Madelung equations are evaluated
    mscale = 1.1 if corrupt == "transport" else 1.0
    sscale = mscale if source == "madelung" else 1.0
    tscale = mscale if target == "madelung" else 1.0
    worst: dict[str, float] = {}
    resampled = 0
    nullities = set()
    for i in range(n):
        fr = _random_point(rng, dim)
        N = _null_space(_jacobian(source, fr, layout, sscale))
        if i < NULLITY_PROBES:
            # the target nullity is informational; a few probes suffice
            nullities.add((N.shape[1], _null_space(_jacobian(target, fr, layout, tscale)).shape[1]))
        for attempt in range(100):
            Z0 = rng.uniform(-1.0, 1.0, layout.size)
            Z0[layout.mass_index] = rng.uniform(0.0, 2.0)
            Z = N @ (N.T @ Z0)
            if Z[layout.mass_index] >= 0.0:
                break
            resampled += 1
        else:
            raise RuntimeError("sampler could not produce a non-negative mass")
        if corrupt == "momentum":
            kick = rng.normal(size=dim)
            Z[:dim] += 0.1 * kick / np.linalg.norm(kick)
        jet = layout.unpack(Z, fr, tscale)
        for label, val in _system(target, fr, jet).items():
            worst[label] = max(worst.get(label, 0.0), float(np.linalg.norm(val)))
    info = {"n": n, "seed": seed, "resampled": resampled}
    if nullities:
        src_null = sorted({a for a, _ in nullities})
        tgt_null = sorted({b for _, b in nullities})
        info["nullity_source"] = ",".join(map(str, src_null))
        info["nullity_target"] = ",".join(map(str, tgt_null))
    if corrupt:
        info["corrupt"] = corrupt
    return ResidualReport(system, worst, info)


def equivalence_forward(dim: int, seed: int = 0, n: int = 1000, corrupt: str | None = None) -> ResidualReport:
    """Impose the polar Dirac system exactly, report Madelung residuals.

    In 1+3 the report also carries the auxiliary (q1)-(q3) residuals.
    ``corrupt`` ("momentum" or "transport") builds a negative control.
    """
    return _equivalence("dirac", "madelung", dim, seed, n, corrupt)


def equivalence_backward(dim: int, seed: int = 0, n: int = 1000, corrupt: str | None = None) -> ResidualReport:
    """Impose the Madelung system exactly, report polar Dirac residuals.

    Only ``corrupt="momentum"`` is a meaningful control here: a distorted
    transport map over-constrains the 1+3 Madelung side (its null space
    shrinks) and the Dirac residuals can stay at zero.
    """
    return _equivalence("madelung", "dirac", dim, seed, n, corrupt)


# --------------------------------------------------------------------------
# fixed frame


_SYMBOLS = [f"{v}^{k}" for v in "EFP" for k in range(4)]


def _q_rows() -> tuple[list[str], np.ndarray]:
    """The eleven q-equations in the frame ``u = e0``, ``s = e3`` as rows over
    the upper components ``(E^0..3, F^0..3, P^0..3)``."""
    basis = basis_for(4)
    eta = basis.metric
    u = np.array([1.0, 0, 0, 0])
    s = np.array([0, 0, 0, 1.0])
    X = np.eye(12)
    E, F, P = (X[:, 4 * k:4 * k + 4] @ eta for k in range(3))  # lower components
    comps = _q_components(u, s, E, F, P, basis)
    labels = ["q1"]
    rows = [comps["q1"][:, 0]]
    for a in range(4):
        for b in range(a + 1, 4):
            labels.append(f"q2[{a}{b}]")
            rows.append(comps["q2"][:, a, b])
    for a in range(4):
        labels.append(f"q3[{a}]")
        rows.append(comps["q3"][:, a])
    return labels, np.array(rows)


def render_row(row: np.ndarray) -> str:
    """Human-readable linear form such as ``P^0 - E^3``."""
    terms = []
    for coef, sym in zip(row, _SYMBOLS):
        if abs(coef) < 1e-12:
            continue
        mag = "" if abs(abs(coef) - 1) < 1e-12 else f"{abs(coef):g} "
        sign = "-" if coef < 0 else "+"
        terms.append(f"{sign} {mag}{sym}")
    if not terms:
        return "0"
    text = " ".join(terms)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


@dataclass(frozen=True)
class FixedFrameReport:
    labels: list[str]
    expressions: list[str]
    values: np.ndarray
    duplicates: list[tuple[str, str]]
    independent: int
    frame_error: float
    extra: dict = field(default_factory=dict)

    @property
    def duplicate_count(self) -> int:
        return len(self.duplicates)

    def to_text(self) -> str:
        lines = ["# system,fixed-frame", f"# independent,{self.independent}", f"# duplicates,{self.duplicate_count}"]
        lines.append("label,equation,value")
        for lab, expr, val in zip(self.labels, self.expressions, self.values):
            lines.append(f"{lab},{expr},{val:.6e}")
        for a, b in self.duplicates:
            lines.append(f"duplicate,{a},{b}")
        return "\n".join(lines) + "\n"


def fixed_frame_check(state: PolarPointState) -> FixedFrameReport:
    """Evaluate (q1)-(q3) in the frame where ``u = e0`` and ``s = e3`` and
    list the equations that appear twice."""
    if state.dim != 4:
        raise ConfigurationError("the fixed-frame analysis is defined in 1+3 only")
    eta = state.basis.metric
    try:
        lam = frame_transform(state.u, state.s)
    except ValueError as exc:
        raise ConfigurationError(f"cannot boost to the rest frame: {exc}") from exc
    inv = np.linalg.inv(lam)
    frame_error = float(max(np.abs(inv @ state.u - [1, 0, 0, 0]).max(), np.abs(inv @ state.s - [0, 0, 0, 1]).max()))
    aux = aux_vectors(state)
    X = np.concatenate([inv @ (eta @ aux.E), inv @ (eta @ aux.F), inv @ (eta @ state.P)])
    labels, rows = _q_rows()
    unit = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    dups = []
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            if abs(abs(unit[i] @ unit[j]) - 1.0) < DUPLICATE_TOL:
                dups.append((labels[i], labels[j]))
    rank = int(np.linalg.matrix_rank(rows))
    return FixedFrameReport(labels, [render_row(r) for r in rows], rows @ X, dups, rank, frame_error)
