"""Spinor fields with trustworthy derivatives.

``AnalyticField`` superposes plane waves ``w exp(-i k.x)`` and returns exact
derivatives; ``GridField`` holds sampled values and differentiates them with
central stencils; :class:`Dirac1p1Stepper` evolves the 1+1 Dirac equation
with the (unitary) implicit midpoint rule.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .clifford import CliffordBasis, ConfigurationError
from .connections import FieldSample

ON_SHELL_TOL = 1e-12


class OffShellError(ValueError):
    pass


@dataclass(frozen=True)
class PlaneWaveSpec:
    """Kinetic momentum ``p_mu`` (covector, ``p.p = m^2``) of one mode.

    ``p_0 > 0`` selects the particle branch, ``p_0 < 0`` the antiparticle
    branch.  ``spin_axis`` (1+3 only) orients the rest-frame spin.
    """

    mass: float
    momentum: tuple[float, ...]
    amplitude: complex = 1.0
    spin_axis: tuple[float, float, float] | None = None

    @classmethod
    def from_spatial(cls, mass, p_spatial, branch: int = 1, amplitude=1.0, spin_axis=None):
        """Build from contravariant spatial momentum; ``branch`` is +1 or -1."""
        p = np.atleast_1d(np.asarray(p_spatial, dtype=float))
        energy = np.sqrt(mass ** 2 + p @ p)
        cov = (branch * energy,) + tuple(-p)
        return cls(float(mass), cov, amplitude, spin_axis)

    @property
    def branch(self) -> int:
        return 1 if self.momentum[0] >= 0 else -1


def _rest_spinor(basis: CliffordBasis, branch: int, spin_axis=None) -> np.ndarray:
    if basis.dim == 4:
        if spin_axis is None:
            xi = np.array([1.0, 0.0], dtype=complex)
        else:
            n = np.asarray(spin_axis, dtype=float)
            n = n / np.linalg.norm(n)
            theta, phi = np.arccos(np.clip(n[2], -1, 1)), np.arctan2(n[1], n[0])
            xi = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
        return np.concatenate([xi, branch * xi])
    if basis.dim == 2:
        return np.array([1.0, branch], dtype=complex)
    return np.array([1.0, 0.0], dtype=complex) if branch > 0 else np.array([0.0, 1.0], dtype=complex)


def plane_wave_amplitude(spec: PlaneWaveSpec, basis: CliffordBasis) -> np.ndarray:
    """Spinor ``w`` with ``(gamma^mu p_mu - m) w = 0``, built by projection."""
    p = np.asarray(spec.momentum, dtype=float)
    if p.shape != (basis.dim,):
        raise ConfigurationError(f"momentum must have {basis.dim} components")
    m = spec.mass
    shell = p @ basis.metric @ p - m ** 2
    if abs(shell) > ON_SHELL_TOL * max(1.0, p @ p):
        raise OffShellError(f"momentum is off shell by {shell:.3e}")
    slash = np.einsum("m,mij->ij", p, basis.gammas)
    proj = slash + m * np.eye(basis.spinor_size)
    chi = _rest_spinor(basis, spec.branch, spec.spin_axis)
    w = proj @ chi
    if np.linalg.norm(w) < 1e-8 * max(1.0, abs(p[0])):
        # massless mode annihilating the rest spinor; try the other chirality
        alt = basis.parity @ chi if basis.parity is not None else chi[::-1]
        w = proj @ alt
    w = w / np.linalg.norm(w) * np.linalg.norm(chi) * spec.amplitude
    resid = np.linalg.norm((slash - m * np.eye(basis.spinor_size)) @ w)
    if resid > ON_SHELL_TOL * max(1.0, np.linalg.norm(w) * (abs(m) + np.abs(p).max())):
        raise OffShellError(f"plane-wave amplitude violates the Dirac equation by {resid:.3e}")
    return w


@dataclass(frozen=True)
class AnalyticField:
    """Superposition of plane waves in a constant (pure gauge) potential.

    Each mode is ``w exp(-i k.x)`` with canonical ``k = p + q A0``.
    """

    basis: CliffordBasis
    wavevectors: np.ndarray      # (modes, dim) canonical k_mu
    amplitudes: np.ndarray       # (modes, spinor)
    masses: tuple[float, ...]
    A0: np.ndarray = field(default=None)
    q: float = 0.0

    def __post_init__(self):
        if self.A0 is None:
            object.__setattr__(self, "A0", np.zeros(self.basis.dim))

    @property
    def mass(self) -> float | None:
        ms = set(self.masses)
        return ms.pop() if len(ms) == 1 else None

    def evaluate(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(psi, d_mu psi, d_rho d_mu psi)`` at the spacetime point ``x``."""
        x = np.asarray(x, dtype=float)
        k = self.wavevectors
        phase = np.exp(-1j * (k @ x))                         # (modes,)
        terms = self.amplitudes * phase[:, None]              # (modes, s)
        psi = terms.sum(axis=0)
        dpsi = np.einsum("am,as->ms", -1j * k, terms)
        ddpsi = -np.einsum("ar,am,as->rms", k, k, terms)
        return psi, dpsi, ddpsi

    def sample(self, x) -> FieldSample:
        psi, dpsi, ddpsi = self.evaluate(x)
        return FieldSample(psi, dpsi, self.A0, self.q, np.asarray(x, dtype=float), ddpsi, np.zeros((len(x), len(x))))

    def dirac_residual(self, x, m: float | None = None) -> float:
        """``|i gamma^mu D_mu psi - m psi|`` with ``D = d + i q A0``."""
        m = self.mass if m is None else m
        if m is None:
            raise ValueError("modes have different masses; pass m explicitly")
        psi, dpsi, _ = self.evaluate(x)
        D = dpsi + 1j * self.q * np.outer(self.A0, psi)
        return float(np.linalg.norm(1j * np.einsum("mij,mj->i", self.basis.gammas, D) - m * psi))


def plane_wave(spec: PlaneWaveSpec, basis: CliffordBasis, A0=None, q: float = 0.0) -> AnalyticField:
    w = plane_wave_amplitude(spec, basis)
    A0 = np.zeros(basis.dim) if A0 is None else np.asarray(A0, dtype=float)
    k = np.asarray(spec.momentum, dtype=float) + q * A0
    return AnalyticField(basis, k[None, :], w[None, :], (spec.mass,), A0, q)


def superpose(*fields: AnalyticField) -> AnalyticField:
    if not fields:
        raise ValueError("superpose needs at least one field")
    first = fields[0]
    for f in fields[1:]:
        if f.basis.dim != first.basis.dim:
            raise ConfigurationError("cannot superpose fields of different dimension")
        if f.q != first.q or not np.allclose(f.A0, first.A0):
            raise ConfigurationError("cannot superpose fields in different gauge backgrounds")
    return AnalyticField(
        first.basis,
        np.concatenate([f.wavevectors for f in fields]),
        np.concatenate([f.amplitudes for f in fields]),
        sum((f.masses for f in fields), ()),
        first.A0,
        first.q,
    )


# --------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class GridField:
    """Values on a regular lattice: ``values[i0, i1, ..., component]``."""

    origin: np.ndarray
    spacing: np.ndarray
    values: np.ndarray
    order: int = 2

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape[: len(self.spacing)]

    def coordinates(self, index) -> np.ndarray:
        return np.asarray(self.origin) + np.asarray(index) * np.asarray(self.spacing)

    @classmethod
    def sample(cls, func, origin, spacing, shape, order: int = 2) -> "GridField":
        """Evaluate ``func(x)`` (returning a 1-D array) at every lattice node."""
        origin = np.asarray(origin, dtype=float)
        spacing = np.asarray(spacing, dtype=float)
        first = np.asarray(func(origin))
        vals = np.empty(tuple(shape) + first.shape, dtype=first.dtype)
        for idx in np.ndindex(*shape):
            vals[idx] = func(origin + np.asarray(idx) * spacing)
        return cls(origin, spacing, vals, order)


FIELD_FORMAT = "polardirac-field/1"
BASIS_TAGS = {2: "dirac-1p1", 3: "dirac-1p2", 4: "weyl-1p3"}


def field_to_text(g: GridField, tag: str) -> str:
    """Serialise a lattice: header records, then one row per node with the
    coordinates followed by interleaved real and imaginary components."""
    nd = len(g.spacing)
    comps = g.values.reshape(g.shape + (-1,))
    ncomp = comps.shape[-1]
    lines = [
        f"# format,{FIELD_FORMAT}",
        f"# basis,{tag}",
        f"# dim,{nd}",
        "# origin," + ",".join(repr(float(v)) for v in g.origin),
        "# spacing," + ",".join(repr(float(v)) for v in g.spacing),
        "# shape," + ",".join(str(n) for n in g.shape),
        f"# order,{g.order}",
        ",".join([f"x{k}" for k in range(nd)] + [f"{part}{c}" for c in range(ncomp) for part in ("re", "im")]),
    ]
    for idx in np.ndindex(*g.shape):
        v = comps[idx]
        inter = np.column_stack([v.real, v.imag]).ravel()
        lines.append(",".join(f"{c:.17g}" for c in np.concatenate([g.coordinates(idx), inter])))
    return "\n".join(lines) + "\n"


def field_from_text(text: str) -> tuple[GridField, str]:
    """Inverse of :func:`field_to_text`; returns the lattice and its basis tag."""
    header, rows = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(",")
            header[key] = value
        elif line.strip() and not line.startswith("x0"):
            rows.append(line)
    if header.get("format") != FIELD_FORMAT:
        raise ConfigurationError(f"not a {FIELD_FORMAT} file")
    try:
        nd = int(header["dim"])
        origin = np.array([float(v) for v in header["origin"].split(",")])
        spacing = np.array([float(v) for v in header["spacing"].split(",")])
        shape = tuple(int(v) for v in header["shape"].split(","))
        order = int(header.get("order", 2))
        data = np.array([[float(c) for c in r.split(",")] for r in rows])
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"malformed field file header or row: {exc}") from exc
    if len(origin) != nd or len(spacing) != nd or len(shape) != nd or data.shape[0] != int(np.prod(shape)):
        raise ConfigurationError("field file header does not match its rows")
    inter = data[:, nd:]
    values = (inter[:, 0::2] + 1j * inter[:, 1::2]).reshape(shape + (-1,))
    return GridField(origin, spacing, values, order), header.get("basis", "")


@dataclass(frozen=True)
class LatticeField:
    """Spinor samples on a spacetime lattice with finite-difference derivatives.

    Only lattice nodes can be sampled; ``nodes`` lists the interior ones.
    """

    grid: GridField
    basis: CliffordBasis
    A0: np.ndarray | None = None
    q: float = 0.0
    mass: float | None = None

    def __post_init__(self):
        if len(self.grid.spacing) != self.basis.dim or self.grid.values.shape[-1] != self.basis.spinor_size:
            raise ConfigurationError("lattice does not match the basis dimension")
        object.__setattr__(self, "_derivs", finite_difference_derivatives(self.grid))

    def nodes(self) -> np.ndarray:
        inner = [range(1, n - 1) for n in self.grid.shape]
        return np.array([self.grid.coordinates(idx) for idx in itertools.product(*inner)])

    def sample(self, x) -> FieldSample:
        x = np.asarray(x, dtype=float)
        rel = (x - self.grid.origin) / self.grid.spacing
        idx = np.rint(rel).astype(int)
        if np.abs(rel - idx).max() > 1e-6 or np.any(idx < 0) or np.any(idx >= self.grid.shape):
            raise ConfigurationError("lattice fields can only be sampled at their nodes")
        idx = tuple(idx)
        A = np.zeros(self.basis.dim) if self.A0 is None else np.asarray(self.A0, dtype=float)
        return FieldSample(self.grid.values[idx], self._derivs[idx], A, self.q, x)


_FD4_LEFT = (
    np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0,
    np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0,
)


def _diff_axis(values: np.ndarray, h: float, axis: int, order: int) -> np.ndarray:
    n = values.shape[axis]
    if order == 2:
        if n < 3:
            raise ConfigurationError("order-2 differences need at least 3 nodes per axis")
        return np.gradient(values, h, axis=axis, edge_order=2)
    if n < 5:
        raise ConfigurationError("order-4 differences need at least 5 nodes per axis")
    v = np.moveaxis(values, axis, 0)
    out = np.empty_like(v)
    out[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / 12.0
    for i, coeff in enumerate(_FD4_LEFT):
        out[i] = np.tensordot(coeff, v[:5], axes=(0, 0))
        out[n - 1 - i] = -np.tensordot(coeff, v[::-1][:5], axes=(0, 0))
    return np.moveaxis(out / h, 0, axis)


def finite_difference_derivatives(g: GridField, order: int | None = None) -> np.ndarray:
    """Central differences (one-sided at the boundary) along every lattice axis.

    Returns an array of shape ``shape + (ndim,) + component_shape``.
    """
    order = g.order if order is None else order
    if order not in (2, 4):
        raise ConfigurationError("finite-difference order must be 2 or 4")
    nd = len(g.spacing)
    derivs = [_diff_axis(g.values, float(g.spacing[a]), a, order) for a in range(nd)]
    return np.stack(derivs, axis=nd)


# --------------------------------------------------------------------------
# 1+1 time stepping


@dataclass(frozen=True)
class Dirac1p1State:
    """Two-component spinor on a periodic lattice at time ``t``."""

    x: np.ndarray
    psi: np.ndarray        # (N, 2)
    t: float
    mass: float
    q: float = 0.0

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def total_norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.dx)


class Dirac1p1Stepper:
    """Implicit-midpoint integrator for ``i d_t psi = H psi`` in 1+1.

    ``H = q A_0 - i alpha (d_x + i q A_1) + m gamma^0`` with
    ``alpha = gamma^0 gamma^1`` and periodic central differences (order 2
    or 4).  The Cayley form of the step is exactly unitary.
    """

    def __init__(self, basis: CliffordBasis, x, mass: float, dt: float, A=None, q: float = 0.0, order: int = 2):
        if basis.dim != 2:
            raise ConfigurationError("the 1+1 stepper needs a 2-dimensional basis")
        self.basis = basis
        self.x = np.asarray(x, dtype=float)
        self.mass, self.dt, self.q = float(mass), float(dt), float(q)
        n = self.x.size
        dx = float(self.x[1] - self.x[0])
        if order == 2:
            offs, coeff = [1, -1], [0.5, -0.5]
        elif order == 4:
            offs, coeff = [1, -1, 2, -2], [2 / 3, -2 / 3, -1 / 12, 1 / 12]
        else:
            raise ConfigurationError("stencil order must be 2 or 4")
        D = sp.csr_matrix((n, n), dtype=complex)
        for o, c in zip(offs, coeff):
            D = D + c / dx * sp.diags(np.ones(n), o, shape=(n, n)) + c / dx * sp.diags(
                np.ones(abs(o)), -np.sign(o) * (n - abs(o)), shape=(n, n)
            )
        if A is None:
            A = np.zeros((n, 2))
        A = np.broadcast_to(np.asarray(A, dtype=float), (n, 2))
        alpha = basis.gammas[0] @ basis.gammas[1]
        g0 = basis.gammas[0]
        ident = sp.identity(n, format="csr")
        H = (
            sp.kron(sp.diags(q * A[:, 0]), np.eye(2))
            + sp.kron(-1j * D, alpha)
            + sp.kron(sp.diags(q * A[:, 1]), alpha)
            + mass * sp.kron(ident, g0)
        )
        self.hamiltonian = H.tocsc()
        eye = sp.identity(2 * n, format="csc", dtype=complex)
        self._lhs = splu((eye + 0.5j * dt * self.hamiltonian).tocsc())
        self._rhs = (eye - 0.5j * dt * self.hamiltonian).tocsr()

    def step(self, state: Dirac1p1State) -> Dirac1p1State:
        vec = state.psi.reshape(-1)
        new = self._lhs.solve(self._rhs @ vec)
        if not np.all(np.isfinite(new)):
            raise FloatingPointError("implicit midpoint solve failed")
        return Dirac1p1State(state.x, new.reshape(-1, 2), state.t + self.dt, state.mass, state.q)


def dirac_step_1p1(state: Dirac1p1State, dt: float, A=None, basis: CliffordBasis | None = None) -> Dirac1p1State:
    """One implicit-midpoint step; builds a fresh stepper (use the class for loops)."""
    from .clifford import build_basis

    basis = build_basis(2) if basis is None else basis
    return Dirac1p1Stepper(basis, state.x, state.mass, dt, A, state.q).step(state)


def gaussian_packet_1p1(basis: CliffordBasis, x, mass: float, k0: float, x0: float, width: float) -> np.ndarray:
    """Positive-energy Gaussian packet: each Fourier mode gets its own spinor."""
    x = np.asarray(x, dtype=float)
    n = x.size
    dx = x[1] - x[0]
    envelope = np.exp(-((x - x0) ** 2) / (4 * width ** 2))
    spectrum = np.fft.fft(envelope * np.exp(1j * k0 * (x - x0)))
    ks = 2 * np.pi * np.fft.fftfreq(n, d=dx)
    out = np.zeros((n, 2), dtype=complex)
    for idx, kk in enumerate(ks):
        if abs(spectrum[idx]) < 1e-14 * np.abs(spectrum).max():
            continue
        w = plane_wave_amplitude(PlaneWaveSpec.from_spatial(mass, [kk]), basis)
        out += np.outer(np.exp(1j * kk * (x - x[0])), w) * spectrum[idx] / n
    return out


def sample_points(rng: np.random.Generator, n: int, dim: int, scale: float = 2.0) -> np.ndarray:
    return rng.uniform(-scale, scale, size=(n, dim))


def field_from_specs(specs: Sequence[PlaneWaveSpec], basis: CliffordBasis, A0=None, q: float = 0.0) -> AnalyticField:
    return superpose(*(plane_wave(s, basis, A0, q) for s in specs))


# --------------------------------------------------------------------------
# exact solutions in a uniform magnetic field


@dataclass(frozen=True)
class LandauField:
    """Superposition of lowest-Landau-level modes in 1+3.

    The background is ``A_mu = (0, 0, -B x, 0)`` (magnetic field ``B`` along
    ``z``).  Each mode is ``w exp(-i(k0 t + k2 y + k3 z)) exp(-|qB| xi^2 / 2)``
    with ``xi = x + k2/(qB)`` and ``k0^2 - k3^2 = m^2``; every mode is an
    exact solution, so sums of them are as well.
    """

    basis: CliffordBasis
    B: float
    q: float
    mass: float
    wavevectors: np.ndarray   # (modes, 4): (k0, 0, k2, k3)
    amplitudes: np.ndarray    # (modes, 4)

    @property
    def A0(self) -> np.ndarray:
        return np.zeros(4)

    @property
    def gradient(self) -> np.ndarray:
        """Constant ``dA[rho, mu] = d_rho A_mu``."""
        g = np.zeros((4, 4))
        g[1, 2] = -self.B
        return g

    def potential(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.gradient

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        qB = self.q * self.B
        k = self.wavevectors
        xi = x[1] + k[:, 2] / qB
        phase = np.exp(-1j * (k[:, 0] * x[0] + k[:, 2] * x[2] + k[:, 3] * x[3]) - 0.5 * abs(qB) * xi ** 2)
        terms = self.amplitudes * phase[:, None]
        g = np.stack([-1j * k[:, 0], -abs(qB) * xi + 0j, -1j * k[:, 2], -1j * k[:, 3]], axis=1)  # (modes, 4)
        psi = terms.sum(axis=0)
        dpsi = np.einsum("am,as->ms", g, terms)
        gg = np.einsum("ar,am->arm", g, g)
        gg[:, 1, 1] -= abs(qB)
        ddpsi = np.einsum("arm,as->rms", gg, terms)
        return psi, dpsi, ddpsi

    def sample(self, x) -> FieldSample:
        psi, dpsi, ddpsi = self.evaluate(x)
        x = np.asarray(x, dtype=float)
        return FieldSample(psi, dpsi, self.potential(x), self.q, x, ddpsi, self.gradient)

    def dirac_residual(self, x, m: float | None = None) -> float:
        m = self.mass if m is None else m
        psi, dpsi, _ = self.evaluate(x)
        D = dpsi + 1j * self.q * np.outer(self.potential(x), psi)
        return float(np.linalg.norm(1j * np.einsum("mij,mj->i", self.basis.gammas, D) - m * psi))


def landau_field(basis: CliffordBasis, B: float, q: float, mass: float, modes) -> LandauField:
    """``modes`` is a sequence of ``(k2, k3, branch, amplitude)`` tuples."""
    if basis.dim != 4:
        raise ConfigurationError("Landau modes are built in 1+3 only")
    qB = q * B
    if qB == 0:
        raise ConfigurationError("Landau modes need a non-zero q B")
    g = basis.gammas
    nil = g[2] - 1j * np.sign(qB) * g[1]
    ks, ws = [], []
    for k2, k3, branch, amp in modes:
        k0 = branch * np.sqrt(mass ** 2 + k3 ** 2)
        op = np.vstack([nil, k0 * g[0] + k3 * g[3] - mass * np.eye(4)])
        _, sv, vt = np.linalg.svd(op)
        if sv[-1] > 1e-10 * max(1.0, sv[0]) or sv[-2] < 1e-8 * max(1.0, sv[0]):
            raise OffShellError("no unique lowest-Landau-level spinor for this mode")
        w = np.conj(vt[-1])
        w = w / np.linalg.norm(w) * np.sqrt(2) * amp
        ks.append([k0, 0.0, k2, k3])
        ws.append(w)
    return LandauField(basis, float(B), float(q), float(mass), np.array(ks), np.array(ws))
