"""Non-relativistic reference: Schrödinger evolution and its polar form.

``i d_t psi = -lap(psi) / (2m) + V psi`` on a 1-D or 2-D lattice with
Dirichlet walls, advanced by Crank-Nicolson steps.  With ``psi = phi e^{iS}``
the equation splits into continuity for ``phi^2`` and a Hamilton-Jacobi
equation with ``H = -d_t S``, ``P = grad S`` and the quantum potential
``Q = -lap(phi) / (2 m phi)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .clifford import ConfigurationError
from .report import ResidualReport

NODE_THRESHOLD = 1e-8


@dataclass(frozen=True)
class WaveFunction:
    """Complex scalar on a rectangular lattice.

    ``axes`` holds one uniformly spaced coordinate array per spatial
    dimension; ``values`` has the matching shape.  ``V`` is ``None`` or a real
    array of the same shape.
    """

    axes: tuple[np.ndarray, ...]
    values: np.ndarray
    m: float
    dt: float
    t: float = 0.0
    V: np.ndarray | None = None

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        if len(axes) not in (1, 2):
            raise ConfigurationError("wave functions live on 1-D or 2-D lattices")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != tuple(a.size for a in axes):
            raise ConfigurationError("values do not match the lattice shape")
        if not np.all(np.isfinite(vals)):
            raise ConfigurationError("wave function has non-finite values")
        if self.m <= 0 or self.dt <= 0:
            raise ConfigurationError("mass and time step must be positive")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", vals)
        if self.V is not None:
            V = np.broadcast_to(np.asarray(self.V, dtype=float), vals.shape)
            object.__setattr__(self, "V", V)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(float(a[1] - a[0]) for a in self.axes)

    @property
    def cell(self) -> float:
        return float(np.prod(self.spacing))

    def norm(self) -> float:
        """``sum |psi|^2 h^d``."""
        return float(np.sum(np.abs(self.values) ** 2) * self.cell)

    def with_values(self, values, t: float) -> "WaveFunction":
        return replace(self, values=values, t=t)


def _laplacian_1d(n: int, h: float) -> sparse.csc_matrix:
    return sparse.diags([np.ones(n - 1), -2 * np.ones(n), np.ones(n - 1)], [-1, 0, 1], format="csc") / h ** 2


def hamiltonian(w: WaveFunction) -> sparse.csc_matrix:
    """Second-order finite-difference ``-lap / (2m) + V`` (Dirichlet walls)."""
    ns = [a.size for a in w.axes]
    hs = w.spacing
    if len(ns) == 1:
        lap = _laplacian_1d(ns[0], hs[0])
    else:
        lap = sparse.kron(_laplacian_1d(ns[0], hs[0]), sparse.identity(ns[1])) + sparse.kron(
            sparse.identity(ns[0]), _laplacian_1d(ns[1], hs[1])
        )
    H = -lap / (2 * w.m)
    if w.V is not None:
        H = H + sparse.diags(w.V.ravel())
    return sparse.csc_matrix(H)


@dataclass
class CrankNicolson:
    """Factorised ``(1 + i dt H / 2)^{-1} (1 - i dt H / 2)`` for one lattice."""

    w: WaveFunction
    _lu: object = field(init=False, repr=False)
    _rhs: sparse.csc_matrix = field(init=False, repr=False)

    def __post_init__(self):
        H = hamiltonian(self.w)
        eye = sparse.identity(H.shape[0], format="csc")
        half = 0.5j * self.w.dt * H
        self._lu = splu(sparse.csc_matrix(eye + half))
        self._rhs = sparse.csc_matrix(eye - half)

    def step(self, w: WaveFunction) -> WaveFunction:
        new = self._lu.solve(self._rhs @ w.values.ravel())
        if not np.all(np.isfinite(new)):
            raise FloatingPointError("Crank-Nicolson solve produced non-finite values")
        return w.with_values(new.reshape(w.values.shape), w.t + w.dt)


def evolve_step(w: WaveFunction, solver: CrankNicolson | None = None) -> WaveFunction:
    """One unitary Crank-Nicolson step; pass ``solver`` to reuse the factorisation."""
    solver = CrankNicolson(w) if solver is None else solver
    return solver.step(w)


def evolve(w: WaveFunction, steps: int) -> list[WaveFunction]:
    """``steps`` successive states, the initial one included."""
    solver = CrankNicolson(w)
    out = [w]
    for _ in range(steps):
        out.append(solver.step(out[-1]))
    return out


# --------------------------------------------------------------------------
# oracles


def gaussian_packet(x, x0: float, sigma: float, k: float = 0.0) -> np.ndarray:
    """Normalised ``psi`` with ``|psi|^2`` of standard deviation ``sigma``."""
    x = np.asarray(x, dtype=float)
    return (2 * np.pi * sigma ** 2) ** -0.25 * np.exp(-((x - x0) ** 2) / (4 * sigma ** 2) + 1j * k * x)


def free_width(sigma0: float, m: float, t: float) -> float:
    """Standard deviation of a free Gaussian, ``sigma0 sqrt(1 + (t / (2 m sigma0^2))^2)``."""
    return sigma0 * np.sqrt(1 + (t / (2 * m * sigma0 ** 2)) ** 2)


def packet_width(w: WaveFunction) -> float:
    """Position standard deviation of a 1-D state."""
    x = w.axes[0]
    rho = np.abs(w.values) ** 2
    rho = rho / rho.sum()
    mean = rho @ x
    return float(np.sqrt(rho @ (x - mean) ** 2))


# --------------------------------------------------------------------------
# polar form


@dataclass(frozen=True)
class SchrodingerPolar:
    """``phi = |psi|``, unwrapped phase ``S`` and quantum potential ``Q``.

    ``mask`` marks nodes with ``phi < threshold * max(phi)``; there ``S`` and
    ``Q`` are NaN.  ``Q`` is also NaN on the boundary layer of the lattice.
    """

    phi: np.ndarray
    S: np.ndarray
    Q: np.ndarray
    mask: np.ndarray


def _second_difference(f: np.ndarray, h: float, axis: int) -> np.ndarray:
    out = np.full(f.shape, np.nan)
    sl = [slice(None)] * f.ndim
    core = list(sl)
    core[axis] = slice(1, -1)
    lo, hi = list(sl), list(sl)
    lo[axis] = slice(None, -2)
    hi[axis] = slice(2, None)
    out[tuple(core)] = (f[tuple(lo)] - 2 * f[tuple(core)] + f[tuple(hi)]) / h ** 2
    return out


def laplacian(f: np.ndarray, spacing) -> np.ndarray:
    """Three-point Laplacian, NaN on the boundary layer."""
    return sum(_second_difference(f, h, a) for a, h in enumerate(spacing))


def _unwrap_masked(phase: np.ndarray, keep: np.ndarray, axis: int) -> np.ndarray:
    out = np.full(phase.shape, np.nan)
    moved_p = np.moveaxis(phase, axis, -1)
    moved_k = np.moveaxis(keep, axis, -1)
    moved_o = np.moveaxis(out, axis, -1)
    for idx in np.ndindex(*moved_p.shape[:-1]):
        k = moved_k[idx]
        if k.any():
            line = moved_o[idx]
            line[k] = np.unwrap(moved_p[idx][k])
    return out


def polar_split(w: WaveFunction, threshold: float = NODE_THRESHOLD) -> SchrodingerPolar:
    """Split into ``phi e^{iS}``; the phase is unwrapped along each lattice
    row starting at its first node above the threshold (then along the
    first column in 2-D)."""
    phi = np.abs(w.values)
    mask = phi < threshold * phi.max() if phi.max() > 0 else np.ones(phi.shape, bool)
    keep = ~mask
    phase = np.angle(w.values)
    if phi.ndim == 1:
        S = _unwrap_masked(phase, keep, 0)
    else:
        S = _unwrap_masked(phase, keep, 1)
        # align rows with the unwrapped first kept column
        col = np.argmax(keep, axis=1)
        rows = np.nonzero(keep.any(axis=1))[0]
        ref = S[rows, col[rows]]
        shift = np.unwrap(ref) - ref
        S[rows] += shift[:, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        Q = -laplacian(phi, w.spacing) / (2 * w.m * phi)
    Q[mask] = np.nan
    return SchrodingerPolar(phi, S, Q, mask)


def _grad_phase(psi: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Central-difference ``d S`` from ``arg(psi_{+} conj(psi_{-})) / (2h)``."""
    out = np.full(psi.shape, np.nan)
    n = psi.shape[axis]
    core = [slice(None)] * psi.ndim
    lo, hi = list(core), list(core)
    core[axis], lo[axis], hi[axis] = slice(1, n - 1), slice(0, n - 2), slice(2, n)
    out[tuple(core)] = np.angle(psi[tuple(hi)] * np.conj(psi[tuple(lo)])) / (2 * h)
    return out


def _grad(f: np.ndarray, h: float, axis: int) -> np.ndarray:
    out = np.full(f.shape, np.nan)
    n = f.shape[axis]
    core = [slice(None)] * f.ndim
    lo, hi = list(core), list(core)
    core[axis], lo[axis], hi[axis] = slice(1, n - 1), slice(0, n - 2), slice(2, n)
    out[tuple(core)] = (f[tuple(hi)] - f[tuple(lo)]) / (2 * h)
    return out


@dataclass(frozen=True)
class NonRelFields:
    """Polar fields at the middle of three time slices, on the lattice."""

    phi2: np.ndarray
    H: np.ndarray               # -d_t S
    P: tuple[np.ndarray, ...]   # grad S
    Q: np.ndarray
    V: np.ndarray
    region: np.ndarray


def nonrel_fields(slices, region: float = 1e-3) -> NonRelFields:
    """Centered differences over ``(previous, current, next)`` states.

    ``region`` restricts diagnostics to nodes with
    ``phi > region * max(phi)`` where the polar fields are well conditioned.
    """
    if len(slices) != 3:
        raise ConfigurationError("three consecutive time slices are required")
    prev, cur, nxt = slices
    dt = nxt.t - cur.t
    if not np.isclose(cur.t - prev.t, dt) or dt <= 0:
        raise ConfigurationError("time slices must be equally spaced and increasing")
    pol = polar_split(cur)
    H = -np.angle(nxt.values * np.conj(prev.values)) / (2 * dt)
    P = tuple(_grad_phase(cur.values, h, a) for a, h in enumerate(cur.spacing))
    V = np.zeros(cur.values.shape) if cur.V is None else cur.V
    keep = (pol.phi > region * pol.phi.max()) & np.isfinite(pol.Q)
    return NonRelFields(pol.phi ** 2, H, P, pol.Q, V, keep)


def madelung_residuals_nr(slices, region: float = 1e-3) -> ResidualReport:
    """Continuity, Hamilton-Jacobi and Newton residuals at the middle slice,
    each the largest absolute value over the well-conditioned nodes.

    * ``contpolar``: ``m d_t phi^2 + div(phi^2 P)``
    * ``enerpolar``: ``H - P.P/(2m) - V - Q``
    * ``newton``: ``grad(P.P/(2m) + V + Q) - grad H``, the gradient of the
      Hamilton-Jacobi equation written as ``d_t P + grad(P.P/(2m) + V + Q)``.
    """
    prev, cur, nxt = slices
    f = nonrel_fields(slices, region)
    m = cur.m
    dt = nxt.t - cur.t
    hs = cur.spacing
    cont = m * (np.abs(nxt.values) ** 2 - np.abs(prev.values) ** 2) / (2 * dt)
    cont = cont + sum(_grad(f.phi2 * f.P[a], h, a) for a, h in enumerate(hs))
    energy = sum(p ** 2 for p in f.P) / (2 * m) + f.V + f.Q
    hj = f.H - energy
    newton = [_grad(energy, h, a) - _grad(f.H, h, a) for a, h in enumerate(hs)]
    keep = f.region & np.isfinite(cont) & np.isfinite(hj)
    for n in newton:
        keep &= np.isfinite(n)
    comps = {
        "contpolar": cont[keep],
        "enerpolar": hj[keep],
        "newton": np.concatenate([n[keep] for n in newton]),
    }
    # sup norm over the lattice, independent of the node count
    res = {k: float(np.abs(v).max()) if v.size else 0.0 for k, v in comps.items()}
    return ResidualReport(f"schrodinger-madelung-{len(hs)}", res, {"t": cur.t, "nodes": int(keep.sum())})
