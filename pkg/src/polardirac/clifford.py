"""Clifford algebra data for 1+1, 1+2 and 1+3 dimensional spacetimes.

Index conventions
-----------------
* The metric is ``diag(+1, -1, ..., -1)``.
* The Levi-Civita symbol is normalised with all indices *down*:
  ``eps[0, 1, ..., n-1] = +1``.  The upper-index symbol is obtained by raising
  with the metric, so ``eps^{01} = -1`` in 1+1, ``eps^{012} = +1`` in 1+2 and
  ``eps^{0123} = -1`` in 1+3.
* ``gammas[a]`` is the upper-index matrix ``gamma^a``;
  ``sigmas[a, b] = [gamma^a, gamma^b] / 4``.
* ``parity`` is the parity-odd matrix fixed by the duality identities
  ``2 sigma_{ab} = eps_{ab} parity`` (1+1) and
  ``2i sigma_{ab} = eps_{abcd} parity sigma^{cd}`` (1+3).

Representations: 1+1 uses ``gamma^0 = sx, gamma^1 = i sy``; 1+2 uses
``gamma^0 = sz, gamma^1 = i sx, gamma^2 = -i sy`` (the sign of the last one
selects the inequivalent representation with ``2 sigma^{ab} = i eps^{abc}
gamma_c``); 1+3 uses the chiral representation with
``parity = diag(-1, -1, 1, 1)``.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .report import ResidualReport

SUPPORTED_DIMS = (2, 3, 4)

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)


class ConfigurationError(ValueError):
    """Raised for unsupported dimensions, signatures or malformed inputs."""


@dataclass(frozen=True)
class DimensionConfig:
    dim: int
    signature: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.dim not in SUPPORTED_DIMS:
            raise ConfigurationError(f"unsupported spacetime dimension {self.dim!r}; expected one of {SUPPORTED_DIMS}")
        sig = self.signature
        if sig is None:
            object.__setattr__(self, "signature", (1,) + (-1,) * (self.dim - 1))
            return
        sig = tuple(int(v) for v in sig)
        if len(sig) != self.dim:
            raise ConfigurationError(f"signature {sig} has length {len(sig)}, expected {self.dim}")
        if sig != (1,) + (-1,) * (self.dim - 1):
            raise ConfigurationError(f"signature {sig} unsupported; only (+,-,...,-) is implemented")
        object.__setattr__(self, "signature", sig)


def levi_civita(n: int) -> np.ndarray:
    """Totally antisymmetric symbol of rank ``n`` with ``eps[0..n-1] = +1``."""
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


@dataclass(frozen=True, eq=False)
class CliffordBasis:
    """Gamma/sigma/parity matrices, metric and Levi-Civita symbols.

    Immutable after construction.  Spinor-space arrays are complex; tensors
    carry explicit index positions documented on each attribute.
    """

    dim: int
    metric: np.ndarray          # eta_{ab} (equal to its inverse)
    gammas: np.ndarray          # gamma^a, shape (dim, s, s)
    sigmas: np.ndarray          # sigma^{ab}, shape (dim, dim, s, s)
    parity: np.ndarray | None   # parity-odd matrix (dims 2 and 4)
    eps_lower: np.ndarray       # eps_{a...}
    eps_upper: np.ndarray       # eps^{a...}
    rest_spinor: np.ndarray     # spinor at rest, velocity (1,0,..), spin +z

    @property
    def spinor_size(self) -> int:
        return self.gammas.shape[1]

    @property
    def gammas_lower(self) -> np.ndarray:
        return np.einsum("ab,bij->aij", self.metric, self.gammas)

    @property
    def sigmas_lower(self) -> np.ndarray:
        return np.einsum("ac,bd,cdij->abij", self.metric, self.metric, self.sigmas)

    def raise_index(self, tensor, axes: Sequence[int] | int | None = None) -> np.ndarray:
        """Raise (or, identically, lower) the given axes with the metric."""
        t = np.asarray(tensor)
        if axes is None:
            axes = range(t.ndim)
        elif isinstance(axes, int):
            axes = (axes,)
        for ax in axes:
            t = np.moveaxis(np.tensordot(self.metric, t, axes=([1], [ax])), 0, ax)
        return t

    lower_index = raise_index

    def dot(self, a, b) -> float:
        """Minkowski inner product of two vectors with the same index position."""
        return float(np.asarray(a) @ self.metric @ np.asarray(b))

    def adjoint(self, psi: np.ndarray) -> np.ndarray:
        return np.conj(psi) @ self.gammas[0]


def _sigma_table(gammas: np.ndarray) -> np.ndarray:
    n = gammas.shape[0]
    return np.array([[(gammas[a] @ gammas[b] - gammas[b] @ gammas[a]) / 4 for b in range(n)] for a in range(n)])


def _gammas_for(dim: int) -> tuple[np.ndarray, np.ndarray]:
    if dim == 2:
        return np.array([_SX, 1j * _SY]), np.array([1, 1], dtype=complex)
    if dim == 3:
        return np.array([_SZ, 1j * _SX, -1j * _SY]), np.array([1, 0], dtype=complex)
    gam = [np.block([[_Z2, _I2], [_I2, _Z2]])] + [np.block([[_Z2, s], [-s, _Z2]]) for s in (_SX, _SY, _SZ)]
    return np.array(gam), np.array([1, 0, 1, 0], dtype=complex)


def build_basis(config: DimensionConfig | int) -> CliffordBasis:
    """Construct the fixed representation for a 1+1, 1+2 or 1+3 spacetime."""
    if not isinstance(config, DimensionConfig):
        config = DimensionConfig(int(config))
    dim = config.dim
    metric = np.diag(np.asarray(config.signature, dtype=float))
    gammas, rest = _gammas_for(dim)
    sigmas = _sigma_table(gammas)
    eps_lower = levi_civita(dim)
    eps_upper = eps_lower * np.linalg.det(metric)
    if dim == 2:
        # 2 sigma_{01} = eps_{01} parity  =>  parity = gamma_0 gamma_1
        parity = (metric[0, 0] * gammas[0]) @ (metric[1, 1] * gammas[1])
    elif dim == 4:
        parity = 1j * gammas[0] @ gammas[1] @ gammas[2] @ gammas[3]
    else:
        parity = None
    for arr in (metric, gammas, sigmas, eps_lower, eps_upper, rest) + ((parity,) if parity is not None else ()):
        arr.setflags(write=False)
    return CliffordBasis(dim, metric, gammas, sigmas, parity, eps_lower, eps_upper, rest)


@functools.lru_cache(maxsize=None)
def basis_for(dim: int) -> CliffordBasis:
    """Shared, cached basis for the default signature (bases are immutable)."""
    return build_basis(int(dim))


def _maxabs(x) -> float:
    return float(np.max(np.abs(x))) if np.size(x) else 0.0


def verify_algebra(basis: CliffordBasis) -> ResidualReport:
    """Maximum entrywise deviation of every algebraic invariant of ``basis``."""
    n, g, eta = basis.dim, basis.gammas, basis.metric
    ident = np.eye(basis.spinor_size)
    anti = max(_maxabs(g[a] @ g[b] + g[b] @ g[a] - 2 * eta[a, b] * ident) for a in range(n) for b in range(n))
    sig_def = _maxabs(basis.sigmas - _sigma_table(g))
    res = {"anticommutator": anti, "sigma_definition": sig_def}

    sig_up = basis.sigmas
    sig_lo = basis.sigmas_lower
    g_lo = basis.gammas_lower
    if n == 3:
        rhs = 1j * np.einsum("abc,cij->abij", basis.eps_upper, g_lo)
        res["duality"] = _maxabs(2 * sig_up - rhs)
    elif n == 2:
        rhs = np.einsum("ab,ij->abij", basis.eps_lower, basis.parity)
        res["duality"] = _maxabs(2 * sig_lo - rhs)
    else:
        rhs = np.einsum("abcd,ik,cdkj->abij", basis.eps_lower, basis.parity, sig_up)
        res["duality"] = _maxabs(2j * sig_lo - rhs)
    if basis.parity is not None:
        pi = basis.parity
        res["parity_square"] = _maxabs(pi @ pi - ident)
        res["parity_anticommutes"] = max(_maxabs(pi @ g[a] + g[a] @ pi) for a in range(n))
    return ResidualReport(f"clifford-{n}", res)


def hodge_sign(dim: int, rank: int) -> int:
    """Sign ``s`` in ``hodge_dual(hodge_dual(T)) = s * T`` for the Lorentzian metric.

    ============  ======  ======  ======  ======  ======
    dim \\ rank    0       1       2       3       4
    ============  ======  ======  ======  ======  ======
    2             -1      +1      -1
    3             +1      +1      +1      +1
    4             -1      +1      -1      +1      -1
    ============  ======  ======  ======  ======  ======
    """
    det_sign = -1 if (dim - 1) % 2 else 1
    return det_sign * (-1) ** (rank * (dim - rank))


def is_antisymmetric(tensor: np.ndarray, atol: float = 1e-12) -> bool:
    t = np.asarray(tensor)
    scale = max(1.0, _maxabs(t))
    for i in range(t.ndim - 1):
        if _maxabs(t + np.swapaxes(t, i, i + 1)) > atol * scale:
            return False
    return True


def hodge_dual(tensor, basis: CliffordBasis) -> np.ndarray:
    """Hodge dual of a totally antisymmetric all-lower-index tensor.

    ``(*T)_{j_1..j_{n-k}} = (1/k!) eps_{j_1..j_{n-k} i_1..i_k} T^{i_1..i_k}``,
    contracting the *trailing* indices of the symbol.  With this choice the
    spin tensor built from an axial vector ``S`` is ``hodge_dual(S) / 4``.
    The double-dual sign is :func:`hodge_sign`.
    """
    t = np.asarray(tensor, dtype=float)
    n = basis.dim
    k = t.ndim
    if k > n or any(s != n for s in t.shape):
        raise ConfigurationError(f"tensor of shape {t.shape} is not a rank-k tensor in {n} dimensions")
    if not is_antisymmetric(t):
        raise ValueError("hodge_dual requires a totally antisymmetric tensor")
    t_up = basis.raise_index(t) if k else t
    axes = (list(range(n - k, n)), list(range(k)))
    return np.tensordot(basis.eps_lower, t_up, axes=axes) / math.factorial(k)


def epsilon_identity_check(dim: int) -> ResidualReport:
    """Exhaustive check of the epsilon contraction identities.

    1+2: ``eps^{ijk} eps_{abk} = d^i_a d^j_b - d^i_b d^j_a``;
    1+1: ``eps_{ak} eps^{ik} = -d^i_a`` and
    ``eps_{ab} eps^{ij} = -d^i_a d^j_b + d^i_b d^j_a``;
    1+3: ``eps^{ijkl} eps_{abkl} = -2 (d^i_a d^j_b - d^i_b d^j_a)``.
    """
    basis = build_basis(dim)
    lo, up = basis.eps_lower, basis.eps_upper
    n = dim
    d = np.eye(n)
    res: dict[str, float] = {}
    if n == 3:
        worst = 0.0
        for i, j, a, b in itertools.product(range(n), repeat=4):
            lhs = sum(up[i, j, k] * lo[a, b, k] for k in range(n))
            rhs = d[i, a] * d[j, b] - d[i, b] * d[j, a]
            worst = max(worst, abs(lhs - rhs))
        res["eps3_double"] = worst
    elif n == 2:
        worst = 0.0
        for a, i in itertools.product(range(n), repeat=2):
            lhs = sum(lo[a, k] * up[i, k] for k in range(n))
            worst = max(worst, abs(lhs + d[i, a]))
        res["eps2_single"] = worst
        worst = 0.0
        for a, b, i, j in itertools.product(range(n), repeat=4):
            lhs = lo[a, b] * up[i, j]
            rhs = -d[i, a] * d[j, b] + d[i, b] * d[j, a]
            worst = max(worst, abs(lhs - rhs))
        res["eps2_double"] = worst
    else:
        worst = 0.0
        for i, j, a, b in itertools.product(range(n), repeat=4):
            lhs = sum(up[i, j, k, l] * lo[a, b, k, l] for k in range(n) for l in range(n))
            rhs = -2 * (d[i, a] * d[j, b] - d[i, b] * d[j, a])
            worst = max(worst, abs(lhs - rhs))
        res["eps4_double"] = worst
    return ResidualReport(f"epsilon-{n}", res)
