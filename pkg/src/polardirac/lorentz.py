"""Lorentz transformations in vector and spinor representations.

Vectors are contravariant (upper index) unless stated.  A generator is
given as ``omega_{mu nu}`` (lower, antisymmetric); the vector transform is
``expm(omega^mu_nu)`` and the spinor transform ``expm(omega_{mu nu}
sigma^{mu nu} / 2)``, so that ``S^{-1} gamma^mu S = Lambda^mu_nu gamma^nu``.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .clifford import CliffordBasis


def boost_generator(rapidity, dim: int) -> np.ndarray:
    """``omega_{mu nu}`` for a boost with rapidity vector ``eta`` (spatial)."""
    rap = np.atleast_1d(np.asarray(rapidity, dtype=float))
    om = np.zeros((dim, dim))
    # omega^0_k = omega^k_0 = eta_k  =>  omega_{0k} = eta_k, omega_{k0} = -eta_k
    om[0, 1:] = rap
    om[1:, 0] = -rap
    return om


def rotation_generator(axis, angle: float) -> np.ndarray:
    """``omega_{mu nu}`` (1+3) for an active rotation by ``angle`` about ``axis``."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    om = np.zeros((4, 4))
    # omega^i_j = -angle eps_{ijk} n_k ; lowering a spatial index flips the sign
    for i, j, k in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        om[i, j] = angle * n[k - 1]
        om[j, i] = -angle * n[k - 1]
    return om


def vector_transform(omega: np.ndarray) -> np.ndarray:
    """``Lambda^mu_nu = expm(omega^mu_nu)``."""
    dim = omega.shape[0]
    eta = np.diag([1.0] + [-1.0] * (dim - 1))
    return expm(eta @ omega)


def spinor_transform(omega: np.ndarray, basis: CliffordBasis) -> np.ndarray:
    gen = 0.5 * np.einsum("mn,mnij->ij", omega, basis.sigmas)
    sq = gen @ gen
    c = sq[0, 0]
    # simple boosts and rotations square to a multiple of the identity
    if np.allclose(sq, c * np.eye(gen.shape[0]), rtol=0.0, atol=1e-14 * max(1.0, abs(c))):
        root = np.sqrt(complex(c))
        if abs(root) < 1e-8:
            return np.eye(gen.shape[0]) + gen + 0.5 * sq
        return np.cosh(root) * np.eye(gen.shape[0]) + (np.sinh(root) / root) * gen
    return expm(gen)


def boost_to(u) -> np.ndarray:
    """Generator of the pure boost taking ``(1, 0, ...)`` to the unit vector ``u``."""
    u = np.asarray(u, dtype=float)
    spatial = u[1:]
    norm = np.linalg.norm(spatial)
    if u[0] <= 0 or u[0] ** 2 - norm ** 2 <= 0:
        raise ValueError("u must be future-directed timelike")
    if norm == 0.0:
        return np.zeros((u.size, u.size))
    rapidity = np.arcsinh(norm / np.sqrt(u[0] ** 2 - norm ** 2))
    return boost_generator(rapidity * spatial / norm, u.size)


def pure_boost(u) -> np.ndarray:
    """Closed form of ``vector_transform(boost_to(u))`` for a unit timelike ``u``."""
    u = np.asarray(u, dtype=float)
    lam = np.eye(u.size)
    lam[0, :] = u
    lam[:, 0] = u
    lam[1:, 1:] += np.outer(u[1:], u[1:]) / (1.0 + u[0])
    return lam


def rotation_e3_to(direction) -> np.ndarray:
    """Generator of the rotation taking ``e_z`` to the spatial unit ``direction``."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    axis = np.cross([0.0, 0.0, 1.0], d)
    sin = np.linalg.norm(axis)
    cos = d[2]
    if sin < 1e-14:
        return np.zeros((4, 4)) if cos > 0 else rotation_generator([1.0, 0.0, 0.0], np.pi)
    return rotation_generator(axis / sin, np.arctan2(sin, cos))


def frame_generators(u, s=None) -> list[np.ndarray]:
    """Generators ``[boost, rotation]`` of ``Lambda = B(u) R`` with
    ``Lambda e_0 = u`` and (1+3 only) ``Lambda e_3 = s``."""
    u = np.asarray(u, dtype=float)
    boost = boost_to(u)
    if s is None or u.size != 4:
        return [boost]
    ubar = u.copy()
    ubar[1:] *= -1
    back = pure_boost(ubar / np.sqrt(ubar[0] ** 2 - ubar[1:] @ ubar[1:]))
    s_rest = back @ np.asarray(s, dtype=float)
    return [boost, rotation_e3_to(s_rest[1:])]


def frame_transform(u, s=None) -> np.ndarray:
    """Vector transform with ``Lambda e_0 = u`` (and ``Lambda e_3 = s`` in 1+3)."""
    lam = np.eye(np.asarray(u).size)
    for gen in frame_generators(u, s):
        lam = lam @ vector_transform(gen)
    return lam


def spin_transform(u, s, basis: CliffordBasis) -> np.ndarray:
    """Spinor matrix ``L`` whose inverse carries the rest spinor to velocity ``u``
    and (1+3) spin ``s``: ``L^{-1} = S(boost) S(rotation)``."""
    inv = np.eye(basis.spinor_size, dtype=complex)
    for gen in frame_generators(u, s):
        inv = inv @ spinor_transform(gen, basis)
    return np.linalg.inv(inv)
