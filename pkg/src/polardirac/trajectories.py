"""Integral curves of the velocity field ``u = U / phi2``.

Trajectories are parameterised by proper time, ``dx/dtau = u(x)`` with
``u.u = 1``, and integrated with classical fourth-order Runge-Kutta.  Steps
that touch a singular region (vanishing density) are halved a bounded
number of times before the trajectory is terminated and flagged.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .clifford import ConfigurationError
from .report import ResidualReport, from_components
from .spinor import SingularSpinorError, polar_jet, polar_of

NORMALIZATION_DRIFT = 1e-6


def velocity_at(field, point) -> np.ndarray:
    """Unit velocity ``u`` of ``field`` (anything with ``evaluate``) at ``point``.

    Small normalisation drift is removed; larger drift or a singular spinor
    raises :class:`SingularSpinorError`.
    """
    psi = field.evaluate(np.asarray(point, dtype=float))[0]
    return _unit(polar_of(psi, field.basis).u, field.basis.metric)


def _unit(u, eta):
    norm2 = float(u @ eta @ u)
    if not np.isfinite(norm2) or abs(norm2 - 1) > NORMALIZATION_DRIFT:
        raise SingularSpinorError(f"velocity normalisation drifted to {norm2!r}")
    return u / np.sqrt(norm2)


@dataclass(frozen=True)
class Trajectory:
    """Samples ``(tau, x, u, phi2, beta)`` along one integral curve."""

    seed: np.ndarray
    tau: np.ndarray
    x: np.ndarray
    u: np.ndarray
    phi2: np.ndarray
    beta: np.ndarray
    terminated: bool = False
    reason: str = ""

    @property
    def t(self) -> np.ndarray:
        """Coordinate time along the curve."""
        return self.x[:, 0]

    def at_coordinate_time(self, times) -> np.ndarray:
        """Spatial position at the given coordinate times (linear interpolation)."""
        times = np.asarray(times, dtype=float)
        if np.any(times < self.t[0]) or np.any(times > self.t[-1]):
            raise ConfigurationError("requested times lie outside the trajectory")
        return np.stack([np.interp(times, self.t, self.x[:, k]) for k in range(1, self.x.shape[1])], axis=-1)

    @property
    def uniform(self) -> bool:
        """True when no step was halved."""
        h = np.diff(self.tau)
        return bool(h.size == 0 or np.allclose(h, h[0], rtol=1e-9, atol=0.0))

    def normalization_error(self) -> float:
        eta = np.diag([1.0] + [-1.0] * (self.x.shape[1] - 1))
        return float(np.abs(np.einsum("ni,ij,nj->n", self.u, eta, self.u) - 1).max())

    def to_text(self) -> str:
        """Rows ``tau, t, x.., u.., phi2, beta`` with a header line."""
        n = self.x.shape[1]
        names = ["tau", "t"] + ["x", "y", "z"][: n - 1] + [f"u{k}" for k in range(n)] + ["phi2", "beta"]
        buf = io.StringIO()
        buf.write(f"# seed,{','.join(repr(float(v)) for v in self.seed)}\n")
        buf.write(f"# terminated,{int(self.terminated)},{self.reason}\n")
        buf.write(",".join(names) + "\n")
        rows = np.column_stack([self.tau, self.x, self.u, self.phi2, self.beta])
        for row in rows:
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return buf.getvalue()


def _probe(field, x, eta, floor):
    psi = field.evaluate(x)[0]
    p = polar_of(psi, field.basis)
    if p.phi2 < floor:
        raise SingularSpinorError(f"density {p.phi2:.3e} below the node floor")
    return _unit(p.u, eta), p


def integrate(field, seed, steps: int, dtau: float, max_halvings: int = 8, node_floor: float = 1e-8) -> Trajectory:
    """RK4 in proper time for ``dx/dtau = u(x)`` from ``seed``.

    A step whose stages meet a singular spinor, or a density below
    ``node_floor`` times the seed density, is retried with half the step up
    to ``max_halvings`` times; after that integration stops and the
    trajectory is flagged instead of being extrapolated through the node.
    """
    if steps < 0 or dtau <= 0:
        raise ConfigurationError("steps must be non-negative and dtau positive")
    eta = field.basis.metric
    x = np.asarray(seed, dtype=float).copy()
    u, p = _probe(field, x, eta, 0.0)
    floor = node_floor * p.phi2
    taus, xs, us, phis, betas = [0.0], [x.copy()], [u], [p.phi2], [0.0 if p.beta is None else p.beta]
    tau = 0.0
    terminated, reason = False, ""
    for _ in range(steps):
        h = dtau
        for _ in range(max_halvings + 1):
            try:
                k1 = u
                k2, _ = _probe(field, x + 0.5 * h * k1, eta, floor)
                k3, _ = _probe(field, x + 0.5 * h * k2, eta, floor)
                k4, _ = _probe(field, x + h * k3, eta, floor)
                xn = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                un, pn = _probe(field, xn, eta, floor)
                break
            except SingularSpinorError as exc:
                h *= 0.5
                reason = str(exc)
        else:
            terminated = True
            break
        x, u, tau = xn, un, tau + h
        taus.append(tau)
        xs.append(x.copy())
        us.append(u)
        phis.append(pn.phi2)
        betas.append(0.0 if pn.beta is None else pn.beta)
    return Trajectory(
        np.asarray(seed, dtype=float), np.array(taus), np.array(xs), np.array(us),
        np.array(phis), np.array(betas), terminated, reason if terminated else "",
    )


def transport_check(field, trajectory: Trajectory, flip_sign: bool = False) -> ResidualReport:
    """Lagrangian continuity ``d ln(phi2)/dtau + div u = 0`` along a trajectory.

    The left side is a fourth-order central difference of the sampled
    ``ln phi2`` in ``tau`` (uniform steps required), matching the order of
    the integrator; ``div u`` is exact from the field's derivatives.
    ``flip_sign`` evaluates the wrong-sign law ``d ln(phi2)/dtau - div u``
    as a negative control.
    """
    tau, phi2 = trajectory.tau, trajectory.phi2
    if tau.size < 5:
        raise ConfigurationError("transport check needs at least five samples")
    if not trajectory.uniform:
        raise ConfigurationError("transport check needs uniform proper-time steps")
    h = np.diff(tau)
    lnp = np.log(phi2)
    dln = (lnp[:-4] - 8 * lnp[1:-3] + 8 * lnp[3:-1] - lnp[4:]) / (12 * h[0])
    div = np.empty(tau.size - 4)
    for i, x in enumerate(trajectory.x[2:-2]):
        psi, dpsi, _ = field.evaluate(x)
        div[i] = np.trace(polar_jet(psi, dpsi, field.basis).du)
    sign = -1.0 if flip_sign else 1.0
    rep = from_components("lagrangian-continuity", {"M1": np.abs(dln + sign * div).max(initial=0.0)})
    rep.info.update({"samples": int(tau.size), "max_div_u": float(np.abs(div).max(initial=0.0))})
    return rep


def count_crossings(trajectories, times) -> int:
    """Number of trajectory pairs whose ordering in ``x`` changes over the
    given coordinate times (1+1 only)."""
    pos = np.array([tr.at_coordinate_time(times)[:, 0] for tr in trajectories])   # (n, times)
    count = 0
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            d = pos[i] - pos[j]
            if np.any(np.sign(d) != np.sign(d[0])):
                count += 1
    return count
