"""Time-stepped 1+1 Dirac packet checked against the polar equations.

The packet is advanced by implicit midpoint steps; derivatives for the
polar and Madelung residuals come from centred differences, so the
residuals shrink as the lattice is refined.
"""
import numpy as np

from polardirac.clifford import basis_for
from polardirac.connections import FieldSample
from polardirac.madelung import dirac_polar_residuals, madelung_residuals, state_from_sample
from polardirac.sources import Dirac1p1State, Dirac1p1Stepper, gaussian_packet_1p1


def residuals(N, dt, m=1.0):
    basis = basis_for(2)
    x = np.linspace(-20, 20, N, endpoint=False)
    dx = x[1] - x[0]
    stepper = Dirac1p1Stepper(basis, x, m, dt)
    states = [Dirac1p1State(x, gaussian_packet_1p1(basis, x, m, 0.8, 0.0, 2.0), 0.0, m)]
    for _ in range(int(round(1.0 / dt)) + 1):
        states.append(stepper.step(states[-1]))
    drift = max(abs(b.total_norm() - a.total_norm()) for a, b in zip(states, states[1:]))
    prev, cur, nxt = states[-3:]
    dpt = (nxt.psi - prev.psi) / (2 * dt)
    dpx = (np.roll(cur.psi, -1, 0) - np.roll(cur.psi, 1, 0)) / (2 * dx)
    polar = mad = 0.0
    for xx in np.linspace(-2, 4, 13):
        j = int(np.argmin(np.abs(x - xx)))
        s = FieldSample(cur.psi[j], np.stack([dpt[j], dpx[j]]), np.zeros(2), 0.0, np.array([cur.t, x[j]]))
        st = state_from_sample(s, basis, m)
        polar = max(polar, dirac_polar_residuals(st).max)
        mad = max(mad, madelung_residuals(st).max)
    return drift, polar, mad


def main():
    print("N,dt,norm_drift,polar,madelung")
    for N, dt in ((512, 0.04), (1024, 0.02), (2048, 0.01)):
        drift, polar, mad = residuals(N, dt)
        print(f"{N},{dt},{drift:.1e},{polar:.3e},{mad:.3e}")


if __name__ == "__main__":
    main()
