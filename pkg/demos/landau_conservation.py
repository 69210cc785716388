"""Conservation laws for lowest-Landau-level modes in a uniform magnetic field.

Checks charge, spin and energy balance at random points, the
Navier-Stokes form of the momentum equation, and compares a classical
orbit with the cyclotron radius.
"""
import numpy as np

from polardirac.clifford import basis_for
from polardirac.conservation import (
    EMField,
    conservation_residuals,
    cyclotron_radius,
    em_of,
    fit_circle,
    lorentz_orbit,
    magnetic_energy,
    navier_stokes_residual,
)
from polardirac.sources import landau_field
from polardirac.spinor import polar_of


def main(points=50, seed=0):
    basis = basis_for(4)
    field = landau_field(basis, 1.6, 0.5, 1.1, [(0.3, 0.2, 1, 1.0), (-0.4, -0.5, 1, 0.6 + 0.2j)])
    em = em_of(field)
    rng = np.random.default_rng(seed)
    worst, ns = {}, 0.0
    for x in rng.uniform(-1.5, 1.5, size=(points, 4)):
        for k, v in conservation_residuals(field, x, em).records():
            worst[k] = max(worst.get(k, 0.0), v)
        ns = max(ns, navier_stokes_residual(field.sample(x), basis, em).max)
    print("conservation:", ", ".join(f"{k} {v:.1e}" for k, v in worst.items()), f"NS {ns:.1e}")

    single = landau_field(basis, 1.6, 0.5, 1.1, [(0.0, 0.0, 1, 1.0)])
    p = polar_of(single.evaluate(np.zeros(4))[0], basis)
    print(f"spin energy of one mode: {magnetic_energy(p.u, p.s, em_of(single), 1.1):.4f}")

    uniform = EMField.uniform_magnetic([0.0, 0.0, 2.0], 0.5)
    v = 0.3
    u0 = np.array([1.0, v, 0.0, 0.0]) / np.sqrt(1 - v * v)
    xs, _ = lorentz_orbit(uniform, 1.0, np.zeros(4), u0, 0.01, 1000)
    _, r = fit_circle(xs[:, 1:3])
    print(f"cyclotron radius: orbit {r:.6f}, classical {cyclotron_radius(uniform, 1.0, u0):.6f}")


if __name__ == "__main__":
    main()
