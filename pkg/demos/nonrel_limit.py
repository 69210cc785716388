"""Slow 1+1 Dirac packets against their Schrödinger counterparts.

The relative energy discrepancy should fall as ``v^2``.
"""
import numpy as np

from polardirac.conservation import nonrel_packet_comparison


def main(velocities=(0.005, 0.01, 0.02, 0.04)):
    print("v,H_dirac,H_schrodinger,discrepancy")
    disc = []
    for v in velocities:
        c = nonrel_packet_comparison(v)
        disc.append(c.discrepancy)
        print(f"{v:g},{c.H_dirac:.10e},{c.H_schrodinger:.10e},{c.discrepancy:.3e}")
    slope = np.polyfit(np.log(velocities), np.log(disc), 1)[0]
    print(f"fitted exponent {slope:.3f}")


if __name__ == "__main__":
    main()
