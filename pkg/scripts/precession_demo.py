"""Axisymmetric free rigid body against its closed-form precession.

For I = (1, 1, 3) and Pi0 = (1, 0, 1) the pair (Pi1, Pi2) turns at the
constant rate Pi3 (1/I1 - 1/I3).  Prints endpoint errors at t = 10 for
each integrator over a few step sizes, with the observed order.

    python scripts/precession_demo.py
"""
import argparse

import numpy as np

from lphj import DualVector, IntegratorChoice, RigidBodyParams, integrate, rigid_body_system
from lphj.dynamics import KINDS


def exact(t, I=(1.0, 1.0, 3.0), pi0=(1.0, 0.0, 1.0)):
    rate = pi0[2] * (1 / I[0] - 1 / I[2])
    c, s = np.cos(rate * t), np.sin(rate * t)
    return np.array([c * pi0[0] - s * pi0[1], s * pi0[0] + c * pi0[1], pi0[2]])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=10.0)
    ap.add_argument("--dts", type=lambda s: [float(v) for v in s.split(",")], default=[4e-3, 2e-3, 1e-3])
    args = ap.parse_args()
    sys = rigid_body_system(RigidBodyParams([1, 1, 3]))
    for kind in KINDS:
        prev = None
        for dt in args.dts:
            n = int(round(args.t_end / dt))
            traj = integrate(sys, DualVector.so3([1, 0, 1]), IntegratorChoice(kind, dt), n)
            err = float(np.max(np.abs(traj.states[-1] - exact(traj.times[-1]))))
            order = "" if prev is None or err == 0 else f"  order {np.log2(prev / err):.2f}"
            print(f"{kind:<20} dt={dt:<7g} endpoint error {err:.3e}{order}")
            prev = err


if __name__ == "__main__":
    main()
