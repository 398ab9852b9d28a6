"""Excited-state decay for a family of dc fields (averaged model, kappa = 5g).

Writes ``t`` and one ``rho_ee`` column per field to CSV; ``--plot`` also
saves a PNG. Larger fields push the atom off the cavity resonance and slow
the decay.
"""

import argparse
import csv
import sys

import numpy as np

from starkcavity import PolarizabilityStark, SystemParams, effective_detuning, integrate, pure_state


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g", type=float, default=1.0)
    ap.add_argument("--kappa", type=float, default=5.0)
    ap.add_argument("--alpha0", type=float, default=5.0, help="shift per field^2 (frequency units)")
    ap.add_argument("--fields", type=float, nargs="+", default=[0.0, 0.5, 1.0, 1.5, 2.0])
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--out", default="-")
    ap.add_argument("--plot", default=None, help="PNG path")
    args = ap.parse_args(argv)

    p = SystemParams(g=args.g, kappa=args.kappa)
    t_max = 2 * args.kappa / args.g**2
    rho0 = pure_state("e", 0, 1)
    curves = []
    for e in args.fields:
        de = effective_detuning(0.0, PolarizabilityStark(args.alpha0, e))
        tr = integrate(rho0, "averaged", p, t_max, args.dt, 20, delta_e=de)
        curves.append(tr.rho_ee)
    times = tr.times

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["t"] + [f"rho_ee_E{e:g}" for e in args.fields])
    for i, t in enumerate(times):
        w.writerow([repr(float(t))] + [repr(float(c[i])) for c in curves])
    if fh is not sys.stdout:
        fh.close()

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 3.5))
        for e, c in zip(args.fields, curves):
            ax.plot(times * args.g, c, label=f"E_d = {e:g}")
        ax.set_xlabel("g t")
        ax.set_ylabel("rho_ee")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)


if __name__ == "__main__":
    main()
