"""How fast the full driven model approaches the averaged one as omega0 grows.

For each omega0 the full and averaged tiers are run side by side and the
maximum |rho_ee| deviation is printed; it falls roughly as 1/omega0**2.
Also prints the averaged-vs-adiabatic gap for a range of kappa/g.
"""

import argparse

import numpy as np

from starkcavity import SystemParams, compare_tiers, integrate, pure_state


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega0", type=float, nargs="+", default=[100.0, 200.0, 400.0])
    ap.add_argument("--efield", type=float, default=2.0)
    ap.add_argument("--tmax", type=float, default=5.0)
    ap.add_argument("--kappas", type=float, nargs="+", default=[2.0, 5.0, 10.0, 20.0, 40.0])
    args = ap.parse_args(argv)

    print("omega0,max_dev_full_averaged")
    for w0 in args.omega0:
        p = SystemParams(g=1.0, kappa=1.0, efield=args.efield, omega0=w0)
        dt = args.tmax / int(np.ceil(args.tmax / p.max_full_dt()))
        c = compare_tiers(p, args.tmax, dt, 10)
        print(f"{w0!r},{c.max_full_vs_averaged!r}")

    print("kappa_over_g,max_dev_averaged_vs_exp")
    rho0 = pure_state("e", 0, 1)
    for k in args.kappas:
        tr = integrate(rho0, "averaged", SystemParams(g=1.0, kappa=k), 3 * k, 1e-3, 10, delta_e=0.0)
        dev = float(np.max(np.abs(tr.rho_ee - np.exp(-2 * tr.times / k))))
        print(f"{k!r},{dev!r}")


if __name__ == "__main__":
    main()
