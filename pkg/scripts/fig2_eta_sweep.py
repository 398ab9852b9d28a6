"""Decay-rate ratio eta versus bare detuning for several drive amplitudes.

Uses the same row generator as ``starkcavity sweep-eta`` and optionally
plots eta(delta/kappa), marking the eta = 1 crossing at -s/2.
"""

import argparse
import sys

import numpy as np

from starkcavity import cli
from starkcavity.effective import DriveStark, crossing_detuning


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega0", type=float, default=3.4e5, help="in units of kappa")
    ap.add_argument("--fields", type=float, nargs="+", default=[300.0, 600.0, 1200.0])
    ap.add_argument("--num", type=int, default=801)
    ap.add_argument("--out", default="-")
    ap.add_argument("--plot", default=None)
    args = ap.parse_args(argv)

    cfg = cli.RunConfig(command="sweep-eta", kappa=1.0, unit="kappa", omega0=args.omega0,
                        fields=tuple([0.0] + args.fields), dk_num=args.num).resolved()
    text = cli.run_sweep_eta(cfg)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    for e in args.fields:
        s = DriveStark(e, 0.0, args.omega0).shift()
        print(f"# E={e:g}: stark shift s={s!r}, eta=1 at delta={crossing_detuning(s)!r}", file=sys.stderr)

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        rows = np.array(cli.sweep_eta_rows(cfg))
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for e in cfg.fields:
            sel = rows[:, 1] == e
            ax.plot(rows[sel, 0], rows[sel, 3], label=f"E = {e:g} kappa")
        ax.axhline(1.0, color="k", lw=0.5)
        ax.set_xlabel("delta / kappa")
        ax.set_ylabel("eta")
        ax.set_yscale("log")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)


if __name__ == "__main__":
    main()
