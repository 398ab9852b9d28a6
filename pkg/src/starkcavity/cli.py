"""Command-line front end.

Subcommands::

    simulate    rho_ee(t) trajectory for one tier                 -> CSV
    sweep-eta   decay-rate ratio eta over delta/kappa and fields  -> CSV
    compare     FULL vs AVERAGED vs ADIABATIC deviations          -> CSV + summary
    estimate    field needed for significant inhibition           -> text

Parameters come from defaults, then an optional ``key = value`` config file
(``--config``), then command-line flags; flags win. ``--dump-config`` writes
the fully resolved configuration, which reproduces the same output when fed
back through ``--config``.

Exit codes: 0 success, 2 configuration error, 3 numerical invariant breach.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import dynamics, effective
from .dynamics import InvariantBreach, ModelTier, StepSizeError, SystemParams
from .hilbert import pure_state

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

COMMANDS = ("simulate", "sweep-eta", "compare", "estimate")
UNITS = ("g", "kappa", "hz", "rad/s")

# Fig. 2 default: omega0 = 3.4e5 kappa
OMEGA0_OVER_KAPPA = 3.4e5
# default sweep fields, in units of kappa
SWEEP_FIELDS_OVER_KAPPA = (0.0, 400.0, 800.0, 1200.0)
MAX_ROWS = 500


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Flat parameter set for every subcommand. ``None`` means "derive a default"."""

    command: str = "simulate"
    g: float | None = None
    kappa: float | None = None
    delta: float = 0.0
    efield: float = 0.0
    omega: float = 0.0
    omega0: float | None = None
    alpha0: float | None = None
    efield_dc: float | None = None
    tier: str = "averaged"
    nmax: int | None = None
    tmax: float | None = None
    dt: float | None = None
    sample_every: int | None = None
    unit: str = "g"
    dk_min: float = -40.0
    dk_max: float = 40.0
    dk_num: int = 161
    fields: tuple[float, ...] | None = None
    dipole: float | None = None

    def resolved(self) -> "RunConfig":
        """Fill derived defaults and validate; returns a new config."""
        c = dataclasses.replace(self)
        if c.command not in COMMANDS:
            raise ConfigError(f"unknown command {c.command!r}")
        if c.unit not in UNITS:
            raise ConfigError(f"unit must be one of {UNITS}, got {c.unit!r}")
        try:
            c.tier = ModelTier.parse(c.tier).value
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if c.command == "estimate":
            return c._resolve_estimate()

        if c.kappa is None:
            c.kappa = 1.0 if c.unit == "kappa" else 5.0
        if c.g is None:
            c.g = c.kappa / 5.0 if c.unit == "kappa" else 1.0
        if c.omega0 is None:
            c.omega0 = OMEGA0_OVER_KAPPA * c.kappa if c.kappa > 0 else 200.0 * c.g
        for name in ("g", "kappa", "delta", "efield", "omega", "omega0"):
            v = getattr(c, name)
            if not math.isfinite(v):
                raise ConfigError(f"{name} must be finite")
        polar = c.alpha0 is not None or c.efield_dc is not None
        if polar and (c.alpha0 is None or c.efield_dc is None) and c.command != "sweep-eta":
            raise ConfigError("the polarizability form needs both alpha0 and efield_dc")
        if polar and (c.efield != 0.0 or c.omega != 0.0):
            raise ConfigError("give either efield/omega or alpha0/efield_dc, not both")
        self._check_params(c)
        if not c.g > 0:
            raise ConfigError("g must be > 0")

        if c.command == "sweep-eta":
            return c._resolve_sweep()

        tier = ModelTier(c.tier)
        if c.command == "compare":
            tier = ModelTier.FULL
            c.tier = tier.value
            if polar:
                raise ConfigError("compare needs the drive form (efield), not alpha0/efield_dc")
        if tier is ModelTier.FULL and polar:
            raise ConfigError("the FULL tier needs the drive form (efield), not alpha0/efield_dc")
        if tier is ModelTier.ADIABATIC and not c.kappa > 0:
            raise ConfigError("the ADIABATIC tier needs kappa > 0")
        if c.command == "compare" and not c.kappa > 0:
            raise ConfigError("compare needs kappa > 0 for the ADIABATIC tier")
        if c.nmax is None:
            c.nmax = 3 if tier is ModelTier.FULL else 1
        if c.nmax < 1:
            raise ConfigError("nmax must be >= 1")
        if c.tmax is None:
            c.tmax = 2.0 * c.kappa / c.g**2 if c.kappa > 0 else 10.0 / c.g
        if not c.tmax > 0:
            raise ConfigError("tmax must be > 0")
        if c.dt is None:
            if tier is ModelTier.FULL:
                bound = c.params().max_full_dt()
                c.dt = c.tmax / math.ceil(c.tmax / bound)
            else:
                c.dt = c.tmax / math.ceil(c.tmax / (1e-3 / c.g))
        if not c.dt > 0:
            raise ConfigError("dt must be > 0")
        n_steps = round(c.tmax / c.dt)
        if n_steps < 1 or abs(n_steps * c.dt - c.tmax) > 1e-9 * c.tmax:
            raise ConfigError(f"tmax={c.tmax} must be an integer multiple of dt={c.dt}")
        if c.sample_every is None:
            c.sample_every = max(1, n_steps // MAX_ROWS)
        if c.sample_every < 1:
            raise ConfigError("sample_every must be >= 1")
        return c

    @staticmethod
    def _check_params(c: "RunConfig") -> None:
        try:
            SystemParams(
                g=c.g, kappa=c.kappa, delta=c.delta, efield=c.efield,
                omega_drive=c.omega, omega0=c.omega0, n_max=c.nmax or 1,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def _resolve_sweep(self) -> "RunConfig":
        if not self.kappa > 0:
            raise ConfigError("sweep-eta needs kappa > 0")
        if self.alpha0 is not None and self.efield_dc is not None:
            raise ConfigError("for sweep-eta give alpha0 and list dc fields with --fields")
        if self.fields is None:
            if self.alpha0 is not None:
                raise ConfigError("with alpha0, give the dc fields with --fields")
            self.fields = tuple(f * self.kappa for f in SWEEP_FIELDS_OVER_KAPPA)
        self.fields = tuple(float(f) for f in self.fields)
        if not self.fields:
            raise ConfigError("fields must be non-empty")
        if not all(math.isfinite(f) and f >= 0 for f in self.fields):
            raise ConfigError("fields must be finite and >= 0")
        if self.dk_num < 1 or not (math.isfinite(self.dk_min) and math.isfinite(self.dk_max)):
            raise ConfigError("delta/kappa grid must be finite and non-empty")
        if self.dk_max < self.dk_min:
            raise ConfigError("dk_max must be >= dk_min")
        return self

    def _resolve_estimate(self) -> "RunConfig":
        if self.kappa is None:
            raise ConfigError("estimate needs --kappa")
        if not self.kappa > 0:
            raise ConfigError("estimate needs kappa > 0")
        if self.omega0 is None and self.alpha0 is None:
            raise ConfigError("estimate needs --omega0 or --alpha0")
        if self.dipole is not None and self.unit not in ("hz", "rad/s"):
            raise ConfigError("converting to a dc field via --dipole needs --unit hz or rad/s")
        return self

    def params(self) -> SystemParams:
        return SystemParams(
            g=self.g, kappa=self.kappa, delta=self.delta, efield=self.efield,
            omega_drive=self.omega, omega0=self.omega0, n_max=self.nmax or 1,
        )

    def stark(self) -> effective.StarkInput:
        if self.alpha0 is not None:
            return effective.PolarizabilityStark(self.alpha0, self.efield_dc)
        return effective.DriveStark(self.efield, self.omega, self.omega0)

    def delta_e(self) -> float:
        return effective.effective_detuning(self.delta, self.stark())

    def to_lines(self) -> list[str]:
        out = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, tuple):
                v = ",".join(fmt(x) for x in v)
            elif isinstance(v, float):
                v = fmt(v)
            out.append(f"{f.name} = {v}")
        return out

    def meta_comment(self) -> str:
        body = " ".join(line.replace(" = ", "=") for line in self.to_lines())
        return f"# starkcavity {body} (frequencies in units of {self.unit})"


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def fmt(x: float) -> str:
    """Shortest round-trip decimal form of a float."""
    return repr(float(x))


def _coerce(key: str, raw: str):
    typ = _FIELD_TYPES[key]
    raw = raw.strip()
    if raw.lower() == "none":
        return None
    try:
        if "tuple" in typ:
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if typ.startswith("int"):
            return int(raw)
        if typ.startswith("float"):
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def _atomic_write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".starkcavity-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(cfg: RunConfig, header: list[str], rows, trailer: list[str] = ()) -> str:
    lines = [cfg.meta_comment(), ",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    lines += list(trailer)
    return "\n".join(lines) + "\n"


def run_simulate(cfg: RunConfig) -> str:
    tier = ModelTier(cfg.tier)
    rho0 = pure_state("e", 0, cfg.nmax)
    de = None if tier is ModelTier.FULL else cfg.delta_e()
    traj = dynamics.integrate(rho0, tier, cfg.params(), cfg.tmax, cfg.dt, cfg.sample_every, delta_e=de)
    rows = zip(traj.times, traj.rho_ee, traj.p_g1, traj.p_g0, traj.trace)
    return _csv(cfg, ["t", "rho_ee", "p_g1", "p_g0", "trace"], rows)


def sweep_eta_rows(cfg: RunConfig):
    dks = np.linspace(cfg.dk_min, cfg.dk_max, cfg.dk_num)
    rows = []
    for fld in cfg.fields:
        if cfg.alpha0 is not None:
            stark = effective.PolarizabilityStark(cfg.alpha0, fld)
        else:
            stark = effective.DriveStark(fld, cfg.omega, cfg.omega0)
        for dk in dks:
            delta = float(dk) * cfg.kappa
            de = effective.effective_detuning(delta, stark)
            rows.append((float(dk), fld, de, effective.eta(cfg.kappa, delta, de)))
    return rows


def run_sweep_eta(cfg: RunConfig) -> str:
    return _csv(cfg, ["delta_over_kappa", "efield", "delta_e", "eta"], sweep_eta_rows(cfg))


def run_compare(cfg: RunConfig) -> tuple[str, str]:
    cmp = dynamics.compare_tiers(cfg.params(), cfg.tmax, cfg.dt, cfg.sample_every, full_n_max=cfg.nmax)
    d_fa = cmp.full_vs_averaged
    d_aa = cmp.averaged_vs_adiabatic
    rows = zip(cmp.times, cmp.full.rho_ee, cmp.averaged.rho_ee, cmp.adiabatic.rho_ee, d_fa, d_aa)
    summary = (
        f"max_dev_full_averaged={fmt(cmp.max_full_vs_averaged)} "
        f"max_dev_averaged_adiabatic={fmt(cmp.max_averaged_vs_adiabatic)}"
    )
    header = ["t", "rho_ee_full", "rho_ee_averaged", "rho_ee_adiabatic",
              "dev_full_averaged", "dev_averaged_adiabatic"]
    return _csv(cfg, header, rows, [f"# {summary}"]), summary


def run_estimate(cfg: RunConfig) -> str:
    est = effective.significance_estimate(
        cfg.kappa, omega0=cfg.omega0, alpha0=cfg.alpha0, dipole=cfg.dipole,
        cyclic=cfg.unit == "hz",
    )
    lines = [f"# starkcavity estimate (frequencies in units of {cfg.unit})",
             f"kappa = {fmt(est.kappa)}"]
    if est.omega0 is not None:
        lines.append(f"omega0 = {fmt(est.omega0)}")
    if est.efield is not None:
        lines.append(f"efield = {fmt(est.efield)}  # drive amplitude with 2 efield^2/omega0 = kappa")
    if est.efield_dc is not None:
        if cfg.alpha0 is not None:
            lines.append(f"efield_dc = {fmt(est.efield_dc)}  # alpha0 efield_dc^2 = kappa")
        else:
            lines.append(f"efield_dc = {fmt(est.efield_dc)}  # esu, hbar efield / dipole")
            lines.append("assumption = alpha0 efield_dc^2 ~ 2 efield^2 / omega0")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("parameters")
    for flag, typ, helptext in [
        ("--g", float, "atom-cavity coupling"),
        ("--kappa", float, "cavity field decay rate"),
        ("--delta", float, "bare detuning omega0 - omega_c"),
        ("--efield", float, "drive amplitude E (frequency)"),
        ("--omega", float, "drive frequency Omega"),
        ("--omega0", float, "atomic transition frequency"),
        ("--alpha0", float, "differential polarizability (frequency per field^2)"),
        ("--efield-dc", float, "dc field for the polarizability form"),
        ("--nmax", int, "photon-number truncation"),
        ("--tmax", float, "final time"),
        ("--dt", float, "RK4 step"),
        ("--sample-every", int, "record every N-th step"),
        ("--dk-min", float, "sweep: lowest delta/kappa"),
        ("--dk-max", float, "sweep: highest delta/kappa"),
        ("--dk-num", int, "sweep: number of delta/kappa points"),
        ("--dipole", float, "estimate: transition dipole moment (esu cm)"),
    ]:
        g.add_argument(flag, type=typ, default=None, help=helptext)
    g.add_argument("--fields", default=None,
                   help="sweep: comma-separated field values (efield, or efield_dc with --alpha0)")
    g.add_argument("--tier", default=None, choices=[t.value for t in ModelTier])
    g.add_argument("--unit", default=None, choices=UNITS,
                   help="frequency unit label (g, kappa, hz, rad/s); default g")
    g.add_argument("--out", default=None, help="output path (default stdout)")
    g.add_argument("--config", default=None, help="key = value config file")
    g.add_argument("--dump-config", default=None, help="write the resolved config here")

    parser = argparse.ArgumentParser(prog="starkcavity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(read_config(args.config))
    for key in _FIELD_TYPES:
        if key == "command":
            continue
        v = getattr(args, key, None)
        if v is None:
            continue
        if key == "fields":
            v = _coerce("fields", v)
        values[key] = v
    values["command"] = args.command
    return RunConfig(**values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args).resolved()
        if args.dump_config:
            _atomic_write(args.dump_config, "\n".join(cfg.to_lines()) + "\n")
        summary = None
        if cfg.command == "simulate":
            text = run_simulate(cfg)
        elif cfg.command == "sweep-eta":
            text = run_sweep_eta(cfg)
        elif cfg.command == "compare":
            text, summary = run_compare(cfg)
        else:
            text = run_estimate(cfg)
        _atomic_write(args.out, text)
        if summary is not None and args.out not in (None, "-"):
            print(summary)
    except (ConfigError, StepSizeError) as exc:
        print(f"starkcavity: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantBreach as exc:
        print(f"starkcavity: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"starkcavity: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
