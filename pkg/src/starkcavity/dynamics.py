"""Master-equation right-hand sides and a fixed-step RK4 integrator.

Two generators are provided, both in the frame rotating at the atomic
frequency:

* ``rhs_full``: the bare Jaynes-Cummings generator with detuning ``delta``
  plus the explicit, rapidly oscillating drive sidebands at ``omega0 +/- Omega``.
* ``rhs_averaged``: the drive replaced by its time average, which only
  moves the cavity detuning to ``delta_e``.

``integrate`` steps either one with classic RK4 or, for the ``ADIABATIC``
tier, evaluates the closed-form population from :mod:`starkcavity.effective`.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import effective
from .hilbert import (
    DensityMatrix,
    OperatorSet,
    SpaceSpec,
    build_space,
    hermiticity_error,
    min_eigenvalue,
)

TRACE_TOL = 1e-8
BREACH_TOL = 1e-6
# samples per fast period required in the FULL tier
FULL_STEPS_PER_PERIOD = 50
# advisory separation omega0 >> g, kappa, |delta|
SEPARATION_FACTOR = 50.0


class ModelTier(enum.Enum):
    FULL = "full"
    AVERAGED = "averaged"
    ADIABATIC = "adiabatic"

    @classmethod
    def parse(cls, value: "str | ModelTier") -> "ModelTier":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown tier {value!r}; choose from {[t.value for t in cls]}"
            ) from None


class StepSizeError(ValueError):
    """Time step too coarse to resolve the fast drive oscillation."""


class InvariantBreach(RuntimeError):
    """A density-matrix invariant drifted beyond the abort tolerance."""


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of one run (angular frequencies, ``hbar = 1``).

    ``delta = omega0 - omega_c`` is the bare atom-cavity detuning and
    ``kappa`` the cavity field decay rate (photon leakage ``2 kappa``).
    """

    g: float = 1.0
    kappa: float = 5.0
    delta: float = 0.0
    efield: float = 0.0
    omega_drive: float = 0.0
    omega0: float = 200.0
    n_max: int = 1

    def __post_init__(self):
        if not self.g >= 0:
            raise ValueError(f"g must be >= 0, got {self.g!r}")
        if not self.kappa >= 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa!r}")
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0!r}")
        if not self.efield >= 0:
            raise ValueError(f"efield must be >= 0, got {self.efield!r}")
        if not 0 <= self.omega_drive < self.omega0:
            raise ValueError("need 0 <= omega_drive < omega0")
        if not math.isfinite(self.delta):
            raise ValueError("delta must be finite")
        SpaceSpec(self.n_max)

    @property
    def separation_warning(self) -> bool:
        """True when ``omega0`` is not well separated from the slow scales."""
        return self.omega0 < SEPARATION_FACTOR * max(self.g, self.kappa, abs(self.delta))

    @property
    def stark(self) -> effective.DriveStark:
        return effective.DriveStark(self.efield, self.omega_drive, self.omega0)

    def delta_e(self) -> float:
        return effective.effective_detuning(self.delta, self.stark)

    def max_full_dt(self) -> float:
        return 2.0 * math.pi / (FULL_STEPS_PER_PERIOD * (self.omega0 + self.omega_drive))


@functools.lru_cache(maxsize=32)
def operators(n_max: int) -> OperatorSet:
    return build_space(SpaceSpec(n_max))


def _check_dims(rho: np.ndarray, ops: OperatorSet) -> None:
    if rho.shape != (ops.dim, ops.dim):
        raise ValueError(f"rho has shape {rho.shape}, expected {(ops.dim, ops.dim)}")


def _dissipator(rho, ops: OperatorSet, kappa: float):
    # -kappa (a^dag a rho - 2 a rho a^dag + rho a^dag a)
    n = ops.number
    return -kappa * (n @ rho - 2.0 * (ops.a @ rho @ ops.a_dag) + rho @ n)


def averaged_hamiltonian(ops: OperatorSet, g: float, delta_e: float) -> np.ndarray:
    return -delta_e * ops.number + g * ops.jc_coupling()


def rhs_averaged(rho: DensityMatrix, params: SystemParams, delta_e: float) -> np.ndarray:
    """Time-averaged generator with the Stark-shifted detuning ``delta_e``."""
    if not math.isfinite(delta_e):
        raise ValueError("delta_e must be finite")
    rho = np.asarray(rho)
    ops = operators(rho.shape[0] // 2 - 1) if rho.ndim == 2 else None
    if ops is None or rho.shape[0] % 2:
        raise ValueError(f"rho has invalid shape {rho.shape}")
    _check_dims(rho, ops)
    h = averaged_hamiltonian(ops, params.g, delta_e)
    return -1j * (h @ rho - rho @ h) + _dissipator(rho, ops, params.kappa)


def drive_hamiltonian(ops: OperatorSet, t: float, params: SystemParams) -> np.ndarray:
    """Drive sidebands at ``omega0 +/- Omega`` in the atomic rotating frame."""
    if params.efield == 0.0:
        return np.zeros((ops.dim, ops.dim), dtype=complex)
    w0, om = params.omega0, params.omega_drive
    phase = np.exp(1j * (w0 + om) * t) + np.exp(1j * (w0 - om) * t)
    sp = 0.5 * params.efield * phase * ops.s_plus
    return sp + sp.conj().T


def rhs_full(rho: DensityMatrix, t: float, params: SystemParams) -> np.ndarray:
    """Generator with the explicit time-dependent drive and bare detuning."""
    if t < 0:
        raise ValueError("t must be >= 0")
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] % 2 or rho.shape[0] < 4:
        raise ValueError(f"rho has invalid shape {rho.shape}")
    ops = operators(rho.shape[0] // 2 - 1)
    _check_dims(rho, ops)
    h = averaged_hamiltonian(ops, params.g, params.delta)
    if params.efield != 0.0:
        h = h + drive_hamiltonian(ops, t, params)
    return -1j * (h @ rho - rho @ h) + _dissipator(rho, ops, params.kappa)


@dataclass
class Trajectory:
    """Sampled observables of one run.

    ``rho_ee`` is ``<e,0|rho|e,0>``; ``p_excited_atom`` is ``tr(rho S+ S-)``
    summed over all photon numbers.
    """

    tier: ModelTier
    times: np.ndarray
    rho_ee: np.ndarray
    p_excited_atom: np.ndarray
    p_g1: np.ndarray
    p_g0: np.ndarray
    trace: np.ndarray
    min_eigenvalue: np.ndarray
    hermiticity: np.ndarray
    final_state: np.ndarray | None = None
    delta_e: float | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    @property
    def max_trace_drift(self) -> float:
        return float(np.max(np.abs(self.trace - 1.0)))

    @property
    def outside_three_states(self) -> np.ndarray:
        """Population outside ``{|e,0>, |g,1>, |g,0>}``."""
        return self.trace - self.rho_ee - self.p_g1 - self.p_g0


def _sample(rho, ops: OperatorSet, idx, t=0.0):
    if not np.all(np.isfinite(rho)):
        raise InvariantBreach(f"non-finite density matrix at t={t!r}")
    herm = hermiticity_error(rho)
    rho_h = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho_h).real
    lam = min_eigenvalue(rho_h)
    e0, g1, g0 = idx
    p_exc = float(np.real(np.trace(rho_h @ ops.s_plus @ ops.s_minus)))
    rec = (rho_h[e0, e0].real, p_exc, rho_h[g1, g1].real, rho_h[g0, g0].real, tr, lam, herm)
    return rho_h, rec


def _check_record(t, rec, check_positivity: bool):
    rho_ee, p_exc, p_g1, p_g0, tr, lam, herm = rec
    problems = []
    if not np.isfinite(tr) or abs(tr - 1.0) > BREACH_TOL:
        problems.append(f"trace={tr!r}")
    if herm > BREACH_TOL:
        problems.append(f"hermiticity error={herm:.3g}")
    if check_positivity and lam < -BREACH_TOL:
        problems.append(f"min eigenvalue={lam:.3g}")
    for name, p in (("rho_ee", rho_ee), ("p_excited_atom", p_exc), ("p_g1", p_g1), ("p_g0", p_g0)):
        if not -BREACH_TOL <= p <= 1 + BREACH_TOL:
            problems.append(f"{name}={p!r}")
    if problems:
        raise InvariantBreach(f"invariant breach at t={t!r}: " + ", ".join(problems))


def rk4_step(f, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    rho0: DensityMatrix,
    tier: ModelTier | str,
    params: SystemParams,
    t_max: float,
    dt: float,
    sample_every: int = 1,
    delta_e: float | None = None,
    check_positivity: bool = True,
) -> Trajectory:
    """Fixed-step RK4 evolution from ``rho0`` up to ``t_max``.

    Parameters
    ----------
    rho0 : ndarray
        Initial density matrix. Its dimension fixes the truncation; it
        overrides ``params.n_max``.
    tier : ModelTier or str
        ``FULL`` integrates the explicit drive with detuning ``params.delta``;
        ``AVERAGED`` integrates the averaged generator at ``delta_e``;
        ``ADIABATIC`` evaluates ``exp(-2 gamma_e t)`` on the same grid
        (requires ``rho0 = |e,0><e,0|`` semantics and ``kappa > 0``).
    t_max, dt : float
        Final time and step. ``round(t_max / dt)`` steps are taken; for the
        ``FULL`` tier ``dt`` must resolve the drive period.
    sample_every : int
        Record every ``sample_every``-th step (t = 0 is always recorded).
    delta_e : float, optional
        Effective detuning for ``AVERAGED``/``ADIABATIC``. Defaults to
        ``params.delta_e()`` (drive-form Stark shift).

    Returns
    -------
    Trajectory

    Raises
    ------
    StepSizeError
        ``dt`` too coarse for the ``FULL`` tier.
    InvariantBreach
        Trace, Hermiticity, positivity or a probability drifted by more
        than ``1e-6``. The state is symmetrized at each sample but never
        renormalized.
    """
    tier = ModelTier.parse(tier)
    if not dt > 0 or not t_max >= 0:
        raise ValueError("need dt > 0 and t_max >= 0")
    if int(sample_every) != sample_every or sample_every < 1:
        raise ValueError("sample_every must be a positive integer")
    n_steps = int(round(t_max / dt))
    if abs(n_steps * dt - t_max) > 1e-9 * max(1.0, t_max):
        raise ValueError(f"t_max={t_max} is not an integer multiple of dt={dt}")

    rho = np.array(rho0, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] % 2 or rho.shape[0] < 4:
        raise ValueError(f"rho0 has invalid shape {rho.shape}")
    ops = operators(rho.shape[0] // 2 - 1)
    spec = ops.spec
    idx = (spec.index("e", 0), spec.index("g", 1), spec.index("g", 0))
    if hermiticity_error(rho) > 1e-12 or abs(np.trace(rho).real - 1) > TRACE_TOL:
        raise ValueError("rho0 is not a valid density matrix")
    if min_eigenvalue(rho) < -1e-9:
        raise ValueError("rho0 is not positive semidefinite")

    if tier is ModelTier.FULL:
        if dt > params.max_full_dt() * (1 + 1e-12):
            raise StepSizeError(
                f"dt={dt} exceeds the FULL-tier bound {params.max_full_dt():.6g} "
                f"(2 pi / ({FULL_STEPS_PER_PERIOD} (omega0 + Omega)))"
            )
        de = params.delta

        def f(t, y):
            return rhs_full(y, t, params)
    else:
        de = params.delta_e() if delta_e is None else float(delta_e)
        h_avg = averaged_hamiltonian(ops, params.g, de)

        def f(t, y):
            return -1j * (h_avg @ y - y @ h_avg) + _dissipator(y, ops, params.kappa)

    if tier is ModelTier.ADIABATIC:
        return _adiabatic_trajectory(rho, ops, idx, params, de, n_steps, dt, sample_every)

    records = []
    times = []
    rho, rec = _sample(rho, ops, idx)
    _check_record(0.0, rec, check_positivity)
    records.append(rec)
    times.append(0.0)
    for k in range(1, n_steps + 1):
        t_prev = (k - 1) * dt
        rho = rk4_step(f, t_prev, rho, dt)
        if k % sample_every == 0 or k == n_steps:
            t = k * dt
            rho, rec = _sample(rho, ops, idx, t)
            _check_record(t, rec, check_positivity)
            records.append(rec)
            times.append(t)
    return _pack(tier, times, records, rho, de, params, dt)


def _pack(tier, times, records, rho, de, params, dt) -> Trajectory:
    cols = np.array(records, dtype=float).T
    return Trajectory(
        tier=tier,
        times=np.array(times),
        rho_ee=cols[0],
        p_excited_atom=cols[1],
        p_g1=cols[2],
        p_g0=cols[3],
        trace=cols[4],
        min_eigenvalue=cols[5],
        hermiticity=cols[6],
        final_state=rho,
        delta_e=de,
        meta={"dt": dt, "separation_warning": params.separation_warning},
    )


def _adiabatic_trajectory(rho0, ops, idx, params, de, n_steps, dt, sample_every) -> Trajectory:
    e0 = idx[0]
    if abs(rho0[e0, e0] - 1.0) > 1e-12:
        raise ValueError("the ADIABATIC tier only describes decay from |e,0>")
    r = effective.rates(params.g, params.kappa, de)
    steps = [k for k in range(n_steps + 1) if k % sample_every == 0 or k == n_steps]
    times = np.array(steps, dtype=float) * dt
    pe = effective.adiabatic_population(times, r)
    pe = np.atleast_1d(pe)
    zeros = np.zeros_like(pe)
    ones = np.ones_like(pe)
    return Trajectory(
        tier=ModelTier.ADIABATIC,
        times=times,
        rho_ee=pe,
        p_excited_atom=pe.copy(),
        p_g1=zeros,
        p_g0=1.0 - pe,
        trace=ones,
        min_eigenvalue=np.minimum(pe, 1.0 - pe),
        hermiticity=zeros.copy(),
        final_state=None,
        delta_e=de,
        meta={"dt": dt, "gamma": r.gamma, "shift": r.shift},
    )


@dataclass(frozen=True)
class TierComparison:
    times: np.ndarray
    full: Trajectory
    averaged: Trajectory
    adiabatic: Trajectory | None

    @property
    def full_vs_averaged(self) -> np.ndarray:
        return np.abs(self.full.rho_ee - self.averaged.rho_ee)

    @property
    def averaged_vs_adiabatic(self) -> np.ndarray | None:
        if self.adiabatic is None:
            return None
        return np.abs(self.averaged.rho_ee - self.adiabatic.rho_ee)

    @property
    def max_full_vs_averaged(self) -> float:
        return float(np.max(self.full_vs_averaged))

    @property
    def max_averaged_vs_adiabatic(self) -> float | None:
        d = self.averaged_vs_adiabatic
        return None if d is None else float(np.max(d))


def compare_tiers(
    params: SystemParams,
    t_max: float,
    dt: float,
    sample_every: int = 1,
    full_n_max: int | None = None,
) -> TierComparison:
    """Run FULL, AVERAGED and (when ``kappa > 0``) ADIABATIC from ``|e,0>``.

    FULL uses ``max(params.n_max, 3)`` photons by default, AVERAGED one
    (exact by excitation conservation). All tiers share ``dt``.
    """
    from .hilbert import pure_state

    nf = full_n_max if full_n_max is not None else max(params.n_max, 3)
    full = integrate(pure_state("e", 0, nf), ModelTier.FULL, params, t_max, dt, sample_every)
    rho0 = pure_state("e", 0, 1)
    avg = integrate(rho0, ModelTier.AVERAGED, params, t_max, dt, sample_every)
    adi = None
    if params.kappa > 0:
        adi = integrate(rho0, ModelTier.ADIABATIC, params, t_max, dt, sample_every)
    return TierComparison(full.times, full, avg, adi)
