"""Closed-form cavity decay quantities.

Everything here is a pure function of scalar inputs: the Stark-shifted
atom-cavity detuning, the bad-cavity decay parameter and level shift, the
inhibition/enhancement ratio ``eta``, the adiabatic excited-state
population, the exact single-excitation solution used as an oracle for the
integrator, and the order-of-magnitude field estimate.

Frequencies are angular and share one user-chosen unit (``hbar = 1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# CGS reduced Planck constant, erg s
HBAR_CGS = 1.054571817e-27

# g^2 <= BAD_CAVITY_BAND * (kappa^2 + delta_e^2) is treated as the bad-cavity regime
BAD_CAVITY_BAND = 0.04


@dataclass(frozen=True)
class DriveStark:
    """Stark shift from the oscillating drive ``E cos(Omega t)(S+ + S-)``."""

    efield: float
    omega_drive: float
    omega0: float

    def __post_init__(self):
        if self.efield < 0:
            raise ValueError("efield must be >= 0")
        if self.omega0 <= 0:
            raise ValueError("omega0 must be > 0")
        if not 0 <= self.omega_drive < self.omega0:
            raise ValueError(
                f"need 0 <= omega_drive < omega0, got Omega={self.omega_drive}, omega0={self.omega0}"
            )

    def shift(self) -> float:
        return 2.0 * self.omega0 * self.efield**2 / (self.omega0**2 - self.omega_drive**2)


@dataclass(frozen=True)
class PolarizabilityStark:
    """Stark shift ``alpha0 * E_d**2`` from the differential polarizability.

    ``alpha0`` is an opaque coefficient in frequency per field squared; it
    is never derived here.
    """

    alpha0: float
    efield_dc: float

    def __post_init__(self):
        try:
            s = self.alpha0 * self.efield_dc**2
        except OverflowError:
            s = math.inf
        if not math.isfinite(s):
            raise ValueError("alpha0 * efield_dc**2 must be finite")

    def shift(self) -> float:
        return self.alpha0 * self.efield_dc**2


StarkInput = DriveStark | PolarizabilityStark


@dataclass(frozen=True)
class EffectiveRates:
    """Bad-cavity decay parameter ``gamma`` and level shift ``shift``.

    The excited population decays as ``exp(-2 * gamma * t)``.
    """

    gamma: float
    shift: float

    def population(self, t):
        return adiabatic_population(t, self)


def effective_detuning(delta: float, stark: StarkInput | None = None) -> float:
    """Atom-cavity detuning including the field-induced Stark shift."""
    if stark is None:
        return float(delta)
    return float(delta + stark.shift())


def _check_kappa(kappa: float) -> None:
    if not kappa > 0:
        raise ValueError(f"kappa must be > 0 for the adiabatic rates, got {kappa!r}")


def rates(g: float, kappa: float, delta_e: float) -> EffectiveRates:
    """Decay parameter and shift after adiabatic elimination of the cavity.

    ``gamma = g^2 kappa / (kappa^2 + delta_e^2)``,
    ``shift = g^2 delta_e / (kappa^2 + delta_e^2)``.
    """
    _check_kappa(kappa)
    # factored so that delta_e = 0 gives g^2/kappa bit-for-bit
    lorentz = 1.0 + (delta_e / kappa) ** 2
    return EffectiveRates(gamma=g**2 / (kappa * lorentz), shift=g**2 * delta_e / (kappa**2 * lorentz))


def in_bad_cavity_regime(g: float, kappa: float, delta_e: float) -> bool:
    return g**2 <= BAD_CAVITY_BAND * (kappa**2 + delta_e**2)


def eta(kappa: float, delta: float, delta_e: float) -> float:
    """Ratio of decay rates with and without the field.

    Values below one mean inhibition, above one enhancement.
    """
    _check_kappa(kappa)
    return (kappa**2 + delta**2) / (kappa**2 + delta_e**2)


def eta_resonant(kappa: float, efield: float, omega0: float) -> float:
    """``eta`` at ``delta = 0`` and ``Omega = 0`` in terms of the drive amplitude."""
    _check_kappa(kappa)
    return 1.0 / (1.0 + 4.0 * efield**4 / (kappa**2 * omega0**2))


def crossing_detuning(stark_shift: float) -> float:
    """Bare detuning where the field leaves the decay rate unchanged (``eta = 1``)."""
    return -0.5 * stark_shift


def adiabatic_population(t, rates: EffectiveRates):
    """Excited-state population ``exp(-2 gamma t)`` of the eliminated model."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    out = np.exp(-2.0 * rates.gamma * t)
    return float(out) if out.ndim == 0 else out


def _one_minus_exp_over(x):
    """(1 - exp(-x)) / x for complex x, finite at 0."""
    x = np.asarray(x, dtype=complex)
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - 0.5 * x, -np.expm1(-safe) / safe)


def damped_rabi_amplitude(g: float, kappa: float, delta_e: float, t):
    """Excited-state amplitude ``c_e(t)`` with ``c_e(0) = 1``.

    Solves::

        dc_e/dt = -i g c_1
        dc_1/dt = (i delta_e - kappa) c_1 - i g c_e

    whose characteristic roots are ``sigma +/- D`` with
    ``sigma = (i delta_e - kappa)/2`` and ``D = sqrt(sigma^2 - g^2)``, giving
    ``c_e = exp(sigma t) [cosh(D t) - sigma sinh(D t) / D]``. The slow root
    is factored out (``Re D >= 0``) so long times neither overflow nor
    cancel near the critical point ``D = 0``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    sigma = 0.5 * (1j * delta_e - kappa)
    d = np.sqrt(complex(sigma**2 - g**2))
    if d.real < 0:
        d = -d
    x = 2.0 * d * t
    slow = np.exp((sigma + d) * t)
    return slow * (0.5 * (1.0 + np.exp(-x)) - sigma * t * _one_minus_exp_over(x))


def damped_rabi_oracle(g: float, kappa: float, delta_e: float, t):
    """Exact ``rho_ee(t) = <e,0|rho|e,0>`` of the averaged model from ``|e,0>``.

    The decay channel from ``|g,1>`` only feeds ``|g,0>``, which never
    couples back, so the two-amplitude picture is exact for ``rho_ee``.
    """
    c = damped_rabi_amplitude(g, kappa, delta_e, t)
    out = np.abs(c) ** 2
    return float(out) if out.ndim == 0 else out


def kappa_from_q(omega_c: float, q: float) -> float:
    """Cavity half-linewidth ``omega_c / (2 Q)``."""
    if not omega_c > 0 or not q > 0:
        raise ValueError("omega_c and Q must be positive")
    return omega_c / (2.0 * q)


@dataclass(frozen=True)
class SignificanceEstimate:
    """Field strengths at which the Stark shift equals ``kappa``.

    ``assume_drive_equivalent`` records the simplifying identification
    ``alpha0 * E_d**2 ~ 2 E**2 / omega0`` used to relate the drive amplitude
    to a dc field via the dipole moment.
    """

    kappa: float
    omega0: float | None
    efield: float | None
    efield_dc: float | None
    assume_drive_equivalent: bool


def significance_estimate(
    kappa: float,
    omega0: float | None = None,
    alpha0: float | None = None,
    dipole: float | None = None,
    cyclic: bool = False,
) -> SignificanceEstimate:
    """Field needed for ``eta = 1/2`` at resonance.

    Frequency form: ``2 E^2 / omega0 = kappa`` so ``E = sqrt(kappa omega0 / 2)``.
    Polarizability form: ``alpha0 E_d^2 = kappa`` so ``E_d = sqrt(kappa / alpha0)``.

    With a dipole moment ``dipole`` (esu cm) and the drive-equivalence
    assumption, the dc field is ``E_d = hbar E / d`` in esu. ``kappa`` and
    ``omega0`` are then absolute: rad/s, or Hz when ``cyclic`` is true
    (converted with a factor ``2 pi`` before using ``hbar``).
    """
    if not kappa > 0:
        raise ValueError("kappa must be > 0")
    if omega0 is None and alpha0 is None:
        raise ValueError("need omega0 or alpha0")
    efield = None
    efield_dc = None
    assume = False
    if omega0 is not None:
        if not omega0 > 0:
            raise ValueError("omega0 must be > 0")
        efield = math.sqrt(kappa * omega0 / 2.0)
    if alpha0 is not None:
        if not alpha0 > 0:
            raise ValueError("alpha0 must be > 0")
        efield_dc = math.sqrt(kappa / alpha0)
    elif dipole is not None:
        if efield is None:
            raise ValueError("dipole conversion needs omega0")
        if not dipole > 0:
            raise ValueError("dipole must be > 0")
        angular = efield * (2.0 * math.pi if cyclic else 1.0)
        efield_dc = HBAR_CGS * angular / dipole
        assume = True
    return SignificanceEstimate(kappa, omega0, efield, efield_dc, assume)
