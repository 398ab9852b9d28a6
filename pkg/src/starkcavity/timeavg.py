"""Second-order time averaging of a rapidly oscillating perturbation.

A perturbation ``V(t) = sum_j M_j exp(i nu_j t)`` with zero mean is replaced
by the static generator ``-i <V(t) int_0^t V(tau) dtau>`` (time average).
Keeping only products whose net frequency ``nu_j + nu_k`` is secular gives::

    H_eff = sum_{|nu_j + nu_k| <= cutoff}  -M_j M_k / nu_k

``dc_cutoff`` decides which beat notes count as secular. For a drive with
sidebands at ``omega0 +/- Omega`` the cross-sideband beats at ``+/-2 Omega``
must be kept (``dc_cutoff >= 2 Omega``) to recover the shift
``2 omega0 E^2 / (omega0^2 - Omega^2)``; with ``dc_cutoff = 0`` they are
dropped. When a beat pair with nonzero net frequency is kept the two
ordered products carry different denominators, so the Hermitian part is
returned (equivalently, the two denominators are averaged).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True, eq=False)
class OscillatingTerm:
    """Operator coefficient ``matrix`` with phase factor ``exp(i frequency t)``."""

    matrix: np.ndarray
    frequency: float

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("term matrix must be square")
        if self.frequency == 0:
            raise ValueError("zero-frequency terms are not rapidly oscillating")
        object.__setattr__(self, "matrix", m)


def _validate(terms, dc_cutoff: float = 0.0, tol: float = 1e-12):
    terms = list(terms)
    if not terms:
        return terms, 0
    dim = terms[0].matrix.shape[0]
    for t in terms:
        if t.matrix.shape != (dim, dim):
            raise ValueError("all term matrices must share one shape")
        if abs(t.frequency) <= dc_cutoff:
            raise ValueError(
                f"term at frequency {t.frequency} is not faster than dc_cutoff={dc_cutoff}"
            )
    # total V(t) must be Hermitian: every (M, nu) needs a partner (M^dag, -nu)
    for t in terms:
        partner = sum(
            (u.matrix for u in terms if abs(u.frequency + t.frequency) <= tol * abs(t.frequency)),
            np.zeros((dim, dim), dtype=complex),
        )
        own = sum(
            (u.matrix for u in terms if abs(u.frequency - t.frequency) <= tol * abs(t.frequency)),
            np.zeros((dim, dim), dtype=complex),
        )
        scale = max(1.0, float(np.max(np.abs(own))))
        if np.max(np.abs(partner - own.conj().T)) > 1e-12 * scale:
            raise ValueError(f"no Hermitian partner for term at frequency {t.frequency}")
    return terms, dim


def effective_hamiltonian(terms, dc_cutoff: float = 0.0) -> np.ndarray:
    """Static effective Hamiltonian of the oscillating perturbation ``terms``."""
    if dc_cutoff < 0:
        raise ValueError("dc_cutoff must be >= 0")
    terms, dim = _validate(terms, dc_cutoff)
    if not terms:
        raise ValueError("need at least one term to fix the dimension")
    h = np.zeros((dim, dim), dtype=complex)
    for tj in terms:
        for tk in terms:
            if abs(tj.frequency + tk.frequency) <= dc_cutoff:
                h -= tj.matrix @ tk.matrix / tk.frequency
    return 0.5 * (h + h.conj().T)


def _fundamental_frequency(freqs, max_denominator: int = 10_000) -> float:
    ref = min(abs(f) for f in freqs)
    ratios = []
    for f in freqs:
        x = abs(f) / ref
        q = Fraction(x).limit_denominator(max_denominator)
        if abs(float(q) - x) > 1e-10 * x:
            raise ValueError("frequencies are incommensurate; no common period")
        ratios.append(q)
    num = 0
    den = 1
    for q in ratios:
        num = math.gcd(num, q.numerator)
        den = den * q.denominator // math.gcd(den, q.denominator)
    return ref * num / den


def numeric_average_check(terms, period_count: int = 100, samples_per_period: int = 200,
                          dim: int | None = None) -> np.ndarray:
    """Brute-force average of ``-i V(t) int_0^t V`` on a time grid.

    The running integral and the window average both use the trapezoid
    rule over ``period_count`` common periods. Only exactly resonant
    products (``nu_j + nu_k = 0``) survive, so the result converges to
    ``effective_hamiltonian(terms, dc_cutoff=0)`` at second order in the
    step.
    """
    terms = list(terms)
    if not terms:
        if dim is None:
            return np.zeros((0, 0), dtype=complex)
        return np.zeros((dim, dim), dtype=complex)
    terms, dim = _validate(terms)
    w = _fundamental_frequency([t.frequency for t in terms])
    period = 2.0 * math.pi / w
    n = int(period_count) * int(samples_per_period)
    times = np.linspace(0.0, period_count * period, n + 1)
    h = times[1] - times[0]

    mats = np.stack([t.matrix for t in terms])
    phases = np.exp(1j * np.outer(times, [t.frequency for t in terms]))  # (n+1, m)
    # cumulative trapezoid of each phase factor
    cum = np.zeros_like(phases)
    cum[1:] = np.cumsum(0.5 * h * (phases[1:] + phases[:-1]), axis=0)

    # V(t) int V = sum_jk M_j M_k p_j(t) c_k(t); average each scalar weight
    weights = phases[:, :, None] * cum[:, None, :]  # (n+1, m, m)
    avg = (0.5 * (weights[0] + weights[-1]) + weights[1:-1].sum(axis=0)) * h / times[-1]
    prod = np.einsum("jab,kbc->jkac", mats, mats)
    return -1j * np.einsum("jk,jkac->ac", avg, prod)


def drive_terms(s_plus: np.ndarray, efield: float, omega0: float, omega_drive: float = 0.0):
    """Sideband decomposition of ``E cos(Omega t)(S+ + S-)`` in the atomic frame."""
    s_plus = np.asarray(s_plus, dtype=complex)
    s_minus = s_plus.conj().T
    half = 0.5 * efield
    terms = []
    for nu in (omega0 + omega_drive, omega0 - omega_drive):
        terms.append(OscillatingTerm(half * s_plus, nu))
        terms.append(OscillatingTerm(half * s_minus, -nu))
    return terms


def stark_coefficient(h_eff: np.ndarray, s_z: np.ndarray) -> float:
    """Coefficient ``c`` in ``h_eff = c * s_z + const`` (least squares on the trace form)."""
    sz = np.asarray(s_z, dtype=complex)
    tz = sz - np.trace(sz) / sz.shape[0] * np.eye(sz.shape[0])
    return float(np.real(np.trace(tz.conj().T @ h_eff) / np.trace(tz.conj().T @ tz)))
