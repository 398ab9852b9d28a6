"""Exit criteria of the build, one test per criterion (sub-parts split out).

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import time

import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import random_density_matrix
from starkcavity import cli
from starkcavity import effective as ef
from starkcavity.dynamics import SystemParams, compare_tiers, integrate, rhs_averaged
from starkcavity.hilbert import build_space, pure_state
from starkcavity.timeavg import drive_terms, effective_hamiltonian, numeric_average_check, stark_coefficient

E0 = pure_state("e", 0, 1)


def report(name, value, limit, ok):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {value!r} (limit {limit})")


# 1 ---------------------------------------------------------------------------

@pytest.mark.parametrize("g,kappa", [(1.0, 5.0), (0.3, 7.1), (2.5, 0.4), (1e-3, 1e3), (0.77, 1.3e-4)])
def test_criterion_1_resonant_purcell_rate(g, kappa):
    r = ef.rates(g, kappa, 0.0)
    err = abs(r.gamma - g**2 / kappa) / (g**2 / kappa)
    report("resonant rate rel. error", err, "exact", err == 0.0)
    assert r.gamma == g**2 / kappa
    assert r.shift == 0.0


# 2 ---------------------------------------------------------------------------

def test_criterion_2_fig2_eta_sweep():
    t0 = time.perf_counter()
    kappa, w0 = 1.0, 3.4e5 * 1.0
    cfg = cli.RunConfig(command="sweep-eta", kappa=kappa, omega0=w0, fields=(0.0, 300.0, 600.0, 1200.0),
                        dk_min=-40.0, dk_max=40.0, dk_num=801).resolved()
    rows = np.array(cli.sweep_eta_rows(cfg))
    dk, fld, de, eta = rows.T
    delta = dk * kappa

    # (a) no field, no change
    assert np.all(eta[fld == 0] == 1.0)
    on = fld > 0
    # (b) red-detuned cavity (delta > 0): always inhibition
    assert np.all(eta[on & (delta > 0)] < 1)
    # (c) enhancement exactly where |delta_e| < |delta|
    mask = on & (np.abs(de**2 - delta**2) > 1e-9)
    assert np.array_equal(eta[mask] > 1, de[mask] ** 2 < delta[mask] ** 2)
    assert np.any(eta[on] > 1)

    worst = 0.0
    for e in (300.0, 600.0, 1200.0):
        stark = ef.DriveStark(e, 0.0, w0)
        s = stark.shift()
        root = brentq(lambda d: ef.eta(kappa, d, ef.effective_detuning(d, stark)) - 1.0,
                      -s, -1e-3 * s, xtol=1e-300, rtol=4 * np.finfo(float).eps)
        rel = abs(root - ef.crossing_detuning(s)) / (s / 2)
        worst = max(worst, rel)
    elapsed = time.perf_counter() - t0
    report("eta=1 crossing rel. error", worst, 1e-12, worst <= 1e-12)
    assert worst <= 1e-12
    assert elapsed < 1.0


# 3 ---------------------------------------------------------------------------

def test_criterion_3_fig1_monotone_inhibition():
    t0 = time.perf_counter()
    g, kappa = 1.0, 5.0
    p = SystemParams(g=g, kappa=kappa, delta=0.0)
    alpha0 = kappa  # frequency per unit field^2
    curves = []
    for e_dc in (0.0, 0.5, 1.0, 1.5, 2.0):
        de = ef.effective_detuning(0.0, ef.PolarizabilityStark(alpha0, e_dc))
        curves.append(integrate(E0, "averaged", p, 2 * kappa / g**2, 1e-3, 5, delta_e=de).rho_ee)
    worst = min(float(np.min(hi - lo)) for lo, hi in zip(curves, curves[1:]))
    elapsed = time.perf_counter() - t0
    report("min ordered gap", worst, ">= -1e-6", worst >= -1e-6)
    assert worst >= -1e-6
    assert curves[-1][-1] > curves[0][-1] + 0.1  # visibly inhibited
    assert elapsed < 10.0


# 4 ---------------------------------------------------------------------------

def test_criterion_4_integrator_vs_oracle():
    t0 = time.perf_counter()
    g = 1.0
    worst = 0.0
    for kappa in (0.5, 1.0, 5.0):
        p = SystemParams(g=g, kappa=kappa)
        for ratio in (0.0, 1.0, 5.0):
            de = ratio * kappa
            tr = integrate(E0, "averaged", p, 10.0 / g, 1e-3 / g, 10, delta_e=de)
            err = np.max(np.abs(tr.rho_ee - ef.damped_rabi_oracle(g, kappa, de, tr.times)))
            worst = max(worst, err)
    elapsed = time.perf_counter() - t0
    report("max |integrator - oracle|", worst, 1e-8, worst < 1e-8)
    assert worst < 1e-8
    assert elapsed < 30.0


# 5 ---------------------------------------------------------------------------

def _bad_cavity_error(kappa, g=1.0):
    p = SystemParams(g=g, kappa=kappa)
    tr = integrate(E0, "averaged", p, 3 * kappa / g**2, 1e-3 / g, 10, delta_e=0.0)
    return float(np.max(np.abs(tr.rho_ee - np.exp(-2 * g**2 * tr.times / kappa))))


def test_criterion_5a_bad_cavity_limit():
    err = _bad_cavity_error(5.0)
    report("kappa=5g max |rho_ee - exp(-2g^2t/kappa)|", err, 0.05, err < 0.05)
    assert err < 0.05


def test_criterion_5b_bad_cavity_convergence():
    t0 = time.perf_counter()
    e5, e20 = _bad_cavity_error(5.0), _bad_cavity_error(20.0)
    elapsed = time.perf_counter() - t0
    report("error ratio kappa=5g / kappa=20g", e5 / e20, ">= 10", e5 / e20 >= 10)
    assert e5 / e20 >= 10
    assert elapsed < 30.0


# 6 ---------------------------------------------------------------------------

def _full_vs_averaged(omega0):
    p = SystemParams(g=1.0, kappa=1.0, delta=0.0, efield=2.0, omega_drive=0.0, omega0=omega0)
    t_max = 5.0
    dt = t_max / int(np.ceil(t_max / p.max_full_dt()))
    c = compare_tiers(p, t_max, dt, 10)
    assert c.averaged.delta_e == pytest.approx(2 * 2.0**2 / omega0, rel=1e-15)
    return c.max_full_vs_averaged


def test_criterion_6_stark_shift_emergence():
    t0 = time.perf_counter()
    d200 = _full_vs_averaged(200.0)
    d400 = _full_vs_averaged(400.0)
    elapsed = time.perf_counter() - t0
    report("FULL vs AVERAGED at omega0=200g", d200, 0.02, d200 < 0.02)
    report("deviation shrinks at omega0=400g", d400, f"< {d200!r}", d400 < d200)
    assert d200 < 0.02
    assert d400 < d200
    assert elapsed < 300.0


# 7 ---------------------------------------------------------------------------

def test_criterion_7_appendix_oracle():
    ops = build_space(1)
    e, w0 = 2.0, 200.0
    terms = drive_terms(ops.s_plus, e, w0, 0.0)
    h = effective_hamiltonian(terms, 0.0)
    shift = stark_coefficient(h, ops.s_z)
    expected = ef.DriveStark(e, 0.0, w0).shift()
    rel = abs(shift - expected) / expected
    num = numeric_average_check(terms, 100, 200)
    rel_num = np.max(np.abs(num - h)) / np.max(np.abs(h))
    report("analytic shift rel. error", rel, 1e-12, rel <= 1e-12)
    report("numeric average rel. error", rel_num, 1e-4, rel_num <= 1e-4)
    assert rel <= 1e-12
    assert rel_num <= 1e-4


# 8 ---------------------------------------------------------------------------

def _estimate(argv, capsys):
    assert cli.main(["estimate"] + argv) == 0
    out = capsys.readouterr().out
    return {k.strip(): v.split("#")[0].strip() for k, v in
            (ln.split(" = ", 1) for ln in out.splitlines() if " = " in ln and not ln.startswith("#"))}


def test_criterion_8a_na_rydberg_drive(capsys):
    vals = _estimate(["--kappa", "1e6", "--omega0", "3.4e11", "--unit", "hz"], capsys)
    efield = float(vals["efield"])
    rel = abs(efield - 4.1e8) / 4.1e8
    report("required drive amplitude (Hz)", efield, "4.1e8 +/- 5%", rel <= 0.05)
    assert rel <= 0.05


def test_criterion_8b_na_rydberg_dc_field(capsys):
    vals = _estimate(["--kappa", "1e6", "--omega0", "3.4e11", "--dipole", "1e-15", "--unit", "hz"], capsys)
    e_dc = float(vals["efield_dc"])
    ok = 0.3e-2 <= e_dc <= 3e-2
    report("required dc field (esu)", e_dc, "[0.3e-2, 3e-2]", ok)
    assert ok


# 9 ---------------------------------------------------------------------------

def _spectral_radius(p, delta_e, dim):
    cols = []
    for k in range(dim * dim):
        basis = np.zeros(dim * dim, dtype=complex)
        basis[k] = 1.0
        cols.append(rhs_averaged(basis.reshape(dim, dim), p, delta_e).ravel())
    return float(np.max(np.abs(np.linalg.eigvals(np.array(cols).T))))


def _random_case(rng, i):
    g = rng.uniform(0.3, 2.0)
    kappa = rng.uniform(0.0, 4.0)
    n_max = int(rng.integers(1, 4))
    dim = 2 * (n_max + 1)
    rho0 = random_density_matrix(rng, dim, rank=int(rng.integers(1, dim + 1)))
    if i % 5 == 4:
        w0 = rng.uniform(30.0, 80.0)
        p = SystemParams(g=g, kappa=kappa, delta=rng.uniform(-2, 2), efield=rng.uniform(0, 3),
                         omega_drive=rng.uniform(0, 0.3) * w0, omega0=w0, n_max=n_max)
        h0 = p.max_full_dt()
        return rho0, "full", p, None, h0, 200 * h0
    de = rng.uniform(-5.0, 5.0)
    p = SystemParams(g=g, kappa=kappa, n_max=n_max)
    h0 = 0.75 / _spectral_radius(p, de, dim)
    return rho0, "averaged", p, de, h0, 40 * h0


def test_criterion_9_numerical_hygiene():
    rng = np.random.default_rng(20261015)
    worst = {"trace": 0.0, "herm": 0.0, "eig": np.inf, "slope_lo": np.inf, "slope_hi": -np.inf}
    for i in range(50):
        rho0, tier, p, de, h0, t_max = _random_case(rng, i)
        tr = integrate(rho0, tier, p, t_max, h0 / 4, 5, delta_e=de)
        worst["trace"] = max(worst["trace"], tr.max_trace_drift)
        worst["herm"] = max(worst["herm"], float(tr.hermiticity.max()))
        worst["eig"] = min(worst["eig"], float(tr.min_eigenvalue.min()))

        # refinement study: successive halvings of the step, final-state change
        finals = [
            integrate(rho0, tier, p, t_max, h0 / 2**k, 10**9, delta_e=de, check_positivity=False).final_state
            for k in range(4)
        ]
        diffs = [np.linalg.norm(finals[k] - finals[k + 1]) for k in range(3)]
        slope = np.polyfit(np.log([h0, h0 / 2, h0 / 4]), np.log(diffs), 1)[0]
        worst["slope_lo"] = min(worst["slope_lo"], slope)
        worst["slope_hi"] = max(worst["slope_hi"], slope)

    report("max |trace - 1|", worst["trace"], 1e-8, worst["trace"] < 1e-8)
    report("max Hermiticity error", worst["herm"], 1e-10, worst["herm"] < 1e-10)
    report("min eigenvalue", worst["eig"], -1e-7, worst["eig"] > -1e-7)
    report("RK4 slope range", (worst["slope_lo"], worst["slope_hi"]), "4 +/- 0.5",
           3.5 <= worst["slope_lo"] and worst["slope_hi"] <= 4.5)
    assert worst["trace"] < 1e-8
    assert worst["herm"] < 1e-10
    assert worst["eig"] > -1e-7
    assert 3.5 <= worst["slope_lo"] and worst["slope_hi"] <= 4.5
