"""Acceptance criteria, one PASS/FAIL line each (see the terminal summary)."""

import math
import shutil
import time

import numpy as np
import pytest

from hubfit import busch
from hubfit.bands import mean_band_energy
from hubfit.bhmodel import bh_spectrum, build_h_bh, build_h_ebh
from hubfit.bhparams import BhParams, EbhParams, correction_factor, hopping_J, onsite_eps, u_bh
from hubfit.cli import SUBCOMMANDS, run
from hubfit.fit import two_step_fit
from hubfit.lattice import LatticeConfig, convert_depth
from hubfit.oracle1d import Grid1D, extract_u_opt_1d, u_bh_1d, u_sext_1d
from hubfit.wannier import INFINITE, THREE_HALVES_PI, TWO_PI

pytestmark = pytest.mark.acceptance


def hw(v):
    return LatticeConfig.from_depth(v, "hbar_omega")


def rel(a, b):
    return abs(a - b) / abs(b)


def test_band_offset(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for v in (20.0, 40.0, 80.0):
        cfg = LatticeConfig.from_depth(v, "Er")
        law = 0.5 * cfg.hbar_omega - 0.25 * cfg.E_r
        worst = max(worst, abs(mean_band_energy(cfg, 0) - law) / cfg.E_r)
    dt = time.perf_counter() - t0
    criterion(1, "band offset", worst <= 0.05 and dt < 5, f"max deviation {worst:.4f} E_r (tol 0.05)", dt)


def test_unit_identity(criterion):
    v = convert_depth(1.7, "hbar_omega", "Er")
    ok = v == pytest.approx(11.56, abs=1e-12) and abs(v - 11.5) <= 0.1
    criterion(2, "unit identity", ok, f"1.7 hbar*omega = {v:.4f} E_r (table value 11.5)")


def test_busch_solver(criterion):
    t0 = time.perf_counter()
    e0 = busch.busch_energy(0.0, 1)
    eu1, eu2 = busch.busch_energy_inv(0.0, 1), busch.busch_energy_inv(0.0, 2)
    h = 1e-6
    slope = (busch.busch_energy(h) - busch.busch_energy(-h)) / (2 * h)
    a = 0.05
    dimer = busch.busch_energy(a, 0)
    checks = {
        "eps(a=0)": abs(e0 - 1.5) <= 1e-10,
        "unitarity": abs(eu1 - 0.5) <= 1e-8 and abs(eu2 - 2.5) <= 1e-8,
        "slope": rel(slope, 2 / math.sqrt(math.pi)) <= 1e-4,
        "dimer": rel(dimer, -0.5 / a**2) <= 0.02,
    }
    dt = time.perf_counter() - t0
    detail = (f"eps(0)-1.5={e0 - 1.5:.1e}, unitarity {eu1:.10f}/{eu2:.10f}, "
              f"slope rel err {rel(slope, 2 / math.sqrt(math.pi)):.1e}, dimer rel err {rel(dimer, -0.5 / a**2):.3f}")
    criterion(3, "Busch solver", all(checks.values()) and dt < 1, detail, dt)


def test_correction_factor_identity(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    h = 1e-6
    d_eps = (busch.busch_energy(h) - busch.busch_energy(-h)) / (2 * h)
    for v in (1.0, 1.7, 3.0):
        cfg = hw(v)
        for b in (THREE_HALVES_PI, TWO_PI):
            d_harm = cfg.hbar_omega * d_eps / cfg.a_ho
            d_bh = u_bh(cfg, b, 1.0)
            worst = max(worst, abs(correction_factor(cfg, b) * d_harm - d_bh) / d_bh)
    dt = time.perf_counter() - t0
    criterion(4, "correction-factor identity", worst <= 1e-6 and dt < 10, f"max rel mismatch {worst:.1e}", dt)


def test_correction_factor_shape(criterion):
    t0 = time.perf_counter()
    grid = np.linspace(1.0, 6.0, 21)
    A = np.array([correction_factor(hw(v)) for v in grid])
    decreasing = bool(np.all(np.diff(A) < 0))
    above_one = bool(np.all(A > 1))
    approach = (A[-1] - 1) < (A[0] - 1)
    dt = time.perf_counter() - t0
    detail = (f"A(1)={A[0]:.4f}, A(6)={A[-1]:.4f}; decreasing={decreasing}, all>1={above_one}, "
              f"A(6)-1<A(1)-1={approach}")
    criterion(5, "correction-factor shape", decreasing and above_one and approach and dt < 10, detail, dt)


def test_bh_diagonalizer(criterion):
    J, e0 = 0.13, 0.7
    r = math.sqrt(2) * J
    free = np.asarray(bh_spectrum(BhParams(J, 0.0, e0, e0)))
    err_free = np.max(np.abs(free - (np.array([-2 * r, -r, 0, 0, r, 2 * r]) + 2 * e0)))
    p = BhParams(0.11, -0.37, 0.8, 0.83)
    same = np.array_equal(build_h_ebh(EbhParams(p)), build_h_bh(p))
    c = 0.25
    shifted = np.asarray(bh_spectrum(BhParams(p.J, p.U, p.eps0 + c, p.eps1 + c))) - np.asarray(bh_spectrum(p))
    err_shift = np.max(np.abs(shifted - 2 * c))
    ok = err_free <= 1e-10 and same and err_shift <= 1e-12
    criterion(6, "BH diagonalizer", ok, f"free spectrum err {err_free:.1e}, EBH==BH {same}, shift err {err_shift:.1e}")


def test_fit_round_trip(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240101)
    hbar_omega = 1.0
    worst = 0.0
    for _ in range(100):
        four_j = rng.uniform(0.0, 1.0) * hbar_omega
        if four_j == 0.0:
            continue
        J = four_j / 4
        U = rng.uniform(-four_j, four_j)
        delta = rng.uniform(-J, J)
        eps0 = rng.uniform(0.5, 2.0) * hbar_omega
        p0 = BhParams(J, 0.0, eps0, eps0 + delta)
        _, step2 = two_step_fit(bh_spectrum(p0).energies, bh_spectrum(p0.with_U(U, "BH")).energies)
        q = step2.params
        worst = max(worst, rel(q.J, J), rel(q.eps0, eps0), rel(q.eps1, eps0 + delta), rel(q.U, U))
    dt = time.perf_counter() - t0
    criterion(7, "fit round trip", worst <= 1e-6 and dt < 30, f"100 draws, worst rel err {worst:.1e}", dt)


def test_oracle_weak_coupling(criterion):
    t0 = time.perf_counter()
    cfg = hw(2.0)
    g = -0.05
    u_opt = extract_u_opt_1d(cfg, Grid1D(), g).params.U
    u_w = u_bh_1d(cfg, g)
    err = abs(u_opt - u_w) / abs(u_opt)
    dt = time.perf_counter() - t0
    criterion(8, "oracle weak coupling", err <= 0.05 and dt < 120,
              f"U_opt_1d={u_opt:.6g}, g*int w0^4={u_w:.6g}, rel diff {err:.4f}", dt)


def test_oracle_strong_attraction(criterion):
    t0 = time.perf_counter()
    cfg = hw(2.0)
    gs = [-0.25, -0.5, -1.0, -1.5, -2.0]
    u_opt = np.array([extract_u_opt_1d(cfg, Grid1D(), g).params.U for g in gs])
    u_w = np.array([u_bh_1d(cfg, g) for g in gs])
    gap = np.abs(u_w) - np.abs(u_opt)
    ordering = bool(np.all(gap >= 0))
    growing = bool(np.all(np.diff(gap) > 0))
    sext = []
    for v in (2.0, 3.0):
        c = hw(v)
        u = extract_u_opt_1d(c, Grid1D(), -1.0).params.U
        sext.append(rel(u_sext_1d(c, Grid1D(), -1.0), u))
    tracks = max(sext) <= 0.05
    dt = time.perf_counter() - t0
    detail = (f"|U_BH_1d|-|U_opt_1d| over g={gs}: {np.array2string(gap, precision=4)}; "
              f"ordering={ordering}, growing={growing}; u_sext rel diff {max(sext):.4f}")
    criterion(9, "oracle strong attraction", ordering and growing and tracks and dt < 300, detail, dt)


def _boundary_spread(v):
    cfg = hw(v)
    spreads = {}
    for name, fn in (("eps0", lambda b: onsite_eps(cfg, b, 0)), ("eps1", lambda b: onsite_eps(cfg, b, 1)),
                     ("J", lambda b: hopping_J(cfg, b))):
        vals = np.array([fn(b) for b in (THREE_HALVES_PI, TWO_PI, INFINITE)])
        spreads[name] = float(np.ptp(vals) / np.min(np.abs(vals)))
    return spreads


def test_boundary_sensitivity(criterion):
    t0 = time.perf_counter()
    deep = {v: _boundary_spread(v) for v in (1.5, 2.0, 3.0)}
    shallow = {v: _boundary_spread(v) for v in (0.5, 0.7)}
    agree = all(s <= 0.01 for d in deep.values() for s in d.values())
    diverge = all(max(d.values()) > 0.05 for d in shallow.values())
    dt = time.perf_counter() - t0
    per_q = {k: max(d[k] for d in deep.values()) for k in ("eps0", "eps1", "J")}
    detail = ("max spread for V0 >= 1.5 hbar*omega (tol 0.01): "
              + ", ".join(f"{k} {v:.4f}" for k, v in per_q.items())
              + "; shallow max spreads (need > 0.05): "
              + ", ".join(f"{v}: {max(d.values()):.3g}" for v, d in shallow.items()))
    criterion(10, "boundary sensitivity", agree and diverge and dt < 60, detail, dt)


CONFIG = """\
depth = 1.7
depth_unit = hbar_omega
a_over_aho = -0.5
g1d = 0, -0.5
axis = V0
grid = 1.0, 1.7, 2.5
quantities = J, A, U_BH, U_harm, U_corr
reference = oracle.csv
"""


def test_cli_determinism(criterion, tmp_path):
    t0 = time.perf_counter()
    (tmp_path / "run.cfg").write_text(CONFIG)
    cfg = str(tmp_path / "run.cfg")
    mismatched = []
    # fit reads the oracle table next to the config, so oracle runs first
    order = ["oracle"] + [s for s in SUBCOMMANDS if s != "oracle"]
    for sub in order:
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / f"{sub}_{tag}"
            code = run([sub, "--config", cfg, "--out", str(out)])
            if code != 0:
                mismatched.append(f"{sub} exit {code}")
            outs.append(out)
        if sub == "oracle":
            shutil.copy(outs[0] / "oracle.csv", tmp_path / "oracle.csv")
        names = sorted(p.name for p in outs[0].iterdir())
        if names != sorted(p.name for p in outs[1].iterdir()):
            mismatched.append(sub)
            continue
        mismatched += [f"{sub}/{n}" for n in names if (outs[0] / n).read_bytes() != (outs[1] / n).read_bytes()]
    dt = time.perf_counter() - t0
    criterion(11, "CLI determinism", not mismatched,
              f"{len(order)} subcommands rerun; mismatches: {mismatched or 'none'}", dt)
