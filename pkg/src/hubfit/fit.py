"""Two-step extraction of optimal BH parameters from a six-level reference spectrum.

Step (i) fits (J, eps0, eps1) with U = 0 to a non-interacting reference;
step (ii) fits U alone with the other three held fixed.  The measure is
f = sum_i ((E_i - E_i^model) / E_i)^2 over ascending-sorted levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize, minimize_scalar

from .bhmodel import bh_spectrum
from .bhparams import BhParams

ZERO_FLOOR = 1e-8  # |E_i| below floor * max|E| counts as zero
XATOL = 1e-10
FATOL = 1e-16
MAX_RESTARTS = 5


class ZeroEnergyError(ValueError):
    """A reference energy is (numerically) zero; shift both spectra by a constant first."""


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class FitReport:
    params: BhParams
    residual: float
    level_errors: tuple
    iterations: int
    converged: bool
    offset: float = 0.0
    levels: tuple = field(default=tuple(range(6)))


def _as_reference(reference) -> np.ndarray:
    ref = np.sort(np.asarray(reference, float).ravel())
    if ref.size != 6:
        raise ValueError(f"reference spectrum needs six energies, got {ref.size}")
    if not np.all(np.isfinite(ref)):
        raise ValueError("reference spectrum contains non-finite values")
    return ref


def _check_floor(ref: np.ndarray):
    scale = max(np.max(np.abs(ref)), 1e-300)
    if np.any(np.abs(ref) < ZERO_FLOOR * scale):
        raise ZeroEnergyError(
            "reference energy at or near zero makes the relative measure undefined; "
            "add a constant offset to both spectra (fit_* functions do this automatically)")


def energy_offset(reference) -> float:
    """Constant added to both spectra when the reference touches zero.

    Chosen so every shifted level is at least the spread-plus-magnitude of the
    original spectrum; a common shift c of all six levels is the same as
    eps_i -> eps_i + c/2, which is undone on the reported parameters.
    """
    ref = _as_reference(reference)
    scale = np.max(np.abs(ref))
    if np.all(np.abs(ref) >= ZERO_FLOOR * max(scale, 1e-300)):
        return 0.0
    return float(2.0 * scale + (ref[-1] - ref[0]) + 1.0)


def _relative_errors(params: BhParams, ref: np.ndarray, levels) -> np.ndarray:
    model = np.asarray(bh_spectrum(params))
    idx = list(levels)
    return (ref[idx] - model[idx]) / ref[idx]


def residual_f(params: BhParams, reference, levels=None) -> float:
    """Sum of squared relative level errors (both spectra sorted ascending)."""
    ref = _as_reference(reference)
    _check_floor(ref)
    r = _relative_errors(params, ref, range(6) if levels is None else levels)
    return float(np.dot(r, r))


def _shift(p: BhParams, c: float) -> BhParams:
    return BhParams(p.J, p.U, p.eps0 + c, p.eps1 + c, p.provenance, p.boundary)


def noninteracting_guess(reference) -> BhParams:
    """Exact inversion of a U = 0 spectrum.

    Single-particle levels e1 <= e2 <= e3 give E1 = 2 e1, E6 = 2 e3 and
    sum(E) = 4 (e1 + e2 + e3); the antisymmetric orbital is always the middle
    level, so eps1 = e2, eps0 = e1 + e3 - e2 and 8 J^2 = (e3 - e1)^2 - Delta^2.
    """
    ref = _as_reference(reference)
    e1, e3 = ref[0] / 2, ref[-1] / 2
    e2 = ref.sum() / 4 - e1 - e3
    eps1, eps0 = e2, e1 + e3 - e2
    J = math.sqrt(max(((e3 - e1) ** 2 - (eps1 - eps0) ** 2) / 8.0, 0.0))
    return BhParams(J, 0.0, eps0, eps1, "opt")


def _report(p, ref, levels, iters, offset, tol, stationary) -> FitReport:
    r = _relative_errors(p, ref, levels)
    res = float(np.dot(r, r))
    out = _shift(p, -offset / 2)
    errs = tuple(float(v) for v in (ref - np.asarray(bh_spectrum(p))) / ref)
    return FitReport(out, res, errs, iters, res <= tol or bool(stationary), offset, tuple(levels))


def fit_noninteracting(reference, initial: BhParams | None = None, tol: float = 1e-20) -> FitReport:
    """Step (i): fit (J, eps0, eps1) at U = 0 with a restarted Nelder-Mead simplex.

    The simplex result is polished by a Gauss-Newton least-squares pass on the
    same relative residual vector (the simplex alone stalls around 1e-8).
    """
    offset = energy_offset(reference)
    ref = _as_reference(reference) + offset
    _check_floor(ref)
    levels = range(6)
    start = initial if initial is not None else noninteracting_guess(ref - offset)
    x = np.array([abs(start.J), start.eps0 + offset / 2, start.eps1 + offset / 2])

    def params(v):
        return BhParams(float(abs(v[0])), 0.0, float(v[1]), float(v[2]), "opt")

    def f(v):
        r = _relative_errors(params(v), ref, levels)
        return float(np.dot(r, r))

    scale = max(abs(x[0]), np.ptp(ref), 1e-12)
    iters = 0
    best = f(x)
    for attempt in range(MAX_RESTARTS + 1):
        step = 0.05 * scale / (attempt + 1)
        simplex = np.vstack([x] + [x + step * e for e in np.eye(3)])
        res = minimize(f, x, method="Nelder-Mead",
                       options={"xatol": XATOL, "fatol": FATOL, "maxiter": 4000, "initial_simplex": simplex})
        iters += int(res.nit)
        improved = res.fun < best * (1 - 1e-12)
        if res.fun <= best:
            x, best = res.x, float(res.fun)
        if best <= tol or not improved:
            break

    ls = least_squares(lambda v: _relative_errors(params(v), ref, levels), x, method="lm",
                       xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if f(ls.x) <= best:
        x = ls.x
    iters += int(ls.nfev)
    p = params(x)
    rep = _report(p, ref, levels, iters, offset, tol, ls.status > 0)
    if not np.isfinite(rep.residual):
        raise FitError("step (i) fit did not converge")
    return rep


def fit_interaction(reference, fixed: BhParams, u0: float | None = None, lowest_three: bool = False,
                    tol: float = 1e-20) -> FitReport:
    """Step (ii): one-dimensional golden-section search over U, J and eps fixed.

    Every sorted eigenvalue is non-decreasing in U, so the measure is unimodal.
    """
    offset = energy_offset(reference)
    ref = _as_reference(reference) + offset
    _check_floor(ref)
    levels = (0, 1, 2) if lowest_three else tuple(range(6))
    base = _shift(BhParams(fixed.J, 0.0, fixed.eps0, fixed.eps1, "opt"), offset / 2)

    def f(u):
        r = _relative_errors(base.with_U(u, "opt"), ref, levels)
        return float(np.dot(r, r))

    if u0 is None:
        # first-order guess: the ground level shifts by roughly U times its double occupancy
        u0 = float(ref[0] - np.asarray(bh_spectrum(base))[0])
    s = max(abs(u0), 4.0 * abs(fixed.J), 1e-6 * float(np.max(np.abs(ref))))
    fa, fb = f(u0 - s), f(u0 + s)
    if fa == fb == f(u0):
        raise FitError("residual is flat in U; cannot bracket a minimum")
    res = minimize_scalar(f, bracket=(u0 - s, u0 + s), method="golden", tol=1e-12)
    u, iters = float(res.x), int(res.nit)

    ls = least_squares(lambda v: _relative_errors(base.with_U(v[0], "opt"), ref, levels), [u],
                       method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if f(ls.x[0]) <= f(u):
        u = float(ls.x[0])
    iters += int(ls.nfev)
    return _report(base.with_U(u, "opt"), ref, levels, iters, offset, tol, ls.status > 0)


def two_step_fit(noninteracting_ref, interacting_ref, initial: BhParams | None = None,
                 u0: float | None = None, lowest_three: bool = False) -> tuple[FitReport, FitReport]:
    step1 = fit_noninteracting(noninteracting_ref, initial)
    step2 = fit_interaction(interacting_ref, step1.params, u0, lowest_three)
    return step1, step2
