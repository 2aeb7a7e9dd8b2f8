"""Two contact-interacting atoms in an isotropic harmonic trap (l = 0 relative motion).

The relative energy eps = E / hbar omega solves

    a/a_ho = 1/2 tan(pi eps/2 + pi/4) Gamma(eps/2 + 1/4) / Gamma(eps/2 + 3/4)

which by the reflection formula equals 1/2 Gamma(1/4 - eps/2) / Gamma(3/4 - eps/2).
The reflected form is what we evaluate (log-Gamma with signs); it is
increasing in eps between consecutive poles at eps = 1/2 + 2n, so each
branch is a bracket:

    branch 0 (bound, a > 0 only): eps in (-inf, 1/2)
    branch n >= 1:                eps in (2n - 3/2, 2n + 1/2)

At exact unitarity (1/a = 0) a branch n >= 1 sits at its lower end, the
a -> -inf limit; branch 0 sits at 1/2.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import digamma, gammaln, gammasgn

from .lattice import LatticeConfig

NONINTERACTING_EPS = 1.5

# Published 6D-CI values of the energy-dependence error Delta U, keyed by
# (V0/E_r, a_sc/a_ho).  Documentation only: reproducing them needs the full
# molecular-potential ground-state energy.
REFERENCE_DELTA_U = {
    (11.5, -0.08): -0.0058,
    (11.5, -2.01): -0.015,
    (25.2, -2.44): -0.018,
    (64.7, -3.09): -0.022,
}


class BuschPoleError(ValueError):
    """Energy sits on a pole of the right-hand side (unitarity)."""


class BuschRootError(RuntimeError):
    """No root inside the branch bracket; signals a special-function problem."""


def _log_ratio(eps):
    z1 = 0.25 - 0.5 * np.asarray(eps, float)
    z2 = z1 + 0.5
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        return gammasgn(z1) * gammasgn(z2), gammaln(z1) - gammaln(z2)


def busch_rhs(eps):
    """Right-hand side a/a_ho as a function of eps (reflected, pole-free where finite)."""
    sgn, lr = _log_ratio(eps)
    with np.errstate(over="ignore", invalid="ignore"):
        out = 0.5 * sgn * np.exp(lr)
    return out if np.ndim(eps) else float(out)


def busch_rhs_tan(eps):
    """The same right-hand side in its tangent form; used as an independent cross-check."""
    eps = np.asarray(eps, float)
    z1, z2 = 0.5 * eps + 0.25, 0.5 * eps + 0.75
    ratio = gammasgn(z1) * gammasgn(z2) * np.exp(gammaln(z1) - gammaln(z2))
    out = 0.5 * np.tan(0.5 * math.pi * eps + 0.25 * math.pi) * ratio
    return out if np.ndim(eps) else float(out)


def inverse_rhs(eps):
    """a_ho / a as a function of eps; finite everywhere, zero at unitarity."""
    sgn, lr = _log_ratio(eps)
    with np.errstate(over="ignore", invalid="ignore"):
        out = 2.0 * sgn * np.exp(-lr)
    return out if np.ndim(eps) else float(out)


def _dlog_rhs(eps):
    return 0.5 * (digamma(0.75 - 0.5 * eps) - digamma(0.25 - 0.5 * eps))


def branch_bracket(branch: int) -> tuple[float, float]:
    if branch < 0:
        raise ValueError("branch index must be >= 0")
    if branch == 0:
        return -math.inf, 0.5
    return 2.0 * branch - 1.5, 2.0 * branch + 0.5


def branch_of(eps: float) -> int:
    if eps < 0.5:
        return 0
    return int(math.floor((eps + 1.5) / 2.0))


def busch_energy(a_ratio: float, branch: int = 1) -> float:
    """Relative-motion energy eps on ``branch`` for scattering length a_ratio = a/a_ho."""
    if math.isnan(a_ratio):
        raise ValueError("a_ratio is NaN")
    lo, hi = branch_bracket(branch)
    if branch == 0:
        if a_ratio <= 0:
            raise ValueError("the bound branch exists only for a_ratio > 0")
        if math.isinf(a_ratio):
            return 0.5
        # deep dimer: eps ~ -1/(2 a^2); widen until the bracket holds the root
        lo = min(-1.0, -1.0 / a_ratio**2 - 1.0)
        while busch_rhs(lo) >= a_ratio:
            lo *= 2.0
    else:
        if a_ratio == 0:
            return hi - 1.0  # 2n - 1/2
        if math.isinf(a_ratio):
            return lo if a_ratio < 0 else hi

    target = math.atan(a_ratio)

    def g(e):
        return math.atan(busch_rhs(e)) - target

    # atan(rhs) is continuous and increasing on the open bracket
    span = hi - lo
    a_end, b_end = lo + 1e-15 * span, hi - 1e-15 * max(1.0, abs(hi))
    ga, gb = g(a_end), g(b_end)
    if not (ga <= 0 <= gb):
        raise BuschRootError(f"no root for a_ratio={a_ratio} on branch {branch} in ({lo}, {hi})")
    eps = brentq(g, a_end, b_end, xtol=1e-15, rtol=8.9e-16, maxiter=500)

    # one Newton polish on the better-conditioned residual
    f = busch_rhs(eps)
    if abs(a_ratio) <= 1.0:
        step = (f - a_ratio) / (f * _dlog_rhs(eps)) if f != 0 else 0.0
    else:
        inv = 1.0 / f
        step = (inv - 1.0 / a_ratio) / (-inv * _dlog_rhs(eps))
    cand = eps - step
    if lo < cand < hi and _residual(cand, a_ratio) <= _residual(eps, a_ratio):
        eps = cand
    return float(eps)


def _residual(eps: float, a_ratio: float) -> float:
    if abs(a_ratio) > 1.0:
        return abs(inverse_rhs(eps) - 1.0 / a_ratio) * abs(a_ratio)
    return abs(busch_rhs(eps) - a_ratio)


def busch_residual(eps: float, a_ratio: float) -> float:
    """Residual of the implicit equation, relative for |a_ratio| > 1."""
    return _residual(eps, a_ratio)


def busch_energy_inv(inv_a_ratio: float, branch: int = 1) -> float:
    """Same as :func:`busch_energy` but parameterized by a_ho / a (0 = unitarity)."""
    if inv_a_ratio == 0:
        if branch == 0:
            return 0.5
        return branch_bracket(branch)[0]
    return busch_energy(1.0 / inv_a_ratio, branch)


def delta_e_harm(a_ratio: float, branch: int = 1) -> float:
    """Interaction offset eps - 3/2 (in hbar omega) on branch 0 or 1."""
    if branch not in (0, 1):
        raise ValueError("harmonic offsets are defined for branches 0 and 1")
    return busch_energy(a_ratio, branch) - NONINTERACTING_EPS


def _near_pole(eps: float) -> bool:
    return eps > 0 and abs(math.cos(0.5 * math.pi * eps + 0.25 * math.pi)) < 1e-12


def busch_inverse(eps: float) -> float:
    """The a/a_ho that produces relative energy ``eps``."""
    if _near_pole(eps):
        raise BuschPoleError(f"eps={eps} is at unitarity; use busch_inverse_reciprocal")
    return busch_rhs(eps)


def busch_inverse_reciprocal(eps: float) -> float:
    """a_ho/a for relative energy ``eps``; 0 at unitarity."""
    if _near_pole(eps):
        return 0.0
    return inverse_rhs(eps)


def optimal_scattering_length(energy: float, cfg: LatticeConfig) -> float:
    """Scattering length (lattice units) reproducing a relative-motion energy (lattice units)."""
    return busch_inverse(energy / cfg.hbar_omega) * cfg.a_ho


def u_harm(cfg: LatticeConfig, a_sc: float, branch: int = 1) -> float:
    """Harmonic-trap interaction offset (lattice units) for a_sc in lattice units."""
    return cfg.hbar_omega * delta_e_harm(cfg.a_ratio(a_sc), branch)


def delta_u(a_sc: float, a_opt: float, cfg: LatticeConfig) -> float:
    """Relative error of U_harm when a_sc is used in place of the optimal a_opt."""
    ref = u_harm(cfg, a_opt, 1)
    if ref == 0:
        raise ZeroDivisionError("U_harm(a_opt) vanishes; relative error undefined")
    return (u_harm(cfg, a_sc, 1) - ref) / ref
