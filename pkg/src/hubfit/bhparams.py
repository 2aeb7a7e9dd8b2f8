"""Bose-Hubbard and extended Bose-Hubbard parameters from Wannier functions.

All integrals are 1D along the lattice axis; the transverse directions are
harmonic ground states, whose quartic integrals enter analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import busch
from .lattice import LatticeConfig, PotentialKind, eval_potential
from .wannier import (
    THREE_HALVES_PI,
    BoundaryChoice,
    WannierFunction,
    build_wannier,
    quartic_integral,
    transverse_quartic_norm,
)

PROVENANCES = ("BH", "harm", "corr", "opt")
KINETIC_RTOL = 1e-7


class QuadratureError(ArithmeticError):
    """Matrix element not converged on the Wannier grid."""


@dataclass(frozen=True)
class BhParams:
    J: float
    U: float
    eps0: float
    eps1: float
    provenance: str = "BH"
    boundary: str = ""

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")

    @property
    def delta(self) -> float:
        return self.eps1 - self.eps0

    def with_U(self, U: float, provenance: str) -> "BhParams":
        return replace(self, U=U, provenance=provenance)


@dataclass(frozen=True)
class EbhParams:
    base: BhParams
    J2: float = 0.0
    U1: float = 0.0
    U2: float = 0.0


def _matrix_element(wi: WannierFunction, wj: WannierFunction, cfg: LatticeConfig, confinement: bool,
                    stride: int = 1) -> float:
    # kinetic part by parts: (1/2) int wi' wj'; periodic boundary terms cancel
    sl = slice(None, None, stride)
    x = wi.x[sl]
    w = wi.weights if stride == 1 else _coarse_weights(wi, stride)
    integrand = 0.5 * wi.derivative[sl] * wj.derivative[sl]
    kind = PotentialKind.TAYLOR22_TRIPLE_WELL if confinement else PotentialKind.SINUSOIDAL_OL
    integrand = integrand + eval_potential(kind, cfg, x) * wi.values[sl] * wj.values[sl]
    return float(np.dot(w, integrand))


def _coarse_weights(w: WannierFunction, stride: int) -> np.ndarray:
    from .wannier import simpson_weights

    x = w.x[::stride]
    return simpson_weights(x.size, x[1] - x[0])


def _checked_element(wi, wj, cfg, confinement: bool) -> float:
    fine = _matrix_element(wi, wj, cfg, confinement)
    if (wi.x.size - 1) % 4 == 0:
        coarse = _matrix_element(wi, wj, cfg, confinement, stride=2)
        scale = max(abs(fine), 1e-6 * cfg.hbar_omega, 1e-12)
        if abs(fine - coarse) > KINETIC_RTOL * scale + 1e-13:
            raise QuadratureError(
                f"matrix element not converged on {wi.x.size} points: {fine!r} vs {coarse!r} on half grid")
    return fine


def wannier_triplet(cfg: LatticeConfig, boundary: BoundaryChoice = THREE_HALVES_PI):
    return {s: build_wannier(cfg, boundary, s) for s in (-1, 0, 1)}


def hopping_J(cfg: LatticeConfig, boundary: BoundaryChoice = THREE_HALVES_PI) -> float:
    """J = -<w0| p^2/2m + V_OL |w1>."""
    w = wannier_triplet(cfg, boundary)
    return -_checked_element(w[0], w[1], cfg, confinement=False)


def next_hopping_J2(cfg: LatticeConfig, boundary: BoundaryChoice = THREE_HALVES_PI) -> float:
    """J2 = <w_-1| p^2/2m + V_OL |w_1>.

    On the 3-cell torus sites -1 and +1 are neighbours through the boundary,
    so J2 is only physically meaningful for the 4-cell or infinite boundaries.
    """
    w = wannier_triplet(cfg, boundary)
    return _checked_element(w[-1], w[1], cfg, confinement=False)


def onsite_eps(cfg: LatticeConfig, boundary: BoundaryChoice = THREE_HALVES_PI, site: int = 0) -> float:
    """eps_i = <w_i| p^2/2m + V_OL + V_conf |w_i>."""
    w = build_wannier(cfg, boundary, site)
    return _checked_element(w, w, cfg, confinement=True)


def onsite_shift(cfg: LatticeConfig, boundary: BoundaryChoice = THREE_HALVES_PI, site: int = 0) -> float:
    """delta eps_i = eps_i - <w0| p^2/2m + V_OL |w0> (confinement lift of site i)."""
    w = wannier_triplet(cfg, boundary)
    return onsite_eps(cfg, boundary, site) - _checked_element(w[0], w[0], cfg, confinement=False)


def _contact_prefactor(cfg: LatticeConfig, a_sc: float) -> float:
    # 4 pi hbar^2 a / m times the two transverse Gaussian quartic factors
    return 4.0 * math.pi * a_sc * transverse_quartic_norm(cfg) ** 2


def u_bh(cfg: LatticeConfig, boundary: BoundaryChoice = THREE_HALVES_PI, a_sc: float = 0.0) -> float:
    """Wannier-basis onsite interaction for scattering length a_sc (lattice units)."""
    return _contact_prefactor(cfg, a_sc) * quartic_integral(build_wannier(cfg, boundary, 0))


def ebh_parameters(cfg: LatticeConfig, boundary: BoundaryChoice = THREE_HALVES_PI, a_sc: float = 0.0,
                   base: BhParams | None = None) -> EbhParams:
    w = wannier_triplet(cfg, boundary)
    pref = _contact_prefactor(cfg, a_sc)
    u1 = pref * w[0].integrate(w[0].values ** 3 * w[1].values)
    u2 = pref * w[0].integrate(w[0].values ** 2 * w[1].values ** 2)
    if base is None:
        base = bh_parameters(cfg, boundary, a_sc)
    return EbhParams(base, next_hopping_J2(cfg, boundary), u1, u2)


def correction_factor(cfg: LatticeConfig, boundary: BoundaryChoice = THREE_HALVES_PI) -> float:
    """Ratio of the small-a slopes of U_BH and of the harmonic offset.

    In lattice units this reduces to sqrt(pi) * a_ho * int w0^4 dx.
    """
    slope_bh = _contact_prefactor(cfg, 1.0) * quartic_integral(build_wannier(cfg, boundary, 0))
    slope_harm = cfg.hbar_omega * 2.0 / (math.sqrt(math.pi) * cfg.a_ho)
    return slope_bh / slope_harm


def u_corr(cfg: LatticeConfig, boundary: BoundaryChoice = THREE_HALVES_PI, a_sc: float = 0.0,
           branch: int = 1) -> float:
    """Corrected harmonic interaction A * U_harm on branch 0 (bound) or 1."""
    if branch == 0 and a_sc <= 0:
        raise ValueError("branch 0 (bound pair) needs a_sc > 0")
    return correction_factor(cfg, boundary) * busch.u_harm(cfg, a_sc, branch)


def validity_ratio(u: float, cfg: LatticeConfig) -> float:
    """|U| / V0; the corrected parameter is trustworthy only while this is << 1."""
    return abs(u) / cfg.V0


def bh_parameters(cfg: LatticeConfig, boundary: BoundaryChoice = THREE_HALVES_PI, a_sc: float = 0.0,
                  interaction: str = "BH", branch: int = 1,
                  hopping_boundary: BoundaryChoice | None = None) -> BhParams:
    """Full BH parameter set with U taken from the chosen representation.

    ``hopping_boundary`` lets J come from a different boundary than the onsite
    energies (e.g. onsite from 3pi/2 and J from 2pi).
    """
    J = hopping_J(cfg, hopping_boundary or boundary)
    eps0 = onsite_eps(cfg, boundary, 0)
    eps1 = onsite_eps(cfg, boundary, 1)
    if interaction == "BH":
        U = u_bh(cfg, boundary, a_sc)
    elif interaction == "harm":
        U = busch.u_harm(cfg, a_sc, branch) if a_sc else 0.0
    elif interaction == "corr":
        U = u_corr(cfg, boundary, a_sc, branch) if a_sc else 0.0
    else:
        raise ValueError(f"unknown interaction representation {interaction!r}")
    return BhParams(J, U, eps0, eps1, interaction, str(boundary))
