"""Two bosons in three wells: BH / extended-BH Hamiltonians and their spectra.

Matrix elements are generated by applying normal-ordered boson operator
strings to occupation tuples (n_-1, n_0, n_+1); nothing is hand-tabulated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .bhparams import BhParams, EbhParams

SITES = (-1, 0, 1)
BASIS = ((0, 0, 2), (0, 1, 1), (1, 0, 1), (0, 2, 0), (1, 1, 0), (2, 0, 0))
NN_PAIRS = ((-1, 0), (0, -1), (0, 1), (1, 0))  # ordered nearest-neighbour pairs
_INDEX = {s: i for i, s in enumerate(SITES)}
_STATE_INDEX = {s: i for i, s in enumerate(BASIS)}


def _apply(ops, state):
    """Apply an operator string (applied right to left) to a Fock tuple.

    ``ops`` is a sequence of ('+', site) / ('-', site).  Returns (amplitude, state)
    or None when the state is annihilated.
    """
    occ = list(state)
    amp = 1.0
    for kind, site in reversed(ops):
        i = _INDEX[site]
        if kind == "-":
            if occ[i] == 0:
                return None
            amp *= math.sqrt(occ[i])
            occ[i] -= 1
        else:
            occ[i] += 1
            amp *= math.sqrt(occ[i])
    return amp, tuple(occ)


def operator_matrix(terms) -> np.ndarray:
    """Matrix of sum_t coef_t * ops_t on the six-state basis."""
    H = np.zeros((6, 6))
    for coef, ops in terms:
        if coef == 0:
            continue
        for col, state in enumerate(BASIS):
            res = _apply(ops, state)
            if res is not None:
                amp, new = res
                H[_STATE_INDEX[new], col] += coef * amp
    return H


def c(site):
    return ("+", site)


def a(site):
    return ("-", site)


def bh_terms(p: BhParams):
    onsite = {-1: p.eps1, 0: p.eps0, 1: p.eps1}
    terms = [(-p.J, (c(i), a(j))) for i, j in NN_PAIRS]
    terms += [(0.5 * p.U, (c(i), c(i), a(i), a(i))) for i in SITES]
    terms += [(onsite[i], (c(i), a(i))) for i in SITES]
    return terms


def ebh_terms(p: EbhParams):
    terms = bh_terms(p.base)
    terms += [(p.J2, (c(-1), a(1))), (p.J2, (c(1), a(-1)))]
    for i, k in NN_PAIRS:
        terms += [(p.U1, (c(i), c(i), a(i), a(k))), (p.U1, (c(i), c(k), a(k), a(k)))]
        terms += [(p.U2, (c(i), c(i), a(k), a(k))), (p.U2, (c(i), c(k), a(i), a(k)))]
    return terms


def _finite(*values):
    if not all(math.isfinite(v) for v in values):
        raise ValueError("Hamiltonian parameters must be finite")


def build_h_bh(p: BhParams) -> np.ndarray:
    _finite(p.J, p.U, p.eps0, p.eps1)
    return operator_matrix(bh_terms(p))


def build_h_ebh(p: EbhParams) -> np.ndarray:
    _finite(p.base.J, p.base.U, p.base.eps0, p.base.eps1, p.J2, p.U1, p.U2)
    return operator_matrix(ebh_terms(p))


@dataclass(frozen=True)
class TwoBosonSpectrum:
    energies: tuple
    source: str = "BH"
    params: object = None

    def __post_init__(self):
        if list(self.energies) != sorted(self.energies):
            raise ValueError("spectrum energies must be ascending")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.energies, dtype=dtype)

    def __len__(self):
        return len(self.energies)

    def __getitem__(self, i):
        return self.energies[i]


def spectrum(H: np.ndarray, source: str = "BH", params=None) -> TwoBosonSpectrum:
    H = np.asarray(H, float)
    if not np.all(np.isfinite(H)):
        raise np.linalg.LinAlgError("Hamiltonian contains non-finite entries")
    if not np.allclose(H, H.T, rtol=0, atol=1e-13 * max(1.0, np.abs(H).max())):
        raise ValueError("Hamiltonian is not symmetric")
    e = np.linalg.eigvalsh(0.5 * (H + H.T))
    return TwoBosonSpectrum(tuple(float(v) for v in np.sort(e)), source, params)


def bh_spectrum(p: BhParams) -> TwoBosonSpectrum:
    return spectrum(build_h_bh(p), p.provenance, p)


def ebh_spectrum(p: EbhParams) -> TwoBosonSpectrum:
    return spectrum(build_h_ebh(p), "EBH", p)


def rescale_eta(spec, p: BhParams) -> np.ndarray:
    """(E_i - 2 eps0) / (4 J) with the reference BH parameters ``p``."""
    if p.J == 0:
        raise ZeroDivisionError("rescaling needs J != 0")
    return (np.asarray(spec, float) - 2.0 * p.eps0) / (4.0 * p.J)


def rescale_eta_prime(spec, p: BhParams, u_corr: float) -> np.ndarray:
    """(E_i - 2 eps0) / (4 J + |U_corr|)."""
    denom = 4.0 * p.J + abs(u_corr)
    if denom == 0:
        raise ZeroDivisionError("rescaling denominator 4J + |U_corr| vanishes")
    return (np.asarray(spec, float) - 2.0 * p.eps0) / denom


@dataclass(frozen=True)
class LevelGap:
    numerical: float
    closed_form: float


def e5_minus_e2(p: BhParams) -> LevelGap:
    """E5 - E2 of the non-interacting BH model, diagonalized and in the quoted closed form.

    The closed form sqrt(J^2 + Delta^2) is reported for comparison only; the
    diagonalized value is authoritative (they disagree, e.g. 2 sqrt(2) J at Delta = 0).
    """
    if p.U != 0:
        raise ValueError("E5 - E2 comparison is defined for U = 0")
    e = bh_spectrum(p).energies
    return LevelGap(e[4] - e[1], math.hypot(p.J, p.delta))


def single_particle_levels(p: BhParams) -> np.ndarray:
    """Eigenvalues of the one-particle triple-well hopping matrix."""
    h = np.array([[p.eps1, -p.J, 0.0], [-p.J, p.eps0, -p.J], [0.0, -p.J, p.eps1]])
    return np.linalg.eigvalsh(h)


def noninteracting_pair_levels(levels) -> np.ndarray:
    """Two-boson energies e_a + e_b (a <= b) from one-particle levels, sorted."""
    return np.sort([x + y for x, y in combinations_with_replacement(levels, 2)])


@dataclass(frozen=True)
class ResonanceCurves:
    """Estimated levels versus a_ho/a_sc, built without any inter-band coupling.

    ``bh_lower``: BH spectrum with the attractive U_corr, continuous through
    unitarity (branch 1 for a_sc < 0, bound branch 0 for a_sc > 0).
    ``bh_upper``: BH spectrum on the repulsive branch 1, NaN for a_sc < 0.
    ``dimers[(m, n)]``: attractive pair with the two atoms in bands m and n.
    ``mixed[n]``: non-interacting pair with one atom in band 0 and one in band n.
    """

    inv_a: np.ndarray
    bh_upper: np.ndarray
    bh_lower: np.ndarray
    dimers: dict
    mixed: dict


def estimate_resonance_spectrum(cfg, boundary, inv_a_grid, n_bands: int = 2) -> ResonanceCurves:
    from . import busch
    from .bands import mean_band_energy
    from .bhparams import bh_parameters, correction_factor

    inv_a = np.asarray(inv_a_grid, float)
    base = bh_parameters(cfg, boundary, 0.0)
    A = correction_factor(cfg, boundary)
    hw = cfg.hbar_omega
    excite = [mean_band_energy(cfg, n) - mean_band_energy(cfg, 0) for n in range(n_bands)]

    def u(t, branch):
        return A * hw * (busch.busch_energy_inv(t, branch) - busch.NONINTERACTING_EPS)

    upper = np.full((inv_a.size, 6), np.nan)
    lower = np.empty((inv_a.size, 6))
    attract = np.empty(inv_a.size)
    for i, t in enumerate(inv_a):
        attract[i] = u(t, 0 if t >= 0 else 1)
        lower[i] = bh_spectrum(base.with_U(attract[i], "corr")).energies
        if t > 0:
            upper[i] = bh_spectrum(base.with_U(u(t, 1), "corr")).energies

    dimers = {}
    for m in range(n_bands):
        for n in range(m, n_bands):
            if (m, n) != (0, 0):
                dimers[(m, n)] = 2.0 * base.eps0 + excite[m] + excite[n] + attract
    mixed = {n: 2.0 * base.eps0 + excite[n] for n in range(1, n_bands)}
    return ResonanceCurves(inv_a, upper, lower, dimers, mixed)
