"""Bloch bands of V0 sin^2(x) by plane-wave (central equation) diagonalization.

In the basis exp(i (k + 2m) x), |m| <= M, the Hamiltonian is tridiagonal:
(k + 2m)^2 / 2 + V0/2 on the diagonal and -V0/4 off it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.optimize import minimize_scalar

from .lattice import LatticeConfig

DEFAULT_CUTOFF = 32


class BandSolverError(RuntimeError):
    def __init__(self, k, M, cause=None):
        super().__init__(f"Bloch eigensolver failed at k={k!r}, M={M}: {cause}")
        self.k = k
        self.M = M


@dataclass(frozen=True)
class BlochSolution:
    k: float
    band_index: int
    energy: float
    coeffs: np.ndarray  # over reciprocal vectors 2m, m = -M..M
    M: int

    @property
    def G(self) -> np.ndarray:
        return 2.0 * np.arange(-self.M, self.M + 1)


@dataclass(frozen=True)
class BandExtents:
    band_index: int
    e_min: float
    e_max: float

    @property
    def width(self) -> float:
        return self.e_max - self.e_min


def _tridiagonal(V0: float, k: float, M: int):
    m = np.arange(-M, M + 1)
    diag = 0.5 * (k + 2.0 * m) ** 2 + 0.5 * V0
    off = np.full(2 * M, -0.25 * V0)
    return diag, off


def central_matrix(V0: float, k: float, M: int = DEFAULT_CUTOFF) -> np.ndarray:
    d, e = _tridiagonal(V0, k, M)
    return np.diag(d) + np.diag(e, 1) + np.diag(e, -1)


def _check(n_bands: int, M: int):
    if M < 8:
        raise ValueError(f"plane-wave cutoff M must be >= 8, got {M}")
    if not 1 <= n_bands <= 2 * M:
        raise ValueError(f"n_bands must lie in [1, 2M], got {n_bands}")


def solve_bloch(cfg: LatticeConfig, k: float, n_bands: int = 4, M: int = DEFAULT_CUTOFF) -> list[BlochSolution]:
    """Lowest ``n_bands`` Bloch states at quasimomentum ``k``, ascending in energy.

    Eigenvector signs are fixed so the largest-magnitude coefficient is positive.
    """
    _check(n_bands, M)
    d, e = _tridiagonal(cfg.V0, k, M)
    try:
        w, v = eigh_tridiagonal(d, e, select="i", select_range=(0, n_bands - 1))
    except (LinAlgError, ValueError) as exc:
        raise BandSolverError(k, M, exc) from exc
    if not np.all(np.isfinite(w)):
        raise BandSolverError(k, M, "non-finite eigenvalues")
    out = []
    for n in range(n_bands):
        c = v[:, n]
        c = c * np.sign(c[np.argmax(np.abs(c))])
        c.setflags(write=False)
        out.append(BlochSolution(float(k), n, float(w[n]), c, M))
    return out


def band_energies(cfg: LatticeConfig, ks, n_bands: int = 4, M: int = DEFAULT_CUTOFF) -> np.ndarray:
    """Energies with shape (len(ks), n_bands)."""
    _check(n_bands, M)
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    out = np.empty((ks.size, n_bands))
    for i, k in enumerate(ks):
        d, e = _tridiagonal(cfg.V0, k, M)
        try:
            out[i] = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, n_bands - 1))
        except (LinAlgError, ValueError) as exc:
            raise BandSolverError(k, M, exc) from exc
    return out


def k_grid(n_k: int) -> np.ndarray:
    """Uniform half-open grid over the Brillouin zone [-1, 1)."""
    return -1.0 + 2.0 * np.arange(n_k) / n_k


def mean_band_energy(cfg: LatticeConfig, band_index: int = 0, n_k: int = 64, M: int = DEFAULT_CUTOFF) -> float:
    """Brillouin-zone average of one band (uniform periodic grid, spectrally exact)."""
    return float(band_energies(cfg, k_grid(n_k), band_index + 1, M)[:, band_index].mean())


def band_extents(cfg: LatticeConfig, band_index: int, n_k: int = 64, M: int = DEFAULT_CUTOFF) -> BandExtents:
    if n_k < 16:
        raise ValueError(f"n_k must be >= 16, got {n_k}")
    ks = k_grid(n_k)
    # the zone edge k = 1 is the image of k = -1, include it for symmetric refinement
    ks = np.append(ks, 1.0)
    e = band_energies(cfg, ks, band_index + 1, M)[:, band_index]
    h = 2.0 / n_k

    def energy(k):
        return band_energies(cfg, [k], band_index + 1, M)[0, band_index]

    def refine(i, sign):
        lo, hi = max(ks[i] - h, -1.0), min(ks[i] + h, 1.0)
        if hi - lo < 1e-14:
            return e[i]
        res = minimize_scalar(lambda k: sign * energy(k), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        return min(sign * e[i], res.fun) * sign

    e_min = refine(int(np.argmin(e)), 1.0)
    e_max = refine(int(np.argmax(e)), -1.0)
    return BandExtents(band_index, float(e_min), float(e_max))
