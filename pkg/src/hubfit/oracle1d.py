"""One-dimensional exact-diagonalization reference for two bosons.

Finite differences with hard walls; the two-particle problem is solved on the
exchange-symmetric half of the product grid with a contact term g1d/h on the
coincident points.  This stands in for a full 3D reference spectrum: g1d is a
free coupling, not mapped from a scattering length.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal, eigh
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .fit import FitReport, fit_interaction, fit_noninteracting
from .lattice import LatticeConfig, PotentialKind, eval_potential
from .wannier import THREE_HALVES_PI, BoundaryChoice, build_wannier, quartic_integral

MAX_PRODUCT_POINTS = 1 << 20  # cap on (interior points)^2
WALL_TOL = 1e-8


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [x_min, x_max]; the end points are hard walls."""

    x_min: float = -2.0 * math.pi
    x_max: float = 2.0 * math.pi
    n: int = 513
    stencil: int = 3

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError("grid needs x_max > x_min")
        if self.n < 9 or (self.n - 1) & (self.n - 2):
            raise ValueError(f"grid size must be 2^k + 1 (>= 9), got {self.n}")
        if self.stencil not in (3, 5):
            raise ValueError("stencil must be 3 or 5")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def interior(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)[1:-1]

    def coarsened(self) -> "Grid1D":
        return Grid1D(self.x_min, self.x_max, (self.n - 1) // 2 + 1, self.stencil)


@dataclass(frozen=True)
class OracleSpectrum:
    kind: PotentialKind
    g1d: float
    energies: tuple
    grid: Grid1D
    convergence: float = math.nan
    wall_amplitude: float = 0.0

    def __post_init__(self):
        if list(self.energies) != sorted(self.energies):
            raise ValueError("oracle energies must be ascending")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.energies, dtype=dtype)


def kinetic_bands(grid: Grid1D):
    """Diagonals (main, first, second) of -1/2 d^2/dx^2 on the interior points."""
    h2 = grid.h**2
    if grid.stencil == 3:
        return 1.0 / h2, -0.5 / h2, 0.0
    return 1.25 / h2, -2.0 / 3.0 / h2, 1.0 / 24.0 / h2


def one_body_matrix(kind: PotentialKind, cfg: LatticeConfig, grid: Grid1D) -> sp.csr_matrix:
    x = grid.interior
    d0, d1, d2 = kinetic_bands(grid)
    m = x.size
    diags = [d0 + eval_potential(kind, cfg, x), np.full(m - 1, d1), np.full(m - 1, d1)]
    offsets = [0, 1, -1]
    if d2:
        diags += [np.full(m - 2, d2), np.full(m - 2, d2)]
        offsets += [2, -2]
    return sp.diags(diags, offsets, format="csr")


def _wall_amplitude(vecs: np.ndarray) -> float:
    peak = np.max(np.abs(vecs), axis=0)
    edge = np.maximum(np.abs(vecs[0]), np.abs(vecs[-1]))
    return float(np.max(edge / peak))


def single_particle_ed(kind: PotentialKind, cfg: LatticeConfig, grid: Grid1D = Grid1D(), n_states: int = 6):
    """Lowest ``n_states`` (energies, eigenvectors) of h = -1/2 d^2/dx^2 + V(x)."""
    x = grid.interior
    V = eval_potential(kind, cfg, x)
    d0, d1, d2 = kinetic_bands(grid)
    try:
        if grid.stencil == 3:
            e, v = eigh_tridiagonal(d0 + V, np.full(x.size - 1, d1), select="i",
                                    select_range=(0, n_states - 1))
        else:
            e, v = eigh(one_body_matrix(kind, cfg, grid).toarray(), subset_by_index=(0, n_states - 1))
    except Exception as exc:
        raise OracleError(f"single-particle eigensolver failed: {exc}") from exc
    return e, v / math.sqrt(grid.h)


def _symmetric_projector(m: int) -> sp.csr_matrix:
    """Columns |i j> + |j i> (normalized) for i <= j, as a sparse map into the product space."""
    i, j = np.triu_indices(m)
    ncol = i.size
    cols = np.arange(ncol)
    diag = i == j
    w = np.where(diag, 1.0, 1.0 / math.sqrt(2.0))
    rows = np.concatenate([i * m + j, (j * m + i)[~diag]])
    data = np.concatenate([w, w[~diag]])
    cc = np.concatenate([cols, cols[~diag]])
    return sp.csr_matrix((data, (rows, cc)), shape=(m * m, ncol)), diag


def two_body_matrix(kind: PotentialKind, cfg: LatticeConfig, grid: Grid1D, g1d: float) -> sp.csr_matrix:
    m = grid.n - 2
    if m * m > MAX_PRODUCT_POINTS:
        raise MemoryError(f"product grid {m}^2 exceeds the cap of {MAX_PRODUCT_POINTS} points")
    h1 = one_body_matrix(kind, cfg, grid)
    eye = sp.identity(m, format="csr")
    H = sp.kron(h1, eye, format="csr") + sp.kron(eye, h1, format="csr")
    P, diag = _symmetric_projector(m)
    Hs = (P.T @ H @ P).tocsr()
    if g1d:
        Hs = Hs + sp.diags(np.where(diag, g1d / grid.h, 0.0))
    return Hs.tocsc()


def _lowest(Hs, k: int, sigma: float) -> np.ndarray:
    # fixed start vector: ARPACK's default is random, which breaks bitwise reproducibility
    v0 = np.full(Hs.shape[0], 1.0 / math.sqrt(Hs.shape[0]))
    try:
        e = eigsh(Hs, k=k, sigma=sigma, which="LM", return_eigenvectors=False, tol=1e-12, v0=v0)
    except ArpackNoConvergence as exc:
        raise OracleError(f"two-particle eigensolver did not converge: {exc}") from exc
    return np.sort(e)


def _solve(kind, cfg, grid, g1d, m_states):
    e1, v1 = single_particle_ed(kind, cfg, grid, 3)
    # shift below the ground state; g^2/4 bounds the 1D dimer binding energy
    sigma = 2.0 * e1[0] - 1e-3 * max(1.0, abs(e1[0])) - (0.5 * g1d**2 if g1d < 0 else 0.0)
    e = _lowest(two_body_matrix(kind, cfg, grid, g1d), m_states, sigma)
    return e, _wall_amplitude(v1)


def two_particle_ed(kind: PotentialKind, cfg: LatticeConfig, grid: Grid1D = Grid1D(), g1d: float = 0.0,
                    m_states: int = 6, estimate_error: bool = True) -> OracleSpectrum:
    """Lowest ``m_states`` exchange-symmetric two-boson energies.

    The convergence estimate is the Richardson correction |E_h - E_2h| / (2^p - 1)
    with p the stencil order, maximized over the reported levels.
    """
    if not 1 <= m_states <= 12:
        raise ValueError("m_states must lie in [1, 12]")
    e, wall = _solve(kind, cfg, grid, g1d, m_states)
    conv = math.nan
    if estimate_error:
        coarse, _ = _solve(kind, cfg, grid.coarsened(), g1d, m_states)
        order = 2 if grid.stencil == 3 else 4
        conv = float(np.max(np.abs(e - coarse)) / (2**order - 1))
    if wall > WALL_TOL:
        warnings.warn(f"eigenfunctions reach the hard wall (relative amplitude {wall:.1e}); widen the grid",
                      RuntimeWarning, stacklevel=2)
    return OracleSpectrum(kind, float(g1d), tuple(float(v) for v in e), grid, conv, wall)


def u_bh_1d(cfg: LatticeConfig, g1d: float, boundary: BoundaryChoice = THREE_HALVES_PI) -> float:
    """1D analog of the Wannier interaction integral: g1d * int w0^4 dx."""
    return g1d * quartic_integral(build_wannier(cfg, boundary, 0))


def extract_u_opt_1d(cfg: LatticeConfig, grid: Grid1D = Grid1D(), g1d: float = 0.0,
                     kind: PotentialKind = PotentialKind.TAYLOR22_TRIPLE_WELL) -> FitReport:
    """Two-step fit of the BH model to the oracle's g = 0 and g = g1d spectra."""
    ref0 = two_particle_ed(kind, cfg, grid, 0.0, estimate_error=False)
    step1 = fit_noninteracting(ref0.energies)
    if g1d == 0:
        return fit_interaction(ref0.energies, step1.params, u0=0.0)
    ref = two_particle_ed(kind, cfg, grid, g1d, estimate_error=False)
    return fit_interaction(ref.energies, step1.params, u0=u_bh_1d(cfg, g1d))


def u_sext_1d(cfg: LatticeConfig, grid: Grid1D = Grid1D(), g1d: float = 0.0) -> float:
    """Ground-state interaction shift of two bosons in the single sextic well."""
    if g1d == 0:
        return 0.0
    e1, _ = single_particle_ed(PotentialKind.SEXTIC, cfg, grid, 1)
    e = two_particle_ed(PotentialKind.SEXTIC, cfg, grid, g1d, m_states=1, estimate_error=False)
    return e.energies[0] - 2.0 * float(e1[0])
