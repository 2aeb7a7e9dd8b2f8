"""Real lowest-band Wannier functions under finite periodic boundaries.

An interval of N lattice cells, [-N pi/2, N pi/2], quantizes the Bloch
quasimomenta to k = 2n/N.  Each Bloch function is normalized inside the
interval and its phase is fixed so that psi_k(0) is real and positive; for
the symmetric lattice this is the Kohn gauge and yields real, even w_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .bands import DEFAULT_CUTOFF, solve_bloch
from .lattice import LatticeConfig

MIN_POINTS = 2049


@dataclass(frozen=True)
class BoundaryChoice:
    """Number of lattice cells inside the periodic interval.

    ``ThreeHalvesPi`` is 3 cells (k0 x_B = 3pi/2), ``TwoPi`` is 4 cells
    (k0 x_B = 2pi); ``infinite(n)`` uses n >= 15 cells as a stand-in for the
    infinite lattice.
    """

    name: str
    n_cells: int

    def __post_init__(self):
        if self.name == "infinite" and self.n_cells < 15:
            raise ValueError("the infinite-lattice proxy needs at least 15 cells")

    @property
    def x_B(self) -> float:
        return self.n_cells * math.pi / 2

    @property
    def length(self) -> float:
        return 2 * self.x_B

    @property
    def kpoints(self) -> np.ndarray:
        N = self.n_cells
        n = np.arange(-((N - 1) // 2), N // 2 + 1)
        return 2.0 * n / N

    @property
    def max_site(self) -> int:
        return (self.n_cells - 1) // 2

    def __str__(self):
        return self.name if self.name != "infinite" else f"inf:{self.n_cells}"


THREE_HALVES_PI = BoundaryChoice("3pi/2", 3)
TWO_PI = BoundaryChoice("2pi", 4)


def infinite(n_cells: int = 15) -> BoundaryChoice:
    return BoundaryChoice("infinite", n_cells)


INFINITE = infinite()


def parse_boundary(text: str) -> BoundaryChoice:
    t = text.strip().lower().replace(" ", "")
    if t in ("3pi/2", "three_halves_pi", "threehalvespi", "1.5pi"):
        return THREE_HALVES_PI
    if t in ("2pi", "two_pi", "twopi"):
        return TWO_PI
    if t.startswith("inf"):
        _, _, n = t.partition(":")
        return infinite(int(n)) if n else INFINITE
    raise ValueError(f"unknown boundary {text!r}; use 3pi/2, 2pi, inf or inf:<cells>")


def simpson_weights(n: int, h: float) -> np.ndarray:
    if n < 3 or n % 2 == 0:
        raise ValueError("composite Simpson needs an odd number (>= 3) of points")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


@dataclass(frozen=True, eq=False)
class WannierFunction:
    site: int
    boundary: BoundaryChoice
    x: np.ndarray
    values: np.ndarray
    derivative: np.ndarray
    weights: np.ndarray = field(repr=False)

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f))

    def overlap(self, other: "WannierFunction") -> float:
        return self.integrate(self.values * other.values)

    def norm2(self) -> float:
        return self.overlap(self)


def default_points(boundary: BoundaryChoice) -> int:
    return max(MIN_POINTS, 512 * boundary.n_cells + 1)


def kohn_gauge(coeffs: np.ndarray) -> np.ndarray:
    """Rotate plane-wave coefficients so that psi_k(0) = sum(coeffs) is real positive."""
    s = np.sum(coeffs)
    if abs(s) < 1e-14:
        raise ValueError("Bloch function vanishes at the well centre; Kohn gauge undefined")
    return coeffs * (np.conj(s) / abs(s))


def bloch_set(cfg: LatticeConfig, boundary: BoundaryChoice, M: int = DEFAULT_CUTOFF):
    """Lowest-band plane-wave coefficients (complex, unit norm) for the boundary's k-set."""
    return [(k, solve_bloch(cfg, k, 1, M)[0].coeffs.astype(complex)) for k in boundary.kpoints]


def wannier_from_bloch(bloch, boundary: BoundaryChoice, site: int, x: np.ndarray, M: int):
    """Combine Bloch coefficients into w_site and its derivative on ``x``.

    The phases of the supplied coefficients are re-fixed to the Kohn gauge.
    """
    G = 2.0 * np.arange(-M, M + 1)
    w = np.zeros(x.size, complex)
    dw = np.zeros(x.size, complex)
    for k, c in bloch:
        c = kohn_gauge(np.asarray(c, complex)) * np.exp(-1j * k * site * math.pi)
        q = k + G
        phase = np.exp(1j * np.outer(x, q))
        w += phase @ c
        dw += phase @ (1j * q * c)
    scale = 1.0 / math.sqrt(boundary.n_cells * boundary.length)
    return w * scale, dw * scale


@lru_cache(maxsize=256)
def build_wannier(cfg: LatticeConfig, boundary: BoundaryChoice = THREE_HALVES_PI, site: int = 0,
                  M: int = DEFAULT_CUTOFF, n_points: int | None = None) -> WannierFunction:
    if abs(site) > boundary.max_site:
        raise ValueError(f"site {site} does not fit inside boundary {boundary} "
                         f"(|site| <= {boundary.max_site})")
    n = n_points or default_points(boundary)
    x = np.linspace(-boundary.x_B, boundary.x_B, n)
    w, dw = wannier_from_bloch(bloch_set(cfg, boundary, M), boundary, site, x, M)
    scale = np.max(np.abs(w))
    residue = max(np.max(np.abs(w.imag)), np.max(np.abs(dw.imag)) / max(1.0, np.max(np.abs(dw))))
    if residue > 1e-12 * max(scale, 1.0):
        raise ArithmeticError(f"Wannier function not real: imaginary residue {residue:.3e}")
    values, deriv = w.real.copy(), dw.real.copy()
    weights = simpson_weights(n, x[1] - x[0])
    for a in (x, values, deriv, weights):
        a.setflags(write=False)
    return WannierFunction(site, boundary, x, values, deriv, weights)


def transverse_quartic_norm(cfg: LatticeConfig) -> float:
    """Integral of h0^4 over one transverse axis: 1 / (sqrt(2 pi) l), l = 1/sqrt(omega)."""
    return math.sqrt(cfg.omega) / math.sqrt(2.0 * math.pi)


def quartic_integral(w: WannierFunction) -> float:
    return w.integrate(w.values**4)
