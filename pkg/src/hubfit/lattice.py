"""Lattice configuration, unit bookkeeping and trapping potentials.

Everything inside the package works in lattice units: hbar = m = k0 = 1.
In these units the recoil energy is 1/2, the lattice period is pi and the
harmonic frequency of a well is omega = sqrt(2 V0).  Conversions to the
E_r / hbar*omega axes and to SI happen only at the boundary.
"""

from __future__ import annotations

import configparser
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import constants

LI7_MASS_AMU = 7.0160034366
BOHR_M = constants.physical_constants["Bohr radius"][0]

DEPTH_UNITS = ("Er", "hbar_omega", "SI", "lattice")


class PotentialKind(enum.Enum):
    SINUSOIDAL_OL = "ol"
    TAYLOR22_TRIPLE_WELL = "taylor22"
    CONFINEMENT_ONLY = "conf"
    SEXTIC = "sextic"
    HARMONIC = "harmonic"


@dataclass(frozen=True)
class LatticeConfig:
    """A 1D lattice of depth ``V0`` (lattice units) plus the SI scales.

    ``V0 = 0`` is accepted for free-particle checks; the harmonic scales are
    then degenerate (omega = 0, a_ho = inf).
    """

    V0: float
    lambda_um: float = 1.0
    mass_amu: float = LI7_MASS_AMU

    def __post_init__(self):
        if not math.isfinite(self.V0) or self.V0 < 0:
            raise ValueError(f"lattice depth must be finite and >= 0, got {self.V0}")
        if not self.lambda_um > 0:
            raise ValueError(f"lambda_um must be > 0, got {self.lambda_um}")
        if not self.mass_amu > 0:
            raise ValueError(f"mass_amu must be > 0, got {self.mass_amu}")

    @classmethod
    def from_depth(cls, value: float, unit: str = "Er", **kwargs) -> "LatticeConfig":
        probe = cls(0.0, **kwargs)
        return cls(convert_depth(value, unit, "lattice", probe), **kwargs)

    # lattice-unit scales
    k0 = 1.0
    E_r = 0.5
    spacing = math.pi

    @property
    def omega(self) -> float:
        return math.sqrt(2.0 * self.V0)

    @property
    def hbar_omega(self) -> float:
        return self.omega

    @property
    def a_ho(self) -> float:
        """Relative-motion oscillator length sqrt(2 hbar / m omega)."""
        if self.V0 == 0:
            return math.inf
        return math.sqrt(2.0 / self.omega)

    @property
    def depth_Er(self) -> float:
        return self.V0 / self.E_r

    @property
    def depth_hbar_omega(self) -> float:
        return self.V0 / self.hbar_omega if self.V0 > 0 else 0.0

    # SI scales
    @property
    def mass_kg(self) -> float:
        return self.mass_amu * constants.atomic_mass

    @property
    def length_unit_m(self) -> float:
        return self.lambda_um * 1e-6 / (2.0 * math.pi)

    @property
    def energy_unit_J(self) -> float:
        return constants.hbar**2 / (self.mass_kg * self.length_unit_m**2)

    @property
    def E_r_J(self) -> float:
        return self.E_r * self.energy_unit_J

    def length_from_bohr(self, a_bohr: float) -> float:
        return a_bohr * BOHR_M / self.length_unit_m

    def length_to_bohr(self, length: float) -> float:
        return length * self.length_unit_m / BOHR_M

    def a_ratio(self, a_sc: float) -> float:
        """Scattering length (lattice units) in units of a_ho."""
        return a_sc / self.a_ho


def convert_depth(value: float, from_unit: str, to_unit: str, cfg: LatticeConfig | None = None) -> float:
    """Convert a lattice depth between E_r, hbar*omega, SI (J) and lattice units.

    The hbar*omega axis is non-linear in V0: V0/E_r = 4 (V0/hbar omega)^2.
    """
    for u in (from_unit, to_unit):
        if u not in DEPTH_UNITS:
            raise ValueError(f"unknown depth unit {u!r}; expected one of {DEPTH_UNITS}")
    if value < 0:
        raise ValueError(f"lattice depth must be >= 0, got {value}")
    if "SI" in (from_unit, to_unit) and cfg is None:
        raise ValueError("SI conversion needs a LatticeConfig for mass and wavelength")

    if from_unit == "Er":
        in_er = value
    elif from_unit == "hbar_omega":
        in_er = 4.0 * value**2
    elif from_unit == "lattice":
        in_er = value / LatticeConfig.E_r
    else:
        in_er = value / cfg.E_r_J

    if to_unit == "Er":
        return in_er
    if to_unit == "hbar_omega":
        return math.sqrt(in_er / 4.0)
    if to_unit == "lattice":
        return in_er * LatticeConfig.E_r
    return in_er * cfg.E_r_J


@lru_cache(maxsize=None)
def sin2_taylor_coefficients(order: int) -> tuple[Fraction, ...]:
    """Exact coefficients c_n of sin^2 u = sum_n c_n u^(2n), n = 1 .. order/2."""
    if order % 2 or order < 2:
        raise ValueError("order must be a positive even integer")
    return tuple(
        Fraction((-1) ** (n + 1) * 2 ** (2 * n - 1), math.factorial(2 * n))
        for n in range(1, order // 2 + 1)
    )


def _taylor_sin2(u: np.ndarray, order: int) -> np.ndarray:
    coeffs = [float(c) for c in sin2_taylor_coefficients(order)]
    u2 = u * u
    acc = np.zeros_like(u2)
    for c in reversed(coeffs):
        acc = (acc + c) * u2
    return acc


def eval_potential(kind: PotentialKind, cfg: LatticeConfig, x):
    """Potential energy (lattice units) at position(s) ``x`` along the lattice axis."""
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("potential evaluated at a non-finite position")
    u = cfg.k0 * xa
    if kind is PotentialKind.SINUSOIDAL_OL:
        out = cfg.V0 * np.sin(u) ** 2
    elif kind is PotentialKind.TAYLOR22_TRIPLE_WELL:
        out = cfg.V0 * _taylor_sin2(u, 22)
    elif kind is PotentialKind.CONFINEMENT_ONLY:
        out = cfg.V0 * _taylor_sin2(u, 22) - cfg.V0 * np.sin(u) ** 2
    elif kind is PotentialKind.SEXTIC:
        out = cfg.V0 * _taylor_sin2(u, 6)
    elif kind is PotentialKind.HARMONIC:
        out = 0.5 * cfg.omega**2 * xa**2
    else:
        raise ValueError(f"unknown potential kind {kind!r}")
    return out if np.ndim(x) else float(out)


# flat key = value config files

CONFIG_DEFAULTS = {
    "depth_unit": "Er",
    "lambda_um": "1.0",
    "mass_amu": str(LI7_MASS_AMU),
    "boundary": "3pi/2",
}


class ConfigError(ValueError):
    """Missing or malformed configuration key."""


def read_config(path) -> dict[str, str]:
    """Read a flat ``key = value`` file ('#' comments) into a dict of strings."""
    text = Path(path).read_text()
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return dict(parser["config"])


def require(mapping: dict, key: str) -> str:
    try:
        return mapping[key]
    except KeyError:
        raise ConfigError(f"missing config key: {key}") from None


def lattice_config_from_mapping(mapping: dict) -> LatticeConfig:
    merged = {**CONFIG_DEFAULTS, **mapping}
    depth_text = require(merged, "depth")
    try:
        depth = float(depth_text)
        lam = float(merged["lambda_um"])
        mass = float(merged["mass_amu"])
    except ValueError as exc:
        raise ConfigError(f"bad numeric config value: {exc}") from exc
    unit = merged["depth_unit"]
    if unit not in DEPTH_UNITS:
        raise ConfigError(f"depth_unit must be one of {DEPTH_UNITS}, got {unit!r}")
    try:
        return LatticeConfig.from_depth(depth, unit, lambda_um=lam, mass_amu=mass)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
