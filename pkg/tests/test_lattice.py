import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from hubfit.lattice import (
    ConfigError,
    LatticeConfig,
    PotentialKind,
    convert_depth,
    eval_potential,
    lattice_config_from_mapping,
    read_config,
    sin2_taylor_coefficients,
)

K = PotentialKind
depths = st.floats(min_value=0.05, max_value=400.0)


@given(depths)
def test_unit_identity(v_er):
    cfg = LatticeConfig.from_depth(v_er, "Er")
    assert cfg.depth_Er == pytest.approx(4 * cfg.depth_hbar_omega**2, rel=1e-12)


@given(depths)
def test_oscillator_length_identity(v_er):
    cfg = LatticeConfig.from_depth(v_er, "Er")
    # a_ho^2 * m * omega = 2 hbar with hbar = m = 1
    assert cfg.a_ho**2 * cfg.omega == pytest.approx(2.0, rel=1e-12)


def test_hbar_omega_is_twice_sqrt_v0_er():
    cfg = LatticeConfig.from_depth(11.0, "Er")
    assert cfg.hbar_omega == pytest.approx(2 * math.sqrt(cfg.V0 * cfg.E_r), rel=1e-14)


def test_convert_1p7_hbar_omega():
    assert convert_depth(1.7, "hbar_omega", "Er") == pytest.approx(11.56, abs=1e-12)


def test_convert_25p2_er():
    assert convert_depth(25.2, "Er", "hbar_omega") == pytest.approx(2.51, abs=0.005)


def test_convert_zero_and_round_trip():
    assert convert_depth(0.0, "Er", "hbar_omega") == 0.0
    cfg = LatticeConfig(3.0)
    si = convert_depth(7.0, "Er", "SI", cfg)
    assert convert_depth(si, "SI", "Er", cfg) == pytest.approx(7.0, rel=1e-14)


def test_si_recoil_energy_of_li7_at_one_micron():
    # hbar^2 k^2 / 2m evaluated independently with CODATA constants
    from scipy import constants as c

    m = 7.0160034366 * c.atomic_mass
    k = 2 * math.pi / 1e-6
    assert LatticeConfig(1.0).E_r_J == pytest.approx(c.hbar**2 * k**2 / (2 * m), rel=1e-12)


def test_convert_unknown_unit():
    with pytest.raises(ValueError, match="unknown depth unit"):
        convert_depth(1.0, "kHz", "Er")


def test_invalid_config():
    with pytest.raises(ValueError):
        LatticeConfig(-1.0)
    with pytest.raises(ValueError):
        LatticeConfig(1.0, lambda_um=0.0)


def test_taylor_coefficients_match_sympy_series():
    u = sympy.symbols("u")
    series = sympy.series(sympy.sin(u) ** 2, u, 0, 24).removeO()
    ours = sin2_taylor_coefficients(22)
    for n, c in enumerate(ours, start=1):
        assert Fraction(str(series.coeff(u, 2 * n))) == c


def test_sinusoidal_values():
    cfg = LatticeConfig.from_depth(8.0)
    assert eval_potential(K.SINUSOIDAL_OL, cfg, 0.0) == 0.0
    assert eval_potential(K.SINUSOIDAL_OL, cfg, math.pi / 2) == pytest.approx(cfg.V0, rel=1e-15)


def test_taylor22_at_outer_minimum():
    cfg = LatticeConfig.from_depth(8.0)
    v22 = eval_potential(K.TAYLOR22_TRIPLE_WELL, cfg, math.pi)
    assert abs(v22 - eval_potential(K.SINUSOIDAL_OL, cfg, math.pi)) < 1e-3 * cfg.V0


def test_harmonic_at_half_spacing():
    cfg = LatticeConfig.from_depth(8.0)
    assert eval_potential(K.HARMONIC, cfg, math.pi / 2) == pytest.approx(math.pi**2 / 4 * cfg.V0, rel=1e-14)


def test_sextic_is_sixth_order_truncation():
    cfg = LatticeConfig(2.0)
    x = 0.7
    assert eval_potential(K.SEXTIC, cfg, x) == pytest.approx(2.0 * (x**2 - x**4 / 3 + 2 * x**6 / 45), rel=1e-14)


def test_non_finite_position_rejected():
    with pytest.raises(ValueError):
        eval_potential(K.SINUSOIDAL_OL, LatticeConfig(1.0), np.array([0.0, np.nan]))


def test_confinement_is_difference():
    cfg = LatticeConfig(3.0)
    x = np.linspace(-2 * math.pi, 2 * math.pi, 101)
    diff = eval_potential(K.TAYLOR22_TRIPLE_WELL, cfg, x) - eval_potential(K.SINUSOIDAL_OL, cfg, x)
    assert np.allclose(eval_potential(K.CONFINEMENT_ONLY, cfg, x), diff, rtol=0, atol=1e-12 * cfg.V0)


def test_confinement_vanishes_on_central_well():
    cfg = LatticeConfig(3.0)
    x = np.linspace(-math.pi / 2, math.pi / 2, 201)
    assert np.max(np.abs(eval_potential(K.CONFINEMENT_ONLY, cfg, x))) <= 1e-10 * cfg.V0


def test_confinement_rises_outside_three_wells():
    cfg = LatticeConfig(3.0)
    x = np.linspace(1.5 * math.pi + 1e-3, 3 * math.pi, 400)
    v = eval_potential(K.CONFINEMENT_ONLY, cfg, x)
    assert np.all(v > 0) and np.all(np.diff(v) > 0)


@settings(max_examples=50)
@given(st.sampled_from(list(K)), st.floats(-6.0, 6.0))
def test_potentials_are_even(kind, x):
    cfg = LatticeConfig(2.5)
    a, b = eval_potential(kind, cfg, x), eval_potential(kind, cfg, -x)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


def test_config_file_round_trip(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("depth = 1.7   # in hbar omega\ndepth_unit = hbar_omega\n")
    cfg = lattice_config_from_mapping(read_config(p))
    assert cfg.depth_Er == pytest.approx(11.56, abs=1e-12)
    assert cfg.mass_amu == pytest.approx(7.016, abs=1e-3)


def test_config_missing_key_named():
    with pytest.raises(ConfigError, match="missing config key: depth"):
        lattice_config_from_mapping({"depth_unit": "Er"})
