"""Command-line front end: config in, deterministic CSV/JSON tables out.

    python -m hubfit <subcommand> --config run.cfg --out results/ [--only fig4] [--jobs N] [--format csv]

Exit status: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__, bhmodel, busch
from .bands import band_energies, band_extents, k_grid, mean_band_energy
from .bhparams import (
    bh_parameters,
    correction_factor,
    ebh_parameters,
    hopping_J,
    next_hopping_J2,
    onsite_eps,
    onsite_shift,
    u_bh,
    validity_ratio,
)
from .fit import fit_interaction, fit_noninteracting
from .lattice import (
    ConfigError,
    LatticeConfig,
    PotentialKind,
    lattice_config_from_mapping,
    read_config,
)
from .oracle1d import Grid1D, extract_u_opt_1d, two_particle_ed, u_bh_1d, u_sext_1d
from .wannier import INFINITE, THREE_HALVES_PI, TWO_PI, BoundaryChoice, build_wannier, parse_boundary

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
SUBCOMMANDS = ("bands", "wannier", "params", "busch", "spectrum", "fit", "oracle", "sweep", "figures")
FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10")
AXES = ("V0", "a_sc", "inv_a_sc", "g1d")

log = logging.getLogger("hubfit")


# ---------------------------------------------------------------- settings


def _floats(text: str, key: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"config key {key}: {exc}") from None


def _int(mapping, key, default) -> int:
    try:
        return int(mapping.get(key, default))
    except ValueError:
        raise ConfigError(f"config key {key} must be an integer") from None


def _float(mapping, key, default) -> float:
    try:
        return float(mapping.get(key, default))
    except ValueError:
        raise ConfigError(f"config key {key} must be a number") from None


def _boundary(text: str) -> BoundaryChoice:
    try:
        return parse_boundary(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


_POTENTIALS = {
    "triple": PotentialKind.TAYLOR22_TRIPLE_WELL,
    "sextic": PotentialKind.SEXTIC,
    "harmonic": PotentialKind.HARMONIC,
}


@dataclass(frozen=True)
class Settings:
    """Everything a worker needs; immutable and picklable."""

    cfg: LatticeConfig
    depth_unit: str
    boundary: BoundaryChoice
    a_over_aho: float | None = None
    a_sc_bohr: float | None = None
    branch: int = 1
    g1d: float = 0.0
    grid: Grid1D = field(default_factory=Grid1D)
    potential: str = "triple"
    m_states: int = 6

    def a_sc(self, cfg: LatticeConfig | None = None) -> float:
        """Scattering length in lattice units for ``cfg`` (a/a_ho takes precedence)."""
        cfg = cfg or self.cfg
        if self.a_over_aho is not None:
            return self.a_over_aho * cfg.a_ho
        if self.a_sc_bohr is not None:
            return cfg.length_from_bohr(self.a_sc_bohr)
        return 0.0

    def with_depth(self, value: float) -> "Settings":
        cfg = LatticeConfig.from_depth(value, self.depth_unit, lambda_um=self.cfg.lambda_um,
                                       mass_amu=self.cfg.mass_amu)
        return replace(self, cfg=cfg)


def settings_from_mapping(m: dict) -> Settings:
    cfg = lattice_config_from_mapping(m)
    a_aho = _float(m, "a_over_aho", "nan")
    a_bohr = _float(m, "a_sc_bohr", "nan")
    half = _float(m, "grid_half_width", 2.0) * cfg.spacing
    potential = m.get("potential", "triple")
    if potential not in _POTENTIALS:
        raise ConfigError(f"potential must be one of {sorted(_POTENTIALS)}, got {potential!r}")
    try:
        grid = Grid1D(-half, half, _int(m, "grid_n", 513), _int(m, "stencil", 3))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    m_states = _int(m, "m_states", 6)
    if not 1 <= m_states <= 12:
        raise ConfigError("m_states must lie in [1, 12]")
    return Settings(
        cfg=cfg,
        depth_unit=m.get("depth_unit", "Er"),
        boundary=_boundary(m.get("boundary", "3pi/2")),
        a_over_aho=None if math.isnan(a_aho) else a_aho,
        a_sc_bohr=None if math.isnan(a_bohr) else a_bohr,
        branch=_int(m, "branch", 1),
        g1d=_float(m, "g1d_value", 0.0),
        grid=grid,
        potential=potential,
        m_states=m_states,
    )


# ---------------------------------------------------------------- output


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".15g")
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return fmt(v) if not math.isfinite(v) else float(fmt(v))
    return v


@dataclass
class Table:
    name: str
    columns: list
    rows: list


@dataclass
class Manifest:
    subcommand: str
    config: dict
    outputs: list = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"hubfit {__version__}", f"schema {SCHEMA_VERSION}", f"subcommand {self.subcommand}"]
        out += [f"config {k} = {self.config[k]}" for k in sorted(self.config)]
        out += [f"output {p}" for p in self.outputs]
        return out


def write_table(table: Table, manifest: Manifest, out_dir: Path, fmt_name: str) -> Path:
    path = out_dir / f"{table.name}.{fmt_name}"
    if fmt_name == "csv":
        text = "".join(f"# {line}\n" for line in manifest.lines())
        text += ",".join(table.columns) + "\n"
        text += "".join(",".join(fmt(v) for v in row) + "\n" for row in table.rows)
    else:
        doc = {
            "manifest": manifest.lines(),
            "columns": list(table.columns),
            "rows": [[_json_value(v) for v in row] for row in table.rows],
        }
        text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    path.write_text(text, encoding="utf-8")
    return path


# ---------------------------------------------------------------- parallel map


def _guarded(fn, item):
    try:
        return fn(item), ""
    except Exception as exc:  # recorded per point, the sweep continues
        return None, f"{type(exc).__name__}: {exc}".replace(",", ";").replace("\n", " ")


def _call(args):
    fn, item = args
    return _guarded(fn, item)


def pmap(fn, items, jobs: int):
    """Ordered map with per-item error capture; a process pool when jobs > 1."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [_guarded(fn, it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_call, [(fn, it) for it in items]))


def _rows(results, n_values: int, prefix=lambda item: []):
    rows = []
    for item, (values, err) in results:
        vals = values if values is not None else [math.nan] * n_values
        rows.append(list(prefix(item)) + list(vals) + [err])
    return rows


# ---------------------------------------------------------------- point functions (top level: picklable)


def _bh_point(args):
    s, boundary = args
    a = s.a_sc()
    p = bh_parameters(s.cfg, boundary, a)
    e = ebh_parameters(s.cfg, boundary, a, base=p)
    A = correction_factor(s.cfg, boundary)
    uh = busch.u_harm(s.cfg, a, s.branch) if a else 0.0
    uc = A * uh
    return [p.J, e.J2, p.eps0, p.eps1, p.delta, A, p.U, uh, uc, e.U1, e.U2, validity_ratio(uc, s.cfg)]


BH_COLUMNS = ["J", "J2", "eps0", "eps1", "delta", "A", "U_BH", "U_harm", "U_corr", "U1", "U2", "validity_corr"]


def _spectrum_point(args):
    s, a_ratio = args
    cfg, b = s.cfg, s.boundary
    a = a_ratio * cfg.a_ho
    ref = bh_parameters(cfg, b, 0.0)
    reps = {"BH": bh_parameters(cfg, b, a, "BH")}
    if a_ratio == 0 or s.branch == 1 or a_ratio > 0:
        reps["harm"] = bh_parameters(cfg, b, a, "harm", s.branch)
        reps["corr"] = bh_parameters(cfg, b, a, "corr", s.branch)
    out = []
    for name, p in reps.items():
        e = bhmodel.bh_spectrum(p)
        out.append((name, e, p.U))
    ep = ebh_parameters(cfg, b, a, base=reps["BH"])
    out.append(("EBH", bhmodel.ebh_spectrum(ep), ep.base.U))
    u_corr = reps.get("corr", reps["BH"]).U
    rows = []
    for name, e, U in out:
        eta = bhmodel.rescale_eta(e, ref)
        etap = bhmodel.rescale_eta_prime(e, ref, u_corr)
        rows.append([name, U] + list(e.energies) + list(eta) + list(etap))
    return rows


def _oracle_point(args):
    s, g = args
    kind = _POTENTIALS[s.potential]
    spec = two_particle_ed(kind, s.cfg, s.grid, g, s.m_states)
    return list(spec.energies) + [spec.convergence, spec.wall_amplitude]


def _fit_point(args):
    step1_params, energies = args
    rep = fit_interaction(energies, step1_params)
    return [rep.params.J, rep.params.eps0, rep.params.eps1, rep.params.U, rep.residual, rep.converged, rep.offset]


QUANTITIES = (
    "a_over_aho", "J", "J2", "eps0", "eps1", "delta", "delta_eps0", "A", "U_BH", "U_harm", "U_corr",
    "U1", "U2", "validity_corr", "busch_eps", "U_BH_1d", "U_opt_1d", "U_sext_1d", "E5_minus_E2",
    "E5_minus_E2_closed",
)


def _point_settings(s: Settings, axis: str, value: float) -> tuple[Settings, float]:
    """Settings for one sweep point and the scattering length (lattice units) there."""
    if axis == "V0":
        s = s.with_depth(value)
        return s, s.a_sc()
    if axis == "a_sc":
        return s, value * s.cfg.a_ho
    if axis == "inv_a_sc":
        return s, (math.copysign(math.inf, value) if value == 0 else 1.0 / value) * s.cfg.a_ho
    return replace(s, g1d=value), s.a_sc()


def _sweep_point(args):
    s, axis, value, quantities = args
    s, a = _point_settings(s, axis, value)
    cfg, b = s.cfg, s.boundary
    cache = {}

    def get(q):
        if q in cache:
            return cache[q]
        if q == "a_over_aho":
            v = cfg.a_ratio(a)
        elif q == "J":
            v = hopping_J(cfg, b)
        elif q == "J2":
            v = next_hopping_J2(cfg, b)
        elif q == "eps0":
            v = onsite_eps(cfg, b, 0)
        elif q == "eps1":
            v = onsite_eps(cfg, b, 1)
        elif q == "delta":
            v = get("eps1") - get("eps0")
        elif q == "delta_eps0":
            v = onsite_shift(cfg, b, 0)
        elif q == "A":
            v = correction_factor(cfg, b)
        elif q == "U_BH":
            v = u_bh(cfg, b, a)
        elif q == "U_harm":
            v = busch.u_harm(cfg, a, s.branch) if a else 0.0
        elif q == "U_corr":
            v = get("A") * get("U_harm")
        elif q in ("U1", "U2"):
            e = ebh_parameters(cfg, b, a, base=bh_parameters(cfg, b, 0.0))
            cache["U1"], cache["U2"] = e.U1, e.U2
            v = cache[q]
        elif q == "validity_corr":
            v = validity_ratio(get("U_corr"), cfg)
        elif q == "busch_eps":
            v = busch.busch_energy(cfg.a_ratio(a), s.branch)
        elif q == "U_BH_1d":
            v = u_bh_1d(cfg, s.g1d, b)
        elif q == "U_opt_1d":
            v = extract_u_opt_1d(cfg, s.grid, s.g1d).params.U
        elif q == "U_sext_1d":
            v = u_sext_1d(cfg, s.grid, s.g1d)
        elif q in ("E5_minus_E2", "E5_minus_E2_closed"):
            gap = bhmodel.e5_minus_e2(bh_parameters(cfg, b, 0.0))
            cache["E5_minus_E2"], cache["E5_minus_E2_closed"] = gap.numerical, gap.closed_form
            v = cache[q]
        else:
            raise ConfigError(f"unknown quantity {q!r}")
        cache[q] = v
        return v

    return [get(q) for q in quantities]


# ---------------------------------------------------------------- subcommands


def _grid_from(m: dict, key: str = "grid") -> list[float]:
    if key in m:
        vals = _floats(m[key], key)
    elif f"{key}_start" in m:
        start, stop = _float(m, f"{key}_start", 0), _float(m, f"{key}_stop", 0)
        num = _int(m, f"{key}_num", 2)
        vals = list(np.linspace(start, stop, num)) if num > 0 else []
    else:
        raise ConfigError(f"missing config key: {key}")
    if not vals:
        raise ConfigError(f"config key {key} gives an empty grid")
    d = np.diff(vals)
    if len(vals) > 1 and not (np.all(d > 0) or np.all(d < 0)):
        raise ConfigError(f"grid {key} must be strictly monotone")
    return [float(v) for v in vals]


def cmd_bands(m, s, jobs):
    n_bands, n_k = _int(m, "n_bands", 4), _int(m, "n_k", 64)
    if n_bands < 1 or n_k < 16:
        raise ConfigError("n_bands must be >= 1 and n_k >= 16")
    ks = np.append(k_grid(n_k), 1.0)
    e = band_energies(s.cfg, ks, n_bands)
    rows = [[k] + list(r) for k, r in zip(ks, e)]
    disp = Table("bands", ["k"] + [f"E{n}" for n in range(n_bands)], rows)
    ext_rows = []
    Er = s.cfg.E_r
    for n in range(n_bands):
        x = band_extents(s.cfg, n, n_k)
        ext_rows.append([s.cfg.depth_Er, n, x.e_min / Er, x.e_max / Er, x.width / Er,
                         mean_band_energy(s.cfg, n, n_k) / Er, s.cfg.hbar_omega * (n + 0.5) / Er])
    ext = Table("bands_extents", ["V0_Er", "band", "e_min_Er", "e_max_Er", "width_Er", "mean_Er",
                                  "harmonic_level_Er"], ext_rows)
    return [disp, ext]


def cmd_wannier(m, s, jobs):
    stride = _int(m, "stride", 8)
    if stride < 1:
        raise ConfigError("stride must be >= 1")
    sites = [j for j in (-1, 0, 1) if abs(j) <= s.boundary.max_site]
    ws = {j: build_wannier(s.cfg, s.boundary, j) for j in sites}
    x = ws[0].x[::stride] / s.cfg.spacing
    cols = ["x_over_a"] + [f"w_{j}" for j in sites] + [f"dw_{j}" for j in sites]
    data = [x] + [ws[j].values[::stride] for j in sites] + [ws[j].derivative[::stride] for j in sites]
    return [Table("wannier", cols, [list(r) for r in zip(*data)])]


def _boundaries(m) -> list[BoundaryChoice]:
    return [_boundary(t) for t in m.get("boundaries", "3pi/2, 2pi, inf").split(",") if t.strip()]


def cmd_params(m, s, jobs):
    bs = _boundaries(m)
    res = pmap(_bh_point, [(s, b) for b in bs], jobs)
    rows = _rows(zip(bs, res), len(BH_COLUMNS), lambda b: [str(b), s.cfg.depth_Er, s.cfg.a_ratio(s.a_sc())])
    return [Table("params", ["boundary", "V0_Er", "a_over_aho"] + BH_COLUMNS + ["error"], rows)]


def _busch_row(t):
    vals = []
    for n in (0, 1, 2):
        try:
            vals.append(busch.busch_energy_inv(t, n) if n or t >= 0 else math.nan)
        except ValueError:
            vals.append(math.nan)
    return vals + [vals[0] - 1.5, vals[1] - 1.5]


def cmd_busch(m, s, jobs):
    grid = _grid_from({"inv_a_start": "-5", "inv_a_stop": "5", "inv_a_num": "101", **m}, "inv_a")
    res = pmap(_busch_row, grid, jobs)
    cols = ["inv_a", "eps_branch0", "eps_branch1", "eps_branch2", "dE_branch0", "dE_branch1", "error"]
    return [Table("busch", cols, _rows(zip(grid, res), 5, lambda t: [t]))]


def cmd_spectrum(m, s, jobs):
    grid = _floats(m.get("a_over_aho_list", m.get("a_over_aho", "0")), "a_over_aho_list")
    res = pmap(_spectrum_point, [(s, a) for a in grid], jobs)
    cols = (["a_over_aho", "source", "U"] + [f"E{i}" for i in range(1, 7)] + [f"eta{i}" for i in range(1, 7)]
            + [f"etap{i}" for i in range(1, 7)] + ["error"])
    rows = []
    for a, (blocks, err) in zip(grid, res):
        if blocks is None:
            rows.append([a, "", math.nan] + [math.nan] * 18 + [err])
        else:
            rows += [[a] + r + [""] for r in blocks]
    return [Table("spectrum", cols, rows)]


def cmd_oracle(m, s, jobs):
    gs = _floats(require_key(m, "g1d"), "g1d")
    if not gs:
        raise ConfigError("config key g1d gives an empty list")
    res = pmap(_oracle_point, [(s, g) for g in gs], jobs)
    cols = ["potential", "g1d"] + [f"E{i}" for i in range(1, s.m_states + 1)] + ["convergence", "wall_amplitude", "error"]
    return [Table("oracle", cols, _rows(zip(gs, res), s.m_states + 2, lambda g: [s.potential, g]))]


def require_key(m, key):
    if key not in m:
        raise ConfigError(f"missing config key: {key}")
    return m[key]


def read_reference(path: Path):
    """Rows of a reference CSV: (coupling value, six energies).  '#' lines are skipped."""
    lines = [ln for ln in path.read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ConfigError(f"reference file {path} has no data")
    head = lines[0].split(",")
    try:
        idx = [head.index(f"E{i}") for i in range(1, 7)]
    except ValueError:
        raise ConfigError(f"reference file {path} needs columns E1..E6") from None
    key = next((c for c in ("g1d", "a_over_aho", "a_sc") if c in head), None)
    out = []
    for ln in lines[1:]:
        f = ln.split(",")
        try:
            out.append((float(f[head.index(key)]) if key else 0.0, [float(f[i]) for i in idx]))
        except (ValueError, IndexError):
            raise ConfigError(f"malformed reference row: {ln!r}") from None
    return key or "row", out


def cmd_fit(m, s, jobs, config_dir: Path):
    path = Path(require_key(m, "reference"))
    if not path.is_absolute():
        path = config_dir / path
    if not path.exists():
        raise ConfigError(f"reference file not found: {path}")
    key, rows = read_reference(path)
    zero = [e for c, e in rows if c == 0]
    if not zero:
        raise ConfigError("reference needs a non-interacting row (coupling 0) for step (i)")
    step1 = fit_noninteracting(zero[0])
    res = pmap(_fit_point, [(step1.params, e) for _, e in rows], jobs)
    cols = [key, "J", "eps0", "eps1", "U", "residual", "converged", "offset", "error"]
    out = _rows(zip([c for c, _ in rows], res), 7, lambda c: [c])
    return [Table("fit", cols, out)]


def cmd_sweep(m, s, jobs):
    axis = require_key(m, "axis")
    if axis not in AXES:
        raise ConfigError(f"axis must be one of {AXES}, got {axis!r}")
    grid = _grid_from(m)
    qs = [q.strip() for q in require_key(m, "quantities").split(",") if q.strip()]
    bad = [q for q in qs if q not in QUANTITIES]
    if bad or not qs:
        raise ConfigError(f"unknown quantities {bad}; choose from {QUANTITIES}")
    res = pmap(_sweep_point, [(s, axis, v, tuple(qs)) for v in grid], jobs)
    return [Table("sweep", [axis] + qs + ["error"], _rows(zip(grid, res), len(qs), lambda v: [v]))]


# ---------------------------------------------------------------- canned figure sweeps


def _fig_sweep(name, s, axis, grid, qs, jobs, extra=None):
    res = pmap(_sweep_point, [(s, axis, v, tuple(qs)) for v in grid], jobs)
    extra_cols, extra_fn = extra or ([], lambda v: [])
    rows = _rows(zip(grid, res), len(qs), lambda v: [v] + extra_fn(v))
    return Table(name, [axis] + extra_cols + qs + ["error"], rows)


def _fig2_point(args):
    cfg = args
    out = []
    for n in range(4):
        x = band_extents(cfg, n)
        out += [x.e_min, x.e_max]
    return out + [mean_band_energy(cfg, 0) - (0.5 * cfg.hbar_omega - 0.25 * cfg.E_r)]


def fig2(s, m, jobs):
    depths = [float(v) for v in range(2, 82, 2)]
    cfgs = [LatticeConfig.from_depth(v, "Er", lambda_um=s.cfg.lambda_um, mass_amu=s.cfg.mass_amu) for v in depths]
    cols = ["V0_Er", "hbar_omega"] + [f"band{n}_{e}" for n in range(4) for e in ("min", "max")] + [
        "mean0_minus_offset_law", "error"]
    res = pmap(_fig2_point, cfgs, jobs)
    return [Table("fig2", cols, _rows(zip(cfgs, res), 9, lambda c: [c.depth_Er, c.hbar_omega]))]


def fig3(s, m, jobs):
    return [replace(cmd_busch({}, s, jobs)[0], name="fig3")]


def _hw(s):
    return replace(s, depth_unit="hbar_omega")


def fig4(s, m, jobs):
    grid = [round(0.5 + 0.25 * i, 10) for i in range(23)]
    tabs = []
    for b in (THREE_HALVES_PI, TWO_PI):
        t = _fig_sweep(f"fig4_{b.n_cells}cells", replace(_hw(s), boundary=b), "V0", grid, ["A"], jobs)
        tabs.append(t)
    return tabs


def fig5(s, m, jobs):
    grid = [round(0.25 * i, 10) for i in range(1, 13)]
    return [_fig_sweep(f"fig5_{b.n_cells}cells", replace(_hw(s), boundary=b), "V0", grid,
                       ["eps0", "eps1", "delta", "delta_eps0"], jobs)
            for b in (THREE_HALVES_PI, TWO_PI, INFINITE)]


def fig6(s, m, jobs):
    grid = [round(0.25 * i, 10) for i in range(1, 13)]
    tabs = [_fig_sweep(f"fig6a_hopping_{b.n_cells}cells", replace(_hw(s), boundary=b), "V0", grid, ["J"], jobs)
            for b in (THREE_HALVES_PI, TWO_PI, INFINITE)]
    strong = replace(_hw(s), a_over_aho=None, a_sc_bohr=_float(m, "strong_a_sc_bohr", -4600.0),
                     g1d=_float(m, "strong_g1d", -0.5))
    tabs.append(_fig_sweep("fig6_interaction_strong", strong, "V0", grid,
                           ["a_over_aho", "U_BH", "U_harm", "U_corr", "validity_corr"], jobs))
    tabs.append(_fig_sweep("fig6_oracle_1d", strong, "V0", [1.0, 1.5, 2.0, 2.5, 3.0],
                           ["U_BH_1d", "U_opt_1d", "U_sext_1d"], jobs))
    return tabs


def fig7(s, m, jobs):
    grid = [round(0.25 * i, 10) for i in range(1, 13)]
    weak = replace(_hw(s), a_over_aho=None, a_sc_bohr=_float(m, "weak_a_sc_bohr", -180.0))
    return [_fig_sweep("fig7_interaction_weak", weak, "V0", grid,
                       ["a_over_aho", "U_BH", "U_harm", "U_corr"], jobs)]


def fig8(s, m, jobs):
    cfg = LatticeConfig.from_depth(1.7, "hbar_omega", lambda_um=s.cfg.lambda_um, mass_amu=s.cfg.mass_amu)
    base = replace(s, cfg=cfg)
    grid = [round(-4.0 + 0.1 * i, 10) for i in range(81)]
    tabs = []
    for br in (0, 1):
        t = _fig_sweep(f"fig8_branch{br}", replace(base, branch=br), "inv_a_sc", grid,
                       ["U_BH", "U_harm", "U_corr"], jobs)
        tabs.append(t)
    return tabs


def fig9(s, m, jobs):
    cfg = LatticeConfig.from_depth(1.7, "hbar_omega", lambda_um=s.cfg.lambda_um, mass_amu=s.cfg.mass_amu)
    grid = [round(-3.0 + 0.1 * i, 10) for i in range(61)]
    curves = bhmodel.estimate_resonance_spectrum(cfg, s.boundary, grid)
    cols = ["inv_a"] + [f"upper_E{i}" for i in range(1, 7)] + [f"lower_E{i}" for i in range(1, 7)]
    cols += [f"dimer_{a}{b}" for a, b in curves.dimers] + [f"mixed_0{n}" for n in curves.mixed]
    rows = []
    for i, t in enumerate(curves.inv_a):
        rows.append([t] + list(curves.bh_upper[i]) + list(curves.bh_lower[i])
                    + [v[i] for v in curves.dimers.values()] + list(curves.mixed.values()))
    return [Table("fig9", cols, rows)]


def fig10(s, m, jobs):
    grid = [round(0.25 * i, 10) for i in range(2, 13)]
    strong = replace(_hw(s), boundary=TWO_PI, a_over_aho=None, a_sc_bohr=_float(m, "strong_a_sc_bohr", -4600.0))
    return [_fig_sweep("fig10", strong, "V0", grid,
                       ["J", "J2", "U_BH", "U1", "U2", "E5_minus_E2", "E5_minus_E2_closed"], jobs)]


FIGURE_FUNCS = {"fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6": fig6, "fig7": fig7,
                "fig8": fig8, "fig9": fig9, "fig10": fig10}


def cmd_figures(m, s, jobs, only):
    names = FIGURES if not only else [n.strip() for n in only.split(",")]
    bad = [n for n in names if n not in FIGURE_FUNCS]
    if bad:
        raise ConfigError(f"unknown figure(s) {bad}; choose from {FIGURES}")
    tables = []
    for n in names:
        tables += FIGURE_FUNCS[n](s, m, jobs)
    return tables


# ---------------------------------------------------------------- entry point


def _jobs(arg) -> int:
    raw = arg if arg is not None else os.environ.get("HUBFIT_JOBS", "1")
    try:
        j = int(raw)
    except ValueError:
        raise ConfigError(f"--jobs / HUBFIT_JOBS must be an integer, got {raw!r}") from None
    if j < 1:
        raise ConfigError("--jobs must be >= 1")
    return j


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hubfit", description="BH parameters for two bosons in a triple well")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--only", default=None, help="comma list of figures (figures subcommand)")
    p.add_argument("--jobs", default=None, help="worker processes (default: $HUBFIT_JOBS or 1)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        if not args.config.exists():
            raise ConfigError(f"config file not found: {args.config}")
        m = read_config(args.config)
        s = settings_from_mapping(m)
        jobs = _jobs(args.jobs)
        sub = args.subcommand
        if sub == "fit":
            tables = cmd_fit(m, s, jobs, args.config.parent)
        elif sub == "figures":
            tables = cmd_figures(m, s, jobs, args.only)
        else:
            tables = globals()[f"cmd_{sub}"](m, s, jobs)
    except ConfigError as exc:
        print(f"hubfit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        where = traceback.extract_tb(exc.__traceback__)[-1]
        module = Path(where.filename).stem
        print(f"hubfit: numerical failure in {module}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    args.out.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(args.subcommand, dict(m), [f"{t.name}.{args.format}" for t in tables])
    for t in tables:
        write_table(t, manifest, args.out, args.format)
    log.info("%s: wrote %d table(s) to %s in %.2f s", args.subcommand, len(tables), args.out,
             time.perf_counter() - t0)
    return EXIT_OK


def main():
    sys.exit(run())
