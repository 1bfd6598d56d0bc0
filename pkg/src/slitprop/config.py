"""Scenario configuration trees: parsing, validation and preset lookup.

A configuration is a YAML mapping with ``schema_version: 1``::

    schema_version: 1
    name: my-run
    particle: {mass: 1.0, hbar: 1.0}
    geometry: {x0: -1.0, x1: 0.0, x_screen: 1.0, y0: 0.0, z0: 0.0}
    aperture: {type: slit, a: 0.01, b: 0.1}
    bc: dirichlet                  # or {lambda1: 1.0, lambda2: -0.5}
    t: 0.005                       # or a list of times
    method: exact
    grid: {z_min: -3, z_max: 3, n_z: 601, y: 0.0}
    quadrature: {relative_tolerance: 1.0e-8}

Aperture types are ``slit`` (``a`` half-height along z, ``b`` half-width along
y, optional ``center_z``/``center_y``), ``double`` (``center_offset_z``, ``a``,
``b``) and ``double_literal`` (centres ``+-a``, half-height ``d``, half-width
``b``).  The grid's ``y`` is either a number or ``{y_min, y_max, n_y}``.

Field runs replace ``geometry`` and ``aperture`` by
``gravity: {g, z1, a, b, z_screen}`` and use a ``gravity*`` method; the grid's
``z`` axis then holds the in-plane screen coordinate ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .aperture import DoubleAperture, RectAperture, ScreenGrid, SlitScenario
from .errors import ConfigError, SlitpropError
from .gravity import GRAVITY_METHODS, GravityScenario
from .numerics import DEFAULT_SPEC, QuadratureSpec
from .propagators import BoundaryCondition, Particle

__all__ = [
    "SCHEMA_VERSION",
    "METHODS",
    "ScenarioConfig",
    "parse_config",
    "load_config",
    "list_presets",
    "preset_text",
    "load_preset",
]

SCHEMA_VERSION = 1
SLIT_METHODS = ("exact", "semiclassical", "truncation", "fourth_order")
METHODS = SLIT_METHODS + GRAVITY_METHODS

_TOP = {"schema_version", "name", "description", "particle", "geometry", "aperture", "bc",
        "t", "method", "grid", "quadrature", "gravity"}
_QUAD = {"relative_tolerance", "absolute_tolerance", "max_subdivisions",
         "panel_oscillation_budget"}


def _mapping(tree, key, allowed, required=()):
    node = tree.get(key) if key is not None else tree
    if not isinstance(node, dict):
        raise ConfigError(f"'{key}' must be a mapping")
    extra = set(node) - set(allowed)
    if extra:
        raise ConfigError(f"unknown keys in '{key}': {sorted(extra)}")
    missing = [k for k in required if k not in node]
    if missing:
        raise ConfigError(f"missing keys in '{key}': {missing}")
    return node


def _num(node, key, default=None, where=""):
    v = node.get(key, default)
    if v is None:
        raise ConfigError(f"missing number '{where}{key}'")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"'{where}{key}' must be a number")
    v = float(v)
    if not np.isfinite(v):
        raise ConfigError(f"'{where}{key}' must be finite")
    return v


def _count(node, key, where):
    v = node.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"'{where}{key}' must be an integer")
    if v < 1:
        raise ConfigError(f"'{where}{key}' must be at least 1 (empty grid)")
    return v


def _axis(lo, hi, n, label):
    if n == 1:
        if lo != hi:
            raise ConfigError(f"{label}: a single sample needs min == max")
        return np.array([lo])
    if not hi > lo:
        raise ConfigError(f"{label}: max must exceed min")
    return np.linspace(lo, hi, n)


def _bc(node):
    if isinstance(node, str):
        try:
            return BoundaryCondition.from_name(node)
        except SlitpropError as exc:
            raise ConfigError(str(exc)) from None
    if isinstance(node, dict):
        m = _mapping({"bc": node}, "bc", {"lambda1", "lambda2"}, ("lambda1", "lambda2"))
        return BoundaryCondition(_num(m, "lambda1", where="bc."), _num(m, "lambda2", where="bc."))
    raise ConfigError("'bc' must be a name or {lambda1, lambda2}")


def _aperture(node):
    kind = node.get("type") if isinstance(node, dict) else None
    if kind == "slit":
        m = _mapping({"aperture": node}, "aperture", {"type", "a", "b", "center_z", "center_y"},
                     ("a", "b"))
        w = "aperture."
        return RectAperture(half_width_y=_num(m, "b", where=w), half_height_z=_num(m, "a", where=w),
                            center_y=_num(m, "center_y", 0.0, w), center_z=_num(m, "center_z", 0.0, w))
    if kind == "double":
        m = _mapping({"aperture": node}, "aperture", {"type", "center_offset_z", "a", "b"},
                     ("center_offset_z", "a", "b"))
        w = "aperture."
        return DoubleAperture(center_offset_z=_num(m, "center_offset_z", where=w),
                              half_height_z=_num(m, "a", where=w), half_width_y=_num(m, "b", where=w))
    if kind == "double_literal":
        m = _mapping({"aperture": node}, "aperture", {"type", "a", "d", "b"}, ("a", "d", "b"))
        w = "aperture."
        return DoubleAperture.literal(_num(m, "a", where=w), _num(m, "d", where=w),
                                      _num(m, "b", where=w))
    raise ConfigError("aperture.type must be one of slit, double, double_literal")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated configuration ready to build library scenarios."""

    name: str
    particle: Particle
    bc: BoundaryCondition
    times: tuple
    method: str
    grid: ScreenGrid
    spec: QuadratureSpec = DEFAULT_SPEC
    aperture: object = None
    x0: float = 0.0
    x_screen: float = 0.0
    y0: float = 0.0
    z0: float = 0.0
    gravity: Optional[dict] = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def is_gravity(self) -> bool:
        return self.gravity is not None

    def with_method(self, method: str) -> "ScenarioConfig":
        _check_method(method, self.is_gravity)
        return _replace(self, method=method)

    def slit_scenario(self, t: float) -> SlitScenario:
        if self.is_gravity:
            raise ConfigError("configuration describes a field run")
        return SlitScenario(self.x0, self.x_screen, t, self.aperture, self.bc, self.particle,
                            self.y0, self.z0)

    def gravity_scenario(self, t: float) -> GravityScenario:
        if not self.is_gravity:
            raise ConfigError("configuration has no 'gravity' block")
        gr = self.gravity
        return GravityScenario(gr["z1"], gr["a"], gr["b"], t, gr["g"], self.bc, self.particle)


def _replace(cfg, **kw):
    from dataclasses import replace

    return replace(cfg, **kw)


def _check_method(method, gravity):
    allowed = GRAVITY_METHODS if gravity else SLIT_METHODS
    if method not in allowed:
        raise ConfigError(f"method {method!r} not available here; choose from {list(allowed)}")


def parse_config(tree) -> ScenarioConfig:
    """Validate a configuration tree and build a :class:`ScenarioConfig`.

    Raises
    ------
    ConfigError
        On any schema or domain violation, including an empty grid.
    """
    if not isinstance(tree, dict):
        raise ConfigError("configuration must be a mapping")
    extra = set(tree) - _TOP
    if extra:
        raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
    if tree.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}")
    try:
        return _build(tree)
    except ConfigError:
        raise
    except (SlitpropError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _build(tree):
    name = str(tree.get("name", "scenario"))
    if not name or any(c in name for c in "/\\"):
        raise ConfigError("'name' must be a plain file stem")
    pn = _mapping(tree, "particle", {"mass", "hbar"}) if "particle" in tree else {}
    particle = Particle(_num(pn, "mass", 1.0, "particle."), _num(pn, "hbar", 1.0, "particle."))
    bc = _bc(tree.get("bc", "free"))

    t = tree.get("t")
    ts = t if isinstance(t, list) else [t]
    if not ts:
        raise ConfigError("'t' must not be empty")
    times = tuple(_num({"t": v}, "t") for v in ts)
    if any(v <= 0 for v in times):
        raise ConfigError("times must be positive")

    gm = _mapping(tree, "grid", {"z_min", "z_max", "n_z", "y"}, ("z_min", "z_max", "n_z"))
    z = _axis(_num(gm, "z_min", where="grid."), _num(gm, "z_max", where="grid."),
              _count(gm, "n_z", "grid."), "grid.z")
    yn = gm.get("y", 0.0)
    if isinstance(yn, dict):
        ym = _mapping({"grid.y": yn}, "grid.y", {"y_min", "y_max", "n_y"}, ("y_min", "y_max", "n_y"))
        y = _axis(_num(ym, "y_min", where="grid.y."), _num(ym, "y_max", where="grid.y."),
                  _count(ym, "n_y", "grid.y."), "grid.y")
    else:
        y = np.array([_num(gm, "y", where="grid.")])
    grid = ScreenGrid(y, z)

    spec = DEFAULT_SPEC
    if "quadrature" in tree:
        qm = _mapping(tree, "quadrature", _QUAD)
        kw = {k: (int(v) if k == "max_subdivisions" else float(v)) for k, v in qm.items()}
        spec = DEFAULT_SPEC.replace(**kw)

    common = dict(name=name, particle=particle, bc=bc, times=times, grid=grid, spec=spec,
                  raw=tree)
    if "gravity" in tree:
        if "geometry" in tree or "aperture" in tree:
            raise ConfigError("a field run takes 'gravity' instead of 'geometry'/'aperture'")
        gm2 = _mapping(tree, "gravity", {"g", "z1", "a", "b", "z_screen"},
                       ("g", "z1", "a", "b", "z_screen"))
        grav = {k: _num(gm2, k, where="gravity.") for k in ("g", "z1", "a", "b", "z_screen")}
        if not grav["z_screen"] > grav["z1"]:
            raise ConfigError("gravity.z_screen must exceed gravity.z1")
        method = str(tree.get("method", "gravity"))
        _check_method(method, True)
        cfg = ScenarioConfig(method=method, gravity=grav, **common)
        for tt in times:
            cfg.gravity_scenario(tt)
        return cfg

    geo = _mapping(tree, "geometry", {"x0", "x1", "x_screen", "y0", "z0"}, ("x0", "x_screen"))
    x1 = _num(geo, "x1", 0.0, "geometry.")
    if "aperture" not in tree:
        raise ConfigError("missing 'aperture'")
    method = str(tree.get("method", "exact"))
    _check_method(method, False)
    cfg = ScenarioConfig(method=method, aperture=_aperture(tree["aperture"]),
                         x0=_num(geo, "x0", where="geometry.") - x1,
                         x_screen=_num(geo, "x_screen", where="geometry.") - x1,
                         y0=_num(geo, "y0", 0.0, "geometry."), z0=_num(geo, "z0", 0.0, "geometry."),
                         **common)
    for tt in times:
        cfg.slit_scenario(tt)
    return cfg


def load_config(path) -> ScenarioConfig:
    """Read and validate a YAML configuration file.

    Raises
    ------
    OSError
        If the file cannot be read.
    ConfigError
        If it does not parse or validate.
    """
    text = Path(path).read_text()
    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"YAML parse error: {exc}") from None
    return parse_config(tree)


def _preset_dir():
    return resources.files("slitprop") / "presets"


def list_presets() -> dict:
    """Preset names mapped to their one-line descriptions."""
    out = {}
    for entry in sorted(_preset_dir().iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".yaml"):
            tree = yaml.safe_load(entry.read_text())
            out[entry.name[:-5]] = tree.get("description", "")
    return out


def preset_text(name: str) -> str:
    """YAML source of a shipped preset."""
    entry = _preset_dir() / f"{name}.yaml"
    if not entry.is_file():
        raise ConfigError(f"unknown preset {name!r}")
    return entry.read_text()


def load_preset(name: str) -> ScenarioConfig:
    return parse_config(yaml.safe_load(preset_text(name)))
