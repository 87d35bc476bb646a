"""Experiment configuration files.

A configuration is a YAML mapping with the sections ``source``,
``targets``, ``sweep``, ``checks`` and ``output``::

    source:
      domain: {kind: interval, params: [0, 1]}   # interval | box | polygon | ball
      density: {kind: uniform}                   # uniform | affine | piecewise
      resolution: 512                            # cells per axis, 64..4096
    targets:
      family: shift          # shift | dilation | random-atoms | files | gn-sharpness
      base: {kind: grid, atoms: 200}             # grid | random | file
      direction: [1.0]
    sweep:
      values: [0.02, 0.04, 0.06]                 # or {start: .., stop: .., num: ..}
    checks:
      fits:                                      # log-log fits of sweep columns
        - {x: eps, y: bracket, slope: 2.0, tol: 0.1}
    seed: 0
    output: {dir: out, plots: true}

Sweep columns are ``eps``, ``bracket``, ``variance``, ``primal_variance``,
``lot_distance``, ``W1``, ``W2`` and ``strong_convexity_ratio`` for
measure families, and ``eps``, ``lhs``, ``rhs``, ``l2_squared`` for
``gn-sharpness`` (with ``targets.L``).
"""

from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from .errors import ConfigError, InvalidDomain
from .geometry import ConvexDomain, domain_from_spec
from .measures import GridDensity, density_from_spec

__all__ = ["ExperimentConfig", "load_config", "parse_config", "PRESETS", "preset", "build_source",
           "MEASURE_COLUMNS", "GN_COLUMNS"]

SECTIONS = {"source", "targets", "sweep", "checks", "output", "seed", "seeds", "name"}
FAMILIES = {"shift", "dilation", "random-atoms", "files", "gn-sharpness"}
MEASURE_COLUMNS = ["eps", "bracket", "variance", "primal_variance", "lot_distance", "W1", "W2",
                   "strong_convexity_ratio"]
GN_COLUMNS = ["eps", "lhs", "rhs", "l2_squared"]
MIN_RESOLUTION, MAX_RESOLUTION = 64, 4096


@dataclass
class ExperimentConfig:
    """Validated experiment description (see the module docstring)."""

    source: dict
    targets: dict
    sweep_values: list
    fits: list
    seed: int
    output_dir: str
    plots: bool
    name: str = "experiment"
    base_dir: str = "."
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def resolution(self) -> int:
        return int(self.source["resolution"])

    def domain(self) -> ConvexDomain:
        return domain_from_spec(self.source["domain"])

    def with_overrides(self, *, seed=None, resolution=None, output_dir=None,
                       need_sweep: bool = True) -> "ExperimentConfig":
        raw = copy.deepcopy(self.raw)
        if seed is not None:
            raw["seed"] = int(seed)
        if resolution is not None:
            raw.setdefault("source", {})["resolution"] = int(resolution)
        if output_dir is not None:
            raw.setdefault("output", {})["dir"] = str(output_dir)
        return parse_config(raw, self.base_dir, need_sweep=need_sweep)


def build_source(cfg_source: dict) -> GridDensity:
    dom = domain_from_spec(cfg_source["domain"])
    return GridDensity(dom, int(cfg_source["resolution"]), density_from_spec(cfg_source.get("density"), dom.dim))


def _sweep_values(sweep) -> list:
    if sweep is None:
        raise ConfigError("missing 'sweep' section")
    vals = sweep.get("values") if isinstance(sweep, dict) else sweep
    if isinstance(vals, dict):
        try:
            vals = np.linspace(float(vals["start"]), float(vals["stop"]), int(vals["num"])).tolist()
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"sweep range needs start, stop, num: {exc}") from None
    if not isinstance(vals, (list, tuple)):
        raise ConfigError("sweep values must be a list")
    if len(vals) == 0:
        raise ConfigError("sweep grid is empty")
    try:
        return [float(v) for v in vals]
    except (TypeError, ValueError):
        raise ConfigError("sweep values must be numbers") from None


def parse_config(raw: dict, base_dir: str = ".", *, need_sweep: bool = True) -> ExperimentConfig:
    """Validate a configuration mapping.

    Raises
    ------
    ConfigError
    """
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping")
    unknown = set(raw) - SECTIONS
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")
    src = dict(raw.get("source") or {})
    src.setdefault("domain", {"kind": "interval", "params": [0.0, 1.0]})
    try:
        dom = domain_from_spec(src["domain"])
    except (InvalidDomain, TypeError, ValueError) as exc:
        raise ConfigError(f"source.domain: {exc}") from None
    src.setdefault("resolution", 512 if dom.dim == 1 else 256)
    try:
        res = int(src["resolution"])
    except (TypeError, ValueError):
        raise ConfigError("source.resolution must be an integer") from None
    if not MIN_RESOLUTION <= res <= MAX_RESOLUTION:
        raise ConfigError(f"resolution {res} outside [{MIN_RESOLUTION}, {MAX_RESOLUTION}]")
    src["resolution"] = res
    try:
        density_from_spec(src.get("density"), dom.dim)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"source.density: {exc}") from None

    tg = dict(raw.get("targets") or {"family": "shift"})
    fam = tg.get("family", "shift")
    if fam not in FAMILIES:
        raise ConfigError(f"unknown target family {fam!r}")
    tg["family"] = fam
    if fam == "files":
        files = tg.get("files") or []
        if not files:
            raise ConfigError("targets.files is empty")
        resolved = []
        for f in files:
            p = f if os.path.isabs(f) else os.path.join(base_dir, f)
            if not os.path.exists(p):
                raise ConfigError(f"target file not found: {f}")
            resolved.append(p)
        tg["files"] = resolved
    base = dict(tg.get("base") or {"kind": "grid", "atoms": 200 if dom.dim == 1 else 16})
    if base.get("kind") not in ("grid", "random", "file"):
        raise ConfigError("targets.base.kind must be grid, random or file")
    if base["kind"] == "file":
        p = base.get("path", "")
        p = p if os.path.isabs(p) else os.path.join(base_dir, p)
        if not os.path.exists(p):
            raise ConfigError(f"base file not found: {base.get('path')}")
        base["path"] = p
    tg["base"] = base
    direction = tg.get("direction", [1.0] + [0.0] * (dom.dim - 1))
    if len(direction) != dom.dim:
        raise ConfigError("targets.direction has the wrong dimension")
    tg["direction"] = [float(v) for v in direction]
    tg["L"] = float(tg.get("L", 1.0))

    if fam == "files":
        values = list(range(len(tg["files"])))
        values = [float(v) for v in values]
    elif need_sweep:
        values = _sweep_values(raw.get("sweep"))
    else:
        values = _sweep_values(raw.get("sweep")) if raw.get("sweep") else [0.0]

    checks = raw.get("checks") or {}
    fits = checks.get("fits", []) if isinstance(checks, dict) else []
    columns = GN_COLUMNS if fam == "gn-sharpness" else MEASURE_COLUMNS
    clean = []
    for f in fits:
        if not isinstance(f, dict) or "x" not in f or "y" not in f:
            raise ConfigError("each fit needs 'x' and 'y'")
        if f["x"] not in columns or f["y"] not in columns:
            raise ConfigError(f"fit columns must be among {columns}")
        clean.append({"x": f["x"], "y": f["y"], "slope": f.get("slope"), "tol": float(f.get("tol", 0.1))})

    out = dict(raw.get("output") or {})
    seed = raw.get("seed", (raw.get("seeds") or [0])[0])
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ConfigError("seed must be an integer") from None
    return ExperimentConfig(src, tg, values, clean, seed, str(out.get("dir", "lotstab-out")),
                            bool(out.get("plots", True)), str(raw.get("name", "experiment")),
                            base_dir, copy.deepcopy(raw))


def load_config(path, *, need_sweep: bool = True) -> ExperimentConfig:
    """Read and validate a YAML configuration file."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    return parse_config(raw or {}, os.path.dirname(os.path.abspath(path)), need_sweep=need_sweep)


_EPS = [round(0.02 * k, 12) for k in range(1, 11)]

PRESETS = {
    "sharpness-1d": {
        "name": "sharpness-1d",
        "source": {"domain": {"kind": "interval", "params": [0, 1]}, "resolution": 512},
        "targets": {"family": "shift", "base": {"kind": "grid", "atoms": 200}},
        "sweep": {"values": _EPS},
        "checks": {"fits": [{"x": "eps", "y": "bracket", "slope": 2.0, "tol": 0.1},
                            {"x": "eps", "y": "variance", "slope": 2.0, "tol": 0.15}]},
    },
    "gn-sharpness": {
        "name": "gn-sharpness",
        "targets": {"family": "gn-sharpness", "L": 1.0},
        "sweep": {"values": [0.01, 0.02, 0.05, 0.1, 0.2]},
        "checks": {"fits": [{"x": "eps", "y": "lhs", "slope": 1.0, "tol": 1e-9},
                            {"x": "eps", "y": "l2_squared", "slope": 3.0, "tol": 1e-9}]},
    },
    "shift-1d": {
        "name": "shift-1d",
        "source": {"domain": {"kind": "interval", "params": [0, 1]}, "resolution": 512},
        "targets": {"family": "shift", "base": {"kind": "grid", "atoms": 200}},
        "sweep": {"values": _EPS},
        "checks": {"fits": [{"x": "W1", "y": "lot_distance", "slope": 1.0, "tol": 0.05}]},
    },
    "dilation-1d": {
        "name": "dilation-1d",
        "source": {"domain": {"kind": "interval", "params": [0, 1]}, "resolution": 512},
        "targets": {"family": "dilation", "base": {"kind": "grid", "atoms": 200}},
        "sweep": {"values": _EPS},
        "checks": {"fits": [{"x": "W1", "y": "lot_distance", "slope": 1.0, "tol": 0.05}]},
    },
    "translation-2d": {
        "name": "translation-2d",
        "source": {"domain": {"kind": "box", "params": [0, 0, 1, 1]}, "resolution": 256},
        "targets": {"family": "shift", "base": {"kind": "random", "atoms": 6}, "direction": [1.0, 0.0]},
        "sweep": {"values": [round(0.01 * k, 12) for k in range(1, 11)]},
        "checks": {"fits": [{"x": "W1", "y": "lot_distance", "slope": 1.0, "tol": 0.05}]},
    },
}


def preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return parse_config(copy.deepcopy(PRESETS[name]))
