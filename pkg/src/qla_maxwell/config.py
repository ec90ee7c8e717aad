"""Run configuration read from a TOML file.

Top-level keys: steps, snapshot_interval, potential_mode, potential_form,
output_dir, seed; tables [grid], [medium], [pulse]. Unknown keys anywhere are
rejected. See README for a full example.
"""
from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .evolution import POTENTIAL_FORMS, POTENTIAL_MODES
from .lattice import LatticeGrid
from .media import INDEX_AXES, Cone, Cylinder, Homogeneous, MediumSpec, Raster

POLARIZATIONS = ("Ez_By", "Ey_Bz")
MEDIUM_KINDS = ("vacuum", "homogeneous", "cylinder", "cone", "raster")

_MEDIUM_KEYS = {
    "vacuum": set(),
    "homogeneous": {"n"},
    "cylinder": {"center", "diameter", "n_max", "boundary_width"},
    "cone": {"center", "base_diameter", "n_max", "edge_rounding"},
    "raster": {"path"},
}
_MEDIUM_REQUIRED = {
    "vacuum": set(),
    "homogeneous": {"n"},
    "cylinder": {"center", "diameter", "n_max", "boundary_width"},
    "cone": {"center", "base_diameter", "n_max"},
    "raster": {"path"},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridConfig:
    nx: int = 512
    ny: int = 512
    delta: float = 0.1

    def build(self) -> LatticeGrid:
        return LatticeGrid(self.nx, self.ny, self.delta)


@dataclass(frozen=True)
class MediumConfig:
    kind: str = "vacuum"
    params: dict = field(default_factory=dict)
    axes: tuple[str, ...] = INDEX_AXES

    def build(self, base_dir: Path = Path(".")) -> MediumSpec:
        p = self.params
        if self.kind == "vacuum":
            return MediumSpec()
        if self.kind == "homogeneous":
            prof = Homogeneous(float(p["n"]))
        elif self.kind == "cylinder":
            prof = Cylinder(tuple(map(float, p["center"])), float(p["diameter"]),
                            float(p["n_max"]), float(p["boundary_width"]))
        elif self.kind == "cone":
            prof = Cone(tuple(map(float, p["center"])), float(p["base_diameter"]),
                        float(p["n_max"]), float(p.get("edge_rounding", 0.0)))
        else:
            from .snapshot import read_raster

            path = Path(p["path"])
            vals = read_raster(path if path.is_absolute() else base_dir / path)
            if vals.ndim == 3:
                over = {a: Raster(vals[i]) for i, a in enumerate(INDEX_AXES) if a in self.axes}
                return MediumSpec(Homogeneous(), over)
            prof = Raster(vals)
        return MediumSpec(Homogeneous(), {a: prof for a in self.axes})


@dataclass(frozen=True)
class PulseConfig:
    polarization: str = "Ez_By"
    center_x: float = 100.0
    width: float = 50.0
    amplitude: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    grid: GridConfig = GridConfig()
    medium: MediumConfig = MediumConfig()
    pulse: PulseConfig = PulseConfig()
    steps: int = 1000
    snapshot_interval: int = 100
    potential_mode: str = "halfway_and_end"
    potential_form: str = "skew"
    output_dir: str = "qla_output"
    seed: int = 0
    base_dir: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.steps < 0:
            raise ConfigError("steps must be >= 0")
        if self.snapshot_interval < 0:
            raise ConfigError("snapshot_interval must be >= 0 (0 = first and last only)")
        if self.potential_mode not in POTENTIAL_MODES:
            raise ConfigError(f"potential_mode must be one of {POTENTIAL_MODES}")
        if self.potential_form not in POTENTIAL_FORMS:
            raise ConfigError(f"potential_form must be one of {POTENTIAL_FORMS}")
        if self.pulse.polarization not in POLARIZATIONS:
            raise ConfigError(f"polarization must be one of {POLARIZATIONS}")
        if not self.pulse.width > 0:
            raise ConfigError("pulse width must be positive")
        if self.medium.kind not in MEDIUM_KINDS:
            raise ConfigError(f"medium kind must be one of {MEDIUM_KINDS}")
        bad_axes = set(self.medium.axes) - set(INDEX_AXES)
        if bad_axes:
            raise ConfigError(f"unknown medium axes {sorted(bad_axes)}")
        try:
            self.grid.build()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def with_overrides(self, **kw) -> "RunConfig":
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update({k: v for k, v in kw.items() if v is not None})
        return RunConfig(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        d["medium"] = {"kind": self.medium.kind, "axes": list(self.medium.axes), **self.medium.params}
        return d

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _take(table: dict, allowed: set, where: str) -> dict:
    if not isinstance(table, dict):
        raise ConfigError(f"[{where}] must be a table")
    extra = set(table) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in [{where}]: {', '.join(sorted(extra))}")
    return dict(table)


def _typed(d: dict, key: str, typ, where: str):
    if key not in d:
        return
    v = d[key]
    ok = isinstance(v, typ) and not (typ in (int, (int, float)) and isinstance(v, bool))
    if not ok:
        raise ConfigError(f"{where}.{key} has the wrong type ({type(v).__name__})")


def config_from_dict(data: dict[str, Any], base_dir=None) -> RunConfig:
    top = _take(data, {"grid", "medium", "pulse", "steps", "snapshot_interval", "potential_mode",
                       "potential_form", "output_dir", "seed"}, "top level")
    num = (int, float)
    g = _take(top.pop("grid", {}), {"nx", "ny", "delta"}, "grid")
    for k, t in (("nx", int), ("ny", int), ("delta", num)):
        _typed(g, k, t, "grid")
    p = _take(top.pop("pulse", {}), {"polarization", "center_x", "width", "amplitude"}, "pulse")
    for k, t in (("polarization", str), ("center_x", num), ("width", num), ("amplitude", num)):
        _typed(p, k, t, "pulse")
    m = dict(top.pop("medium", {"kind": "vacuum"}))
    if not isinstance(m, dict):
        raise ConfigError("[medium] must be a table")
    kind = m.pop("kind", "vacuum")
    if kind not in MEDIUM_KINDS:
        raise ConfigError(f"medium kind must be one of {MEDIUM_KINDS}, got {kind!r}")
    axes = m.pop("axes", list(INDEX_AXES))
    if not isinstance(axes, list) or not all(isinstance(a, str) for a in axes):
        raise ConfigError("medium.axes must be a list of axis names")
    _take(m, _MEDIUM_KEYS[kind], f"medium ({kind})")
    missing = _MEDIUM_REQUIRED[kind] - set(m)
    if missing:
        raise ConfigError(f"medium ({kind}) is missing {', '.join(sorted(missing))}")
    for k, t in (("steps", int), ("snapshot_interval", int), ("seed", int),
                 ("potential_mode", str), ("potential_form", str), ("output_dir", str)):
        _typed(top, k, t, "top level")
    try:
        return RunConfig(
            grid=GridConfig(**g),
            medium=MediumConfig(kind, m, tuple(axes)),
            pulse=PulseConfig(**p),
            base_dir=None if base_dir is None else str(base_dir),
            **top,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(data, base_dir=path.parent)
