"""Pulse initialisation, the run loop and on-disk output.

A run writes ``snap_<step>.qla`` files, ``diagnostics.csv`` and
``manifest.json`` into its output directory. No boundary conditions are
imposed anywhere: the lattice is periodic and the scatterer is only a
refractive-index field.
"""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import diagnostics as diag
from .config import RunConfig
from .evolution import EvolutionPlan, make_plan, step_inplace
from .lattice import LatticeGrid, QubitField
from .media import RefractiveField, sample_medium
from .snapshot import write_snapshot

log = logging.getLogger(__name__)

# full width of the pulse in units of its standard deviation
WIDTH_PER_SIGMA = 4.3
_VACUUM_TOL = 1e-3
_PULSE_SUPPORT = 1e-3
_FINITE_CHECK_EVERY = 50


class NonFiniteFieldError(ArithmeticError):
    def __init__(self, step: int):
        super().__init__(f"non-finite amplitudes detected at step {step}")
        self.step = step


def pulse_profile(x, center_x: float, width: float) -> np.ndarray:
    sigma = width / WIDTH_PER_SIGMA
    return np.exp(-((x - center_x) ** 2) / (2 * sigma * sigma))


def init_pulse(config: RunConfig, grid: LatticeGrid, media: RefractiveField) -> QubitField:
    """Right-moving Gaussian pulse, uniform in y.

    Ez_By: q2 = -A g, q4 = +A g. Ey_Bz: q1 = q5 = +A g.
    """
    p = config.pulse
    x, _ = grid.coords()
    g = pulse_profile(x, p.center_x, p.width)
    support = g > _PULSE_SUPPORT
    dev = np.max(np.abs(media.n[:, support] - 1.0)) if np.any(support) else 0.0
    if dev > _VACUUM_TOL:
        raise ValueError(
            f"pulse at x={p.center_x} (width {p.width}) overlaps a non-vacuum region "
            f"(|n - 1| up to {dev:.3g})"
        )
    q = np.zeros(grid.shape + (6,))
    a = float(p.amplitude)
    if p.polarization == "Ez_By":
        q[..., 2] = -a * g
        q[..., 4] = a * g
    else:
        q[..., 1] = a * g
        q[..., 5] = a * g
    return QubitField(grid, q)


def record_steps(steps: int, cadence: int) -> list[int]:
    """Steps at which snapshots and diagnostics are taken."""
    if cadence <= 0:
        return sorted({0, steps})
    return list(range(0, steps + 1, cadence))


class Simulation:
    """In-memory run state: grid, medium, plan and the current amplitudes."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.grid = config.grid.build()
        base = Path(config.base_dir) if config.base_dir else Path(".")
        self.media = sample_medium(config.medium.build(base), self.grid)
        self.plan: EvolutionPlan = make_plan(self.media, config.potential_mode, config.potential_form)
        self.initial = init_pulse(config, self.grid, self.media)
        self.q = self.initial.amplitudes.copy()
        self.step_index = 0

    @property
    def field(self) -> QubitField:
        return QubitField(self.grid, self.q, check=False)

    def advance(self, n: int) -> None:
        for _ in range(n):
            step_inplace(self.q, self.plan)
            self.step_index += 1
            if self.step_index % _FINITE_CHECK_EVERY == 0:
                self.check_finite()

    def check_finite(self) -> None:
        if not np.all(np.isfinite(self.q)):
            raise NonFiniteFieldError(self.step_index)


@dataclass
class SnapshotEntry:
    step: int
    path: str
    sha256: str


@dataclass
class SnapshotManifest:
    run_id: str
    config: dict
    snapshots: list[SnapshotEntry] = field(default_factory=list)
    diagnostics: str = "diagnostics.csv"
    root: Optional[Path] = None

    def to_json(self) -> str:
        d = {
            "run_id": self.run_id,
            "config": self.config,
            "snapshots": [vars(e) for e in self.snapshots],
            "diagnostics": self.diagnostics,
        }
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "SnapshotManifest":
        path = Path(path)
        d = json.loads(path.read_text())
        return cls(d["run_id"], d["config"], [SnapshotEntry(**e) for e in d["snapshots"]],
                   d["diagnostics"], path.parent)

    def verify(self) -> list[str]:
        """Problems found (missing files, checksum mismatches); empty if consistent."""
        root = self.root or Path(".")
        bad = []
        for e in self.snapshots:
            f = root / e.path
            if not f.exists():
                bad.append(f"missing {e.path}")
            elif _sha256(f) != e.sha256:
                bad.append(f"checksum mismatch {e.path}")
        return bad


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_id_for(config: RunConfig) -> str:
    return hashlib.sha256(config.canonical_json().encode()).hexdigest()[:16]


def run(config: RunConfig, output_dir=None,
        progress: Optional[Callable[[int, diag.EnergyRecord], None]] = None) -> SnapshotManifest:
    """Execute a configured run and write its outputs."""
    out = Path(output_dir or config.output_dir)
    if not out.is_absolute() and output_dir is None and config.base_dir:
        out = Path(config.base_dir) / out
    out.mkdir(parents=True, exist_ok=True)
    sim = Simulation(config)
    tracker = diag.DiagnosticsTracker(sim.initial, sim.media)
    manifest = SnapshotManifest(run_id_for(config), config.to_dict(), root=out)
    width = max(6, len(str(config.steps)))

    def snapshot():
        sim.check_finite()
        name = f"snap_{sim.step_index:0{width}d}.qla"
        write_snapshot(out / name, sim.field, sim.step_index)
        manifest.snapshots.append(SnapshotEntry(sim.step_index, name, _sha256(out / name)))

    for target in record_steps(config.steps, config.snapshot_interval):
        sim.advance(target - sim.step_index)
        snapshot()
        er, _ = tracker.record(sim.step_index, sim.field)
        log.info("step %d energy %.15g drift %.3e", sim.step_index, er.energy, er.relative_drift)
        if progress is not None:
            progress(sim.step_index, er)
    if sim.step_index < config.steps:
        # interval does not divide steps: finish the run, keep the final state
        sim.advance(config.steps - sim.step_index)
        snapshot()
    diag.write_csv(out / manifest.diagnostics, tracker.energy_records, tracker.divergence_reports)
    (out / "manifest.json").write_text(manifest.to_json())
    return manifest
