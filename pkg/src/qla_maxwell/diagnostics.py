"""Energy and divergence diagnostics.

Energy is the mean of sum_i q_i^2 over sites, which is exactly what the
unitary steps conserve. Divergences use periodic central differences per
lattice unit and are normalised by the initial peak of |B| (or |D|).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .lattice import QubitField
from .media import RefractiveField


def energy(field: QubitField) -> float:
    q = field.amplitudes
    return float(np.sum(q * q) / (q.shape[0] * q.shape[1]))


def _ddx(a):
    return 0.5 * (np.roll(a, -1, axis=1) - np.roll(a, 1, axis=1))


def _ddy(a):
    return 0.5 * (np.roll(a, -1, axis=0) - np.roll(a, 1, axis=0))


def div_b(field: QubitField) -> np.ndarray:
    """dBx/dx + dBy/dy per lattice unit (B = H with mu0 = 1)."""
    q = field.amplitudes
    return _ddx(q[..., 3]) + _ddy(q[..., 4])


def displacement(field: QubitField, media: RefractiveField) -> np.ndarray:
    """D_i = n_i^2 E_i = n_i q_i for i = x, y, z, shape (ny, nx, 3)."""
    return field.amplitudes[..., :3] * np.moveaxis(media.n, 0, -1)


def div_d(field: QubitField, media: RefractiveField) -> np.ndarray:
    d = displacement(field, media)
    return _ddx(d[..., 0]) + _ddy(d[..., 1])


def b_scale(field: QubitField) -> float:
    q = field.amplitudes
    return float(np.max(np.sqrt(q[..., 3] ** 2 + q[..., 4] ** 2 + q[..., 5] ** 2)))


def d_scale(field: QubitField, media: RefractiveField) -> float:
    return float(np.max(np.linalg.norm(displacement(field, media), axis=-1)))


@dataclass(frozen=True)
class EnergyRecord:
    step: int
    energy: float
    relative_drift: float


@dataclass(frozen=True)
class DivergenceReport:
    step: int
    max_div_b: float  # normalised by the initial peak |B|
    max_div_d: float  # normalised by the initial peak |D|
    argmax_div_b: tuple[int, int]  # (y, x) of the largest |div B|


class DiagnosticsTracker:
    """Collects energy and divergence records against the initial field."""

    def __init__(self, initial: QubitField, media: RefractiveField):
        self.media = media
        self.e0 = energy(initial)
        self.b0 = b_scale(initial)
        self.d0 = d_scale(initial, media)
        self.energy_records: list[EnergyRecord] = []
        self.divergence_reports: list[DivergenceReport] = []

    def record(self, step: int, field: QubitField) -> tuple[EnergyRecord, DivergenceReport]:
        e = energy(field)
        drift = (e - self.e0) / self.e0 if self.e0 > 0 else 0.0
        er = EnergyRecord(step, e, drift)
        db = np.abs(div_b(field))
        dd = np.abs(div_d(field, self.media))
        k = np.unravel_index(int(np.argmax(db)), db.shape)
        dr = DivergenceReport(
            step,
            float(db[k]) / self.b0 if self.b0 > 0 else float(db[k]),
            float(np.max(dd)) / self.d0 if self.d0 > 0 else float(np.max(dd)),
            (int(k[0]), int(k[1])),
        )
        self.energy_records.append(er)
        self.divergence_reports.append(dr)
        return er, dr

    def max_relative_drift(self) -> float:
        return max((abs(r.relative_drift) for r in self.energy_records), default=0.0)


CSV_COLUMNS = ("step", "energy", "relative_drift", "max_div_b", "max_div_d")


def write_csv(path, energies: Iterable[EnergyRecord], divs: Iterable[DivergenceReport]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for e, d in zip(energies, divs):
            w.writerow([e.step, repr(e.energy), repr(e.relative_drift), repr(d.max_div_b), repr(d.max_div_d)])
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {c: np.array([float(r[c]) for r in rows]) for c in CSV_COLUMNS}
