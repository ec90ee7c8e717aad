"""Storage and primitive transformations for the six-component qubit field.

The field lives on a periodic ``ny x nx`` lattice. Amplitudes are stored as a
real ``(ny, nx, 6)`` array with the component index fastest, in the order

    (n_x E_x, n_y E_y, n_z E_z, H_x, H_y, H_z)

(units with mu0 = 1). Axis 0 is y, axis 1 is x.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

NCOMP = 6
AXES = {"x": 1, "y": 0}


@dataclass(frozen=True)
class LatticeGrid:
    """Periodic 2D lattice. ``delta`` is the lattice spacing in physical units."""

    nx_sites: int
    ny_sites: int
    delta: float

    def __post_init__(self):
        if int(self.nx_sites) != self.nx_sites or int(self.ny_sites) != self.ny_sites:
            raise ValueError("site counts must be integers")
        if self.nx_sites < 4 or self.ny_sites < 4:
            raise ValueError(f"grid must be at least 4x4, got {self.nx_sites}x{self.ny_sites}")
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be positive, got {self.delta}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny_sites, self.nx_sites)

    @property
    def dt(self) -> float:
        """Time advanced by one step (diffusion ordering dt = delta**2)."""
        return self.delta**2

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Lattice index coordinates ``(x, y)`` as float arrays of shape (ny, nx)."""
        y, x = np.mgrid[0 : self.ny_sites, 0 : self.nx_sites]
        return x.astype(float), y.astype(float)


class QubitField:
    """Lattice amplitudes bound to their grid."""

    __slots__ = ("grid", "amplitudes")

    def __init__(self, grid: LatticeGrid, amplitudes: np.ndarray, check: bool = True):
        amplitudes = np.asarray(amplitudes, dtype=np.float64)
        expected = (grid.ny_sites, grid.nx_sites, NCOMP)
        if amplitudes.shape != expected:
            raise ValueError(f"amplitudes shape {amplitudes.shape} != {expected}")
        if check and not np.all(np.isfinite(amplitudes)):
            raise ValueError("field contains non-finite amplitudes")
        self.grid = grid
        self.amplitudes = np.ascontiguousarray(amplitudes)

    def copy(self) -> "QubitField":
        return QubitField(self.grid, self.amplitudes.copy(), check=False)

    def component(self, c: int) -> np.ndarray:
        return self.amplitudes[..., c]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.amplitudes * self.amplitudes)))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.amplitudes)))

    def __repr__(self):
        g = self.grid
        return f"QubitField({g.nx_sites}x{g.ny_sites}, delta={g.delta}, norm={self.norm():.6g})"


def zeros(grid: LatticeGrid) -> QubitField:
    return QubitField(grid, np.zeros((grid.ny_sites, grid.nx_sites, NCOMP)), check=False)


def new_field(grid: LatticeGrid, fill: Callable) -> QubitField:
    """Build a field from ``fill(x, y) -> 6-vector``.

    ``fill`` is called once with broadcastable coordinate arrays ``x, y`` of
    shape (ny, nx) and may return either a sequence of six arrays/scalars or
    an array whose last axis has length 6.
    """
    x, y = grid.coords()
    vals = fill(x, y)
    amp = np.zeros((grid.ny_sites, grid.nx_sites, NCOMP))
    if isinstance(vals, np.ndarray) and vals.ndim >= 1 and vals.shape[-1] == NCOMP:
        amp[...] = vals
    else:
        if len(vals) != NCOMP:
            raise ValueError(f"fill must return {NCOMP} components, got {len(vals)}")
        for c, v in enumerate(vals):
            amp[..., c] = v
    if not np.all(np.isfinite(amp)):
        raise ValueError("fill produced non-finite values")
    return QubitField(grid, amp, check=False)


def _check_components(components: Iterable[int]) -> tuple[int, ...]:
    comps = tuple(sorted(set(int(c) for c in components)))
    if not comps:
        raise ValueError("components must be non-empty")
    if comps[0] < 0 or comps[-1] >= NCOMP:
        raise ValueError(f"component index out of range: {comps}")
    return comps


def shift_array(amp: np.ndarray, components, axis: str, direction: int) -> np.ndarray:
    """Array-level :func:`shift`; returns a new array."""
    comps = _check_components(components)
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    ax = AXES[axis]
    out = amp.copy()
    for c in comps:
        out[..., c] = np.roll(amp[..., c], direction, axis=ax)
    return out


def shift(field: QubitField, components, axis: str, direction: int) -> QubitField:
    """Move the listed components one site along ``axis``.

    ``direction=+1`` carries the content of site ``i`` to site ``i + 1``
    (periodic). Other components are untouched.
    """
    return QubitField(field.grid, shift_array(field.amplitudes, components, axis, direction), check=False)


def pointwise_apply(field: QubitField, site_matrix) -> QubitField:
    """Replace each site's 6-vector by ``M(site) @ q``.

    ``site_matrix`` is either a (6, 6) array (same at every site), an array of
    shape (ny, nx, 6, 6), or a callable ``(x, y) -> (..., 6, 6)`` evaluated on
    the coordinate arrays.
    """
    if callable(site_matrix):
        x, y = field.grid.coords()
        m = np.asarray(site_matrix(x, y), dtype=float)
    else:
        m = np.asarray(site_matrix, dtype=float)
    if m.shape[-2:] != (NCOMP, NCOMP):
        raise ValueError(f"site matrix must be 6x6, got trailing shape {m.shape[-2:]}")
    if not np.all(np.isfinite(m)):
        raise ValueError("site matrix has non-finite entries")
    out = np.einsum("...ij,...j->...i", m, field.amplitudes)
    out = np.broadcast_to(out, field.amplitudes.shape)
    return QubitField(field.grid, np.array(out), check=False)
