"""Refractive-index fields for the dielectric scatterers and the Dyson map.

Profiles are evaluated in lattice units (x, y are site indices). Derivative
arrays are per lattice unit; divide by ``grid.delta`` for the physical
gradient.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .lattice import NCOMP, LatticeGrid, QubitField

INDEX_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class Homogeneous:
    n: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"refractive index must be >= 1, got {self.n}")

    def evaluate(self, x, y):
        n = np.full(np.shape(x), float(self.n))
        return n, np.zeros_like(n), np.zeros_like(n)

    def extent(self):
        return None


@dataclass(frozen=True)
class Cylinder:
    """Dielectric cylinder with a tanh boundary layer.

    n(r) = 1 + (n_max - 1) * (1 - tanh((r - R) / w)) / 2, R = diameter / 2.
    """

    center: tuple[float, float]
    diameter: float
    n_max: float
    boundary_width: float

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.diameter <= 0 or self.boundary_width <= 0:
            raise ValueError("diameter and boundary_width must be positive")

    def evaluate(self, x, y):
        cx, cy = self.center
        dx, dy = x - cx, y - cy
        r = np.hypot(dx, dy)
        u = (r - 0.5 * self.diameter) / self.boundary_width
        amp = self.n_max - 1.0
        n = 1.0 + amp * 0.5 * (1.0 - np.tanh(u))
        dn_dr = -amp * 0.5 / (self.boundary_width * np.cosh(u) ** 2)
        rs = np.where(r > 0, r, 1.0)
        return n, dn_dr * dx / rs, dn_dr * dy / rs

    def extent(self):
        return 0.5 * self.diameter + self.boundary_width


@dataclass(frozen=True)
class Cone:
    """Radially linear cone: n_max at the apex, 1 at the base edge.

    With ``edge_rounding > 0`` the slope switches off through a tanh of that
    width instead of abruptly at the base edge.
    """

    center: tuple[float, float]
    base_diameter: float
    n_max: float
    edge_rounding: float = 0.0

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.base_diameter <= 0 or self.edge_rounding < 0:
            raise ValueError("base_diameter must be positive, edge_rounding >= 0")

    def evaluate(self, x, y):
        cx, cy = self.center
        dx, dy = x - cx, y - cy
        r = np.hypot(dx, dy)
        rb = 0.5 * self.base_diameter
        amp = self.n_max - 1.0
        w = self.edge_rounding
        if w > 0:
            a = -2.0 * (r - rb) / w
            s = (0.5 * w / rb) * np.logaddexp(0.0, a)
            ds_dr = -(1.0 / rb) * 0.5 * (1.0 - np.tanh((r - rb) / w))
        else:
            s = np.clip(1.0 - r / rb, 0.0, None)
            ds_dr = np.where(r < rb, -1.0 / rb, 0.0)
        ds_dr = np.where(r > 0, ds_dr, 0.0)
        rs = np.where(r > 0, r, 1.0)
        return 1.0 + amp * s, amp * ds_dr * dx / rs, amp * ds_dr * dy / rs

    def extent(self):
        return 0.5 * self.base_diameter + self.edge_rounding


@dataclass(frozen=True)
class Raster:
    """User-supplied per-site index values, shape (ny, nx) or (3, ny, nx)."""

    values: np.ndarray = field(repr=False)

    def evaluate(self, x, y):
        v = np.asarray(self.values, dtype=float)
        if v.shape != np.shape(x):
            raise ValueError(f"raster shape {v.shape} does not match grid {np.shape(x)}")
        if np.any(v < 1 - 1e-12):
            raise ValueError("raster refractive index must be >= 1")
        # periodic central differences
        ddx = 0.5 * (np.roll(v, -1, axis=1) - np.roll(v, 1, axis=1))
        ddy = 0.5 * (np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0))
        return v.copy(), ddx, ddy

    def extent(self):
        return None


Profile = Union[Homogeneous, Cylinder, Cone, Raster]


@dataclass(frozen=True)
class MediumSpec:
    """Medium description: one profile for n_x, n_y, n_z unless overridden per axis."""

    profile: Profile = Homogeneous()
    overrides: Mapping[str, Profile] = field(default_factory=dict)

    def __post_init__(self):
        bad = set(self.overrides) - set(INDEX_AXES)
        if bad:
            raise ValueError(f"unknown index axes in overrides: {sorted(bad)}")

    def profile_for(self, axis: str) -> Profile:
        return self.overrides.get(axis, self.profile)


class RefractiveField:
    """Per-site refractive indices and their lattice-unit gradients.

    ``n``, ``dn_dx`` and ``dn_dy`` have shape (3, ny, nx); the leading index
    selects n_x, n_y, n_z.
    """

    def __init__(self, grid: LatticeGrid, n, dn_dx, dn_dy):
        n, dn_dx, dn_dy = (np.asarray(a, dtype=float) for a in (n, dn_dx, dn_dy))
        shape = (3, grid.ny_sites, grid.nx_sites)
        for name, a in (("n", n), ("dn_dx", dn_dx), ("dn_dy", dn_dy)):
            if a.shape != shape:
                raise ValueError(f"{name} has shape {a.shape}, expected {shape}")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} contains non-finite values")
        if np.any(n < 1 - 1e-12):
            raise ValueError("refractive index below vacuum value 1")
        self.grid = grid
        self.n = n
        self.dn_dx = dn_dx
        self.dn_dy = dn_dy
        for a in (self.n, self.dn_dx, self.dn_dy):
            a.setflags(write=False)

    @property
    def n_x(self):
        return self.n[0]

    @property
    def n_y(self):
        return self.n[1]

    @property
    def n_z(self):
        return self.n[2]

    def is_homogeneous(self) -> bool:
        return not (np.any(self.dn_dx) or np.any(self.dn_dy))


def _check_fits(profile: Profile, grid: LatticeGrid):
    ext = profile.extent()
    if ext is None:
        return
    cx, cy = profile.center
    pad = getattr(profile, "boundary_width", 0.0) or getattr(profile, "edge_rounding", 0.0)
    lo = ext + pad
    if not (lo <= cx <= grid.nx_sites - 1 - lo and lo <= cy <= grid.ny_sites - 1 - lo):
        raise ValueError(
            f"{type(profile).__name__} at {profile.center} with extent {ext} does not fit "
            f"in a {grid.nx_sites}x{grid.ny_sites} grid"
        )


def sample_medium(spec: MediumSpec, grid: LatticeGrid) -> RefractiveField:
    x, y = grid.coords()
    n = np.empty((3,) + grid.shape)
    ddx = np.empty_like(n)
    ddy = np.empty_like(n)
    for i, axis in enumerate(INDEX_AXES):
        profile = spec.profile_for(axis)
        _check_fits(profile, grid)
        n[i], ddx[i], ddy[i] = profile.evaluate(x, y)
    return RefractiveField(grid, n, ddx, ddy)


def vacuum(grid: LatticeGrid) -> RefractiveField:
    return sample_medium(MediumSpec(), grid)


def dyson_map(E, H, media: RefractiveField) -> QubitField:
    """Q = (n_x E_x, n_y E_y, n_z E_z, H_x, H_y, H_z) with mu0 = 1.

    ``E`` and ``H`` have shape (ny, nx, 3).
    """
    E = np.asarray(E, dtype=float)
    H = np.asarray(H, dtype=float)
    shape = media.grid.shape + (3,)
    if E.shape != shape or H.shape != shape:
        raise ValueError(f"E/H shapes {E.shape}, {H.shape} do not match {shape}")
    q = np.empty(media.grid.shape + (NCOMP,))
    q[..., :3] = E * np.moveaxis(media.n, 0, -1)
    q[..., 3:] = H
    return QubitField(media.grid, q)


def inverse_dyson(field: QubitField, media: RefractiveField) -> tuple[np.ndarray, np.ndarray]:
    q = field.amplitudes
    E = q[..., :3] / np.moveaxis(media.n, 0, -1)
    H = q[..., 3:].copy()
    return E, H
