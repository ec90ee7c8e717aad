"""Taylor-consistency check of one QLA step against the continuum equations.

The oracle is an explicit Euler step of the 2D Maxwell system in the
Dyson-mapped variables, with centered differences:

    dq0/dt =  (1/n_x) d_y q5          dq3/dt = -d_y (q2 / n_z)
    dq1/dt = -(1/n_y) d_x q5          dq4/dt =  d_x (q2 / n_z)
    dq2/dt =  (1/n_z)(d_x q4 - d_y q3)
    dq5/dt =  d_y (q0 / n_x) - d_x (q1 / n_y)

The residual ||step(Q) - Q - dt * rhs(Q)|| is O(delta^4) per site, i.e.
O(delta^3) in the L2 norm summed over a fixed physical domain (N ~ 1/delta
sites per side).
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .evolution import make_plan, step
from .lattice import LatticeGrid, QubitField
from .media import RefractiveField

DOMAIN = 2 * np.pi


def maxwell_rhs(q: np.ndarray, media: RefractiveField) -> np.ndarray:
    h = media.grid.delta

    def dx(f):
        return (np.roll(f, -1, 1) - np.roll(f, 1, 1)) / (2 * h)

    def dy(f):
        return (np.roll(f, -1, 0) - np.roll(f, 1, 0)) / (2 * h)

    nx_, ny_, nz_ = media.n
    r = np.empty_like(q)
    r[..., 0] = dy(q[..., 5]) / nx_
    r[..., 1] = -dx(q[..., 5]) / ny_
    r[..., 2] = (dx(q[..., 4]) - dy(q[..., 3])) / nz_
    r[..., 3] = -dy(q[..., 2] / nz_)
    r[..., 4] = dx(q[..., 2] / nz_)
    r[..., 5] = dy(q[..., 0] / nx_) - dx(q[..., 1] / ny_)
    return r


def smooth_medium(delta: float, constant: bool = False) -> RefractiveField:
    """Smooth anisotropic test medium on the periodic square of side 2*pi."""
    n_sites = int(round(DOMAIN / delta))
    h = DOMAIN / n_sites
    grid = LatticeGrid(n_sites, n_sites, h)
    xi, yi = grid.coords()
    X, Y = xi * h, yi * h
    if constant:
        n = np.stack([np.full_like(X, 1.5), np.full_like(X, 1.4), np.full_like(X, 1.6)])
        return RefractiveField(grid, n, np.zeros_like(n), np.zeros_like(n))
    n = np.stack([
        1.5 + 0.3 * np.sin(X) * np.cos(Y),
        1.4 + 0.2 * np.cos(X + Y),
        1.6 + 0.4 * np.sin(2 * X - Y),
    ])
    gx = np.stack([0.3 * np.cos(X) * np.cos(Y), -0.2 * np.sin(X + Y), 0.8 * np.cos(2 * X - Y)])
    gy = np.stack([-0.3 * np.sin(X) * np.sin(Y), -0.2 * np.sin(X + Y), -0.4 * np.cos(2 * X - Y)])
    # stored per lattice unit
    return RefractiveField(grid, n, gx * h, gy * h)


def smooth_field(grid: LatticeGrid) -> QubitField:
    xi, yi = grid.coords()
    X, Y = xi * grid.delta, yi * grid.delta
    q = np.empty(grid.shape + (6,))
    q[..., 0] = np.sin(Y + 0.3)
    q[..., 1] = np.sin(X) * np.cos(Y)
    q[..., 2] = np.cos(X)
    q[..., 3] = np.cos(2 * Y - X)
    q[..., 4] = 0.5 * np.sin(X - 2 * Y)
    q[..., 5] = np.cos(X + Y)
    return QubitField(grid, q)


def one_step_residual(delta: float, first_order: bool = False, potential_mode: str = "halfway_and_end",
                      potential_form: str = "skew", constant: bool = False) -> dict:
    media = smooth_medium(delta, constant)
    f = smooth_field(media.grid)
    plan = make_plan(media, potential_mode, potential_form)
    out = step(f, plan, first_order=first_order)
    res = out.amplitudes - f.amplitudes - media.grid.dt * maxwell_rhs(f.amplitudes, media)
    return {"delta": media.grid.delta, "l2": float(np.sqrt(np.sum(res * res))),
            "max": float(np.max(np.abs(res)))}


def fitted_slope(deltas: Sequence[float], values: Sequence[float]) -> float:
    return float(np.polyfit(np.log(deltas), np.log(values), 1)[0])


def convergence(deltas: Sequence[float] = (0.08, 0.04, 0.02, 0.01), **kw) -> dict:
    """Residuals and fitted log-log slopes over ``deltas``."""
    rows = [one_step_residual(d, **kw) for d in deltas]
    l2 = [r["l2"] for r in rows]
    mx = [r["max"] for r in rows]
    h = [r["delta"] for r in rows]  # actual spacing fitting the periodic domain
    return {"deltas": h, "l2": l2, "max": mx,
            "slope_l2": fitted_slope(h, l2), "slope_max": fitted_slope(h, mx)}
