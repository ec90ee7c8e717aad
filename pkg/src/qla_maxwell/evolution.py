"""The QLA time step: collisions, collide-stream sweeps and potential operators.

Streaming convention: the operator ``S^{+}`` on an axis reads the neighbour on
the positive side, ``S^{+} q(x) = q(x + 1)``, so its content moves toward
``-x``. In terms of :func:`qla_maxwell.lattice.shift` that is ``direction=-1``.
With this convention the sweeps reproduce the signs of the 2D Maxwell system
in the Dyson-mapped variables (checked by the Taylor-consistency tests).

Time advanced per step is ``delta**2`` in units where the lattice spacing is
``delta``; a vacuum wave moves ``delta`` lattice sites per step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .lattice import LatticeGrid, QubitField, shift_array
from .media import RefractiveField

POTENTIAL_MODES = ("halfway_and_end", "end_only", "off")
POTENTIAL_FORMS = ("skew", "printed")

# (component pairs rotated, rotation sign, first stream group) per axis
_X_PAIRS = np.array([1, 5, 2, 4], dtype=np.int64)
_Y_PAIRS = np.array([0, 5, 2, 3], dtype=np.int64)
_X_SIGMA = -1.0
_Y_SIGMA = 1.0
_X_G1 = np.array([1, 4], dtype=np.int64)
_Y_G1 = np.array([0, 3], dtype=np.int64)
_G2 = np.array([2, 5], dtype=np.int64)

_BLOCK = 16


@dataclass(frozen=True)
class CollisionAngles:
    theta0: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray

    @classmethod
    def from_media(cls, media: RefractiveField) -> "CollisionAngles":
        d = media.grid.delta
        return cls(*(d / (4.0 * media.n[i]) for i in range(3)))


@dataclass(frozen=True)
class PotentialAngles:
    """O(delta**2) angles of the potential operators.

    beta0 = delta^2 (dn_y/dx)/n_y^2, beta1 = delta^2 (dn_x/dy)/n_x^2,
    beta2 = delta^2 (dn_z/dx)/n_z^2, beta3 = delta^2 (dn_z/dy)/n_z^2,
    with gradients taken in physical length (lattice gradient / delta).
    """

    beta0: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    beta3: np.ndarray

    @classmethod
    def from_media(cls, media: RefractiveField) -> "PotentialAngles":
        d = media.grid.delta
        n, gx, gy = media.n, media.dn_dx, media.dn_dy
        # delta^2 * (g / delta) = delta * g
        return cls(
            beta0=d * gx[1] / n[1] ** 2,
            beta1=d * gy[0] / n[0] ** 2,
            beta2=d * gx[2] / n[2] ** 2,
            beta3=d * gy[2] / n[2] ** 2,
        )

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(b))) for b in (self.beta0, self.beta1, self.beta2, self.beta3))


class EvolutionPlan:
    """Precomputed angles (and their cos/sin) for one medium.

    ``potential_mode``:
      * ``halfway_and_end`` -- potentials at half angle after U_X and after U_Y
      * ``end_only``        -- full-angle potentials after U_Y
      * ``off``             -- unitary sweeps only

    ``potential_form``:
      * ``skew``    -- the potential applied as the rotation generated by the
                       antisymmetric part of V_X / V_Y (orthogonal; consistent
                       with the continuum equations, see README)
      * ``printed`` -- the sparse matrices V_X, V_Y exactly as printed
    """

    def __init__(self, media: RefractiveField, potential_mode: str = "halfway_and_end",
                 potential_form: str = "skew"):
        if potential_mode not in POTENTIAL_MODES:
            raise ValueError(f"potential_mode must be one of {POTENTIAL_MODES}")
        if potential_form not in POTENTIAL_FORMS:
            raise ValueError(f"potential_form must be one of {POTENTIAL_FORMS}")
        self.grid: LatticeGrid = media.grid
        self.media = media
        self.collision = CollisionAngles.from_media(media)
        self.potential = PotentialAngles.from_media(media)
        self.potential_mode = potential_mode
        self.potential_form = potential_form
        c = self.collision
        self._cx = _trig(c.theta1, c.theta2)
        self._cy = _trig(c.theta0, c.theta2)
        self._cx1 = _trig(2 * c.theta1, 2 * c.theta2)
        self._cy1 = _trig(2 * c.theta0, 2 * c.theta2)
        self._layout_cache: dict = {}
        self._pot_cache: dict = {}

    def potential_trig(self, scale: float):
        """cos/sin arrays for the x and y potentials at ``scale`` * beta."""
        key = (scale, self.potential_form)
        if key not in self._pot_cache:
            p = self.potential
            if self.potential_form == "skew":
                # rotations by beta/2 in the (q1,q5),(q2,q4) and (q0,q5),(q2,q3) planes
                h = 0.5 * scale
                px = _trig(h * p.beta0, -h * p.beta2)
                py = _trig(h * p.beta1, -h * p.beta3)
            else:
                px = _trig(scale * p.beta2, scale * p.beta0)
                py = _trig(scale * p.beta3, scale * p.beta1)
            self._pot_cache[key] = (px, py)
        return self._pot_cache[key]

    def kernel_angles(self, axis: str, first_order: bool = False) -> np.ndarray:
        """Blocked cos/sin layout consumed by the fused sweep."""
        key = ("c", axis, first_order)
        if key not in self._layout_cache:
            trig = {("x", False): self._cx, ("y", False): self._cy,
                    ("x", True): self._cx1, ("y", True): self._cy1}[axis, first_order]
            self._layout_cache[key] = _blocked(np.stack(trig), axis, _BLOCK)
        return self._layout_cache[key]

    def kernel_potentials(self, axis: str, scale: float) -> np.ndarray:
        key = ("p", axis, scale)
        if key not in self._layout_cache:
            px, py = self.potential_trig(scale)
            self._layout_cache[key] = _blocked(np.stack(px + py), axis, _BLOCK)
        return self._layout_cache[key]

    def with_mode(self, potential_mode: str, potential_form: str | None = None) -> "EvolutionPlan":
        return EvolutionPlan(self.media, potential_mode, potential_form or self.potential_form)


def _trig(a, b):
    return (np.ascontiguousarray(np.cos(a)), np.ascontiguousarray(np.sin(a)),
            np.ascontiguousarray(np.cos(b)), np.ascontiguousarray(np.sin(b)))


def _blocked(a: np.ndarray, axis: str, block: int) -> np.ndarray:
    """(m, ny, nx) cos/sin stack -> (nblocks, m, L, block), lines grouped in blocks.

    Padding lines get cos = 1, sin = 0 (even m are cosines).
    """
    if axis == "y":
        a = np.swapaxes(a, 1, 2)
    m, nlines, L = a.shape
    nblocks = -(-nlines // block)
    out = np.zeros((nblocks * block, m, L))
    out[:, 0::2, :] = 1.0
    out[:nlines] = np.swapaxes(a, 0, 1)
    out = out.reshape(nblocks, block, m, L).transpose(0, 2, 3, 1)
    return np.ascontiguousarray(out)


def make_plan(media: RefractiveField, potential_mode: str = "halfway_and_end",
              potential_form: str = "skew") -> EvolutionPlan:
    return EvolutionPlan(media, potential_mode, potential_form)


# ---------------------------------------------------------------------------
# 6x6 matrices (used by tests, the LCU module and the reference path)

def collision_matrix_x(theta1: float, theta2: float, adjoint: bool = False) -> np.ndarray:
    c1, s1, c2, s2 = np.cos(theta1), np.sin(theta1), np.cos(theta2), np.sin(theta2)
    m = np.eye(6)
    m[1, 1], m[1, 5], m[5, 1], m[5, 5] = c1, -s1, s1, c1
    m[2, 2], m[2, 4], m[4, 2], m[4, 4] = c2, -s2, s2, c2
    return m.T.copy() if adjoint else m


def collision_matrix_y(theta0: float, theta2: float, adjoint: bool = False) -> np.ndarray:
    c0, s0, c2, s2 = np.cos(theta0), np.sin(theta0), np.cos(theta2), np.sin(theta2)
    m = np.eye(6)
    m[0, 0], m[0, 5], m[5, 0], m[5, 5] = c0, s0, -s0, c0
    m[2, 2], m[2, 3], m[3, 2], m[3, 3] = c2, s2, -s2, c2
    return m.T.copy() if adjoint else m


def potential_matrix_x(beta0: float, beta2: float) -> np.ndarray:
    m = np.eye(6)
    m[4, 2], m[4, 4] = -np.sin(beta2), np.cos(beta2)
    m[5, 1], m[5, 5] = np.sin(beta0), np.cos(beta0)
    return m


def potential_matrix_y(beta1: float, beta3: float) -> np.ndarray:
    # row 3 is (sin, cos) on (q2, q3) so the matrix is the identity at beta3 = 0
    m = np.eye(6)
    m[3, 2], m[3, 3] = np.sin(beta3), np.cos(beta3)
    m[5, 0], m[5, 5] = -np.sin(beta1), np.cos(beta1)
    return m


def skew_potential_matrix_x(beta0: float, beta2: float) -> np.ndarray:
    return collision_matrix_x(0.5 * beta0, -0.5 * beta2)


def skew_potential_matrix_y(beta1: float, beta3: float) -> np.ndarray:
    return collision_matrix_y(0.5 * beta1, -0.5 * beta3)


# ---------------------------------------------------------------------------
# Reference (numpy) operators

def _rotate_planes(q, i, j, c, s):
    a = q[..., i].copy()
    b = q[..., j]
    q[..., i] = c * a + s * b
    q[..., j] = c * b - s * a


def _collide(q, pairs, sigma, trig, adjoint):
    ca, sa, cb, sb = trig
    sg = -sigma if adjoint else sigma
    _rotate_planes(q, pairs[0], pairs[1], ca, sg * sa)
    _rotate_planes(q, pairs[2], pairs[3], cb, sg * sb)


def collision_x(field: QubitField, angles: CollisionAngles, adjoint: bool = False) -> QubitField:
    q = field.amplitudes.copy()
    _collide(q, _X_PAIRS, _X_SIGMA, _trig(angles.theta1, angles.theta2), adjoint)
    return QubitField(field.grid, q, check=False)


def collision_y(field: QubitField, angles: CollisionAngles, adjoint: bool = False) -> QubitField:
    q = field.amplitudes.copy()
    _collide(q, _Y_PAIRS, _Y_SIGMA, _trig(angles.theta0, angles.theta2), adjoint)
    return QubitField(field.grid, q, check=False)


def _reference_sweep(q, axis, trig, ops):
    pairs, sigma, g1 = (_X_PAIRS, _X_SIGMA, _X_G1) if axis == "x" else (_Y_PAIRS, _Y_SIGMA, _Y_G1)
    for op in ops:
        if op in (K.OP_C, K.OP_CDAG):
            _collide(q, pairs, sigma, trig, op == K.OP_CDAG)
        else:
            group = g1 if op in (K.OP_S1_PLUS, K.OP_S1_MINUS) else _G2
            plus = op in (K.OP_S1_PLUS, K.OP_S2_PLUS)
            # S^{+} reads the +1 neighbour: content moves by -1
            q[...] = shift_array(q, group, axis, -1 if plus else 1)
    return q


def _sweep_inplace(q, plan: EvolutionPlan, axis: str, first_order: bool, method: str,
                   post_scale: float | None = None):
    """One sweep; with ``post_scale`` the x and y potentials follow it."""
    if first_order:
        # half the sequence with doubled angles keeps the same continuum generator
        trig = plan._cx1 if axis == "x" else plan._cy1
        ops = K.FIRST_ORDER_SEQUENCE
    else:
        trig = plan._cx if axis == "x" else plan._cy
        ops = K.SECOND_ORDER_SEQUENCE
    if method == "reference":
        _reference_sweep(q, axis, trig, ops)
        if post_scale is not None:
            _reference_potentials(q, plan, post_scale, "xy")
    elif method == "fused":
        if post_scale is None:
            post, pang = 0, _NO_POST
        else:
            post = 1 if plan.potential_form == "skew" else 2
            pang = plan.kernel_potentials(axis, post_scale)
        ang = plan.kernel_angles(axis, first_order)
        if axis == "x":
            K.sweep(q, ang, ops, _X_PAIRS, _X_SIGMA, _X_G1, _G2, 1, _BLOCK, post, pang)
        else:
            K.sweep(q, ang, ops, _Y_PAIRS, _Y_SIGMA, _Y_G1, _G2, 0, _BLOCK, post, pang)
    else:
        raise ValueError(f"unknown method {method!r}")


_NO_POST = np.zeros((1, 0, 1, 1))


def unitary_sweep_x(field: QubitField, plan: EvolutionPlan, first_order: bool = False,
                    method: str = "fused") -> QubitField:
    """The x collide-stream sequence U_X (16 factors, rightmost first).

    ``first_order=True`` keeps only the first four collide-stream pairs, with
    doubled collision angles.
    """
    q = field.amplitudes.copy()
    _sweep_inplace(q, plan, "x", first_order, method)
    return QubitField(field.grid, q, check=False)


def unitary_sweep_y(field: QubitField, plan: EvolutionPlan, first_order: bool = False,
                    method: str = "fused") -> QubitField:
    q = field.amplitudes.copy()
    _sweep_inplace(q, plan, "y", first_order, method)
    return QubitField(field.grid, q, check=False)


def _potentials_inplace(q, plan: EvolutionPlan, scale: float, which: str = "xy"):
    px, py = plan.potential_trig(scale)
    if plan.potential_form == "skew":
        if "x" in which:
            K.rotate_pairs(q, *px, _X_PAIRS, _X_SIGMA)
        if "y" in which:
            K.rotate_pairs(q, *py, _Y_PAIRS, _Y_SIGMA)
    else:
        if "x" in which:
            c2, s2, c0, s0 = px
            K.row_update(q, c2, s2, 2, 4, -1.0, c0, s0, 1, 5, 1.0)
        if "y" in which:
            c3, s3, c1, s1 = py
            K.row_update(q, c3, s3, 2, 3, 1.0, c1, s1, 0, 5, -1.0)


def _reference_potentials(q, plan: EvolutionPlan, scale: float, which: str = "xy"):
    px, py = plan.potential_trig(scale)
    if plan.potential_form == "skew":
        if "x" in which:
            _collide(q, _X_PAIRS, _X_SIGMA, px, False)
        if "y" in which:
            _collide(q, _Y_PAIRS, _Y_SIGMA, py, False)
    else:
        if "x" in which:
            c2, s2, c0, s0 = px
            q[..., 4] = -s2 * q[..., 2] + c2 * q[..., 4]
            q[..., 5] = s0 * q[..., 1] + c0 * q[..., 5]
        if "y" in which:
            c3, s3, c1, s1 = py
            q[..., 3] = s3 * q[..., 2] + c3 * q[..., 3]
            q[..., 5] = -s1 * q[..., 0] + c1 * q[..., 5]


def potential_x(field: QubitField, plan: EvolutionPlan, scale: float = 1.0) -> QubitField:
    """Apply the x potential operator at ``scale`` times the plan's angles."""
    q = field.amplitudes.copy()
    _potentials_inplace(q, plan, scale, "x")
    return QubitField(field.grid, q, check=False)


def potential_y(field: QubitField, plan: EvolutionPlan, scale: float = 1.0) -> QubitField:
    q = field.amplitudes.copy()
    _potentials_inplace(q, plan, scale, "y")
    return QubitField(field.grid, q, check=False)


def step_inplace(q: np.ndarray, plan: EvolutionPlan, first_order: bool = False,
                 method: str = "fused") -> None:
    """Advance the raw amplitude array by one step, in place."""
    mode = plan.potential_mode
    half = 0.5 if mode == "halfway_and_end" else None
    end = {"halfway_and_end": 0.5, "end_only": 1.0, "off": None}[mode]
    _sweep_inplace(q, plan, "x", first_order, method, half)
    _sweep_inplace(q, plan, "y", first_order, method, end)


def step(field: QubitField, plan: EvolutionPlan, first_order: bool = False,
         method: str = "fused") -> QubitField:
    """Q(t + dt) = V_Y V_X U_Y U_X Q(t) (with the plan's potential mode)."""
    q = field.amplitudes.copy()
    step_inplace(q, plan, first_order, method)
    return QubitField(field.grid, q, check=False)


def advance(field: QubitField, plan: EvolutionPlan, nsteps: int, callback=None) -> QubitField:
    """Run ``nsteps`` steps; ``callback(step_index, amplitudes)`` after each."""
    q = field.amplitudes.copy()
    for k in range(1, nsteps + 1):
        step_inplace(q, plan)
        if callback is not None:
            callback(k, q)
    return QubitField(field.grid, q, check=False)
