"""Dissipative 1D Maxwell evolution through Kraus operators and a one-qubit dilation.

The lossy generator is split as H = H0 - i H1 with H0, H1 Hermitian. Writing
H1 = u1 diag(gamma_1..gamma_r, 0..0) u1^dagger, one Lie-Trotter step is

    psi <- exp(-i dt H0) u1 K0 u1^dagger psi,   K0 = diag(exp(-gamma dt), 1..1)

and K0 is realised as the environment-|0> block of a 2d x 2d unitary acting
on one extra qubit. Measuring the environment in |0> succeeds with
probability ||K0 u1^dagger psi||^2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]], dtype=complex)

_HERM_TOL = 1e-12


@dataclass(frozen=True)
class LossyMedium1D:
    """Homogeneous medium with complex permittivity eps_r + i eps_i (mu0 = 1 by default)."""

    eps_r: float
    eps_i: float
    mu0: float = 1.0

    def __post_init__(self):
        if not (self.eps_r > 0 and self.mu0 > 0):
            raise ValueError("eps_r and mu0 must be positive")
        if self.eps_i < 0:
            raise ValueError("eps_i must be >= 0 (passive medium)")

    @property
    def loss_angle(self) -> float:
        return self.eps_i / self.eps_r

    @property
    def velocity(self) -> float:
        d = self.loss_angle
        return 1.0 / np.sqrt(self.eps_r * self.mu0 * (1.0 + d * d))


def _hermitian(h, name):
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"{name} must be square, got {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(h))))
    if np.max(np.abs(h - h.conj().T)) > _HERM_TOL * scale:
        raise ValueError(f"{name} is not Hermitian")
    return 0.5 * (h + h.conj().T)


class SplitHamiltonians:
    """H0, H1 and the eigendecomposition of H1 (eigenvalues in descending order).

    ``gammas`` are the strictly positive eigenvalues of H1 and ``u1`` has the
    matching eigenvectors as its first columns. When H1 also has negative
    eigenvalues the step built from it would amplify, so the Kraus
    construction refuses it; :meth:`dissipative_part` drops that branch
    explicitly.
    """

    def __init__(self, h0, h1, tol: float = 1e-12):
        self.h0 = _hermitian(h0, "h0")
        self.h1 = _hermitian(h1, "h1")
        if self.h0.shape != self.h1.shape:
            raise ValueError("h0 and h1 must have the same shape")
        w, v = np.linalg.eigh(self.h1)
        order = np.argsort(-w, kind="stable")
        self.eigenvalues = w[order]
        self.u1 = v[:, order]
        scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
        self._tol = tol * scale
        self.gammas = self.eigenvalues[self.eigenvalues > self._tol]

    @property
    def dim(self) -> int:
        return self.h0.shape[0]

    @property
    def rank(self) -> int:
        return int(self.gammas.size)

    @property
    def is_dissipative(self) -> bool:
        """True when H1 is positive semidefinite."""
        return bool(np.all(self.eigenvalues >= -self._tol))

    def dissipative_part(self) -> "SplitHamiltonians":
        """Copy with H1 replaced by its positive spectral part."""
        lam = np.where(self.eigenvalues > self._tol, self.eigenvalues, 0.0)
        h1p = (self.u1 * lam) @ self.u1.conj().T
        return SplitHamiltonians(self.h0, h1p)

    def generator(self) -> np.ndarray:
        return self.h0 - 1j * self.h1


def lossy_hamiltonians(medium: LossyMedium1D, k: float) -> SplitHamiltonians:
    """Per-Fourier-mode split for wavenumber ``k`` (momentum operator -> k).

    h0 = v (sigma_x + (d/2) sigma_y) k and h1 = (d v / 2) sigma_x k with d the
    loss angle. h1 has eigenvalues +-(d v k / 2), so one branch is
    non-dissipative (see :meth:`SplitHamiltonians.dissipative_part`).
    """
    if not np.isfinite(k):
        raise ValueError("k must be finite")
    d, v = medium.loss_angle, medium.velocity
    h0 = v * (SIGMA_X + 0.5 * d * SIGMA_Y) * k
    h1 = 0.5 * d * v * SIGMA_X * k
    return SplitHamiltonians(h0, h1)


def momentum_matrix(n_points: int, length: float) -> np.ndarray:
    """Spectral discretisation of -i d/dx on a periodic grid (Hermitian)."""
    if n_points < 2:
        raise ValueError("need at least two grid points")
    k = 2 * np.pi * np.fft.fftfreq(n_points, d=length / n_points)
    if n_points % 2 == 0:
        k[n_points // 2] = 0.0  # Nyquist mode has no sign; drop it to keep P Hermitian
    f = np.fft.fft(np.eye(n_points), axis=0)
    p = np.linalg.solve(f, k[:, None] * f)
    return 0.5 * (p + p.conj().T)


def lossy_hamiltonians_dense(medium: LossyMedium1D, n_points: int, length: float) -> SplitHamiltonians:
    """Direct-space split on ``n_points`` sites: (E, H) blocks with a spectral momentum."""
    p = momentum_matrix(n_points, length)
    d, v = medium.loss_angle, medium.velocity
    h0 = v * (np.kron(SIGMA_X, p) + 0.5 * d * np.kron(SIGMA_Y, p))
    h1 = 0.5 * d * v * np.kron(SIGMA_X, p)
    return SplitHamiltonians(h0, h1)


@dataclass(frozen=True)
class KrausPair:
    k0: np.ndarray
    k1: np.ndarray
    rank: int

    def completeness_residual(self) -> float:
        d = self.k0.shape[0]
        s = self.k0.conj().T @ self.k0 + self.k1.conj().T @ self.k1
        return float(np.max(np.abs(s - np.eye(d))))


def _damping(gammas, dt):
    g = np.asarray(gammas, dtype=float).ravel()
    if not np.all(np.isfinite(g)) or np.any(g <= 0):
        raise ValueError("damping rates must be strictly positive")
    if not (np.isfinite(dt) and dt > 0):
        raise ValueError("dt must be positive")
    gam = np.exp(-g * dt)
    return gam, np.sqrt(1.0 - gam * gam)


def kraus_pair(gammas, dt: float, dim: int | None = None) -> KrausPair:
    """K0 = diag(Gamma, I), K1 with sqrt(I - Gamma^2) in the lower-left block.

    ``gammas`` are the r positive rates; ``dim`` (default 2r) is the system
    dimension d >= r.
    """
    gam, sq = _damping(gammas, dt)
    r = gam.size
    d = 2 * r if dim is None else int(dim)
    if d < r:
        raise ValueError(f"dimension {d} smaller than rank {r}")
    k0 = np.eye(d)
    k0[:r, :r] = np.diag(gam)
    k1 = np.zeros((d, d))
    k1[d - r:, :r] = np.diag(sq)
    return KrausPair(k0, k1, r)


def dilation(gammas, dt: float, dim: int | None = None) -> np.ndarray:
    """The 2d x 2d real orthogonal dilation of :func:`kraus_pair`.

    Basis order is environment-major: rows/columns 0..d-1 carry the
    environment |0>, d..2d-1 the environment |1>. The first d columns are
    [K0; K1]. Blocks (r, d-r, d-r, r):

        [[G, 0, 0, -S], [0, I, 0, 0], [0, 0, I, 0], [S, 0, 0, G]]
    """
    gam, sq = _damping(gammas, dt)
    r = gam.size
    d = 2 * r if dim is None else int(dim)
    if d < r:
        raise ValueError(f"dimension {d} smaller than rank {r}")
    u = np.eye(2 * d)
    lo = 2 * d - r
    u[:r, :r] = np.diag(gam)
    u[:r, lo:] = -np.diag(sq)
    u[lo:, :r] = np.diag(sq)
    u[lo:, lo:] = np.diag(gam)
    if np.max(np.abs(u.T @ u - np.eye(2 * d))) > 1e-12:
        raise ArithmeticError("dilation is not unitary")
    return u


def _require_dissipative(split: SplitHamiltonians):
    if not split.is_dissipative:
        raise ValueError(
            "H1 has negative eigenvalues; restrict to the dissipative subspace "
            "with SplitHamiltonians.dissipative_part()"
        )


def _propagator(split: SplitHamiltonians, dt: float) -> np.ndarray:
    return expm(-1j * dt * split.h0)


def trotter_step(psi, split: SplitHamiltonians, dt: float) -> np.ndarray:
    """Unnormalised exp(-i dt H0) u1 K0 u1^dagger psi."""
    _require_dissipative(split)
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (split.dim,):
        raise ValueError(f"state has shape {psi.shape}, expected ({split.dim},)")
    r = split.rank
    phi = split.u1.conj().T @ psi
    if r:
        phi[:r] *= np.exp(-split.gammas * dt)
    return _propagator(split, dt) @ (split.u1 @ phi)


def success_probability(psi, split: SplitHamiltonians, dt: float) -> float:
    """p0 = sum_{i<=r} exp(-2 gamma_i dt) |psi_i|^2 + sum_{i>r} |psi_i|^2 in the H1 eigenbasis."""
    _require_dissipative(split)
    phi = split.u1.conj().T @ np.asarray(psi, dtype=complex)
    w = np.abs(phi) ** 2
    r = split.rank
    return float(np.sum(np.exp(-2 * split.gammas * dt) * w[:r]) + np.sum(w[r:]))


def probability_bounds(psi, split: SplitHamiltonians, dt: float) -> dict:
    """Lower bounds on p0 for a normalised ``psi``.

    ``damped_weight``: 1 + (exp(-2 gamma_max dt) - 1) * sum_{i<=r} |psi_i|^2,
    which always holds. ``printed``: the same with each weight further scaled
    by exp(-2 gamma_i dt); it exceeds p0 whenever the damped weight is
    nonzero (see README), so it is reported, not enforced.
    """
    _require_dissipative(split)
    phi = split.u1.conj().T @ np.asarray(psi, dtype=complex)
    w = np.abs(phi) ** 2
    r = split.rank
    if r == 0:
        return {"damped_weight": 1.0, "printed": 1.0}
    emax = np.exp(-2 * np.max(split.gammas) * dt)
    return {
        "damped_weight": float(1 + (emax - 1) * np.sum(w[:r])),
        "printed": float(1 + (emax - 1) * np.sum(np.exp(-2 * split.gammas * dt) * w[:r])),
    }


@dataclass(frozen=True)
class OpenStepResult:
    state: np.ndarray  # renormalised system state after post-selection
    p0: float
    joint: np.ndarray  # full 2d state before measurement


def evolve_open(psi, split: SplitHamiltonians, dt: float) -> OpenStepResult:
    """One step on system + environment qubit, post-selected on environment |0>.

    Applies the dilation conjugated by u1, then exp(-i dt H0) on the system
    register, then projects the environment on |0>.
    """
    _require_dissipative(split)
    psi = np.asarray(psi, dtype=complex)
    d = split.dim
    if psi.shape != (d,):
        raise ValueError(f"state has shape {psi.shape}, expected ({d},)")
    nrm = np.linalg.norm(psi)
    if not np.isfinite(nrm) or nrm == 0:
        raise ValueError("state must be finite and nonzero")
    psi = psi / nrm
    r = split.rank
    joint = np.zeros(2 * d, dtype=complex)
    joint[:d] = psi
    if r:
        u = dilation(split.gammas, dt, d)
        eye2 = np.eye(2)
        conj = np.kron(eye2, split.u1)
        joint = conj @ (u @ (conj.conj().T @ joint))
    joint = np.kron(np.eye(2), _propagator(split, dt)) @ joint
    sys0 = joint[:d]
    p0 = float(np.vdot(sys0, sys0).real)
    if p0 <= 0:
        raise ArithmeticError("post-selection probability vanished")
    return OpenStepResult(sys0 / np.sqrt(p0), p0, joint)


def exact_step(psi, split: SplitHamiltonians, dt: float) -> np.ndarray:
    """exp(-i dt (H0 - i H1)) psi, the reference for the Trotter error."""
    return expm(-1j * dt * split.generator()) @ np.asarray(psi, dtype=complex)


def decay_series(medium: LossyMedium1D, k: float, dt: float, steps: int, psi0=None):
    """Repeated post-selected steps on one Fourier mode, dissipative branch only.

    Returns arrays (t, cumulative success probability, norm of the
    unnormalised Trotter state).
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    split = lossy_hamiltonians(medium, k).dissipative_part()
    if psi0 is None:
        psi0 = split.u1[:, 0] if split.rank else np.array([1.0, 0.0], dtype=complex)
    psi = np.asarray(psi0, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    raw = psi.copy()
    t = [0.0]
    cum = [1.0]
    norms = [1.0]
    for _ in range(steps):
        res = evolve_open(psi, split, dt)
        psi = res.state
        raw = trotter_step(raw, split, dt)
        t.append(t[-1] + dt)
        cum.append(cum[-1] * res.p0)
        norms.append(float(np.linalg.norm(raw)))
    return np.array(t), np.array(cum), np.array(norms)
