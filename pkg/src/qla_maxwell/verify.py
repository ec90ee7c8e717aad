"""Self-check suites behind the ``verify`` subcommand."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dissipation as dis
from .consistency import convergence, fitted_slope
from .evolution import make_plan, step_inplace
from .lattice import LatticeGrid
from .lcu import lcu_terms, lcu_terms_y, verify_lcu, verify_lcu_y
from .media import Cylinder, Homogeneous, MediumSpec, sample_medium


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str


def _check(suite, name, value, limit, cmp="le") -> CheckResult:
    ok = value <= limit if cmp == "le" else value >= limit
    op = "<=" if cmp == "le" else ">="
    return CheckResult(suite, name, bool(ok), f"{value:.3e} {op} {limit:.1e}")


def lcu_suite(rng: np.random.Generator, samples: int = 1000) -> list[CheckResult]:
    res = orth = res_y = 0.0
    for b0, b2 in rng.uniform(-np.pi, np.pi, size=(samples, 2)):
        res = max(res, verify_lcu(b0, b2))
        res_y = max(res_y, verify_lcu_y(b0, b2))
        orth = max(orth, float(np.max(lcu_terms(b0, b2).orthogonality_residuals())),
                   float(np.max(lcu_terms_y(b0, b2).orthogonality_residuals())))
    return [
        _check("lcu", "V_X reconstruction", res, 1e-14),
        _check("lcu", "V_Y reconstruction", res_y, 1e-14),
        _check("lcu", "terms orthogonal", orth, 1e-14),
    ]


def random_hermitian(rng, d, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = a + a.conj().T
    return scale * h / np.linalg.norm(h, 2)


def random_psd(rng, d, r, scale=1.0):
    b = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    h = b @ b.conj().T
    return scale * h / np.linalg.norm(h, 2)


def random_state(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def kraus_suite(rng: np.random.Generator, samples: int = 1000) -> list[CheckResult]:
    out = []
    comp = unit = 0.0
    for r in (1, 2, 3):
        for d in (2 * r, 2 * r + 1):
            g = rng.uniform(0.1, 3.0, size=r)
            dt = rng.uniform(0.01, 0.5)
            comp = max(comp, dis.kraus_pair(g, dt, d).completeness_residual())
            u = dis.dilation(g, dt, d)
            unit = max(unit, float(np.max(np.abs(u.T @ u - np.eye(2 * d)))))
    out.append(_check("kraus", "completeness", comp, 1e-14))
    out.append(_check("kraus", "dilation unitarity", unit, 1e-13))

    d, r = 4, 2
    split = dis.SplitHamiltonians(random_hermitian(rng, d), random_psd(rng, d, r))
    diff = 0.0
    for _ in range(20):
        psi = random_state(rng, d)
        o = dis.evolve_open(psi, split, 0.05)
        t = dis.trotter_step(psi, split, 0.05)
        diff = max(diff, float(np.max(np.abs(o.state - t / np.linalg.norm(t)))),
                   abs(o.p0 - float(np.vdot(t, t).real)))
    out.append(_check("kraus", "open step matches Trotter step", diff, 1e-12))

    dts = [0.1, 0.05, 0.025, 0.0125]
    psi = random_state(rng, d)
    errs = [float(np.linalg.norm(dis.trotter_step(psi, split, h) - dis.exact_step(psi, split, h))) for h in dts]
    slope = fitted_slope(dts, errs)
    out.append(CheckResult("kraus", "Trotter error slope", abs(slope - 2) <= 0.1, f"slope {slope:.3f}"))

    worst = np.inf
    for _ in range(samples):
        psi = random_state(rng, d)
        p0 = dis.success_probability(psi, split, 0.1)
        worst = min(worst, p0 - dis.probability_bounds(psi, split, 0.1)["damped_weight"])
    out.append(_check("kraus", "success probability lower bound", worst, -1e-14, cmp="ge"))
    return out


def unitarity_suite(rng: np.random.Generator, steps: int = 200) -> list[CheckResult]:
    out = []
    grid = LatticeGrid(48, 40, 0.1)
    q0 = rng.normal(size=grid.shape + (6,))
    for label, spec, mode in (
        ("homogeneous, potentials off", MediumSpec(Homogeneous(2.0)), "off"),
        ("cylinder, default potentials", MediumSpec(Cylinder((24, 20), 16, 3.0, 2.0)), "halfway_and_end"),
    ):
        plan = make_plan(sample_medium(spec, grid), mode)
        q = q0.copy()
        e0 = float(np.sum(q * q))
        for _ in range(steps):
            step_inplace(q, plan)
        out.append(_check("unitarity", label, abs(float(np.sum(q * q)) / e0 - 1), 1e-12))
    return out


def taylor_suite() -> list[CheckResult]:
    deltas = (0.16, 0.08, 0.04)
    full = convergence(deltas)
    trunc = convergence(deltas, first_order=True)
    return [
        _check("taylor", "full step residual slope", full["slope_l2"], 2.7, cmp="ge"),
        CheckResult("taylor", "truncated step loses one order",
                    abs((full["slope_l2"] - trunc["slope_l2"]) - 1) <= 0.3,
                    f"{full['slope_l2']:.2f} vs {trunc['slope_l2']:.2f}"),
    ]


SUITES: dict[str, Callable] = {
    "lcu": lambda rng: lcu_suite(rng),
    "kraus": lambda rng: kraus_suite(rng),
    "unitarity": lambda rng: unitarity_suite(rng),
    "taylor": lambda rng: taylor_suite(),
}


def run_all(seed: int = 0, suites=None) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    for name in suites or SUITES:
        results.extend(SUITES[name](rng))
    return results
