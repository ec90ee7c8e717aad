"""Command-line entry point: run, verify, demo-lossy, inspect."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _cmd_run(args) -> int:
    from .config import ConfigError, load_config
    from .driver import NonFiniteFieldError, run

    try:
        cfg = load_config(args.config)
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.steps is not None:
        if args.steps < 0:
            print("error: --steps must be >= 0", file=sys.stderr)
            return EXIT_USAGE
        cfg = cfg.with_overrides(steps=args.steps)
    try:
        manifest = run(cfg, output_dir=args.output_dir)
    except NonFiniteFieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"run {manifest.run_id}: {len(manifest.snapshots)} snapshots in {manifest.root}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import run_all

    results = run_all(seed=args.seed)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.suite:<10} {r.name:<40} {r.detail}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def _cmd_demo_lossy(args) -> int:
    from .dissipation import LossyMedium1D, decay_series

    try:
        medium = LossyMedium1D(args.eps_r, args.eps_i)
        t, cum, norms = decay_series(medium, args.k, args.dt, args.steps)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"# loss angle {medium.loss_angle:.6g}, velocity {medium.velocity:.6g}, k {args.k}")
    print("step,time,success_probability,amplitude")
    for i, (ti, ci, ni) in enumerate(zip(t, cum, norms)):
        print(f"{i},{ti:.10g},{ci:.12g},{ni:.12g}")
    return EXIT_OK


def _cmd_inspect(args) -> int:
    from .diagnostics import div_b, energy
    from .snapshot import SnapshotError, read_snapshot

    try:
        snap = read_snapshot(args.snapshot)
    except FileNotFoundError:
        print(f"error: no such file: {args.snapshot}", file=sys.stderr)
        return EXIT_USAGE
    except SnapshotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    f = snap.field
    g = f.grid
    print(f"grid {g.nx_sites}x{g.ny_sites}  delta {g.delta}  step {snap.step}  version {snap.version}")
    names = ("nxEx", "nyEy", "nzEz", "Hx", "Hy", "Hz")
    for c, name in enumerate(names):
        a = f.component(c)
        print(f"  q{c} {name:<5} min {a.min(): .6e}  max {a.max(): .6e}")
    print(f"energy {energy(f):.15e}")
    print(f"max |div B| {np.max(np.abs(div_b(f))):.6e} (per lattice unit)")
    # D = n q needs the medium; in vacuum it is the first three components
    q = f.amplitudes
    dv = 0.5 * (np.roll(q[..., 0], -1, 1) - np.roll(q[..., 0], 1, 1)) \
        + 0.5 * (np.roll(q[..., 1], -1, 0) - np.roll(q[..., 1], 1, 0))
    print(f"max |div (q0, q1)| {np.max(np.abs(dv)):.6e} (div D where n = 1)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qla-maxwell", description="Qubit lattice simulations of 2D Maxwell scattering")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a configured simulation")
    r.add_argument("--config", required=True, help="TOML run configuration")
    r.add_argument("--output-dir", help="override the configured output directory")
    r.add_argument("--steps", type=int, help="override the number of steps")
    r.set_defaults(func=_cmd_run)

    v = sub.add_parser("verify", help="run the LCU, Kraus, unitarity and Taylor self-checks")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=_cmd_verify)

    d = sub.add_parser("demo-lossy", help="print a 1D dissipative decay series as CSV")
    d.add_argument("--eps-r", type=float, required=True)
    d.add_argument("--eps-i", type=float, required=True)
    d.add_argument("--dt", type=float, required=True)
    d.add_argument("--steps", type=int, required=True)
    d.add_argument("--k", type=float, default=1.0, help="wavenumber of the mode")
    d.set_defaults(func=_cmd_demo_lossy)

    i = sub.add_parser("inspect", help="summarise a snapshot file")
    i.add_argument("snapshot")
    i.set_defaults(func=_cmd_inspect)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
