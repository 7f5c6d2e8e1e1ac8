"""Command-line front end: density tables, simulation, verification.

Subcommands
  density            q_t/g_t on a grid, CSV columns u,density
  charfn             characteristic function on a lambda grid (lambda,re,im)
  simulate           endpoint draws of the diffusion or particle system
  particles-density  determinantal N-particle density at one (x, y) pair
  verify             run an identity suite; exit 1 on failure

Exit codes: 0 success, 1 verification failure, 2 usage error.
Grid evaluation parallelizes over threads, capped by HPK_THREADS;
output ordering is by grid index regardless of completion order.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import maass, particles, spectral, stochastic, verify
from .quad import RngStream
from .specfun import HpParams

_FMT = "%.17g"


def _fail_usage(msg: str) -> "NoReturn":
    print(f"error: {msg}", file=sys.stderr)
    raise SystemExit(2)


def _params_from(args) -> HpParams:
    has_ak = args.A is not None or args.K_flag is not None
    has_alpha = args.alpha is not None
    has_munu = args.mu is not None or args.nu is not None
    if sum(map(bool, (has_ak, has_alpha, has_munu))) != 1:
        _fail_usage("give exactly one of --A/--K, --alpha [--K], --mu/--nu")
    if has_ak:
        if args.A is None:
            _fail_usage("--K requires --A")
        return HpParams(args.A, args.K_flag or 0.0)
    if has_alpha:
        return HpParams.from_alpha(args.alpha, args.K_flag or 0.0)
    if args.mu is None or args.nu is None:
        _fail_usage("--mu and --nu must be given together")
    return HpParams.from_mu_nu(args.mu, args.nu)


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        _fail_usage("--grid expects lo:hi:n")
    if n < 1 or not hi > lo:
        _fail_usage("--grid expects lo < hi and n >= 1")
    return np.linspace(lo, hi, n)


def _thread_map(fn, items):
    cap = os.environ.get("HPK_THREADS")
    workers = max(1, int(cap)) if cap else min(8, os.cpu_count() or 1)
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _write_rows(path, header, rows):
    out = open(path, "w", encoding="utf-8", newline="\n") if path else sys.stdout
    try:
        out.write(header + "\n")
        for row in rows:
            out.write(",".join(_FMT % v for v in row) + "\n")
    finally:
        if path:
            out.close()


def _add_param_flags(p):
    p.add_argument("--A", type=float, default=None)
    p.add_argument("--K", dest="K_flag", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--nu", type=float, default=None)


def cmd_density(args) -> int:
    params = _params_from(args)
    grid = _parse_grid(args.grid)
    if args.method == "spectral":
        if params.K != 0.0:
            _fail_usage("the spectral method needs K = 0")
        if params.alpha <= 0:
            _fail_usage("the spectral method needs alpha > 0")
        dens = spectral.hp_density_spectral_grid(params.alpha, args.t, args.x0, grid)
    else:
        alt = args.method == "integral-alt"
        chunks = np.array_split(np.arange(len(grid)), 16)
        parts = _thread_map(
            lambda idx: maass.hp_density_integral_grid(
                params, args.t, args.x0, grid[idx], alt=alt),
            [c for c in chunks if len(c)])
        dens = np.concatenate(parts)
    _write_rows(args.out, "u,density", zip(grid, dens))
    return 0


def cmd_charfn(args) -> int:
    params = _params_from(args)
    lams = _parse_grid(args.lambda_grid)
    vals = _thread_map(lambda lam: maass.hp_charfn(params, args.t, args.x0, float(lam)),
                       lams)
    _write_rows(args.out, "lambda,re,im",
                ((lam, v.real, v.imag) for lam, v in zip(lams, vals)))
    return 0


def cmd_simulate(args) -> int:
    stream = RngStream(args.seed, 0)
    if args.particles > 1:
        pp = particles.ParticleParams(args.s_re, args.s_im, args.particles)
        x0 = np.linspace(args.particles - 1.0, -(args.particles - 1.0), args.particles)
        ends = stochastic.simulate_particles(pp, x0, args.t, args.steps,
                                             stream, args.paths)
        header = ",".join(f"x{i+1}" for i in range(args.particles))
        _write_rows(args.out, header, ends)
        return 0
    params = _params_from(args)
    y = stochastic.simulate_y(params, np.arcsinh(args.x0), args.t, args.steps,
                              stream, args.paths)
    _write_rows(args.out, "x", ((v,) for v in np.sinh(y)))
    return 0


def cmd_particles_density(args) -> int:
    try:
        x = [float(v) for v in args.x.split(",")]
        y = [float(v) for v in args.y.split(",")]
    except ValueError:
        _fail_usage("--x/--y expect comma-separated floats")
    if len(x) != args.N or len(y) != args.N:
        _fail_usage("--x/--y must have N entries")
    pp = particles.ParticleParams(args.s_re, args.s_im, args.N)
    dens = particles.km_density(pp, args.t, particles.ParticleState.of(x),
                                particles.ParticleState.of(y))
    header = ",".join(f"y{i+1}" for i in range(args.N)) + ",density"
    _write_rows(args.out, header, [tuple(y) + (dens,)])
    return 0


def cmd_verify(args) -> int:
    report = verify.run_suite(args.suite)
    if args.json:
        print(report.to_json())
    else:
        for line in report.summary_lines():
            print(line)
        print("overall:", "PASS" if report.passed else "FAIL")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hpk", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="density table on a grid")
    _add_param_flags(p)
    p.add_argument("--method", choices=["spectral", "integral", "integral-alt"],
                   default="integral")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--grid", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_density)

    p = sub.add_parser("charfn", help="characteristic function table")
    _add_param_flags(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--lambda-grid", dest="lambda_grid", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_charfn)

    p = sub.add_parser("simulate", help="endpoint draws")
    _add_param_flags(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--paths", type=int, default=10_000)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--particles", type=int, default=1)
    p.add_argument("--s-re", dest="s_re", type=float, default=0.0)
    p.add_argument("--s-im", dest="s_im", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("particles-density", help="N-particle density at (x, y)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--s-re", dest="s_re", type=float, required=True)
    p.add_argument("--s-im", dest="s_im", type=float, default=0.0)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_particles_density)

    p = sub.add_parser("verify", help="run an identity suite")
    p.add_argument("--suite", choices=["specfun", "spectral", "maass",
                                       "stochastic", "particles", "all"],
                   default="all")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors already; normalize others
        raise SystemExit(2 if e.code not in (0,) else e.code)
    try:
        return args.fn(args)
    except (ValueError, KeyError) as e:
        _fail_usage(str(e))


if __name__ == "__main__":
    sys.exit(main())
