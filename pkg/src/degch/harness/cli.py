"""Command-line entry point.

Exit codes: 0 success, 1 usage or validation error, 2 runtime failure.
"""
import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DegchError
from .config import OUTPUT_ROOT_ENV, OutputConfig, parse_config
from .driver import CsvLog, output_lock, resume, simulate, stderr, write_manifest
from .initial import build_initial

EXIT_OK, EXIT_INVALID, EXIT_FAILURE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _floatlist(s):
    try:
        return [float(x) for x in s.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of numbers, got {s!r}") from None


def _intlist(s):
    try:
        return [int(x) for x in s.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {s!r}") from None


def build_parser():
    ap = _Parser(prog="degch", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    def with_config(sp, required=True):
        sp.add_argument("--config", required=required, help="run configuration file")
        sp.add_argument("--output", help="output directory (overrides the config)")
        return sp

    with_config(sub.add_parser("simulate", help="integrate a configured run"))

    sp = sub.add_parser("profile", help="core profile and sharp-interface constants")
    sp.add_argument("--potential", default="quartic", choices=["quartic", "scaled_quartic"])
    sp.add_argument("--m", type=float, default=2.0)
    sp.add_argument("--M0", type=float, default=1.0)
    sp.add_argument("--L", type=float, default=15.0)
    sp.add_argument("--samples", type=int, default=4097)
    sp.add_argument("--output", help="directory for profile.csv and the manifest")

    sp = with_config(sub.add_parser("verify-interface", help="mode decay versus the front-tracking oracle"),
                     required=False)
    sp.add_argument("--R", type=float, default=np.pi / 2)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--delta", type=float, default=None, help="default 0.05 R")
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--theta", type=float, default=0.05)
    sp.add_argument("--n", type=int, default=256)
    sp.add_argument("--potential", default="scaled_quartic", choices=["quartic", "scaled_quartic"])
    sp.add_argument("--t-end", type=float, default=0.3)
    sp.add_argument("--samples", type=int, default=12)

    sp = with_config(sub.add_parser("sweep-theta", help="regularization sweep"))
    sp.add_argument("--thetas", type=_floatlist, default=[0.2, 0.1, 0.05, 0.025])

    sp = with_config(sub.add_parser("refine-grid", help="grid self-convergence"))
    sp.add_argument("--sizes", type=_intlist, default=[32, 64, 128])

    with_config(sub.add_parser("climb", help="climb dynamics of dislocation loops"))

    sp = with_config(sub.add_parser("resume", help="continue a run from a snapshot"))
    sp.add_argument("--from", dest="snapshot", required=True, help="snapshot file")
    return ap


def _outdir(cfg, args, default):
    if getattr(args, "output", None):
        return Path(args.output)
    if cfg is not None:
        return cfg.output.resolved_directory()
    return OutputConfig(directory=default).resolved_directory()


def _load(args):
    return parse_config(args.config) if getattr(args, "config", None) else None


def cmd_simulate(args, cfg, outdir):
    simulate(cfg, build_initial(cfg), outdir, log=stderr)


def cmd_resume(args, cfg, outdir):
    if not Path(args.snapshot).is_file():
        raise ConfigError(f"snapshot not found: {args.snapshot}")
    resume(cfg, args.snapshot, outdir, log=stderr)


def cmd_profile(args, cfg, outdir):
    from ..model import Potential
    from ..profile import compute_alpha, compute_lambda, profile_table, solve_profile

    sol = solve_profile(Potential(args.potential), L=args.L, n_samples=args.samples)
    a = compute_alpha(sol, args.m)
    lam = compute_lambda(sol, args.m, args.M0)
    print(f"alpha = {a:.6f}")
    print(f"lambda = {lam:.6f}")
    print(f"B = {a * lam:.6f}")
    print(f"ode_residual = {sol.residual:.3e}")
    np.savetxt(outdir / "profile.csv", profile_table(sol), delimiter=",", header="rho,U0,dU0",
               comments="")
    return {"alpha": a, "lambda": lam, "B": a * lam}


def cmd_verify_interface(args, cfg, outdir):
    from ..dynamics import StepperConfig
    from ..interface import mode_decay_experiment, oracle_decay_rate
    from ..model import ModelParams, Potential
    from ..profile import constants

    if cfg is not None:
        p, scfg, n = cfg.model, cfg.stepper, cfg.grid.n
        ic = cfg.initial_condition
        R, k, delta = ic.radius, ic.k, ic.delta
        t_end = cfg.t_end
    else:
        p = ModelParams(epsilon=args.epsilon, theta=args.theta, potential=Potential(args.potential))
        scfg = StepperConfig()
        n, R, k = args.n, args.R, args.k
        delta = args.delta if args.delta is not None else 0.05 * R
        t_end = args.t_end
    _, _, B = constants(p.potential, p.m, p.M0)
    res = mode_decay_experiment(R, k, delta, p, scfg, n=n, t_end=t_end, samples=args.samples)
    ref = oracle_decay_rate(R, k, delta, B, t_end=t_end)
    log = CsvLog(outdir / "mode_decay.csv", ["t", f"amplitude_k{k}", "mean_radius"])
    for row in res.rows():
        log.write(row)
    log.close()
    rel = abs(res.sigma - ref) / abs(ref) if ref else float("inf")
    report = {"R": R, "k": k, "delta": delta, "epsilon": p.epsilon, "n": n, "B": B,
              "sigma_measured": res.sigma, "sigma_oracle": ref, "relative_error": rel}
    (outdir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    print(json.dumps(report, indent=2))
    return report


def cmd_sweep_theta(args, cfg, outdir):
    from ..sweep import theta_sweep
    from .snapshot import write_snapshot

    u0 = build_initial(cfg)
    rep = theta_sweep(u0, cfg.model, cfg.stepper, args.thetas, cfg.t_end)
    for th, uf in zip(rep.thetas, rep.final_states):
        sub = outdir / f"theta_{th:g}"
        sub.mkdir(exist_ok=True)
        from ..dynamics import SimState
        pt = cfg.model.with_(theta=th)
        write_snapshot(SimState(cfg.t_end, uf, pt), sub / "final.bin")
    log = CsvLog(outdir / "sweep.csv", ["theta", "energy_final", "distance_to_next", "runtime_s",
                                        "conserved_drift"])
    for row in rep.rows():
        log.write(row)
    log.close()
    text = rep.summary()
    (outdir / "summary.txt").write_text(text + "\n")
    print(text)


def cmd_refine_grid(args, cfg, outdir):
    from dataclasses import replace

    from ..spectral import PeriodicGrid
    from ..sweep import galerkin_refinement

    fine = PeriodicGrid(cfg.grid.dim, max(args.sizes))
    u0 = build_initial(replace(cfg, grid=fine))
    rep = galerkin_refinement(u0, cfg.model, cfg.stepper, args.sizes, cfg.t_end, dim=cfg.grid.dim)
    log = CsvLog(outdir / "refine.csv", ["n", "energy_final", "error_vs_finest", "runtime_s"])
    for i, n in enumerate(rep.thetas):
        err = rep.pairwise_distances[i] if i < len(rep.pairwise_distances) else None
        log.write((n, rep.energies[i], err, rep.runtimes[i]))
    log.close()
    text = rep.summary() + f"\nlog-error slope per grid point: {rep.rate}"
    (outdir / "summary.txt").write_text(text + "\n")
    print(text)


def cmd_climb(args, cfg, outdir):
    from ..climb import loop_scenario
    from .. import diagnostics

    ic = cfg.initial_condition
    if ic.type != "tanh_loops":
        raise ConfigError("climb needs initial.type = tanh_loops")
    if not cfg.model.climb_on:
        raise ConfigError("climb needs an enabled [climb] section")
    out = loop_scenario(ic.centers, ic.radii, cfg.model, cfg.stepper, cfg.t_end,
                        cadence=cfg.output.diagnostics_cadence, grid=cfg.grid)
    d = CsvLog(outdir / "diagnostics.csv", diagnostics.CSV_COLUMNS)
    for rec in out["diagnostics"]:
        d.write(rec.row())
    d.close()
    lp = CsvLog(outdir / "loops.csv", ["t", "loop_id", "mean_radius", "center_x", "center_y"])
    for row in out["loops"]:
        lp.write(row)
    lp.close()


COMMANDS = {
    "simulate": (cmd_simulate, True),
    "resume": (cmd_resume, True),
    "profile": (cmd_profile, False),
    "verify-interface": (cmd_verify_interface, False),
    "sweep-theta": (cmd_sweep_theta, True),
    "refine-grid": (cmd_refine_grid, True),
    "climb": (cmd_climb, True),
}


def cli_dispatch(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except UsageError as e:
        stderr(str(e))
        return EXIT_INVALID
    except SystemExit as e:  # --help
        return EXIT_OK if not e.code else EXIT_INVALID
    if not args.command:
        stderr(ap.format_usage().rstrip())
        return EXIT_INVALID
    fn, needs_cfg = COMMANDS[args.command]
    try:
        cfg = _load(args) if needs_cfg or getattr(args, "config", None) else None
    except ConfigError as e:
        stderr(f"invalid configuration: {e}")
        return EXIT_INVALID
    outdir = _outdir(cfg, args, args.command)
    t0 = time.perf_counter()
    status = EXIT_FAILURE
    try:
        with output_lock(outdir):
            try:
                fn(args, cfg, outdir)
                status = EXIT_OK
            except ConfigError as e:
                stderr(f"invalid input: {e}")
                status = EXIT_INVALID
            except (DegchError, ArithmeticError, ValueError, RuntimeError, OSError) as e:
                stderr(f"run failed: {type(e).__name__}: {e}")
                status = EXIT_FAILURE
            finally:
                write_manifest(outdir, ["degch", *argv], cfg.source_text if cfg else None,
                               time.perf_counter() - t0, status,
                               {"output_root_env": OUTPUT_ROOT_ENV})
    except RuntimeError as e:
        stderr(str(e))
        return EXIT_FAILURE
    return status


def main():
    sys.exit(cli_dispatch())
