"""Command-line entry point: ``zeeman-cim {gen,exact,run,sweep,fig}``.

Exit codes: 0 success, 1 runtime fault, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import harness
from .errors import CimError, InvalidArgumentError
from .ising import brute_force_ground, generate_sk, load_problem, save_problem
from .models import SolverConfig, run_trajectory, save_trajectory
from .schedules import Model, ScheduleConfig
from .zeeman import Variant, ZeemanMethod


class _UsageError(Exception):
    pass


def _floats(text: str):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _spins(s) -> str:
    return " ".join("+1" if v > 0 else "-1" for v in s)


def _fmt(v) -> str:
    return format(float(v), ".17g")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zeeman-cim",
                                     description="Coherent Ising machine simulators with Zeeman terms.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a random SK problem file")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)

    exact = sub.add_parser("exact", help="brute-force ground state of a problem file")
    exact.add_argument("--problem", required=True)

    run = sub.add_parser("run", help="run one trajectory")
    run.add_argument("--problem", required=True)
    run.add_argument("--model", type=str.upper, choices=[m.value for m in Model], default="MFZ")
    run.add_argument("--method", type=str.upper, choices=[v.value for v in Variant], default="CAC")
    run.add_argument("--zeta", type=float, default=1.0)
    run.add_argument("--beta", type=float, default=10.0)
    run.add_argument("--g2", type=float, default=0.0)
    run.add_argument("--j", type=float, default=1.0)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--dt", type=float, default=ScheduleConfig.dt)
    run.add_argument("--total-steps", type=int, default=ScheduleConfig.total_steps)
    run.add_argument("--noise-off", action="store_true")
    run.add_argument("--no-exact", action="store_true",
                     help="skip the brute-force ground state (success is then unknown)")
    run.add_argument("--traj", help="write the trajectory to this CSV file")
    run.add_argument("--record-every", type=int, default=10)

    sweep = sub.add_parser("sweep", help="success-probability sweep from a config file")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--workers", type=int, default=None)

    fig = sub.add_parser("fig", help="regenerate the data behind one figure")
    fig.add_argument("--which", type=int, choices=[1, 2, 3, 4], required=True)
    fig.add_argument("--out-dir", required=True)
    fig.add_argument("--instances", type=int, default=100)
    fig.add_argument("--master-seed", type=int, default=0)
    fig.add_argument("--zeta-grid", type=_floats, default=None)
    fig.add_argument("--dt", type=float, default=ScheduleConfig.dt)
    fig.add_argument("--total-steps", type=int, default=ScheduleConfig.total_steps)
    fig.add_argument("--workers", type=int, default=None)
    return parser


def _cmd_gen(args, out):
    save_problem(generate_sk(args.n, args.seed), args.out)
    print(f"wrote {args.out}", file=out)


def _cmd_exact(args, out):
    gt = brute_force_ground(load_problem(args.problem))
    print(f"energy = {_fmt(gt.energy)}", file=out)
    print(f"config = {_spins(gt.config)}", file=out)
    print(f"degenerate = {str(gt.degenerate).lower()}", file=out)


def _cmd_run(args, out):
    problem = load_problem(args.problem)
    try:
        sched = ScheduleConfig(model=args.model, g2=args.g2, dt=args.dt,
                               total_steps=args.total_steps)
        cfg = SolverConfig(sched, ZeemanMethod(args.method, args.zeta, args.beta, args.j),
                           seed=args.seed, noise_off=args.noise_off,
                           record_trajectory=args.traj is not None,
                           record_every=args.record_every)
    except InvalidArgumentError as exc:
        raise _UsageError(str(exc)) from exc
    ground = None if args.no_exact else brute_force_ground(problem)
    res = run_trajectory(problem, cfg, ground)
    if args.traj:
        save_trajectory(res.trajectory, args.traj)
    lines = [
        ("model", args.model), ("method", args.method), ("zeta", _fmt(args.zeta)),
        ("beta", _fmt(args.beta)), ("g2", _fmt(args.g2)), ("j", _fmt(args.j)),
        ("seed", args.seed), ("steps_run", res.steps_run),
        ("final_energy", _fmt(res.final_energy)),
        ("ground_energy", "unknown" if ground is None else _fmt(ground.energy)),
        ("success", "unknown" if res.success is None else str(res.success).lower()),
        ("final_spins", _spins(res.final_spins)),
    ]
    for key, value in lines:
        print(f"{key} = {value}", file=out)


def _cmd_sweep(args, out):
    try:
        spec, options = harness.load_config(args.config)
    except InvalidArgumentError as exc:
        raise _UsageError(str(exc)) from exc
    workers = args.workers if args.workers is not None else options.get("workers")
    result = harness.run_batch(spec, workers)
    harness.export_csv(result, args.out)
    _report_faults(result, out)
    print(f"wrote {args.out} ({len(result.cells)} cells)", file=out)


def _report_faults(result, out):
    for key, c in sorted(result.cells.items()):
        if c.faults:
            print(f"faults {key}: {c.faults}/{c.runs}", file=out)


def _cmd_fig(args, out):
    os.makedirs(args.out_dir, exist_ok=True)
    if args.which == 1:
        problem = generate_sk(16, harness.FIG1_PROBLEM_SEED)
        save_problem(problem, os.path.join(args.out_dir, "fig1_problem.json"))
        for stem, cfg in harness.figure1_configs(dt=args.dt, total_steps=args.total_steps).items():
            res = run_trajectory(problem, cfg)
            path = os.path.join(args.out_dir, stem + ".csv")
            save_trajectory(res.trajectory, path)
            print(f"wrote {path}", file=out)
        return
    overrides = dict(instances=args.instances, master_seed=args.master_seed, dt=args.dt,
                     total_steps=args.total_steps)
    if args.zeta_grid:
        overrides["zeta_grid"] = args.zeta_grid
    for stem, spec in harness.figure_specs(args.which, **overrides).items():
        result = harness.run_batch(spec, args.workers)
        path = os.path.join(args.out_dir, stem + ".csv")
        harness.export_csv(result, path)
        _report_faults(result, out)
        print(f"wrote {path}", file=out)


_COMMANDS = {"gen": _cmd_gen, "exact": _cmd_exact, "run": _cmd_run, "sweep": _cmd_sweep,
             "fig": _cmd_fig}


def cli_main(argv=None, out=None) -> int:
    """Run the CLI and return its exit code instead of exiting."""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _COMMANDS[args.command](args, out)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"zeeman-cim: error: {exc}", file=sys.stderr)
        return 2
    except (CimError, OSError) as exc:
        print(f"zeeman-cim: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
