"""Command-line front end.

Subcommands
-----------
simulate     run a seeded ensemble and write trajectory/summary CSV
fixedpoint   solve the mean-field fixed point and print a machine line
bounds       evaluate the analytic time bounds (t-eta, p-s, t-delta)
experiment   run a named preset (fig1..fig11, desk-* variants)

Exit codes: 0 ok, 2 invalid input, 3 I/O failure, 4 no convergence.
``--threads`` caps parallelism (fallback: MERIT_DYNAMICS_THREADS, then
the CPU count); outputs are independent of the thread count.

Config files (``experiment --config``) use one assignment per line::

    # comment lines and blanks are ignored
    n_runs = 50
    master_seed = 7
    grid.eps = 0.01, 0.02, 0.05   # commas make a list
    fixed.start = "0.2,0.2"       # quote values that contain commas

Dotted keys address the spec's grid/fixed maps; bare keys override the
spec fields n_runs, horizon and master_seed.
"""
from __future__ import annotations

import argparse
import csv as _csv
import json
import math
import os
import sys
from dataclasses import replace

from .core import GroupState, ModelParams, TransitionModel
from .errors import (
    BoundInvalidError,
    CapacityInfeasibleError,
    DegenerateStateError,
    InvalidParamsError,
    NoConvergenceError,
    UnsupportedModelError,
)
from . import bounds as bounds_mod
from . import experiments as exp_mod
from .meanfield import (
    DEFAULT_TOLERANCE,
    aa_equilibrium_separation_qpos,
    aa_fixed_point,
    aa_separation_lower_bound,
    ea_fixed_point,
    epsilon_threshold,
    iterate,
)
from .stochastic import SimConfig, run_ensemble

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_NO_CONVERGENCE = 4

_INVALID_ERRORS = (
    InvalidParamsError,
    BoundInvalidError,
    CapacityInfeasibleError,
    DegenerateStateError,
    UnsupportedModelError,
)


def _num(value: float) -> str:
    return format(value, ".12g")


def _resolve_threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("MERIT_DYNAMICS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidParamsError(f"MERIT_DYNAMICS_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def _parse_init(text: str, n: int) -> GroupState:
    try:
        x_a, x_b = (float(part) for part in text.split(","))
    except ValueError:
        raise InvalidParamsError(f"--init must look like 'x_a,x_b', got {text!r}") from None
    return GroupState.from_counts(round(x_a * n), round(x_b * n), n)


def _cmd_simulate(args) -> int:
    params = ModelParams(alpha=args.alpha, p=args.p, q=args.q, epsilon=args.eps, n_per_group=args.n)
    config = SimConfig(
        params=params,
        model=TransitionModel.parse(args.model),
        initial=_parse_init(args.init, args.n),
        horizon_t=args.t,
        master_seed=args.seed,
        n_runs=args.runs,
    )
    trajs = run_ensemble(config, n_workers=_resolve_threads(args.threads))
    meta = {
        "model": args.model,
        "alpha": args.alpha,
        "p": args.p,
        "q": args.q,
        "eps": args.eps,
        "n": args.n,
        "master_seed": args.seed,
        "init": args.init,
    }
    if args.runs == 1:
        exp_mod.write_trajectory(trajs[0], args.out, metadata=meta)
    else:
        exp_mod.write_ensemble_summary(trajs, args.out, metadata=meta)
    print(args.out)
    return EXIT_OK


def _solve_fixedpoint(args):
    params = ModelParams(alpha=args.alpha, p=args.p, q=args.q, epsilon=args.eps, n_per_group=1)
    model = TransitionModel.parse(args.model)
    if model is TransitionModel.EQUAL_ADVANTAGE or args.eps == 0.0:
        return params, ea_fixed_point(params), None
    threshold = epsilon_threshold(params.alpha, params.p)
    if params.q == 0.0:
        point = aa_fixed_point(params, tolerance=args.tol)
    else:
        report = iterate(
            TransitionModel.AFFINITY_ADVANTAGE,
            GroupState(*exp_mod.START_POINTS["under"]),
            params,
            tolerance=args.tol,
        )
        if not report.converged:
            raise NoConvergenceError(
                f"no convergence (residual {report.final.residual:.3e})",
                last_point=report.final,
                residual=report.final.residual,
            )
        point = report.final
    if params.epsilon >= threshold:
        separation_bound = aa_equilibrium_separation_qpos(params)
    else:
        separation_bound = aa_separation_lower_bound(params)
    return params, point, separation_bound


def _cmd_fixedpoint(args) -> int:
    params, point, separation_bound = _solve_fixedpoint(args)
    threshold = epsilon_threshold(params.alpha, params.p)
    if args.json:
        payload = {
            "x_a": point.x_a,
            "x_b": point.x_b,
            "regime": point.regime.value,
            "residual": point.residual,
            "epsilon_threshold": threshold,
        }
        if separation_bound is not None:
            payload["separation_bound"] = separation_bound
        print(json.dumps(payload))
        return EXIT_OK
    fields = [_num(point.x_a), _num(point.x_b), point.regime.value, _num(point.residual), _num(threshold)]
    if separation_bound is not None:
        fields.append(_num(separation_bound))
    print(" ".join(fields))
    return EXIT_OK


def _cmd_bounds(args) -> int:
    params = ModelParams(alpha=args.alpha, p=args.p, q=args.q, epsilon=0.0, n_per_group=args.n)
    if args.kind == "t-eta":
        inp = bounds_mod.ParityBoundInput(delta0=args.delta0, eta=args.eta, omega=args.omega, params=params)
        print(bounds_mod.time_to_parity_bound(inp))
    elif args.kind == "p-s":
        print(_num(bounds_mod.separation_prob_ps(args.delta, params)))
    else:  # t-delta
        value = bounds_mod.time_to_separation_bound(args.delta, args.omega, params)
        print("inf" if math.isinf(value) else int(value))
    return EXIT_OK


def parse_config_file(path: str) -> dict[str, object]:
    """Parse the key-value/array override format described above."""
    overrides: dict[str, object] = {}
    with open(path) as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InvalidParamsError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            fields = next(_csv.reader([value.strip()], skipinitialspace=True))
            parsed = [exp_mod._parse_scalar(f.strip()) for f in fields if f.strip() != ""]
            if not parsed:
                raise InvalidParamsError(f"{path}:{lineno}: empty value for {key!r}")
            overrides[key] = parsed if len(parsed) > 1 else parsed[0]
    return overrides


def apply_overrides(spec: exp_mod.ExperimentSpec, overrides: dict[str, object]) -> exp_mod.ExperimentSpec:
    grid = dict(spec.grid)
    fixed = dict(spec.fixed)
    scalars: dict[str, object] = {}
    for key, value in overrides.items():
        if key.startswith("grid."):
            grid[key[5:]] = list(value) if isinstance(value, list) else [value]
        elif key.startswith("fixed."):
            fixed[key[6:]] = value
        elif key in ("n_runs", "horizon", "master_seed"):
            scalars[key] = int(value)
        else:
            raise InvalidParamsError(f"unknown config key {key!r}")
    return replace(spec, grid=grid, fixed=fixed, **scalars)


def _cmd_experiment(args) -> int:
    if args.list:
        for name in exp_mod.list_presets():
            print(name)
        return EXIT_OK
    if not args.name:
        raise InvalidParamsError("experiment name required (or use --list)")
    spec = exp_mod.preset_spec(args.name)
    if args.config:
        spec = apply_overrides(spec, parse_config_file(args.config))
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    if args.runs is not None:
        spec = replace(spec, n_runs=args.runs)
    if args.horizon is not None:
        spec = replace(spec, horizon=args.horizon)
    spec = replace(spec, out_dir=args.out)
    table = exp_mod.run_experiment(spec, n_workers=_resolve_threads(args.threads))
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"{args.name}.csv")
    exp_mod.write_results(table, path)
    print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="merit-dynamics",
        description="Selection-dynamics simulator: stylized two-group models, "
        "mean-field solvers, analytic bounds and experiment presets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a seeded stochastic ensemble")
    sim.add_argument("--model", required=True, choices=["ea", "aa"])
    sim.add_argument("--alpha", type=float, required=True)
    sim.add_argument("--p", type=float, required=True)
    sim.add_argument("--q", type=float, default=0.0)
    sim.add_argument("--eps", type=float, default=0.0)
    sim.add_argument("--n", type=int, required=True, help="individuals per group")
    sim.add_argument("--t", type=int, required=True, help="horizon in generations")
    sim.add_argument("--runs", type=int, default=1)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--init", required=True, help="initial fractions 'x_a,x_b'")
    sim.add_argument("--out", required=True)
    sim.add_argument("--threads", type=int, default=None)
    sim.set_defaults(func=_cmd_simulate)

    fp = sub.add_parser("fixedpoint", help="solve the mean-field fixed point")
    fp.add_argument("--model", required=True, choices=["ea", "aa"])
    fp.add_argument("--alpha", type=float, required=True)
    fp.add_argument("--p", type=float, required=True)
    fp.add_argument("--q", type=float, default=0.0)
    fp.add_argument("--eps", type=float, default=0.0)
    fp.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    fp.add_argument("--json", action="store_true")
    fp.set_defaults(func=_cmd_fixedpoint)

    bnd = sub.add_parser("bounds", help="evaluate analytic time bounds")
    bnd.add_argument("kind", choices=["t-eta", "p-s", "t-delta"])
    bnd.add_argument("--alpha", type=float, required=True)
    bnd.add_argument("--p", type=float, required=True)
    bnd.add_argument("--q", type=float, default=0.0)
    bnd.add_argument("--n", type=int, required=True)
    bnd.add_argument("--delta0", type=float, default=0.8)
    bnd.add_argument("--eta", type=float, default=0.05)
    bnd.add_argument("--omega", type=float, default=0.05)
    bnd.add_argument("--delta", type=float, default=0.05)
    bnd.set_defaults(func=_cmd_bounds)

    ex = sub.add_parser("experiment", help="run a named experiment preset")
    ex.add_argument("name", nargs="?", help="preset name, e.g. fig1 or desk-fig9")
    ex.add_argument("--out", default="results")
    ex.add_argument("--seed", type=int, default=None)
    ex.add_argument("--runs", type=int, default=None)
    ex.add_argument("--horizon", type=int, default=None)
    ex.add_argument("--config", default=None, help="key=value override file")
    ex.add_argument("--threads", type=int, default=None)
    ex.add_argument("--list", action="store_true", help="enumerate presets")
    ex.set_defaults(func=_cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INVALID_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NoConvergenceError as exc:
        residual = "" if exc.residual is None else f" (residual {exc.residual:.3e})"
        print(f"error: {exc}{residual}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
