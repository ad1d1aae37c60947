"""Command-line interface.

Subcommands cover the full workflow: ``simulate`` a labeled system to CSV,
``estimate-noise`` / ``discover`` on measurement CSVs, ``oracle`` for the
noise-free rank table of a labeled system, and ``montecarlo`` for repeated
end-to-end error tallies.
"""

from __future__ import annotations

import argparse
import sys

from . import dataio
from .dipca import DEFAULT_UNITY_CEILING, estimate_noise
from .errors import NoAdmissiblePartitionError, PovError
from .mc import run_montecarlo
from .pipeline import DiscoverOptions, discover
from .pov import DEFAULT_THRESHOLD
from .simulate import add_noise, simulate_noise_free
from .sysmodel import build_constraint_matrix, ground_truth_partitions


def _parse_snr(text, m):
    parts = [float(v) for v in text.split(",")]
    if len(parts) == 1:
        parts = parts * m
    if len(parts) != m:
        raise SystemExit(f"--snr needs 1 or {m} comma-separated values, got {len(parts)}")
    return parts


def _cmd_simulate(args):
    system, sources = dataio.read_system(args.config)
    traj = simulate_noise_free(
        system, sources, args.samples, burn_in=args.burn_in, seed=args.seed
    )
    meas = add_noise(traj, snr=_parse_snr(args.snr, system.n_variables), seed=args.seed)
    dataio.write_csv(dataio.Dataset(names=system.variables, data=meas.data), args.out)
    print(f"wrote {meas.data.shape[1]} samples of {system.n_variables} variables to {args.out}")
    if args.truth:
        partitions = ground_truth_partitions(build_constraint_matrix(system))
        dataio._write_json(dataio.truth_to_dict(system, meas, partitions), args.truth)
        print(f"wrote ground truth to {args.truth}")


def _cmd_estimate_noise(args):
    dataset = dataio.read_csv(args.data)
    noise = estimate_noise(
        dataset.data,
        args.lag,
        d=args.d,
        center=not args.no_center,
        unity_ceiling=args.unity_ceiling,
    )
    dataio._write_json(dataio.noise_to_dict(noise), args.out)
    sig = ", ".join(f"{name}={s:.4g}" for name, s in zip(dataset.names, noise.sigmas))
    print(f"estimated sigmas ({sig}) with d={noise.d_used} in {noise.iterations} iterations")
    if not noise.converged:
        print("warning: estimation did not converge", file=sys.stderr)


def _cmd_discover(args):
    dataset = dataio.read_csv(args.data)
    options = DiscoverOptions(
        lag_max=args.lag,
        lag2=args.lag2,
        threshold=args.threshold,
        unity_ceiling=args.unity_ceiling,
        center=not args.no_center,
    )
    report = discover(dataset.data, names=dataset.names, options=options)
    dataio.write_report(report, args.report)
    st = report.structure
    print(f"structure: n_a={st.n_a} n_d={st.n_d} n_s={st.n_s}")
    for p in report.partitions:
        deps = ", ".join(dataset.names[i] for i in p.dependent)
        print(f"  {{{deps}}}  cond={p.cond:10.4g}  admissible={int(p.admissible)}")
    unamb = ", ".join(dataset.names[i] for i in report.sources.unambiguous) or "-"
    amb = ", ".join(dataset.names[i] for i in report.sources.ambiguous) or "-"
    print(f"unambiguous sources: {unamb}")
    print(f"ambiguous sources:   {amb}")
    print(f"report written to {args.report}")


def _cmd_oracle(args):
    system, _ = dataio.read_system(args.config)
    partitions = ground_truth_partitions(build_constraint_matrix(system))
    display = sorted(partitions, key=lambda p: (-p.rank, p.dependent))
    names = system.variables
    print(f"{'dependent set':<28}{'rank':>6}  {'admissible':>10}  free variables")
    for p in display:
        deps = "{" + ", ".join(names[i] for i in p.dependent) + "}"
        free = "{" + ", ".join(names[i] for i in p.free) + "}" if p.admissible else "-"
        print(f"{deps:<28}{p.rank:>6}  {int(p.admissible):>10}  {free}")
    if args.json:
        doc = {
            "schema_version": dataio.SCHEMA_VERSION,
            "variables": list(names),
            "partitions": [
                {
                    "dependent": [names[i] for i in p.dependent],
                    "rank": p.rank,
                    "admissible": p.admissible,
                    "free": [names[i] for i in p.free],
                }
                for p in display
            ],
        }
        dataio._write_json(doc, args.json)


def _cmd_montecarlo(args):
    cfg = dataio.read_mc_config(args.config)
    table = run_montecarlo(cfg, workers=args.workers)
    dataio.write_error_table(table, cfg.system.variables, args.out)
    print(f"{cfg.runs} runs, {table.failed_runs} failed; table written to {args.out}")
    for row in table.rows:
        combo = "+".join(cfg.system.variables[i] for i in row.dependent)
        if row.truth_admissible:
            print(f"  {combo:<20} admissible    type II {row.type2_pct:5.1f}%")
        else:
            print(f"  {combo:<20} inadmissible  type I  {row.type1_pct:5.1f}%")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="daepov",
        description="Discover pure source variables in noisy linear dynamical systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a labeled system and add measurement noise")
    p.add_argument("--config", required=True, help="system description JSON")
    p.add_argument("--samples", type=int, required=True, help="retained samples per variable")
    p.add_argument("--burn-in", type=int, default=500)
    p.add_argument("--snr", required=True, help="per-variable SNR, comma separated")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="measurement CSV path")
    p.add_argument("--truth", help="optional ground-truth JSON path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate-noise", help="estimate per-variable noise sigmas")
    p.add_argument("--data", required=True, help="measurement CSV")
    p.add_argument("--lag", type=int, required=True)
    p.add_argument("--d", type=int, default=None, help="constraint count (default: auto)")
    p.add_argument("--unity-ceiling", type=float, default=DEFAULT_UNITY_CEILING)
    p.add_argument("--no-center", action="store_true")
    p.add_argument("--out", required=True, help="noise model JSON path")
    p.set_defaults(func=_cmd_estimate_noise)

    p = sub.add_parser("discover", help="run the full discovery pipeline")
    p.add_argument("--data", required=True, help="measurement CSV")
    p.add_argument("--lag", type=int, default=5, help="working lag (default 5)")
    p.add_argument("--lag2", type=int, default=None, help="second lag (default: auto)")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--unity-ceiling", type=float, default=DEFAULT_UNITY_CEILING)
    p.add_argument("--no-center", action="store_true")
    p.add_argument("--report", required=True, help="report JSON path")
    p.set_defaults(func=_cmd_discover)

    p = sub.add_parser("oracle", help="noise-free rank table of a labeled system")
    p.add_argument("--config", required=True, help="system description JSON")
    p.add_argument("--json", help="optional JSON output path")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("montecarlo", help="repeated simulate/discover error tally")
    p.add_argument("--config", required=True, help="Monte Carlo config JSON")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="error table CSV path")
    p.set_defaults(func=_cmd_montecarlo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except NoAdmissiblePartitionError as err:
        print(f"error: {err}", file=sys.stderr)
        print(
            "hint: every condition number exceeded the threshold; consider raising it",
            file=sys.stderr,
        )
        return 1
    except PovError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
