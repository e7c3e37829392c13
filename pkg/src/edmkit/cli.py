"""Command line front end.

Distance CSVs hold SQUARED distances, matching the in-memory convention.
Subcommands that read or write distance matrices accept
``--plain-distances`` to convert at the boundary: inputs are squared on
load and matrix outputs square-rooted on save.  Point CSVs are d rows by
n columns, one point per column.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .bench import ExperimentSpec, SCENARIOS, emit_csv, run, swiss_demo
from .completion import METHODS, NoisyObservation, complete_edm
from .core import DistanceMatrix, ObservationMask, PointSet, full_mask
from .embedding import classical_mds
from .matrixio import load_matrix, load_times, load_vector, save_matrix
from .unfolding import UnfoldingInstance, solve_mdu
from .unlabeled import EchoSet, sort_all_echoes, turnpike_recover


def _dist_in(arr: np.ndarray, plain: bool) -> np.ndarray:
    return arr ** 2 if plain else arr


def _dist_out(arr: np.ndarray, plain: bool) -> np.ndarray:
    return np.sqrt(arr) if plain else arr


def _cmd_mds(args) -> int:
    D = DistanceMatrix(_dist_in(load_matrix(args.infile), args.plain_distances))
    points = classical_mds(D, args.dim)
    save_matrix(args.out, points.coords)
    return 0


def _cmd_complete(args) -> int:
    D = _dist_in(load_matrix(args.infile), args.plain_distances)
    mask = ObservationMask(load_matrix(args.mask)) if args.mask else full_mask(D.shape[0])
    obs = NoisyObservation(D * mask.entries, mask)
    result = complete_edm(obs, args.dim, method=args.method, lam=args.lam)
    save_matrix(args.out, _dist_out(result.edm.entries, args.plain_distances))
    if args.points:
        points = result.points
        if points is None:
            points = classical_mds(result.edm, args.dim)
        save_matrix(args.points, points.coords)
    print(f"{args.method}: {result.iterations} iterations, converged={result.converged}")
    return 0 if result.converged else 2


def _cmd_unfold(args) -> int:
    cross = _dist_in(load_matrix(args.cross), args.plain_distances)
    solution = solve_mdu(UnfoldingInstance(cross), args.dim, method=args.method, lam=args.lam)
    save_matrix(args.out_mics, solution.microphones.coords)
    save_matrix(args.out_sources, solution.sources.coords)
    result = solution.completion
    print(f"{args.method}: {result.iterations} iterations, converged={result.converged}")
    return 0 if result.converged else 2


def _cmd_echo_sort(args) -> int:
    mics = PointSet(load_matrix(args.mics))
    times = load_times(args.times)
    if len(times) != mics.n:
        raise ValueError(f"{mics.n} microphones but {len(times)} time arrays")
    echoes = EchoSet(tuple(times), speed=args.speed)
    window = None if args.window == "auto" else float(args.window)
    assignments = sort_all_echoes(mics, echoes, window=window, accept_tau=args.tau)
    for a in assignments:
        pos = ", ".join(f"{c:.6f}" for c in a.image_source)
        print(f"anchor {a.anchor_time:.6f} s  score {a.score:.3e}  image source ({pos})")
    print(f"{len(assignments)} image sources accepted")
    if args.out and assignments:
        save_matrix(args.out, np.array([a.image_source for a in assignments]).T)
    return 0


def _cmd_turnpike(args) -> int:
    values = load_vector(args.distances)
    solutions = turnpike_recover(values, n_max=args.n_max)
    for sol in solutions:
        print(",".join("%.17g" % c for c in sol.coords[0]))
    if args.out and solutions:
        save_matrix(args.out, np.array([sol.coords[0] for sol in solutions]))
    return 0


def _cmd_bench(args) -> int:
    with open(args.spec) as fh:
        spec = ExperimentSpec.from_json(fh.read())
    if args.scenario and args.scenario != spec.scenario:
        raise ValueError(
            f"--scenario {args.scenario} contradicts the spec file ({spec.scenario})"
        )
    if args.jitter_on:
        spec = replace(spec, jitter_on=args.jitter_on)
    result = run(spec)
    with open(args.out, "w") as fh:
        fh.write(emit_csv(result))
    print(f"wrote {len(result.rows)} rows to {args.out}")
    return 0


def _cmd_swiss_demo(args) -> int:
    demo = swiss_demo()
    for city, col in zip(demo.cities, demo.coords.T):
        print(f"{city}: ({col[0]:.2f}, {col[1]:.2f})")
    print(f"energy fraction of the two kept eigenvalues: {demo.energy_fraction!r}")
    if args.out:
        save_matrix(args.out, demo.coords)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edmkit",
        description="Euclidean distance matrix toolbox: embed, complete, unfold, sort echoes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mds", help="embed a distance matrix into R^dim")
    p.add_argument("--in", dest="infile", required=True, help="distance matrix CSV")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--out", required=True, help="point CSV to write")
    p.add_argument("--plain-distances", action="store_true")
    p.set_defaults(func=_cmd_mds)

    p = sub.add_parser("complete", help="complete or denoise a partial distance matrix")
    p.add_argument("--in", dest="infile", required=True, help="observed distances CSV")
    p.add_argument("--mask", help="0/1 observation mask CSV (default: all observed)")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--method", choices=METHODS, default="sdr")
    p.add_argument("--lambda", dest="lam", type=float, help="data weight of the sdr method")
    p.add_argument("--out", required=True, help="completed distance matrix CSV")
    p.add_argument("--points", help="optionally write embedded points CSV")
    p.add_argument("--plain-distances", action="store_true")
    p.set_defaults(func=_cmd_complete)

    p = sub.add_parser("unfold", help="recover two point sets from cross distances only")
    p.add_argument("--cross", required=True, help="m x k cross distance CSV")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--method", choices=METHODS, default="sdr")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--out-mics", default="mics_out.csv", help="point CSV for the row set")
    p.add_argument("--out-sources", default="sources_out.csv", help="point CSV for the column set")
    p.add_argument("--plain-distances", action="store_true")
    p.set_defaults(func=_cmd_unfold)

    p = sub.add_parser("echo-sort", help="match echo arrival times to image sources")
    p.add_argument("--mics", required=True, help="microphone positions CSV (3 x m)")
    p.add_argument("--times", required=True, help="JSON array of per-mic arrival times")
    p.add_argument("--speed", type=float, default=343.0, help="speed of sound, m/s")
    p.add_argument(
        "--window",
        default="auto",
        help="candidate window in seconds, or 'auto' for array diameter / speed",
    )
    p.add_argument("--tau", type=float, default=1e-3, help="acceptance threshold factor")
    p.add_argument("--out", help="optionally write accepted image source positions CSV")
    p.set_defaults(func=_cmd_echo_sort)

    p = sub.add_parser("turnpike", help="recover line points from unlabeled distances")
    p.add_argument("--distances", required=True, help="CSV of plain (not squared) distances")
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--out", help="optionally write solutions CSV, one per row")
    p.set_defaults(func=_cmd_turnpike)

    p = sub.add_parser("bench", help="run a Monte Carlo completion benchmark")
    p.add_argument("--scenario", choices=SCENARIOS, help="must match the spec file if given")
    p.add_argument("--spec", required=True, help="ExperimentSpec JSON file")
    p.add_argument("--out", required=True, help="results CSV to write")
    p.add_argument("--jitter-on", choices=("squared", "sqrt"), help="override jitter semantics")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("swiss-demo", help="embed five cities from rail travel minutes")
    p.add_argument("--out", help="optionally write the 2 x 5 coordinates CSV")
    p.set_defaults(func=_cmd_swiss_demo)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
