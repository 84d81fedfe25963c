"""Command-line interface: distance queries, walks, benchmarks, escape-rate
experiments, enumeration and the continuous verification harness.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 budget guard.
Every command takes --seed (falling back to the TEDWALK_SEED environment
variable, then 0); given the same configuration the CSV outputs are
byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import __version__, bench, escape, figures, walk
from .distance import complexity_probe, full_distance
from .edits import oracle_distance
from .incremental import TrackerDivergence, apply_edit, new_tracker, verify
from .tree import MAX_ENUMERATION_SIZE, TreeParseError, canonical_code, enumerate_trees, read_trees

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

ORACLE_MAX_SIZE = 8
PAPER_SCALE = {"sizes": list(range(2, 11)), "steps": 10_000, "replicates": 1000}


def _default_seed() -> int:
    return int(os.environ.get("TEDWALK_SEED", "0"))


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}")
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError(f"sizes must be positive integers, got {text!r}")
    return sizes


def _load_one_tree(path: str):
    trees = read_trees(path)
    if not trees:
        raise TreeParseError(f"{path}: no tree found", 0)
    return trees[0]


def _write_metadata(out: Path, command: str, config: dict) -> None:
    meta = {
        "command": command,
        "version": __version__,
        "rng": walk.RNG_IDENTITY,
        **config,
    }
    (out / "metadata.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def _float(x) -> str:
    return repr(float(x))


def cmd_dist(args) -> int:
    a = _load_one_tree(args.file_a)
    b = _load_one_tree(args.file_b)
    print(full_distance(a, b).distance)
    if args.stats:
        probe = complexity_probe(a, b)
        print(f"pairs={probe['pairs']} pivots={probe['pivots']}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    a = _load_one_tree(args.file_a)
    b = _load_one_tree(args.file_b)
    if a.size > ORACLE_MAX_SIZE or b.size > ORACLE_MAX_SIZE:
        print(f"oracle requires sizes <= {ORACLE_MAX_SIZE}", file=sys.stderr)
        return EXIT_INPUT
    cap = args.cap if args.cap is not None else a.size + b.size
    print(oracle_distance(a, b, cap))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    if not 1 <= args.n <= MAX_ENUMERATION_SIZE:
        print(f"n must be in 1..{MAX_ENUMERATION_SIZE}", file=sys.stderr)
        return EXIT_INPUT
    for code in enumerate_trees(args.n):
        print(code)
    return EXIT_OK


def cmd_walk(args) -> int:
    if args.steps > args.budget and not args.force:
        print(f"{args.steps} steps exceed the budget {args.budget}; use --force", file=sys.stderr)
        return EXIT_BUDGET
    x = args.sizes[0]
    rng = walk.rng_stream(args.seed, 0)
    t0 = walk.initial_tree(x, rng)
    records = walk.simulate(t0, args.steps, walk.Kernel(args.kernel), rng, distance=args.distance)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "trajectory.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h", "op", "size", "height", "outdegree", "strahler", "dist"])
        for r in records:
            writer.writerow(
                [
                    r.h,
                    r.op.value if r.op else "-",
                    r.size,
                    r.height,
                    r.outdegree,
                    r.strahler,
                    "" if r.dist is None else r.dist,
                ]
            )
    _write_metadata(
        out,
        "walk",
        {
            "seed": args.seed,
            "stream": 0,
            "initial_size": x,
            "initial_tree": canonical_code(t0),
            "steps": args.steps,
            "kernel": args.kernel,
            "distance": args.distance,
        },
    )
    if args.svg:
        figures.trajectory_figure(records, out / "trajectory.svg")
    print(f"wrote {out / 'trajectory.csv'}")
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = bench.run_bench(args.sizes, args.trials, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "bench.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["size", "op", "trials", "t_full_mean", "t_incremental_mean", "ratio"])
        for r in rows:
            writer.writerow([r.size, r.op, r.trials, _float(r.t_full), _float(r.t_incremental), _float(r.ratio)])
    _write_metadata(out, "bench", {"seed": args.seed, "sizes": args.sizes, "trials": args.trials})
    if args.svg:
        figures.bench_figure(rows, out / "bench.svg")
    for r in rows:
        if r.op == "all":
            print(
                f"size {r.size}: full {r.t_full:.6f}s, incremental {r.t_incremental:.6f}s, "
                f"ratio {r.ratio:.2f}"
            )
    return EXIT_OK


def cmd_escape(args) -> int:
    sizes, steps, replicates = args.sizes, args.steps, args.replicates
    if args.paper_scale:
        sizes = PAPER_SCALE["sizes"]
        steps = PAPER_SCALE["steps"]
        replicates = PAPER_SCALE["replicates"]
        total = len(sizes) * steps * replicates
        print(
            f"paper-scale preset: sizes {sizes[0]}..{sizes[-1]}, {steps} steps, "
            f"{replicates} replicates = {total} incremental steps; expect hours of runtime"
        )
    try:
        curves = escape.run_grid(
            sizes,
            steps,
            replicates,
            args.seed,
            kernel=walk.Kernel(args.kernel),
            jobs=args.jobs,
            force=args.force,
        )
    except escape.BudgetExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BUDGET
    try:
        model = escape.fit_escape_model(curves)
    except escape.FitError as exc:
        print(f"input error: configuration too small to fit: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "curves.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["x", "h", "mean_dist", "mean_size", "mean_height", "mean_outdegree", "mean_strahler", "n"]
        )
        for x in curves.sizes:
            cx = curves.curves[x]
            for h in range(curves.steps + 1):
                writer.writerow(
                    [
                        x,
                        h,
                        _float(cx["dist"][h]),
                        _float(cx["size"][h]),
                        _float(cx["height"][h]),
                        _float(cx["outdegree"][h]),
                        _float(cx["strahler"][h]),
                        curves.replicates,
                    ]
                )
    with open(out / "alpha.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h", "alpha"])
        for h in sorted(model.alpha):
            writer.writerow([h, _float(model.alpha[h])])
    beta_lines = [
        _float(model.beta),
        f"# exponent={_float(model.exponent)}",
        f"# sizes={','.join(map(str, curves.sizes))}",
        f"# steps={curves.steps}",
        f"# replicates={curves.replicates}",
        f"# seed={curves.seed}",
    ]
    (out / "beta.txt").write_text("\n".join(beta_lines) + "\n")
    _write_metadata(
        out,
        "escape",
        {
            "seed": args.seed,
            "sizes": sizes,
            "steps": steps,
            "replicates": replicates,
            "kernel": args.kernel,
            "rho_offset": args.rho_offset,
            "alpha_grid": sorted(model.alpha),
        },
    )
    if args.svg:
        figures.curves_figure(curves, args.rho_offset, out / "curves.svg")
        figures.ratio_figure(curves, out / "ratios.svg")
        figures.alpha_figure(model, out / "alpha.svg")
        figures.sharp_rate_figure(curves, model, out / "sharp_rate.svg")
    print(f"beta = {model.beta!r} (exponent 5/4 fixed); outputs in {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.steps > args.budget and not args.force:
        print(f"{args.steps} steps exceed the budget {args.budget}; use --force", file=sys.stderr)
        return EXIT_BUDGET
    x = args.sizes[0]
    rng = walk.rng_stream(args.seed, 0)
    t0 = walk.initial_tree(x, rng)
    tracker = new_tracker(t0, t0, verify_every=args.verify_every)
    tracker._skip_repair = args.inject_skip_repair
    for h in range(1, args.steps + 1):
        op = walk.sample_op(tracker.current, walk.Kernel(args.kernel), rng)
        try:
            apply_edit(tracker, op)
        except TrackerDivergence as exc:
            m = exc.mismatch
            print(
                f"divergence at step {exc.step}: op {exc.op.kind.value} on {exc.op.target}, "
                f"pair ({m.v},{m.w}) field {m.field}: incremental {m.got}, full {m.want}"
            )
            return EXIT_VERIFY
    mismatch = verify(tracker)
    if mismatch is not None:
        print(f"divergence after {args.steps} steps: {mismatch}")
        return EXIT_VERIFY
    print(f"ok: {args.steps} steps from size {x}, incremental distance matches full recomputation")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tedwalk",
        description="constrained edit distance on unordered trees, incremental "
        "distance tracking along random walks, and escape-rate experiments",
    )
    parser.add_argument("--version", action="version", version=f"tedwalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sizes_default="10"):
        p.add_argument("--seed", type=int, default=_default_seed(), help="rng seed (env TEDWALK_SEED)")
        p.add_argument("--sizes", type=_parse_sizes, default=_parse_sizes(sizes_default))
        p.add_argument("--steps", type=int, default=1000)
        p.add_argument("--replicates", type=int, default=100)
        p.add_argument("--kernel", choices=[k.value for k in walk.Kernel], default="balanced")
        p.add_argument("--out", default="out")
        p.add_argument("--svg", action="store_true", help="also render figures")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--force", action="store_true", help="override the budget guard")
        p.add_argument("--budget", type=int, default=escape.DEFAULT_STEP_BUDGET, help=argparse.SUPPRESS)

    p = sub.add_parser("dist", help="edit distance between two tree files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--stats", action="store_true", help="print pair and pivot counts")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("oracle", help="exact BFS distance (small trees)")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--cap", type=int, default=None, help="search radius cap")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("enumerate", help="canonical codes of all trees of size n")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("walk", help="simulate one random walk")
    common(p)
    p.add_argument(
        "--distance", choices=["incremental", "full", "none"], default="incremental"
    )
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("bench", help="incremental vs from-scratch timing")
    common(p, sizes_default="10,50,100")
    p.add_argument("--trials", type=int, default=10)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("escape", help="escape-rate experiment grid")
    common(p, sizes_default="2,3,4,5,6")
    p.set_defaults(steps=2000, replicates=200)
    p.add_argument("--paper-scale", action="store_true", help="sizes 2..10, 10000 steps, 1000 replicates")
    p.add_argument("--rho-offset", type=int, choices=[0, 1], default=0)
    p.set_defaults(func=cmd_escape)

    p = sub.add_parser("verify", help="walk with shadow full recomputation")
    common(p)
    p.add_argument("--verify-every", type=int, default=1)
    p.add_argument("--inject-skip-repair", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TreeParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
