"""Command line interface.

    subcover gen     --kind random|planted|median|modified|compound|slab ...
    subcover solve   --algorithm greedy|small|large|auto|brute INSTANCE
    subcover verify  INSTANCE --cover COVER_FILE
    subcover bench   SPEC_FILE --out rows.csv
    subcover lb      --experiment pcell|distinguish-median|distinguish-slab ...

Shared flags: --seed, --out, --config (flat key=value file), --budget.
All outputs are byte-deterministic for fixed seed and configuration;
wall-clock timings go to stderr (and into CSVs only under --timings).

Exit codes: 0 ok, 1 infeasible/uncovered/generation-failed, 2 usage,
3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Optional

import numpy as np

from ..core import (
    BudgetExhausted,
    Cover,
    InfeasibleError,
    Oracle,
    ParseError,
    PreconditionError,
    SetCoverError,
    SetSystem,
    TooLargeError,
    read_instance,
    verify_cover_naive,
    write_instance,
)
from ..lowerbound import (
    ExhaustedAttempts,
    MedianParams,
    MedianVsModified,
    SlabYesNo,
    check_median,
    distinguisher_experiment,
    estimate_p_elt_set,
    gen_compound,
    gen_median_instance,
    gen_modified_instance,
    gen_random_instance,
    gen_slab_instance,
)
from ..rng import stream
from ..solvers import SolverConfig
from .experiments import (
    RESULT_COLUMNS,
    config_from_kv,
    load_spec,
    parse_kv_file,
    run_bench,
    solve_instance,
)
from .planted import gen_planted_instance

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _kv_or_empty(path: Optional[str]) -> dict[str, str]:
    return parse_kv_file(path) if path else {}


def _build_config(args) -> SolverConfig:
    cfg = config_from_kv(_kv_or_empty(getattr(args, "config", None)))
    overrides = {}
    for key in ("alpha", "eps", "c_elt", "c_set"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    return cfg


# -- gen ---------------------------------------------------------------------


def _cmd_gen(args) -> int:
    kv = _kv_or_empty(args.config)
    seed = args.seed
    out = Path(args.out)
    kind = args.kind
    if kind == "random":
        p0 = args.p0 if args.p0 is not None else float(kv.get("p0", 0.5))
        sys_ = gen_random_instance(args.m, args.n, p0, stream(seed, "gen/random"))
        sys_.meta.update(generator="random", seed=str(seed), p0=f"{p0:.6g}")
    elif kind == "planted":
        sys_ = gen_planted_instance(args.m, args.n, args.k, stream(seed, "gen/planted"))
        sys_.meta["seed"] = str(seed)
    elif kind == "median":
        params = MedianParams(
            m=args.m,
            n=args.n,
            variant=args.variant,
            k=args.k if args.variant == "general" else None,
            alpha=args.alpha if args.variant == "general" else None,
            p0=args.p0,
        )
        draw = gen_median_instance(
            params, stream(seed, "gen/median"), max_attempts=args.max_attempts,
            mode=args.mode,
        )
        sys_ = draw.system
        sys_.meta.update(
            generator="median", seed=str(seed), variant=params.variant,
            p0=f"{params.p0:.6g}", attempts=str(draw.attempts),
        )
        sidecar = {
            "passed": draw.report.passed,
            "attempts": draw.attempts,
            "checks": [asdict(c) for c in draw.report.checks],
        }
        out.with_suffix(out.suffix + ".median.json").write_text(
            json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    elif kind == "modified":
        if not args.base:
            raise PreconditionError("--kind modified needs --base MEDIAN_FILE")
        median = read_instance(args.base)
        draw = gen_modified_instance(median, stream(seed, "gen/modified"))
        sys_ = draw.system
        sys_.meta.update(
            generator="modified", seed=str(seed),
            chosen_sets=",".join(str(s) for s in draw.chosen_sets),
            swaps=str(len(draw.swaps)), k="2",
        )
    elif kind == "compound":
        if not args.base:
            raise PreconditionError("--kind compound needs --base MEDIAN_FILE")
        median = read_instance(args.base)
        comp = gen_compound(median, args.t, args.c_weight, stream(seed, "gen/compound"))
        sys_ = comp.system
        sys_.meta.update(
            generator="compound", seed=str(seed), t=str(args.t),
            c_weight=f"{args.c_weight:.6g}",
            parts=",".join(p.kind for p in comp.parts),
        )
        for part in comp.parts:
            if part.chosen_sets:
                sys_.meta[f"part{part.index}_chosen"] = ",".join(
                    str(s) for s in part.chosen_sets
                )
    elif kind == "slab":
        inst = gen_slab_instance(args.n, args.k, label=args.label,
                                 rng=stream(seed, "gen/slab"))
        sys_ = inst.system
        sys_.meta["seed"] = str(seed)
        sys_.meta["swaps"] = ",".join(
            "-" if sw is None else f"{sw[0]}:{sw[1]}" for sw in inst.swaps_per_slab
        )
        if inst.unswapped_slab is not None:
            sys_.meta["unswapped_slab"] = str(inst.unswapped_slab)
    else:  # pragma: no cover - argparse restricts choices
        raise PreconditionError(f"unknown kind {kind!r}")
    write_instance(sys_, out)
    print(f"wrote {out} (m={sys_.m} n={sys_.n})", file=sys.stderr)
    return EXIT_OK


# -- solve -------------------------------------------------------------------


def _cmd_solve(args) -> int:
    system = read_instance(args.instance)
    cfg = _build_config(args)
    row, report = solve_instance(
        system,
        args.algorithm,
        cfg,
        args.seed,
        budget=args.budget,
        name=Path(args.instance).name,
    )
    lines = [",".join(RESULT_COLUMNS), ",".join(row.csv_values(args.timings))]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    if report.status == "budget-exhausted":
        return EXIT_BUDGET
    return EXIT_OK if row.feasible else EXIT_INFEASIBLE


# -- verify ------------------------------------------------------------------


def _read_cover_file(path) -> list[int]:
    ids: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0]
            ids.extend(int(tok) for tok in line.split())
    return ids


def _cmd_verify(args) -> int:
    system = read_instance(args.instance)
    ids = _read_cover_file(args.cover)
    cover = Cover(ids, provenance="file")
    oracle = Oracle(system, args.budget)
    check = verify_cover_naive(oracle, cover)
    verdict = "covered" if check.covered else f"uncovered witness={check.witness}"
    text = f"{verdict} elt_of_queries={check.elt_of_queries}\n"
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK if check.covered else EXIT_INFEASIBLE


# -- bench -------------------------------------------------------------------


def _cmd_bench(args) -> int:
    spec = load_spec(args.spec)
    t0 = time.perf_counter()
    rows = run_bench(spec, args.out, jobs=args.jobs, timings=args.timings)
    print(
        f"bench {spec.name}: {len(rows)} rows in {time.perf_counter() - t0:.1f}s "
        f"-> {args.out}",
        file=sys.stderr,
    )
    return EXIT_OK


# -- lb ----------------------------------------------------------------------


def _median_for_lb(args) -> SetSystem:
    if args.base:
        return read_instance(args.base)
    params = MedianParams(m=args.m, n=args.n)
    draw = gen_median_instance(params, stream(args.seed, "gen/median"))
    return draw.system


def _cmd_lb(args) -> int:
    out = Path(args.out) if args.out else None
    if args.experiment == "pcell":
        median = _median_for_lb(args)
        freq = estimate_p_elt_set(median, args.trials, stream(args.seed, "lb/pcell"))
        bound = 4800.0 * math.log(median.m) / (median.m * median.n)
        max_freq = float(freq.max())
        lines = ["e,s,count,frequency"]
        counts = np.rint(freq * args.trials).astype(np.int64)
        for e_idx, s_idx in zip(*np.nonzero(counts)):
            lines.append(
                f"{e_idx + 1},{s_idx + 1},{counts[e_idx, s_idx]},"
                f"{freq[e_idx, s_idx]:.6g}"
            )
        text = "\n".join(lines) + "\n"
        if out:
            out.write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        print(
            f"pcell: trials={args.trials} max_frequency={max_freq:.6g} "
            f"bound={bound:.6g} {'OK' if max_freq <= bound else 'VIOLATION'}",
            file=sys.stderr,
        )
        return EXIT_OK
    if args.experiment == "distinguish-median":
        median = _median_for_lb(args)
        gen = MedianVsModified(median)
    elif args.experiment == "distinguish-slab":
        gen = SlabYesNo(args.n, args.k)
    else:  # pragma: no cover
        raise PreconditionError(f"unknown experiment {args.experiment!r}")
    result = distinguisher_experiment(
        gen, args.strategy, args.q, args.trials, stream(args.seed, f"lb/{args.experiment}")
    )
    lines = [
        "experiment,strategy,q,trials,correct,accuracy,ci_low,ci_high",
        f"{args.experiment},{result.strategy},{result.q},{result.trials},"
        f"{result.correct},{result.accuracy:.6g},{result.ci_low:.6g},{result.ci_high:.6g}",
    ]
    text = "\n".join(lines) + "\n"
    if out:
        out.write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subcover", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate an instance file")
    p_gen.add_argument("--kind", required=True,
                       choices=["random", "planted", "median", "modified", "compound", "slab"])
    p_gen.add_argument("--m", type=int, default=300)
    p_gen.add_argument("--n", type=int, default=300)
    p_gen.add_argument("--k", type=int, default=3)
    p_gen.add_argument("--p0", type=float, default=None)
    p_gen.add_argument("--alpha", type=float, default=None)
    p_gen.add_argument("--variant", choices=["simplified", "general"], default="simplified")
    p_gen.add_argument("--mode", choices=["auto", "exact", "sampled"], default="auto")
    p_gen.add_argument("--max-attempts", type=int, default=50)
    p_gen.add_argument("--label", choices=["yes", "no"], default="yes")
    p_gen.add_argument("--t", type=int, default=4)
    p_gen.add_argument("--c-weight", type=float, default=8.0)
    p_gen.add_argument("--base", help="base median instance file (modified/compound)")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--config", help="key=value config file")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=_cmd_gen)

    p_solve = sub.add_parser("solve", help="run a solver over a fresh oracle")
    p_solve.add_argument("instance")
    p_solve.add_argument("--algorithm", required=True,
                         choices=["greedy", "small", "large", "auto", "brute"])
    p_solve.add_argument("--alpha", type=float, default=None)
    p_solve.add_argument("--eps", type=float, default=None)
    p_solve.add_argument("--c-elt", dest="c_elt", type=float, default=None)
    p_solve.add_argument("--c-set", dest="c_set", type=float, default=None)
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--budget", type=int, default=None)
    p_solve.add_argument("--config", help="key=value config file")
    p_solve.add_argument("--out", default=None)
    p_solve.add_argument("--timings", action="store_true")
    p_solve.set_defaults(func=_cmd_solve)

    p_verify = sub.add_parser("verify", help="naively verify a claimed cover")
    p_verify.add_argument("instance")
    p_verify.add_argument("--cover", required=True, help="file of whitespace-separated set ids")
    p_verify.add_argument("--budget", type=int, default=None)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=_cmd_verify)

    p_bench = sub.add_parser("bench", help="run a sweep spec, write CSVs")
    p_bench.add_argument("spec")
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--timings", action="store_true")
    p_bench.set_defaults(func=_cmd_bench)

    p_lb = sub.add_parser("lb", help="lower-bound experiments")
    p_lb.add_argument("--experiment", required=True,
                      choices=["pcell", "distinguish-median", "distinguish-slab"])
    p_lb.add_argument("--base", help="median instance file (else generated)")
    p_lb.add_argument("--m", type=int, default=300)
    p_lb.add_argument("--n", type=int, default=300)
    p_lb.add_argument("--k", type=int, default=12)
    p_lb.add_argument("--q", type=int, default=0)
    p_lb.add_argument("--trials", type=int, default=1000)
    p_lb.add_argument("--strategy", choices=["uniform", "adaptive", "exhaustive"],
                      default="uniform")
    p_lb.add_argument("--seed", type=int, default=0)
    p_lb.add_argument("--out", default=None)
    p_lb.set_defaults(func=_cmd_lb)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InfeasibleError, ExhaustedAttempts) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (PreconditionError, ParseError, TooLargeError, SetCoverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
