"""Single runs, sweeps, and CSV emission.

A ResultRow captures one (instance, algorithm, seed) execution with its
exact query counts; ``run_bench`` executes a sweep spec and writes one
row per (cell, seed) plus a per-cell median/IQR summary.  Outputs are
byte-deterministic for a fixed spec and seeds: rows are written in
(cell, seed) order regardless of execution order, floats at six
significant digits, and wall times are left blank unless timings are
requested.
"""

from __future__ import annotations

import csv
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from ..core import (
    BudgetExhausted,
    Cover,
    InfeasibleError,
    Oracle,
    PreconditionError,
    SetSystem,
    TooLargeError,
    read_instance,
    verify_cover_naive,
)
from ..rng import stream
from ..solvers import (
    RunReport,
    SolverConfig,
    brute_force_min_cover,
    greedy_cover,
    large_set_cover,
    small_set_cover,
    sublinear_set_cover,
)
from .planted import gen_planted_instance

ALGORITHMS = ("greedy", "small", "large", "auto", "brute")

RESULT_COLUMNS = [
    "name",
    "algorithm",
    "m",
    "n",
    "k",
    "alpha",
    "eps",
    "seed",
    "budget",
    "elt_of_queries",
    "set_of_queries",
    "total_queries",
    "cover_size",
    "opt_size",
    "feasible",
    "status",
    "route",
    "wall_time",
]

SUMMARY_COLUMNS = [
    "name",
    "algorithm",
    "m",
    "n",
    "k",
    "alpha",
    "eps",
    "seeds",
    "total_queries_median",
    "total_queries_iqr",
    "cover_size_median",
    "feasible_all",
]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


@dataclass
class ResultRow:
    name: str
    algorithm: str
    m: int
    n: int
    k: Optional[int]
    alpha: Optional[float]
    eps: Optional[float]
    seed: int
    budget: Optional[int]
    elt_of_queries: int
    set_of_queries: int
    cover_size: Optional[int]
    opt_size: Optional[int]
    feasible: bool
    status: str
    route: Optional[str]
    wall_time: Optional[float]

    @property
    def total_queries(self) -> int:
        return self.elt_of_queries + self.set_of_queries

    def csv_values(self, timings: bool = False) -> list[str]:
        vals = {
            "name": self.name,
            "algorithm": self.algorithm,
            "m": self.m,
            "n": self.n,
            "k": self.k,
            "alpha": self.alpha,
            "eps": self.eps,
            "seed": self.seed,
            "budget": self.budget,
            "elt_of_queries": self.elt_of_queries,
            "set_of_queries": self.set_of_queries,
            "total_queries": self.total_queries,
            "cover_size": self.cover_size,
            "opt_size": self.opt_size,
            "feasible": self.feasible,
            "status": self.status,
            "route": self.route,
            "wall_time": self.wall_time if timings else None,
        }
        return [_fmt(vals[c]) for c in RESULT_COLUMNS]


def _greedy_report(oracle: Oracle) -> RunReport:
    """Greedy over the fully materialized instance, query-counted."""
    sys = oracle.system
    try:
        sets = {s: oracle.enumerate_set(s) for s in range(1, sys.m + 1)}
        cover = greedy_cover(range(1, sys.n + 1), sets)
        cover.provenance = "greedy"
        status = "ok"
    except InfeasibleError:
        cover, status = None, "infeasible"
    except BudgetExhausted:
        cover, status = None, "budget-exhausted"
    return RunReport(
        cover=cover,
        elt_of_queries=oracle.elt_of_queries,
        set_of_queries=oracle.set_of_queries,
        status=status,
    )


def solve_instance(
    system: SetSystem,
    algorithm: str,
    config: SolverConfig,
    seed: int,
    budget: Optional[int] = None,
    name: str = "",
    opt_size: Optional[int] = None,
) -> tuple[ResultRow, RunReport]:
    """Run one algorithm over a fresh oracle and assemble its row.

    Feasibility is re-checked out of band on a metering-free oracle
    regardless of what the solver reported.
    """
    if algorithm not in ALGORITHMS:
        raise PreconditionError(f"unknown algorithm {algorithm!r}")
    config = replace(config, seed=seed)
    oracle = Oracle(system, budget)
    rng = stream(seed, f"solve/{algorithm}")
    t0 = time.perf_counter()
    if algorithm == "greedy":
        report = _greedy_report(oracle)
    elif algorithm == "small":
        report = small_set_cover(oracle, config.alpha, config.eps, config, rng)
    elif algorithm == "large":
        report = large_set_cover(oracle, config.eps, config, rng)
    elif algorithm == "auto":
        report = sublinear_set_cover(oracle, config.alpha, config.eps, config, rng)
    else:  # brute
        try:
            res = brute_force_min_cover(system, config.brute_force_cap)
            report = RunReport(res.cover, 0, 0, "ok")
            opt_size = res.k
        except InfeasibleError:
            report = RunReport(None, 0, 0, "infeasible")
    wall = time.perf_counter() - t0

    feasible = False
    if report.cover is not None:
        feasible = verify_cover_naive(Oracle(system), report.cover).covered
    if opt_size is None and "k" in system.meta:
        try:
            opt_size = int(system.meta["k"])
        except ValueError:
            opt_size = None
    row = ResultRow(
        name=name,
        algorithm=algorithm,
        m=system.m,
        n=system.n,
        k=_meta_int(system, "k"),
        alpha=config.alpha if algorithm in ("small", "auto") else None,
        eps=config.eps if algorithm in ("small", "large", "auto") else None,
        seed=seed,
        budget=budget,
        elt_of_queries=report.elt_of_queries,
        set_of_queries=report.set_of_queries,
        cover_size=report.cover_size(),
        opt_size=opt_size,
        feasible=feasible,
        status=report.status,
        route=report.route,
        wall_time=wall,
    )
    return row, report


def _meta_int(system: SetSystem, key: str) -> Optional[int]:
    try:
        return int(system.meta[key])
    except (KeyError, ValueError):
        return None


# -- sweep specs -------------------------------------------------------------


@dataclass
class ExperimentSpec:
    """A sweep: generator parameters, algorithm, sweep grids, seeds."""

    name: str
    algorithm: str
    generator: str = "planted"  # planted | random | file
    instance: Optional[str] = None  # for generator=file
    m: int = 256
    n: int = 256
    k: int = 4
    p_incidence: float = 0.5  # generator=random density
    config: SolverConfig = field(default_factory=SolverConfig)
    sweep: dict[str, list] = field(default_factory=dict)
    seeds: list[int] = field(default_factory=lambda: [1])
    budget: Optional[int] = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise PreconditionError(f"unknown algorithm {self.algorithm!r}")
        if not self.seeds:
            raise PreconditionError("seeds must be non-empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise PreconditionError("seeds must be distinct")
        for var, values in self.sweep.items():
            if var not in ("k", "m", "n", "alpha", "eps", "q"):
                raise PreconditionError(f"cannot sweep over {var!r}")
            if not values:
                raise PreconditionError(f"empty sweep grid for {var!r}")

    def cells(self) -> list[dict]:
        """Cross product of the sweep grids, in declared order."""
        out = [{}]
        for var, values in self.sweep.items():
            out = [dict(cell, **{var: v}) for cell in out for v in values]
        return out


_INT_KEYS = {"m", "n", "k", "seed", "budget", "q"}
_FLOAT_KEYS = {"alpha", "eps", "c_elt", "c_set", "p_incidence", "p0", "c_weight"}


def parse_kv_file(path) -> dict[str, str]:
    """Flat key=value config format; '#' starts a comment line."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise PreconditionError(f"{path}:{lineno}: expected key=value")
            out[key.strip()] = value.strip()
    return out


def _parse_values(var: str, text: str) -> list:
    conv = int if var in _INT_KEYS else float
    return [conv(tok) for tok in text.split(",") if tok.strip()]


def _parse_seeds(text: str) -> list[int]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in text.split(",") if tok.strip()]


def config_from_kv(kv: dict[str, str], base: Optional[SolverConfig] = None) -> SolverConfig:
    base = base or SolverConfig()
    kwargs = {}
    for key in ("alpha", "eps", "c_elt", "c_set", "feasibility_multiplier"):
        if key in kv:
            kwargs[key] = float(kv[key])
    for key in ("seed", "brute_force_cap"):
        if key in kv:
            kwargs[key] = int(kv[key])
    if "rho_mode" in kv:
        kwargs["rho_mode"] = kv["rho_mode"]
    return replace(base, **kwargs)


def load_spec(path) -> ExperimentSpec:
    kv = parse_kv_file(path)
    sweep = {}
    for key, value in kv.items():
        if key.startswith("sweep."):
            sweep[key[6:]] = _parse_values(key[6:], value)
    return ExperimentSpec(
        name=kv.get("name", Path(path).stem),
        algorithm=kv.get("algorithm", "small"),
        generator=kv.get("generator", "planted"),
        instance=kv.get("instance"),
        m=int(kv.get("m", 256)),
        n=int(kv.get("n", 256)),
        k=int(kv.get("k", 4)),
        p_incidence=float(kv.get("p_incidence", 0.5)),
        config=config_from_kv(kv),
        sweep=sweep,
        seeds=_parse_seeds(kv["seeds"]) if "seeds" in kv else [1],
        budget=int(kv["budget"]) if "budget" in kv else None,
    )


def build_cell_instance(spec: ExperimentSpec, cell: dict, seed: int) -> SetSystem:
    """Materialize the instance for one (cell, seed)."""
    m = int(cell.get("m", spec.m))
    n = int(cell.get("n", spec.n))
    k = int(cell.get("k", spec.k))
    if spec.generator == "planted":
        return gen_planted_instance(m, n, k, stream(seed, "gen/planted"))
    if spec.generator == "random":
        from ..lowerbound.median import gen_random_instance

        sys = gen_random_instance(m, n, 1.0 - spec.p_incidence, stream(seed, "gen/random"))
        return sys
    if spec.generator == "file":
        if not spec.instance:
            raise PreconditionError("generator=file needs instance=<path>")
        return read_instance(spec.instance)
    raise PreconditionError(f"unknown generator {spec.generator!r}")


def run_cell(spec: ExperimentSpec, cell: dict) -> list[ResultRow]:
    """All seeds of one sweep cell, in seed order."""
    rows = []
    cfg = spec.config
    if "alpha" in cell:
        cfg = replace(cfg, alpha=float(cell["alpha"]))
    if "eps" in cell:
        cfg = replace(cfg, eps=float(cell["eps"]))
    budget = int(cell["q"]) if "q" in cell else spec.budget
    for seed in spec.seeds:
        system = build_cell_instance(spec, cell, seed)
        row, _ = solve_instance(
            system, spec.algorithm, cfg, seed, budget=budget, name=spec.name
        )
        if "k" in cell:
            row.k = int(cell["k"])
        rows.append(row)
    return rows


def _run_cell_job(args) -> tuple[int, list[ResultRow]]:
    index, spec, cell = args
    return index, run_cell(spec, cell)


def run_bench(
    spec: ExperimentSpec,
    out_path,
    jobs: int = 1,
    timings: bool = False,
) -> list[ResultRow]:
    """Execute a sweep and write rows + summary CSVs.

    Rows land in (cell, seed) order whatever the worker completion
    order; the summary aggregates per cell (median and IQR of total
    queries).  Partial failures are recorded as rows with status
    "error" and the sweep continues.
    """
    cells = spec.cells()
    results: dict[int, list[ResultRow]] = {}
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for index, rows in pool.map(
                _run_cell_job, [(i, spec, cell) for i, cell in enumerate(cells)]
            ):
                results[index] = rows
    else:
        for i, cell in enumerate(cells):
            try:
                results[i] = run_cell(spec, cell)
            except Exception as exc:  # pragma: no cover - defensive
                err = ResultRow(
                    name=spec.name, algorithm=spec.algorithm, m=spec.m, n=spec.n,
                    k=cell.get("k"), alpha=None, eps=None, seed=-1, budget=None,
                    elt_of_queries=0, set_of_queries=0, cover_size=None,
                    opt_size=None, feasible=False, status=f"error:{exc}",
                    route=None, wall_time=None,
                )
                results[i] = [err]

    ordered = [row for i in range(len(cells)) for row in results[i]]
    out_path = Path(out_path)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for row in ordered:
            writer.writerow(row.csv_values(timings))

    summary_path = out_path.with_suffix(out_path.suffix + ".summary.csv")
    with open(summary_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for i, cell in enumerate(cells):
            rows = results[i]
            totals = sorted(r.total_queries for r in rows)
            sizes = sorted(r.cover_size for r in rows if r.cover_size is not None)
            iqr = 0.0
            if len(totals) > 1:
                qs = statistics.quantiles(totals, n=4, method="inclusive")
                iqr = qs[2] - qs[0]
            writer.writerow(
                [
                    _fmt(spec.name),
                    _fmt(spec.algorithm),
                    _fmt(cell.get("m", spec.m)),
                    _fmt(cell.get("n", spec.n)),
                    _fmt(cell.get("k", spec.k)),
                    _fmt(cell.get("alpha", spec.config.alpha)),
                    _fmt(cell.get("eps", spec.config.eps)),
                    _fmt(len(rows)),
                    _fmt(float(statistics.median(totals))) if totals else "",
                    _fmt(float(iqr)),
                    _fmt(float(statistics.median(sizes))) if sizes else "",
                    _fmt(all(r.feasible for r in rows)),
                ]
            )
    return ordered
