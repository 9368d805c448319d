"""Sweep (UP x n x engine) grids, write CSV, and compare analytic vs simulated points."""

from __future__ import annotations

import argparse
import csv
import enum
import io
import logging
import math
import sys
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

from .errors import MissingCounterpartError, SacaError
from .metrics import performance
from .protocol_params import UserPriority
from .simulator import DEFAULT_SLOTS, MAX_NODES, SimConfig, run

log = logging.getLogger(__name__)

CSV_HEADER = ["up", "n", "engine", "seed", "slots", "tau", "p", "throughput", "delay_slots"]


class Engine(str, enum.Enum):
    ANALYTIC = "analytic"
    SIMULATION = "simulation"


_ENGINE_ORDER = {Engine.ANALYTIC: 0, Engine.SIMULATION: 1}


@dataclass(frozen=True)
class SweepRecord:
    up: UserPriority
    n: int
    engine: Engine
    seed: int | None
    slots: int | None
    tau: float
    p: float
    throughput: float
    delay_slots: float

    def __post_init__(self):
        object.__setattr__(self, "up", UserPriority(self.up))
        object.__setattr__(self, "engine", Engine(self.engine))
        is_sim = self.engine is Engine.SIMULATION
        if is_sim != (self.seed is not None) or is_sim != (self.slots is not None):
            raise ValueError("simulation records need seed and slots; analytic records must have neither")

    @property
    def sort_key(self):
        return (int(self.up), self.n, _ENGINE_ORDER[self.engine], -1 if self.seed is None else self.seed)

    @property
    def delay_samples(self) -> int | None:
        # one completed packet per success slot
        if self.slots is None:
            return None
        return round(self.throughput * self.slots)


def _analytic_record(up, n) -> SweepRecord:
    m = performance(up, n)
    return SweepRecord(up, n, Engine.ANALYTIC, None, None, m.tau, m.p, m.throughput, m.delay_slots)


def _simulation_record(up, n, slots, seed) -> SweepRecord:
    res = run(SimConfig(up, n, slots, seed))
    return SweepRecord(
        up, n, Engine.SIMULATION, seed, slots, res.tau_hat, res.p_hat, res.throughput_hat, res.mean_delay_slots
    )


def _evaluate(task):
    kind, args = task
    return _analytic_record(*args) if kind is Engine.ANALYTIC else _simulation_record(*args)


def sweep(
    ups: Iterable,
    n_range: Iterable[int],
    engines: Iterable = (Engine.ANALYTIC, Engine.SIMULATION),
    slots: int = DEFAULT_SLOTS,
    seeds: Sequence[int] = (1,),
    jobs: int = 1,
) -> list[SweepRecord]:
    """Evaluate every grid point; output order is (up, n, engine, seed) regardless of ``jobs``."""
    ups = sorted({UserPriority(u) for u in ups})
    ns = sorted(set(n_range))
    engines = {Engine(e) for e in engines}
    if any(not 1 <= n <= MAX_NODES for n in ns):
        raise ValueError(f"node counts must lie in [1, {MAX_NODES}], got {ns}")
    if slots < 1:
        raise ValueError(f"slots must be >= 1, got {slots}")
    if len(set(seeds)) != len(seeds):
        raise ValueError(f"duplicate seeds: {list(seeds)}")

    tasks = []
    for up in ups:
        for n in ns:
            if Engine.ANALYTIC in engines:
                tasks.append((Engine.ANALYTIC, (up, n)))
            if Engine.SIMULATION in engines:
                tasks.extend((Engine.SIMULATION, (up, n, slots, seed)) for seed in seeds)

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_evaluate, tasks))
    else:
        records = [_evaluate(t) for t in tasks]
    return sorted(records, key=lambda r: r.sort_key)


def _fmt_float(x: float) -> str:
    return format(x, ".17g")


def write_csv(records: Iterable[SweepRecord], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(
            [
                int(r.up),
                r.n,
                r.engine.value,
                "" if r.seed is None else r.seed,
                "" if r.slots is None else r.slots,
                _fmt_float(r.tau),
                _fmt_float(r.p),
                _fmt_float(r.throughput),
                _fmt_float(r.delay_slots),
            ]
        )


def read_csv(fh: TextIO) -> list[SweepRecord]:
    reader = csv.DictReader(fh)
    if reader.fieldnames != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for row in reader:
        out.append(
            SweepRecord(
                up=int(row["up"]),
                n=int(row["n"]),
                engine=row["engine"],
                seed=int(row["seed"]) if row["seed"] else None,
                slots=int(row["slots"]) if row["slots"] else None,
                tau=float(row["tau"]),
                p=float(row["p"]),
                throughput=float(row["throughput"]),
                delay_slots=float(row["delay_slots"]),
            )
        )
    return out


def records_to_csv(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


@dataclass(frozen=True)
class PointComparison:
    up: UserPriority
    n: int
    seeds: int
    tau_dev: float
    p_dev: float
    throughput_dev: float
    delay_rel_dev: float
    min_delay_samples: int
    delay_exempt: bool
    abs_ok: bool
    delay_ok: bool

    @property
    def passed(self) -> bool:
        return self.abs_ok and self.delay_ok


@dataclass
class ComparisonReport:
    abs_tol: float
    delay_rel_tol: float
    min_delay_samples: int
    points: list[PointComparison] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(pt.passed for pt in self.points)

    @property
    def failures(self) -> list[PointComparison]:
        return [pt for pt in self.points if not pt.passed]

    @property
    def exemptions(self) -> list[PointComparison]:
        return [pt for pt in self.points if pt.delay_exempt]

    def max_deviation(self) -> dict[str, float]:
        checked = [pt for pt in self.points if not pt.delay_exempt]
        return {
            "tau": max((pt.tau_dev for pt in self.points), default=0.0),
            "p": max((pt.p_dev for pt in self.points), default=0.0),
            "throughput": max((pt.throughput_dev for pt in self.points), default=0.0),
            "delay_rel": max((pt.delay_rel_dev for pt in checked), default=0.0),
        }

    def format(self) -> str:
        lines = [
            f"{'up':>2} {'n':>3} {'|dtau|':>9} {'|dp|':>9} {'|dS|':>9} {'dD/D':>9} {'samples':>8}  status",
        ]
        for pt in self.points:
            status = "ok" if pt.passed else "FAIL"
            if pt.delay_exempt:
                status += " (delay exempt)"
            lines.append(
                f"{int(pt.up):>2} {pt.n:>3} {pt.tau_dev:9.5f} {pt.p_dev:9.5f} {pt.throughput_dev:9.5f} "
                f"{pt.delay_rel_dev:9.5f} {pt.min_delay_samples:>8}  {status}"
            )
        md = self.max_deviation()
        lines.append(
            f"max |dtau|={md['tau']:.5f} |dp|={md['p']:.5f} |dS|={md['throughput']:.5f} "
            f"dD/D={md['delay_rel']:.5f} (abs_tol={self.abs_tol}, delay_rel_tol={self.delay_rel_tol})"
        )
        lines.append(
            f"{len(self.points) - len(self.failures)}/{len(self.points)} points pass; "
            f"{len(self.exemptions)} delay exemptions; overall {'PASS' if self.passed else 'FAIL'}"
        )
        return "\n".join(lines)


def compare(
    records: Iterable[SweepRecord],
    abs_tol: float = 0.02,
    delay_rel_tol: float = 0.10,
    min_delay_samples: int = 100,
) -> ComparisonReport:
    """Compare each analytic point with the seed-averaged simulation at the same (up, n).

    The delay check is skipped (and logged) when any contributing simulation
    run completed fewer than ``min_delay_samples`` packets.
    """
    analytic: dict[tuple, SweepRecord] = {}
    simulated: dict[tuple, list[SweepRecord]] = defaultdict(list)
    for r in records:
        key = (r.up, r.n)
        if r.engine is Engine.ANALYTIC:
            analytic[key] = r
        else:
            simulated[key].append(r)

    missing = sorted(set(analytic) ^ set(simulated))
    if missing:
        raise MissingCounterpartError(
            "grid points lacking an analytic or simulation record: "
            + ", ".join(f"(up={int(u)}, n={n})" for u, n in missing)
        )

    report = ComparisonReport(abs_tol, delay_rel_tol, min_delay_samples)
    for key in sorted(analytic):
        a = analytic[key]
        sims = simulated[key]
        k = len(sims)
        tau = math.fsum(s.tau for s in sims) / k
        p = math.fsum(s.p for s in sims) / k
        thr = math.fsum(s.throughput for s in sims) / k
        delay = math.fsum(s.delay_slots for s in sims) / k
        samples = min(s.delay_samples for s in sims)

        d_tau, d_p, d_s = abs(a.tau - tau), abs(a.p - p), abs(a.throughput - thr)
        d_delay = abs(delay - a.delay_slots) / a.delay_slots
        exempt = samples < min_delay_samples or math.isnan(delay)
        if exempt:
            log.info("delay check exempt at up=%d n=%d: only %d completed packets", key[0], key[1], samples)
        report.points.append(
            PointComparison(
                up=a.up,
                n=a.n,
                seeds=k,
                tau_dev=d_tau,
                p_dev=d_p,
                throughput_dev=d_s,
                delay_rel_dev=d_delay,
                min_delay_samples=samples,
                delay_exempt=exempt,
                abs_ok=max(d_tau, d_p, d_s) <= abs_tol,
                delay_ok=exempt or d_delay <= delay_rel_tol,
            )
        )
    return report


def _parse_nodes(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if sep else lo_i
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected <min>..<max> or <n>, got {text!r}") from None
    if not 1 <= lo_i <= hi_i <= MAX_NODES:
        raise argparse.ArgumentTypeError(f"node range must satisfy 1 <= min <= max <= {MAX_NODES}")
    return range(lo_i, hi_i + 1)


def _parse_ups(text: str) -> list[UserPriority]:
    if text == "all":
        return list(UserPriority)
    return [UserPriority(int(text))]


def _parse_seeds(text: str) -> list[int]:
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be a comma-separated list of integers, got {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("at least one seed is required")
    return seeds


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="smartban-saca",
        description="Sweep SmartBAN slotted-Aloha saturation throughput and delay, analytically and by simulation.",
    )
    ap.add_argument("--up", choices=["0", "1", "2", "3", "all"], default="all", help="user priority (default: all)")
    ap.add_argument("--nodes", type=_parse_nodes, default=range(1, MAX_NODES + 1), help="node range, e.g. 1..16")
    ap.add_argument("--mode", choices=["analytic", "sim", "both"], default="both")
    ap.add_argument("--slots", type=int, default=DEFAULT_SLOTS, help="simulated slots per run (default: %(default)s)")
    ap.add_argument("--seeds", type=_parse_seeds, default=[1], help="comma-separated simulation seeds (default: 1)")
    ap.add_argument("--out", default="-", help="CSV output path (default: stdout)")
    ap.add_argument("--compare", action="store_true", help="compare engines and exit nonzero on mismatch")
    ap.add_argument("--abs-tol", type=float, default=0.02, help="absolute tolerance on tau, p, S")
    ap.add_argument("--delay-rel-tol", type=float, default=0.10, help="relative tolerance on mean delay")
    ap.add_argument("--min-delay-samples", type=int, default=100)
    ap.add_argument("--jobs", type=int, default=1, help="worker processes")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


_MODES = {
    "analytic": (Engine.ANALYTIC,),
    "sim": (Engine.SIMULATION,),
    "both": (Engine.ANALYTIC, Engine.SIMULATION),
}


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s", stream=sys.stderr)
    if args.compare and args.mode != "both":
        ap.error("--compare needs --mode both")

    try:
        records = sweep(_parse_ups(args.up), args.nodes, _MODES[args.mode], args.slots, args.seeds, args.jobs)
        if args.out == "-":
            write_csv(records, sys.stdout)
        else:
            with open(args.out, "w", newline="") as fh:
                write_csv(records, fh)
        if not args.compare:
            return 0
        report = compare(records, args.abs_tol, args.delay_rel_tol, args.min_delay_samples)
    except (SacaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    print(report.format(), file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
