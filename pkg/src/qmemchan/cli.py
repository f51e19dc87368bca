"""Command-line front end.

Subcommands::

    qmemchan capacity (--g G | --lambda L)
    qmemchan attenuation-sweep [--config FILE] [overrides] --output PATH
    qmemchan rates --regime ...
    qmemchan markov-check [--instances N] [--seed S]
    qmemchan validate [--inject-fault eta-gt-1]

All times are in units of tau_E.  A sweep config is one JSON object with the
fields of :class:`SweepConfig`; command-line flags override config fields.
Exit codes: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .attenuation import AttenuationProtocol, optimize_gbar, gbar
from .channels import CarrierSequence, grouped_map, qubit_control_coupling, qubit_dephasing_model
from .checks import FAULTS, run_checks
from .markov import decoherent_model, markov_decompose, markov_reconstruct, qubit_decoherent_relaxation
from .qcore import random_density, trace_distance
from .rates import (
    RateReport,
    dephasing_classical_capacity,
    dephasing_quantum_capacity,
    gamma_point,
    group_coherent_information,
    rate_attenuation,
    rate_bounds,
    rate_regular,
    sequence_stats,
)

CSV_COLUMNS = ("lambda", "n", "tau_over_tauE", "p_opt", "gbar", "g0", "gamma", "rq_bar", "rq_s0")
SIG_DIGITS = 12
MARKOV_TOL = 1e-10


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.{SIG_DIGITS}g}"


def _round(x):
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.{SIG_DIGITS}g}")
    return x


# ---------------------------------------------------------------------------
# sweep configuration


@dataclass
class SweepConfig:
    lambda_values: list[float] = field(default_factory=lambda: [0.01])
    n_values: list[int] = field(default_factory=lambda: list(range(1, 11)))
    tau_over_tauE: tuple[float, float, int] = (0.02, 1.0, 50)
    optimize_p: bool = True
    p: float = 0.0
    output_path: str = "sweep.csv"
    format: str = "csv"

    def validate(self) -> "SweepConfig":
        if not self.lambda_values or not self.n_values:
            raise UsageError("lambda_values and n_values must be non-empty")
        if any(not 0.0 <= lam <= 1.0 for lam in self.lambda_values):
            raise UsageError("lambda values must lie in [0, 1]")
        if any(lam == 0.0 for lam in self.lambda_values):
            raise UsageError("lambda = 0 makes the memoryless quantum capacity vanish; Gamma is undefined")
        if any(int(n) != n or n < 0 for n in self.n_values):
            raise UsageError("n values must be non-negative integers")
        start, stop, steps = self.tau_over_tauE
        if int(steps) != steps or steps < 1 or start <= 0 or stop < start:
            raise UsageError("tau grid needs 0 < start <= stop and a positive step count")
        if not 0.0 <= self.p <= 1.0:
            raise UsageError("p must lie in [0, 1]")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        self.n_values = [int(n) for n in self.n_values]
        self.tau_over_tauE = (float(start), float(stop), int(steps))
        return self

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        if "config" in d:  # a sweep JSON output document
            d = d["config"]
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise UsageError(f"unknown config fields: {sorted(unknown)}")
        d = dict(d)
        if "tau_over_tauE" in d:
            d["tau_over_tauE"] = tuple(d["tau_over_tauE"])
        return cls(**d).validate()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tau_over_tauE"] = list(self.tau_over_tauE)
        return d

    def tau_grid(self) -> np.ndarray:
        start, stop, steps = self.tau_over_tauE
        return np.linspace(start, stop, steps)

    def grid(self) -> list[tuple[float, int, float]]:
        return [(lam, n, float(t)) for lam in self.lambda_values for n in self.n_values for t in self.tau_grid()]


@dataclass
class RunRecord:
    inputs: dict
    outputs: dict
    tool_version: str = __version__
    timestamp: str = ""


def sweep_point(lam: float, n: int, tau: float, optimize_p: bool = True, p: float = 0.0) -> dict:
    """One Gamma evaluation, tau_E = 1."""
    if optimize_p or n == 0:
        return gamma_point(lam, n, tau)
    g = gbar(AttenuationProtocol(n, tau, p, lam))
    g0 = math.sqrt(lam)
    rq_bar = dephasing_quantum_capacity(g) / (n * tau + 1.0)
    rq0 = dephasing_quantum_capacity(g0)
    return {"lambda": lam, "n": n, "tau_over_tauE": tau, "p_opt": p, "gbar": g, "g0": g0,
            "gamma": rq_bar / rq0, "rq_bar": rq_bar, "rq_s0": rq0}


def _sweep_task(args):
    return sweep_point(*args)


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list[dict]:
    tasks = [(lam, n, tau, cfg.optimize_p, cfg.p) for lam, n, tau in cfg.grid()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return [_sweep_task(t) for t in tasks]


def write_sweep(cfg: SweepConfig, rows: list[dict], timestamp: str = "") -> None:
    if cfg.format == "csv":
        with open(cfg.output_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for r in rows:
                w.writerow([fmt(r[c]) for c in CSV_COLUMNS])
        return
    records = [
        asdict(RunRecord(
            inputs={"lambda": r["lambda"], "n": r["n"], "tau_over_tauE": r["tau_over_tauE"]},
            outputs={k: r[k] for k in CSV_COLUMNS[3:]},
            timestamp=timestamp,
        ))
        for r in rows
    ]
    doc = {"tool_version": __version__, "timestamp": timestamp, "config": cfg.to_dict(), "records": _round(records)}
    with open(cfg.output_path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            a, b = part.split(":")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def cmd_capacity(args, out) -> int:
    if (args.g is None) == (args.lam is None):
        raise UsageError("give exactly one of --g and --lambda")
    if args.lam is not None:
        if not 0.0 <= args.lam <= 1.0:
            raise UsageError("lambda must lie in [0, 1]")
        g = math.sqrt(args.lam)
    else:
        g = args.g
    if abs(g) > 1:
        raise UsageError("|g| must not exceed 1")
    print(f"g={fmt(g)} Q={fmt(dephasing_quantum_capacity(g))} C={fmt(dephasing_classical_capacity(g))}", file=out)
    return 0


def cmd_attenuation_sweep(args, out) -> int:
    base = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        if "config" in base:
            base = base["config"]
    overrides = {
        "lambda_values": args.lambda_values,
        "n_values": args.n_values,
        "optimize_p": None if args.p is None else False,
        "p": args.p,
        "output_path": args.output,
        "format": args.format,
    }
    if args.tau is not None:
        overrides["tau_over_tauE"] = args.tau
    base.update({k: v for k, v in overrides.items() if v is not None})
    cfg = SweepConfig.from_dict(base)
    rows = run_sweep(cfg, args.jobs)
    try:
        write_sweep(cfg, rows, args.timestamp or "")
    except OSError as exc:
        raise UsageError(f"cannot write {cfg.output_path}: {exc}") from exc
    best = max(rows, key=lambda r: r["gamma"])
    print(f"wrote {len(rows)} rows to {cfg.output_path}; max gamma {fmt(best['gamma'])} "
          f"at lambda={fmt(best['lambda'])} n={best['n']} tau/tauE={fmt(best['tau_over_tauE'])}", file=out)
    return 0


def _report_json(rep: RateReport) -> str:
    return json.dumps(_round(asdict(rep)), sort_keys=True)


def cmd_rates(args, out) -> int:
    lam, tau_e = args.lam, 1.0
    regime = args.regime
    intervals = args.intervals
    if regime == "auto":
        if not intervals:
            raise UsageError("--regime auto needs --intervals")
        if all(t == 0 for t in intervals):
            regime = "perfect"
        elif all(t >= tau_e for t in intervals):
            regime = "memoryless"
        else:
            raise UsageError("intervals are neither all >= tau_E nor all zero; choose grouped or attenuation explicitly")
    d = 2
    if regime == "perfect":
        if args.tau_s is None:
            raise UsageError("perfect regime needs --tau-s (the nominal spacing, tau_s << tau_E)")
        r = rate_regular(math.log2(d), args.tau_s)
        rep = RateReport(r, r, "perfect", math.log2(d) / args.tau_s)
    elif regime == "memoryless":
        if lam is None:
            raise UsageError("memoryless regime needs --lambda")
        if intervals:
            if any(t < tau_e for t in intervals):
                raise UsageError("memoryless regime needs all intervals >= tau_E")
            stats = sequence_stats(CarrierSequence(tuple(intervals), periodic=True))
        else:
            if args.tau_s is None or args.tau_s < tau_e:
                raise UsageError("memoryless regime needs --intervals or --tau-s >= tau_E")
            stats = sequence_stats(CarrierSequence.uniform(args.tau_s))
        g0 = math.sqrt(lam)
        q, c = dephasing_quantum_capacity(g0), dephasing_classical_capacity(g0)
        lo, hi = rate_bounds(q, stats)
        rep = RateReport(rate_regular(q, stats), rate_regular(c, stats), "memoryless",
                         math.log2(d) / stats.tau_s, {"g0": g0, "rq_interval": [lo, hi]})
    elif regime == "grouped":
        if lam is None or args.delta_t is None:
            raise UsageError("grouped regime needs --lambda, --intervals (intra-group) and --delta-t")
        if args.delta_t < tau_e:
            raise UsageError("groups must be separated by at least tau_E")
        env = qubit_dephasing_model(lam, tau_e)
        intra = intervals or []
        j = group_coherent_information(env, intra)
        period = sum(intra) + args.delta_t
        m = len(intra) + 1
        rep = RateReport(j / period, max(j, float(m)) / period, "grouped", m * math.log2(d) / period,
                         {"m": m, "coherent_information": j, "note": "single-copy lower bounds"})
        # populations pass untouched for the controlled coupling, so m bits per group are always available
    elif regime == "attenuation":
        if lam is None or args.n is None or args.tau is None:
            raise UsageError("attenuation regime needs --lambda, --n and --tau")
        if args.p is None:
            p, _ = optimize_gbar(lam, args.n, args.tau, tau_e)
        else:
            p = args.p
        rep = rate_attenuation(AttenuationProtocol(args.n, args.tau, p, lam, tau_e))
        rep.details["p"] = p
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown regime {regime}")
    print(_report_json(rep), file=out)
    return 0


def cmd_markov_check(args, out) -> int:
    rng = np.random.default_rng(args.seed)
    spec = qubit_decoherent_relaxation()
    worst = 0.0
    for _ in range(args.instances):
        env = decoherent_model(qubit_control_coupling(rng.random()), spec, 2)
        n = int(rng.integers(1, args.max_n + 1))
        s = CarrierSequence(tuple(rng.uniform(0.05, 1.5, max(n - 1, 1))))
        from .channels import compose_sequence

        rho = random_density(2**n, rng)
        dist = trace_distance(markov_reconstruct(markov_decompose(env, s, n), rho), compose_sequence(env, s, n).apply(rho))
        worst = max(worst, dist)
    ok = worst < MARKOV_TOL
    print(f"{'PASS' if ok else 'FAIL'} markov-reconstruction instances={args.instances} max_trace_distance={worst:.3e}", file=out)
    return 0 if ok else 1


def cmd_validate(args, out) -> int:
    results = run_checks(args.inject_fault)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}", file=out)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=out)
        return 1
    print(f"all {len(results)} checks passed", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qmemchan", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="capacities of the phase damping channel")
    p.add_argument("--g", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("attenuation-sweep", help="Gamma ratio over a (lambda, n, tau) grid")
    p.add_argument("--config")
    p.add_argument("--lambda", dest="lambda_values", type=_floats)
    p.add_argument("--n", dest="n_values", type=_ints, help="comma list, ranges as a:b")
    p.add_argument("--tau", nargs=3, type=float, metavar=("START", "STOP", "STEPS"))
    p.add_argument("--p", type=float, help="fixed sacrificial population (disables p optimization)")
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timestamp", help="recorded verbatim in JSON output (omitted by default for reproducibility)")
    p.set_defaults(func=cmd_attenuation_sweep)

    p = sub.add_parser("rates", help="transmission rates of a sequence")
    p.add_argument("--regime", choices=("auto", "memoryless", "perfect", "grouped", "attenuation"), default="auto")
    p.add_argument("--intervals", type=_floats)
    p.add_argument("--tau-s", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--delta-t", type=float)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("markov-check", help="Markov path sum against direct composition")
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--max-n", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_markov_check)

    p = sub.add_parser("validate", help="run the structural invariant suite")
    p.add_argument("--inject-fault", choices=sorted(FAULTS))
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, ValueError) as exc:
        print(f"qmemchan {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
