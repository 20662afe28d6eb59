"""Command-line interface.

Three subcommands:

  simulate HAMFILE   run one pipeline, write report.csv + summary.txt
  sweep              rerun a pipeline while one knob moves, write sweep CSV
  truncate VECFILE   build a sparse ensemble for one vector, write its data

Exit codes: 0 success (and, for sweep, verdict passed), 1 sweep verdict
failed, 2 input/validation rejection, 3 numerical failure. Timestamps only
ever appear in `#` comment lines, so report bodies are reproducible for a
fixed input and seed (modulo the wall_ms timing column).
"""

from __future__ import annotations

import argparse
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InvalidFactor, KronsimError, NumericalError, ValidationError
from .hamspec import parse_hamiltonian_file, parse_vector_file
from .pipelines import PipelineConfig, run_pipeline
from .resources import (
    SWEEP_PARAMS,
    compare,
    oracle_evolution,
    sweep_precision,
    sweep_samples,
    sweep_sparsity,
    sweep_terms,
    sweep_time,
)
from .truncation import check_appendix_b, ensemble_prepare, randomized_truncate

REPORT_COLUMNS = (
    "approach", "K", "M", "d", "|R|", "t", "delta",
    "declared_err", "measured_err", "wall_ms",
    "prep_unitary_queries", "be_queries", "swap_ops", "lcu_terms",
    "amplification_rounds", "poly_degree", "two_qubit_gates", "ancilla_dims",
    "dominant_cost",
)


def _comment(seed) -> str:
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return f"# kronsim {__version__} at {stamp} seed={'none' if seed is None else seed}"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def cmd_simulate(args) -> int:
    h = parse_hamiltonian_file(args.hamfile)
    cfg = PipelineConfig(
        approach=args.approach,
        t=args.t,
        delta=args.delta,
        use_simplification=not args.no_simplify,
        mc_samples=args.samples,
        mc_seed=args.seed,
        truncation_sparsity=args.sparsity,
        tail_groups=args.groups,
        ledger_only=args.ledger_only,
    )
    start = time.perf_counter()
    result = run_pipeline(h, cfg)
    if args.oracle == "on" and not cfg.ledger_only:
        compare(result, oracle_evolution(h, args.t, time_dependent=args.approach == "td"))
    wall_ms = (time.perf_counter() - start) * 1e3

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    row = {
        "approach": args.approach,
        "K": h.k, "M": h.m, "d": h.d, "|R|": h.max_nontrivial(),
        "t": repr(float(args.t)), "delta": repr(float(args.delta)),
        "declared_err": _fmt(result.declared_err),
        "measured_err": _fmt(result.measured_err),
        "wall_ms": f"{wall_ms:.3f}",
    }
    row.update({k: str(v) for k, v in result.ledger.as_row().items()})
    report = out / "report.csv"
    with report.open("w", encoding="utf-8") as fh:
        fh.write(_comment(args.seed) + "\n")
        fh.write(",".join(REPORT_COLUMNS) + "\n")
        fh.write(",".join(str(row[c]) for c in REPORT_COLUMNS) + "\n")

    lines = [
        f"approach      {args.approach}",
        f"dims          K={h.k} M={h.m} d={h.d} |R|={h.max_nontrivial()}",
        f"t, delta      {args.t}, {args.delta}",
        f"seed          {'none' if args.seed is None else args.seed}",
        f"declared_err  {_fmt(result.declared_err) or 'n/a'}",
        f"measured_err  {_fmt(result.measured_err) or 'n/a'}",
        f"dominant_cost {result.ledger.dominant_cost()}",
    ]
    if result.truncation_delta is not None:
        lines.append(f"trunc_delta   {repr(result.truncation_delta)}")
    lines.append("stage timings (ms):")
    lines.extend(f"  {name:<12} {ms:.3f}" for name, ms in result.timings.items())
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("\n".join(lines))
    print(f"wrote {report}")
    return 0


def _parse_values(raw: str, as_int: bool) -> list:
    try:
        return [int(v) if as_int else float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise InvalidFactor(f"bad --values list {raw!r}") from None


def cmd_sweep(args) -> int:
    as_int = args.param in ("K", "samples", "sparsity")
    values = _parse_values(args.values, as_int)
    if not values:
        raise InvalidFactor("--values is empty")
    if args.param == "K":
        report = sweep_terms(values, delta=args.delta, t=args.t)
    elif args.param == "t":
        h = parse_hamiltonian_file(_require_input(args, "a HAMSPEC file"))
        report = sweep_time(h, values, delta=args.delta)
    elif args.param == "delta":
        h = parse_hamiltonian_file(_require_input(args, "a HAMSPEC file"))
        report = sweep_precision(h, values, t=args.t)
    elif args.param == "samples":
        report = sweep_samples(values, seeds=range(args.seeds), t=args.t)
    else:
        v = parse_vector_file(_require_input(args, "a vector file"))
        report = sweep_sparsity(v, values, tail_groups=args.groups)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"sweep_{args.param}.csv"
    with path.open("w", encoding="utf-8") as fh:
        fh.write(_comment(None) + "\n")
        fh.write("param,value,counter,measured,expected_law,fit\n")
        for r in report.rows():
            fh.write(
                f"{r['param']},{_fmt(r['value'])},{r['counter']},"
                f"{_fmt(r['measured'])},{r['expected_law']},{r['fit']}\n"
            )
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{verdict} {args.param}-sweep: {report.fit_summary} (law: {report.expected_law})")
    print(f"wrote {path}")
    return 0 if report.passed else 1


def _require_input(args, what: str) -> str:
    if not args.input:
        raise InvalidFactor(f"--param {args.param} needs {what} as the input argument")
    return args.input


def cmd_truncate(args) -> int:
    v = parse_vector_file(args.vecfile)
    nrm = float(np.linalg.norm(v))
    if nrm > 0:
        v = v / nrm
    e = randomized_truncate(v, args.sparsity, args.groups)
    lhs, rhs, holds = check_appendix_b(v, e)
    _, success = ensemble_prepare(e)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "ensemble.csv"
    with path.open("w", encoding="utf-8") as fh:
        fh.write(_comment(None) + "\n")
        fh.write("member,prob,support,amplitudes\n")
        for i, mem in enumerate(e.members):
            support = " ".join(str(j) for j in sorted(mem.support))
            amps = " ".join(
                f"{j}:{mem.vector[j].real!r}{mem.vector[j].imag:+}i"
                for j in sorted(mem.support)
            )
            fh.write(f"{i},{mem.prob!r},{support},{amps}\n")
    lines = [
        f"dim            {e.source_dim}",
        f"sparsity       {e.sparsity}",
        f"members        {len(e.members)}",
        f"trace_dist     {e.measured_trace_dist!r}",
        f"combo_residual {lhs!r}",
        f"sqrt_bound     {rhs!r}",
        f"bound_holds    {holds}",
        f"success_prob   {success!r}",
    ]
    (out / "truncate_summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("\n".join(lines))
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kronsim",
        description="Emulate and cost Hamiltonian simulation over tensor-factor sums.",
    )
    p.add_argument("--version", action="version", version=f"kronsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one pipeline on a HAMSPEC file")
    sim.add_argument("hamfile", help="HAMSPEC input file")
    sim.add_argument("--approach", choices=("a1", "a2", "a3", "td"), default="a1")
    sim.add_argument("--t", type=float, default=1.0, help="evolution time")
    sim.add_argument("--delta", type=float, default=1e-6, help="target accuracy")
    sim.add_argument("--samples", type=int, default=None, help="Monte-Carlo draws (a2)")
    sim.add_argument("--seed", type=int, default=None, help="sampling seed (a2)")
    sim.add_argument("--sparsity", type=int, default=None, help="truncation budget (a3)")
    sim.add_argument("--groups", type=int, default=8, help="truncation tail groups")
    sim.add_argument("--no-simplify", action="store_true", help="keep identity slots inline")
    sim.add_argument("--ledger-only", action="store_true", help="skip dense emulation")
    sim.add_argument("--oracle", choices=("on", "off"), default="on",
                     help="compare against the dense reference evolution")
    sim.add_argument("--out", default=".", help="output directory")
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="scaling sweep over one parameter")
    sw.add_argument("input", nargs="?", default=None,
                    help="HAMSPEC file (t, delta) or vector file (sparsity)")
    sw.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    sw.add_argument("--values", required=True, help="comma-separated sweep values")
    sw.add_argument("--t", type=float, default=1.0)
    sw.add_argument("--delta", type=float, default=1e-6)
    sw.add_argument("--seeds", type=int, default=20, help="seed count (samples sweep)")
    sw.add_argument("--groups", type=int, default=8)
    sw.add_argument("--out", default=".", help="output directory")
    sw.set_defaults(func=cmd_sweep)

    tr = sub.add_parser("truncate", help="sparse ensemble for one state vector")
    tr.add_argument("vecfile", help="vector input file")
    tr.add_argument("--sparsity", type=int, required=True, help="entries kept exactly")
    tr.add_argument("--groups", type=int, default=8)
    tr.add_argument("--out", default=".", help="output directory")
    tr.set_defaults(func=cmd_truncate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(_describe(exc), file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(_describe(exc), file=sys.stderr)
        return 3


def _describe(exc: KronsimError) -> str:
    stage = getattr(exc, "stage", None)
    where = f" in stage {stage}" if stage else ""
    return f"{type(exc).__name__}{where}: {exc}"


if __name__ == "__main__":
    sys.exit(main())
