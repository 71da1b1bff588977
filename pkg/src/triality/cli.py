"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .identities import ALL_CHECKS, DEFAULT_TOLERANCE, check_identities, run_batch, transition_sweep
from .interferometer import DEFAULT_GRID, coherence_from_pairwise_scans, fringe_scan_two_path, pairwise_scans
from .measures import ConsistencyError, MeasureReport, coherence, full_report
from .scenarios import (
    ResultTable,
    Scenario,
    ScenarioError,
    canonical_scenarios,
    dump_scenario,
    emit_table,
    matrix_table,
    parse_scenario_document,
)
from .state import ValidationError, reduced_density

SEED_ENV = "TRIALITY_SEED"
DEFAULT_SEED = 0
DEFAULT_COUNT = 1000
MAX_LISTED_FAILURES = 20


class InputError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        seed = int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer") from None
    if seed < 0:
        raise InputError(f"{SEED_ENV} must be non-negative")
    return seed


def load_scenario(ref: str) -> Scenario:
    """Resolve ``ref`` as a file path, falling back to a canonical scenario name."""
    path = Path(ref)
    if path.is_file():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {ref}: {exc}") from None
        try:
            return parse_scenario_document(text)
        except ScenarioError as exc:
            raise InputError(f"{ref}: {exc}") from None
    canon = canonical_scenarios()
    if ref in canon:
        return canon[ref]
    raise InputError(f"no such scenario file or canonical name: {ref!r} (canonical: {', '.join(canon)})")


def write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, table: ResultTable) -> None:
    table.provenance.setdefault("tool", f"triality {__version__}")
    write_output(emit_table(table, provenance=args.provenance), args.out)


def cmd_report(args) -> int:
    scen = load_scenario(args.scenario)
    if args.rho:
        table = matrix_table(reduced_density(scen.state).rho)
        table.provenance["scenario"] = scen.name
        _emit(args, table)
        return 0
    report = full_report(scen.state)
    residuals = check_identities(scen.state).as_dict()
    table = ResultTable(["scenario", "n", *MeasureReport.FIELDS, *residuals])
    table.append([scen.name, report.n, *(getattr(report, k) for k in MeasureReport.FIELDS), *residuals.values()])
    table.provenance["scenario"] = scen.name
    _emit(args, table)
    return 0


def _parse_random(values, tolerance):
    if len(values) not in (4, 5):
        raise InputError("--random takes N M COUNT SEED [TOLERANCE]")
    try:
        n, m, count, seed = (int(v) for v in values[:4])
        tol = float(values[4]) if len(values) == 5 else tolerance
    except ValueError:
        raise InputError(f"--random: bad value in {values}") from None
    if n < 2 or m < 1 or count < 1 or seed < 0:
        raise InputError("--random needs N >= 2, M >= 1, COUNT >= 1, SEED >= 0")
    return n, m, count, seed, tol


def _check_tolerance(tol: float) -> None:
    if not np.isfinite(tol) or tol < 0:
        raise InputError(f"tolerance must be a non-negative number, got {tol!r}")


def cmd_verify(args) -> int:
    if (args.scenario is None) == (args.random is None):
        raise InputError("verify needs either a scenario or --random")
    if args.random is not None:
        n, m, count, seed, tol = _parse_random(args.random, args.tolerance)
        _check_tolerance(tol)
        verdict = run_batch([n], [m], count, seed, tol, workers=args.workers)
        maxima = verdict.max_residual
        failures = [(f"{f.seed}#{f.index}", f.identity, f.residual) for f in verdict.failures]
        provenance = {"seed": seed, "count": count, "n": n, "m": m}
    else:
        tol = args.tolerance
        _check_tolerance(tol)
        scen = load_scenario(args.scenario)
        maxima = check_identities(scen.state).as_dict()
        failures = [(scen.name, k, v) for k, v in maxima.items() if not v <= tol]
        provenance = {"scenario": scen.name}
    table = ResultTable(["identity", "max_residual", "tolerance", "pass"], provenance=provenance | {"tolerance": tol})
    for name in ALL_CHECKS:
        table.append([name, maxima[name], tol, maxima[name] <= tol])
    _emit(args, table)
    for seed, identity, residual in failures[:MAX_LISTED_FAILURES]:
        print(f"FAIL seed={seed} identity={identity} residual={residual!r}", file=sys.stderr)
    if len(failures) > MAX_LISTED_FAILURES:
        print(f"... {len(failures) - MAX_LISTED_FAILURES} more failures", file=sys.stderr)
    return 1 if failures else 0


SWEEP_COLUMNS = ("PQ", "C", "DQ", "EQ", "P", "D", "E", "PF", "Ec")


def cmd_sweep(args) -> int:
    if args.steps < 2:
        raise InputError(f"--steps must be >= 2, got {args.steps}")
    scen = load_scenario(args.scenario)
    table = ResultTable(["t", *SWEEP_COLUMNS], provenance={"scenario": scen.name, "steps": args.steps})
    for t, rep in transition_sweep(scen.state.amplitudes, args.steps):
        table.append([t, *(getattr(rep, k) for k in SWEEP_COLUMNS)])
    _emit(args, table)
    return 0


FRINGE_COLUMNS = ("record", "j", "k", "phase", "intensity", "i_max", "i_min", "visibility",
                  "analytic_visibility", "coherence")


def cmd_fringe(args) -> int:
    if args.grid < 8:
        raise InputError(f"--grid must be >= 8, got {args.grid}")
    scen = load_scenario(args.scenario)
    rho = reduced_density(scen.state)
    table = ResultTable(FRINGE_COLUMNS, provenance={"scenario": scen.name, "grid": args.grid,
                                                    "protocol": "pairwise sub-block scans"})
    if scen.state.n == 2:
        scans = {(0, 1): fringe_scan_two_path(rho, args.grid)}
    else:
        scans = pairwise_scans(rho, args.grid)
    for (j, k), scan in scans.items():
        for phi, inten in zip(scan.phase, scan.intensity):
            table.append(["sample", j + 1, k + 1, float(phi), float(inten), None, None, None, None, None])
        table.append(["summary", j + 1, k + 1, None, None, scan.i_max, scan.i_min, scan.visibility,
                      scan.analytic_visibility, None])
    if scen.state.n > 2:
        table.append(["pairwise_coherence", None, None, None, None, None, None, None, None,
                      coherence_from_pairwise_scans(rho, analytic=True)])
    table.append(["coherence", None, None, None, None, None, None, None, None, coherence(rho)])
    _emit(args, table)
    return 0


def cmd_random_suite(args) -> int:
    _check_tolerance(args.tolerance)
    n_lo, n_hi = args.n_range
    m_lo, m_hi = args.m_range
    if n_lo < 2 or n_hi < n_lo or m_lo < 1 or m_hi < m_lo:
        raise InputError("need 2 <= N_LO <= N_HI and 1 <= M_LO <= M_HI")
    if args.count < 1:
        raise InputError("--count must be >= 1")
    seed = default_seed() if args.seed is None else args.seed
    if seed < 0:
        raise InputError("--seed must be non-negative")
    verdict = run_batch(range(n_lo, n_hi + 1), range(m_lo, m_hi + 1), args.count, seed, args.tolerance,
                        workers=args.workers)
    table = ResultTable(["n", "m", *ALL_CHECKS, "pass"],
                        provenance={"seed": seed, "count": args.count, "tolerance": args.tolerance})
    for n, m, maxima in verdict.blocks:
        table.append([n, m, *(maxima[k] for k in ALL_CHECKS), all(maxima[k] <= args.tolerance for k in ALL_CHECKS)])
    _emit(args, table)
    for f in verdict.failures[:MAX_LISTED_FAILURES]:
        print(f"FAIL seed={f.seed} index={f.index} identity={f.identity} residual={f.residual!r}", file=sys.stderr)
    if len(verdict.failures) > MAX_LISTED_FAILURES:
        print(f"... {len(verdict.failures) - MAX_LISTED_FAILURES} more failures", file=sys.stderr)
    return 0 if verdict.passed else 1


def cmd_scenarios(args) -> int:
    canon = canonical_scenarios()
    if args.dump:
        if args.dump not in canon:
            raise InputError(f"unknown canonical scenario {args.dump!r}")
        scen = canon[args.dump]
        write_output(dump_scenario(scen.state, scen.name, scen.metadata), args.out)
        return 0
    table = ResultTable(["name", "n", "description"])
    for scen in canon.values():
        table.append([scen.name, scen.state.n, scen.description])
    _emit(args, table)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write to PATH (atomically) instead of stdout")
    common.add_argument("--provenance", action="store_true", help="prepend '# key=value' provenance lines")

    parser = argparse.ArgumentParser(prog="triality", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", parents=[common], help="all measures and identity residuals for a scenario")
    p.add_argument("scenario", help="scenario file or canonical name")
    p.add_argument("--rho", action="store_true", help="emit the reduced density matrix instead")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("verify", parents=[common], help="check the duality/triality identities")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--random", nargs="+", metavar="V", help="N M COUNT SEED [TOLERANCE]")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="uniform-overlap transition sweep")
    p.add_argument("scenario")
    p.add_argument("--steps", type=int, default=11)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fringe", parents=[common], help="simulated fringe scans and visibility")
    p.add_argument("scenario")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.set_defaults(func=cmd_fringe)

    p = sub.add_parser("random-suite", parents=[common], help="identity checks over random states")
    p.add_argument("--n-range", nargs=2, type=int, default=(2, 8), metavar=("LO", "HI"))
    p.add_argument("--m-range", nargs=2, type=int, default=(1, 8), metavar=("LO", "HI"))
    p.add_argument("--count", type=int, default=DEFAULT_COUNT)
    p.add_argument("--seed", type=int, default=None, help=f"default from ${SEED_ENV}, else {DEFAULT_SEED}")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_random_suite)

    p = sub.add_parser("scenarios", parents=[common], help="list or dump canonical scenarios")
    p.add_argument("--dump", metavar="NAME", help="print NAME as a scenario document")
    p.set_defaults(func=cmd_scenarios)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValidationError, ValueError) as exc:
        print(f"triality: error: {exc}", file=sys.stderr)
        return 2
    except ConsistencyError as exc:
        print(f"triality: consistency failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
