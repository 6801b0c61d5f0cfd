"""Command-line entry point.

Subcommands, one per workflow:

* ``transform``  instrument a program and write it back as MiniJ text
* ``seed``       remove null checks (fault seeding) and report the count
* ``run``        execute a program, optionally under a repair strategy
* ``matrix``     per-strategy outcome matrix over a crashing corpus
* ``bench``      instrumentation overhead measurement
* ``explore``    seeded strategy exploration until deployment

Exit codes: 0 success, 1 the target program crashed, 2 usage error,
3 corpus or transform error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    AlreadyInstrumentedError, CorpusError, MiniJError, MiniJSyntaxError,
    MiniJTypeError,
)
from .harness import (
    campaign_to_json, campaign_to_text, load_manifest, matrix_to_json,
    matrix_to_text, measure_overhead, overhead_to_json, overhead_to_text,
    run_matrix, run_seeding_campaign, run_exploration_session,
)
from .harness.corpus import parse_file
from .harness.matrix import classify
from .minij import print_program, typecheck
from .runtime import (
    DEFAULT_DEPTH_BUDGET, Strategy, make_controller, prepare, run_prepared,
)
from .runtime.strategies import STRATEGY_IDS
from .transform import TransformConfig, is_instrumented, seed_remove_null_checks, transform_all

DEFAULT_SEED = 1

EXIT_OK = 0
EXIT_CRASH = 1
EXIT_USAGE = 2
EXIT_INPUT = 3


def _read_program(path: str):
    return parse_file(Path(path))


def _load_case_units(path: str):
    """A case path is one .mj file or a directory with app/ and main|tests/."""
    p = Path(path)
    if p.is_file():
        return [_read_program(str(p))], []
    app = sorted((p / "app").glob("*.mj"))
    drivers = []
    for sub in ("main", "tests"):
        if (p / sub).is_dir():
            drivers += sorted((p / sub).glob("*.mj"))
    if not app:
        raise CorpusError(f"no app/*.mj under {p}")
    return [parse_file(f) for f in app], [parse_file(f) for f in drivers]


def _load_deployments(path: str | None) -> dict[str, Strategy] | None:
    if path is None:
        return None
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return {key: Strategy(entry["strategy"], entry.get("parameter"))
            for key, entry in data.items()}


def _write_output(path: str | None, content: str):
    if path is None or path == "-":
        sys.stdout.write(content)
    else:
        Path(path).write_text(content, encoding="utf-8")


def _add_report_flags(sub, formats=("json", "text")):
    sub.add_argument("--report", metavar="FILE",
                     help="write a report to FILE")
    sub.add_argument("--format", choices=formats, default="text",
                     help="report format (default: text)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="npefix",
        description="Runtime repair of null-dereference failures for MiniJ "
                    "programs.")
    subs = parser.add_subparsers(dest="command", required=True)

    p_transform = subs.add_parser(
        "transform", help="instrument a MiniJ program",
        description="Apply the repair instrumentation (value pool, catch "
                    "stack, method skip, line skip, null checks) and write "
                    "the result as MiniJ text.")
    p_transform.add_argument("input", help="input .mj file")
    p_transform.add_argument("-o", "--output", help="output file (default: stdout)")

    p_seed = subs.add_parser(
        "seed", help="fault seeding: remove null checks",
        description="With a .mj file: remove every syntactic null-check "
                    "guard (if (x == null) / if (x != null)) and write the "
                    "seeded program. With a project directory (app/ + "
                    "tests/): run the full seeding campaign, reporting "
                    "failure statistics and the repair matrix over the NPE "
                    "failures.")
    p_seed.add_argument("input", help="input .mj file or project directory")
    p_seed.add_argument("-o", "--output",
                        help="output file for seeded source (default: stdout)")
    p_seed.add_argument("--depth", type=int, default=DEFAULT_DEPTH_BUDGET,
                        help="manufacture recursion budget (campaign only)")
    _add_report_flags(p_seed)

    p_run = subs.add_parser(
        "run", help="execute a program, optionally under repair",
        description="Run a program. With --strategy the program is "
                    "instrumented and the strategy is applied at every "
                    "harmful null dereference; with --explore untried "
                    "strategies are drawn at random using --seed.")
    p_run.add_argument("input", help=".mj file, or directory with app/ and main/")
    mode = p_run.add_mutually_exclusive_group()
    mode.add_argument("--strategy", choices=STRATEGY_IDS,
                      help="fixed repair strategy")
    mode.add_argument("--explore", action="store_true",
                      help="random strategy exploration")
    p_run.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"RNG seed for exploration (default {DEFAULT_SEED})")
    p_run.add_argument("--depth", type=int, default=DEFAULT_DEPTH_BUDGET,
                       help="recursion budget for object manufacture "
                            f"(default {DEFAULT_DEPTH_BUDGET})")
    p_run.add_argument("--deployments", metavar="FILE",
                       help="JSON deployment table (crash point -> strategy)")
    p_run.add_argument("--trace", action="store_true",
                       help="write the repair log to stderr")
    _add_report_flags(p_run, formats=("json",))

    p_matrix = subs.add_parser(
        "matrix", help="outcome matrix over a crashing corpus",
        description="Run every crashing case of a corpus manifest under all "
                    "nine strategies and classify each cell.")
    p_matrix.add_argument("manifest", help="corpus manifest JSON")
    p_matrix.add_argument("--jobs", type=int, default=1,
                          help="parallel case workers (default 1)")
    p_matrix.add_argument("--depth", type=int, default=DEFAULT_DEPTH_BUDGET,
                          help="manufacture recursion budget")
    _add_report_flags(p_matrix)

    p_bench = subs.add_parser(
        "bench", help="measure instrumentation overhead",
        description="Run each non-crashing case N times original and N "
                    "times instrumented (repair idle) and report mean "
                    "times with the overhead percentage.")
    p_bench.add_argument("manifest", help="corpus manifest JSON")
    p_bench.add_argument("--reps", type=int, default=10,
                         help="repetitions per side (default 10)")
    _add_report_flags(p_bench)

    p_explore = subs.add_parser(
        "explore", help="exploration session until deployment",
        description="Repeatedly run a failing program, drawing untried "
                    "strategies, until one repairs it (deployed and "
                    "rendered as a patch suggestion) or all candidates are "
                    "exhausted.")
    p_explore.add_argument("input", help=".mj file, or directory with app/ and main/")
    p_explore.add_argument("--seed", type=int, default=DEFAULT_SEED,
                           help=f"RNG seed (default {DEFAULT_SEED})")
    p_explore.add_argument("--depth", type=int, default=DEFAULT_DEPTH_BUDGET,
                           help="manufacture recursion budget")
    p_explore.add_argument("--report", metavar="FILE",
                           help="write the session log as JSON to FILE")
    return parser


def cmd_transform(args) -> int:
    program = _read_program(args.input)
    typecheck(program)
    instrumented = transform_all(program, TransformConfig())
    _write_output(args.output, print_program(instrumented, args.input).text)
    return EXIT_OK


def cmd_seed(args) -> int:
    path = Path(args.input)
    if path.is_dir():
        result = run_seeding_campaign(path, depth=args.depth)
        text = campaign_to_text(result)
        sys.stdout.write(text)
        if args.report:
            content = campaign_to_json(result) if args.format == "json" else text
            Path(args.report).write_text(content, encoding="utf-8")
        return EXIT_OK
    program = _read_program(args.input)
    seeded, report = seed_remove_null_checks(program)
    typecheck(seeded)
    _write_output(args.output, print_program(seeded, args.input).text)
    if args.report:
        record = {
            "count": report.count,
            "removed": [{"path": r.path, "start": r.span.start,
                         "end": r.span.end, "check_op": r.check_op,
                         "guarded_kind": r.guarded_kind}
                        for r in report.removed],
        }
        Path(args.report).write_text(json.dumps(record, indent=2) + "\n",
                                     encoding="utf-8")
    print(f"removed null checks: {report.count}", file=sys.stderr)
    return EXIT_OK


def cmd_run(args) -> int:
    app_units, driver_units = _load_case_units(args.input)
    deployments = _load_deployments(args.deployments)
    needs_repair = args.strategy or args.explore or deployments
    if needs_repair:
        from .runtime import prepare_split
        already = any(is_instrumented(u) for u in app_units)
        if already:
            from .minij import combine
            prepared = prepare([combine(*app_units, *driver_units)])
        else:
            prepared = prepare_split(app_units, driver_units)
        if args.strategy:
            controller = make_controller("fixed", strategy=Strategy(args.strategy),
                                         depth=args.depth,
                                         deployments=deployments,
                                         site_types=prepared.site_types)
        elif args.explore:
            print(f"seed: {args.seed}", file=sys.stderr)
            controller = make_controller("explore", seed=args.seed,
                                         depth=args.depth,
                                         deployments=deployments,
                                         site_types=prepared.site_types)
        else:
            controller = make_controller("deployed", deployments=deployments,
                                         site_types=prepared.site_types)
    else:
        from .minij import combine
        prepared = prepare([combine(*app_units, *driver_units)])
        controller = None
    result = run_prepared(prepared, controller)
    sys.stdout.write(result.stdout)
    if args.trace and controller is not None:
        for line in controller.log_lines():
            print(line, file=sys.stderr)
    outcome = None
    if args.strategy:
        try:
            outcome = classify(result)
        except CorpusError:
            outcome = None
    if args.report:
        record = {
            "status": result.status,
            "assertion_failed": result.assertion_failed,
            "outcome": outcome,
            "stdout": result.stdout,
            "events": [ev.to_record() for ev in result.events],
        }
        Path(args.report).write_text(json.dumps(record, indent=2, sort_keys=True)
                                     + "\n", encoding="utf-8")
    if result.crashed:
        print(f"uncaught exception: {result.status}"
              + (f" (outcome {outcome})" if outcome else ""), file=sys.stderr)
        return EXIT_CRASH
    return EXIT_OK


def cmd_matrix(args) -> int:
    corpus = load_manifest(args.manifest)
    crash_cases = [c for c in corpus.cases if c.expect_kind == "crash"]
    matrix = run_matrix(corpus, depth=args.depth, jobs=args.jobs,
                        cases=crash_cases)
    text = matrix_to_text(matrix)
    sys.stdout.write(text)
    if args.report:
        content = matrix_to_json(matrix) if args.format == "json" else text
        Path(args.report).write_text(content, encoding="utf-8")
    return EXIT_OK


def cmd_bench(args) -> int:
    corpus = load_manifest(args.manifest)
    report = measure_overhead(corpus, repetitions=args.reps)
    text = overhead_to_text(report)
    sys.stdout.write(text)
    if args.report:
        content = overhead_to_json(report) if args.format == "json" else text
        Path(args.report).write_text(content, encoding="utf-8")
    return EXIT_OK


def cmd_explore(args) -> int:
    app_units, driver_units = _load_case_units(args.input)
    print(f"seed: {args.seed}", file=sys.stderr)
    session = run_exploration_session(app_units, driver_units, entry=None,
                                      seed=args.seed, depth=args.depth,
                                      name=Path(args.input).stem)
    for line in session.log_lines():
        print(line)
    print(f"outcome: {session.outcome} after {len(session.runs)} runs",
          file=sys.stderr)
    if args.report:
        Path(args.report).write_text(
            json.dumps(session.to_record(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    return EXIT_OK if session.outcome == "deployed" else EXIT_CRASH


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    handlers = {
        "transform": cmd_transform,
        "seed": cmd_seed,
        "run": cmd_run,
        "matrix": cmd_matrix,
        "bench": cmd_bench,
        "explore": cmd_explore,
    }
    try:
        return handlers[args.command](args)
    except (MiniJSyntaxError, MiniJTypeError, AlreadyInstrumentedError,
            CorpusError, MiniJError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
