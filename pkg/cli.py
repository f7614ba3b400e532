#!/usr/bin/env python3
"""
Command-line driver for unramified Brauer groups of finite gerbs
"""
import argparse
import hashlib
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional

from brnr import __version__
from brnr.abelian import AbelianSubgroup
from brnr.base import BrnrError, JobFileNotFound, SchemaViolation, UnknownCommand
from brnr.catalog import CatalogEntry, catalog, preset
from brnr.cohomology import cohomology_group
from brnr.config import LOG_FORMAT, LOG_LEVEL, configure, settings
from brnr.modules import dual_module, pull_back_module
from brnr.pairing import (
    constancy_check,
    enumerate_sections,
    h1_orbits,
    real_unramified_kernel,
)
from brnr.sha import constant_classes, normalized_subgroup, sha1_cyc, sha2, unramified_brauer
from brnr.suites import CAPPED, default_suites
from brnr.timing import TimingCollector
from db.cache import close_cache, open_cache
from models.schemas import (
    COMMANDS,
    SCAN_COMMANDS,
    SCHEMA_VERSION,
    EvaluationSpec,
    GerbSpec,
    JobSpec,
    ModuleSpec,
    load_spec,
    parse_spec,
)
from utils import ProgressSpinner, console, dump_report, print_error, results_table, timing_table, write_report

# Configure logging
logging.basicConfig(
    level=LOG_LEVEL,
    format=LOG_FORMAT
)
logger = logging.getLogger(__name__)

SUITES = tuple(default_suites().names)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_COUNTEREXAMPLE = 2


class JobParser(argparse.ArgumentParser):
    """Raises instead of exiting so usage errors map onto exit code 1"""

    def error(self, message):
        raise SchemaViolation(message, pointer="/argv")


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> JobParser:
    parser = JobParser(prog="brnr", description="Unramified Brauer groups of finite gerbs")
    parser.add_argument("--version", action="version", version=f"brnr {__version__}")
    common = JobParser(add_help=False)
    common.add_argument("--output", type=Path, help="Write the JSON report here")
    common.add_argument("--json", dest="json_output", action="store_true", help="Print the JSON report to stdout")
    common.add_argument("--cache-dir", type=Path, help="Cache directory (default $BRNR_CACHE_DIR)")
    common.add_argument("--no-cache", action="store_true", help="Do not read or write the persistent cache")
    common.add_argument("--workers", type=int, help="Parallel workers for family members and catalog entries")
    common.add_argument("--max-order", type=int, help="Largest group order to close up")
    common.add_argument("--timing", action="store_true", help="Include wall-clock timings in the report")

    gerb_args = JobParser(add_help=False)
    gerb_args.add_argument("--gerb", type=Path, help="Gerb JSON file")
    gerb_args.add_argument("--module", type=Path, help="Module JSON file")
    gerb_args.add_argument("--mu", type=int, help="Use μ_n as coefficients")
    gerb_args.add_argument("--character", type=_ints, help="Character values on the generators of Γ")

    commands = parser.add_subparsers(dest="command", parser_class=JobParser)
    cohomology = commands.add_parser("cohomology", parents=[common, gerb_args], help="H^i of E or Γ")
    cohomology.add_argument("--degree", type=int, default=2, choices=[0, 1, 2])
    cohomology.add_argument("--on", choices=["E", "gamma"], default="E")
    cohomology.add_argument("--sha1-cyc", action="store_true", help="Also report Sha^1_cyc over Γ")
    sha = commands.add_parser("sha", parents=[common, gerb_args], help="Sha^2 kernel of one family")
    sha.add_argument("--family", default="ab,scyc", help="x,y with x in ab|bic|cyc and y in scyc|0")
    brnr = commands.add_parser("brnr", parents=[common, gerb_args], help="Unramified classes by all four formulas")
    brnr.add_argument("--odd-part-only", action="store_true")
    commands.add_parser("sections", parents=[common, gerb_args], help="Sections and their F-conjugacy classes")
    evaluate = commands.add_parser("evaluate", parents=[common], help="Evaluate classes at sections over a local model")
    evaluate.add_argument("--spec", type=Path, help="Evaluation JSON file (tame models need n dividing q^a - 1)")
    verify = commands.add_parser("verify", parents=[common], help="Run a verification suite over a catalog")
    verify.add_argument("suite", help=f"One of {', '.join(SUITES)}")
    verify.add_argument("--catalog", default="small")
    verify.add_argument("--families", type=lambda s: s.split(","))
    scan = commands.add_parser("catalog", parents=[common], help="Run a command over every catalog entry")
    scan.add_argument("--catalog", default="small")
    scan.add_argument("--families", type=lambda s: s.split(","))
    scan.add_argument("--scan", choices=list(SCAN_COMMANDS), default="brnr")
    scan.add_argument("--odd-part-only", action="store_true")
    return parser


def parse_job(argv: list[str]) -> JobSpec:
    if not argv or argv[0] not in COMMANDS:
        if argv and argv[0] in ("-h", "--help", "--version"):
            build_parser().parse_args(argv)
        raise UnknownCommand(f"Unknown command {argv[0] if argv else ''!r}", choices=list(COMMANDS))
    args = vars(build_parser().parse_args(argv))
    if args["command"] == "verify" and args["suite"] not in SUITES:
        raise UnknownCommand(f"Unknown suite {args['suite']!r}", choices=list(SUITES))
    spec = parse_spec({k: v for k, v in args.items() if v is not None}, JobSpec)
    for name, path in spec.input_files().items():
        if not path.is_file():
            raise JobFileNotFound(f"{name} file not found", path=str(path))
    return spec


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _load_gerb(spec: JobSpec):
    gerb_spec = load_spec(spec.gerb, GerbSpec)
    gerb = gerb_spec.build()
    if spec.module is not None:
        base, module = load_spec(spec.module, ModuleSpec).build(gerb)
        return gerb, base, module
    coefficients = gerb_spec.coefficients(spec.mu, spec.character)
    if coefficients is None:
        if spec.command == "sections":
            return gerb, None, None
        raise SchemaViolation(f"{spec.command} needs --mu, --module or mu in the gerb", pointer="/mu")
    base, module = coefficients.build(gerb)
    if coefficients.mu < gerb.F.group.exponent:
        logger.warning(f"Coefficient exponent {coefficients.mu} is smaller than the exponent of F")
    return gerb, base, module


def _entry_job(entry: CatalogEntry):
    return entry.gerb, entry.base_module, entry.module


def run_cohomology(spec: JobSpec, gerb, base, module) -> Dict[str, Any]:
    group, M = (gerb.gamma, base) if spec.on == "gamma" else (gerb.E, module)
    result = cohomology_group(group, M, spec.degree).to_json()
    if spec.sha1_cyc:
        result["sha1_cyc"] = list(sha1_cyc(gerb.gamma, base).invariant_factors)
        if gerb.F.group.is_abelian and base.rank == 1 and base.factors[0] % gerb.F.group.exponent == 0:
            local_action = gerb.F.local_index[gerb.conjugation_action()]
            dual = dual_module(gerb.F.group, base.factors[0], gerb.gamma, local_action, base.action[:, 0, 0])
            result["sha1_cyc_dual"] = list(sha1_cyc(gerb.gamma, dual).invariant_factors)
    return result


def run_sha(spec: JobSpec, gerb, base, module) -> Dict[str, Any]:
    x, y = spec.family.split(",")
    return sha2(gerb, module, x, y, spec.workers).to_json()


def run_brnr(spec: JobSpec, gerb, base, module) -> Dict[str, Any]:
    report = unramified_brauer(gerb, module, odd_part_only=spec.odd_part_only, workers=spec.workers)
    result = report.to_json()
    if gerb.split:
        result["normalized"] = normalized_subgroup(gerb, module, report.kernel).to_json()
    result["constant"] = constant_classes(gerb, module).to_json()
    return result


def run_sections(spec: JobSpec, gerb, base, module) -> Dict[str, Any]:
    sections = enumerate_sections(gerb)
    classes = h1_orbits(sections, gerb)
    return {
        "count": len(sections),
        "sections": [s.to_json() for s in sections],
        "classes": [c.to_json() for c in classes],
    }


GERB_COMMANDS = {
    "cohomology": run_cohomology,
    "sha": run_sha,
    "brnr": run_brnr,
    "sections": run_sections,
}


def run_evaluate(spec: JobSpec) -> Dict[str, Any]:
    evaluation = load_spec(spec.spec, EvaluationSpec)
    model, gerb = evaluation.build()
    M = pull_back_module(model.module, gerb.pi)
    H = cohomology_group(gerb.E, M, 2)
    if evaluation.classes == "all":
        S = AbelianSubgroup.whole(H.invariant_factors)
    elif evaluation.classes == "constant":
        S = constant_classes(gerb, M)
    elif model.kind == "real":
        S = real_unramified_kernel(gerb, M)
    else:
        S = normalized_subgroup(gerb, M, unramified_brauer(gerb, M, workers=spec.workers).kernel)
    report = constancy_check(gerb, model, S, M, bypass=evaluation.bypass)
    return {"model": model.to_json(), "classes": evaluation.classes, **report.to_json()}


def _catalog_spec(spec: JobSpec):
    catalog_spec = preset(spec.catalog)
    if spec.families:
        catalog_spec = parse_spec({**catalog_spec.model_dump(), "families": spec.families}, type(catalog_spec))
    return catalog_spec


def catalog_scan(spec: JobSpec, timing: TimingCollector) -> list:
    rows = []
    runner = GERB_COMMANDS[spec.scan]
    for entry in catalog(_catalog_spec(spec)):
        try:
            with timing.measure(spec.scan):
                result = runner(spec, *_entry_job(entry))
        except CAPPED as e:
            logger.warning(f"Skipping {entry.name}: {e}")
            timing.record_entry(skipped=True)
            rows.append({"entry": entry.to_json(), "skipped": str(e)})
            continue
        timing.record_entry()
        summary = ""
        if spec.scan == "brnr":
            summary = f"kernel {result['kernel']['invariant_factors']} agree={result['agree']}"
        rows.append({"entry": entry.to_json(), "result": result, "summary": summary})
    return rows


def execute_job(spec: JobSpec, store=None) -> tuple[Dict[str, Any], int]:
    """Runs the job and returns its report and exit code"""
    timing = TimingCollector()
    code = EXIT_OK
    with ProgressSpinner(f"{spec.command}...", enabled=sys.stderr.isatty()):
        if spec.command in GERB_COMMANDS:
            with timing.measure("load"):
                gerb, base, module = _load_gerb(spec)
            with timing.measure(spec.command):
                results = GERB_COMMANDS[spec.command](spec, gerb, base, module)
        elif spec.command == "evaluate":
            with timing.measure("evaluate"):
                results = run_evaluate(spec)
        elif spec.command == "verify":
            entries = catalog(_catalog_spec(spec))
            with timing.measure(spec.suite):
                outcome = default_suites().run(spec.suite, entries, workers=spec.workers)
            results = {"suite": spec.suite, **outcome.to_dict()}
            if outcome.counterexamples:
                code = EXIT_COUNTEREXAMPLE
        else:
            results = catalog_scan(spec, timing)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": spec.command,
        "options": {k: str(v) if isinstance(v, Path) else v for k, v in spec.echo().items()},
        "inputs": {name: _digest(path) for name, path in sorted(spec.input_files().items())},
        "results": results,
    }
    if spec.timing:
        if store is not None:
            timing.job.cache_hits, timing.job.cache_misses = store.hits, store.misses
        report["timing"] = timing.get_current_metrics()
    return report, code


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    store = None
    try:
        spec = parse_job(argv)
        configure(workers=spec.workers, max_order=spec.max_order, cache_dir=spec.cache_dir)
        if not spec.no_cache:
            store = open_cache(settings.cache_dir)
        report, code = execute_job(spec, store)
    except BrnrError as e:
        logger.error(f"{argv[0] if argv else 'brnr'} failed: {e}")
        print_error(f"{type(e).__name__}: {e}", title=argv[0] if argv else "brnr")
        return EXIT_ERROR
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        print_error(f"{type(e).__name__}: {e}", title="internal error")
        return EXIT_ERROR
    finally:
        if store is not None:
            close_cache()
    if spec.output is not None:
        write_report(report, spec.output)
    if spec.json_output:
        sys.stdout.write(dump_report(report))
    else:
        console.print(results_table(spec.command, report["results"]))
        if "timing" in report:
            console.print(timing_table(report["timing"]))
    if code == EXIT_COUNTEREXAMPLE:
        logger.warning(f"{spec.suite}: {len(report['results']['counterexamples'])} counterexamples")
    return code


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\nInterrupted.")
        sys.exit(EXIT_ERROR)
