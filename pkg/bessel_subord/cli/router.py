import argparse
import os
import sys
from contextlib import contextmanager
from pathlib import Path
from tomllib import TOMLDecodeError
from typing import Iterator, TextIO

from loguru import logger
from pydantic import ValidationError
from pydantic_settings import SettingsError

from bessel_subord.admissibility.models import FUNCTIONAL_NAMES, AdmissibleClass
from bessel_subord.admissibility.service import write_violations_csv
from bessel_subord.besselgen.models import ClosedForm
from bessel_subord.besselgen.service import closed_form_eval, phi_series
from bessel_subord.cli.repository import ReportWriter
from bessel_subord.cli.service import CASE_NAMES, SingleOverrides, VerificationService, audit_record
from bessel_subord.config import Settings
from bessel_subord.exceptions import BesselSubordError
from bessel_subord.logs import configure_logging
from bessel_subord.series.service import evaluate

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

MATCH_TOLERANCE = 1e-10


class UsageError(Exception):
    """Raised for command-line input that parses but makes no sense."""

    pass


# --- Parsing ---


def _complex_list(text: str) -> list[complex]:
    try:
        return [complex(part.strip().replace(" ", "")) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number list: {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number list: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML config file")
    common.add_argument("--verbose", action="store_true", help="DEBUG logging on stderr")
    common.add_argument("--format", choices=ReportWriter.FORMATS, dest="output_format")
    common.add_argument("--out", type=Path, help="Write the report here instead of stdout")
    common.add_argument("--seed", type=int)
    common.add_argument("--N", type=int, dest="truncation_order", help="Truncation order")
    common.add_argument("--grid-radii", type=_float_list, help="Comma separated radii in (0, 0.999]")
    common.add_argument("--grid-angles", type=int, help="Angular samples per radius")
    common.add_argument("--threads", type=int)
    common.add_argument("--p", type=complex)
    common.add_argument("--b", type=complex)
    common.add_argument("--c", type=complex)
    common.add_argument("--kappa", type=complex)
    common.add_argument("--M", type=float)

    parser = argparse.ArgumentParser(
        prog="bessel-subord",
        description="Numerical checks for subordination results on the generalized Bessel operator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", parents=[common], help="Evaluate phi_{p,b,c} and matching closed forms")
    p_eval.add_argument("--z", type=_complex_list, action="append", required=True, help="Point(s), comma separated")

    p_verify = sub.add_parser("verify", parents=[common], help="Run identity and corollary checks")
    p_verify.add_argument("--case", action="append", default=[], help=f"Repeatable or comma separated: {', '.join(CASE_NAMES)}")
    p_verify.add_argument("--sweep", choices=("default", "single"), default="default")

    p_audit = sub.add_parser("audit", parents=[common], help="Sample an admissibility condition")
    p_audit.add_argument("--phi", required=True, help=f"Functional: {', '.join(FUNCTIONAL_NAMES)}")
    p_audit.add_argument("--class", dest="admissible_class", default="H", help="H, H1 or H2")
    p_audit.add_argument("--violations-csv", type=Path, help="Dump violating points as CSV")
    return parser


def load_settings(args: argparse.Namespace) -> Settings:
    """Settings with CLI flags layered over the config file, environment and defaults."""
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.output_format is not None:
        overrides["output_format"] = args.output_format
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.truncation_order is not None:
        overrides["series"] = {"truncation_order": args.truncation_order}
    grid = {}
    if args.grid_radii is not None:
        grid["radii"] = args.grid_radii
    if args.grid_angles is not None:
        grid["angular_samples"] = args.grid_angles
    if grid:
        overrides["grid"] = grid
    if args.verbose:
        overrides["log_level"] = "DEBUG"
    return Settings.load(args.config, **overrides)


@contextmanager
def _output(path: Path | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def _meta(command: str, settings: Settings) -> dict[str, str]:
    grid = f"{settings.grid.radii}x{settings.grid.angular_samples}".replace(" ", "")
    if settings.grid.refine:
        grid += "+refine"
    return {
        "command": command,
        "seed": str(settings.seed),
        "N": str(settings.series.truncation_order),
        "grid": grid,
    }


def _threads(settings: Settings) -> int:
    # BESSEL_SUBORD_THREADS is read by Settings; never exceed the machine
    return max(1, min(settings.threads, os.cpu_count() or 1))


# --- Commands ---


def cmd_eval(args: argparse.Namespace, settings: Settings) -> int:
    """Print phi_{p,b,c}(z) and, when (kappa, c) has one, its closed form at each z."""
    overrides = SingleOverrides(p=args.p, b=args.b, c=args.c, kappa=args.kappa)
    params = overrides.params()
    series = phi_series(params, settings.series.truncation_order)
    form = next(
        (cf for cf in ClosedForm if abs(params.kappa - cf.kappa) < 1e-12 and abs(params.c - cf.c) < 1e-12),
        None,
    )
    points = [z for group in args.z for z in group]
    with _output(args.out) as out:
        out.write(f"# phi {params.label()} N={settings.series.truncation_order}\n")
        for z in points:
            value = evaluate(series, z)
            line = f"z={z!r} phi={value!r}"
            if form is not None:
                exact = closed_form_eval(form, z)
                ok = abs(value - exact) <= MATCH_TOLERANCE * max(abs(exact), 1e-300)
                line += f" {form.value}={exact!r} {'matching' if ok else 'MISMATCH'}"
            out.write(line + "\n")
    return EXIT_OK


def _parse_cases(raw: list[str]) -> list[str]:
    cases = [part.strip() for item in raw for part in item.split(",") if part.strip()]
    if not cases:
        raise UsageError(f"No --case given; choose from {', '.join(CASE_NAMES)}")
    unknown = [c for c in cases if c not in CASE_NAMES]
    if unknown:
        raise UsageError(f"Unknown case(s) {unknown}; choose from {', '.join(CASE_NAMES)}")
    return cases


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    cases = _parse_cases(args.case)
    single = None
    given = [f"--{name}" for name in ("p", "b", "c", "kappa", "M") if getattr(args, name) is not None]
    if given and args.sweep != "single":
        raise UsageError(f"{', '.join(given)} only apply with --sweep single")
    if args.sweep == "single":
        single = SingleOverrides(p=args.p, b=args.b, c=args.c, kappa=args.kappa, M=args.M)
        single.params()  # surface DomainError before any work
    service = VerificationService(settings)
    tasks = service.build_tasks(cases, single)
    records = service.run_tasks(tasks, _threads(settings))

    with _output(args.out) as out:
        ReportWriter(out, settings.output_format).write(records, _meta(f"verify {','.join(cases)}", settings))

    failed = [r for r in records if not r.passed]
    if failed:
        logger.warning(f"{len(failed)}/{len(records)} checks failed")
        return EXIT_FAILURE
    logger.info(f"all {len(records)} checks passed")
    return EXIT_OK


def cmd_audit(args: argparse.Namespace, settings: Settings) -> int:
    if args.phi not in FUNCTIONAL_NAMES:
        raise UsageError(f"Unknown functional {args.phi!r}; choose from {', '.join(FUNCTIONAL_NAMES)}")
    try:
        admissible_class = AdmissibleClass(args.admissible_class)
    except ValueError:
        raise UsageError(f"Unknown class {args.admissible_class!r}; choose from H, H1, H2") from None

    report = VerificationService(settings).run_audit(args.phi, admissible_class, M=args.M, kappa=args.kappa)
    with _output(args.out) as out:
        ReportWriter(out, settings.output_format).write(
            [audit_record(report)], _meta(f"audit {args.phi} {admissible_class}", settings)
        )
    if args.violations_csv is not None:
        write_violations_csv(report, args.violations_csv)
    return EXIT_FAILURE if report.violation_found else EXIT_OK


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "audit": cmd_audit}


def main(argv: list[str] | None = None) -> int:
    configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for bad usage
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    try:
        settings = load_settings(args)
        configure_logging(settings.log_level)
        settings.log_summary()
        return COMMANDS[args.command](args, settings)
    except (
        UsageError,
        BesselSubordError,
        ValidationError,
        SettingsError,
        FileNotFoundError,
        TOMLDecodeError,
    ) as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
