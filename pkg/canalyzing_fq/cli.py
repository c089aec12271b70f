"""Command-line front end: `canalyzing <command> ...`.

Exit codes: 0 success, 1 a formula/brute-force or identity mismatch, 2 usage
errors, 3 unsupported field orders or sizes past the configured limits.

"""
import argparse
import json
import logging
import sys
import typing as T

import arrow

import canalyzing_fq
from canalyzing_fq import counting
from canalyzing_fq.canalyzing import FamilySpec, canalyzing_triples, sample
from canalyzing_fq.config import (
    DEFAULTS,
    SettingsStore,
    discover_settings,
    settings_path,
)
from canalyzing_fq.field import make_field
from canalyzing_fq.files import dumps_functions, read_functions, write_functions
from canalyzing_fq.function import (
    AnfPolynomial,
    anf_to_table,
    degree,
    degree_in_variable,
    essential_variables,
    table_to_anf,
)
from canalyzing_fq.util import hash64


__all__ = ["main"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3

LIMIT_ERRORS = (canalyzing_fq.NotPrimePowerError, canalyzing_fq.SizeLimitExceededError)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class ArrowFormatter(logging.Formatter):
    def formatTime(self, record, datefmt=None):
        return arrow.get(record.created).isoformat()


def _configure_logging(level: str):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(ArrowFormatter(LOG_FORMAT))
    package_logger = logging.getLogger("canalyzing_fq")
    package_logger.handlers[:] = [handler]
    package_logger.setLevel(level)


def _family(text: str) -> FamilySpec:
    try:
        return FamilySpec.parse(text)
    except canalyzing_fq.FamilySpecError as e:
        raise argparse.ArgumentTypeError(e.message) from e


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _emit_table(headers: T.Sequence[str], rows: T.Sequence[T.Sequence[T.Any]]):
    cells = [[str(c) for c in row] for row in rows]
    widths = [
        max([len(h)] + [len(row[j]) for row in cells]) for j, h in enumerate(headers)
    ]
    print("  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip())
    print("  ".join("-" * w for w in widths))
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())


def _emit_json(document: T.Any):
    print(json.dumps(document, indent=2, sort_keys=True))


_REPORT_HEADERS = ("family", "name", "q", "n", "theorem", "formula", "brute", "status")


def _report_row(report: counting.CountReport) -> T.List[T.Any]:
    brute = "-" if report.brute is None else report.brute
    if report.brute is None or report.formula is None:
        status = "-"
    else:
        status = "ok" if report.agrees else "MISMATCH"
    return [
        report.spec,
        report.spec.name,
        report.q,
        report.n,
        "-" if report.theorem is None else report.theorem,
        "-" if report.formula is None else report.formula,
        brute,
        status,
    ]


def _emit_reports(reports: T.Sequence[counting.CountReport], as_json: bool):
    if as_json:
        _emit_json([report.to_json() for report in reports])
    else:
        _emit_table(_REPORT_HEADERS, [_report_row(report) for report in reports])


def cmd_count(args, settings) -> int:
    report = counting.count_report(
        args.family,
        args.q,
        args.n,
        brute=args.method != "formula",
        workers=settings.workers,
        chunk_size=settings.chunk_size,
        formula=args.method != "brute",
    )
    _emit_reports([report], args.json)
    return EXIT_OK if report.agrees else EXIT_MISMATCH


def cmd_brute(args, settings) -> int:
    count = counting.count_brute(
        args.family, args.q, args.n, settings.workers, settings.chunk_size
    )
    if args.json:
        _emit_json(
            {"family": str(args.family), "q": args.q, "n": args.n, "brute": str(count)}
        )
    else:
        print(count)
    return EXIT_OK


def cmd_verify(args, settings) -> int:
    start = arrow.utcnow()
    reports = counting.verify_families(
        args.q, args.n, settings.workers, settings.chunk_size
    )
    logger.info("Verified q=%d, n=%d in %s", args.q, args.n, arrow.utcnow() - start)
    _emit_reports(reports, args.json)
    return EXIT_OK if all(report.agrees for report in reports) else EXIT_MISMATCH


def _analysis(f) -> T.Dict[str, T.Any]:
    if isinstance(f, AnfPolynomial):
        anf, table = f, anf_to_table(f)
    else:
        anf, table = table_to_anf(f), f
    return {
        "q": table.q,
        "n": table.n,
        "anf": str(anf),
        "degree": degree(anf),
        "degrees": [degree_in_variable(anf, i) for i in range(1, anf.n + 1)],
        "essential": list(essential_variables(table)),
        "triples": [triple.to_record() for triple in canalyzing_triples(table)],
    }


def cmd_analyze(args, settings) -> int:
    analyses = [_analysis(f) for f in read_functions(args.file)]
    if args.json:
        _emit_json(analyses)
        return EXIT_OK
    for number, analysis in enumerate(analyses):
        if number:
            print()
        print(f"function {number}: q={analysis['q']} n={analysis['n']}")
        print(f"  anf:       {analysis['anf']}")
        print(f"  degree:    {analysis['degree']}")
        print(f"  degrees:   {' '.join(str(d) for d in analysis['degrees'])}")
        print(f"  essential: {' '.join(str(i) for i in analysis['essential']) or '-'}")
        triples = [f"<{t['i']}:{t['a']}:{t['b']}>" for t in analysis["triples"]]
        print(f"  triples:   {' '.join(triples) or '-'}")
    return EXIT_OK


def cmd_sample(args, settings) -> int:
    field = make_field(args.q)
    spec = FamilySpec(args.i, args.a, args.b)
    functions = [
        sample(field, args.n, spec, hash64(args.seed, t)) for t in range(args.count)
    ]
    if args.output:
        path = write_functions(args.output, functions, overwrite=args.force)
        logger.info("Wrote %d sample(s) to %s", len(functions), path)
    else:
        sys.stdout.write(dumps_functions(functions, args.format))
    return EXIT_OK


def cmd_identity(args, settings) -> int:
    rows = []
    for n in range(1, args.n_max + 1):
        lhs, rhs = counting.identity_sides(n)
        rows.append((n, lhs, rhs, lhs == rhs))
    if args.json:
        _emit_json(
            [
                {"n": n, "lhs": str(lhs), "rhs": str(rhs), "equal": equal}
                for n, lhs, rhs, equal in rows
            ]
        )
    else:
        _emit_table(("n", "lhs", "rhs", "equal"), rows)
    return EXIT_OK if all(row[3] for row in rows) else EXIT_MISMATCH


def cmd_asymptote(args, settings) -> int:
    ratio = counting.asymptote_ratio(args.family, args.q, args.n)
    document = {
        "family": str(args.family),
        "q": args.q,
        "n": args.n,
        "count": str(counting.count_formula(args.family, args.q, args.n).formula),
        "asymptote": str(counting.asymptote(args.family, args.q, args.n)),
        "ratio": f"{ratio.numerator}/{ratio.denominator}",
        "decimal": counting.decimal_string(ratio, settings.digits),
    }
    if args.json:
        _emit_json(document)
    else:
        _emit_table(
            ("family", "ratio", "decimal"),
            [[args.family, document["ratio"], document["decimal"]]],
        )
    return EXIT_OK


def cmd_bound(args, settings) -> int:
    count, bound = counting.upper_bound(args.q, args.n)
    holds = count <= bound
    if args.json:
        _emit_json(
            {
                "q": args.q,
                "n": args.n,
                "count": str(count),
                "bound": str(bound),
                "holds": holds,
            }
        )
    else:
        _emit_table(
            ("q", "n", "count", "bound", "holds"),
            [[args.q, args.n, count, bound, holds]],
        )
    return EXIT_OK if holds else EXIT_MISMATCH


def cmd_config(args, settings) -> int:
    store = SettingsStore(settings_path(args.config))
    if args.unset:
        if args.key is None or args.value is not None:
            raise ValueError("--unset takes one setting name and no value.")
        store.remove(args.key)
    elif args.value is not None:
        store.set(args.key, args.value)
    stored = store.get_keys()
    keys = [args.key] if args.key else list(DEFAULTS)
    _emit_table(
        ("setting", "value", "source"),
        [[key, store.get(key), "file" if key in stored else "default"] for key in keys],
    )
    return EXIT_OK


def _add_size(parser: argparse.ArgumentParser):
    parser.add_argument("--q", type=int, required=True, help="field order")
    parser.add_argument("--n", type=_positive, required=True, help="variables")


def _add_family(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--family", type=_family, required=True, help="i=<k|*>,a=<c|*>,b=<c|*>"
    )


def _add_workers(parser: argparse.ArgumentParser):
    parser.add_argument("--workers", type=_positive, help="worker processes")
    parser.add_argument("--chunk-size", type=_positive, help="tables per chunk")


def _add_json(parser: argparse.ArgumentParser):
    parser.add_argument("--json", action="store_true", help="emit one JSON document")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="canalyzing",
        description="Count and analyse canalyzing functions over GF(q).",
    )
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    parser.add_argument("--config", help="settings file")
    commands = parser.add_subparsers(dest="command", required=True)

    count = commands.add_parser("count", help="count one family")
    _add_size(count)
    _add_family(count)
    count.add_argument(
        "--method", choices=("formula", "brute", "both"), default="formula"
    )
    _add_workers(count)
    _add_json(count)
    count.set_defaults(handler=cmd_count)

    brute = commands.add_parser("brute", help="brute-force count of one family")
    _add_size(brute)
    _add_family(brute)
    _add_workers(brute)
    _add_json(brute)
    brute.set_defaults(handler=cmd_brute)

    verify = commands.add_parser("verify", help="formula against brute force")
    _add_size(verify)
    _add_workers(verify)
    _add_json(verify)
    verify.set_defaults(handler=cmd_verify)

    analyze = commands.add_parser("analyze", help="ANF, degrees and triples")
    analyze.add_argument("--file", required=True, help="a .json or .toml file")
    _add_json(analyze)
    analyze.set_defaults(handler=cmd_analyze)

    sample_parser = commands.add_parser("sample", help="seeded members of a family")
    _add_size(sample_parser)
    sample_parser.add_argument("--i", type=_positive, required=True)
    sample_parser.add_argument("--a", type=_nonnegative, required=True)
    sample_parser.add_argument("--b", type=_nonnegative, required=True)
    sample_parser.add_argument("--seed", type=_nonnegative, required=True)
    sample_parser.add_argument("--count", type=_positive, default=1)
    sample_parser.add_argument("--format", choices=("json", "toml"), default="json")
    sample_parser.add_argument("--output", help="write here instead of stdout")
    sample_parser.add_argument("--force", action="store_true", help="overwrite")
    sample_parser.set_defaults(handler=cmd_sample)

    identity = commands.add_parser("identity", help="both sides of the q=2 identity")
    identity.add_argument("--n-max", type=_positive, required=True)
    _add_json(identity)
    identity.set_defaults(handler=cmd_identity)

    asymptote = commands.add_parser("asymptote", help="count over asymptote")
    _add_size(asymptote)
    _add_family(asymptote)
    asymptote.add_argument("--digits", type=_nonnegative)
    _add_json(asymptote)
    asymptote.set_defaults(handler=cmd_asymptote)

    bound = commands.add_parser("bound", help="the n q^2 q^((q-1) q^(n-1)) bound")
    _add_size(bound)
    _add_json(bound)
    bound.set_defaults(handler=cmd_bound)

    config = commands.add_parser("config", help="show or change stored settings")
    config.add_argument("key", nargs="?", choices=sorted(DEFAULTS))
    config.add_argument("value", nargs="?")
    config.add_argument("--unset", action="store_true", help="remove the setting")
    config.set_defaults(handler=cmd_config)
    return parser


def main(argv: T.Optional[T.Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        settings = discover_settings(
            args.config,
            workers=getattr(args, "workers", None),
            chunk_size=getattr(args, "chunk_size", None),
            digits=getattr(args, "digits", None),
            log_level="DEBUG" if args.verbose else None,
        )
    except canalyzing_fq.CanalyzingError as e:
        print(f"canalyzing: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    _configure_logging(settings.log_level)
    try:
        return args.handler(args, settings)
    except LIMIT_ERRORS as e:
        print(f"canalyzing: {type(e).__name__}: {e.message}", file=sys.stderr)
        return EXIT_LIMIT
    except canalyzing_fq.CanalyzingError as e:
        print(f"canalyzing: {type(e).__name__}: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    except (FileExistsError, ValueError) as e:
        print(f"canalyzing: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
