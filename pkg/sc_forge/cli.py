"""Command-line entry point: `python -m sc_forge <subcommand> ...`.

Exit status: 0 on PASS/OK, 1 on FAIL (report still written), 2 on input
errors, 3 on internal errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from sc_forge.config import configure_logging, get_settings
from sc_forge.errors import InputError, PresentationFormatError, ScForgeError
from sc_forge.pieces import FAIL
from sc_forge.reports import Report
from sc_forge import service

logger = logging.getLogger(__name__)


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", help="write the JSON report here instead of stdout")
    common.add_argument("--ledger", action="store_true", help="record the run in the run ledger")
    common.add_argument("--seed", type=int, help="seed echoed into the report")
    common.add_argument("--log-level", help="overrides SC_FORGE_LOG_LEVEL")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sc-forge", description="Computational small-cancellation toolkit")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    common = [_common()]

    pieces = subparsers.add_parser("pieces", parents=common, help="maximal pieces of every relator")
    pieces.add_argument("presentation")
    pieces.add_argument("--full", action="store_true", help="list the longest piece at every element of R̄")

    check = subparsers.add_parser("check-sc", parents=common, help="grade C'(λ) or C'(1/f)")
    check.add_argument("presentation")
    bound = check.add_mutually_exclusive_group(required=True)
    bound.add_argument("--lambda", dest="lam", help="rational λ, e.g. 1/6")
    bound.add_argument("--f", help="viable function spec, e.g. sqrt:min=6")

    wp = subparsers.add_parser("wp", parents=common, help="Dehn reduction of a word")
    wp.add_argument("presentation")
    wp.add_argument("--word", required=True)
    wp.add_argument("--oracle", action="store_true", help="cross-check with the breadth-first identity oracle")
    wp.add_argument("--radius", type=int)
    wp.add_argument("--cap", type=int)

    rho = subparsers.add_parser("rho", parents=common, help="intersection function of a path")
    rho.add_argument("presentation")
    rho.add_argument("--path", required=True, help="letters, or periodic:<letters>")
    rho.add_argument("--tmax", type=int, required=True)

    witness = subparsers.add_parser("ipsc-witness", parents=common, help="check one IPSC witness")
    witness.add_argument("presentation")
    witness.add_argument("witness", help="JSON: relator, split, i, n_i, f")

    decomp = subparsers.add_parser("ipsc-decomp", parents=common, help="check a combination decomposition")
    decomp.add_argument("presentation")
    decomp.add_argument("decomposition", help="JSON: relator, parts [{u, r, v}], N, B, rho")

    nprime = subparsers.add_parser("ipsc-nprime", parents=common, help="derive the n' threshold sequence")
    nprime.add_argument("--rho", required=True)
    nprime.add_argument("--N", dest="N", type=int, required=True)
    nprime.add_argument("--B", dest="B", type=int, required=True)
    nprime.add_argument("--n", required=True, help="comma-separated nondecreasing sequence")
    nprime.add_argument("--count", type=int, required=True)

    construct = subparsers.add_parser("construct", parents=common, help="synthesize and verify G'")
    construct.add_argument("base")
    construct.add_argument("--params", default="N=36,M=36,U=36,L=1152")
    construct.add_argument("--f", default="sqrt")
    construct.add_argument("--g")
    construct.add_argument("--max-base-len", type=int, required=True)
    construct.add_argument("--find-min-V", dest="find_min_v", action="store_true")
    construct.add_argument("--desk", action="store_true", help="allow parameters below the 36 floor")
    construct.add_argument("--tmax", type=int, help="Morse path horizon (default 2·max-base-len)")
    construct.add_argument("-o", "--output", help="write G' here")

    delta = subparsers.add_parser("delta", parents=common, help="four-point hyperbolicity constant of a graph")
    delta.add_argument("graph")

    subsegment = subparsers.add_parser("subsegment", parents=common, help="short subsegment of an embedded cycle")
    subsegment.add_argument("graph")
    subsegment.add_argument("cycle")
    subsegment.add_argument("--u", type=int, required=True)
    subsegment.add_argument("--g", required=True)
    subsegment.add_argument("--oracle", action="store_true")
    subsegment.add_argument("--delta", help="use this δ instead of computing it")
    subsegment.add_argument("--subdivide", type=int, default=1)
    return parser


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _read_json(path: str) -> dict[str, Any]:
    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise PresentationFormatError(exc.msg, exc.lineno, exc.colno, path) from exc
    if not isinstance(data, dict):
        raise PresentationFormatError("expected a JSON object", 1, 1, path)
    return data


def _parse_sequence(text: str) -> list[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise InputError(f"--n must be a comma-separated list of integers: {exc}") from exc


def collect(args: argparse.Namespace) -> tuple[dict[str, str], dict[str, str], dict[str, Any]]:
    """Source texts, source paths and parameter dict of the parsed command line"""
    command = service.SUBCOMMANDS[args.subcommand]
    inputs = {role: getattr(args, role) for role in command.sources}
    sources = {role: _read(path) for role, path in inputs.items()}
    name = args.subcommand
    if name == "pieces":
        params: dict[str, Any] = {"full": args.full}
    elif name == "check-sc":
        params = {"lambda": args.lam} if args.lam is not None else {"f": args.f}
    elif name == "wp":
        params = {"word": args.word, "oracle": args.oracle, "radius": args.radius, "cap": args.cap}
    elif name == "rho":
        params = {"path": args.path, "tmax": args.tmax}
    elif name == "ipsc-witness":
        inputs["witness"] = args.witness
        params = _read_json(args.witness)
    elif name == "ipsc-decomp":
        inputs["decomposition"] = args.decomposition
        params = _read_json(args.decomposition)
    elif name == "ipsc-nprime":
        params = {"rho": args.rho, "N": args.N, "B": args.B, "n": _parse_sequence(args.n), "count": args.count}
    elif name == "construct":
        params = {
            "params": args.params,
            "f": args.f,
            "g": args.g,
            "max_base_len": args.max_base_len,
            "find_min_v": args.find_min_v,
            "strict": not args.desk,
            "tmax": args.tmax,
        }
    elif name == "delta":
        params = {}
    else:
        params = {
            "u": args.u,
            "g": args.g,
            "oracle": args.oracle,
            "delta": args.delta,
            "subdivide": args.subdivide,
        }
    return sources, inputs, {key: value for key, value in params.items() if value is not None}


def _record(report: Report) -> int:
    from ledger.database import SessionLocal, create_tables, record_run

    create_tables()
    db = SessionLocal()
    try:
        return record_run(db, report).id
    finally:
        db.close()


def dispatch(args: argparse.Namespace) -> int:
    try:
        sources, inputs, params = collect(args)
        report = service.run(
            args.subcommand,
            sources,
            params,
            inputs=inputs,
            output=getattr(args, "output", None),
            report_path=args.report,
            seed=args.seed,
        )
    except ScForgeError as exc:
        logger.debug("run failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code

    text = report.to_json()
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    output = getattr(args, "output", None)
    if output and "presentation" in report.result:
        Path(output).write_text(report.result["presentation"], encoding="utf-8")
    if args.ledger:
        run_id = _record(report)
        logger.info("recorded run %d", run_id)
    return 1 if report.verdict == FAIL else 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configure_logging(args.log_level or get_settings().log_level)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
