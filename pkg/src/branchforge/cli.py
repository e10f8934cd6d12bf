"""Command-line interface: ``branchforge analyze|reduce|equiv|selftest``.

Exit codes: 0 success (or "equivalent"), 1 "not equivalent", 2 malformed or
unsupported input, 3 an internal contract was violated, 4 a self-test
property failed.  Set ``BRANCHFORGE_LOG`` (``debug``, ``info``, ...) for
diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from .branch import PuiseuxBranch, semigroup
from .contacts import lambda_set
from .errors import ContractViolation, InputError, TruncationInsufficient
from .normalform import equivalent, reduce, truncate_at_conductor
from .report import (
    BranchDocument,
    Report,
    equivalence_to_dict,
    invariants_to_dict,
    normal_form_to_dict,
    parse_json,
    step_to_dict,
    validate,
)
from .selftest import SUITES, run_selftest

log = logging.getLogger("branchforge")

EXIT_OK = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_INPUT = 2
EXIT_CONTRACT = 3
EXIT_SELFTEST = 4


def _configure_logging() -> None:
    level = os.environ.get("BRANCHFORGE_LOG")
    if not level:
        return
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _read_text(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load_branch(doc: BranchDocument, args) -> tuple[PuiseuxBranch, dict]:
    """Preprocess a document; returns the branch and a preprocessing summary."""
    pre, g = doc.preprocess(args.truncation, args.reparametrize)
    b = pre.branch
    summary = {
        "substitution": [[k, str(c)] for k, c in sorted(pre.substitution.items())],
        "scale": str(pre.scale),
        "reparametrized_by": g,
        "truncation": b.truncation,
    }
    return b, summary


def _certified(b: PuiseuxBranch) -> PuiseuxBranch:
    """Make the branch exact up to ``c + n``, dropping terms from the conductor on if needed."""
    S = semigroup(b)
    c = S.conductor
    if b.truncation >= c + b.n:
        return b
    if b.truncation < c - 1:
        raise TruncationInsufficient(
            f"truncation {b.truncation} is below c - 1 = {c - 1}; the invariants are not determined"
        )
    return truncate_at_conductor(b, S)


def cmd_analyze(args) -> tuple[Report, int]:
    doc = BranchDocument.from_json(_read_text(args.input))
    b, pre = _load_branch(doc, args)
    b = _certified(b)
    S = semigroup(b)
    lam = lambda_set(b, S)
    report = Report("analyze", input=doc.to_dict(), preprocessing=pre, invariants=invariants_to_dict(b, S, lam))
    return report, EXIT_OK


def cmd_reduce(args) -> tuple[Report, int]:
    doc = BranchDocument.from_json(_read_text(args.input))
    b, pre = _load_branch(doc, args)
    nf = reduce(_certified(b))
    report = Report(
        "reduce",
        input=doc.to_dict(),
        preprocessing=pre,
        invariants=invariants_to_dict(nf.to_branch(), nf.semigroup, nf.lambda_data),
        normal_form=normal_form_to_dict(nf),
        audit=[step_to_dict(step) for step in nf.audit],
    )
    return report, EXIT_OK


def _pair_documents(args) -> tuple[BranchDocument, BranchDocument]:
    if args.documents:
        if len(args.documents) != 2:
            raise InputError("equiv takes exactly two document files (or one pair document via --input)")
        return tuple(BranchDocument.from_json(_read_text(p)) for p in args.documents)
    pair = parse_json(_read_text(args.input))
    validate(pair, "pair_document")
    return BranchDocument.from_dict(pair["a"], "a/"), BranchDocument.from_dict(pair["b"], "b/")


def cmd_equiv(args) -> tuple[Report, int]:
    doc_a, doc_b = _pair_documents(args)
    nfs = []
    for doc in (doc_a, doc_b):
        b, _ = _load_branch(doc, args)
        nfs.append(reduce(_certified(b)))
    verdict = equivalent(*nfs)
    report = Report(
        "equiv",
        input={"a": doc_a.to_dict(), "b": doc_b.to_dict()},
        normal_form={"a": normal_form_to_dict(nfs[0]), "b": normal_form_to_dict(nfs[1])},
        equivalence=equivalence_to_dict(verdict),
    )
    return report, EXIT_OK if verdict else EXIT_NOT_EQUIVALENT


def cmd_selftest(args) -> tuple[Report, int]:
    summary = run_selftest(
        args.seed,
        args.count,
        jobs=args.jobs,
        max_conductor=args.max_conductor,
        inject_fault=args.inject_fault,
        suites=args.suite,
    )
    for entry in summary["properties"]:
        status = "PASS" if entry["passed"] else "FAIL"
        print(f"{status} {entry['property']} ({entry['instances']} instances)", file=sys.stderr)
        for failure in entry["failures"]:
            print(
                f"  seed={failure['seed']} suite={failure['suite']} instance={failure['instance']}: {failure['message']}",
                file=sys.stderr,
            )
    return Report("selftest", selftest=summary), EXIT_OK if summary["passed"] else EXIT_SELFTEST


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="branchforge",
        description="Invariants, normal forms and analytic equivalence of plane curve branches.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the report here instead of stdout")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    common.set_defaults(pretty=False)
    common.add_argument("--no-timing", action="store_true", help="omit the timing section")

    branch_opts = argparse.ArgumentParser(add_help=False)
    branch_opts.add_argument("--truncation", type=int, help="override the document truncation N")
    branch_opts.add_argument(
        "--reparametrize",
        action="store_true",
        help="accept a non-primitive parametrization by dividing all exponents by their gcd",
    )

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common, branch_opts], help="semigroup, conductor, Lambda and lambda")
    p.add_argument("-i", "--input", help="branch document (default: stdin)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("reduce", parents=[common, branch_opts], help="normal form with the elimination audit")
    p.add_argument("-i", "--input", help="branch document (default: stdin)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("equiv", parents=[common, branch_opts], help="decide analytic equivalence of two branches")
    p.add_argument("documents", nargs="*", help="two branch documents")
    p.add_argument("-i", "--input", help="pair document {\"a\": ..., \"b\": ...} (default: stdin)")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("selftest", parents=[common], help="run the seeded property suites")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=10, help="instances per suite")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--max-conductor", type=int, default=60, help="conductor bound for random branches")
    p.add_argument("--suite", action="append", choices=sorted(SUITES), help="run only these suites")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return parser


def _emit(report: Report, args) -> None:
    text = report.to_json(pretty=args.pretty)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        report, code = args.func(args)
    except InputError as exc:
        report, code = Report(args.command, error={"type": type(exc).__name__, "message": str(exc)}), EXIT_INPUT
        print(f"branchforge: {type(exc).__name__}: {exc}", file=sys.stderr)
    except ContractViolation as exc:
        report, code = Report(args.command, error={"type": type(exc).__name__, "message": str(exc)}), EXIT_CONTRACT
        print(f"branchforge: internal invariant failed ({type(exc).__name__}): {exc}", file=sys.stderr)
    if not args.no_timing:
        report.timing = {"seconds": round(time.perf_counter() - start, 6)}
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
