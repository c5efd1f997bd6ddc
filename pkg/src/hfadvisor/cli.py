"""Command-line front door.

    hfadvisor solve     --kb kb/ --query "recommendation(T, C)."
    hfadvisor recommend --kb kb/ --patient patient.json
    hfadvisor abduce    --kb kb/ --facts scenario.lp --query "..."
    hfadvisor check-kb  --kb kb/

Exit codes: 0 with at least one answer, 1 for a clean run with none,
2 for usage, parse, or I/O errors (reported on stderr, never a traceback).
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal
from pathlib import Path
from typing import List, Optional

from .abduction import abduce
from .chf import (
    KbError,
    PatientValidationError,
    VocabularyError,
    default_kb_paths,
    load_kb,
    patient_to_facts,
    recommend,
    record_from_dict,
)
from .grounder import GroundError, ground_program
from .model import Program, merge_programs
from .parser import ParseError, parse_program, parse_query
from .patterns import MalformedPattern
from .solver import (
    EngineOptions,
    PartialAnswerSet,
    QueryError,
    ResourceLimit,
    render_literal_set,
    solve,
)


class CliError(Exception):
    pass


def _build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="hfadvisor", description=__doc__.split("\n")[0])
    sub = top.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--kb", action="append", default=None, metavar="PATH",
                       help="KB file or directory of .lp files (default: bundled KB)")
        p.add_argument("--limit", type=int, default=10)
        p.add_argument("--format", choices=("text", "json-lines"), default="text")
        p.add_argument("--step-budget", type=int, default=EngineOptions.step_budget)

    p_solve = sub.add_parser("solve", help="answer a query against the KB")
    common(p_solve)
    p_solve.add_argument("--facts", metavar="PATH", help="extra .lp facts file")
    p_solve.add_argument("--query", required=True)

    p_rec = sub.add_parser("recommend", help="treatment recommendations for a patient")
    common(p_rec)
    p_rec.add_argument("--patient", required=True, metavar="PATH",
                       help="patient document (JSON)")

    p_abd = sub.add_parser("abduce", help="abductive what-if answer for a query")
    common(p_abd)
    p_abd.add_argument("--facts", metavar="PATH", help="extra .lp facts file")
    p_abd.add_argument("--query", required=True)

    p_chk = sub.add_parser("check-kb", help="parse, expand and ground the KB")
    common(p_chk)
    return top


def _load_program(args, extra_facts: Optional[str]) -> Program:
    paths = args.kb if args.kb else default_kb_paths()
    program = load_kb(paths)
    if extra_facts:
        path = Path(extra_facts)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise CliError("cannot read %s: %s" % (path, exc.strerror or exc))
        try:
            extra = parse_program(text)
        except ParseError as exc:
            raise CliError("%s: %s" % (path, exc))
        program = merge_programs([extra, program])
    return program


def _load_patient(path_text: str):
    path = Path(path_text)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError("cannot read %s: %s" % (path, exc.strerror or exc))
    try:
        doc = json.loads(raw, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise CliError("%s: invalid JSON: %s" % (path, exc))
    if not isinstance(doc, dict):
        raise CliError("%s: patient document must be a JSON object" % path)
    return record_from_dict(doc)


def _bindings_dict(answer: PartialAnswerSet) -> dict:
    return {name: str(term) for name, term in answer.bindings}


def _answer_record(answer: PartialAnswerSet, assumptions=None) -> dict:
    record = {
        "bindings": _bindings_dict(answer),
        "positive": [str(l) for l in answer.positive_sorted()],
        "nafs": [str(l) for l in answer.nafs_sorted()],
        "assumptions": assumptions or {"positive": [], "negative": []},
    }
    return record


def _print_text_answer(out, answer: PartialAnswerSet, trailer_lines: List[str]) -> None:
    out.write(render_literal_set(answer) + "\n")
    for line in trailer_lines:
        out.write(line + "\n")
    out.write("\n")


def _run_solve(args, out) -> int:
    program = _load_program(args, getattr(args, "facts", None))
    ground = ground_program(program)
    query = parse_query(args.query)
    options = EngineOptions(step_budget=args.step_budget)
    count = 0
    for answer in solve(ground, query, limit=args.limit, options=options):
        count += 1
        if args.format == "json-lines":
            out.write(json.dumps(_answer_record(answer)) + "\n")
        else:
            trailer = ["%s = %s," % (n, v) for n, v in answer.bindings]
            if trailer:
                trailer[-1] = trailer[-1].rstrip(",")
            _print_text_answer(out, answer, trailer)
    return 0 if count else 1


def _run_recommend(args, out) -> int:
    record = _load_patient(args.patient)
    kb = load_kb(args.kb if args.kb else default_kb_paths())
    options = EngineOptions(step_budget=args.step_budget)
    results = recommend(record, kb, limit=args.limit, options=options)
    for result in results:
        if args.format == "json-lines":
            doc = _answer_record(result.support)
            doc["treatment"] = result.treatment
            doc["class"] = result.class_label
            out.write(json.dumps(doc) + "\n")
        else:
            _print_text_answer(
                out,
                result.support,
                ["Treatment = %s," % result.treatment, "Class = %s" % result.class_label],
            )
    return 0 if results else 1


def _run_abduce(args, out) -> int:
    program = _load_program(args, getattr(args, "facts", None))
    query = parse_query(args.query)
    options = EngineOptions(step_budget=args.step_budget)
    count = 0
    for result in abduce(program, query, limit=args.limit, options=options):
        count += 1
        assumptions = {
            "positive": [str(l) for l in result.assumed_true_sorted()],
            "negative": [str(l) for l in result.assumed_false_sorted()],
        }
        if args.format == "json-lines":
            out.write(json.dumps(_answer_record(result.answer, assumptions)) + "\n")
        else:
            trailer = ["%s = %s," % (n, v) for n, v in result.answer.bindings]
            if trailer:
                trailer[-1] = trailer[-1].rstrip(",")
            trailer.append("Assumptions:")
            for l in result.assumed_true_sorted():
                trailer.append("  %s" % l)
            for l in result.assumed_false_sorted():
                trailer.append("  not %s" % l)
            if not result.assumed_true and not result.assumed_false:
                trailer.append("  (none)")
            _print_text_answer(out, result.answer, trailer)
    return 0 if count else 1


def _run_check_kb(args, out) -> int:
    paths = args.kb if args.kb else default_kb_paths()
    kb = load_kb(paths)
    ground = ground_program(kb)
    out.write("rules: %d\n" % len(kb.rules))
    out.write("pattern declarations: %d\n" % len(kb.pattern_decls))
    out.write("abducibles: %d\n" % len(kb.abducibles))
    out.write("ground rules: %d\n" % len(ground.rules))
    out.write("ground literals: %d\n" % len(ground.atom_universe))
    for warning in ground.warnings:
        out.write("warning: %s\n" % warning)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize other codes
        return 2 if exc.code not in (0,) else 0
    out = sys.stdout
    try:
        if args.command == "solve":
            return _run_solve(args, out)
        if args.command == "recommend":
            return _run_recommend(args, out)
        if args.command == "abduce":
            return _run_abduce(args, out)
        return _run_check_kb(args, out)
    except (
        CliError,
        KbError,
        ParseError,
        MalformedPattern,
        GroundError,
        QueryError,
        ResourceLimit,
        VocabularyError,
        PatientValidationError,
    ) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
