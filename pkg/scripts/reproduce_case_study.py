#!/usr/bin/env python3
"""End-to-end walkthrough on the bundled case-study patient.

Prints the treatment recommendations with their supporting partial answer
sets, then runs the what-if scenario (an African American NYHA-III HFrEF
patient with nothing else known) and shows what the engine abduces.
"""

import json
import sys
import time
from decimal import Decimal
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))

from hfadvisor.abduction import abduce
from hfadvisor.chf import default_kb_paths, load_kb, recommend, record_from_dict
from hfadvisor.model import merge_programs
from hfadvisor.parser import parse_program, parse_query
from hfadvisor.solver import render_literal_set


def main() -> int:
    kb = load_kb(default_kb_paths())
    doc = json.loads(
        (REPO_ROOT / "data" / "case_study_patient.json").read_text(),
        parse_float=Decimal,
    )
    record = record_from_dict(doc)

    print("== recommendations for the case-study patient ==")
    started = time.monotonic()
    for result in recommend(record, kb, limit=10):
        print()
        print("Treatment = %s, Class = %s" % (result.treatment, result.class_label))
        print(render_literal_set(result.support))
    print("\n(%.2fs)" % (time.monotonic() - started))

    print("\n== what-if: hydralazine and isosorbide dinitrate ==")
    scenario = parse_program((REPO_ROOT / "data" / "whatif_scenario.lp").read_text())
    program = merge_programs([scenario, kb])
    query = parse_query(
        "?- recommendation(hydralazine_and_isosorbide_dinitrate, class_1)."
    )
    for result in abduce(program, query, limit=3):
        print()
        print(render_literal_set(result.answer))
        for literal in result.assumed_true_sorted():
            print("  would require: %s" % literal)
        for literal in result.assumed_false_sorted():
            print("  would require absence of: %s" % literal)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
