"""Acceptance gate: one test per criterion, each printing a PASS line with
its runtime (run with `pytest tests/test_acceptance.py -s` to see them).

Budgets are asserted where the criterion states one.
"""

import itertools
import json
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

import test_patterns as golden
from _generators import random_ast_program, random_ground_program
from hfadvisor.chf import (
    PatientRecord,
    load_kb,
    patient_to_facts,
    recommend,
)
from hfadvisor.grounder import ground_program
from hfadvisor.model import Program, fact, lit, merge_programs
from hfadvisor.abduction import abduce
from hfadvisor.parser import parse_program, parse_query, print_program
from hfadvisor.patterns import expand_declarations
from hfadvisor.solver import enumerate_stable_models_bruteforce, solve

REPO_ROOT = Path(__file__).resolve().parent.parent


def _report(name, started):
    print("ACCEPTANCE %s: PASS (%.1fs)" % (name, time.monotonic() - started))


def test_oracle_equivalence_on_random_corpus():
    started = time.monotonic()
    rng = random.Random(20130913)
    for _ in range(500):
        program, atoms = random_ground_program(
            rng, max_atoms=12, max_rules=20, naf_p=0.5, constraint_p=0.1
        )
        ground = ground_program(program)
        models = [m.atoms for m in enumerate_stable_models_bruteforce(ground)]
        target = lit(rng.choice(atoms))
        answers = list(solve(ground, parse_query("?- %s." % target)))

        models_with = [m for m in models if target in m]
        assert bool(answers) == bool(models_with)
        for answer in answers:
            answer.check_invariants()
            assert any(answer.positive <= m and not (answer.nafs & m) for m in models)
        for m in models_with:
            assert any(
                answer.positive <= m and not (answer.nafs & m) for answer in answers
            )
    elapsed = time.monotonic() - started
    assert elapsed < 60, "oracle equivalence took %.1fs" % elapsed
    _report("oracle equivalence (500 programs, 100%)", started)


def test_case_study_reproduction_via_cli():
    started = time.monotonic()
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "hfadvisor.cli",
            "recommend",
            "--patient",
            str(REPO_ROOT / "data" / "case_study_patient.json"),
            "--format",
            "json-lines",
        ],
        capture_output=True,
        text=True,
        cwd=REPO_ROOT,
    )
    assert proc.returncode == 0, proc.stderr
    answers = {
        (r["treatment"], r["class"]): r
        for r in map(json.loads, proc.stdout.splitlines())
    }

    sodium = answers[("sodium_restriction", "class_2a")]
    assert set(sodium["positive"]) == {
        "accf_stage(c)",
        "recommendation(sodium_restriction, class_2a)",
    }
    assert set(sodium["nafs"]) == {"contraindication(sodium_restriction)"}

    ace = answers[("ace_inhibitors", "class_1")]
    support = set(ace["positive"]) | {"not %s" % n for n in ace["nafs"]}
    for required in (
        "recommendation(beta_blockers, class_1)",
        "recommendation(diuretics, class_1)",
        "not history(angioedema, recent)",
        "not history(angioedema, remote)",
        "not pregnancy",
    ):
        assert required in support, required

    elapsed = time.monotonic() - started
    assert elapsed < 5, "case-study reproduction took %.1fs" % elapsed
    _report("case-study recommendation reproduction (CLI)", started)


def test_abductive_scenario_reproduction(kb):
    started = time.monotonic()
    scenario = parse_program(
        "accf_stage(c). hf_with_reduced_ef. nyha_class(3). race(african_american).\n"
        "#abducible history/1.\n#abducible contraindication/1.\n"
    )
    program = merge_programs([scenario, kb])
    query = parse_query("?- recommendation(hydralazine_and_isosorbide_dinitrate, class_1).")
    results = list(abduce(program, query, limit=5))
    assert results
    answer = results[0].answer
    assert lit("history", "standard_neurohormonal_antagonist_therapy") in answer.positive
    assert lit("nyha_class_3_to_4") in answer.positive
    assert lit("contraindication", "hydralazine_and_isosorbide_dinitrate") in answer.nafs
    elapsed = time.monotonic() - started
    assert elapsed < 5, "abductive reproduction took %.1fs" % elapsed
    _report("abductive what-if reproduction", started)


def test_cascade_scenario(kb):
    started = time.monotonic()
    bb = lit("recommendation", "beta_blockers", "class_1")
    diu = lit("recommendation", "diuretics", "class_1")

    plain = PatientRecord(stage="c", hf_with_reduced_ef=True)
    results = recommend(plain, kb)
    assert any(r.treatment == "beta_blockers" for r in results)

    wet = PatientRecord(stage="c", hf_with_reduced_ef=True, evidences=("fluid_retention",))
    results = recommend(wet, kb, limit=None)
    assert any(r.treatment == "beta_blockers" for r in results)
    for r in results:
        if bb in r.support.positive:
            assert diu in r.support.positive

    blocked_kb = kb.extended(rules=(fact("contraindication", "diuretics"),))
    results = recommend(wet, blocked_kb, limit=None)
    assert results, "other treatments must survive"
    for r in results:
        assert r.treatment != "beta_blockers"
        assert bb not in r.support.positive
    _report("guideline cascade scenario", started)


def test_pattern_golden_suite():
    started = time.monotonic()
    g = golden.TestGoldenExpansions()
    g.test_aggressive_matches_reference()
    g.test_conservative_matches_reference()
    g.test_anti_matches_reference()
    g.test_prefer_matches_reference()
    g.test_concomitant_group_matches_reference()
    g.test_indispensable_group_contains_reference()
    g.test_incompatible_group_contains_reference()
    b = golden.TestBehavioralProperties()
    b.test_aggressive_blocking()
    b.test_conservative_requires_absence_evidence()
    b.test_concomitant_coupling()
    b.test_indispensable_revocation()
    b.test_incompatible_choices_never_all_hold()
    _report("pattern golden suite + behavioral properties", started)


def _fuzzed_record(rng):
    kwargs = {}
    if rng.random() < 0.9:
        kwargs["stage"] = rng.choice("abcd")
    if rng.random() < 0.8:
        kwargs["hf_with_reduced_ef"] = rng.random() < 0.8
    if rng.random() < 0.5:
        kwargs["nyha_class"] = rng.randint(1, 4)
    if rng.random() < 0.5:
        kwargs["lvef"] = rng.choice(("0.25", "0.35", "0.40", "0.55"))
    if rng.random() < 0.4:
        kwargs["post_mi_days"] = rng.randint(0, 400)
    if rng.random() < 0.3:
        kwargs["race"] = rng.choice(("african_american", "white"))
    if rng.random() < 0.3:
        kwargs["pregnancy"] = rng.random() < 0.5
    diagnoses = []
    for symbol in ("diabetes", "atrial_fibrillation", "structural_cardiac_abnormalities"):
        if rng.random() < 0.3:
            diagnoses.append(symbol)
    if diagnoses:
        kwargs["diagnoses"] = tuple(diagnoses)
    evidences = []
    for symbol in ("fluid_retention", "atrioventricular_block", "sleep_apnea"):
        if rng.random() < 0.3:
            evidences.append(symbol)
    if evidences:
        kwargs["evidences"] = tuple(evidences)
    histories = []
    for condition in ("mi", "acs", "angioedema", "thromboembolism"):
        if rng.random() < 0.25:
            histories.append((condition, rng.choice(("recent", "remote", "unspecified"))))
    if histories:
        kwargs["histories"] = tuple(histories)
    if isinstance(kwargs.get("lvef"), str):
        from decimal import Decimal

        kwargs["lvef"] = Decimal(kwargs["lvef"])
    return PatientRecord(**kwargs)


def test_incompatible_triple_never_co_recommended(kb):
    started = time.monotonic()
    rng = random.Random(8086)
    triple = {
        lit("recommendation", "ace_inhibitors", "class_1"),
        lit("recommendation", "arbs", "class_1"),
        lit("recommendation", "aldosterone_antagonist", "class_1"),
    }
    from hfadvisor.chf import RECOMMENDATION_QUERY

    for _ in range(200):
        record = _fuzzed_record(rng)
        program = kb.extended(rules=tuple(patient_to_facts(record)))
        ground = ground_program(program)
        for answer in solve(ground, RECOMMENDATION_QUERY, limit=None):
            assert not triple <= answer.positive, "triple co-recommended: %s" % (
                sorted(map(str, answer.positive)),
            )
    _report("incompatible-triple property (200 fuzzed records)", started)


def test_robustness_field_subset_ablations(kb, case_study_record):
    started = time.monotonic()
    field_names = (
        "stage",
        "nyha_class",
        "hf_with_reduced_ef",
        "lvef",
        "creatinine",
        "sinus_rhythm",
        "diagnoses",
        "evidences",
        "histories",
        "post_mi_days",
    )
    runs = 0
    for mask in itertools.product((False, True), repeat=len(field_names)):
        kwargs = {
            name: getattr(case_study_record, name)
            for name, keep in zip(field_names, mask)
            if keep
        }
        record = PatientRecord(**kwargs)
        recommend(record, kb, limit=5)
        runs += 1
    assert runs == 1024
    elapsed = time.monotonic() - started
    assert elapsed < 120, "ablation robustness took %.1fs" % elapsed
    _report("robustness over 1024 field ablations", started)


def test_parser_round_trip_kb_and_random_asts():
    started = time.monotonic()
    from hfadvisor.chf import default_kb_paths

    for path in default_kb_paths():
        program = parse_program(path.read_text(encoding="utf-8"))
        assert parse_program(print_program(program)) == program

    mismatches = 0
    for seed in range(1000):
        program = random_ast_program(random.Random(seed))
        if parse_program(print_program(program)) != program:
            mismatches += 1
    assert mismatches == 0
    _report("parser round-trip (KB files + 1000 random ASTs)", started)
