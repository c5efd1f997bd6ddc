"""Chronic-heart-failure domain layer: input vocabulary, patient records,
knowledge-base loading, and the recommendation query.

A patient record is an open-world document: every field is optional, absent
fields emit no facts, boolean fields set to an explicit false emit the
classically negated fact (conservative rules need explicit absence
evidence), and true booleans emit the plain fact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields as dataclass_fields
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from . import patterns
from .grounder import ground_program
from .model import (
    Atom,
    BodyLiteral,
    Literal,
    Program,
    Rule,
    Variable,
    fact,
    lit,
    merge_programs,
)
from .parser import ParseError, Query, parse_program
from .solver import EngineOptions, PartialAnswerSet, solve

RECENCIES = ("recent", "remote", "unspecified")
STAGES = ("a", "b", "c", "d")
NYHA_CLASSES = (1, 2, 3, 4)

_SYMBOL_RE = re.compile(r"^[a-z][a-z0-9_]*$")

DISEASES_AND_SYMPTOMS = (
    "sleep_apnea",
    "acute_coronary_syndrome",
    "myocardial_infarction",
    "obesity",
    "diabetes",
    "stroke",
    "fluid_retention",
    "angioedema",
    "ischemic_attack",
    "thromboembolism",
    "elevated_plasma_natriuretic_peptide_level",
    "asymptomatic_ischemic_cardiomyopathy",
    "lipid_disorders",
    "hypertension",
    "atrial_fibrillation",
    "myocardial_ischemia",
    "coronary_artery_disease",
    "dilated_cardiomyopathy",
    "acute_profound_hemodynamic_compromise",
    "threatened_end_organ_dysfunction",
    "ischemic_heart_disease",
    "angina",
    "structural_cardiac_abnormalities",
    "atrioventricular_block",
    "volume_overload",
)

# Short forms used by the rule base plus history-only conditions.
EXTRA_CONDITION_SYMBOLS = (
    "mi",
    "acs",
    "af",
    "cardiovascular_hospitalization",
    "standard_neurohormonal_antagonist_therapy",
)

CONDITION_SYMBOLS = DISEASES_AND_SYMPTOMS + EXTRA_CONDITION_SYMBOLS

PHARMACEUTICAL_TREATMENTS = (
    "ace_inhibitors",
    "arbs",
    "beta_blockers",
    "statin",
    "diuretics",
    "aldosterone_antagonist",
    "hydralazine_and_isosorbide_dinitrate",
    "digoxin",
    "anticoagulation",
    "omega_3_fatty_acids",
    "inotropes",
)

MANAGEMENT_OBJECTIVES = (
    "systolic_blood_pressure_control",
    "diastolic_blood_pressure_control",
    # The stage-B rule base recommends the combined objective directly.
    "blood_pressure_control",
    "obesity_control",
    "diabetes_control",
    "tobacco_avoidance",
    "cardiotoxic_agents_avoidance",
    "atrial_fibrillation_control",
    "water_restriction",
    "sodium_restriction",
)

DEVICE_THERAPIES = (
    "implantable_cardioverter_defibrillator",
    "cardiac_resynchronization_therapy",
    "mechanical_circulatory_support",
    "coronary_revascularization",
)

TREATMENTS = PHARMACEUTICAL_TREATMENTS + MANAGEMENT_OBJECTIVES + DEVICE_THERAPIES

CLASS_LABELS = ("class_1", "class_2a", "class_2b")

BOOLEAN_FLAGS = (
    "hf_with_reduced_ef",
    "pregnancy",
    "cardioembolic_source",
    "eligible_for_significant_ventricular_pacing",
    "eligible_for_mechanical_circulatory_support",
    "dependent_on_continuous_parenteral_inotropes",
    "ischemic_etiology_of_hf",
    "requires_ventricular_pacing",
)

FACT_PREDICATES = frozenset(
    [
        ("accf_stage", 1),
        ("nyha_class", 1),
        ("gender", 1),
        ("age", 1),
        ("race", 1),
        ("expectation_of_survival", 1),
        ("measurement", 2),
        ("measurement", 1),
        ("diagnosis", 1),
        ("evidence", 1),
        ("history", 1),
        ("history", 2),
        ("post_mi", 1),
    ]
    + [(flag, 0) for flag in BOOLEAN_FLAGS]
)

DERIVED_PREDICATES = frozenset(
    [
        ("recommendation", 2),
        ("contraindication", 1),
        ("taboo_choice", 1),
        ("skip_concomitant_choice", 1),
        ("absent_indispensable_choice", 1),
        ("reduced_ef", 1),
        ("history_of_mi_or_acs", 0),
        ("nyha_class_3_to_4", 0),
        ("current_or_recent_history_of_fluid_retention", 0),
    ]
)

# Abducibles used by what-if queries: every patient-fact predicate plus
# contraindications, so the engine may assume missing preconditions.
DEFAULT_WHATIF_ABDUCIBLES = tuple(sorted(FACT_PREDICATES)) + (("contraindication", 1),)

MEASUREMENT_FIELDS = (
    # (record field, measurement symbol, units)
    ("weight", "weight", "kg"),
    ("creatinine", "creatinine", "mg/dL"),
    ("potassium", "potassium", "mEq/L"),
    ("lvef", "lvef", "fraction of 1"),
    ("qrs_duration", "qrs_duration", "ms"),
    ("lbbb", "lbbb", "ms"),
)


class VocabularyError(Exception):
    """A symbol outside the CHF vocabulary."""


class PatientValidationError(Exception):
    def __init__(self, issues: Sequence[Tuple[str, str]]):
        self.issues = list(issues)
        super().__init__("; ".join("%s: %s" % (f, m) for f, m in self.issues))


@dataclass(frozen=True)
class PatientRecord:
    """Structured patient data. Everything optional; unknown means unknown."""

    gender: Optional[str] = None
    age: Optional[int] = None
    race: Optional[str] = None
    stage: Optional[str] = None
    nyha_class: Optional[int] = None
    weight: Optional[Decimal] = None
    creatinine: Optional[Decimal] = None
    potassium: Optional[Decimal] = None
    lvef: Optional[Decimal] = None
    qrs_duration: Optional[Decimal] = None
    lbbb: Optional[Decimal] = None
    sinus_rhythm: Optional[bool] = None
    diagnoses: Tuple[str, ...] = ()
    evidences: Tuple[str, ...] = ()
    histories: Tuple[Tuple[str, str], ...] = ()  # (condition, recency)
    denied_histories: Tuple[str, ...] = ()
    expectation_of_survival: Optional[Decimal] = None
    post_mi_days: Optional[int] = None
    hf_with_reduced_ef: Optional[bool] = None
    pregnancy: Optional[bool] = None
    cardioembolic_source: Optional[bool] = None
    eligible_for_significant_ventricular_pacing: Optional[bool] = None
    eligible_for_mechanical_circulatory_support: Optional[bool] = None
    dependent_on_continuous_parenteral_inotropes: Optional[bool] = None
    ischemic_etiology_of_hf: Optional[bool] = None
    requires_ventricular_pacing: Optional[bool] = None


_FIELD_NAMES = tuple(f.name for f in dataclass_fields(PatientRecord))


def _to_decimal(value) -> Decimal:
    if isinstance(value, Decimal):
        return value
    if isinstance(value, bool):
        raise InvalidOperation
    if isinstance(value, int):
        return Decimal(value)
    if isinstance(value, float):
        return Decimal(str(value))
    if isinstance(value, str):
        return Decimal(value)
    raise InvalidOperation


def record_from_dict(data: Dict) -> PatientRecord:
    """Builds a record from a flat document; unknown keys are rejected and
    all issues are reported together."""
    issues: List[Tuple[str, str]] = []
    kwargs: Dict = {}
    for key in data:
        if key not in _FIELD_NAMES:
            issues.append((key, "unknown field"))
    decimal_fields = {
        "weight", "creatinine", "potassium", "lvef", "qrs_duration", "lbbb",
        "expectation_of_survival",
    }
    int_fields = {"age", "nyha_class", "post_mi_days"}
    bool_fields = {"sinus_rhythm"} | set(BOOLEAN_FLAGS)
    for name in _FIELD_NAMES:
        if name not in data or data[name] is None:
            continue
        value = data[name]
        try:
            if name in decimal_fields:
                kwargs[name] = _to_decimal(value)
            elif name in int_fields:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ValueError
                kwargs[name] = value
            elif name in bool_fields:
                if not isinstance(value, bool):
                    raise ValueError
                kwargs[name] = value
            elif name in ("diagnoses", "evidences", "denied_histories"):
                kwargs[name] = tuple(str(v) for v in value)
            elif name == "histories":
                entries = []
                for entry in value:
                    if isinstance(entry, str):
                        entries.append((entry, "unspecified"))
                    elif isinstance(entry, dict):
                        entries.append(
                            (str(entry["condition"]), str(entry.get("recency", "unspecified")))
                        )
                    else:
                        condition, recency = entry
                        entries.append((str(condition), str(recency)))
                kwargs[name] = tuple(entries)
            else:
                kwargs[name] = str(value)
        except (ValueError, TypeError, KeyError, InvalidOperation):
            issues.append((name, "invalid value %r" % (value,)))
    if issues:
        raise PatientValidationError(issues)
    record = PatientRecord(**kwargs)
    errors, _ = validate_record(record)
    if errors:
        raise PatientValidationError(errors)
    return record


def record_to_dict(record: PatientRecord) -> Dict:
    out: Dict = {}
    for f in dataclass_fields(PatientRecord):
        value = getattr(record, f.name)
        if value is None or value == ():
            continue
        if isinstance(value, Decimal):
            out[f.name] = str(value)
        elif f.name == "histories":
            out[f.name] = [list(entry) for entry in value]
        elif isinstance(value, tuple):
            out[f.name] = list(value)
        else:
            out[f.name] = value
    return out


def validate_record(record: PatientRecord) -> Tuple[List[Tuple[str, str]], List[str]]:
    """Returns (errors, warnings). Errors block fact emission."""
    errors: List[Tuple[str, str]] = []
    warnings: List[str] = []

    def check_symbol(field_name: str, value: str, pool: Optional[Iterable[str]] = None):
        if not _SYMBOL_RE.match(value):
            errors.append((field_name, "%r is not a lowercase symbol" % value))
        elif pool is not None and value not in pool:
            errors.append((field_name, "%r is outside the CHF vocabulary" % value))

    if record.stage is not None and record.stage not in STAGES:
        errors.append(("stage", "must be one of %s" % (STAGES,)))
    if record.nyha_class is not None and record.nyha_class not in NYHA_CLASSES:
        errors.append(("nyha_class", "must be 1..4"))
    if record.age is not None and record.age < 0:
        errors.append(("age", "must be >= 0"))
    if record.lvef is not None and not (0 <= record.lvef <= 1):
        errors.append(("lvef", "must be within [0, 1]"))
    for name in ("weight", "creatinine", "potassium", "qrs_duration", "lbbb",
                 "expectation_of_survival"):
        value = getattr(record, name)
        if value is not None and value < 0:
            errors.append((name, "must be >= 0"))
    if record.post_mi_days is not None and record.post_mi_days < 0:
        errors.append(("post_mi_days", "must be >= 0"))
    if record.gender is not None:
        check_symbol("gender", record.gender)
    if record.race is not None:
        check_symbol("race", record.race)
    for value in record.diagnoses:
        check_symbol("diagnoses", value, CONDITION_SYMBOLS)
    for value in record.evidences:
        check_symbol("evidences", value, CONDITION_SYMBOLS)
    for condition, recency in record.histories:
        check_symbol("histories", condition, CONDITION_SYMBOLS)
        if recency not in RECENCIES:
            errors.append(("histories", "recency %r must be one of %s" % (recency, RECENCIES)))
    for value in record.denied_histories:
        check_symbol("denied_histories", value, CONDITION_SYMBOLS)

    if record.stage == "a" and record.nyha_class is not None:
        warnings.append("stage A patients carry no NYHA class; kept as given")
    return errors, warnings


def patient_to_facts(record: PatientRecord) -> List[Rule]:
    """Ground facts for a validated record; omitted fields emit nothing."""
    errors, _ = validate_record(record)
    vocab_errors = [
        (f, m) for f, m in errors if "vocabulary" in m or "symbol" in m
    ]
    if vocab_errors:
        raise VocabularyError("; ".join("%s: %s" % (f, m) for f, m in vocab_errors))
    if errors:
        raise PatientValidationError(errors)

    facts: List[Rule] = []
    if record.stage is not None:
        facts.append(fact("accf_stage", record.stage))
    if record.nyha_class is not None:
        facts.append(fact("nyha_class", record.nyha_class))
    if record.expectation_of_survival is not None:
        facts.append(fact("expectation_of_survival", record.expectation_of_survival))
    if record.gender is not None:
        facts.append(fact("gender", record.gender))
    if record.age is not None:
        facts.append(fact("age", record.age))
    if record.race is not None:
        facts.append(fact("race", record.race))
    for flag in BOOLEAN_FLAGS:
        value = getattr(record, flag)
        if value is True:
            facts.append(fact(flag))
        elif value is False:
            facts.append(fact(flag, strong_neg=True))
    for field_name, symbol, _units in MEASUREMENT_FIELDS:
        value = getattr(record, field_name)
        if value is not None:
            facts.append(fact("measurement", symbol, value))
    if record.sinus_rhythm is True:
        facts.append(fact("measurement", "sinus_rhythm"))
    elif record.sinus_rhythm is False:
        facts.append(fact("measurement", "sinus_rhythm", strong_neg=True))
    for value in record.diagnoses:
        facts.append(fact("diagnosis", value))
    for value in record.evidences:
        facts.append(fact("evidence", value))
    for condition, recency in record.histories:
        if recency == "unspecified":
            facts.append(fact("history", condition))
        else:
            facts.append(fact("history", condition, recency))
    for condition in record.denied_histories:
        facts.append(fact("history", condition, strong_neg=True))
    if record.post_mi_days is not None:
        facts.append(fact("post_mi", record.post_mi_days))
    return facts


# Knowledge-base loading.

class KbError(Exception):
    def __init__(self, path: str, cause: Exception):
        self.path = path
        self.cause = cause
        super().__init__("%s: %s" % (path, cause))


def kb_file_paths(paths: Sequence) -> List[Path]:
    """Expands files and directories (sorted *.lp) into a flat file list."""
    out: List[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            out.extend(sorted(p.glob("*.lp")))
        else:
            out.append(p)
    return out


def default_kb_paths() -> List[Path]:
    return kb_file_paths([Path(__file__).parent / "kb"])


def load_kb(paths: Sequence) -> Program:
    """Parses and merges the given files, then expands every pattern
    declaration. Rule order: raw rules in file order, then the expansions
    in declaration order (guards are attached across declarations)."""
    programs: List[Program] = []
    for path in kb_file_paths(paths):
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise KbError(str(path), exc) from exc
        try:
            programs.append(parse_program(text))
        except ParseError as exc:
            raise KbError(str(path), exc) from exc
        except patterns.MalformedPattern as exc:
            raise exc.with_source(str(path)) from None
    merged = merge_programs(programs)
    try:
        expanded = patterns.expand_declarations(merged.pattern_decls)
    except patterns.MalformedPattern as exc:
        raise exc
    return Program(
        merged.rules + tuple(expanded), merged.abducibles, merged.pattern_decls
    )


def vocabulary_closure_violations(program: Program) -> List[Tuple[str, int]]:
    """Predicates used by the program that are neither fact nor derived
    vocabulary. Empty for the shipped KB."""
    known = set(FACT_PREDICATES) | set(DERIVED_PREDICATES)
    seen: Set[Tuple[str, int]] = set()
    for rule in program.rules:
        literals = [rule.head] if rule.head is not None else []
        literals += [e.literal for e in rule.body if isinstance(e, BodyLiteral)]
        for l in literals:
            seen.add(l.atom.key)
    return sorted(seen - known)


@dataclass(frozen=True)
class Recommendation:
    treatment: str
    class_label: str
    support: PartialAnswerSet


RECOMMENDATION_QUERY = Query(
    (
        BodyLiteral(
            Literal(Atom("recommendation", (Variable("Treatment"), Variable("Class")))),
            False,
        ),
    )
)


def recommend(
    record: PatientRecord,
    kb: Program,
    limit: Optional[int] = 10,
    options: Optional[EngineOptions] = None,
) -> List[Recommendation]:
    """Grounds the KB plus the patient's facts and enumerates treatment
    recommendations, one per distinct (treatment, class), keeping the first
    supporting partial answer set found for each."""
    program = kb.extended(rules=tuple(patient_to_facts(record)))
    ground = ground_program(program)
    out: List[Recommendation] = []
    seen: Set[Tuple[str, str]] = set()
    for answer in solve(ground, RECOMMENDATION_QUERY, limit=None, options=options):
        binding = answer.binding_map
        treatment = str(binding["Treatment"])
        class_label = str(binding["Class"])
        key = (treatment, class_label)
        if key in seen:
            continue
        seen.add(key)
        out.append(Recommendation(treatment, class_label, answer))
        if limit is not None and len(out) >= limit:
            break
    return out
