"""HTTP service: patient storage, recommendation queries, what-if queries.

JSON over HTTP, no authentication, binds to localhost by default. The KB is
loaded at startup and can be re-read via POST /kb/reload. Every query runs
an isolated solver session over the shared immutable KB program.
"""

from __future__ import annotations

import argparse
import json
import threading
from decimal import Decimal
from typing import List, Optional, Sequence

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import chf
from .abduction import abduce
from .chf import (
    CLASS_LABELS,
    CONDITION_SYMBOLS,
    DEFAULT_WHATIF_ABDUCIBLES,
    MEASUREMENT_FIELDS,
    NYHA_CLASSES,
    RECENCIES,
    STAGES,
    TREATMENTS,
    PatientValidationError,
    default_kb_paths,
    load_kb,
    patient_to_facts,
    recommend,
    record_from_dict,
    record_to_dict,
)
from .model import Program, merge_programs
from .parser import parse_query
from .solver import EngineOptions, PartialAnswerSet
from .store import PatientStore, UnknownPatient

WHATIF_LIMIT = 5


def _support_doc(answer: PartialAnswerSet) -> dict:
    return {
        "positive": [str(l) for l in answer.positive_sorted()],
        "nafs": [str(l) for l in answer.nafs_sorted()],
    }


def vocabulary_doc() -> dict:
    """Everything the console needs to build its forms, straight from the
    domain vocabulary; clients must not hardcode field lists."""
    measurement_fields = [
        {
            "name": name,
            "group": "Measurements",
            "kind": "number",
            "units": units,
        }
        for name, _symbol, units in MEASUREMENT_FIELDS
    ]
    fields = (
        [
            {"name": "gender", "group": "Demographics", "kind": "enum",
             "options": ["female", "male"]},
            {"name": "age", "group": "Demographics", "kind": "number", "units": "years"},
            {"name": "race", "group": "Demographics", "kind": "enum",
             "options": ["african_american", "asian", "hispanic", "white", "other"]},
            {"name": "stage", "group": "Measurements", "kind": "enum",
             "options": list(STAGES)},
            {"name": "nyha_class", "group": "Measurements", "kind": "enum",
             "options": list(NYHA_CLASSES)},
        ]
        + measurement_fields
        + [
            {"name": "sinus_rhythm", "group": "Measurements", "kind": "boolean"},
            {"name": "diagnoses", "group": "Diseases and Symptoms", "kind": "multi",
             "options": list(CONDITION_SYMBOLS)},
            {"name": "evidences", "group": "Diseases and Symptoms", "kind": "multi",
             "options": list(CONDITION_SYMBOLS)},
            {"name": "histories", "group": "Diseases and Symptoms", "kind": "history",
             "options": list(CONDITION_SYMBOLS), "recencies": list(RECENCIES)},
            {"name": "denied_histories", "group": "Diseases and Symptoms",
             "kind": "multi", "options": list(CONDITION_SYMBOLS)},
            {"name": "expectation_of_survival", "group": "Miscellany",
             "kind": "number", "units": "years"},
            {"name": "post_mi_days", "group": "Miscellany", "kind": "number",
             "units": "days"},
        ]
        + [
            {"name": flag, "group": "Miscellany", "kind": "boolean"}
            for flag in chf.BOOLEAN_FLAGS
        ]
    )
    return {
        "treatments": list(TREATMENTS),
        "class_labels": list(CLASS_LABELS),
        "fact_predicates": sorted([list(p) for p in chf.FACT_PREDICATES]),
        "derived_predicates": sorted([list(p) for p in chf.DERIVED_PREDICATES]),
        "patient_fields": fields,
    }


class _KbHolder:
    def __init__(self, paths: Sequence):
        self.paths = list(paths)
        self._lock = threading.Lock()
        self.program: Program = load_kb(self.paths)

    def reload(self) -> Program:
        program = load_kb(self.paths)
        with self._lock:
            self.program = program
        return program

    def current(self) -> Program:
        with self._lock:
            return self.program


def _validation_response(exc: PatientValidationError) -> JSONResponse:
    return JSONResponse(
        status_code=422,
        content={"detail": [{"field": f, "message": m} for f, m in exc.issues]},
    )


def create_app(
    kb_paths: Optional[Sequence] = None,
    store_dir: str = "patients",
    options: Optional[EngineOptions] = None,
) -> FastAPI:
    app = FastAPI(title="hfadvisor")
    kb = _KbHolder(kb_paths if kb_paths else default_kb_paths())
    store = PatientStore(store_dir)
    engine_options = options or EngineOptions()

    async def _body(request: Request) -> dict:
        raw = await request.body()
        try:
            doc = json.loads(raw.decode("utf-8"), parse_float=Decimal)
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise PatientValidationError([("body", "invalid JSON")])
        if not isinstance(doc, dict):
            raise PatientValidationError([("body", "expected a JSON object")])
        return doc

    def _stored_doc(stored) -> dict:
        return {
            "id": stored.id,
            "record": record_to_dict(stored.record),
            "created_at": stored.created_at,
            "updated_at": stored.updated_at,
        }

    @app.exception_handler(PatientValidationError)
    async def _on_validation(_request, exc: PatientValidationError):
        return _validation_response(exc)

    @app.exception_handler(UnknownPatient)
    async def _on_unknown(_request, exc: UnknownPatient):
        return JSONResponse(status_code=404, content={"detail": "unknown patient id"})

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "kb_rules": len(kb.current().rules)}

    @app.get("/kb/vocabulary")
    async def kb_vocabulary():
        return vocabulary_doc()

    @app.post("/kb/reload")
    async def kb_reload():
        program = kb.reload()
        return {"rules": len(program.rules)}

    @app.post("/patients")
    async def create_patient(request: Request):
        record = record_from_dict(await _body(request))
        stored = store.create(record)
        return {"id": stored.id}

    @app.get("/patients/{patient_id}")
    async def get_patient(patient_id: str):
        return _stored_doc(store.get(patient_id))

    @app.put("/patients/{patient_id}")
    async def put_patient(patient_id: str, request: Request):
        record = record_from_dict(await _body(request))
        return _stored_doc(store.replace(patient_id, record))

    @app.get("/patients/{patient_id}/recommendations")
    async def get_recommendations(patient_id: str, limit: int = 10):
        stored = store.get(patient_id)
        results = recommend(stored.record, kb.current(), limit=limit,
                            options=engine_options)
        return [
            {
                "treatment": r.treatment,
                "class": r.class_label,
                "support": _support_doc(r.support),
            }
            for r in results
        ]

    @app.post("/patients/{patient_id}/whatif")
    async def post_whatif(patient_id: str, request: Request):
        stored = store.get(patient_id)
        doc = await _body(request)
        treatment = doc.get("treatment")
        class_label = doc.get("class", "class_1")
        issues = []
        if treatment not in TREATMENTS:
            issues.append(("treatment", "%r is not a known treatment" % treatment))
        if class_label not in CLASS_LABELS:
            issues.append(("class", "%r is not a known class label" % class_label))
        if issues:
            raise PatientValidationError(issues)
        facts = Program(tuple(patient_to_facts(stored.record)))
        program = merge_programs([facts, kb.current()])
        query = parse_query("recommendation(%s, %s)." % (treatment, class_label))
        results = list(
            abduce(
                program,
                query,
                limit=WHATIF_LIMIT,
                options=engine_options,
                extra_abducibles=DEFAULT_WHATIF_ABDUCIBLES,
            )
        )
        return [
            {
                "treatment": treatment,
                "class": class_label,
                "assumptions": {
                    "positive": [str(l) for l in r.assumed_true_sorted()],
                    "negative": [str(l) for l in r.assumed_false_sorted()],
                },
                "support": _support_doc(r.answer),
            }
            for r in results
        ]

    return app


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="hfadvisor-service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--store", default="patients")
    parser.add_argument("--kb", action="append", default=None)
    args = parser.parse_args(argv)

    import uvicorn

    app = create_app(kb_paths=args.kb, store_dir=args.store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
