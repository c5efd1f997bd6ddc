"""File-backed patient store.

One JSON document per patient plus an index file; every write goes through
write-temp-then-rename, so a reader never observes a torn record and a
crash leaves the previous version in place. Writes are serialized per
patient id.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path
from typing import Dict, List, Optional

from .chf import PatientRecord, record_from_dict, record_to_dict


class UnknownPatient(KeyError):
    pass


@dataclass(frozen=True)
class StoredPatient:
    id: str
    record: PatientRecord
    created_at: str
    updated_at: str


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class PatientStore:
    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._locks: Dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, patient_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(patient_id, threading.Lock())

    def _path(self, patient_id: str) -> Path:
        return self.directory / ("%s.json" % patient_id)

    def _index_path(self) -> Path:
        return self.directory / "index.json"

    def _write_atomic(self, path: Path, payload: dict) -> None:
        tmp = path.with_suffix(".tmp-%s" % uuid.uuid4().hex)
        tmp.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
        os.replace(tmp, path)

    def _update_index(self, patient_id: str, created_at: str, updated_at: str) -> None:
        index = self._read_index()
        index[patient_id] = {"created_at": created_at, "updated_at": updated_at}
        self._write_atomic(self._index_path(), index)

    def _read_index(self) -> dict:
        try:
            return json.loads(self._index_path().read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            return {}

    def create(self, record: PatientRecord) -> StoredPatient:
        patient_id = uuid.uuid4().hex
        now = _now()
        stored = StoredPatient(patient_id, record, now, now)
        with self._lock_for(patient_id):
            self._write_atomic(self._path(patient_id), self._payload(stored))
            self._update_index(patient_id, now, now)
        return stored

    def get(self, patient_id: str) -> StoredPatient:
        path = self._path(patient_id)
        try:
            payload = json.loads(path.read_text(encoding="utf-8"), parse_float=Decimal)
        except OSError:
            raise UnknownPatient(patient_id)
        record = record_from_dict(payload["record"])
        return StoredPatient(
            payload["id"], record, payload["created_at"], payload["updated_at"]
        )

    def replace(self, patient_id: str, record: PatientRecord) -> StoredPatient:
        with self._lock_for(patient_id):
            current = self.get(patient_id)
            stored = StoredPatient(patient_id, record, current.created_at, _now())
            self._write_atomic(self._path(patient_id), self._payload(stored))
            self._update_index(patient_id, stored.created_at, stored.updated_at)
        return stored

    def ids(self) -> List[str]:
        return sorted(self._read_index())

    @staticmethod
    def _payload(stored: StoredPatient) -> dict:
        return {
            "id": stored.id,
            "record": record_to_dict(stored.record),
            "created_at": stored.created_at,
            "updated_at": stored.updated_at,
        }
