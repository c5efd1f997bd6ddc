import threading
from decimal import Decimal

import pytest

from hfadvisor.chf import PatientRecord
from hfadvisor.store import PatientStore, UnknownPatient


def test_create_get_replace_cycle(tmp_path):
    store = PatientStore(tmp_path)
    stored = store.create(PatientRecord(stage="c", age=78))
    fetched = store.get(stored.id)
    assert fetched.record == stored.record
    assert fetched.created_at == stored.created_at

    replaced = store.replace(stored.id, PatientRecord(stage="c", age=79))
    assert replaced.record.age == 79
    assert replaced.created_at == stored.created_at
    assert replaced.updated_at >= stored.updated_at
    assert store.ids() == [stored.id]


def test_unknown_patient(tmp_path):
    store = PatientStore(tmp_path)
    with pytest.raises(UnknownPatient):
        store.get("nope")
    with pytest.raises(UnknownPatient):
        store.replace("nope", PatientRecord())


def test_reads_never_observe_torn_records(tmp_path):
    # Writers replace the whole record; a concurrent reader must always see
    # one of the complete versions, never a mix.
    store = PatientStore(tmp_path)
    versions = [
        PatientRecord(stage="c", age=age, lvef=Decimal("0.35"))
        for age in range(40, 60)
    ]
    stored = store.create(versions[0])
    stop = threading.Event()
    torn = []

    def reader():
        valid = {(v.age, v.stage) for v in versions}
        while not stop.is_set():
            record = store.get(stored.id).record
            if (record.age, record.stage) not in valid or record.lvef != Decimal("0.35"):
                torn.append(record)

    threads = [threading.Thread(target=reader) for _ in range(3)]
    for t in threads:
        t.start()
    for _ in range(3):
        for version in versions:
            store.replace(stored.id, version)
    stop.set()
    for t in threads:
        t.join()
    assert torn == []
