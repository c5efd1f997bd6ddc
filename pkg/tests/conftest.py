import json
from decimal import Decimal
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from hfadvisor.chf import default_kb_paths, load_kb, record_from_dict

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=(HealthCheck.too_slow,),
)
settings.load_profile("default")

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"


@pytest.fixture(scope="session")
def kb():
    return load_kb(default_kb_paths())


@pytest.fixture(scope="session")
def case_study_record():
    doc = json.loads(
        (DATA_DIR / "case_study_patient.json").read_text(), parse_float=Decimal
    )
    return record_from_dict(doc)


@pytest.fixture()
def case_study_path():
    return DATA_DIR / "case_study_patient.json"


@pytest.fixture()
def whatif_scenario_path():
    return DATA_DIR / "whatif_scenario.lp"
