import sys
from pathlib import Path

import pytest

ROOT_DIR = Path(__file__).resolve().parents[1]

SRC_DIR = ROOT_DIR / "src"

for path in (ROOT_DIR, SRC_DIR):
    if str(path) not in sys.path:
        sys.path.insert(0, str(path))


@pytest.fixture(scope="session")
def tables():
    from shared.tables import ingest_tables

    return ingest_tables()


@pytest.fixture(scope="session")
def weights():
    from shared.profile import WeightFamily

    return WeightFamily.standard()


@pytest.fixture(scope="session")
def profile(tables):
    from shared.profile import build_profile

    return build_profile(tables.f0)


@pytest.fixture(scope="session")
def system(tables):
    from shared.fundamental import build_fundamental_system

    return build_fundamental_system(tables.w0, tables.w1)
