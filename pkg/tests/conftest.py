import random
from pathlib import Path

import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from ledger.database import create_tables
from sc_forge.families import codeword_family, shipped_data_dir, surface_genus2
from sc_forge.textformat import load_presentation

DATA = shipped_data_dir()


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240917)


@pytest.fixture
def surface():
    return surface_genus2()


@pytest.fixture(scope="session")
def codewords():
    return codeword_family()


@pytest.fixture
def sixth():
    """⟨x, y | x³y²x⁻¹y⁻¹x⁻¹yx⁻²y²⟩, C'(1/6) with maximal piece 2"""
    return load_presentation(DATA / "c_sixth.pres")


@pytest.fixture
def ledger_engine():
    engine = create_engine("sqlite://", connect_args={"check_same_thread": False}, poolclass=StaticPool)
    create_tables(engine)
    return engine


@pytest.fixture
def ledger_session(ledger_engine):
    TestingSession = sessionmaker(autocommit=False, autoflush=False, bind=ledger_engine)
    db = TestingSession()
    try:
        yield db
    finally:
        db.close()
