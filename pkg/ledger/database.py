import json

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session, sessionmaker

from ledger.models import Base, RunRecord, RunRecordResponse
from sc_forge.config import get_settings
from sc_forge.reports import Report


def make_engine(url: str, **kwargs) -> Engine:
    connect_args = {"check_same_thread": False} if url.startswith("sqlite") else {}  # SQLite only
    return create_engine(url, connect_args=connect_args, **kwargs)


# Database configuration
engine = make_engine(get_settings().ledger_url)

SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


def create_tables(bind: Engine | None = None):
    """Create database tables"""
    Base.metadata.create_all(bind=bind or engine)


def get_db():
    """Dependency to get database session"""
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def record_run(db: Session, report: Report) -> RunRecord:
    record = RunRecord(
        subcommand=report.subcommand,
        verdict=report.verdict,
        certificate=report.certificate,
        config_json=report.config.model_dump_json(),
        report_json=report.to_json(),
    )
    try:
        db.add(record)
        db.commit()
        db.refresh(record)
    except Exception:
        db.rollback()
        raise
    return record


def load_run(db: Session, run_id: int) -> RunRecordResponse | None:
    record = db.query(RunRecord).filter(RunRecord.id == run_id).first()
    if record is None:
        return None
    return RunRecordResponse(
        id=record.id,
        subcommand=record.subcommand,
        verdict=record.verdict,
        certificate=record.certificate,
        created_at=record.created_at,
        report=json.loads(record.report_json),
    )
