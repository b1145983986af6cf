from datetime import datetime
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict
from sqlalchemy import Column, DateTime, Integer, String, Text
from sqlalchemy.orm import declarative_base
from sqlalchemy.sql import func

Base = declarative_base()


# SQLAlchemy run model
class RunRecord(Base):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, index=True)
    subcommand = Column(String, index=True, nullable=False)
    verdict = Column(String, nullable=False)
    certificate = Column(String, nullable=False)
    config_json = Column(Text, nullable=False)
    report_json = Column(Text, nullable=False)
    created_at = Column(DateTime(timezone=True), server_default=func.now())


# Pydantic models for API
class RunRecordResponse(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    id: int
    subcommand: str
    verdict: str
    certificate: str
    created_at: Optional[datetime] = None
    report: dict[str, Any]


class RunResponse(BaseModel):
    run_id: int
    report: dict[str, Any]
