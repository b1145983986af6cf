import json
import logging

from dotenv import load_dotenv
from fastapi import Depends, FastAPI, HTTPException, status
from fastapi.middleware.cors import CORSMiddleware
from sqlalchemy.orm import Session

# Load environment variables
load_dotenv()

from ledger.database import create_tables, get_db, load_run, record_run
from ledger.models import RunRecordResponse, RunResponse
from sc_forge import service
from sc_forge.config import configure_logging
from sc_forge.errors import InputError, InternalInvariantError, UnknownSubcommandError
from sc_forge.reports import RunRequest

configure_logging()
logger = logging.getLogger(__name__)

app = FastAPI(title="sc-forge", version="1.0.0")

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# Create database tables on startup
@app.on_event("startup")
async def startup_event():
    create_tables()


@app.post("/run/{subcommand}", response_model=RunResponse)
def run_subcommand(subcommand: str, request: RunRequest, db: Session = Depends(get_db)):
    """Run one toolkit subcommand on the posted source texts and record it"""
    try:
        report = service.run(
            subcommand,
            request.sources,
            request.params,
            inputs={role: f"<{role}>" for role in request.sources},
            seed=request.seed,
        )
    except UnknownSubcommandError as e:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(e))
    except InputError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    except InternalInvariantError as e:
        logger.exception("internal invariant failed in %s", subcommand)
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))

    record = record_run(db, report)
    return RunResponse(run_id=record.id, report=json.loads(report.to_json()))


@app.get("/runs/{run_id}", response_model=RunRecordResponse)
def get_run(run_id: int, db: Session = Depends(get_db)):
    run = load_run(db, run_id)
    if run is None:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Run not found")
    return run


@app.get("/subcommands")
async def list_subcommands():
    return {
        name: {"sources": list(command.sources), "params": command.params.model_json_schema()}
        for name, command in service.SUBCOMMANDS.items()
    }


# Health check endpoint
@app.get("/health")
async def health_check():
    return {"status": "healthy"}


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
