from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from sc_forge.constants import CERT_EXACT, REPORT_SCHEMA


class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


# Per-subcommand parameters
class PiecesParams(_Params):
    full: bool = False


class CheckScParams(_Params):
    lam: Optional[str] = Field(default=None, alias="lambda")
    f: Optional[str] = None

    @model_validator(mode="after")
    def _one_bound(self) -> "CheckScParams":
        if (self.lam is None) == (self.f is None):
            raise ValueError("give exactly one of lambda and f")
        return self


class WpParams(_Params):
    word: str
    oracle: bool = False
    radius: Optional[int] = Field(default=None, ge=0)
    cap: Optional[int] = Field(default=None, ge=1)


class RhoParams(_Params):
    path: str
    tmax: int = Field(ge=1)


class IpscWitnessParams(_Params):
    relator: str
    split: int = Field(ge=0)
    i: int = Field(ge=1)
    n_i: int = Field(ge=0)
    f: str


class DecompositionPartModel(_Params):
    u: str
    r: str
    v: str = ""


class IpscDecompParams(_Params):
    relator: str
    parts: list[DecompositionPartModel]
    N: int = Field(ge=1)
    B: int
    rho: str


class IpscNPrimeParams(_Params):
    rho: str
    N: int = Field(ge=1)
    B: int = Field(ge=1)
    n: list[int]
    count: int = Field(ge=1)


class ConstructParams(_Params):
    params: str = "N=36,M=36,U=36,L=1152"
    f: str = "sqrt"
    g: Optional[str] = None
    max_base_len: int = Field(ge=1)
    find_min_v: bool = False
    strict: bool = True
    tmax: Optional[int] = Field(default=None, ge=1)


class DeltaParams(_Params):
    pass


class SubsegmentParams(_Params):
    u: int = Field(ge=1)
    g: str
    oracle: bool = False
    delta: Optional[str] = None
    subdivide: int = Field(default=1, ge=1)


# Envelope
class RunConfig(BaseModel):
    """Fully resolved configuration of one run, echoed into its report"""

    model_config = ConfigDict(extra="forbid")

    subcommand: str
    inputs: dict[str, str] = Field(default_factory=dict)
    params: dict[str, Any] = Field(default_factory=dict)
    output: Optional[str] = None
    report: Optional[str] = None
    seed: Optional[int] = None
    threads: int = Field(default=1, ge=1)


class Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    report_schema: str = Field(default=REPORT_SCHEMA, alias="schema")
    subcommand: str
    config: RunConfig
    certificate: str = CERT_EXACT
    verdict: str
    result: dict[str, Any]

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, by_alias=True)


class RunRequest(BaseModel):
    """Body of POST /run/{subcommand}: source texts by role, parameters, seed"""

    sources: dict[str, str] = Field(default_factory=dict)
    params: dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
