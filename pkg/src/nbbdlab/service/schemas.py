"""Request and response models for the HTTP facade.

Each request model mirrors the keyword signature of one experiment
driver, so a validated request dumps directly into the driver call.
Complex inputs travel as strings ("0.45+3j"); complex outputs are split
into _re/_im columns by the drivers, keeping every payload JSON-safe
without NaN (undefined diagnostics are null).
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field

__all__ = ["ConstantsRequest", "CriterionRequest", "GramRequest",
           "Lemma23Request", "ResiduesRequest", "FitRequest",
           "ZerosIngestRequest", "DiagnosticsRequest", "RunPayload",
           "HealthResponse", "VersionResponse", "ErrorResponse",
           "REQUEST_MODELS"]

# engineered defaults: first two true ordinates removed, off-line zeros
# at sigma0 = 0.75, gamma0 = 10
_REMOVED_DEFAULT = (14.134725141734693, 21.022039638771555)


class ConstantsRequest(BaseModel):
    zeros: str | None = None
    empty_table: bool = False


class CriterionRequest(BaseModel):
    n_values: list[int] = Field(min_length=1)
    target: Literal["real-zeta", "model"] = "real-zeta"
    tmax: float | None = Field(default=None, gt=0)
    tol: float = Field(default=1.0e-10, gt=0)
    zeros: str | None = None
    sigma0: float = 0.75
    gamma0: float = 10.0
    removed: tuple[float, float] = _REMOVED_DEFAULT
    threads: int = Field(default=1, ge=1, le=64)


class GramRequest(BaseModel):
    n_max: int = Field(ge=1, le=64)
    tmax: float | None = Field(default=None, gt=0)
    tol: float = Field(default=1.0e-10, gt=0)


class Lemma23Request(BaseModel):
    n: int = Field(ge=2)
    s_values: list[str] = Field(min_length=1)
    heights: list[float] = Field(min_length=1)
    zeros: str | None = None
    target: Literal["real-zeta", "model"] = "real-zeta"
    sigma0: float = 0.75
    gamma0: float = 10.0
    removed: tuple[float, float] = _REMOVED_DEFAULT


class ResiduesRequest(BaseModel):
    n: int = Field(ge=2)
    s: str
    zeros: str | None = None
    sigma0: float = 0.75
    gamma0: float = 10.0
    removed: tuple[float, float] = _REMOVED_DEFAULT
    mode: Literal["pair", "quadruplet"] = "quadruplet"


class FitRequest(BaseModel):
    n_grid: list[int] | None = None
    mode: Literal["pair", "quadruplet"] = "pair"
    sigma0: float = 0.75
    gamma0: float = 10.0
    removed: tuple[float, float] = _REMOVED_DEFAULT
    tmax: float | None = Field(default=None, gt=0)
    tol: float = Field(default=1.0e-12, gt=0)
    threads: int = Field(default=1, ge=1, le=64)


class ZerosIngestRequest(BaseModel):
    zeros: str
    refine: bool = False
    rewrite: str | None = None
    decimals: int = Field(default=9, ge=1, le=17)


class DiagnosticsRequest(BaseModel):
    zeros: str | None = None
    t_grid: list[float] | None = None
    lindelof_windows: int = Field(default=25, ge=2)
    lindelof_samples: int = Field(default=256, ge=8)


class RunPayload(BaseModel):
    """Uniform driver payload: echoed parameters plus tabular outputs."""

    subcommand: str
    parameters: dict[str, Any]
    outputs: dict[str, Any]


class HealthResponse(BaseModel):
    status: Literal["ok"]


class VersionResponse(BaseModel):
    version: str


class ErrorResponse(BaseModel):
    error: str
    detail: str


REQUEST_MODELS: dict[str, type[BaseModel]] = {
    "constants": ConstantsRequest,
    "criterion": CriterionRequest,
    "gram": GramRequest,
    "lemma23": Lemma23Request,
    "residues": ResiduesRequest,
    "fit": FitRequest,
    "zeros-ingest": ZerosIngestRequest,
    "diagnostics": DiagnosticsRequest,
}
