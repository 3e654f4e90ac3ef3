"""FastAPI application exposing the experiment drivers.

One POST endpoint per subcommand under /v1/ (zeros-ingest keeps its
hyphen), plus GET /healthz and GET /version.  Domain failures (NbbdError
subclasses, domain ValueErrors, missing input files) map to 400 with an
ErrorResponse body naming the exception class; malformed request bodies
get FastAPI's standard 422.  The optional cache directory is fixed at
app construction, never taken from the request, so remote callers cannot
direct writes to arbitrary paths.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import NbbdError
from ..experiments import execute
from .schemas import (ConstantsRequest, CriterionRequest,
                      DiagnosticsRequest, ErrorResponse, FitRequest,
                      GramRequest, HealthResponse, Lemma23Request,
                      ResiduesRequest, RunPayload, VersionResponse,
                      ZerosIngestRequest)

__all__ = ["create_app"]

_BAD_REQUEST = (NbbdError, ValueError, OSError)


def _error_response(exc: Exception) -> JSONResponse:
    body = ErrorResponse(error=type(exc).__name__, detail=str(exc))
    return JSONResponse(status_code=400, content=body.model_dump())


def create_app(cache_dir=None) -> FastAPI:
    app = FastAPI(title="nbbdlab", version=__version__,
                  description="Numerical laboratory for the Nyman-Beurling-"
                              "Baez-Duarte criterion and its counterfactual "
                              "zeta model.")
    app.state.cache_dir = cache_dir

    @app.exception_handler(NbbdError)
    async def _nbbd_handler(request: Request, exc: NbbdError):
        return _error_response(exc)

    def _run(subcommand: str, request_model):
        try:
            payload = execute(subcommand, request_model.model_dump(),
                              app.state.cache_dir)
        except _BAD_REQUEST as exc:
            return _error_response(exc)
        return RunPayload(**payload)

    @app.get("/healthz", response_model=HealthResponse)
    async def healthz() -> HealthResponse:
        return HealthResponse(status="ok")

    @app.get("/version", response_model=VersionResponse)
    async def version() -> VersionResponse:
        return VersionResponse(version=__version__)

    error_doc = {400: {"model": ErrorResponse}}

    @app.post("/v1/constants", response_model=RunPayload, responses=error_doc)
    async def constants(req: ConstantsRequest):
        return _run("constants", req)

    @app.post("/v1/criterion", response_model=RunPayload, responses=error_doc)
    async def criterion(req: CriterionRequest):
        return _run("criterion", req)

    @app.post("/v1/gram", response_model=RunPayload, responses=error_doc)
    async def gram(req: GramRequest):
        return _run("gram", req)

    @app.post("/v1/lemma23", response_model=RunPayload, responses=error_doc)
    async def lemma23(req: Lemma23Request):
        return _run("lemma23", req)

    @app.post("/v1/residues", response_model=RunPayload, responses=error_doc)
    async def residues(req: ResiduesRequest):
        return _run("residues", req)

    @app.post("/v1/fit", response_model=RunPayload, responses=error_doc)
    async def fit(req: FitRequest):
        return _run("fit", req)

    @app.post("/v1/zeros-ingest", response_model=RunPayload,
              responses=error_doc)
    async def zeros_ingest(req: ZerosIngestRequest):
        return _run("zeros-ingest", req)

    @app.post("/v1/diagnostics", response_model=RunPayload,
              responses=error_doc)
    async def diagnostics(req: DiagnosticsRequest):
        return _run("diagnostics", req)

    return app
