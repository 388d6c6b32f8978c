"""Stateless inference service over a trained model bundle.

Endpoints expose the schema (drives the client form), model metadata,
prediction, exact Shapley explanation with a ready-to-render waterfall,
single-feature counterfactual search, and a case-sampling demo aid.
Every 4xx/5xx body is a structured ApiError with field-level details.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from equarent import __version__
from equarent.bundle import ModelBundle
from equarent.casegen.sampler import sample_cases
from equarent.casegen.schema import CaseRecord, Violation, validate_case
from equarent.counterfactual import (GridSpec, SearchError, Target,
                                     counterfactuals_for_top_k)
from equarent.explain.plots import waterfall_payload

# Violation suffixes that block prediction outright; anything else
# (range excursions, cross-field constraints) predicts with warnings so
# a judge can still price a hypothetical.
_HARD_SUFFIXES = (".missing", ".type", ".unknown", ".category")


class ApiException(Exception):
    """Carries an ApiError payload to the error handler."""

    def __init__(self, status_code: int, code: str, message: str,
                 details: list[dict] | None = None):
        self.status_code = status_code
        self.code = code
        self.message = message
        self.details = details or []
        super().__init__(message)

    def body(self) -> dict:
        return {"code": self.code, "message": self.message, "details": self.details}


class PredictRequest(BaseModel):
    case: dict[str, Any]


class CounterfactualRequest(BaseModel):
    case: dict[str, Any]
    target: Optional[dict[str, Any]] = None
    k: int = Field(default=3, ge=0, le=25)


class SampleRequest(BaseModel):
    n: int = Field(default=1, ge=1, le=1000)
    seed: int = 0


def _violation_details(violations: list[Violation]) -> list[dict]:
    return [{"field": v.id.rsplit(".", 1)[0], "message": v.message}
            for v in violations]


def _split_violations(violations: list[Violation]):
    hard = [v for v in violations if v.id.endswith(_HARD_SUFFIXES)]
    soft = [v for v in violations if not v.id.endswith(_HARD_SUFFIXES)]
    return hard, soft


def create_app(bundle: ModelBundle, *, static_dir: str | Path | None = None,
               default_target: Target | None = None,
               grid: GridSpec | None = None) -> FastAPI:
    """Build the service around one immutable bundle."""
    app = FastAPI(title="rent reduction decision support", version=__version__)
    schema = bundle.schema
    schema_dict = schema.to_dict()
    bundle_digest = bundle.digest()
    cf_target = default_target or Target()
    cf_grid = grid or GridSpec()

    @app.exception_handler(ApiException)
    async def _api_error(_req: Request, exc: ApiException):
        return JSONResponse(status_code=exc.status_code, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def _request_error(_req: Request, exc: RequestValidationError):
        details = [{"field": ".".join(str(p) for p in err["loc"][1:]) or "body",
                    "message": err["msg"]} for err in exc.errors()]
        return JSONResponse(status_code=422, content={
            "code": "invalid_request",
            "message": "request body does not match the endpoint contract",
            "details": details,
        })

    @app.exception_handler(Exception)
    async def _unhandled(_req: Request, exc: Exception):
        return JSONResponse(status_code=500, content={
            "code": "internal_error",
            "message": f"{type(exc).__name__}: {exc}",
            "details": [],
        })

    def parse_case(values: Mapping[str, Any]) -> tuple[CaseRecord, list[dict]]:
        """Validate a submitted case; hard violations abort with 422."""
        case = CaseRecord(case_id="request", values=dict(values))
        violations = validate_case(schema, case)
        hard, soft = _split_violations(violations)
        if hard:
            raise ApiException(
                422, "invalid_case",
                "case rejected: missing, mistyped, or unknown fields",
                _violation_details(hard))
        return case, _violation_details(soft)

    def explain(case: CaseRecord):
        try:
            return bundle.explain_case(case)
        except ValueError as exc:
            raise ApiException(400, "explanation_unavailable", str(exc)) from exc

    @app.get("/api/schema")
    async def get_schema():
        return {"schema": schema_dict, "digest": schema.digest()}

    @app.get("/api/model")
    async def get_model():
        return {
            "digest": bundle_digest,
            "package_version": __version__,
            "model_kind": type(bundle.model).__name__,
            "metadata": dict(bundle.metadata),
            "importance": bundle.importance.to_dict() if bundle.importance else None,
        }

    @app.post("/api/predict")
    async def predict(req: PredictRequest):
        case, warnings = parse_case(req.case)
        explanation = explain(case)
        raw = bundle.predict_case(case)
        return {
            "raw": raw,
            "display": min(1.0, max(0.0, raw)),
            "digest": bundle_digest,
            "consistency": {
                "base_value": explanation.base_value,
                "phi_sum": explanation.phi_sum,
                "prediction": explanation.prediction,
            },
            "warnings": warnings,
        }

    @app.post("/api/explain")
    async def explain_endpoint(req: PredictRequest):
        case, warnings = parse_case(req.case)
        explanation = explain(case)
        return {
            "prediction": explanation.prediction,
            "base_value": explanation.base_value,
            "phi_sum": explanation.phi_sum,
            "contributions": [{"feature": f, "phi": p}
                              for f, p in explanation.contributions],
            "waterfall": waterfall_payload(explanation),
            "digest": bundle_digest,
            "warnings": warnings,
        }

    @app.post("/api/counterfactual")
    async def counterfactual(req: CounterfactualRequest):
        case, warnings = parse_case(req.case)
        explanation = explain(case)
        try:
            target = Target.from_dict(req.target) if req.target else cf_target
        except (KeyError, ValueError) as exc:
            raise ApiException(422, "invalid_target", str(exc)) from exc
        try:
            entries = counterfactuals_for_top_k(
                bundle.model, schema, case, explanation, k=req.k,
                target=target, grid=cf_grid, encoding=bundle.encoding)
        except SearchError as exc:
            raise ApiException(400, "search_failed", str(exc)) from exc
        return {
            "original_prediction": explanation.prediction,
            "target": target.to_dict(),
            "results": [e.to_dict() for e in entries],
            "digest": bundle_digest,
            "warnings": warnings,
        }

    @app.post("/api/cases/sample")
    async def sample(req: SampleRequest):
        cases = sample_cases(schema, req.n, seed=req.seed)
        return {"cases": [{"case_id": c.case_id, "values": c.values}
                          for c in cases]}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="static")
    return app
