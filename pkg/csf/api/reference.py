"""Endpoints for family samples and heat polynomials."""

from fastapi import APIRouter, HTTPException, Query
from pydantic import ValidationError

from csf.api.runs import describe_curve
from csf.models.family import FamilyName, FamilySpec
from csf.models.responses import FamilyResponse, HeatPolynomialResponse
from csf.services.families import FamilyParameterError, build_curve
from csf.services.heat import HeatPolynomial, heat_poly_zeros, heat_residual, largest_zero_scaled
from csf.services.solver import NumericalFailureError

router = APIRouter()


@router.get("/families/{family}", response_model=FamilyResponse)
def sample_family(
    family: FamilyName,
    lam: float | None = Query(None, alias="lambda"),
    n_points: int = Query(1000, ge=64, le=20_000),
) -> FamilyResponse:
    """Initial curve of a family with its crossings and regions."""
    try:
        spec = FamilySpec.model_validate({"family": family, "lambda": lam, "n_points": n_points})
        curve = build_curve(spec)
    except (ValidationError, FamilyParameterError) as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    return FamilyResponse(family=spec, **dict(describe_curve(curve)))


@router.get("/heat-polynomials/{m}", response_model=HeatPolynomialResponse)
def heat_polynomial(
    m: int,
    t: float = Query(-1.0, description="Time at which to list the real zeros"),
) -> HeatPolynomialResponse:
    """Coefficients, heat-equation residual and real zeros of U_m."""
    if not 0 <= m <= 60:
        raise HTTPException(status_code=400, detail="m must lie in [0, 60]")
    if t == 0:
        raise HTTPException(status_code=400, detail="t must be nonzero")
    try:
        zeros = heat_poly_zeros(m, t) if m >= 1 else []
    except NumericalFailureError as e:
        raise HTTPException(status_code=422, detail=str(e)) from e
    return HeatPolynomialResponse(
        m=m,
        coefficients=HeatPolynomial(m=m).coefficients,
        residual=heat_residual(m),
        t=t,
        zeros=zeros,
        largest_zero_scaled=largest_zero_scaled(m) if m >= 1 else None,
    )
