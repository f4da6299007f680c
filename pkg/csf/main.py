"""Main FastAPI application."""

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from csf.api import reference, runs
from csf.config import settings

app = FastAPI(
    title=settings.api_title,
    version=settings.api_version,
    description=settings.api_description,
)

# Include routers
app.include_router(runs.router, prefix="/runs", tags=["runs"])
app.include_router(reference.router, tags=["reference"])


@app.get("/", response_class=JSONResponse)
def read_root() -> dict[str, str | dict[str, dict[str, str]]]:
    """API root with links to main endpoints."""
    return {
        "message": settings.api_title,
        "links": {
            "runs": {"href": "/runs", "title": "Stored flow runs"},
            "families": {"href": "/families/trig_three_loop?lambda=0.45", "title": "Sample curve"},
            "heat_polynomials": {"href": "/heat-polynomials/2", "title": "Heat polynomial U_2"},
            "docs": {"href": "/docs", "title": "API documentation"},
        },
    }
