"""Hypermedia links between run resources."""

from pydantic import BaseModel, ConfigDict, Field


class Link(BaseModel):
    """Link to another run resource, relative to the API root."""

    model_config = ConfigDict(frozen=True)

    href: str = Field(..., pattern=r"^/", description="Path of the linked run or snapshot")
    title: str | None = Field(None, description="Family name or snapshot time")
