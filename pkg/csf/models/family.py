"""Initial-curve family specifications."""

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from csf.types import PointCount


class FamilyName(StrEnum):
    L_LAMBDA = "l_lambda"
    M_LAMBDA = "m_lambda"
    TRIG_THREE_LOOP = "trig_three_loop"
    CIRCLE = "circle"
    FIGURE_EIGHT = "figure_eight"
    ELLIPSE = "ellipse"
    LIMACON = "limacon"


# Families with a lambda parameter and its admissible closed/open range
LAMBDA_RANGES: dict[FamilyName, tuple[float, float, bool, bool]] = {
    # (low, high, low inclusive, high inclusive)
    FamilyName.L_LAMBDA: (0.0, 1.0, True, False),
    FamilyName.M_LAMBDA: (0.0, 1.0, False, False),
    FamilyName.TRIG_THREE_LOOP: (0.0, 1.0, True, False),
    FamilyName.LIMACON: (0.0, 1.0, False, False),
}


def lambda_in_range(family: FamilyName, value: float) -> bool:
    low, high, low_closed, high_closed = LAMBDA_RANGES[family]
    above = value >= low if low_closed else value > low
    below = value <= high if high_closed else value < high
    return above and below


class FamilySpec(BaseModel):
    """Which initial curve to build and at what resolution.

    ``lambda_`` is the family parameter (the limacon uses it as ``b`` in r = b + cos).
    ``radius`` applies to circles, ``a`` and ``b`` to ellipses.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    family: FamilyName
    lambda_: float | None = Field(default=None, alias="lambda")
    n_points: PointCount = 1000
    radius: float = Field(default=1.0, gt=0.0)
    a: float = Field(default=2.0, gt=0.0)
    b: float = Field(default=1.0, gt=0.0)

    @model_validator(mode="after")
    def _check_lambda(self) -> "FamilySpec":
        if self.family in LAMBDA_RANGES:
            if self.lambda_ is None:
                raise ValueError(f"family {self.family} needs a lambda value")
            if not lambda_in_range(self.family, self.lambda_):
                raise ValueError(f"lambda={self.lambda_} is outside the range of {self.family}")
        return self

    def with_lambda(self, value: float) -> "FamilySpec":
        return FamilySpec.model_validate({**self.model_dump(by_alias=True), "lambda": value})
