"""Type aliases for the curve shortening flow package."""

from typing import Annotated, Any

import numpy as np
from numpy.typing import NDArray
from pydantic import Field, PlainSerializer, PlainValidator, WithJsonSchema

FloatArray = NDArray[np.float64]


def _coerce_points(value: Any) -> FloatArray:
    array = np.array(value, dtype=np.float64)
    if array.ndim != 2 or array.shape[1] != 2:
        raise ValueError(f"expected an (N, 2) array of plane points, got shape {array.shape}")
    array.setflags(write=False)
    return array


def _dump_points(value: FloatArray) -> list[list[float]]:
    return [[float(x), float(y)] for x, y in value]


# Points are stored as read-only (N, 2) float64 arrays and serialize as nested lists.
# The alias keeps the array representation swappable in one place.
Points = Annotated[
    FloatArray,
    PlainValidator(_coerce_points),
    PlainSerializer(_dump_points, return_type=list[list[float]]),
    WithJsonSchema(
        {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        }
    ),
]

# Parameter of the L_lambda, M_lambda and trigonometric families
Lambda = Annotated[float, Field(ge=0.0, lt=1.0)]

# Number of polygon vertices for a family sample
PointCount = Annotated[int, Field(ge=64, le=100_000)]

PositiveFloat = Annotated[float, Field(gt=0.0)]
