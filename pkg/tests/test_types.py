"""Tests for type aliases and validation."""

import numpy as np
import pytest
from pydantic import BaseModel, ConfigDict, TypeAdapter, ValidationError

from csf.types import Lambda, PointCount, Points


class TestPointsTypeAlias:
    """Test Points coercion and serialization."""

    def test_list_is_coerced_to_array(self) -> None:
        """Nested lists become a float64 (N, 2) array."""
        points = TypeAdapter(Points).validate_python([[0, 0], [1, 0], [1, 1]])

        assert isinstance(points, np.ndarray)
        assert points.dtype == np.float64
        assert points.shape == (3, 2)

    def test_result_is_read_only(self) -> None:
        """Validated points cannot be modified in place."""
        points = TypeAdapter(Points).validate_python([[0.0, 0.0], [1.0, 2.0]])

        with pytest.raises(ValueError):
            points[0, 0] = 5.0

    def test_input_array_is_copied(self) -> None:
        """Changing the source array does not leak into the validated value."""
        source = np.array([[0.0, 0.0], [1.0, 2.0]])
        points = TypeAdapter(Points).validate_python(source)
        source[0, 0] = 9.0

        assert points[0, 0] == 0.0

    @pytest.mark.parametrize(
        "value",
        [
            [1.0, 2.0, 3.0],
            [[1.0, 2.0, 3.0]],
            [[[1.0, 2.0]]],
        ],
    )
    def test_wrong_shape_invalid(self, value: object) -> None:
        """Anything but an (N, 2) array is rejected."""
        with pytest.raises(ValidationError):
            TypeAdapter(Points).validate_python(value)

    def test_serializes_as_nested_lists(self) -> None:
        """JSON dumps carry plain lists of coordinate pairs."""

        class TestModel(BaseModel):
            model_config = ConfigDict(arbitrary_types_allowed=True)

            points: Points

        model = TestModel(points=[[0.5, -1.0], [2.0, 3.0]])

        assert model.model_dump(mode="json") == {"points": [[0.5, -1.0], [2.0, 3.0]]}


class TestBoundedAliases:
    """Test Lambda and PointCount bounds."""

    def test_lambda_bounds(self) -> None:
        """Lambda accepts [0, 1) only."""
        adapter = TypeAdapter(Lambda)

        assert adapter.validate_python(0.0) == 0.0
        assert adapter.validate_python(0.48) == 0.48
        with pytest.raises(ValidationError):
            adapter.validate_python(1.0)
        with pytest.raises(ValidationError):
            adapter.validate_python(-0.1)

    def test_point_count_bounds(self) -> None:
        """PointCount rejects resolutions too coarse to resolve loops."""
        adapter = TypeAdapter(PointCount)

        assert adapter.validate_python(64) == 64
        with pytest.raises(ValidationError):
            adapter.validate_python(63)
        with pytest.raises(ValidationError):
            adapter.validate_python(100_001)
