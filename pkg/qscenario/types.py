from dataclasses import dataclass
from numbers import Complex, Real
from typing import TYPE_CHECKING, Any

import numpy as np
from pydantic import GetCoreSchemaHandler, GetJsonSchemaHandler
from pydantic.json_schema import JsonSchemaValue
from pydantic_core import CoreSchema, PydanticCustomError
from pydantic_core.core_schema import (
    no_info_plain_validator_function,
    plain_serializer_function_ser_schema,
)
from typing_extensions import Self

__all__ = (
    "ComplexScalar",
    "ComplexVector",
    "ComplexMatrix",
    "RealArray",
    "as_complex",
)


def as_complex(value: Any) -> complex:
    """Convert a number or a ``[re, im]`` pair into a complex number.

    Parameters
    ----------
    value : Any
        Complex, real, or two-element sequence of reals.

    Returns
    -------
    complex
        Converted value.
    """
    if isinstance(value, (Complex, np.number)):
        return complex(value)
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        _re, _im = value
        if isinstance(_re, Real) and isinstance(_im, Real):
            return complex(float(_re), float(_im))
    raise PydanticCustomError(
        "complex_invalid",
        "Value {value!r} is neither a number nor a [re, im] pair.",
        {"value": value},
    )


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _pairs(array: np.ndarray) -> list:
    if array.ndim == 1:
        return [[float(_v.real), float(_v.imag)] for _v in array]
    return [_pairs(_row) for _row in array]


if TYPE_CHECKING:
    ComplexScalar = complex
    ComplexVector = np.ndarray
    ComplexMatrix = np.ndarray
    RealArray = np.ndarray
else:

    @dataclass()
    class ComplexVector:
        """One dimensional read-only complex128 array.

        Accepts numpy arrays, sequences of numbers, or sequences of [re, im] pairs.
        Serializes to JSON as a list of [re, im] pairs.
        """

        @classmethod
        def _validate(cls: type[Self], value: Any) -> np.ndarray:
            if isinstance(value, np.ndarray):
                array = np.array(value, dtype=np.complex128, copy=True)
            else:
                array = np.array([as_complex(_v) for _v in value], dtype=np.complex128)
            if array.ndim != 1:
                raise PydanticCustomError(
                    "complex_vector_shape",
                    "Expected a one dimensional array, got shape {shape}.",
                    {"shape": array.shape},
                )
            if not np.all(np.isfinite(array)):
                raise PydanticCustomError(
                    "complex_vector_finite", "Array contains non-finite values."
                )
            return _freeze(array)

        @classmethod
        def __get_pydantic_core_schema__(
            cls: type[Self],
            source: Any,
            handler: GetCoreSchemaHandler,
        ) -> CoreSchema:
            return no_info_plain_validator_function(
                function=cls._validate,
                serialization=plain_serializer_function_ser_schema(
                    _pairs, when_used="json"
                ),
            )

        @classmethod
        def __get_pydantic_json_schema__(
            cls: type[Self],
            schema: CoreSchema,
            handler: GetJsonSchemaHandler,
        ) -> JsonSchemaValue:
            return {
                "type": "array",
                "items": {"type": "array", "items": {"type": "number"}},
            }

        __hash__ = object.__hash__

    @dataclass()
    class ComplexMatrix:
        """Two dimensional read-only complex128 array.

        Rows follow the ``ComplexVector`` input rules.
        """

        @classmethod
        def _validate(cls: type[Self], value: Any) -> np.ndarray:
            if isinstance(value, np.ndarray):
                array = np.array(value, dtype=np.complex128, copy=True)
            else:
                array = np.array(
                    [[as_complex(_v) for _v in _row] for _row in value],
                    dtype=np.complex128,
                )
            if array.ndim != 2:
                raise PydanticCustomError(
                    "complex_matrix_shape",
                    "Expected a two dimensional array, got shape {shape}.",
                    {"shape": array.shape},
                )
            if not np.all(np.isfinite(array)):
                raise PydanticCustomError(
                    "complex_matrix_finite", "Array contains non-finite values."
                )
            return _freeze(array)

        @classmethod
        def __get_pydantic_core_schema__(
            cls: type[Self],
            source: Any,
            handler: GetCoreSchemaHandler,
        ) -> CoreSchema:
            return no_info_plain_validator_function(
                function=cls._validate,
                serialization=plain_serializer_function_ser_schema(
                    _pairs, when_used="json"
                ),
            )

        @classmethod
        def __get_pydantic_json_schema__(
            cls: type[Self],
            schema: CoreSchema,
            handler: GetJsonSchemaHandler,
        ) -> JsonSchemaValue:
            return {
                "type": "array",
                "items": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "number"}},
                },
            }

        __hash__ = object.__hash__

    @dataclass()
    class RealArray:
        """Read-only float64 array of one or two dimensions, finite values only."""

        @classmethod
        def _validate(cls: type[Self], value: Any) -> np.ndarray:
            try:
                array = np.array(value, dtype=np.float64, copy=True)
            except (TypeError, ValueError) as _ex:
                raise PydanticCustomError(
                    "real_array_invalid", "Value is not an array of reals."
                ) from _ex
            if array.ndim not in (1, 2) or array.size == 0:
                raise PydanticCustomError(
                    "real_array_shape",
                    "Expected a non-empty one or two dimensional array, got shape "
                    "{shape}.",
                    {"shape": array.shape},
                )
            if not np.all(np.isfinite(array)):
                raise PydanticCustomError(
                    "real_array_finite", "Array contains non-finite values."
                )
            return _freeze(array)

        @classmethod
        def __get_pydantic_core_schema__(
            cls: type[Self],
            source: Any,
            handler: GetCoreSchemaHandler,
        ) -> CoreSchema:
            return no_info_plain_validator_function(
                function=cls._validate,
                serialization=plain_serializer_function_ser_schema(
                    lambda array: array.tolist(), when_used="json"
                ),
            )

        @classmethod
        def __get_pydantic_json_schema__(
            cls: type[Self],
            schema: CoreSchema,
            handler: GetJsonSchemaHandler,
        ) -> JsonSchemaValue:
            return {"type": "array", "items": {"type": "number"}}

        __hash__ = object.__hash__

    @dataclass()
    class ComplexScalar:
        """Complex number, given as a number, a string or a [re, im] pair.

        Serializes to JSON as a [re, im] pair.
        """

        @classmethod
        def __get_pydantic_core_schema__(
            cls: type[Self],
            source: Any,
            handler: GetCoreSchemaHandler,
        ) -> CoreSchema:
            return no_info_plain_validator_function(
                function=as_complex,
                serialization=plain_serializer_function_ser_schema(
                    lambda value: [value.real, value.imag], when_used="json"
                ),
            )

        @classmethod
        def __get_pydantic_json_schema__(
            cls: type[Self],
            schema: CoreSchema,
            handler: GetJsonSchemaHandler,
        ) -> JsonSchemaValue:
            return {"type": "array", "items": {"type": "number"}}

        __hash__ = object.__hash__
