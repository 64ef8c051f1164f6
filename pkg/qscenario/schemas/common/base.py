import numpy as np
from pydantic import BaseModel, ConfigDict
from typing_extensions import Self


class FrozenModel(BaseModel):
    """Abstract Immutable Model"""

    model_config = ConfigDict(frozen=True, extra="forbid")


class ArrayModel(FrozenModel):
    """Abstract Immutable Model holding numpy arrays.

    Equality compares array fields element-wise, instances are not hashable.
    """

    def __eq__(self: Self, other: object) -> bool:
        if not isinstance(other, self.__class__):
            return NotImplemented
        for _name in self.__class__.model_fields:
            _left, _right = getattr(self, _name), getattr(other, _name)
            if isinstance(_left, np.ndarray) or isinstance(_right, np.ndarray):
                if not np.array_equal(_left, _right):
                    return False
            elif _left != _right:
                return False
        return True

    __hash__ = None

