"""Integer ladders n_j ~ theta^j."""

import math
from typing import List

from ucover.core import STREAM_CAPACITY
from ucover.errors import ContractViolation, DomainError, ResourceLimitError


def _power(theta: float, j: int) -> int:
    if float(theta).is_integer():
        return int(theta) ** j
    try:
        return math.ceil(theta**j)
    except OverflowError:
        raise ResourceLimitError(f"theta^{j} overflows for theta={theta}")


def ladder_indices(theta: float, J: int) -> List[int]:
    """The ladder n_0, ..., n_J with n_j = max(ceil(theta^j), n_{j-1} + 1).

    Raises:
        DomainError: If theta <= 1
        ResourceLimitError: If an index exceeds the stream capacity
    """
    if not theta > 1.0:
        raise DomainError(f"theta must exceed 1, got {theta}")
    if J < 0:
        raise ContractViolation(f"ladder index must be >= 0, got {J}")

    indices: List[int] = []
    previous = 0
    for j in range(J + 1):
        value = max(_power(theta, j), previous + 1)
        if value > STREAM_CAPACITY:
            raise ResourceLimitError(f"ladder index n_{j} = {value} beyond stream capacity")
        indices.append(value)
        previous = value
    return indices


def ladder(theta: float, j: int) -> int:
    """n_j of the strictly increasing integer ladder over theta^j."""
    return ladder_indices(theta, j)[-1]
