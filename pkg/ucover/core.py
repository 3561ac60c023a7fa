"""Core types for ucover: torus geometry, radius schedules, measures and sample streams."""

import logging
import math
from abc import ABC, abstractmethod
from typing import Annotated, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ucover.errors import ContractViolation, ResourceLimitError, ScheduleIndexError

logger = logging.getLogger(__name__)

HALF = 0.5
"""Radius at which a max-norm ball covers the whole torus."""

STREAM_CAPACITY = 2**62
"""Largest index a seeded stream will serve."""

_DOUBLE_SCALE = 2.0**-53


class TorusPoint(BaseModel):
    """A point of the d-torus [0,1)^d."""

    model_config = ConfigDict(frozen=True)

    coords: Tuple[float, ...] = Field(..., description="Torus coordinates, each in [0, 1)")

    @field_validator("coords")
    @classmethod
    def _check_coords(cls, coords: Tuple[float, ...]) -> Tuple[float, ...]:
        if len(coords) < 1:
            raise ValueError("a torus point needs at least one coordinate")
        for value in coords:
            if not 0.0 <= value < 1.0:
                raise ValueError(f"coordinate {value} outside [0, 1)")
        return coords

    @classmethod
    def of(cls, *coords: float) -> "TorusPoint":
        """Build a point from positional coordinates."""
        return cls(coords=tuple(float(v) for v in coords))

    @property
    def d(self) -> int:
        """Ambient dimension."""
        return len(self.coords)

    def array(self) -> np.ndarray:
        """Coordinates as a float64 vector."""
        return np.asarray(self.coords, dtype=np.float64)


PointLike = Union[TorusPoint, ArrayLike]


def as_coords(x: PointLike) -> np.ndarray:
    """Coerce a point-like value to a float64 coordinate array."""
    if isinstance(x, TorusPoint):
        return x.array()
    return np.asarray(x, dtype=np.float64)


def wrap_dist(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """Torus max-norm distance with broadcasting over leading axes.

    Args:
        a: Points, coordinates on the last axis
        b: Points, coordinates on the last axis

    Returns:
        Array of distances in [0, 1/2]
    """
    diff = np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)) % 1.0
    return np.max(np.minimum(diff, 1.0 - diff), axis=-1)


def torus_dist(x: PointLike, y: PointLike) -> float:
    """Distance between two torus points under the wrapped max norm.

    Args:
        x: First point
        y: Second point

    Returns:
        max_i min(|x_i - y_i|, 1 - |x_i - y_i|)

    Raises:
        ContractViolation: If the points have different dimensions
    """
    a, b = as_coords(x), as_coords(y)
    if a.shape != b.shape or a.ndim != 1:
        raise ContractViolation(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(wrap_dist(a, b))


def in_open_ball(dist: ArrayLike, r: float) -> np.ndarray:
    """Membership in an open ball given distances to its center.

    A radius of 1/2 or more is the whole torus.
    """
    dist = np.asarray(dist)
    if r >= HALF:
        return np.ones(dist.shape, dtype=bool)
    return dist < r


# ---------------------------------------------------------------------------
# Radius schedules
# ---------------------------------------------------------------------------


class ScheduleBase(BaseModel, ABC):
    """Common behaviour of radius schedules."""

    model_config = ConfigDict(frozen=True)

    @abstractmethod
    def radii(self, n: ArrayLike) -> np.ndarray:
        """Vectorized radii for 1-based indices."""

    @property
    def length(self) -> Optional[int]:
        """Number of available radii, None for an unbounded family."""
        return None

    @property
    def is_symbolic(self) -> bool:
        """True for analytic families."""
        return self.length is None

    def radius_at(self, n: int) -> float:
        """Radius l_n for a single index."""
        return float(self.radii(np.asarray([n]))[0])

    @staticmethod
    def _check_index(n: np.ndarray) -> None:
        if n.size and int(np.min(n)) < 1:
            raise ContractViolation(f"radius index must be >= 1, got {int(np.min(n))}")


class PowerLaw(ScheduleBase):
    """l_n = c * n^(-alpha)."""

    family: Literal["power"] = "power"
    c: float = Field(..., gt=0, description="Scale constant")
    alpha: float = Field(..., gt=0, description="Decay exponent")

    def radii(self, n: ArrayLike) -> np.ndarray:
        """Vectorized radii."""
        n = np.asarray(n, dtype=np.float64)
        self._check_index(n)
        return self.c * n ** (-self.alpha)


class CriticalScale(ScheduleBase):
    """l_n = c * n^(-1/d), the family where the dimension of U changes from 0 to d."""

    family: Literal["critical"] = "critical"
    c: float = Field(..., gt=0, description="Scale constant")
    d: int = Field(..., ge=1, description="Torus dimension")

    @property
    def alpha(self) -> float:
        """Equivalent power-law exponent 1/d."""
        return 1.0 / self.d

    def radii(self, n: ArrayLike) -> np.ndarray:
        """Vectorized radii."""
        n = np.asarray(n, dtype=np.float64)
        self._check_index(n)
        return self.c * n ** (-1.0 / self.d)


class Explicit(ScheduleBase):
    """A finite, explicitly listed prefix of radii."""

    family: Literal["explicit"] = "explicit"
    values: Tuple[float, ...] = Field(..., min_length=1, description="Radii l_1, l_2, ...")

    @field_validator("values")
    @classmethod
    def _check_values(cls, values: Tuple[float, ...]) -> Tuple[float, ...]:
        for i, value in enumerate(values):
            if value <= 0:
                raise ValueError(f"radius l_{i + 1} = {value} is not positive")
            if i and value > values[i - 1]:
                raise ValueError(f"radii increase at n={i + 1}")
        return values

    @property
    def length(self) -> Optional[int]:
        """Number of listed radii."""
        return len(self.values)

    def radii(self, n: ArrayLike) -> np.ndarray:
        """Vectorized lookup."""
        n = np.asarray(n, dtype=np.int64)
        self._check_index(n)
        if n.size and int(np.max(n)) > len(self.values):
            raise ScheduleIndexError(
                f"index {int(np.max(n))} past the end of an explicit schedule of length {len(self.values)}"
            )
        return np.asarray(self.values, dtype=np.float64)[n - 1]


RadiusSchedule = Annotated[Union[PowerLaw, CriticalScale, Explicit], Field(discriminator="family")]


def radius_at(schedule: ScheduleBase, n: int) -> float:
    """Return l_n of a schedule.

    Args:
        schedule: Radius schedule
        n: 1-based index

    Returns:
        Positive radius

    Raises:
        ScheduleIndexError: For an explicit schedule indexed past its end
    """
    return schedule.radius_at(n)


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------


class MeasureBase(BaseModel, ABC):
    """Common behaviour of sampling measures."""

    model_config = ConfigDict(frozen=True)

    d: int = Field(..., ge=1, description="Ambient torus dimension")

    @property
    @abstractmethod
    def support_dim(self) -> int:
        """Dimension of the support."""

    @property
    def homogeneous(self) -> bool:
        """Ball mass is the same at every point of the support."""
        return True

    @abstractmethod
    def support_distance(self, y: np.ndarray) -> float:
        """Max-norm distance from y to the support along the fixed axes."""

    def embed(self, u: np.ndarray) -> np.ndarray:
        """Place uniforms for the free axes into ambient coordinates."""
        if self.support_dim == self.d:
            return u
        out = np.zeros((u.shape[0], self.d), dtype=np.float64)
        out[:, : self.support_dim] = u
        return out

    def ball_mass(self, y: PointLike, r: float) -> float:
        """Mass of the open ball B(y, r)."""
        y = as_coords(y)
        if y.shape != (self.d,):
            raise ContractViolation(f"point of dimension {y.size} for a measure on T^{self.d}")
        if r < 0:
            raise ContractViolation(f"negative radius {r}")
        if r >= HALF:
            return 1.0
        if self.support_distance(y) >= r:
            return 0.0
        return min(1.0, (2.0 * r) ** self.support_dim)


class UniformTorus(MeasureBase):
    """Lebesgue measure on T^d."""

    kind: Literal["torus"] = "torus"

    @property
    def support_dim(self) -> int:
        """Full dimension."""
        return self.d

    def support_distance(self, y: np.ndarray) -> float:
        """Every point lies on the support."""
        return 0.0


class UniformSubtorus(MeasureBase):
    """Uniform measure on the sub-torus where coordinates d_support+1..d vanish."""

    kind: Literal["subtorus"] = "subtorus"
    d_support: int = Field(..., ge=1, description="Dimension of the supporting sub-torus")

    @model_validator(mode="after")
    def _check_dims(self) -> "UniformSubtorus":
        if self.d_support >= self.d:
            raise ValueError(f"d_support={self.d_support} must be below d={self.d}")
        return self

    @property
    def support_dim(self) -> int:
        """Dimension of the sub-torus."""
        return self.d_support

    def support_distance(self, y: np.ndarray) -> float:
        """Wrapped distance of the fixed coordinates to 0."""
        fixed = np.abs(np.asarray(y, dtype=np.float64)[self.d_support :]) % 1.0
        return float(np.max(np.minimum(fixed, 1.0 - fixed)))


MeasureModel = Annotated[Union[UniformTorus, UniformSubtorus], Field(discriminator="kind")]


def ball_mass(measure: MeasureBase, y: PointLike, r: float) -> float:
    """Measure of B(y, r), capped at 1.

    Args:
        measure: Sampling measure
        y: Ball center in the measure's ambient dimension
        r: Radius, nonnegative

    Returns:
        Mass in [0, 1]

    Raises:
        ContractViolation: For a negative radius or wrong dimension
    """
    return measure.ball_mass(y, r)


def local_dimension(
    measure: MeasureBase, y: PointLike, radii: Sequence[float]
) -> Tuple[float, float]:
    """Finite-scale upper and lower local dimension of a measure at y.

    Args:
        measure: Sampling measure
        y: Point
        radii: Radii in (0, 1), typically a decreasing ladder

    Returns:
        (max, min) of log mu(B(y,r)) / log r over the radii; infinite off the support
    """
    ratios = []
    for r in radii:
        mass = measure.ball_mass(y, r)
        if mass <= 0.0:
            ratios.append(math.inf)
        else:
            ratios.append(math.log(mass) / math.log(r))
    return max(ratios), min(ratios)


# ---------------------------------------------------------------------------
# Sample streams
# ---------------------------------------------------------------------------


class SampleStream:
    """Deterministic, random-access i.i.d. stream omega_1, omega_2, ... under a measure.

    Draws come from a Philox counter-based generator keyed by the seed. Output
    position P of the raw stream is word P % 4 of counter block P // 4, so any
    index range can be produced without generating the ones before it.
    """

    def __init__(self, seed: int, measure: MeasureBase):
        """Initialize sample stream.

        Args:
            seed: 64-bit seed
            measure: Sampling measure
        """
        self.seed = int(seed)
        self.measure = measure
        self._key = np.random.SeedSequence(self.seed).generate_state(2, dtype=np.uint64)

    def __repr__(self) -> str:
        return f"SampleStream(seed={self.seed}, measure={self.measure!r})"

    @property
    def d(self) -> int:
        """Ambient dimension."""
        return self.measure.d

    @property
    def capacity(self) -> int:
        """Largest addressable index."""
        return STREAM_CAPACITY

    def block(self, start: int, stop: int) -> np.ndarray:
        """Points for 1-based indices start..stop-1.

        Args:
            start: First index (>= 1)
            stop: One past the last index

        Returns:
            Array of shape (stop - start, d)
        """
        if start < 1 or stop < start:
            raise ContractViolation(f"invalid index range [{start}, {stop})")
        if stop - 1 > self.capacity:
            raise ResourceLimitError(f"index {stop - 1} beyond stream capacity")
        k = self.measure.support_dim
        first = (start - 1) * k
        count = (stop - start) * k
        generator = np.random.Philox(key=self._key, counter=first // 4)
        raw = generator.random_raw(first % 4 + count)[first % 4 :]
        u = (raw >> np.uint64(11)).astype(np.float64) * _DOUBLE_SCALE
        return self.measure.embed(u.reshape(stop - start, k))

    def sample(self, n: int) -> TorusPoint:
        """The point omega_n."""
        if n < 1:
            raise ContractViolation(f"sample index must be >= 1, got {n}")
        return TorusPoint(coords=tuple(float(v) for v in self.block(n, n + 1)[0]))


class ExplicitStream:
    """A finite stream with forced points, used to pin down configurations in tests."""

    def __init__(self, points: ArrayLike, measure: Optional[MeasureBase] = None):
        """Initialize explicit stream.

        Args:
            points: Array of shape (n, d) (or (n,) for d = 1) with coordinates in [0, 1)
            measure: Measure the points are attributed to (default: uniform on T^d)
        """
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        if points.size and (points.min() < 0.0 or points.max() >= 1.0):
            raise ContractViolation("explicit stream points must lie in [0, 1)")
        self.points = points
        self.measure = measure or UniformTorus(d=points.shape[1])
        self.seed = 0

    def __repr__(self) -> str:
        return f"ExplicitStream(n={len(self.points)}, d={self.d})"

    @property
    def d(self) -> int:
        """Ambient dimension."""
        return int(self.points.shape[1])

    @property
    def capacity(self) -> int:
        """Number of forced points."""
        return int(self.points.shape[0])

    def block(self, start: int, stop: int) -> np.ndarray:
        """Points for 1-based indices start..stop-1."""
        if start < 1 or stop < start:
            raise ContractViolation(f"invalid index range [{start}, {stop})")
        if stop - 1 > self.capacity:
            raise ResourceLimitError(
                f"index {stop - 1} beyond explicit stream capacity {self.capacity}"
            )
        return self.points[start - 1 : stop - 1]

    def sample(self, n: int) -> TorusPoint:
        """The point omega_n."""
        return TorusPoint(coords=tuple(float(v) for v in self.block(n, n + 1)[0]))


Stream = Union[SampleStream, ExplicitStream]


def sample(stream: Stream, n: int) -> TorusPoint:
    """Return omega_n of a stream.

    Args:
        stream: Seeded or explicit stream
        n: 1-based index

    Returns:
        The n-th point, deterministic in (seed, n)
    """
    return stream.sample(n)


def make_measure(d: int, support_dim: Optional[int] = None) -> MeasureBase:
    """Uniform measure on T^d, or on a coordinate sub-torus when support_dim < d."""
    if support_dim is None or support_dim == d:
        return UniformTorus(d=d)
    return UniformSubtorus(d=d, d_support=support_dim)
