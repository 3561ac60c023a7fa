"""Dyadic grid approximations of covering sets on the torus."""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ucover.config import get_settings
from ucover.core import HALF, CriticalScale, ScheduleBase, Stream
from ucover.errors import ContractViolation, DomainError, ResourceLimitError

logger = logging.getLogger(__name__)

CAVEAT = (
    "finite window: the grid approximates one tail term (fixed p, checkpoints up to n_max) "
    "of U(omega, l); the truncation bias is not quantified"
)


@dataclass(frozen=True)
class GridCover:
    """Cell-center occupancy of the dyadic grid with 2^m cells per axis."""

    d: int
    """Dimension."""

    m: int
    """Resolution bits per axis."""

    cells: np.ndarray
    """Boolean array of shape (2^m,)*d; C order is the row-major bit order over (i_1,...,i_d)."""

    def __post_init__(self) -> None:
        side = 1 << self.m
        if self.cells.shape != (side,) * self.d or self.cells.dtype != np.bool_:
            raise ContractViolation(
                f"cells must be a bool array of shape {(side,) * self.d}, got "
                f"{self.cells.dtype} {self.cells.shape}"
            )

    @classmethod
    def empty(cls, d: int, m: int) -> "GridCover":
        """Grid with no cell set."""
        check_grid_bits(d, m)
        return cls(d=d, m=m, cells=np.zeros((1 << m,) * d, dtype=bool))

    @classmethod
    def full(cls, d: int, m: int) -> "GridCover":
        """Grid with every cell set."""
        check_grid_bits(d, m)
        return cls(d=d, m=m, cells=np.ones((1 << m,) * d, dtype=bool))

    @property
    def side(self) -> int:
        """Cells per axis."""
        return 1 << self.m

    @property
    def count(self) -> int:
        """Number of set cells."""
        return int(np.count_nonzero(self.cells))

    @property
    def mass(self) -> float:
        """Fraction of set cells: the grid estimate of the set's Lebesgue measure."""
        return self.count / self.cells.size

    def centers(self) -> np.ndarray:
        """Centers of the set cells, shape (count, d)."""
        idx = np.argwhere(self.cells)
        return (idx + 0.5) / self.side

    def __and__(self, other: "GridCover") -> "GridCover":
        if (self.d, self.m) != (other.d, other.m):
            raise ContractViolation("grids of different shape")
        return GridCover(d=self.d, m=self.m, cells=self.cells & other.cells)

    def __or__(self, other: "GridCover") -> "GridCover":
        if (self.d, self.m) != (other.d, other.m):
            raise ContractViolation("grids of different shape")
        return GridCover(d=self.d, m=self.m, cells=self.cells | other.cells)

    def difference(self, other: "GridCover") -> "GridCover":
        """Cells set here but not in other."""
        if (self.d, self.m) != (other.d, other.m):
            raise ContractViolation("grids of different shape")
        return GridCover(d=self.d, m=self.m, cells=self.cells & ~other.cells)


# int32 difference array, one int32 temporary of the same size, two bool grids
GRID_BYTES_PER_CELL = 10


def grid_working_bytes(d: int, m: int) -> int:
    """Estimated peak memory of rasterizing one d-dimensional grid with 2^m cells per axis."""
    return GRID_BYTES_PER_CELL * ((1 << m) + 1) ** d


def check_grid_bits(d: int, m: int) -> None:
    """Refuse grids over the m*d guard or the working-memory guard.

    Raises:
        ResourceLimitError: If m*d is over settings.max_grid_bits, or the estimated
            working memory is over settings.max_grid_bytes
    """
    settings = get_settings()
    limit = settings.max_grid_bits
    if m < 0 or d < 1:
        raise ContractViolation(f"invalid grid shape d={d}, m={m}")
    if m * d > limit:
        raise ResourceLimitError(f"grid with m*d = {m * d} exceeds the guard of {limit} bits")
    needed = grid_working_bytes(d, m)
    if needed > settings.max_grid_bytes:
        raise ResourceLimitError(
            f"grid d={d} m={m} needs about {needed / 2**30:.2f} GiB, over the guard of "
            f"{settings.max_grid_bytes / 2**30:.2f} GiB"
        )


def _axis_segments(x: np.ndarray, r: np.ndarray, m: int) -> tuple:
    """Cell-index segments whose centers lie within r of x along one axis.

    Each ball yields at most two half-open, non-wrapping segments [start, stop).

    Returns:
        (starts, stops), both int64 arrays of shape (n, 2)
    """
    side = 1 << m
    n = x.shape[0]
    starts = np.zeros((n, 2), dtype=np.int64)
    stops = np.zeros((n, 2), dtype=np.int64)

    # center (i + 0.5) / side lies in (x - r, x + r)  <=>  lo < i < hi
    lo = np.floor((x - r) * side - 0.5).astype(np.int64) + 1
    hi = np.ceil((x + r) * side - 0.5).astype(np.int64) - 1
    count = hi - lo + 1

    full = (count >= side) | (r >= HALF)
    partial = ~full & (count > 0)

    starts[full, 0] = 0
    stops[full, 0] = side

    first = np.mod(lo[partial], side)
    end = first + count[partial]
    starts[partial, 0] = first
    stops[partial, 0] = np.minimum(end, side)
    starts[partial, 1] = 0
    stops[partial, 1] = np.maximum(end - side, 0)
    return starts, stops


def union_mask(points: np.ndarray, r: float, m: int) -> np.ndarray:
    """Rasterize a union of open max-norm balls of equal radius.

    Per axis each ball becomes at most two wrapped cell segments; their
    products are accumulated in a d-dimensional int32 difference array, so the
    cost is O(balls * 4^d + cells).

    Args:
        points: Ball centers, shape (n, d)
        r: Common radius
        m: Resolution bits per axis

    Returns:
        Boolean array of shape (2^m,)*d
    """
    points = np.asarray(points, dtype=np.float64)
    n, d = points.shape
    side = 1 << m
    if n == 0 or r <= 0:
        return np.zeros((side,) * d, dtype=bool)
    if r >= HALF:
        return np.ones((side,) * d, dtype=bool)

    radius = np.full(n, float(r))
    segments = [_axis_segments(points[:, k], radius, m) for k in range(d)]

    shape = (side + 1,) * d
    flat_parts: List[np.ndarray] = []
    sign_parts: List[np.ndarray] = []
    for combo in range(1 << d):
        seg = [(combo >> k) & 1 for k in range(d)]
        lo = [segments[k][0][:, seg[k]] for k in range(d)]
        hi = [segments[k][1][:, seg[k]] for k in range(d)]
        valid = np.ones(n, dtype=bool)
        for k in range(d):
            valid &= hi[k] > lo[k]
        if not valid.any():
            continue
        lo = [a[valid] for a in lo]
        hi = [a[valid] for a in hi]
        for corner in range(1 << d):
            index = []
            flips = 0
            for k in range(d):
                if (corner >> k) & 1:
                    index.append(hi[k])
                    flips += 1
                else:
                    index.append(lo[k])
            flat_parts.append(np.ravel_multi_index(tuple(index), shape))
            sign_parts.append(np.full(index[0].shape[0], -1 if flips % 2 else 1, dtype=np.int32))

    if not flat_parts:
        return np.zeros((side,) * d, dtype=bool)

    diff = np.zeros(int(np.prod(shape)), dtype=np.int32)
    np.add.at(diff, np.concatenate(flat_parts), np.concatenate(sign_parts))
    diff = diff.reshape(shape)
    for axis in range(d):
        np.cumsum(diff, axis=axis, dtype=np.int32, out=diff)
    return diff[(slice(0, side),) * d] > 0


def dyadic_ladder(p: int, n_max: int) -> List[int]:
    """Checkpoints p, then the powers of two between p and n_max, then n_max."""
    if p < 1 or n_max < p:
        raise ContractViolation(f"invalid window p={p}, n_max={n_max}")
    ladder = {p, n_max}
    power = 1
    while power < n_max:
        if power > p:
            ladder.add(power)
        power <<= 1
    return sorted(ladder)


def _check_checkpoints(stream: Stream, p: int, checkpoints: Sequence[int]) -> List[int]:
    checkpoints = [int(n) for n in checkpoints]
    if not checkpoints:
        raise ContractViolation("checkpoints must be nonempty")
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ContractViolation("checkpoints must be strictly increasing")
    if checkpoints[0] < p:
        raise ContractViolation(f"checkpoint {checkpoints[0]} below tail index p={p}")
    if checkpoints[-1] > stream.capacity:
        raise ResourceLimitError(
            f"checkpoint {checkpoints[-1]} beyond stream capacity {stream.capacity}"
        )
    return checkpoints


def build_cover_grid(
    stream: Stream,
    schedule: ScheduleBase,
    p: int,
    checkpoints: Sequence[int],
    m: int,
) -> GridCover:
    """Grid of the intersection over checkpoints N of the unions of B(omega_n, l_N), n <= N.

    Args:
        stream: Sample stream
        schedule: Radius schedule
        p: Tail index; every checkpoint must be >= p
        checkpoints: Strictly increasing checkpoints N
        m: Resolution bits per axis

    Returns:
        GridCover of the finite-window covering set

    Raises:
        ResourceLimitError: If m*d is over the memory guard
    """
    d = stream.d
    check_grid_bits(d, m)
    checkpoints = _check_checkpoints(stream, p, checkpoints)

    points = stream.block(1, checkpoints[-1] + 1)
    cells = np.ones((1 << m,) * d, dtype=bool)
    for n in checkpoints:
        cells &= union_mask(points[:n], schedule.radius_at(n), m)
        if not cells.any():
            logger.debug(f"Grid empty after checkpoint N={n}")
            break

    grid = GridCover(d=d, m=m, cells=cells)
    logger.debug(
        f"Built cover grid d={d} m={m} over {len(checkpoints)} checkpoints: mass={grid.mass:.6f}"
    )
    return grid


def liminf_witness_grid(
    stream: Stream, c: float, d: int, theta: float, l: int, q: int, m: int
) -> GridCover:
    """Grid of the intersection of F_j for j = l..q.

    F_j is the union of B(omega_k, l_{n_{j+1}}) over n_{j-1} < k <= n_j, with
    l_n = c n^(-1/d) and n_j the theta-ladder. The grid mass estimates the
    total mass of mu_{l,q}, Lebesgue measure restricted to the intersection.

    Raises:
        DomainError: If l < 1 or q < l
    """
    from ucover.growth.ladder import ladder_indices

    if stream.d != d:
        raise ContractViolation(f"stream of dimension {stream.d} for d={d}")
    if l < 1 or q < l:
        raise DomainError(f"need 1 <= l <= q, got l={l}, q={q}")
    check_grid_bits(d, m)

    schedule = CriticalScale(c=c, d=d)
    n = ladder_indices(theta, q + 1)
    if n[q] > stream.capacity:
        raise ResourceLimitError(f"ladder index {n[q]} beyond stream capacity {stream.capacity}")

    points = stream.block(1, n[q] + 1)
    cells = np.ones((1 << m,) * d, dtype=bool)
    for j in range(l, q + 1):
        cells &= union_mask(points[n[j - 1] : n[j]], schedule.radius_at(n[j + 1]), m)
        if not cells.any():
            break
    return GridCover(d=d, m=m, cells=cells)


def covered_fraction(grid: GridCover) -> float:
    """Fraction of grid cells set."""
    return grid.mass
