"""Grid dumps: packed bits with a UCGR header, and cell-index CSV rows."""

import logging
from pathlib import Path
from typing import Iterator, List, Tuple

import numpy as np

from ucover.covering.grid import GridCover, check_grid_bits
from ucover.errors import ContractViolation

logger = logging.getLogger(__name__)

MAGIC = b"UCGR"
HEADER_SIZE = 16


def grid_to_bytes(grid: GridCover) -> bytes:
    """Serialize a grid: 16-byte header then row-major bits, little-endian within each byte."""
    header = MAGIC + bytes([grid.d, grid.m]) + bytes(HEADER_SIZE - len(MAGIC) - 2)
    bits = np.packbits(grid.cells.ravel(order="C"), bitorder="little")
    return header + bits.tobytes()


def grid_from_bytes(data: bytes) -> GridCover:
    """Parse the output of grid_to_bytes.

    Raises:
        ContractViolation: On a bad magic or truncated payload
    """
    if len(data) < HEADER_SIZE or data[:4] != MAGIC:
        raise ContractViolation("not a UCGR grid dump")
    d, m = data[4], data[5]
    check_grid_bits(d, m)
    total = 1 << (m * d)
    payload = np.frombuffer(data[HEADER_SIZE:], dtype=np.uint8)
    if payload.size * 8 < total:
        raise ContractViolation(f"grid dump truncated: {payload.size} bytes for {total} cells")
    cells = np.unpackbits(payload, count=total, bitorder="little").astype(bool)
    return GridCover(d=d, m=m, cells=cells.reshape((1 << m,) * d))


def dump_grid(grid: GridCover, path: str) -> None:
    """Write a grid dump to a file."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(grid_to_bytes(grid))
    logger.info(f"Wrote grid d={grid.d} m={grid.m} ({grid.count} cells set) to {path}")


def load_grid(path: str) -> GridCover:
    """Read a grid dump from a file."""
    return grid_from_bytes(Path(path).read_bytes())


def grid_csv_header(grid: GridCover) -> List[str]:
    """Column names of the cell-index CSV."""
    return ["cell"] + [f"i{k + 1}" for k in range(grid.d)]


def grid_csv_rows(grid: GridCover) -> Iterator[Tuple[int, ...]]:
    """Rows (row-major cell index, i_1, ..., i_d) for every set cell."""
    flat = np.flatnonzero(grid.cells.ravel(order="C"))
    coords = np.unravel_index(flat, grid.cells.shape)
    for row in zip(flat.tolist(), *(c.tolist() for c in coords)):
        yield tuple(row)
