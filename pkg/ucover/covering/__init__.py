"""Grid approximations of covering sets, box counting and cross-seed probes."""

from ucover.covering.boxdim import box_count, box_counts, estimate_box_dim
from ucover.covering.export import dump_grid, grid_from_bytes, grid_to_bytes, load_grid
from ucover.covering.grid import (
    GridCover,
    build_cover_grid,
    covered_fraction,
    dyadic_ladder,
    liminf_witness_grid,
    union_mask,
)
from ucover.covering.probe import ProbeResult, zero_one_probe

__all__ = [
    "GridCover",
    "build_cover_grid",
    "covered_fraction",
    "dyadic_ladder",
    "liminf_witness_grid",
    "union_mask",
    "box_count",
    "box_counts",
    "estimate_box_dim",
    "zero_one_probe",
    "ProbeResult",
    "dump_grid",
    "load_grid",
    "grid_to_bytes",
    "grid_from_bytes",
]
