"""ucover: simulation and numerical checks for uniform random covering sets on the d-torus."""

__version__ = "0.1.0a0"
__author__ = "ucover Contributors"
__license__ = "MIT"

from ucover.core import (
    CriticalScale,
    Explicit,
    ExplicitStream,
    PowerLaw,
    SampleStream,
    TorusPoint,
    UniformSubtorus,
    UniformTorus,
    ball_mass,
    radius_at,
    sample,
    torus_dist,
)
from ucover.errors import UcoverError

__all__ = [
    "CriticalScale",
    "Explicit",
    "ExplicitStream",
    "PowerLaw",
    "SampleStream",
    "TorusPoint",
    "UniformSubtorus",
    "UniformTorus",
    "ball_mass",
    "radius_at",
    "sample",
    "torus_dist",
    "UcoverError",
]
