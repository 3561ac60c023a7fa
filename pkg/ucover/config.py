"""Settings and experiment configuration for ucover."""

import json
import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ucover.core import (
    CriticalScale,
    Explicit,
    PowerLaw,
    MeasureBase,
    ScheduleBase,
    make_measure,
)

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Runtime settings, read from UCOVER_* environment variables or a .env file."""

    model_config = SettingsConfigDict(env_prefix="UCOVER_", env_file=".env", extra="ignore")

    threads: int = Field(
        default_factory=lambda: os.cpu_count() or 1, ge=1, description="Worker threads for trials"
    )
    log_level: str = Field(default="INFO", description="Logging level")
    log_format: Literal["text", "json"] = Field(default="text", description="Log record format")
    max_grid_bits: int = Field(default=34, ge=1, description="Guard on m*d for grid allocation")
    max_grid_bytes: int = Field(
        default=8 * 2**30, ge=1, description="Guard on the working memory of one grid rasterization"
    )
    chunk_size: int = Field(default=65536, ge=1, description="Samples per streaming block")
    output_dir: str = Field(default=".", description="Base directory for relative output paths")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings instance."""
    return Settings()


class ScheduleSpec(BaseModel):
    """Declarative radius schedule as it appears on the command line or in YAML."""

    family: Literal["power", "critical", "explicit"] = Field(
        default="power", description="Schedule family"
    )
    c: float = Field(default=1.0, gt=0, description="Scale constant")
    alpha: Optional[float] = Field(default=None, gt=0, description="Power-law exponent")
    values: Optional[List[float]] = Field(default=None, description="Explicit radii")

    @model_validator(mode="after")
    def _check_family(self) -> "ScheduleSpec":
        if self.family == "power" and self.alpha is None:
            raise ValueError("power family needs alpha")
        if self.family == "explicit" and not self.values:
            raise ValueError("explicit family needs values")
        return self

    def build(self, d: int) -> ScheduleBase:
        """Instantiate the schedule for dimension d."""
        if self.family == "power":
            return PowerLaw(c=self.c, alpha=self.alpha)
        if self.family == "critical":
            return CriticalScale(c=self.c, d=d)
        return Explicit(values=tuple(self.values))


class ExperimentConfig(BaseModel):
    """A reproducible covering experiment: one schedule, one measure, one finite window."""

    d: int = Field(default=1, ge=1, description="Torus dimension")
    support_dim: Optional[int] = Field(default=None, ge=1, description="Sub-torus dimension")
    schedule: ScheduleSpec = Field(default_factory=lambda: ScheduleSpec(alpha=0.5))
    seeds: List[int] = Field(default_factory=lambda: [1], description="Base seeds")
    m: int = Field(default=16, ge=1, description="Grid resolution bits per axis")
    p: int = Field(default=256, ge=1, description="Tail index (first checkpoint)")
    n_max: int = Field(default=65536, ge=1, description="Last checkpoint")
    m_lo: Optional[int] = Field(default=None, ge=0, description="Coarsest box-count level")
    m_hi: Optional[int] = Field(default=None, ge=1, description="Finest box-count level")
    statistic: Literal["box_dim", "covered_fraction", "full_cover"] = Field(default="box_dim")

    @model_validator(mode="after")
    def _check_window(self) -> "ExperimentConfig":
        if self.n_max < self.p:
            raise ValueError(f"n_max={self.n_max} below p={self.p}")
        if self.support_dim is not None and self.support_dim > self.d:
            raise ValueError(f"support_dim={self.support_dim} exceeds d={self.d}")
        return self

    def build_schedule(self) -> ScheduleBase:
        """Radius schedule of the experiment."""
        return self.schedule.build(self.d)

    def build_measure(self) -> MeasureBase:
        """Sampling measure of the experiment."""
        return make_measure(self.d, self.support_dim)

    def box_window(self) -> Tuple[int, int]:
        """Box-counting levels (m_lo, m_hi), defaulting to the upper half of the grid."""
        m_hi = self.m_hi if self.m_hi is not None else self.m
        m_lo = self.m_lo if self.m_lo is not None else max(0, m_hi // 2)
        return m_lo, m_hi

    @classmethod
    def from_yaml(cls, yaml_path: str) -> "ExperimentConfig":
        """Load an experiment from a YAML file.

        Args:
            yaml_path: Path to YAML experiment file

        Returns:
            ExperimentConfig instance

        Raises:
            FileNotFoundError: If file doesn't exist
            ValueError: If YAML is invalid
        """
        path = Path(yaml_path)
        if not path.exists():
            raise FileNotFoundError(f"Experiment file not found: {yaml_path}")

        try:
            with open(path) as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ValueError(f"Invalid YAML in experiment file: {e}")

        return cls.model_validate(data)

    def to_yaml(self, yaml_path: str) -> None:
        """Save the experiment to a YAML file.

        Args:
            yaml_path: Path to save YAML file
        """
        path = Path(yaml_path)
        path.parent.mkdir(parents=True, exist_ok=True)

        with open(path, "w") as f:
            yaml.safe_dump(self.model_dump(mode="json"), f, default_flow_style=False)

        logger.info(f"Saved experiment to {yaml_path}")


def canonical_json(config: Any) -> str:
    """Canonical JSON of a config: sorted keys, compact separators."""
    if isinstance(config, BaseModel):
        config = config.model_dump(mode="json")
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


