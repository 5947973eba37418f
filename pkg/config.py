"""
Configuration for the comb ultrametric command line, read from the environment.
Random seeds are never configured here; they are passed as --seed flags.
"""

import logging
import os
from typing import Mapping, Optional

from pydantic import BaseModel, Field, field_validator

ENVIRONMENT = {
    "precision": "COMB_PRECISION",
    "log_level": "COMB_LOG_LEVEL",
    "svg_width": "COMB_SVG_WIDTH",
    "svg_height": "COMB_SVG_HEIGHT",
}


class Settings(BaseModel):
    """Defaults of the command line, overridable by environment variables."""
    precision: int = Field(12, ge=1, le=17, description="Significant digits of decimal output")
    log_level: str = Field("WARNING", description="Logging level name")
    svg_width: int = Field(640, gt=40, description="Width of SVG figures in pixels")
    svg_height: int = Field(320, gt=40, description="Height of SVG figures in pixels")

    @field_validator("log_level")
    @classmethod
    def check_log_level(cls, value: str) -> str:
        value = value.upper()
        if not isinstance(logging.getLevelName(value), int):
            raise ValueError(f"unknown log level {value!r}")
        return value

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        environ = os.environ if environ is None else environ
        values = {name: environ[variable] for name, variable in ENVIRONMENT.items() if environ.get(variable)}
        return cls(**values)
