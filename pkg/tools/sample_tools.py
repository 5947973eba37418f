"""
Sample Tools
This module serializes coalescent point process samples as JSON records.
"""

from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, model_validator

from combs.errors import FileFormatError
from spaces.coalescent import PointProcessSample


class SampleRecord(BaseModel):
    """JSON record of a coalescent point process sample."""
    T: float = Field(..., gt=0, description="Truncation height")
    epsilon: float = Field(..., gt=0, description="Cutoff on atom heights")
    seed: Optional[int] = Field(None, description="Seed the sample was drawn with")
    teeth: List[Tuple[float, float]] = Field([], description="Retained atoms (S_i, H_i)")
    terminal: Tuple[float, float] = Field(..., description="First atom (D, H) with H > T")

    @model_validator(mode="after")
    def check_terminal(self) -> "SampleRecord":
        if not self.terminal[1] > self.T:
            raise ValueError(f"terminal height {self.terminal[1]} does not exceed T = {self.T}")
        return self

    @classmethod
    def from_sample(cls, sample: PointProcessSample) -> "SampleRecord":
        return cls(
            T=sample.T,
            epsilon=sample.epsilon,
            seed=sample.seed,
            teeth=list(sample.atoms),
            terminal=sample.terminal,
        )

    def to_sample(self) -> PointProcessSample:
        return PointProcessSample(
            T=self.T,
            epsilon=self.epsilon,
            atoms=tuple(self.teeth),
            terminal=self.terminal,
            seed=self.seed,
        )


def write_sample_json(sample: PointProcessSample, path: Optional[Union[str, Path]]) -> str:
    """Write the sample record, or only return its JSON when path is None."""
    document = SampleRecord.from_sample(sample).model_dump_json(indent=2) + "\n"
    if path is not None:
        Path(path).write_text(document)
    return document


def read_sample_json(path: Union[str, Path]) -> PointProcessSample:
    try:
        record = SampleRecord.model_validate_json(Path(path).read_text())
    except ValidationError as e:
        raise FileFormatError(f"invalid sample JSON {path}: {e}") from e
    return record.to_sample()
