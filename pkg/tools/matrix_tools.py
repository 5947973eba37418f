"""
Matrix Tools
This module reads and writes distance matrices as CSV: n rows of n comma-separated
decimals, then an optional `masses,<m1>,...,<mn>` row. Points are numbered 0..n-1 by row.
"""

from fractions import Fraction
from io import StringIO
from pathlib import Path
from typing import List, Optional, Union

import pandas as pd

from combs.errors import FileFormatError
from spaces.ultrametric import UltrametricMatrix

from .comb_tools import DEFAULT_PRECISION, format_decimal, parse_number

MASSES_ROW = "masses"


def matrix_from_text(text: str) -> UltrametricMatrix:
    """
    Parse the matrix CSV format.

    Args:
        text: n rows of n decimals, optionally followed by the `masses` row

    Returns:
        The matrix, with masses when the file has them
    """
    lines = [line for line in text.splitlines() if line.strip()]
    masses: Optional[List[Fraction]] = None
    if lines and lines[-1].split(",", 1)[0].strip() == MASSES_ROW:
        masses = [parse_number(value, exact=True) for value in lines.pop().split(",")[1:]]
    if not lines:
        raise FileFormatError("matrix CSV has no distance rows")

    try:
        frame = pd.read_csv(StringIO("\n".join(lines)), header=None, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, ValueError) as e:
        raise FileFormatError(f"cannot read matrix CSV: {e}") from e
    if frame.isna().to_numpy().any():
        raise FileFormatError("matrix CSV rows have different lengths")
    if frame.shape[0] != frame.shape[1]:
        raise FileFormatError(f"expected n rows of n distances, got {frame.shape[0]} x {frame.shape[1]}")
    distances = [[float(parse_number(value)) for value in row] for row in frame.itertuples(index=False)]
    return UltrametricMatrix(distances, masses)


def read_matrix_csv(path: Union[str, Path]) -> UltrametricMatrix:
    return matrix_from_text(Path(path).read_text())


def _format_mass(mass: Fraction) -> str:
    return str(mass.numerator) if mass.denominator == 1 else f"{mass.numerator}/{mass.denominator}"


def matrix_to_csv(matrix: UltrametricMatrix, precision: int = DEFAULT_PRECISION) -> str:
    rows = [[format_decimal(value, precision) for value in row] for row in matrix.distances]
    buffer = StringIO()
    pd.DataFrame(rows).to_csv(buffer, header=False, index=False, lineterminator="\n")
    document = buffer.getvalue()
    if matrix.masses is not None:
        # masses stay exact
        document += ",".join([MASSES_ROW] + [_format_mass(mass) for mass in matrix.masses]) + "\n"
    return document


def write_matrix_csv(
    matrix: UltrametricMatrix,
    path: Optional[Union[str, Path]],
    precision: int = DEFAULT_PRECISION,
) -> str:
    """Write the matrix CSV, or only return its text when path is None."""
    document = matrix_to_csv(matrix, precision)
    if path is not None:
        Path(path).write_text(document)
    return document
