"""
Contour Tools
This module reads and writes contour CSV files (`time,value_left_limit,value`) and the
staircase CSV (`x,value`).
"""

from io import StringIO
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from combs.errors import FileFormatError
from spaces.contour import Contour
from spaces.staircase import Staircase

from .comb_tools import DEFAULT_PRECISION, format_decimal, parse_number

CONTOUR_COLUMNS = ["time", "value_left_limit", "value"]
STAIRCASE_COLUMNS = ["x", "value"]


def read_contour_csv(path: Union[str, Path], exact: bool = False) -> Contour:
    """
    Read a contour CSV.

    Args:
        path: CSV file with header `time,value_left_limit,value`, times ascending
        exact: Read decimals as Fractions so that level crossings are exact

    Returns:
        The contour
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, ValueError) as e:
        raise FileFormatError(f"cannot read contour CSV {path}: {e}") from e
    if list(frame.columns) != CONTOUR_COLUMNS:
        raise FileFormatError(f"contour CSV must have columns {','.join(CONTOUR_COLUMNS)}")
    breakpoints = tuple(
        tuple(parse_number(value, exact) for value in row) for row in frame.itertuples(index=False)
    )
    return Contour(breakpoints)


def contour_to_csv(contour: Contour, precision: int = DEFAULT_PRECISION) -> str:
    rows = [[format_decimal(value, precision) for value in point] for point in contour.breakpoints]
    buffer = StringIO()
    pd.DataFrame(rows, columns=CONTOUR_COLUMNS).to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def write_contour_csv(
    contour: Contour, path: Optional[Union[str, Path]], precision: int = DEFAULT_PRECISION
) -> str:
    document = contour_to_csv(contour, precision)
    if path is not None:
        Path(path).write_text(document)
    return document


def staircase_to_csv(local_time: Staircase, precision: int = DEFAULT_PRECISION) -> str:
    """Breakpoints of the staircase, written as decimals."""
    rows = [[format_decimal(x, precision), format_decimal(value, precision)] for x, value in local_time.breakpoints]
    buffer = StringIO()
    pd.DataFrame(rows, columns=STAIRCASE_COLUMNS).to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def write_staircase_csv(
    local_time: Staircase, path: Optional[Union[str, Path]], precision: int = DEFAULT_PRECISION
) -> str:
    document = staircase_to_csv(local_time, precision)
    if path is not None:
        Path(path).write_text(document)
    return document
