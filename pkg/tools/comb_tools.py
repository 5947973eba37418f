"""
Comb Tools
This module provides the number formats and the comb file format used by the command line.
"""

from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

import numpy as np

from combs.comb import Comb, CombPoint, Face, Real
from combs.errors import FileFormatError

DEFAULT_PRECISION = 12


def parse_number(text: str, exact: bool = False) -> Real:
    """
    Read a number written as an integer, a ratio `a/b` or a decimal.

    Args:
        text: The number
        exact: Read decimals as exact Fractions instead of floats

    Returns:
        int for integers, Fraction for ratios (and decimals when exact), float otherwise
    """
    text = text.strip()
    try:
        if "/" in text:
            return Fraction(text)
        try:
            return int(text)
        except ValueError:
            return Fraction(text) if exact else float(text)
    except (ValueError, ZeroDivisionError) as e:
        raise FileFormatError(f"not a number: {text!r}") from e


def format_number(value: Real, precision: int = DEFAULT_PRECISION) -> str:
    """Write ints and Fractions exactly and floats with `precision` significant digits."""
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, Fraction):
        return str(value)
    return format(float(value), f".{precision}g")


def format_decimal(value: Real, precision: int = DEFAULT_PRECISION) -> str:
    """Like format_number, but Fractions are written as decimals too (file formats)."""
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else format(float(value), f".{precision}g")
    return format_number(value, precision)


def parse_comb_point(text: str) -> CombPoint:
    """Read `<position>` or `<position>:<left|right>`."""
    position, _, face = text.partition(":")
    try:
        return CombPoint(parse_number(position), Face(face) if face else Face.INTERIOR)
    except ValueError as e:
        raise FileFormatError(f"not a comb point: {text!r}") from e


def format_comb_point(point: CombPoint, precision: int = DEFAULT_PRECISION) -> str:
    text = format_number(point.position, precision)
    return text if point.face is Face.INTERIOR else f"{text}:{point.face.value}"


def comb_to_text(comb: Comb, precision: int = DEFAULT_PRECISION) -> str:
    """
    Render a comb in the comb file format.

    Args:
        comb: The comb
        precision: Significant digits for floats

    Returns:
        `comb <lo> <hi>` followed by one `<position> <height>` line per tooth, all decimals
    """
    document = f"comb {format_decimal(comb.interval_lo, precision)} {format_decimal(comb.interval_hi, precision)}\n"
    for position, height in comb.teeth:
        document += f"{format_decimal(position, precision)} {format_decimal(height, precision)}\n"
    return document


def comb_from_text(text: str, exact: bool = False) -> Comb:
    """Parse the comb file format; blank lines and `#` comments are skipped."""
    lines = [line.split("#", 1)[0].strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise FileFormatError("empty comb file")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "comb":
        raise FileFormatError(f"comb file must start with 'comb <lo> <hi>', got {lines[0]!r}")
    teeth = []
    for line in lines[1:]:
        fields = line.split()
        if len(fields) != 2:
            raise FileFormatError(f"expected '<position> <height>', got {line!r}")
        teeth.append((parse_number(fields[0], exact), parse_number(fields[1], exact)))
    return Comb(parse_number(header[1], exact), parse_number(header[2], exact), tuple(teeth))


def read_comb(path: Union[str, Path], exact: bool = False) -> Comb:
    return comb_from_text(Path(path).read_text(), exact)


def write_comb(comb: Comb, path: Optional[Union[str, Path]], precision: int = DEFAULT_PRECISION) -> str:
    """Write the comb file, or only return its text when path is None."""
    document = comb_to_text(comb, precision)
    if path is not None:
        Path(path).write_text(document)
    return document
