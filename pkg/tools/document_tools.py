"""
Document Tools
This module renders combs and contours as static SVG figures and writes the Markdown
reports of the sphere and verify commands.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from combs.comb import Comb, DendrogramNode, comb_dendrogram
from spaces.contour import Contour, ExcursionList
from spaces.staircase import Staircase

from .comb_tools import DEFAULT_PRECISION, format_number

MARGIN = 20


class FigureInput(BaseModel):
    """Input schema for rendering a figure."""
    width: int = Field(640, gt=2 * MARGIN, description="Figure width in pixels")
    height: int = Field(320, gt=2 * MARGIN, description="Figure height in pixels")
    dendrogram: bool = Field(False, description="Overlay the ultrametric tree of the comb")
    level: Optional[float] = Field(None, description="Level line drawn over a contour")


def _coordinate(value: float) -> str:
    return f"{value:.2f}"


class _Frame:
    """Maps data coordinates into the drawing area of the figure."""

    def __init__(self, x_lo: float, x_hi: float, y_hi: float, width: int, height: int):
        self.x_lo, self.x_hi, self.y_hi = x_lo, x_hi, y_hi
        self.width, self.height = width, height

    def x(self, value) -> str:
        span = self.x_hi - self.x_lo
        share = (float(value) - self.x_lo) / span if span > 0 else 0.5
        return _coordinate(MARGIN + share * (self.width - 2 * MARGIN))

    def y(self, value) -> str:
        share = float(value) / self.y_hi if self.y_hi > 0 else 0.0
        return _coordinate(self.height - MARGIN - share * (self.height - 2 * MARGIN))


def _svg_header(width: int, height: int, title: str) -> str:
    document = '<?xml version="1.0" encoding="UTF-8"?>\n'
    document += f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">\n'
    document += f"  <title>{title}</title>\n"
    document += f'  <rect x="0" y="0" width="{width}" height="{height}" fill="white"/>\n'
    return document


def _line(x1: str, y1: str, x2: str, y2: str, style: str) -> str:
    return f'  <line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" {style}/>\n'


def _dendrogram_paths(node: DendrogramNode, frame: _Frame) -> List[str]:
    paths = []
    pending = [node]
    while pending:
        current = pending.pop()
        for child in current.children:
            paths.append(
                f'  <path d="M {frame.x(child.x)} {frame.y(child.height)} '
                f"V {frame.y(current.height)} H {frame.x(current.x)}\" "
                'fill="none" stroke="steelblue" stroke-dasharray="4 3"/>\n'
            )
            pending.append(child)
    return paths


def create_comb_svg(comb: Comb, width: int = 640, height: int = 320, dendrogram: bool = False) -> Dict[str, Any]:
    """
    Draw a comb: a baseline over the interval and one vertical segment per tooth.

    Args:
        comb: The comb
        width: Figure width in pixels
        height: Figure height in pixels
        dendrogram: Whether to overlay the ultrametric tree associated with the comb

    Returns:
        Dictionary containing the SVG document and metadata
    """
    highest = float(max(comb.heights)) if len(comb) else 0.0
    frame = _Frame(float(comb.interval_lo), float(comb.interval_hi), highest, width, height)
    baseline = frame.y(0)

    document = _svg_header(width, height, "comb")
    document += _line(frame.x(comb.interval_lo), baseline, frame.x(comb.interval_hi), baseline, 'stroke="black"')
    for position, tooth in comb.teeth:
        document += _line(frame.x(position), baseline, frame.x(position), frame.y(tooth), 'stroke="black" stroke-width="2"')

    if dendrogram and len(comb):
        for path in _dendrogram_paths(comb_dendrogram(comb), frame):
            document += path
    document += "</svg>\n"

    return {
        "document": document,
        "teeth_count": len(comb),
        "dendrogram": dendrogram and len(comb) > 0,
    }


def create_contour_svg(
    contour: Contour, width: int = 640, height: int = 320, level: Optional[float] = None
) -> Dict[str, Any]:
    """
    Draw a contour as a polyline, jumps as vertical moves, with an optional dashed level line.

    Returns:
        Dictionary containing the SVG document and metadata
    """
    top = float(contour.maximum)
    if level is not None:
        top = max(top, float(level))
    frame = _Frame(float(contour.start), float(contour.end), top, width, height)

    points = []
    for time, left, value in contour.breakpoints:
        points.append(f"{frame.x(time)},{frame.y(left)}")
        if value != left:
            points.append(f"{frame.x(time)},{frame.y(value)}")
    document = _svg_header(width, height, "contour")
    document += f'  <polyline points="{" ".join(points)}" fill="none" stroke="black"/>\n'
    if level is not None:
        y = frame.y(level)
        document += _line(frame.x(contour.start), y, frame.x(contour.end), y, 'stroke="firebrick" stroke-dasharray="6 4"')
    document += "</svg>\n"

    return {
        "document": document,
        "breakpoints_count": len(contour.breakpoints),
        "level": level,
    }


def create_excursion_report(
    comb: Comb,
    excursions: ExcursionList,
    local_time: Staircase,
    epsilon: float = 0.0,
    precision: int = DEFAULT_PRECISION,
) -> Dict[str, Any]:
    """
    Create the Markdown report of a sphere: visit components, excursions and teeth.

    Args:
        comb: The sphere comb
        excursions: Excursions below the level
        local_time: The staircase giving tooth positions
        epsilon: Cutoff used for the teeth
        precision: Significant digits for floats

    Returns:
        Dictionary containing the report and metadata
    """
    def number(value) -> str:
        return format_number(value, precision)

    document = f"# Sphere of radius {number(excursions.T)}\n\n"

    document += "## Visit Components\n\n"
    document += f"{len(excursions.components)} component(s) of the level set.\n\n"
    document += "| # | start | end |\n"
    document += "|---|-------|-----|\n"
    for i, (start, end) in enumerate(excursions.components):
        document += f"| {i} | {number(start)} | {number(end)} |\n"
    document += "\n"

    document += "## Excursions\n\n"
    if excursions.excursions:
        document += "| # | g | d | depth | position | tooth |\n"
        document += "|---|---|---|-------|----------|-------|\n"
        for i, (excursion, position) in enumerate(zip(excursions.excursions, local_time.values)):
            kept = "yes" if excursion.depth > epsilon else "no"
            document += (
                f"| {i} | {number(excursion.g)} | {number(excursion.d)} | "
                f"{number(excursion.depth)} | {number(position)} | {kept} |\n"
            )
        document += "\n"
    else:
        document += "The sphere is a single point; the comb has no teeth.\n\n"

    document += "## Comb\n\n"
    document += f"{len(comb)} teeth above {number(epsilon)} on [0, 1].\n"

    return {
        "document": document,
        "components_count": len(excursions.components),
        "excursions_count": len(excursions.excursions),
        "teeth_count": len(comb),
    }


def create_verification_report(
    path: str, kind: str, completed_phases: List[str], findings: List[str], errors: List[str]
) -> Dict[str, Any]:
    """
    Create the report of the verify command: `ok`, or one line per violation.

    Returns:
        Dictionary containing the report and metadata
    """
    if not errors:
        document = "ok\n"
    else:
        document = f"{len(errors)} violation(s) in {path} ({kind or 'unknown'})\n"
        for error in errors:
            document += f"- {error}\n"

    return {
        "document": document,
        "ok": not errors,
        "phases": list(completed_phases),
        "findings": list(findings),
    }
