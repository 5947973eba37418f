import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import daiquiri
import numpy as np
from tqdm import tqdm

from combs.comb import Comb, CombPoint, Face, comb_distance, verify_ultrametric
from combs.errors import CombError, UltrametricViolation
from spaces.contour import Contour, four_points_check, sphere_comb, sphere_image, tree_distance
from spaces.ultrametric import UltrametricMatrix, check_comb_order, comb_embedding, matrix_from_comb, order_ultrametric
from tools.comb_tools import read_comb
from tools.contour_tools import read_contour_csv
from tools.document_tools import create_verification_report
from tools.matrix_tools import read_matrix_csv

logger = daiquiri.getLogger(__name__)

SPOT_TOLERANCE = 1e-9


# Verification state and phases
@dataclass
class VerificationState:
    """
    Represents the state of one verify run over an input file.
    """
    path: str
    kind: str = ""
    level: Optional[float] = None
    spot_checks: int = 200
    seed: int = 0
    progress: bool = False

    # Parsed input
    comb: Optional[Comb] = None
    matrix: Optional[UltrametricMatrix] = None
    contour: Optional[Contour] = None

    # Status tracking
    current_phase: str = "initialization"
    findings: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    completed_phases: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def report(self) -> Dict:
        return create_verification_report(self.path, self.kind, self.completed_phases, self.findings, self.errors)


def detect_kind(path: str) -> str:
    """Tell comb files, contour CSVs and matrix CSVs apart by their first line."""
    with open(path) as handle:
        first = handle.readline().strip()
    if first.startswith("comb"):
        return "comb"
    if first.startswith("time,"):
        return "contour"
    return "matrix"


def parse_input(state: VerificationState) -> None:
    state.kind = state.kind or detect_kind(state.path)
    if state.kind == "comb":
        state.comb = read_comb(state.path)
        state.findings.append(f"comb with {len(state.comb)} teeth")
    elif state.kind == "contour":
        state.contour = read_contour_csv(state.path)
        state.findings.append(f"contour with {len(state.contour.breakpoints)} breakpoints")
    else:
        state.matrix = read_matrix_csv(state.path)
        state.findings.append(f"{state.matrix.n} x {state.matrix.n} matrix")


def check_comb_metric(state: VerificationState) -> None:
    comb = state.comb
    points = [CombPoint(x) for x in comb.gap_representatives()]
    for position in comb.positions:
        points.extend([CombPoint(position, Face.LEFT), CombPoint(position, Face.RIGHT)])
    if not verify_ultrametric(comb, points):
        state.errors.append("comb distance breaks the ultrametric inequality")


def check_matrix_ultrametric(state: VerificationState) -> None:
    try:
        state.matrix.check_ultrametric()
    except UltrametricViolation as e:
        state.errors.append(f"not ultrametric: triple {e.triple}: {e}")


def check_matrix_order(state: VerificationState) -> None:
    if state.errors:
        return
    order = order_ultrametric(state.matrix)
    violation = check_comb_order(state.matrix, order)
    if violation is not None:
        state.errors.append(f"order {order} fails at slots {violation}")
        return
    _, comb, positions = comb_embedding(state.matrix)
    if matrix_from_comb(comb, positions) != UltrametricMatrix(state.matrix.distances):
        state.errors.append("comb embedding does not reproduce the matrix")
    state.findings.append(f"comb order {order}")


def check_four_points(state: VerificationState) -> None:
    contour = state.contour
    rng = np.random.default_rng(state.seed)
    checks = range(state.spot_checks)
    if state.progress:
        checks = tqdm(checks, desc="four points", unit="check")
    failures = 0
    for _ in checks:
        times = rng.uniform(float(contour.start), float(contour.end), size=4)
        d = [[tree_distance(contour, s, t) for t in times] for s in times]
        if not four_points_check(d, SPOT_TOLERANCE):
            failures += 1
            if failures == 1:
                state.errors.append(f"four-point condition fails at times {times.tolist()}")
    state.findings.append(f"{state.spot_checks} four-point spot checks, {failures} failure(s)")


def check_sphere(state: VerificationState) -> None:
    if state.level is None:
        return
    comb, excursions, local_time = sphere_comb(state.contour, state.level)
    clamped = state.contour.clamp(state.level)
    # both ends of every visit component
    visits = [t for component in excursions.components for t in component]
    mismatches = 0
    for s, t in itertools.combinations(visits, 2):
        expected = tree_distance(clamped, s, t)
        got = comb_distance(comb, sphere_image(excursions, local_time, s), sphere_image(excursions, local_time, t))
        if abs(float(got) - float(expected)) > SPOT_TOLERANCE:
            mismatches += 1
    if mismatches:
        state.errors.append(f"sphere comb distance differs from the tree distance on {mismatches} pair(s)")
    state.findings.append(f"sphere of radius {state.level}: {len(comb)} teeth")


PHASES: Dict[str, List[Callable[[VerificationState], None]]] = {
    "comb": [check_comb_metric],
    "matrix": [check_matrix_ultrametric, check_matrix_order],
    "contour": [check_four_points, check_sphere],
}


def run_verification(
    path: str,
    level: Optional[float] = None,
    spot_checks: int = 200,
    seed: int = 0,
    progress: bool = False,
) -> VerificationState:
    """
    Run the invariant checks matching the kind of file.

    Args:
        path: Comb file, matrix CSV or contour CSV
        level: Sphere radius to check on a contour
        spot_checks: Number of random quadruples for the four-point check
        seed: Seed of the spot checks
        progress: Show a progress bar

    Returns:
        VerificationState with findings and errors
    """
    state = VerificationState(path=str(path), level=level, spot_checks=spot_checks, seed=seed, progress=progress)

    state.current_phase = "parse"
    try:
        parse_input(state)
    except (CombError, OSError, ValueError) as e:
        state.errors.append(f"cannot read {Path(path).name}: {e}")
        return state
    state.completed_phases.append("parse")

    for phase in PHASES[state.kind]:
        state.current_phase = phase.__name__
        try:
            phase(state)
        except CombError as e:
            state.errors.append(f"{phase.__name__}: {e}")
        state.completed_phases.append(phase.__name__)
        logger.debug("phase %s done, %d error(s)", phase.__name__, len(state.errors))
    return state
