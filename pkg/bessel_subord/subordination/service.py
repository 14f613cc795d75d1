import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from loguru import logger

from bessel_subord.besselgen.models import ClosedForm
from bessel_subord.besselgen.service import closed_form_eval
from bessel_subord.exceptions import CenterMismatch, DomainError, RatioGuardError
from bessel_subord.operator.service import DENOMINATOR_GUARD, MAX_SKIP_FRACTION, apply
from bessel_subord.series.models import DEFAULT_ORDER, DiskGrid, TruncatedSeries
from bessel_subord.series.service import (
    divide_by_z,
    evaluate_on_grid,
    random_class_a,
    refined_grid_max,
)
from bessel_subord.subordination.models import CaseId, DiskTarget, VerifyCase
from bessel_subord.subordination.schemas import SubordinationResult, VerifyReport

CENTER_TOLERANCE = 1e-12
PREMISE_MARGIN = 1e-6
IMPLICATION_TOLERANCE = 1e-9
IMPLICATION_FLOOR = 1e-15

FAMILY_VERSIONS = ("v1",)

_TRIG_FORMS = {
    CaseId.TRIG_CHAIN_SIN: (ClosedForm.COS_NEGH, ClosedForm.SIN_HALF, ClosedForm.SIN_3H),
    CaseId.TRIG_CHAIN_SINH: (ClosedForm.COSH_NEGH, ClosedForm.SINH_HALF, ClosedForm.SINH_3H),
}


def subordinate_to_disk(
    p: TruncatedSeries,
    target: DiskTarget,
    grid: DiskGrid,
    center_tol: float = CENTER_TOLERANCE,
) -> SubordinationResult:
    """p < center + M z on the grid, i.e. max |p(z) - center| < M.

    q(z) = center + M z is univalent, so subordination reduces to p(0) = q(0)
    and p mapping the disk into q's image.
    """
    if abs(p[0] - target.center) > center_tol:
        raise CenterMismatch(f"p(0) = {p[0]!r} differs from the disk center {target.center!r}")
    sup, worst = refined_grid_max(lambda z: evaluate_on_grid(p, z) - target.center, grid)
    return SubordinationResult(holds=sup < target.radius, margin=target.radius - sup, sup=sup, worst_z=worst)


# --- Corollary quantities ---


@dataclass(frozen=True)
class _Quantities:
    at: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]  # z -> (premise, conclusion, ok)
    premise_bound: Callable[[float], float]  # premise right-hand side as a function of M
    solve_M: Callable[[float], float]  # inverse of premise_bound


def _disk_bound() -> tuple[Callable[[float], float], Callable[[float], float]]:
    return (lambda M: M), (lambda x: x)


def _scaled_bound(kappa: complex) -> tuple[Callable[[float], float], Callable[[float], float]]:
    k = abs(kappa)
    return (lambda M: M / k), (lambda x: k * x)


def _ratio_bound(kappa: complex) -> tuple[Callable[[float], float], Callable[[float], float]]:
    k1 = abs(kappa - 1)

    def solve(x: float) -> float:
        # M^2 / (k1 (1+M)) = x
        a = k1 * x
        return (a + math.sqrt(a * a + 4 * a)) / 2

    return (lambda M: M * M / (k1 * (1 + M))), solve


def _all_ok(z: np.ndarray) -> np.ndarray:
    return np.ones(np.shape(z), dtype=bool)


def _quantities(case: VerifyCase, guard: float) -> _Quantities:
    params, f = case.params, case.f
    kappa = params.kappa
    shifted: dict[int, TruncatedSeries] = {}

    def series(shift: int) -> TruncatedSeries:
        if shift not in shifted:
            shifted[shift] = apply(params.shifted(shift), f)
        return shifted[shift]

    def on_grid(shift: int, z: np.ndarray) -> np.ndarray:
        return evaluate_on_grid(series(shift), z)

    def over_z(shift: int, z: np.ndarray) -> np.ndarray:
        return evaluate_on_grid(divide_by_z(series(shift)), z)

    match case.case_id:
        case CaseId.TRIG_CHAIN_SIN | CaseId.TRIG_CHAIN_SINH:
            start, *links = _TRIG_FORMS[case.case_id]

            def trig(z: np.ndarray):
                conclusion = np.max([np.abs(closed_form_eval(form, z)) for form in links], axis=0)
                return np.abs(closed_form_eval(start, z)), conclusion, _all_ok(z)

            return _Quantities(trig, *_disk_bound())

        case CaseId.C2_4 | CaseId.CHAIN_2_111:
            if kappa.real < 0:
                logger.warning(f"{case.case_id}: Re(kappa)={kappa.real:g} < 0 lies outside the corollary's hypothesis")
            links = range(1, case.link_count + 1)

            def disk(z: np.ndarray):
                conclusion = np.max([np.abs(on_grid(j, z)) for j in links], axis=0)
                return np.abs(on_grid(0, z)), conclusion, _all_ok(z)

            return _Quantities(disk, *_disk_bound())

        case CaseId.C2_12 | CaseId.CHAIN_4_10:
            if kappa.real < -0.5:
                logger.warning(f"{case.case_id}: Re(kappa)={kappa.real:g} < -1/2 lies outside the corollary's hypothesis")
            links = range(1, case.link_count + 1)

            def normalized(z: np.ndarray):
                conclusion = np.max([np.abs(over_z(j, z) - 1) for j in links], axis=0)
                return np.abs(over_z(0, z) - 1), conclusion, _all_ok(z)

            return _Quantities(normalized, *_disk_bound())

        case CaseId.C2_5:

            def first_order(z: np.ndarray):
                lower, upper = on_grid(0, z), on_grid(1, z)
                return np.abs(lower - upper), np.abs(upper), _all_ok(z)

            return _Quantities(first_order, *_scaled_bound(kappa))

        case CaseId.C2_11:

            def first_order_normalized(z: np.ndarray):
                lower, upper = over_z(0, z), over_z(1, z)
                return np.abs(lower - upper), np.abs(upper - 1), _all_ok(z)

            return _Quantities(first_order_normalized, *_scaled_bound(kappa))

        case CaseId.C2_8:
            if abs(kappa - 1) <= 1e-12:
                raise DomainError("C2_8 needs kappa != 1")

            def ratio(z: np.ndarray):
                below, mid, upper = on_grid(-1, z), on_grid(0, z), on_grid(1, z)
                ok = (np.abs(mid) >= guard) & (np.abs(upper) >= guard)
                with np.errstate(divide="ignore", invalid="ignore"):
                    r = mid / upper
                    premise = np.where(ok, np.abs(below / mid - r), 0.0)
                    conclusion = np.where(ok, np.abs(r - 1), 0.0)
                return premise, conclusion, ok

            return _Quantities(ratio, *_ratio_bound(kappa))

    raise DomainError(f"Unknown case {case.case_id}")


def _evaluate_case(
    case: VerifyCase, guard: float, max_skip_fraction: float
) -> tuple[_Quantities, float, float, complex, int]:
    """Premise sup, conclusion sup and its point, and the number of guarded grid points."""
    q = _quantities(case, guard)
    pts = case.grid.points().reshape(-1)
    premise, conclusion, ok = q.at(pts)
    skipped = int(pts.size - np.count_nonzero(ok))
    if skipped > max_skip_fraction * pts.size:
        raise RatioGuardError(f"{case.case_id}: denominators vanish on {skipped}/{pts.size} grid points")
    premise_sup, _ = refined_grid_max(lambda z: q.at(z)[0], case.grid, premise)
    conclusion_sup, worst_z = refined_grid_max(lambda z: q.at(z)[1], case.grid, conclusion)
    return q, premise_sup, conclusion_sup, worst_z, skipped


def verify_implication(
    case: VerifyCase,
    premise_margin: float = PREMISE_MARGIN,
    tolerance: float = IMPLICATION_TOLERANCE,
    floor: float = IMPLICATION_FLOOR,
    guard: float = DENOMINATOR_GUARD,
    max_skip_fraction: float = MAX_SKIP_FRACTION,
) -> VerifyReport:
    """Check premise < bound(M) => conclusion < M on the case's grid.

    Without an explicit M the premise is made to hold by construction:
    M_eff solves bound(M) = premise_sup (1 + premise_margin). With an
    explicit M a failing premise makes the implication vacuously true.
    Sups are polished between samples when the grid asks for it.
    """
    q, premise_sup, conclusion_sup, worst_z, skipped = _evaluate_case(case, guard, max_skip_fraction)

    calibrated = case.M is None
    if calibrated:
        M = q.solve_M(premise_sup * (1 + premise_margin))
        premise_holds = True
    else:
        M = float(case.M)
        premise_holds = premise_sup < q.premise_bound(M)

    bound = M
    tol = max(tolerance * M, floor)
    passed = conclusion_sup < bound + tol if premise_holds else True

    report = VerifyReport(
        case_id=str(case.case_id),
        params=case.params.label(),
        f_label=case.f_label,
        premise_sup=premise_sup,
        conclusion_sup=conclusion_sup,
        M=M,
        bound=bound,
        margin=bound - conclusion_sup,
        worst_z=worst_z,
        passed=passed,
        premise_holds=premise_holds,
        calibrated=calibrated,
        skipped_points=skipped,
    )
    if not premise_holds:
        logger.info(f"{case.case_id} [{report.params}] premise fails at M={M:g}: implication is vacuous")
    elif not passed:
        logger.warning(
            f"{case.case_id} [{report.params}] f={case.f_label}: conclusion sup {conclusion_sup:.12g} "
            f"exceeds bound {bound:.12g} at z={worst_z:.6g}"
        )
    return report


def sharpness_probe(case: VerifyCase) -> float:
    """conclusion_sup / M_tight for q(z) = M z, M_tight the premise sup itself.

    Observational only: values near 1 across a family suggest M z is the best dominant.
    """
    if case.case_id.base is not CaseId.C2_4:
        raise DomainError(f"Sharpness ratio needs a case with q(z) = M z, got {case.case_id}")
    _, tight, conclusion_sup, _, _ = _evaluate_case(case, DENOMINATOR_GUARD, MAX_SKIP_FRACTION)
    ratio = conclusion_sup / tight if tight > 0 else math.inf
    logger.info(f"sharpness {case.case_id} [{case.params.label()}] f={case.f_label}: {ratio:.12g}")
    return ratio


# --- Test functions ---


def function_family(
    seed: int,
    size: int = 5,
    version: str = "v1",
    order: int = DEFAULT_ORDER,
) -> list[tuple[str, TruncatedSeries]]:
    """z/(1-z), z + z^2/2 and ``size`` seeded random class-A series with |a_n| <= 1."""
    if version not in FAMILY_VERSIONS:
        raise DomainError(f"Unknown function family version {version!r}, expected one of {FAMILY_VERSIONS}")
    half = np.zeros(order + 1, dtype=np.complex128)
    half[1], half[2] = 1, 0.5
    family = [
        ("z/(1-z)", TruncatedSeries.identity_convolver(order)),
        ("z+z^2/2", TruncatedSeries(half, normalized=True)),
    ]
    rng = np.random.default_rng(seed)
    for i in range(size):
        family.append((f"random[{version}:{seed}:{i}]", random_class_a(rng, order)))
    return family
