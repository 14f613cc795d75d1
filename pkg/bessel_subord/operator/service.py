import numpy as np
from loguru import logger

from bessel_subord.besselgen.models import BesselParams
from bessel_subord.complexfn.service import is_pole
from bessel_subord.exceptions import DomainError, NormalizationError, RatioGuardError
from bessel_subord.operator.models import OperatorSpec, RatioCheck
from bessel_subord.series.models import DiskGrid, TruncatedSeries
from bessel_subord.series.service import (
    divide_by_z,
    evaluate_on_grid,
    hadamard_product,
    linear_combination,
    max_relative_difference,
    z_times_derivative,
)

DENOMINATOR_GUARD = 1e-6
MAX_SKIP_FRACTION = 0.05


def apply(spec: OperatorSpec | BesselParams, f: TruncatedSeries, strict: bool = True) -> TruncatedSeries:
    """kernel * f (Hadamard product) at the order of f.

    With ``strict`` f must be class A; otherwise only f(0) = 0 is required,
    which keeps the raw coefficient map linear.
    """
    if isinstance(spec, BesselParams):
        spec = OperatorSpec.general(spec)
    if strict and not f.is_class_a:
        raise NormalizationError("Operator input must be class A (a_0 = 0, a_1 = 1)")
    return hadamard_product(spec.kernel(f.order), f)


def _require_kappa_avoids(kappa: complex, forbidden: tuple[int, ...], what: str) -> None:
    for value in forbidden:
        if abs(kappa - value) <= 1e-12:
            raise DomainError(f"{what} is undefined at kappa={value}")


# --- Recursion ---


def recursion_residual(
    params: BesselParams | OperatorSpec,
    f: TruncatedSeries,
    check_negated_c: bool = False,
) -> float:
    """Max relative residual of z[B_{kappa+1} f]' = kappa B_kappa f - (kappa-1) B_{kappa+1} f.

    Accepts any Bessel-type OperatorSpec; for the spherical kind this is
    z[S_{p+1} f]' = (p+3/2) S_p f - (p+1/2) S_{p+1} f. With ``check_negated_c``
    the identity is also checked at -c and the larger residual returned.
    """
    if isinstance(params, OperatorSpec):
        if not params.is_bessel:
            raise DomainError("The three-term recursion needs a Bessel-type operator")
        params = params.params

    def residual(par: BesselParams) -> float:
        kappa = par.kappa
        upper = par.shifted(1)
        lower_f = apply(par, f)
        upper_f = apply(upper, f)
        lhs = z_times_derivative(upper_f)
        rhs = linear_combination([(kappa, lower_f), (-(kappa - 1), upper_f)])
        return max_relative_difference(lhs, rhs)

    worst = residual(params)
    if check_negated_c:
        worst = max(worst, residual(params.negated_c()))
    logger.debug(f"recursion residual {params.label()}: {worst:.3e}")
    return worst


def lower_shift(params: BesselParams, f: TruncatedSeries, steps: int = 1) -> TruncatedSeries:
    """B_{kappa-steps} f computed directly, steps in {1, 2}."""
    if steps not in (1, 2):
        raise DomainError(f"steps must be 1 or 2, got {steps}")
    shifted_kappa = params.kappa - steps
    if is_pole(shifted_kappa):
        raise DomainError(f"kappa-{steps} = {shifted_kappa!r} is a nonpositive integer")
    return apply(params.shifted(-steps), f)


def _theta_powers(p: TruncatedSeries) -> tuple[TruncatedSeries, TruncatedSeries]:
    """(z p', z^2 p'')."""
    zp = z_times_derivative(p)
    z2p = linear_combination([(1.0, z_times_derivative(zp)), (-1.0, zp)])
    return zp, z2p


def recursion_combination(params: BesselParams, f: TruncatedSeries, depth: int = 1) -> TruncatedSeries:
    """B_kappa f (depth 1) or B_{kappa-1} f (depth 2) rebuilt from p = B_{kappa+1} f.

    depth 1: (z p' + (kappa-1) p) / kappa
    depth 2: (z^2 p'' + 2(kappa-1) z p' + (kappa-1)(kappa-2) p) / (kappa (kappa-1))
    """
    kappa = params.kappa
    p = apply(params.shifted(1), f)
    zp, z2p = _theta_powers(p)
    if depth == 1:
        return linear_combination([(1 / kappa, zp), ((kappa - 1) / kappa, p)])
    if depth == 2:
        _require_kappa_avoids(kappa, (1,), "The two-step recursion combination")
        den = kappa * (kappa - 1)
        return linear_combination(
            [
                (1 / den, z2p),
                (2 * (kappa - 1) / den, zp),
                ((kappa - 1) * (kappa - 2) / den, p),
            ]
        )
    raise DomainError(f"depth must be 1 or 2, got {depth}")


def normalized_combination(params: BesselParams, f: TruncatedSeries, depth: int = 1) -> TruncatedSeries:
    """B_kappa f / z (depth 1) or B_{kappa-1} f / z (depth 2) rebuilt from p = B_{kappa+1} f / z.

    depth 1: (z p' + kappa p) / kappa
    depth 2: (z^2 p'' + 2 kappa z p' + kappa (kappa-1) p) / (kappa (kappa-1))
    """
    kappa = params.kappa
    p = divide_by_z(apply(params.shifted(1), f))
    zp, z2p = _theta_powers(p)
    if depth == 1:
        return linear_combination([(1 / kappa, zp), (1.0, p)])
    if depth == 2:
        _require_kappa_avoids(kappa, (1,), "The two-step normalized combination")
        den = kappa * (kappa - 1)
        return linear_combination([(1 / den, z2p), (2 / (kappa - 1), zp), (1.0, p)])
    raise DomainError(f"depth must be 1 or 2, got {depth}")


def combination_residual(
    params: BesselParams,
    f: TruncatedSeries,
    depth: int = 1,
    normalized: bool = False,
) -> float:
    """Relative gap between a derivative combination and the directly shifted operator."""
    if depth == 1:
        direct = apply(params, f)
    else:
        direct = lower_shift(params, f, steps=1)
    if normalized:
        return max_relative_difference(normalized_combination(params, f, depth), divide_by_z(direct))
    return max_relative_difference(recursion_combination(params, f, depth), direct)


# --- Ratio identities ---


def ratio_transform(r, s, t, kappa: complex):
    """(u, v, w) from (r, s, t) = (p, z p', z^2 p'') with p = B_kappa f / B_{kappa+1} f.

    v = (s/r + kappa r - 1) / (kappa - 1)
    w = (s/r + kappa r - 2 + (s/r + t/r - (s/r)^2 + kappa s) / (s/r + kappa r - 1)) / (kappa - 2)
    """
    sr = s / r
    inner = sr + kappa * r - 1
    v = inner / (kappa - 1)
    w = (sr + kappa * r - 2 + (sr + t / r - sr * sr + kappa * s) / inner) / (kappa - 2)
    return r, v, w


def ratio_identity_check(
    params: BesselParams,
    f: TruncatedSeries,
    grid: DiskGrid,
    depth: int = 1,
    guard: float = DENOMINATOR_GUARD,
    max_skip_fraction: float = MAX_SKIP_FRACTION,
) -> RatioCheck:
    """Pointwise check of B_{kappa-1}/B_kappa (depth 1) or B_{kappa-2}/B_{kappa-1} (depth 2)
    against the expression in p = B_kappa f / B_{kappa+1} f and its derivatives.

    Grid points where a denominator falls below ``guard`` are skipped; more
    than ``max_skip_fraction`` skipped points raise RatioGuardError.
    """
    if depth not in (1, 2):
        raise DomainError(f"depth must be 1 or 2, got {depth}")
    kappa = params.kappa
    _require_kappa_avoids(kappa, (1,) if depth == 1 else (1, 2), "The ratio identity")

    pts = grid.points().reshape(-1)

    def values(series: TruncatedSeries) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        zs, z2s = _theta_powers(series)
        return (
            evaluate_on_grid(series, pts),
            evaluate_on_grid(zs, pts),
            evaluate_on_grid(z2s, pts),
        )

    A, zA, z2A = values(apply(params, f))
    B, zB, z2B = values(apply(params.shifted(1), f))
    lower = evaluate_on_grid(lower_shift(params, f, 1), pts)

    ok = (np.abs(A) >= guard) & (np.abs(B) >= guard)
    with np.errstate(divide="ignore", invalid="ignore"):
        a1, a2 = zA / A, z2A / A
        b1, b2 = zB / B, z2B / B
        r = A / B
        S = a1 - b1
        # z (z p'/p)' from the logarithmic derivatives of A and B
        zS = (a1 + a2 - a1 * a1) - (b1 + b2 - b1 * b1)
        s = r * S
        t = r * (zS + S * S - S)
        _, v, w = ratio_transform(r, s, t, kappa)
        if depth == 1:
            direct, formula = lower / A, v
        else:
            lower2 = evaluate_on_grid(lower_shift(params, f, 2), pts)
            direct, formula = lower2 / lower, w
            ok &= (np.abs(lower) >= guard) & (np.abs(S + kappa * r - 1) >= guard)

    ok &= np.isfinite(direct) & np.isfinite(formula)
    checked = int(np.count_nonzero(ok))
    skipped = int(pts.size - checked)
    if skipped:
        logger.debug(f"ratio identity depth={depth}: skipped {skipped} of {pts.size} grid points")
    if skipped > max_skip_fraction * pts.size:
        raise RatioGuardError(
            f"Denominators vanish on {skipped}/{pts.size} grid points (limit {max_skip_fraction:.0%})"
        )

    rel = np.zeros(pts.size)
    scale = np.maximum(np.maximum(np.abs(direct[ok]), np.abs(formula[ok])), 1e-300)
    rel[ok] = np.abs(direct[ok] - formula[ok]) / scale
    idx = int(np.argmax(rel))
    return RatioCheck(residual=float(rel[idx]), checked=checked, skipped=skipped, worst_z=complex(pts[idx]))
