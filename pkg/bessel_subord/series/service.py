from typing import TYPE_CHECKING, Callable

import numpy as np
from loguru import logger
from scipy.optimize import minimize_scalar

from bessel_subord.complexfn.service import is_pole
from bessel_subord.exceptions import DomainError, NormalizationError
from bessel_subord.series.models import MIN_ANGULAR_SAMPLES, CircleMax, DiskGrid, TruncatedSeries

if TYPE_CHECKING:
    from bessel_subord.besselgen.models import BesselParams

# below tiny / eps doubles lose relative precision; differences there are measured against it
UNDERFLOW_FLOOR = float(np.finfo(np.float64).tiny / np.finfo(np.float64).eps)
RELATIVE_FLOOR = UNDERFLOW_FLOOR


def _common_order(f: TruncatedSeries, g: TruncatedSeries) -> int:
    # truncation is the model: never zero-pad upward
    return min(f.order, g.order)


def add(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    n = _common_order(f, g)
    return TruncatedSeries(f.coeffs[: n + 1] + g.coeffs[: n + 1])


def subtract(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    n = _common_order(f, g)
    return TruncatedSeries(f.coeffs[: n + 1] - g.coeffs[: n + 1])


def scale(f: TruncatedSeries, alpha: complex) -> TruncatedSeries:
    return TruncatedSeries(complex(alpha) * f.coeffs)


def linear_combination(terms: list[tuple[complex, TruncatedSeries]]) -> TruncatedSeries:
    """sum(alpha_i * f_i), truncated to the shortest f_i."""
    n = min(f.order for _, f in terms)
    acc = np.zeros(n + 1, dtype=np.complex128)
    for alpha, f in terms:
        acc = acc + complex(alpha) * f.coeffs[: n + 1]
    return TruncatedSeries(acc)


def cauchy_product(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Ordinary product: c_n = sum_{j<=n} a_j b_{n-j}, truncated at the smaller order."""
    n = _common_order(f, g)
    return TruncatedSeries(np.convolve(f.coeffs[: n + 1], g.coeffs[: n + 1])[: n + 1])


def hadamard_product(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Coefficientwise product of like powers; both factors must vanish at 0."""
    for name, s in (("f", f), ("g", g)):
        if s.coeffs[0] != 0:
            raise NormalizationError(f"Hadamard product needs {name}(0) = 0, got a_0={s[0]!r}")
    n = _common_order(f, g)
    return TruncatedSeries(
        f.coeffs[: n + 1] * g.coeffs[: n + 1],
        normalized=f.is_class_a and g.is_class_a,
    )


def derivative(f: TruncatedSeries) -> TruncatedSeries:
    if f.order == 0:
        return TruncatedSeries.zero(0)
    n = np.arange(1, f.order + 1)
    return TruncatedSeries(n * f.coeffs[1:])


def z_times_derivative(f: TruncatedSeries) -> TruncatedSeries:
    """z f'(z): coefficients n a_n at the same order."""
    return TruncatedSeries(np.arange(f.order + 1) * f.coeffs)


def divide_by_z(f: TruncatedSeries) -> TruncatedSeries:
    """f(z)/z for f(0) = 0, one order lower."""
    if f.coeffs[0] != 0:
        raise NormalizationError(f"f(z)/z needs f(0) = 0, got a_0={f[0]!r}")
    if f.order == 0:
        return TruncatedSeries.zero(0)
    return TruncatedSeries(f.coeffs[1:])


def multiply_by_z(f: TruncatedSeries) -> TruncatedSeries:
    """z f(z), one order higher (no truncation)."""
    return TruncatedSeries(np.concatenate(([0j], f.coeffs)))


def evaluate(f: TruncatedSeries, z: complex) -> complex:
    """Horner evaluation of the truncated polynomial."""
    z = complex(z)
    acc = 0j
    for c in f.coeffs[::-1]:
        acc = acc * z + c
    return complex(acc)


def evaluate_on_grid(f: TruncatedSeries, points: np.ndarray) -> np.ndarray:
    """Vectorized Horner evaluation at an array of points."""
    points = np.asarray(points, dtype=np.complex128)
    acc = np.zeros_like(points)
    for c in f.coeffs[::-1]:
        acc = acc * points + c
    return acc


def grid_max(values: np.ndarray, points: np.ndarray) -> tuple[float, complex]:
    """max |values| and the first point (radius-major order) where it is attained."""
    mags = np.abs(values).reshape(-1)
    idx = int(np.argmax(mags))
    return float(mags[idx]), complex(np.asarray(points).reshape(-1)[idx])


def polish_circle_max(
    values_at: Callable[[np.ndarray], np.ndarray],
    r: float,
    theta: float,
    step: float,
) -> tuple[float, float]:
    """Bounded scalar search for max |values_at(r e^{it})| over |t - theta| <= step."""
    res = minimize_scalar(
        lambda t: -float(np.abs(values_at(np.array([r * np.exp(1j * t)])))[0]),
        bounds=(theta - step, theta + step),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(-res.fun), float(np.mod(res.x, 2 * np.pi))


def refined_grid_max(
    values_at: Callable[[np.ndarray], np.ndarray],
    grid: DiskGrid,
    sampled: np.ndarray | None = None,
) -> tuple[float, complex]:
    """grid_max of values_at over the grid, polished around each circle's argmax when grid.refine.

    ``sampled`` may carry values_at(grid.points()) already computed. Polishing
    never lowers the sampled maximum.
    """
    pts = grid.points()
    if sampled is None:
        sampled = values_at(pts.reshape(-1))
    best, worst = grid_max(sampled, pts)
    if not grid.refine:
        return best, worst

    step = 2 * np.pi / grid.angular_samples
    angles = grid.angles()
    mags = np.abs(np.asarray(sampled)).reshape(len(grid.radii), grid.angular_samples)
    for r, row in zip(grid.radii, mags):
        idx = int(np.argmax(row))
        value, theta = polish_circle_max(values_at, r, float(angles[idx]), step)
        if value > best:
            logger.debug(f"refined grid max at r={r}: {best!r} -> {value!r}")
            best, worst = value, complex(r * np.exp(1j * theta))
    return best, worst


def sup_on_circle(
    f: TruncatedSeries,
    r: float,
    samples: int = 4096,
    refine: bool = False,
) -> CircleMax:
    """max over equally spaced angles of |f(r e^{i theta})|.

    With ``refine`` a bounded scalar search polishes the maximum within one
    sample spacing of the sampled argmax; the refined value never lowers the
    sampled one.
    """
    if not 0 < r < 1:
        raise DomainError(f"Circle radius must lie in (0, 1), got {r}")
    if samples < MIN_ANGULAR_SAMPLES:
        raise DomainError(f"samples must be >= {MIN_ANGULAR_SAMPLES}, got {samples}")

    theta = 2 * np.pi * np.arange(samples) / samples
    mags = np.abs(evaluate_on_grid(f, r * np.exp(1j * theta)))
    idx = int(np.argmax(mags))
    best, best_theta = float(mags[idx]), float(theta[idx])

    if refine:
        value, polished = polish_circle_max(lambda z: evaluate_on_grid(f, z), r, best_theta, 2 * np.pi / samples)
        if value > best:
            logger.debug(f"refined sup at r={r}: {best!r} -> {value!r}")
            best, best_theta = value, polished

    return CircleMax(value=best, theta=best_theta, radius=float(r), samples=samples)


def sup_on_grid(f: TruncatedSeries, grid: DiskGrid, refine: bool | None = None) -> CircleMax:
    """Largest sup_on_circle over the grid radii (ties keep the smaller radius).

    ``refine`` defaults to the grid's own setting.
    """
    refine = grid.refine if refine is None else refine
    best: CircleMax | None = None
    for r in grid.radii:
        current = sup_on_circle(f, r, grid.angular_samples, refine=refine)
        if best is None or current.value > best.value:
            best = current
    return best


def tail_bound(
    params: "BesselParams",
    r: float,
    N: int,
    coefficient_bound: float = 1.0,
) -> float:
    """Upper bound on |sum_{n >= N} t_n z^{n+1}| for |z| <= r, t_n the phi coefficients.

    The series truncated at order N keeps t_0 .. t_{N-1}; the omitted terms
    are summed explicitly until the term ratio |c| r / (4 |kappa+n| (n+1))
    drops below 1/2 for good, then closed by a geometric majorant.
    ``coefficient_bound`` scales the bound for B f with |a_n| <= A.
    """
    kappa, c = complex(params.kappa), complex(params.c)
    if is_pole(kappa):
        raise DomainError(f"kappa={kappa!r} is a nonpositive integer")
    if c == 0 or r == 0:
        return 0.0
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")

    def ratio(n: int) -> float:
        return abs(c) * r / (4 * abs(kappa + n) * (n + 1))

    # |t_N| r^{N+1} via the same ratio recurrence, starting from t_0 = 1
    term = r
    for n in range(N):
        term *= ratio(n)

    # |kappa + n| is increasing once n > -Re(kappa), so the ratio decreases from there
    monotone_from = max(N, int(np.ceil(-kappa.real)) + 1)
    total = 0.0
    n = N
    while n < monotone_from or ratio(n) >= 0.5:
        total += term
        term *= ratio(n)
        n += 1
    total += term / (1 - ratio(n))
    return coefficient_bound * total


def max_relative_difference(a: TruncatedSeries, b: TruncatedSeries, floor: float = RELATIVE_FLOOR) -> float:
    """max_n |a_n - b_n| / max(|a_n|, |b_n|, floor)."""
    n = _common_order(a, b)
    x, y = a.coeffs[: n + 1], b.coeffs[: n + 1]
    scale_ = np.maximum(np.maximum(np.abs(x), np.abs(y)), floor)
    return float(np.max(np.abs(x - y) / scale_))


def random_class_a(rng: np.random.Generator, order: int = 64, radius: float = 1.0) -> TruncatedSeries:
    """Class-A series with a_n (n >= 2) drawn uniformly from the disk |a| < radius."""
    data = np.zeros(order + 1, dtype=np.complex128)
    data[1] = 1
    count = order - 1
    if count > 0:
        mod = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
        arg = rng.uniform(0.0, 2 * np.pi, count)
        data[2:] = mod * np.exp(1j * arg)
    return TruncatedSeries(data, normalized=True)
