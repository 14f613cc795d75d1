import cmath
import math

from bessel_subord.exceptions import NonFiniteError, PoleError

POLE_TOLERANCE = 1e-12

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7
_LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_TWO_PI = math.sqrt(2 * math.pi)


def as_complex(value: complex | float | int, name: str = "value") -> complex:
    """Coerce to a finite complex scalar."""
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NonFiniteError(f"{name} must be finite, got {z!r}")
    return z


def nearest_nonpositive_integer(z: complex) -> int | None:
    """Return n <= 0 when z lies within POLE_TOLERANCE of it, else None."""
    n = round(z.real)
    if n > 0:
        return None
    if abs(z - n) <= POLE_TOLERANCE:
        return int(n)
    return None


def is_pole(z: complex) -> bool:
    return nearest_nonpositive_integer(complex(z)) is not None


def _lanczos(z: complex) -> complex:
    # valid for Re z >= 0.5
    z -= 1
    x = _LANCZOS_COEFFICIENTS[0]
    for i in range(1, len(_LANCZOS_COEFFICIENTS)):
        x += _LANCZOS_COEFFICIENTS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _SQRT_TWO_PI * cmath.exp((z + 0.5) * cmath.log(t) - t) * x


def gamma(z: complex | float) -> complex:
    """Euler Gamma function on the complex plane.

    Uses the Lanczos approximation and the reflection formula
    Gamma(z) Gamma(1-z) = pi / sin(pi z) for Re z < 0.5.
    """
    z = as_complex(z, "z")
    pole = nearest_nonpositive_integer(z)
    if pole is not None:
        raise PoleError(f"Gamma has a pole at z={pole} (got z={z!r})")

    try:
        if z.real < 0.5:
            result = cmath.pi / (cmath.sin(cmath.pi * z) * _lanczos(1 - z))
        else:
            result = _lanczos(z)
    except (OverflowError, ZeroDivisionError):
        raise NonFiniteError(f"Gamma({z!r}) overflows double precision") from None

    if not (math.isfinite(result.real) and math.isfinite(result.imag)):
        raise NonFiniteError(f"Gamma({z!r}) overflows double precision")
    return result


def pochhammer(lam: complex | float, n: int) -> complex:
    """Rising factorial (lam)_n = lam (lam+1) ... (lam+n-1); (lam)_0 = 1 for every lam."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return pochhammer_sequence(lam, n)[n]


def pochhammer_sequence(lam: complex | float, n: int) -> list[complex]:
    """[(lam)_0, (lam)_1, ..., (lam)_n] with (lam)_{j+1} = (lam)_j * (lam + j)."""
    lam = as_complex(lam, "lambda")
    values = [complex(1.0)]
    acc = complex(1.0)
    for j in range(n):
        acc = acc * (lam + j)
        values.append(acc)
    if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in values):
        raise NonFiniteError(f"Pochhammer ({lam!r})_{n} overflows double precision")
    return values


def first_zero_factor(lam: complex, n: int) -> int | None:
    """Index j < n at which the factor lam + j vanishes, so (lam)_m = 0 for m > j."""
    for j in range(n):
        if abs(complex(lam) + j) <= POLE_TOLERANCE:
            return j
    return None
