from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from bessel_subord.exceptions import DomainError, NonFiniteError, NormalizationError

DEFAULT_ORDER = 64
MAX_GRID_RADIUS = 0.999
MIN_ANGULAR_SAMPLES = 256


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Coefficients a_0 .. a_N of an analytic function on the unit disk.

    The array is copied on construction and frozen, so a series is an
    immutable value. With ``normalized=True`` the series is asserted to be of
    class A, i.e. a_0 = 0 and a_1 = 1.
    """

    coeffs: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        data = np.array(self.coeffs, dtype=np.complex128, copy=True).reshape(-1)
        if data.size == 0:
            raise DomainError("A truncated series needs at least one coefficient")
        if not np.all(np.isfinite(data)):
            raise NonFiniteError("Series coefficients must be finite")
        data.setflags(write=False)
        object.__setattr__(self, "coeffs", data)
        if self.normalized:
            if data.size < 2 or data[0] != 0 or data[1] != 1:
                raise NormalizationError(
                    "Class-A series needs a_0 = 0 and a_1 = 1, "
                    f"got a_0={data[0]!r}, a_1={data[1] if data.size > 1 else None!r}"
                )

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_class_a(self) -> bool:
        return self.order >= 1 and self.coeffs[0] == 0 and self.coeffs[1] == 1

    def __len__(self) -> int:
        return self.coeffs.size

    def __getitem__(self, n: int) -> complex:
        return complex(self.coeffs[n])

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise DomainError(f"Cannot raise truncation order {self.order} to {order}")
        return TruncatedSeries(self.coeffs[: order + 1], normalized=self.normalized and order >= 1)

    def equals(self, other: "TruncatedSeries") -> bool:
        """Exact coefficientwise equality at equal order."""
        return self.order == other.order and bool(np.array_equal(self.coeffs, other.coeffs))

    def to_pairs(self) -> list[list[float]]:
        """Flat list of (re, im) pairs, the report serialization."""
        return [[float(c.real), float(c.imag)] for c in self.coeffs]

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]], normalized: bool = False) -> "TruncatedSeries":
        return cls(np.array([complex(re, im) for re, im in pairs]), normalized=normalized)

    @classmethod
    def from_coefficients(cls, coeffs: Iterable[complex], normalized: bool = False) -> "TruncatedSeries":
        return cls(np.asarray(list(coeffs), dtype=np.complex128), normalized=normalized)

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        return cls(np.zeros(order + 1, dtype=np.complex128))

    @classmethod
    def constant(cls, value: complex, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        data = np.zeros(order + 1, dtype=np.complex128)
        data[0] = value
        return cls(data)

    @classmethod
    def monomial(cls, degree: int, order: int = DEFAULT_ORDER, coefficient: complex = 1.0) -> "TruncatedSeries":
        if degree > order:
            raise DomainError(f"Degree {degree} exceeds truncation order {order}")
        data = np.zeros(order + 1, dtype=np.complex128)
        data[degree] = coefficient
        return cls(data, normalized=degree == 1 and coefficient == 1)

    @classmethod
    def identity_convolver(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        """z/(1-z) truncated: the identity of the Hadamard product on class A."""
        data = np.ones(order + 1, dtype=np.complex128)
        data[0] = 0
        return cls(data, normalized=True)


@dataclass(frozen=True)
class DiskGrid:
    """Radii in (0, 0.999] and a shared angular sample count, discretizing the unit disk.

    With ``refine`` sups over the grid are polished between samples.
    """

    radii: tuple[float, ...]
    angular_samples: int = 4096
    refine: bool = False

    def __post_init__(self) -> None:
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if not radii:
            raise DomainError("DiskGrid needs at least one radius")
        if any(r <= 0 for r in radii) or radii[-1] > MAX_GRID_RADIUS:
            raise DomainError(f"Radii must lie in (0, {MAX_GRID_RADIUS}], got {radii}")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise DomainError(f"Radii must be strictly increasing, got {radii}")
        if self.angular_samples < MIN_ANGULAR_SAMPLES:
            raise DomainError(f"angular_samples must be >= {MIN_ANGULAR_SAMPLES}, got {self.angular_samples}")

    @property
    def r_max(self) -> float:
        return self.radii[-1]

    @property
    def size(self) -> int:
        return len(self.radii) * self.angular_samples

    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.angular_samples) / self.angular_samples

    def points(self) -> np.ndarray:
        """Grid points, shape (len(radii), angular_samples), radius-major."""
        unit = np.exp(1j * self.angles())
        return np.asarray(self.radii)[:, None] * unit[None, :]

    @classmethod
    def default(cls) -> "DiskGrid":
        return cls(radii=(0.5, 0.9, 0.99, 0.999), angular_samples=4096)


@dataclass(frozen=True)
class CircleMax:
    """Sampled maximum of |f| on a circle together with where it was attained."""

    value: float
    theta: float
    radius: float
    samples: int = field(default=0)

    @property
    def point(self) -> complex:
        return complex(self.radius * np.exp(1j * self.theta))
