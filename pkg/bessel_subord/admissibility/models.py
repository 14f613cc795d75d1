import cmath
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Callable

from bessel_subord.complexfn.service import as_complex
from bessel_subord.exceptions import ConstraintError, DomainError

# relative slack for points sampled exactly on the constraint boundary
CONSTRAINT_SLACK = 1e-12


class AdmissibleClass(StrEnum):
    """Disk admissibility classes: H for q = M z, H1 and H2 for q = 1 + M z."""

    H = "H"
    H1 = "H1"
    H2 = "H2"


@dataclass(frozen=True)
class AdmissiblePoint:
    """A boundary parameter (theta, k, L) with Re(L e^{-i theta}) >= (k-1) k M."""

    theta: float
    k: float
    L: complex
    M: float
    kappa: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "L", as_complex(self.L, "L"))
        object.__setattr__(self, "kappa", as_complex(self.kappa, "kappa"))
        if not self.M > 0:
            raise DomainError(f"M must be positive, got {self.M}")
        if self.k < 1:
            raise ConstraintError(f"k must be >= 1, got {self.k}")
        lower = (self.k - 1) * self.k * self.M
        if self.projected_L < lower - CONSTRAINT_SLACK * max(1.0, lower):
            raise ConstraintError(
                f"Re(L e^(-i theta)) = {self.projected_L:g} < (k-1) k M = {lower:g} "
                f"at theta={self.theta:g}, k={self.k:g}"
            )

    @property
    def rotation(self) -> complex:
        return cmath.exp(1j * self.theta)

    @property
    def projected_L(self) -> float:
        return (self.L * cmath.exp(-1j * self.theta)).real


@dataclass(frozen=True)
class Functional3:
    """A map (u, v, w; z) -> complex, named after the proof functionals or user supplied."""

    name: str
    fn: Callable[[complex, complex, complex, complex], complex] = field(compare=False, repr=False)

    def __call__(self, u: complex, v: complex, w: complex, z: complex = 0j) -> complex:
        return complex(self.fn(u, v, w, z))

    @classmethod
    def named(cls, name: str) -> "Functional3":
        try:
            return cls(name=name, fn=_NAMED_FUNCTIONALS[name])
        except KeyError:
            raise DomainError(
                f"Unknown functional {name!r}, expected one of {sorted(_NAMED_FUNCTIONALS)}"
            ) from None

    @classmethod
    def constant(cls, value: complex) -> "Functional3":
        value = complex(value)
        return cls(name=f"const({value:g})", fn=lambda u, v, w, z: value)


_NAMED_FUNCTIONALS: dict[str, Callable[[complex, complex, complex, complex], complex]] = {
    "v": lambda u, v, w, z: v,
    "v-u": lambda u, v, w, z: v - u,
    "v-1": lambda u, v, w, z: v - 1,
}

FUNCTIONAL_NAMES = tuple(_NAMED_FUNCTIONALS)


class RegionKind(StrEnum):
    DISK = "disk"
    COMPLEMENT_DISK = "complement_disk"
    HALFPLANE = "halfplane"


@dataclass(frozen=True)
class RegionSpec:
    """The set Omega the functional must avoid.

    disk: |w - center| < radius; complement_disk: |w - center| > radius;
    halfplane: Re(conj(normal) w) > offset.
    """

    kind: RegionKind
    center: complex = 0j
    radius: float = 1.0
    normal: complex = 1 + 0j
    offset: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", RegionKind(self.kind))
        object.__setattr__(self, "center", as_complex(self.center, "center"))
        if self.kind is RegionKind.HALFPLANE:
            if self.normal == 0:
                raise DomainError("Half-plane normal must be nonzero")
        elif not self.radius > 0:
            raise DomainError(f"Region radius must be positive, got {self.radius}")

    @classmethod
    def disk(cls, center: complex, radius: float) -> "RegionSpec":
        return cls(kind=RegionKind.DISK, center=center, radius=radius)

    @classmethod
    def complement_disk(cls, center: complex, radius: float) -> "RegionSpec":
        return cls(kind=RegionKind.COMPLEMENT_DISK, center=center, radius=radius)

    @classmethod
    def halfplane(cls, normal: complex, offset: float) -> "RegionSpec":
        return cls(kind=RegionKind.HALFPLANE, normal=normal, offset=offset)

    def contains(self, w: complex, boundary_tol: float = 1e-12) -> bool:
        """Strict interior membership; points within ``boundary_tol`` (relative) of the boundary count as outside."""
        match self.kind:
            case RegionKind.DISK:
                return abs(w - self.center) < self.radius * (1 - boundary_tol)
            case RegionKind.COMPLEMENT_DISK:
                return abs(w - self.center) > self.radius * (1 + boundary_tol)
            case RegionKind.HALFPLANE:
                unit = self.normal / abs(self.normal)
                return (unit.conjugate() * w).real > self.offset + boundary_tol * max(1.0, abs(self.offset))

    def describe(self) -> str:
        if self.kind is RegionKind.HALFPLANE:
            return f"halfplane(normal={self.normal:g}, offset={self.offset:g})"
        return f"{self.kind}(center={self.center:g}, radius={self.radius:.12g})"


@dataclass(frozen=True)
class AuditSampling:
    """theta grid x k grid x L rays."""

    theta_samples: int = 64
    k_grid: tuple[float, ...] = (1.0, 1.25, 1.5, 2.0, 4.0, 10.0)
    l_offsets: tuple[float, ...] = (0.0, 1.0, 10.0)  # multiples of M along the ray
    imaginary_perturbation: bool = True  # also L = ((k-1)kM +- iM) e^{i theta}

    def __post_init__(self) -> None:
        object.__setattr__(self, "k_grid", tuple(sorted(float(k) for k in self.k_grid)))
        if self.theta_samples < 1:
            raise DomainError(f"theta_samples must be >= 1, got {self.theta_samples}")
        if not self.k_grid or self.k_grid[0] < 1:
            raise DomainError(f"k grid must be non-empty with k >= 1, got {self.k_grid}")
        if any(t < 0 for t in self.l_offsets):
            raise DomainError("L offsets must be non-negative")

    @property
    def thetas(self) -> list[float]:
        return [2 * cmath.pi * j / self.theta_samples for j in range(self.theta_samples)]

    def L_values(self, theta: float, k: float, M: float) -> list[complex]:
        rot = cmath.exp(1j * theta)
        base = (k - 1) * k * M
        values = [(base + t * M) * rot for t in self.l_offsets]
        if self.imaginary_perturbation:
            values += [(base + 1j * M) * rot, (base - 1j * M) * rot]
        return values
