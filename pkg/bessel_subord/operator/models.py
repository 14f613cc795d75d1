from dataclasses import dataclass
from enum import StrEnum

from bessel_subord.besselgen.models import BesselParams, HypergeometricParams
from bessel_subord.besselgen.service import hypergeometric_series, phi_series
from bessel_subord.series.models import TruncatedSeries
from bessel_subord.series.service import multiply_by_z


class OperatorKind(StrEnum):
    GENERAL = "general"
    BESSEL_J = "bessel_j"  # b = 1, c = 1
    MODIFIED_I = "modified_i"  # b = 1, c = -1
    SPHERICAL_S = "spherical_s"  # b = 2, c = 1
    DZIOK_SRIVASTAVA = "dziok_srivastava"


# (b, c) of the special Bessel kinds
_SPECIAL_KINDS: dict[OperatorKind, tuple[float, float]] = {
    OperatorKind.BESSEL_J: (1.0, 1.0),
    OperatorKind.MODIFIED_I: (1.0, -1.0),
    OperatorKind.SPHERICAL_S: (2.0, 1.0),
}


@dataclass(frozen=True)
class OperatorSpec:
    """A convolution operator f -> kernel * f on class A.

    Bessel kinds carry BesselParams; the Dziok-Srivastava kind carries
    HypergeometricParams and an argument scale, with kernel z qFs(scale z).
    """

    kind: OperatorKind
    params: BesselParams | None = None
    hyper: HypergeometricParams | None = None
    argument_scale: complex = 1.0

    def __post_init__(self) -> None:
        if self.kind is OperatorKind.DZIOK_SRIVASTAVA:
            if self.hyper is None:
                raise ValueError("dziok_srivastava operator needs HypergeometricParams")
        elif self.params is None:
            raise ValueError(f"{self.kind} operator needs BesselParams")

    @property
    def is_bessel(self) -> bool:
        return self.kind is not OperatorKind.DZIOK_SRIVASTAVA

    @classmethod
    def general(cls, params: BesselParams) -> "OperatorSpec":
        return cls(kind=OperatorKind.GENERAL, params=params)

    @classmethod
    def _special(cls, kind: OperatorKind, p: complex) -> "OperatorSpec":
        b, c = _SPECIAL_KINDS[kind]
        return cls(kind=kind, params=BesselParams(p=p, b=b, c=c))

    @classmethod
    def bessel_j(cls, p: complex) -> "OperatorSpec":
        return cls._special(OperatorKind.BESSEL_J, p)

    @classmethod
    def modified_i(cls, p: complex) -> "OperatorSpec":
        return cls._special(OperatorKind.MODIFIED_I, p)

    @classmethod
    def spherical_s(cls, p: complex) -> "OperatorSpec":
        return cls._special(OperatorKind.SPHERICAL_S, p)

    @classmethod
    def dziok_srivastava(cls, hyper: HypergeometricParams, argument_scale: complex = 1.0) -> "OperatorSpec":
        return cls(kind=OperatorKind.DZIOK_SRIVASTAVA, hyper=hyper, argument_scale=argument_scale)

    def kernel(self, N: int) -> TruncatedSeries:
        """The class-A series this operator convolves with, at order N."""
        if self.is_bessel:
            return phi_series(self.params, N)
        body = hypergeometric_series(self.hyper, N - 1, scale=self.argument_scale)
        return TruncatedSeries(multiply_by_z(body).coeffs, normalized=True)


@dataclass(frozen=True)
class RatioCheck:
    """Outcome of a pointwise ratio identity on a grid."""

    residual: float
    checked: int
    skipped: int
    worst_z: complex = 0j

    @property
    def skip_fraction(self) -> float:
        total = self.checked + self.skipped
        return self.skipped / total if total else 0.0
