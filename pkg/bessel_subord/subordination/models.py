from dataclasses import dataclass, field
from enum import StrEnum

from bessel_subord.besselgen.models import BesselParams
from bessel_subord.complexfn.service import as_complex
from bessel_subord.exceptions import DomainError, NormalizationError
from bessel_subord.series.models import DiskGrid, TruncatedSeries


@dataclass(frozen=True)
class DiskTarget:
    """The disk |w - center| < radius, image of q(z) = center + M z."""

    center: complex
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", as_complex(self.center, "center"))
        if not self.radius > 0:
            raise DomainError(f"Disk radius M must be positive, got {self.radius}")


class CaseId(StrEnum):
    C2_4 = "C2_4"
    C2_5 = "C2_5"
    C2_8 = "C2_8"
    C2_11 = "C2_11"
    C2_12 = "C2_12"
    CHAIN_2_111 = "chain_2_111"
    CHAIN_4_10 = "chain_4_10"
    TRIG_CHAIN_SIN = "trig_chain_sin"
    TRIG_CHAIN_SINH = "trig_chain_sinh"

    @property
    def is_chain(self) -> bool:
        return self in _CHAINS

    @property
    def base(self) -> "CaseId":
        """The corollary a chain repeats link by link."""
        return _CHAIN_BASE.get(self, self)


_CHAIN_BASE = {
    CaseId.CHAIN_2_111: CaseId.C2_4,
    CaseId.CHAIN_4_10: CaseId.C2_12,
    CaseId.TRIG_CHAIN_SIN: CaseId.C2_4,
    CaseId.TRIG_CHAIN_SINH: CaseId.C2_4,
}
_CHAINS = frozenset(_CHAIN_BASE)


@dataclass(frozen=True)
class VerifyCase:
    """One corollary instance: operator parameters, test function and grid.

    ``M=None`` calibrates M from the premise sup; an explicit M is tested as
    given. ``link_count`` is the number of kappa -> kappa+1 links a chain
    follows after the premise (trig chains always use two).
    """

    case_id: CaseId
    params: BesselParams
    f: TruncatedSeries
    grid: DiskGrid = field(default_factory=DiskGrid.default)
    M: float | None = None
    link_count: int = 1
    f_label: str = "f"

    def __post_init__(self) -> None:
        object.__setattr__(self, "case_id", CaseId(self.case_id))
        if self.M is not None and not self.M > 0:
            raise DomainError(f"M must be positive, got {self.M}")
        if self.link_count < 1:
            raise DomainError(f"link_count must be >= 1, got {self.link_count}")
        if self.link_count > 1 and not self.case_id.is_chain:
            raise DomainError(f"{self.case_id} is a single implication, link_count must be 1")
        if not self.f.is_class_a:
            raise NormalizationError("Test function must be class A")
