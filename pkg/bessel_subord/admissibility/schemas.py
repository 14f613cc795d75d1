from pydantic import BaseModel


class ViolationRow(BaseModel):
    """A sampled point whose functional value lands inside the region."""

    theta: float
    k: float
    L_re: float
    L_im: float
    phi_re: float
    phi_im: float

    @classmethod
    def csv_header(cls) -> list[str]:
        return list(cls.model_fields)

    def csv_row(self) -> list[str]:
        return [repr(getattr(self, name)) for name in self.csv_header()]


class AuditReport(BaseModel):
    """Result of sampling one functional against one region over an admissibility class."""

    functional: str
    admissible_class: str
    M: float
    kappa: complex
    region: str
    points_checked: int
    skipped_points: int = 0  # degenerate denominators
    violations: list[ViolationRow] = []
    min_k_per_theta: list[float | None] = []
    min_k: float | None = None  # None when some theta still violates at the largest k

    @property
    def violation_found(self) -> bool:
        return bool(self.violations)

    def summary(self) -> str:
        if not self.violations:
            return f"no violation found at resolution {self.points_checked} points"
        first = self.violations[0]
        return (
            f"violation found at point theta={first.theta:.6g} k={first.k:g} "
            f"L={complex(first.L_re, first.L_im):.6g} ({len(self.violations)} total, min-k={self.min_k})"
        )
