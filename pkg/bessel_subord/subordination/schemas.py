from pydantic import BaseModel


class SubordinationResult(BaseModel):
    """Outcome of a subordination-to-disk check on a grid."""

    holds: bool
    margin: float
    sup: float
    worst_z: complex


class VerifyReport(BaseModel):
    """Outcome of one corollary implication check."""

    case_id: str
    params: str
    f_label: str = "f"
    premise_sup: float
    conclusion_sup: float
    M: float  # M_eff when calibrated, the given M otherwise
    bound: float  # conclusion right-hand side at M
    margin: float  # bound - conclusion_sup
    worst_z: complex
    passed: bool
    premise_holds: bool = True
    calibrated: bool = True
    skipped_points: int = 0

    @property
    def vacuous(self) -> bool:
        return not self.premise_holds
