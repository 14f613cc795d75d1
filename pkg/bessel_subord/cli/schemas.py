from pydantic import BaseModel, ConfigDict, Field, field_serializer

# column order of every report format
REPORT_COLUMNS = ("case", "params", "premise_sup", "conclusion_sup", "bound", "margin", "worst_z", "pass")


class ReportRecord(BaseModel):
    """One line of a verification report.

    Identity checks leave premise_sup and worst_z empty and report the
    residual as conclusion_sup against the threshold in bound.
    """

    model_config = ConfigDict(populate_by_name=True, ser_json_inf_nan="constants")

    case: str
    params: str
    premise_sup: float | None = None
    conclusion_sup: float
    bound: float
    margin: float
    worst_z: complex | None = None
    passed: bool = Field(alias="pass")

    def to_row(self) -> dict[str, str]:
        """Column -> text, with repr() for floats so output is bit-reproducible."""
        return {
            "case": self.case,
            "params": self.params,
            "premise_sup": _num(self.premise_sup),
            "conclusion_sup": _num(self.conclusion_sup),
            "bound": _num(self.bound),
            "margin": _num(self.margin),
            "worst_z": "" if self.worst_z is None else _complex(self.worst_z),
            "pass": "true" if self.passed else "false",
        }

    @field_serializer("worst_z", when_used="json")
    def _worst_z_pair(self, z: complex | None) -> list[float] | None:
        return None if z is None else [z.real, z.imag]


def _num(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def _complex(z: complex) -> str:
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}j"
