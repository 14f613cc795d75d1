from dataclasses import dataclass, field
from enum import StrEnum

from bessel_subord.complexfn.service import as_complex, first_zero_factor, is_pole
from bessel_subord.exceptions import DomainError, PoleError


@dataclass(frozen=True)
class BesselParams:
    """Parameters (p, b, c) of the generalized Bessel function, kappa = p + (b+1)/2."""

    p: complex
    b: complex
    c: complex

    def __post_init__(self) -> None:
        for name in ("p", "b", "c"):
            object.__setattr__(self, name, as_complex(getattr(self, name), name))
        if is_pole(self.kappa):
            raise PoleError(f"kappa = p + (b+1)/2 = {self.kappa!r} is a nonpositive integer")

    @property
    def kappa(self) -> complex:
        return self.p + (self.b + 1) / 2

    def shifted(self, steps: int) -> "BesselParams":
        """Same (b, c) with kappa moved by ``steps`` (via p)."""
        return BesselParams(self.p + steps, self.b, self.c)

    def negated_c(self) -> "BesselParams":
        return BesselParams(self.p, self.b, -self.c)

    def label(self) -> str:
        return f"p={_fmt(self.p)} b={_fmt(self.b)} c={_fmt(self.c)} kappa={_fmt(self.kappa)}"

    @classmethod
    def from_kappa(cls, kappa: complex, c: complex, b: complex = 1.0) -> "BesselParams":
        """Pick p so that p + (b+1)/2 = kappa; only (kappa, c) matter for phi."""
        kappa, b = complex(kappa), complex(b)
        return cls(p=kappa - (b + 1) / 2, b=b, c=c)


@dataclass(frozen=True)
class HypergeometricParams:
    """Numerator parameters alphas (q of them) and denominator betas (s of them), q <= s+1."""

    alphas: tuple[complex, ...] = field(default_factory=tuple)
    betas: tuple[complex, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        alphas = tuple(as_complex(a, "alpha") for a in self.alphas)
        betas = tuple(as_complex(b, "beta") for b in self.betas)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)
        if len(alphas) > len(betas) + 1:
            raise DomainError(f"Need q <= s+1, got q={len(alphas)}, s={len(betas)}")
        for beta in betas:
            if is_pole(beta):
                raise PoleError(f"beta={beta!r} is a nonpositive integer")

    @property
    def q(self) -> int:
        return len(self.alphas)

    @property
    def s(self) -> int:
        return len(self.betas)

    def terminates_at(self, n: int) -> int | None:
        """Index after which the series is a polynomial (some alpha is a nonpositive integer)."""
        hits = [j for a in self.alphas if (j := first_zero_factor(a, n)) is not None]
        return min(hits) if hits else None


class ClosedForm(StrEnum):
    """Elementary closed forms of phi for half-integer kappa and c = +-1."""

    COS_NEGH = "cos_negh"  # z cos sqrt z
    SIN_HALF = "sin_half"  # sqrt z sin sqrt z
    SIN_3H = "sin_3h"  # 3 sin sqrt z / sqrt z - 3 cos sqrt z
    COSH_NEGH = "cosh_negh"  # z cosh sqrt z
    SINH_HALF = "sinh_half"  # sqrt z sinh sqrt z
    SINH_3H = "sinh_3h"  # 3 cosh sqrt z - 3 sinh sqrt z / sqrt z

    @property
    def kappa(self) -> float:
        return _CLOSED_FORM_PARAMS[self][0]

    @property
    def c(self) -> float:
        return _CLOSED_FORM_PARAMS[self][1]

    def params(self, b: float = 1.0) -> BesselParams:
        return BesselParams.from_kappa(self.kappa, self.c, b=b)


_CLOSED_FORM_PARAMS: dict[ClosedForm, tuple[float, float]] = {
    ClosedForm.COS_NEGH: (0.5, 1.0),
    ClosedForm.SIN_HALF: (1.5, 1.0),
    ClosedForm.SIN_3H: (2.5, 1.0),
    ClosedForm.COSH_NEGH: (0.5, -1.0),
    ClosedForm.SINH_HALF: (1.5, -1.0),
    ClosedForm.SINH_3H: (2.5, -1.0),
}


def _fmt(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:g}"
    return f"{z.real:g}{z.imag:+g}j"
