import cmath
import csv
from pathlib import Path

from loguru import logger

from bessel_subord.admissibility.models import (
    AdmissibleClass,
    AdmissiblePoint,
    AuditSampling,
    Functional3,
    RegionSpec,
)
from bessel_subord.admissibility.schemas import AuditReport, ViolationRow
from bessel_subord.exceptions import DegenerateDenominator, DomainError

DEGENERACY_TOLERANCE = 1e-9
BOUNDARY_TOLERANCE = 1e-12

Triple = tuple[complex, complex, complex]


def _require_kappa(kappa: complex, forbidden: tuple[int, ...]) -> complex:
    kappa = complex(kappa)
    for value in forbidden:
        if abs(kappa - value) <= 1e-12:
            raise DomainError(f"kappa must avoid {forbidden}, got {kappa!r}")
    return kappa


# --- Boundary points ---


def build_point_H(theta: float, k: float, L: complex, M: float, kappa: complex) -> Triple:
    """Point of the class for q(z) = M z (requires kappa != 0, 1)."""
    kappa = _require_kappa(kappa, (0, 1))
    point = AdmissiblePoint(theta=theta, k=k, L=L, M=M, kappa=kappa)
    m = M * point.rotation
    u = m
    v = (k + kappa - 1) / kappa * m
    w = (point.L + (kappa - 1) * (2 * k + kappa - 2) * m) / (kappa * (kappa - 1))
    return u, v, w


def build_point_H1(theta: float, k: float, L: complex, M: float, kappa: complex) -> Triple:
    """Point of the ratio class for q(z) = 1 + M z (requires kappa != 0, 1, 2)."""
    kappa = _require_kappa(kappa, (0, 1, 2))
    point = AdmissiblePoint(theta=theta, k=k, L=L, M=M, kappa=kappa)
    e, e_inv = point.rotation, cmath.exp(-1j * theta)
    m = M * e
    one_m = 1 + m
    if abs(one_m) < DEGENERACY_TOLERANCE:
        raise DegenerateDenominator(f"1 + M e^(i theta) vanishes at theta={theta:g}, M={M:g}")

    u = one_m
    lead = (k + kappa * one_m) * m
    v = 1 + lead / ((kappa - 1) * one_m)

    num = (M + e_inv) * (point.L * e_inv + (1 + kappa) * k * M + kappa * k * M * M * e) - k * k * M * M
    den = (kappa - 2) * (M + e_inv) * ((kappa - 1) * e_inv + kappa * M * M * e + (1 + k + 2 * kappa) * M)
    if abs(den) < DEGENERACY_TOLERANCE * max(1.0, abs(num)):
        raise DegenerateDenominator(f"third component denominator vanishes at theta={theta:g}, k={k:g}")
    w = 1 + lead / ((kappa - 2) * one_m) + num / den
    return u, v, w


def build_point_H2(theta: float, k: float, L: complex, M: float, kappa: complex) -> Triple:
    """Point of the class for q(z) = 1 + M z applied to B f / z (requires kappa != 0, 1)."""
    kappa = _require_kappa(kappa, (0, 1))
    point = AdmissiblePoint(theta=theta, k=k, L=L, M=M, kappa=kappa)
    m = M * point.rotation
    u = 1 + m
    v = 1 + (k + kappa) / kappa * m
    w = 1 + (point.L + kappa * (2 * k + kappa - 1) * m) / (kappa * (kappa - 1))
    return u, v, w


_BUILDERS = {
    AdmissibleClass.H: build_point_H,
    AdmissibleClass.H1: build_point_H1,
    AdmissibleClass.H2: build_point_H2,
}


def default_region(functional: str, admissible_class: AdmissibleClass | str, M: float, kappa: complex) -> RegionSpec:
    """Omega used by the corollary whose proof takes this functional in this class."""
    cls = AdmissibleClass(admissible_class)
    kappa = complex(kappa)
    match cls, functional:
        case AdmissibleClass.H, "v":
            return RegionSpec.disk(0, M)
        case AdmissibleClass.H, "v-u":
            return RegionSpec.disk(0, M / abs(kappa))
        case AdmissibleClass.H1, "v-u":
            return RegionSpec.disk(0, M * M / (abs(kappa - 1) * (1 + M)))
        case AdmissibleClass.H1, "v":
            return RegionSpec.disk(1, M)
        case AdmissibleClass.H2, "v-u":
            return RegionSpec.disk(0, M / abs(kappa))
        case AdmissibleClass.H2, "v-1":
            return RegionSpec.disk(0, M)
        case AdmissibleClass.H2, "v":
            return RegionSpec.disk(1, M)
    raise DomainError(f"No default region for functional {functional!r} in class {cls}")


# --- Audit ---


def audit(
    phi: Functional3,
    region: RegionSpec,
    admissible_class: AdmissibleClass | str,
    M: float,
    kappa: complex,
    sampling: AuditSampling | None = None,
    boundary_tol: float = BOUNDARY_TOLERANCE,
) -> AuditReport:
    """Sample boundary points of the class and record where phi lands inside ``region``.

    Sampling can only find violations; a clean report means none were found
    at this resolution. min-k per theta is the smallest grid k from which
    every larger grid k avoids the region.
    """
    cls = AdmissibleClass(admissible_class)
    sampling = sampling or AuditSampling()
    build = _BUILDERS[cls]

    violations: list[ViolationRow] = []
    min_k_per_theta: list[float | None] = []
    checked = skipped = 0

    for theta in sampling.thetas:
        violating_k: set[float] = set()
        for k in sampling.k_grid:
            for L in sampling.L_values(theta, k, M):
                try:
                    u, v, w = build(theta, k, L, M, kappa)
                except DegenerateDenominator as exc:
                    skipped += 1
                    logger.debug(f"skipped degenerate point: {exc}")
                    continue
                checked += 1
                value = phi(u, v, w)
                if region.contains(value, boundary_tol):
                    violating_k.add(k)
                    violations.append(
                        ViolationRow(
                            theta=theta, k=k, L_re=L.real, L_im=L.imag, phi_re=value.real, phi_im=value.imag
                        )
                    )
        min_k_per_theta.append(_min_avoiding_k(sampling.k_grid, violating_k))

    min_k = None if any(k is None for k in min_k_per_theta) else max(min_k_per_theta)
    report = AuditReport(
        functional=phi.name,
        admissible_class=str(cls),
        M=M,
        kappa=complex(kappa),
        region=region.describe(),
        points_checked=checked,
        skipped_points=skipped,
        violations=violations,
        min_k_per_theta=min_k_per_theta,
        min_k=min_k,
    )
    log = logger.warning if violations else logger.info
    log(f"audit {phi.name} in {cls} vs {report.region}: {report.summary()}")
    return report


def _min_avoiding_k(k_grid: tuple[float, ...], violating: set[float]) -> float | None:
    best = None
    for k in reversed(k_grid):
        if k in violating:
            break
        best = k
    return best


def write_violations_csv(report: AuditReport, path: Path) -> None:
    """Dump violating points as (theta, k, L_re, L_im, phi_re, phi_im) rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ViolationRow.csv_header())
        for row in report.violations:
            writer.writerow(row.csv_row())
    logger.info(f"wrote {len(report.violations)} violation rows to {path}")
