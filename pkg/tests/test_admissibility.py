import csv
import math

import pytest

from bessel_subord.admissibility.models import (
    AdmissiblePoint,
    AuditSampling,
    Functional3,
    RegionSpec,
)
from bessel_subord.admissibility.schemas import ViolationRow
from bessel_subord.admissibility.service import (
    audit,
    build_point_H,
    build_point_H1,
    build_point_H2,
    default_region,
    write_violations_csv,
)
from bessel_subord.exceptions import ConstraintError, DegenerateDenominator, DomainError

SMALL_SAMPLING = AuditSampling(theta_samples=16)


class TestPoints:
    def test_class_H(self):
        u, v, w = build_point_H(theta=0.0, k=1.0, L=0.0, M=1.0, kappa=2.0)
        assert u == pytest.approx(1.0)
        assert v == pytest.approx(1.0)
        # (L + (kappa-1)(2k+kappa-2) M) / (kappa (kappa-1))
        assert w == pytest.approx(1.0)

    def test_class_H_rotates_with_theta(self):
        u, v, _ = build_point_H(theta=math.pi / 2, k=2.0, L=2j, M=0.5, kappa=3.0)
        assert u == pytest.approx(0.5j)
        assert v == pytest.approx(4 / 3 * 0.5j)

    def test_class_H1(self):
        u, v, w = build_point_H1(theta=0.0, k=1.0, L=0.0, M=0.5, kappa=3.0)
        assert u == pytest.approx(1.5)
        assert v == pytest.approx(1.9166666666666667, rel=1e-12)
        assert w == pytest.approx(3.2160493827160495, rel=1e-12)

    def test_class_H2(self):
        u, v, w = build_point_H2(theta=0.0, k=1.0, L=0.0, M=1.0, kappa=2.0)
        assert u == pytest.approx(2.0)
        assert v == pytest.approx(2.5)
        # 1 + kappa (2k + kappa - 1) M / (kappa (kappa-1))
        assert w == pytest.approx(4.0)

    @pytest.mark.parametrize("build", [build_point_H, build_point_H1, build_point_H2])
    def test_constraint_on_L(self, build):
        with pytest.raises(ConstraintError, match="\\(k-1\\) k M"):
            build(theta=0.0, k=2.0, L=1.0, M=1.0, kappa=3.0)

    def test_k_below_one(self):
        with pytest.raises(ConstraintError, match="k must be"):
            AdmissiblePoint(theta=0.0, k=0.5, L=0.0, M=1.0, kappa=2.0)

    def test_M_positive(self):
        with pytest.raises(DomainError, match="M must be positive"):
            AdmissiblePoint(theta=0.0, k=1.0, L=0.0, M=0.0, kappa=2.0)

    def test_constraint_boundary_is_admissible(self):
        point = AdmissiblePoint(theta=0.3, k=2.0, L=2.0 * complex(math.cos(0.3), math.sin(0.3)), M=1.0, kappa=2.0)
        assert point.projected_L == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "build, kappa",
        [(build_point_H, 1.0), (build_point_H, 0.0), (build_point_H1, 2.0), (build_point_H2, 1.0)],
    )
    def test_excluded_kappa(self, build, kappa):
        with pytest.raises(DomainError, match="kappa must avoid"):
            build(theta=0.0, k=1.0, L=0.0, M=1.0, kappa=kappa)

    def test_degenerate_first_denominator(self):
        with pytest.raises(DegenerateDenominator, match="1 \\+ M e"):
            build_point_H1(theta=math.pi, k=1.0, L=0.0, M=1.0, kappa=3.0)

    @pytest.mark.parametrize("build", [build_point_H, build_point_H1, build_point_H2])
    def test_continuous_in_theta(self, build):
        a = build(theta=0.7, k=1.5, L=2.0 * complex(math.cos(0.7), math.sin(0.7)), M=0.5, kappa=3.0)
        b = build(theta=0.7 + 1e-9, k=1.5, L=2.0 * complex(math.cos(0.7 + 1e-9), math.sin(0.7 + 1e-9)), M=0.5, kappa=3.0)
        assert all(abs(x - y) < 1e-7 for x, y in zip(a, b))

    @pytest.mark.parametrize("build", [build_point_H, build_point_H1, build_point_H2])
    @pytest.mark.parametrize("dk, dL", [(1e-6, 0), (-1e-6, 0), (0, 1e-6), (0, 1e-6j), (1e-6, -1e-6 + 1e-6j)])
    def test_continuous_in_k_and_L(self, build, dk, dL):
        L = 2.0 * complex(math.cos(0.7), math.sin(0.7))
        a = build(theta=0.7, k=1.5, L=L, M=0.5, kappa=3.0)
        b = build(theta=0.7, k=1.5 + dk, L=L + dL, M=0.5, kappa=3.0)
        assert all(abs(x - y) < 1e-4 for x, y in zip(a, b))
        assert any(x != y for x, y in zip(a, b))


class TestRegions:
    def test_disk_is_open(self):
        region = RegionSpec.disk(0, 1.0)
        assert region.contains(0.5)
        assert not region.contains(1.0)
        assert not region.contains(1.0 - 1e-14)

    def test_complement_disk(self):
        region = RegionSpec.complement_disk(1, 2.0)
        assert region.contains(4.0)
        assert not region.contains(3.0)

    def test_halfplane(self):
        region = RegionSpec.halfplane(normal=1j, offset=0.5)
        assert region.contains(1j)
        assert not region.contains(0.5j)
        assert not region.contains(10.0)

    def test_validation(self):
        with pytest.raises(DomainError):
            RegionSpec.disk(0, 0.0)
        with pytest.raises(DomainError):
            RegionSpec.halfplane(normal=0, offset=1.0)

    def test_default_regions(self):
        assert default_region("v-u", "H", 1.0, 2.0).radius == pytest.approx(0.5)
        assert default_region("v", "H1", 0.5, 3.0).center == 1
        assert default_region("v-u", "H1", 1.0, 3.0).radius == pytest.approx(0.25)
        with pytest.raises(ValueError, match="No default region"):
            default_region("v-1", "H", 1.0, 2.0)


class TestFunctionals:
    def test_named(self):
        assert Functional3.named("v-u")(1, 3, 0) == 2
        assert Functional3.named("v-1")(0, 3j, 0) == 3j - 1

    def test_unknown(self):
        with pytest.raises(ValueError, match="Unknown functional"):
            Functional3.named("w")

    def test_constant(self):
        phi = Functional3.constant(0)
        assert phi(1, 2, 3) == 0
        assert phi.name.startswith("const(")


class TestSampling:
    def test_L_values_satisfy_the_constraint(self):
        sampling = AuditSampling(theta_samples=8)
        for theta in sampling.thetas:
            for k in sampling.k_grid:
                for L in sampling.L_values(theta, k, 0.5):
                    AdmissiblePoint(theta=theta, k=k, L=L, M=0.5, kappa=2.0)

    def test_k_grid_sorted(self):
        assert AuditSampling(k_grid=(4.0, 1.0, 2.0)).k_grid == (1.0, 2.0, 4.0)

    @pytest.mark.parametrize(
        "kwargs", [{"theta_samples": 0}, {"k_grid": ()}, {"k_grid": (0.5, 2.0)}, {"l_offsets": (-1.0,)}]
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            AuditSampling(**kwargs)


class TestAudit:
    def test_difference_functional_violates_below_k_two(self):
        region = default_region("v-u", "H", 1.0, 2.0)
        report = audit(Functional3.named("v-u"), region, "H", M=1.0, kappa=2.0, sampling=SMALL_SAMPLING)
        assert report.violation_found
        assert report.min_k == 2.0
        assert set(report.min_k_per_theta) == {2.0}
        assert {row.k for row in report.violations} == {1.0, 1.25, 1.5}
        assert "violation found" in report.summary()

    def test_v_is_clean_in_H(self):
        region = default_region("v", "H", 1.0, 2.0)
        report = audit(Functional3.named("v"), region, "H", M=1.0, kappa=2.0, sampling=SMALL_SAMPLING)
        assert not report.violation_found
        assert report.min_k == 1.0
        assert report.summary().startswith("no violation found at resolution")

    def test_difference_functional_is_clean_in_H2(self):
        region = default_region("v-u", "H2", 1.0, 2.0)
        report = audit(Functional3.named("v-u"), region, "H2", M=1.0, kappa=2.0, sampling=SMALL_SAMPLING)
        assert not report.violation_found

    def test_constant_inside_region_violates_everywhere(self):
        report = audit(
            Functional3.constant(0), RegionSpec.disk(0, 1.0), "H", M=1.0, kappa=2.0, sampling=SMALL_SAMPLING
        )
        assert report.min_k is None
        assert all(k is None for k in report.min_k_per_theta)
        assert len(report.violations) == report.points_checked

    def test_counts(self):
        report = audit(
            Functional3.named("v"), RegionSpec.disk(0, 1.0), "H", M=1.0, kappa=2.0, sampling=SMALL_SAMPLING
        )
        # 16 thetas x 6 k x (3 rays + 2 perturbations)
        assert report.points_checked == 16 * 6 * 5

    def test_larger_region_only_adds_violations(self):
        phi = Functional3.named("v-u")
        counts = [
            len(audit(phi, RegionSpec.disk(0, radius), "H", M=1.0, kappa=2.0, sampling=SMALL_SAMPLING).violations)
            for radius in (0.25, 0.5, 1.0, 2.0)
        ]
        assert counts == sorted(counts)

    def test_degenerate_points_are_skipped(self):
        sampling = AuditSampling(theta_samples=2, k_grid=(1.0,), l_offsets=(0.0,), imaginary_perturbation=False)
        report = audit(Functional3.named("v"), RegionSpec.disk(1, 1.0), "H1", M=1.0, kappa=3.0, sampling=sampling)
        # theta = pi makes 1 + M e^{i theta} vanish
        assert report.skipped_points == 1
        assert report.points_checked == 1

    def test_violations_csv(self, tmp_path):
        region = default_region("v-u", "H", 1.0, 2.0)
        report = audit(Functional3.named("v-u"), region, "H", M=1.0, kappa=2.0, sampling=SMALL_SAMPLING)
        path = tmp_path / "violations.csv"
        write_violations_csv(report, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ViolationRow.csv_header()
        assert rows[0] == ["theta", "k", "L_re", "L_im", "phi_re", "phi_im"]
        assert len(rows) == len(report.violations) + 1
        assert float(rows[1][1]) == report.violations[0].k
