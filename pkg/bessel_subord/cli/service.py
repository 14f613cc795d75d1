import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from loguru import logger

from bessel_subord.admissibility.models import AuditSampling, Functional3
from bessel_subord.admissibility.schemas import AuditReport
from bessel_subord.admissibility.service import audit, default_region
from bessel_subord.besselgen.models import BesselParams, ClosedForm, HypergeometricParams
from bessel_subord.besselgen.service import closed_form_eval, ode_residual, phi_series
from bessel_subord.cli.schemas import ReportRecord
from bessel_subord.complexfn.service import pochhammer
from bessel_subord.config import Settings
from bessel_subord.exceptions import DomainError, NonFiniteError
from bessel_subord.operator.models import OperatorSpec
from bessel_subord.operator.service import apply, combination_residual, ratio_identity_check, recursion_residual
from bessel_subord.series.models import TruncatedSeries
from bessel_subord.series.service import evaluate_on_grid, max_relative_difference
from bessel_subord.subordination.models import CaseId, VerifyCase
from bessel_subord.subordination.schemas import VerifyReport
from bessel_subord.subordination.service import function_family, verify_implication

IDENTITY_CASES = ("ode_residual", "recursion", "closed_forms", "hypergeometric", "ratio_identities")
CASE_NAMES = IDENTITY_CASES + tuple(c.value for c in CaseId)


@dataclass(frozen=True)
class Task:
    """A deferred check producing one report record."""

    case: str
    label: str
    run: Callable[[], ReportRecord] = field(compare=False, repr=False)


@dataclass(frozen=True)
class SingleOverrides:
    """Parameters given on the command line for ``--sweep single``."""

    p: complex | None = None
    b: complex | None = None
    c: complex | None = None
    kappa: complex | None = None
    M: float | None = None

    def params(self) -> BesselParams:
        c = 1.0 if self.c is None else self.c
        b = 1.0 if self.b is None else self.b
        if self.kappa is not None:
            return BesselParams.from_kappa(self.kappa, c, b=b)
        return BesselParams(p=0.5 if self.p is None else self.p, b=b, c=c)


# --- Record builders ---


def _identity_record(case: str, label: str, residual: float, threshold: float) -> ReportRecord:
    return ReportRecord(
        case=case,
        params=label,
        conclusion_sup=residual,
        bound=threshold,
        margin=threshold - residual,
        passed=bool(residual < threshold),
    )


def _verify_record(report: VerifyReport) -> ReportRecord:
    params = f"{report.params} f={report.f_label} M={report.M!r}"
    if not report.premise_holds:
        params += " vacuous"
    if report.skipped_points:
        params += f" skipped={report.skipped_points}"
    return ReportRecord(
        case=report.case_id,
        params=params,
        premise_sup=report.premise_sup,
        conclusion_sup=report.conclusion_sup,
        bound=report.bound,
        margin=report.margin,
        worst_z=report.worst_z,
        passed=report.passed,
    )


def audit_record(report: AuditReport) -> ReportRecord:
    """One record per audit: violation count against zero, min-k in params."""
    first = report.violations[0] if report.violations else None
    return ReportRecord(
        case=f"audit:{report.functional}:{report.admissible_class}",
        params=(
            f"M={report.M!r} kappa={report.kappa} region={report.region} "
            f"points={report.points_checked} min_k={report.min_k}"
        ),
        conclusion_sup=float(len(report.violations)),
        bound=0.0,
        margin=-float(len(report.violations)),
        worst_z=None if first is None else complex(first.phi_re, first.phi_im),
        passed=not report.violation_found,
    )


# --- Identity checks ---


def _closed_form_points() -> np.ndarray:
    radii = np.linspace(0.099, 0.99, 10)
    angles = 2 * np.pi * (np.arange(10) + 0.5) / 10
    return (radii[:, None] * np.exp(1j * angles)[None, :]).reshape(-1)


def closed_form_residual(form: ClosedForm, N: int) -> float:
    pts = _closed_form_points()
    series = evaluate_on_grid(phi_series(form.params(), N), pts)
    exact = closed_form_eval(form, pts)
    return float(np.max(np.abs(series - exact) / np.maximum(np.abs(exact), 1e-300)))


def pochhammer_kernel(params: BesselParams, order: int) -> TruncatedSeries:
    """phi_{p,b,c} from (-c/4)^n / (n! (kappa)_n), zero past the last finite term."""
    kernel = np.zeros(order + 1, dtype=np.complex128)
    t = complex(1.0)
    for n in range(order):
        if n:
            t = t * (-params.c / 4) / n
        try:
            kernel[n + 1] = t / pochhammer(params.kappa, n)
        except NonFiniteError:
            logger.debug(f"pochhammer kernel {params.label()}: stops at n={n}")
            break
    return TruncatedSeries(kernel)


def hypergeometric_residual(params: BesselParams, f: TruncatedSeries) -> float:
    """B f against the 0F1 convolution path and the Pochhammer coefficient formula."""
    direct = apply(params, f)
    spec = OperatorSpec.dziok_srivastava(HypergeometricParams(betas=(params.kappa,)), argument_scale=-params.c / 4)
    via_hyper = apply(spec, f)
    formula = TruncatedSeries(pochhammer_kernel(params, f.order).coeffs * f.coeffs)
    return max(max_relative_difference(direct, via_hyper), max_relative_difference(direct, formula))


def _timed(task: Task) -> ReportRecord:
    start = time.perf_counter()
    record = task.run()
    logger.debug(f"{task.case} [{task.label}] {time.perf_counter() - start:.3f}s pass={record.passed}")
    return record


class VerificationService:
    """Expands case names into checks over the configured parameter boxes and runs them."""

    def __init__(self, settings: Settings) -> None:
        self.settings = settings

    # --- Parameter boxes ---

    def parameter_box(self) -> list[BesselParams]:
        """(p, b, c) box; combinations whose kappa is a pole are logged and left out."""
        box = []
        sweep = self.settings.sweep
        for p, b, c in itertools.product(sweep.p_values, sweep.b_values, sweep.c_values):
            try:
                box.append(BesselParams(p=p, b=b, c=c))
            except DomainError as exc:
                logger.warning(f"parameter box drops p={p} b={b} c={c}: {exc}")
        return box

    def kappa_box(self, exclude: tuple[float, ...] = ()) -> list[BesselParams]:
        out = []
        sweep = self.settings.sweep
        for kappa, c in itertools.product(sweep.kappa_values, sweep.chain_c_values):
            if any(abs(kappa - bad) < 1e-12 for bad in exclude):
                continue
            out.append(BesselParams.from_kappa(kappa, c))
        return out

    def family(self, order: int) -> list[tuple[str, TruncatedSeries]]:
        return function_family(
            seed=self.settings.seed,
            size=self.settings.sweep.random_family_size,
            version=self.settings.sweep.random_family_version,
            order=order,
        )

    # --- Tasks ---

    def identity_tasks(self, case: str, single: SingleOverrides | None = None) -> list[Task]:
        tol = self.settings.tolerances
        N = self.settings.series.truncation_order
        box = [single.params()] if single else self.parameter_box()
        tasks: list[Task] = []

        match case:
            case "ode_residual":
                for par in box:
                    tasks.append(
                        Task(
                            case,
                            par.label(),
                            lambda par=par: _identity_record(case, par.label(), ode_residual(par, N), tol.ode),
                        )
                    )
            case "recursion":
                family = [("z/(1-z)", TruncatedSeries.identity_convolver(N))] if single else self.family(N)
                for par, (name, f) in itertools.product(box, family):
                    label = f"{par.label()} f={name}"
                    tasks.append(
                        Task(
                            case,
                            label,
                            lambda par=par, f=f, label=label: _identity_record(
                                case, label, recursion_residual(par, f, check_negated_c=True), tol.recursion
                            ),
                        )
                    )
            case "closed_forms":
                for form in ClosedForm:
                    label = f"{form.value} kappa={form.kappa:g} c={form.c:g}"
                    tasks.append(
                        Task(
                            case,
                            label,
                            lambda form=form, label=label: _identity_record(
                                case, label, closed_form_residual(form, N), tol.closed_form
                            ),
                        )
                    )
            case "hypergeometric":
                family = [("z/(1-z)", TruncatedSeries.identity_convolver(N))] if single else self.family(N)
                for par, (name, f) in itertools.product(box, family):
                    label = f"{par.label()} f={name}"
                    tasks.append(
                        Task(
                            case,
                            label,
                            lambda par=par, f=f, label=label: _identity_record(
                                case, label, hypergeometric_residual(par, f), tol.hypergeometric
                            ),
                        )
                    )
            case "ratio_identities":
                params_list = [single.params()] if single else self.kappa_box(exclude=(1.0, 2.0))
                f = TruncatedSeries.identity_convolver(N)
                grid = self.settings.grid.to_disk_grid()
                for par in params_list:
                    for depth in (1, 2):
                        for normalized in (False, True):
                            label = f"{par.label()} combination depth={depth} normalized={normalized}"
                            tasks.append(
                                Task(
                                    case,
                                    label,
                                    lambda par=par, depth=depth, normalized=normalized, label=label: _identity_record(
                                        case, label, combination_residual(par, f, depth, normalized), tol.recursion
                                    ),
                                )
                            )
                        label = f"{par.label()} pointwise depth={depth}"
                        tasks.append(
                            Task(
                                case,
                                label,
                                lambda par=par, depth=depth, label=label: _identity_record(
                                    case,
                                    label,
                                    ratio_identity_check(
                                        par,
                                        f,
                                        grid,
                                        depth=depth,
                                        guard=tol.denominator_guard,
                                        max_skip_fraction=tol.max_skip_fraction,
                                    ).residual,
                                    tol.ratio,
                                ),
                            )
                        )
        return tasks

    def corollary_cases(self, case_id: CaseId, single: SingleOverrides | None = None) -> list[VerifyCase]:
        N = self.settings.series.truncation_order
        grid = self.settings.grid.to_disk_grid()
        identity = ("z/(1-z)", TruncatedSeries.identity_convolver(N))
        M = single.M if single else None

        if case_id in (CaseId.TRIG_CHAIN_SIN, CaseId.TRIG_CHAIN_SINH):
            form = ClosedForm.COS_NEGH if case_id is CaseId.TRIG_CHAIN_SIN else ClosedForm.COSH_NEGH
            return [VerifyCase(case_id, form.params(), identity[1], grid, M=M, link_count=2, f_label=identity[0])]

        if single:
            return [VerifyCase(case_id, single.params(), identity[1], grid, M=M, f_label=identity[0])]

        exclude = (1.0,) if case_id is CaseId.C2_8 else ()
        params_list = self.kappa_box(exclude=exclude)
        family = [identity] if case_id is CaseId.C2_8 else self.family(N)
        cases = [
            VerifyCase(case_id, par, f, grid, f_label=name)
            for par, (name, f) in itertools.product(params_list, family)
        ]

        # instances worked out in closed form
        if case_id is CaseId.CHAIN_4_10:
            cos_params = BesselParams(p=-0.5, b=1, c=1)
            cases.append(VerifyCase(case_id, cos_params, identity[1], grid, link_count=2, f_label=identity[0]))
        if case_id is CaseId.C2_5:
            for p in (-0.5, 0.5):
                cases.append(VerifyCase(case_id, BesselParams(p=p, b=1, c=-1), identity[1], grid, f_label=identity[0]))
        return cases

    def corollary_tasks(self, case_id: CaseId, single: SingleOverrides | None = None) -> list[Task]:
        tol = self.settings.tolerances

        def run(vc: VerifyCase) -> ReportRecord:
            return _verify_record(
                verify_implication(
                    vc,
                    premise_margin=tol.premise_margin,
                    tolerance=tol.implication,
                    floor=tol.implication_floor,
                    guard=tol.denominator_guard,
                    max_skip_fraction=tol.max_skip_fraction,
                )
            )

        return [
            Task(str(case_id), f"{vc.params.label()} f={vc.f_label}", lambda vc=vc: run(vc))
            for vc in self.corollary_cases(case_id, single)
        ]

    def build_tasks(self, cases: list[str], single: SingleOverrides | None = None) -> list[Task]:
        """Expand case names into tasks, in the order given."""
        tasks: list[Task] = []
        for case in cases:
            if case in IDENTITY_CASES:
                tasks.extend(self.identity_tasks(case, single))
            else:
                tasks.extend(self.corollary_tasks(CaseId(case), single))
        logger.info(f"expanded {len(cases)} case(s) into {len(tasks)} checks")
        return tasks

    def run_tasks(self, tasks: list[Task], threads: int = 1) -> list[ReportRecord]:
        """Run tasks, possibly in parallel; records come back in task order."""
        if threads <= 1:
            return [_timed(task) for task in tasks]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_timed, tasks))

    def run_audit(
        self,
        functional: str,
        admissible_class: str,
        M: float | None = None,
        kappa: complex | None = None,
    ) -> AuditReport:
        cfg = self.settings.audit
        M = cfg.M if M is None else M
        kappa = cfg.kappa if kappa is None else kappa
        phi = Functional3.named(functional)
        region = default_region(functional, admissible_class, M, kappa)
        sampling = AuditSampling(
            theta_samples=cfg.theta_samples,
            k_grid=tuple(cfg.k_grid),
            l_offsets=tuple(cfg.l_offsets),
        )
        return audit(phi, region, admissible_class, M, kappa, sampling, boundary_tol=self.settings.tolerances.boundary)
