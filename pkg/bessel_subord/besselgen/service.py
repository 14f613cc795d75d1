import cmath

import numpy as np
from loguru import logger

from bessel_subord.besselgen.models import BesselParams, ClosedForm, HypergeometricParams
from bessel_subord.complexfn.service import as_complex, gamma
from bessel_subord.exceptions import DomainError, NonFiniteError
from bessel_subord.series.models import TruncatedSeries
from bessel_subord.series.service import UNDERFLOW_FLOOR, multiply_by_z

# below this modulus closed forms switch to their Taylor polynomials
TAYLOR_SWITCH = 1e-4


# --- Series ---


def hypergeometric_coefficients(params: HypergeometricParams, N: int, scale: complex = 1.0) -> np.ndarray:
    """Coefficients of qFs(alphas; betas; scale * z) up to z^N.

    coef_n = coef_{n-1} * scale * prod(alpha + n - 1) / (prod(beta + n - 1) * n)
    """
    if N < 0:
        raise DomainError(f"N must be non-negative, got {N}")
    scale = as_complex(scale, "scale")
    coeffs = np.zeros(N + 1, dtype=np.complex128)
    coeffs[0] = 1
    acc = complex(1.0)
    for n in range(1, N + 1):
        num = scale
        for alpha in params.alphas:
            num *= alpha + n - 1
        den = complex(n)
        for beta in params.betas:
            den *= beta + n - 1
        acc = acc * num / den
        coeffs[n] = acc
    if not np.all(np.isfinite(coeffs)):
        raise NonFiniteError(f"Hypergeometric coefficients overflow at N={N}")
    return coeffs


def hypergeometric_series(params: HypergeometricParams, N: int, scale: complex = 1.0) -> TruncatedSeries:
    """qFs(alphas; betas; scale * z) truncated at order N."""
    stop = params.terminates_at(N)
    if stop is not None:
        logger.debug(f"{params.q}F{params.s} is a polynomial of degree {stop}")
    return TruncatedSeries(hypergeometric_coefficients(params, N, scale))


def phi_series(params: BesselParams, N: int) -> TruncatedSeries:
    """phi_{kappa,c}(z) = z * 0F1(kappa; -c z / 4), truncated at order N.

    Coefficient n+1 is (-c)^n / (4^n (kappa)_n n!).
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    kernel = hypergeometric_series(HypergeometricParams(betas=(params.kappa,)), N - 1, scale=-params.c / 4)
    return TruncatedSeries(multiply_by_z(kernel).coeffs, normalized=True)


# --- Pointwise evaluation ---


def omega_eval(params: BesselParams, z: complex, N: int = 64) -> complex:
    """N-term partial sum of omega_{p,b,c}(z) = sum (-c)^n / (n! Gamma(kappa+n)) (z/2)^{2n+p}.

    Fractional powers use the principal branch exp((2n+p) Log(z/2)).
    """
    z = as_complex(z, "z")
    p, c, kappa = params.p, params.c, params.kappa
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")

    # 1/Gamma(kappa + n) by the recurrence Gamma(x+1) = x Gamma(x)
    term = 1 / gamma(kappa)

    if z == 0:
        if p == 0:
            return term
        if p.real > 0:
            return 0j
        raise DomainError(f"omega is singular at z=0 for p={p!r}")

    half = z / 2
    step = -c * half * half
    total = term
    for n in range(1, N):
        term = term * step / (n * (kappa + n - 1))
        total += term
    return total * cmath.exp(p * cmath.log(half))


def closed_form_eval(case: ClosedForm | str, z):
    """Elementary closed form of phi for the half-integer cases; scalar or array z.

    Every case is an even function of sqrt z, so the principal root is used.
    Near z = 0 the removable singularities are evaluated by three Taylor terms.
    """
    case = ClosedForm(case)
    arr = np.asarray(z, dtype=np.complex128)
    root = np.sqrt(arr)
    small = np.abs(arr) < TAYLOR_SWITCH
    # avoid 0/0 in the discarded branch
    safe = np.where(small, 1.0, root)

    match case:
        case ClosedForm.SIN_HALF:
            exact = root * np.sin(root)
            taylor = arr - arr**2 / 6 + arr**3 / 120
        case ClosedForm.COS_NEGH:
            exact = arr * np.cos(root)
            taylor = arr - arr**2 / 2 + arr**3 / 24
        case ClosedForm.SIN_3H:
            exact = 3 * np.sin(safe) / safe - 3 * np.cos(safe)
            taylor = arr - arr**2 / 10 + arr**3 / 280
        case ClosedForm.SINH_HALF:
            exact = root * np.sinh(root)
            taylor = arr + arr**2 / 6 + arr**3 / 120
        case ClosedForm.COSH_NEGH:
            exact = arr * np.cosh(root)
            taylor = arr + arr**2 / 2 + arr**3 / 24
        case ClosedForm.SINH_3H:
            exact = 3 * np.cosh(safe) - 3 * np.sinh(safe) / safe
            taylor = arr + arr**2 / 10 + arr**3 / 280

    out = np.where(small, taylor, exact)
    if out.ndim == 0:
        return complex(out)
    return out


# --- ODE check ---


def ode_residual(params: BesselParams, N: int = 30) -> float:
    """Max relative residual of the coefficient recurrence of the generalized Bessel ODE.

    With omega(z) = z^p sum d_n z^{2n}, the equation
    z^2 w'' + b z w' + (c z^2 - p^2 + (1-b) p) w = 0 becomes
    [(2n+p)(2n+p-1) + b(2n+p) - p^2 + (1-b)p] d_n + c d_{n-1} = 0 for n >= 1.

    Terms below the underflow floor are compared against the floor, and the
    check stops once Gamma(kappa + n) leaves double range.
    """
    p, b, c, kappa = params.p, params.b, params.c, params.kappa
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")

    # d_n = t_n / Gamma(kappa + n) with t_n = (-c/4)^n / n!; the factor 2^{-p} cancels
    t = complex(1.0)
    prev = t / gamma(kappa)
    worst = 0.0
    for n in range(1, N):
        t = t * (-c / 4) / n
        try:
            cur = t / gamma(kappa + n)
        except NonFiniteError:
            logger.debug(f"ode residual {params.label()}: Gamma(kappa+{n}) overflows, stopping at n={n}")
            break
        m = 2 * n + p
        bracket = m * (m - 1) + b * m - p * p + (1 - b) * p
        lhs, rhs = bracket * cur, c * prev
        scale = max(abs(lhs), abs(rhs), UNDERFLOW_FLOOR)
        worst = max(worst, abs(lhs + rhs) / scale)
        prev = cur
    logger.debug(f"ode residual {params.label()} N={N}: {worst:.3e}")
    return worst
