r"""Real-argument special functions used by the closed-form families.

Gamma and the modified Bessel functions :math:`I_0, I_1, K_0, K_1` are
delegated to the cephes routines shipped with scipy (which switch internally
between power series and exponentially scaled asymptotic series); this module
adds domain checking, log-safe companions, and a two-parameter Mittag-Leffler
function

.. math::

    E_{\alpha,\beta}(y) = \sum_{k\ge 0} \frac{y^k}{\Gamma(\alpha k + \beta)}

evaluated on the real non-negative axis by a compensated power series with a
switch to the leading exponential asymptotic
:math:`\frac{1}{\alpha} y^{(1-\beta)/\alpha} \exp(y^{1/\alpha})` once the
series would overflow double range.  At that switch point the neglected
algebraic corrections are smaller than the main term by a factor
:math:`\sim e^{-y^{1/\alpha}}`, so the asymptotic branch is effectively exact
where it is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import scipy.special as sc

from .errors import ConvergenceError, DomainError

__all__ = [
    "EvalResult",
    "gamma",
    "log_gamma",
    "bessel_i",
    "bessel_i_scaled",
    "bessel_k0",
    "bessel_k0_scaled",
    "bessel_k1",
    "mittag_leffler",
    "mittag_leffler_eval",
    "log_mittag_leffler",
]

# Largest x with Gamma(x) inside double range.
_GAMMA_OVERFLOW = 171.62437695630272

# Switch the Mittag-Leffler evaluation to its asymptotic once y**(1/alpha)
# exceeds this; the series would overflow doubles near 709.
_ML_ASYMPTOTIC_SWITCH = 600.0

_ML_MAX_TERMS = 200_000


@dataclass(frozen=True)
class EvalResult:
    """A function value together with an absolute error estimate."""

    value: float
    abs_error_estimate: float

    def __post_init__(self):
        if self.abs_error_estimate < 0:
            raise ValueError("abs_error_estimate must be non-negative")


def gamma(x: float) -> float:
    """Gamma function for x > 0.

    Raises
    ------
    DomainError
        If ``x <= 0``.
    OverflowError
        If the result exceeds double range (x > ~171.6); use
        :func:`log_gamma` there.
    """
    if x <= 0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    if x > _GAMMA_OVERFLOW:
        raise OverflowError(
            f"gamma({x}) overflows double precision; use log_gamma instead"
        )
    return float(sc.gamma(x))


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for x > 0."""
    if x <= 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return float(sc.gammaln(x))


def bessel_i(order: int, x: float) -> float:
    """Modified Bessel function of the first kind, order 0 or 1, x >= 0."""
    if order not in (0, 1):
        raise DomainError(f"bessel_i supports orders 0 and 1, got {order}")
    if x < 0:
        raise DomainError(f"bessel_i requires x >= 0, got {x}")
    return float(sc.i0(x) if order == 0 else sc.i1(x))


def bessel_i_scaled(order: int, x: float) -> float:
    """Exponentially scaled ``exp(-x) * I_order(x)``; safe for large x."""
    if order not in (0, 1):
        raise DomainError(f"bessel_i_scaled supports orders 0 and 1, got {order}")
    if x < 0:
        raise DomainError(f"bessel_i_scaled requires x >= 0, got {x}")
    return float(sc.i0e(x) if order == 0 else sc.i1e(x))


def bessel_k0(x: float) -> float:
    """Modified Bessel function of the second kind, order 0, x > 0.

    K0 diverges logarithmically at the origin, hence the open domain.
    """
    if x <= 0:
        raise DomainError(f"bessel_k0 requires x > 0, got {x}")
    return float(sc.k0(x))


def bessel_k0_scaled(x: float) -> float:
    """Exponentially scaled ``exp(x) * K0(x)``; safe for large x."""
    if x <= 0:
        raise DomainError(f"bessel_k0_scaled requires x > 0, got {x}")
    return float(sc.k0e(x))


def bessel_k1(x: float) -> float:
    """Modified Bessel function of the second kind, order 1 (internal helper,
    used for Wronskian cross-checks of the I/K pair)."""
    if x <= 0:
        raise DomainError(f"bessel_k1 requires x > 0, got {x}")
    return float(sc.k1(x))


def _ml_validate(alpha: float, beta: float, y: float) -> None:
    if alpha <= 0 or beta <= 0:
        raise DomainError(f"mittag_leffler requires alpha, beta > 0, got ({alpha}, {beta})")
    if y < 0:
        raise DomainError(f"mittag_leffler is implemented for y >= 0, got {y}")


def _ml_series(alpha: float, beta: float, y: float) -> tuple[float, float]:
    """Compensated series sum; returns (value, absolute tail bound)."""
    log_y = math.log(y)
    terms = []
    k = 0
    running = 0.0
    while k < _ML_MAX_TERMS:
        t = math.exp(k * log_y - sc.gammaln(alpha * k + beta))
        terms.append(t)
        running += t
        # All terms are positive; once they decay geometrically the tail is
        # dominated by a ratio-test bound.
        if k >= 4 and t < 1e-18 * running:
            ratio = t / terms[-2] if terms[-2] > 0 else 0.0
            if ratio < 0.5:
                tail = t * ratio / (1.0 - ratio)
                return math.fsum(terms), tail
        k += 1
    raise ConvergenceError(
        f"mittag_leffler series did not converge within {_ML_MAX_TERMS} terms"
    )


def _ml_log_asymptotic(alpha: float, beta: float, y: float) -> float:
    return y ** (1.0 / alpha) + ((1.0 - beta) / alpha) * math.log(y) - math.log(alpha)


def mittag_leffler_eval(alpha: float, beta: float, y: float) -> EvalResult:
    """Evaluate E_{alpha,beta}(y) with an absolute error estimate."""
    _ml_validate(alpha, beta, y)
    if y == 0.0:
        value = math.exp(-sc.gammaln(beta))
        return EvalResult(value=value, abs_error_estimate=4e-16 * value)
    if y ** (1.0 / alpha) > _ML_ASYMPTOTIC_SWITCH:
        log_value = _ml_log_asymptotic(alpha, beta, y)
        if log_value > 709.0:
            raise OverflowError(
                "mittag_leffler overflows double range; use log_mittag_leffler"
            )
        value = math.exp(log_value)
        # Algebraic corrections are ~1/y of the whole function, which is
        # exp(y**(1/alpha)) large here; 1e-6 relative is a gross upper bound.
        return EvalResult(value=value, abs_error_estimate=1e-6 * value)
    value, tail = _ml_series(alpha, beta, y)
    return EvalResult(value=value, abs_error_estimate=tail + 1e-15 * value)


def mittag_leffler(alpha: float, beta: float, y: float) -> float:
    """Two-parameter Mittag-Leffler function on the real axis, y >= 0."""
    return mittag_leffler_eval(alpha, beta, y).value


def log_mittag_leffler(alpha: float, beta: float, y: float) -> float:
    """log E_{alpha,beta}(y); usable far beyond double overflow."""
    _ml_validate(alpha, beta, y)
    if y == 0.0:
        return -float(sc.gammaln(beta))
    if y ** (1.0 / alpha) > _ML_ASYMPTOTIC_SWITCH:
        return _ml_log_asymptotic(alpha, beta, y)
    value, _ = _ml_series(alpha, beta, y)
    return math.log(value)
