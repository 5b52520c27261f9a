r"""Coherent-state families defined by a positive sequence rho(n).

A family is the data of :math:`\rho(n) > 0` with :math:`\rho(0) = 1` growing
fast enough that

.. math::

    \mathcal{N}_\rho(x) = \sum_{n \ge 0} \frac{x^n}{\rho(n)}

converges for every :math:`x \ge 0`.  The normalized states
:math:`|z\rangle \propto \sum_n z^n \rho(n)^{-1/2} |n\rangle` then have
overlap kernel :math:`\mathcal{K}_\rho(\zeta, z) = \sum_n (\zeta z)^n/\rho(n)`
and, for the named families below, an explicit radial weight
:math:`W_\rho` whose moments reproduce rho:
:math:`\int_0^\infty x^n W_\rho(x)\,dx = \rho(n)`.

Named families
--------------

========================  ======================================  =============
name                      rho(n)                                  (a, b)
========================  ======================================  =============
factorial                 n!                                      (2, 1/2)
factorial_squared         (n!)^2                                  (1, 1)
rho2                      (n!)^3 sqrt(pi) / (2 Gamma(n + 3/2))    (1, 1)
ml:alpha:beta             Gamma(alpha*n + beta) / Gamma(beta)     (2/alpha, 1/2)
========================  ======================================  =============

The pair ``(a, b)`` describes the weight decay
:math:`W_\rho(|z|^2) \sim \exp(-2 b |z|^a)`.  For the Gamma-ratio family the
weight is :math:`\propto |z|^{2(\beta-\alpha)/\alpha} \exp(-|z|^{2/\alpha})`,
i.e. ``a = 2/alpha`` and ``b = 1/2`` (the algebraic prefactor is recorded
separately as ``weight_prefactor_exponent``).  Note the consistency anchor:
``alpha = beta = 1`` reduces rho to n! and (a, b) to (2, 1/2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.integrate
import scipy.special as sc

from . import specfun
from .errors import (
    ConvergenceError,
    DomainError,
    PreconditionError,
    UnsupportedWeightError,
)

_LOG_DOUBLE_MAX = 709.0

# Fock indices probed by the eager convergence check of custom families.
_CONVERGENCE_PROBE_NS = (100, 500, 1000, 2000)
_CONVERGENCE_PROBE_XS = (0.1, 1.0, 10.0, 50.0)

_SERIES_BLOCK = 256
_SERIES_MAX_N = 2_000_000


@dataclass(frozen=True)
class RhoFamily:
    """Immutable description of one coherent-state family."""

    name: str
    log_rho: Callable
    growth_a: Optional[float] = None
    growth_b: Optional[float] = None
    has_closed_forms: bool = False
    params: dict = field(default_factory=dict)
    # log-space closed forms, None when unknown
    log_normalization_closed: Optional[Callable[[float], float]] = None
    log_weight_closed: Optional[Callable[[float], float]] = None
    weight_prefactor_exponent: float = 0.0

    @property
    def label(self) -> str:
        if self.name == "mittag_leffler":
            return f"ml:{self.params['alpha']:g}:{self.params['beta']:g}"
        return self.name

    def log_rho_array(self, ns) -> np.ndarray:
        ns = np.asarray(ns)
        try:
            out = np.asarray(self.log_rho(ns), dtype=float)
            if out.shape == ns.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([float(self.log_rho(int(n))) for n in ns.ravel()]).reshape(
            ns.shape
        )


def factorial_family() -> RhoFamily:
    """rho(n) = n!, the standard oscillator coherent states."""
    return RhoFamily(
        name="factorial",
        log_rho=lambda n: sc.gammaln(np.asarray(n) + 1.0),
        growth_a=2.0,
        growth_b=0.5,
        has_closed_forms=True,
        log_normalization_closed=lambda x: x,
        log_weight_closed=lambda x: -x,
    )


def factorial_squared_family() -> RhoFamily:
    """rho(n) = (n!)^2; normalization I0(2 sqrt(x)), weight 2 K0(2 sqrt(x))."""

    def log_norm(x: float) -> float:
        y = 2.0 * math.sqrt(x)
        return y + math.log(sc.i0e(y)) if x > 0 else 0.0

    def log_wt(x: float) -> float:
        y = 2.0 * math.sqrt(x)
        return math.log(2.0) + math.log(sc.k0e(y)) - y

    return RhoFamily(
        name="factorial_squared",
        log_rho=lambda n: 2.0 * sc.gammaln(np.asarray(n) + 1.0),
        growth_a=1.0,
        growth_b=1.0,
        has_closed_forms=True,
        log_normalization_closed=log_norm,
        log_weight_closed=log_wt,
    )


def rho2_family() -> RhoFamily:
    """rho(n) = (n!)^3 sqrt(pi) / (2 Gamma(n + 3/2)).

    Normalization I0(y)^2 + 2 y I0(y) I1(y) and weight K0(y)^2 with
    y = sqrt(x).
    """

    half_log_pi = 0.5 * math.log(math.pi)

    def log_rho(n):
        n = np.asarray(n, dtype=float)
        return (
            3.0 * sc.gammaln(n + 1.0)
            + half_log_pi
            - math.log(2.0)
            - sc.gammaln(n + 1.5)
        )

    def log_norm(x: float) -> float:
        if x == 0:
            return 0.0
        y = math.sqrt(x)
        i0, i1 = sc.i0e(y), sc.i1e(y)
        return 2.0 * y + math.log(i0 * i0 + 2.0 * y * i0 * i1)

    def log_wt(x: float) -> float:
        y = math.sqrt(x)
        return 2.0 * (math.log(sc.k0e(y)) - y)

    return RhoFamily(
        name="rho2",
        log_rho=log_rho,
        growth_a=1.0,
        growth_b=1.0,
        has_closed_forms=True,
        log_normalization_closed=log_norm,
        log_weight_closed=log_wt,
    )


def mittag_leffler_family(alpha: float, beta: float) -> RhoFamily:
    """rho(n) = Gamma(alpha*n + beta) / Gamma(beta), alpha, beta > 0.

    Normalization Gamma(beta) * E_{alpha,beta}(x); weight
    x**((beta-alpha)/alpha) * exp(-x**(1/alpha)) / (alpha * Gamma(beta)).
    The weight decays like exp(-2 * (1/2) * |z|**(2/alpha)), so the growth
    exponents are a = 2/alpha, b = 1/2; at alpha = beta = 1 this family and
    its exponents coincide with ``factorial``.
    """
    if alpha <= 0 or beta <= 0:
        raise DomainError(f"need alpha, beta > 0, got ({alpha}, {beta})")
    log_gamma_beta = float(sc.gammaln(beta))

    def log_rho(n):
        n = np.asarray(n, dtype=float)
        return sc.gammaln(alpha * n + beta) - log_gamma_beta

    def log_norm(x: float) -> float:
        return log_gamma_beta + specfun.log_mittag_leffler(alpha, beta, x)

    def log_wt(x: float) -> float:
        return (
            ((beta - alpha) / alpha) * math.log(x)
            - x ** (1.0 / alpha)
            - math.log(alpha)
            - log_gamma_beta
        )

    return RhoFamily(
        name="mittag_leffler",
        log_rho=log_rho,
        growth_a=2.0 / alpha,
        growth_b=0.5,
        has_closed_forms=True,
        params={"alpha": float(alpha), "beta": float(beta)},
        log_normalization_closed=log_norm,
        log_weight_closed=log_wt,
        weight_prefactor_exponent=(beta - alpha) / alpha,
    )


def named_families() -> list[RhoFamily]:
    """The four closed-form families with representative ML parameters."""
    return [
        factorial_family(),
        factorial_squared_family(),
        rho2_family(),
        mittag_leffler_family(2.0, 1.0),
    ]


def custom_family(
    log_rho: Callable,
    name: str = "custom",
    growth_exponents: Optional[tuple[float, float]] = None,
) -> RhoFamily:
    """Wrap a user-supplied log rho(n) callback.

    The entire-plane convergence requirement is checked eagerly on a fixed
    probe grid: log rho(n) - n log(x) must be increasing and unbounded along
    n in {100, ..., 2000} for each probe x.  This is a finite numerical
    check, not a proof; families passing it may still misbehave far beyond
    the probe range.
    """
    fam = RhoFamily(
        name=name,
        log_rho=log_rho,
        growth_a=None if growth_exponents is None else float(growth_exponents[0]),
        growth_b=None if growth_exponents is None else float(growth_exponents[1]),
        has_closed_forms=False,
    )
    lr0 = float(fam.log_rho_array(np.array([0]))[0])
    if abs(lr0) > 1e-12:
        raise DomainError(f"custom family must have rho(0) = 1, got log rho(0) = {lr0}")
    probes = fam.log_rho_array(np.array(_CONVERGENCE_PROBE_NS))
    if not np.all(np.isfinite(probes)):
        raise DomainError("custom family log_rho is non-finite on the probe grid")
    for x in _CONVERGENCE_PROBE_XS:
        vals = probes - np.array(_CONVERGENCE_PROBE_NS) * math.log(x)
        if not (np.all(np.diff(vals) > 0) and vals[-1] > vals[0] + 10.0):
            raise DomainError(
                "custom family fails the entire-plane convergence check at "
                f"x = {x}: log rho(n) - n log x is not increasing to +inf"
            )
    return fam


def load_custom_family(path: str, name: str = "custom") -> RhoFamily:
    """Load a custom family from a text table of ``n  log_rho(n)`` pairs.

    The first non-blank line must declare the out-of-table policy, either
    ``# extend: linear`` (extrapolate log rho with the final slope) or
    ``# extend: none`` (indices beyond the table raise).  The table must
    cover n = 0..N contiguously.
    """
    policy = None
    table: dict[int, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if policy is None and "extend:" in line:
                    policy = line.split("extend:")[1].strip()
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise DomainError(f"malformed custom-family line: {raw!r}")
            table[int(parts[0])] = float(parts[1])
    if policy not in ("linear", "none"):
        raise DomainError("custom family file must declare '# extend: linear|none'")
    if not table:
        raise DomainError("custom family file has no data rows")
    n_max = max(table)
    if sorted(table) != list(range(n_max + 1)):
        raise DomainError("custom family table must cover n = 0..N contiguously")
    values = np.array([table[i] for i in range(n_max + 1)])
    if n_max >= 1:
        slope = values[-1] - values[-2]
    else:
        slope = 0.0

    def log_rho(n):
        ns = np.asarray(n, dtype=float)
        out = np.empty(ns.shape)
        inside = ns <= n_max
        out[inside] = values[ns[inside].astype(int)]
        if np.any(~inside):
            if policy == "none":
                raise DomainError(
                    f"n beyond custom table (max {n_max}) with extension policy 'none'"
                )
            out[~inside] = values[-1] + slope * (ns[~inside] - n_max)
        return out if out.shape else float(out)

    return custom_family(log_rho, name=name)


# ---------------------------------------------------------------------------
# elementary operations


def log_rho(family: RhoFamily, n: int) -> float:
    if n < 0:
        raise DomainError(f"rho is defined for n >= 0, got {n}")
    return float(family.log_rho_array(np.array([n]))[0])


def rho(family: RhoFamily, n: int) -> float:
    """rho(n) as a double; raises OverflowError once exp(log rho) overflows."""
    lr = log_rho(family, n)
    if lr > _LOG_DOUBLE_MAX:
        raise OverflowError(
            f"rho({n}) overflows double precision; use log_rho instead"
        )
    return math.exp(lr)


def _series_log_terms(family: RhoFamily, log_x: float) -> np.ndarray:
    """log-space terms n*log_x - log rho(n) out to a certified tail cut."""
    chunks = []
    n0 = 0
    best = -math.inf
    while n0 < _SERIES_MAX_N:
        ns = np.arange(n0, n0 + _SERIES_BLOCK)
        lt = ns * log_x - family.log_rho_array(ns)
        chunks.append(lt)
        best = max(best, float(lt.max()))
        if lt[-1] < best - 60.0 and lt[-1] < lt[0]:
            return np.concatenate(chunks)
        n0 += _SERIES_BLOCK
    raise ConvergenceError(
        "normalization series did not converge within the iteration cap "
        "(invalid or too-slowly-growing family?)"
    )


def log_normalization(family: RhoFamily, x: float, method: str = "auto") -> float:
    """log N_rho(x), choosing the closed form when available."""
    if x < 0:
        raise DomainError(f"normalization requires x >= 0, got {x}")
    if method not in ("auto", "closed", "series"):
        raise ValueError(f"unknown method {method!r}")
    if method == "closed" or (method == "auto" and family.log_normalization_closed):
        if family.log_normalization_closed is None:
            raise UnsupportedWeightError(f"{family.label} has no closed normalization")
        return float(family.log_normalization_closed(x))
    if x == 0.0:
        return 0.0
    lt = _series_log_terms(family, math.log(x))
    m = float(lt.max())
    return m + math.log(math.fsum(np.exp(lt - m).tolist()))


def normalization(family: RhoFamily, x: float, method: str = "auto") -> float:
    """N_rho(x) = sum_n x^n / rho(n).

    The series path sums in log space with compensated accumulation after
    shifting by the running maximum; callers needing values beyond double
    range should use :func:`log_normalization`.
    """
    ln = log_normalization(family, x, method=method)
    if ln > _LOG_DOUBLE_MAX:
        raise OverflowError(
            f"normalization({x}) overflows double precision; use log_normalization"
        )
    return math.exp(ln)


def _kernel_scaled(family: RhoFamily, w: complex) -> tuple[complex, float]:
    """K as (mantissa, log_scale) with K = mantissa * exp(log_scale)."""
    if w == 0:
        return 1.0 + 0.0j, 0.0
    log_mod = math.log(abs(w))
    theta = cmath.phase(w)
    lt = _series_log_terms(family, log_mod)
    ns = np.arange(len(lt))
    m = float(lt.max())
    mags = np.exp(lt - m)
    angles = ns * theta
    re = math.fsum((mags * np.cos(angles)).tolist())
    im = math.fsum((mags * np.sin(angles)).tolist())
    return complex(re, im), m


def kernel(family: RhoFamily, zeta: complex, z: complex) -> complex:
    """Reproducing kernel K_rho(zeta, z) = sum_n (zeta z)^n / rho(n)."""
    mant, scale = _kernel_scaled(family, complex(zeta) * complex(z))
    if scale > _LOG_DOUBLE_MAX:
        raise OverflowError("kernel overflows double precision")
    return mant * math.exp(scale)


def overlap(family: RhoFamily, z1: complex, z2: complex) -> complex:
    """Overlap of normalized states, |overlap| <= 1 with equality at z1 = z2."""
    z1, z2 = complex(z1), complex(z2)
    mant, scale = _kernel_scaled(family, z1.conjugate() * z2)
    log_n1 = log_normalization(family, abs(z1) ** 2)
    log_n2 = log_normalization(family, abs(z2) ** 2)
    return mant * math.exp(scale - 0.5 * (log_n1 + log_n2))


def log_weight(family: RhoFamily, x: float) -> float:
    """log W_rho(x); raises UnsupportedWeightError when no weight is known."""
    if x <= 0:
        raise DomainError(f"weight requires x > 0, got {x}")
    if family.log_weight_closed is None:
        raise UnsupportedWeightError(
            f"family {family.label!r} has no known radial weight"
        )
    return float(family.log_weight_closed(x))


def weight(family: RhoFamily, x: float) -> float:
    """Radial weight W_rho(x) at x = |z|^2 (closed-form families only)."""
    return math.exp(log_weight(family, x))


@dataclass(frozen=True)
class MomentResult:
    moment: float
    relative_error_vs_rho: float
    cutoff: float
    tail_bound: float


def moment_check(
    family: RhoFamily,
    n: int,
    n_max: int = 12,
    epsrel: float = 1e-11,
    tail_target: float = 1e-12,
) -> MomentResult:
    """Verify the moment identity integral(x^n W(x) dx) = rho(n) by quadrature.

    The integral is evaluated in the radial variable u = sqrt(x), where the
    named weights are smooth apart from an integrable endpoint singularity:

        integral_0^inf x^n W(x) dx = integral_0^inf 2 u^(2n+1) W(u^2) du.

    The domain is cut at a point where the log-integrand has fallen 50+ units
    below its peak and is provably decreasing; the discarded tail is bounded
    by integrand(U)/|g'(U)| (exponential majorant) and required to be below
    ``tail_target`` relative to the integral.
    """
    if n < 0 or n > n_max:
        raise PreconditionError(f"moment_check supports 0 <= n <= {n_max}, got {n}")
    if family.log_weight_closed is None:
        raise UnsupportedWeightError(
            f"family {family.label!r} has no known radial weight"
        )

    def g(u: float) -> float:
        return (2 * n + 1) * math.log(u) + log_weight(family, u * u)

    def integrand(u: float) -> float:
        if u <= 0:
            return 0.0
        return 2.0 * math.exp(g(u))

    grid = np.exp(np.linspace(math.log(1e-3), math.log(1e4), 400))
    gv = np.array([g(u) for u in grid])
    i_peak = int(np.argmax(gv))
    u_peak = float(grid[i_peak])
    g_peak = float(gv[i_peak])
    beyond = np.nonzero((gv < g_peak - 50.0) & (grid > u_peak))[0]
    if len(beyond) == 0:
        raise ConvergenceError("could not locate a certified cutoff for the moment")
    u_cut = float(grid[beyond[0]])
    h = 1e-4 * u_cut
    slope = (g(u_cut + h) - g(u_cut - h)) / (2 * h)
    if slope >= -1e-6:
        raise ConvergenceError("moment tail bound unverifiable: integrand not decaying")
    tail_bound = 2.0 * integrand(u_cut) / abs(slope)

    pts = [u_peak] if 0 < u_peak < u_cut else None
    value, _ = scipy.integrate.quad(
        integrand, 0.0, u_cut, points=pts, limit=400, epsabs=0.0, epsrel=epsrel
    )
    if tail_bound > tail_target * abs(value):
        raise ConvergenceError(
            f"moment tail bound {tail_bound:g} exceeds target at cutoff {u_cut:g}"
        )
    expected = rho(family, n)
    return MomentResult(
        moment=value,
        relative_error_vs_rho=abs(value - expected) / expected,
        cutoff=u_cut * u_cut,
        tail_bound=tail_bound,
    )


def evolve_label(z: complex, tau: float, omega: float) -> complex:
    """Phase rotation of a coherent label: z -> z * exp(i tau omega)."""
    return complex(z) * cmath.exp(1j * tau * omega)


def growth_exponents(family: RhoFamily) -> tuple[float, float]:
    """The weight-decay exponents (a, b) with W(|z|^2) ~ exp(-2 b |z|^a)."""
    if family.growth_a is None or family.growth_b is None:
        raise PreconditionError(
            f"family {family.label!r} carries no growth exponents; estimate them "
            "empirically with cohstates.growth.estimate_order_type"
        )
    return family.growth_a, family.growth_b


def rho_ratio_asymptotics(n: int) -> float:
    """Ratio rho2(n) / factorial_squared(n) = (sqrt(pi)/2) n! / Gamma(n + 3/2).

    Computed in log space; decays like (sqrt(pi)/2) * n**(-1/2), i.e. rho2
    grows more slowly than (n!)^2.
    """
    if n < 0:
        raise DomainError(f"need n >= 0, got {n}")
    return (
        0.5
        * math.sqrt(math.pi)
        * math.exp(float(sc.gammaln(n + 1.0) - sc.gammaln(n + 1.5)))
    )


def parse_family(spec: str) -> RhoFamily:
    """Parse a CLI family spec: ``factorial``, ``factorial_squared``, ``rho2``,
    ``ml:<alpha>:<beta>`` or ``file:<path>``."""
    spec = spec.strip()
    if spec == "factorial":
        return factorial_family()
    if spec == "factorial_squared":
        return factorial_squared_family()
    if spec == "rho2":
        return rho2_family()
    if spec.startswith("ml:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise DomainError(f"expected ml:<alpha>:<beta>, got {spec!r}")
        try:
            alpha, beta = float(parts[1]), float(parts[2])
        except ValueError as exc:
            raise DomainError(f"bad ml parameters in {spec!r}: {exc}") from exc
        return mittag_leffler_family(alpha, beta)
    if spec.startswith("file:"):
        return load_custom_family(spec[len("file:"):])
    raise DomainError(f"unknown family spec {spec!r}")
