r"""States as entire functions of the coherent label.

A state with Fock amplitudes :math:`f_n` is represented by the truncated
series

.. math::

    F(z) = \sum_{n < D} \frac{f_n \, z^n}{\rho(n)^{1/2}},

evaluated in log-rebalanced arithmetic so that large truncations and large
|z| stay inside double range.  Two inner products are provided: the
coefficient sum :math:`\sum_n g_n^* f_n` and the weighted phase-space
integral over the family's radial weight; the two must agree for families
with a closed-form weight, which the tests exercise.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.integrate

from . import family as fam
from .errors import DomainError, PreconditionError, TruncationError

_CHUNK = 8192


@dataclass(frozen=True)
class BargmannFunction:
    """Truncated entire-function representation of a quantum state.

    ``fock[n]`` is the amplitude on the number state n; the Taylor
    coefficient of z^n is ``fock[n] / sqrt(rho(n))``, kept in log form
    internally.
    """

    family: fam.RhoFamily
    fock: np.ndarray
    _log_sqrt_rho: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        fock = np.asarray(self.fock, dtype=np.complex128)
        if fock.ndim != 1 or fock.size == 0:
            raise DomainError("fock amplitudes must be a non-empty 1-d sequence")
        object.__setattr__(self, "fock", fock)
        lsr = 0.5 * self.family.log_rho_array(np.arange(fock.size))
        object.__setattr__(self, "_log_sqrt_rho", lsr)

    @property
    def truncation(self) -> int:
        return int(self.fock.size)

    def norm_squared(self) -> float:
        return math.fsum(np.abs(self.fock) ** 2)

    def is_normalized(self, tol: float = 1e-10) -> bool:
        return abs(self.norm_squared() - 1.0) <= tol

    def taylor_log_abs(self) -> np.ndarray:
        """log |c_n| of the Taylor coefficients (-inf at vanishing f_n)."""
        out = np.full(self.fock.size, -np.inf)
        nz = self.fock != 0
        out[nz] = np.log(np.abs(self.fock[nz])) - self._log_sqrt_rho[nz]
        return out

    def taylor_coefficients(self) -> np.ndarray:
        """c_n = f_n / sqrt(rho(n)) as doubles (underflows to 0 for huge n)."""
        log_abs = self.taylor_log_abs()
        out = np.zeros(self.fock.size, dtype=np.complex128)
        nz = np.isfinite(log_abs)
        out[nz] = np.exp(log_abs[nz] + 1j * np.angle(self.fock[nz]))
        return out

    # -- evaluation --------------------------------------------------------

    def _scaled_at(self, z: complex) -> tuple[complex, float]:
        """F(z) as (mantissa, log_scale); mantissa * exp(log_scale) = F(z)."""
        z = complex(z)
        if z == 0:
            return complex(self.fock[0]), 0.0
        ns = np.arange(self.fock.size)
        log_terms = ns * math.log(abs(z)) - self._log_sqrt_rho
        nz = self.fock != 0
        if not np.any(nz):
            return 0.0 + 0.0j, 0.0
        log_mags = log_terms[nz] + np.log(np.abs(self.fock[nz]))
        m = float(log_mags.max())
        # terms 80+ log-units below the peak contribute < D * 1e-35 relative
        keep = log_mags > m - 80.0
        args = ns[nz][keep] * cmath.phase(z) + np.angle(self.fock[nz][keep])
        mags = np.exp(log_mags[keep] - m)
        re = math.fsum((mags * np.cos(args)).tolist())
        im = math.fsum((mags * np.sin(args)).tolist())
        return complex(re, im), m

    def evaluate(self, z: complex) -> complex:
        """F(z); may overflow to inf for extreme arguments (use log_abs)."""
        mant, scale = self._scaled_at(z)
        return mant * math.exp(scale) if scale <= 709 else mant * math.inf

    def log_abs(self, z: complex) -> float:
        """log |F(z)|, -inf at zeros of F."""
        mant, scale = self._scaled_at(z)
        if mant == 0:
            return -math.inf
        return scale + math.log(abs(mant))

    def circle_values_scaled(self, r: float, thetas: np.ndarray) -> tuple[np.ndarray, float]:
        """F(r e^{i theta}) for all thetas as (mantissas, common log scale)."""
        if r <= 0:
            raise DomainError("circle radius must be positive")
        ns = np.arange(self.fock.size)
        nz = self.fock != 0
        if not np.any(nz):
            return np.zeros(len(thetas), dtype=np.complex128), 0.0
        log_mags = (
            ns[nz] * math.log(r) - self._log_sqrt_rho[nz] + np.log(np.abs(self.fock[nz]))
        )
        m = float(log_mags.max())
        keep = log_mags > m - 80.0
        ns_k = ns[nz][keep]
        # unit phases via angle: dividing by a subnormal |f| would overflow
        coeff = np.exp(log_mags[keep] - m + 1j * np.angle(self.fock[nz][keep]))
        vals = np.zeros(len(thetas), dtype=np.complex128)
        for lo in range(0, len(ns_k), _CHUNK):
            hi = min(lo + _CHUNK, len(ns_k))
            block = np.exp(1j * np.outer(ns_k[lo:hi], thetas))
            vals += coeff[lo:hi] @ block
        return vals, m

    def log_abs_circle(self, r: float, thetas: np.ndarray) -> np.ndarray:
        vals, m = self.circle_values_scaled(r, thetas)
        out = np.full(len(thetas), -np.inf)
        nz = vals != 0
        out[nz] = m + np.log(np.abs(vals[nz]))
        return out


def from_fock(family: fam.RhoFamily, amplitudes: Sequence[complex]) -> BargmannFunction:
    """Build the representation of a state from its Fock amplitudes."""
    return BargmannFunction(family=family, fock=np.asarray(list(amplitudes)))


def coherent_function(
    family: fam.RhoFamily,
    zeta: complex,
    truncation: Optional[int] = None,
    tail_target: float = 1e-12,
) -> BargmannFunction:
    """Normalized coherent state with label zeta as a Bargmann function.

    The truncation is chosen (or validated) so the dropped Fock tail mass is
    below ``tail_target``; an insufficient explicit truncation raises
    TruncationError naming the required depth.
    """
    zeta = complex(zeta)
    if zeta == 0:
        fock = np.zeros(truncation or 1, dtype=np.complex128)
        fock[0] = 1.0
        return BargmannFunction(family=family, fock=fock)
    x = abs(zeta) ** 2
    log_n = fam.log_normalization(family, x)
    # |f_n|^2 = exp(n log x - log rho(n) - log N); reuse the series machinery.
    log_terms = fam._series_log_terms(family, math.log(x)) - log_n
    tail = np.cumsum(np.exp(log_terms - log_terms.max())[::-1])[::-1] * math.exp(
        log_terms.max()
    )
    needed = int(np.searchsorted(-tail, -tail_target)) + 1
    needed = min(needed, len(log_terms))
    if truncation is None:
        truncation = needed
    elif truncation < needed:
        raise TruncationError(
            f"truncation {truncation} keeps tail mass above {tail_target:g}; "
            f"need at least {needed}"
        )
    ns = np.arange(truncation)
    log_f = 0.5 * (ns * math.log(x) - family.log_rho_array(ns) - log_n)
    fock = np.exp(log_f) * np.exp(1j * ns * cmath.phase(zeta))
    return BargmannFunction(family=family, fock=fock)


def extremal_function(family: fam.RhoFamily, r_max: float) -> BargmannFunction:
    """The unit-amplitude state f_n = 1, truncated for evaluation up to r_max.

    Its Bargmann function sum_n z^n / sqrt(rho(n)) realizes the family's
    extremal growth (order a, type b); the truncation keeps every term
    within 80 log-units of the peak term at |z| = r_max.
    """
    if r_max <= 0:
        raise DomainError("r_max must be positive")
    log_r = math.log(r_max)
    n0 = 0
    block = 1024
    best = -math.inf
    while n0 < 5_000_000:
        ns = np.arange(n0, n0 + block)
        lt = ns * log_r - 0.5 * family.log_rho_array(ns)
        best = max(best, float(lt.max()))
        if lt[-1] < best - 80.0 and lt[-1] < lt[0]:
            d = n0 + block
            return BargmannFunction(family=family, fock=np.ones(d, dtype=np.complex128))
        n0 += block
    raise TruncationError("extremal truncation search exceeded its cap")


def _require_same_family(G: BargmannFunction, F: BargmannFunction) -> None:
    if G.family.label != F.family.label:
        raise PreconditionError(
            f"family mismatch: {G.family.label!r} vs {F.family.label!r}"
        )


def inner_product_series(G: BargmannFunction, F: BargmannFunction) -> complex:
    """Coefficient-space inner product sum(g_n* f_n) over the common range."""
    _require_same_family(G, F)
    d = min(G.truncation, F.truncation)
    prods = np.conj(G.fock[:d]) * F.fock[:d]
    return complex(math.fsum(prods.real.tolist()), math.fsum(prods.imag.tolist()))


def inner_product_quadrature(
    G: BargmannFunction,
    F: BargmannFunction,
    angular_nodes: Optional[int] = None,
    epsrel: float = 1e-10,
) -> complex:
    """Weighted phase-space inner product.

    Computed as ``2 * integral_0^inf W(r^2) <G* F>_theta(r) r dr`` where the
    angular mean uses a uniform trapezoidal rule, exact for trigonometric
    polynomials of degree below the node count; nodes default to
    ``max(64, 2 D + 2)`` so monomial orthogonality is exact.  The radial
    integral is cut where a log-majorant of the integrand has dropped 50
    units below its peak, with the exponential tail bound checked.
    """
    _require_same_family(G, F)
    if G.family.log_weight_closed is None:
        raise PreconditionError(
            f"family {G.family.label!r} has no closed-form weight"
        )
    d = max(G.truncation, F.truncation)
    k = angular_nodes or max(64, 2 * d + 2)
    thetas = 2.0 * math.pi * np.arange(k) / k

    def theta_mean_scaled(r: float) -> tuple[complex, float]:
        gv, gm = G.circle_values_scaled(r, thetas)
        fv, fm = F.circle_values_scaled(r, thetas)
        prods = np.conj(gv) * fv
        return (
            complex(math.fsum(prods.real.tolist()), math.fsum(prods.imag.tolist()))
            / k,
            gm + fm,
        )

    def log_majorant(r: float) -> float:
        # |<G*F>| <= (sum |g_n| r^n/sqrt(rho)) * (same for F)
        ns = np.arange(d)
        lg = ns * math.log(r) - 0.5 * G.family.log_rho_array(ns)
        ga = np.zeros(d)
        fa = np.zeros(d)
        ga[: G.truncation] = np.abs(G.fock)
        fa[: F.truncation] = np.abs(F.fock)
        with np.errstate(divide="ignore"):
            mg = float(np.max(lg + np.where(ga > 0, np.log(ga, where=ga > 0), -np.inf)))
            mf = float(np.max(lg + np.where(fa > 0, np.log(fa, where=fa > 0), -np.inf)))
        bound_g = mg + math.log(
            float(np.sum(np.exp(lg + np.log(ga, where=ga > 0, out=np.full(d, -np.inf)) - mg)))
        )
        bound_f = mf + math.log(
            float(np.sum(np.exp(lg + np.log(fa, where=fa > 0, out=np.full(d, -np.inf)) - mf)))
        )
        return fam.log_weight(G.family, r * r) + bound_g + bound_f + math.log(2 * r)

    grid = np.exp(np.linspace(math.log(1e-3), math.log(1e4), 300))
    vals = np.array([log_majorant(r) for r in grid])
    i_peak = int(np.argmax(vals))
    beyond = np.nonzero((vals < vals[i_peak] - 50.0) & (grid > grid[i_peak]))[0]
    if len(beyond) == 0:
        raise TruncationError("could not certify a radial cutoff for the quadrature")
    r_cut = float(grid[beyond[0]])
    h = 1e-4 * r_cut
    slope = (log_majorant(r_cut + h) - log_majorant(r_cut - h)) / (2 * h)
    if slope >= -1e-6:
        raise TruncationError("radial tail not certifiable: majorant not decaying")

    def integrand(r: float) -> complex:
        if r <= 0:
            return 0.0 + 0.0j
        mean, scale = theta_mean_scaled(r)
        log_w = fam.log_weight(G.family, r * r)
        return 2.0 * r * mean * math.exp(log_w + scale)

    re, _ = scipy.integrate.quad(
        lambda r: integrand(r).real, 0.0, r_cut, limit=300, epsabs=1e-14, epsrel=epsrel
    )
    im, _ = scipy.integrate.quad(
        lambda r: integrand(r).imag, 0.0, r_cut, limit=300, epsabs=1e-14, epsrel=epsrel
    )
    return complex(re, im)


def pointwise_bound_check(
    F: BargmannFunction, samples: int, radius: float, seed: int = 0
) -> float:
    """Worst sampled value of |F(z)|^2 / (K(z*, z) (F, F)) over a disk.

    The reproducing-kernel bound makes this at most 1 for any state; values
    above ``1 + 1e-9`` indicate a numerical defect.
    """
    rng = np.random.default_rng(seed)
    norm_sq = inner_product_series(F, F).real
    if norm_sq <= 0:
        raise DomainError("state has zero norm")
    worst = -math.inf
    radii = radius * np.sqrt(rng.uniform(0.0, 1.0, samples))
    angles = rng.uniform(0.0, 2.0 * math.pi, samples)
    for r, th in zip(radii, angles):
        z = r * cmath.exp(1j * th)
        log_ratio = (
            2.0 * F.log_abs(z)
            - fam.log_normalization(F.family, abs(z) ** 2)
            - math.log(norm_sq)
        )
        worst = max(worst, log_ratio)
    return math.exp(worst)


def evaluation_tail_bound(F: BargmannFunction, r: float) -> float:
    """Heuristic bound on the dropped-series error of evaluate at |z| = r.

    Uses geometric domination from the last two non-vanishing Taylor terms;
    returns inf when the terms are still growing at the truncation edge.
    """
    log_c = F.taylor_log_abs()
    ns = np.nonzero(np.isfinite(log_c))[0]
    if len(ns) < 2:
        return 0.0
    n1, n2 = ns[-2], ns[-1]
    t1 = log_c[n1] + n1 * math.log(r) if r > 0 else -math.inf
    t2 = log_c[n2] + n2 * math.log(r) if r > 0 else -math.inf
    if not (t2 < t1):
        return math.inf
    q = math.exp((t2 - t1) / (n2 - n1))
    return math.exp(t2) * q / (1.0 - q)


# -- CSV interchange --------------------------------------------------------


def save_amplitudes(F: BargmannFunction, path: str) -> None:
    """Write Fock amplitudes as ``n,re,im`` rows."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for n, a in enumerate(F.fock):
            writer.writerow([n, repr(float(a.real)), repr(float(a.imag))])


def load_amplitudes(family: fam.RhoFamily, path: str) -> BargmannFunction:
    """Read Fock amplitudes from ``n,re,im`` rows (n must be 0..D-1)."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            rows.append((int(row[0]), float(row[1]), float(row[2])))
    rows.sort()
    if [r[0] for r in rows] != list(range(len(rows))):
        raise DomainError("amplitude CSV must list n = 0..D-1 exactly once each")
    return from_fock(family, [complex(re, im) for _, re, im in rows])


def save_evaluation_grid(F: BargmannFunction, zs: Sequence[complex], path: str) -> None:
    """Write ``re(z),im(z),re(F),im(F)`` rows for the given evaluation points."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for z in zs:
            v = F.evaluate(z)
            writer.writerow(
                [repr(complex(z).real), repr(complex(z).imag), repr(v.real), repr(v.imag)]
            )
