r"""Overcompleteness / undercompleteness of discrete coherent-state sets.

The decision rule compares the sequence density (t, delta) against the
family thresholds (a, b*a) lexicographically:

* ``t > a``                      -> overcomplete
* ``t = a`` and ``delta > b*a``  -> overcomplete
* ``t < a``                      -> undercomplete
* ``t = a`` and ``delta <= b*a`` -> boundary (not decidable by density alone)

Undercomplete verdicts come with a constructive witness: a state orthogonal
to every included coherent state, built as a canonical product

    P(z) = z^m * prod_N E(z / zeta_N*, p),
    E(w, 0) = 1 - w,
    E(w, p) = (1 - w) * exp(w + w^2/2 + ... + w^p/p),

with zeros at the conjugated sequence points, so the represented state is
orthogonal to each |zeta_N>.  Taylor coefficients are extracted by sampling
P on circles and inverting with an FFT; the sampling radius is chosen per
coefficient band by matching the circle's log-derivative to the band index
(the Cauchy saddle), which keeps the extraction conditioning polynomial.
Coefficients that fall below the extraction noise floor are zeroed before
the Fock conversion multiplies them by sqrt(rho(n)), which would otherwise
amplify pure rounding noise into spurious high-index amplitudes.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import bargmann as bg
from . import family as fam
from . import growth as gw
from . import sequences as sq
from .errors import (
    DomainError,
    IndeterminateError,
    PreconditionError,
    TruncationError,
)
from .numerics import fit_line, tail_half

_EPS = np.finfo(float).eps
_NOISE_GATE_FACTOR = 10.0
_BAND_WIDTH = 16
_MAX_GENUS = 8

_BOUNDARY_NOTE = (
    "boundary regime: same-density sequences can be either overcomplete or "
    "undercomplete, so density alone does not decide; for non-integral t a "
    "sufficiently small delta is known to force undercompleteness, but the "
    "deciding constant depends on t and is not computed here"
)


class VerdictKind(enum.Enum):
    OVERCOMPLETE = "Overcomplete"
    UNDERCOMPLETE = "Undercomplete"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    rationale: dict


def classify(
    family: fam.RhoFamily,
    density: sq.Density,
    t_tol: float = 1e-9,
    delta_tol: float = 1e-9,
) -> Verdict:
    """Classify a coherent-state set from its sequence density.

    Tolerances define the equality bands of the lexicographic comparison;
    when the deciding coordinate lands inside its band at the threshold
    (t = a with delta within delta_tol of b*a) the verdict is indeterminate
    and a tighter density estimate is required.
    """
    a, b = fam.growth_exponents(family)
    ab = a * b
    rationale = {
        "t": density.t,
        "delta": density.delta,
        "a": a,
        "ba": ab,
        "t_tolerance": t_tol,
        "delta_tolerance": delta_tol,
    }
    if density.t > a + t_tol:
        rationale["path"] = "t above a"
        return Verdict(VerdictKind.OVERCOMPLETE, rationale)
    if density.t >= a - t_tol:
        if density.delta > ab + delta_tol:
            rationale["path"] = "t at a, delta above b*a"
            return Verdict(VerdictKind.OVERCOMPLETE, rationale)
        if density.delta >= ab - delta_tol:
            raise IndeterminateError(
                f"delta = {density.delta:g} is within {delta_tol:g} of the "
                f"threshold b*a = {ab:g} at t = a; tighter estimation needed"
            )
        rationale["path"] = "t at a, delta below b*a"
        rationale["note"] = _BOUNDARY_NOTE
        return Verdict(VerdictKind.BOUNDARY, rationale)
    rationale["path"] = "t below a"
    return Verdict(VerdictKind.UNDERCOMPLETE, rationale)


def classify_estimated(
    family: fam.RhoFamily,
    estimate: sq.DensityEstimate,
    min_t_tol: float = 1e-9,
    min_delta_tol: float = 1e-9,
) -> Verdict:
    """Classify from an estimated density, widening the equality bands by
    the estimate's own uncertainty bounds."""
    return classify(
        family,
        estimate.density,
        t_tol=max(min_t_tol, estimate.t_residual),
        delta_tol=max(
            min_delta_tol, estimate.delta_residual_rel * estimate.density.delta
        ),
    )


# ---------------------------------------------------------------------------
# Weierstrass factors and canonical products


class LogFactor(NamedTuple):
    value: complex
    at_zero: bool


def weierstrass_log_factor(z: complex, zero: complex, p: int) -> LogFactor:
    """log E(z/zero, p) for one elementary factor.

    For |z/zero| < 1/2 the value is computed from the tail series
    -sum_{k>p} w^k / k, which is exact to machine precision where the direct
    form log(1-w) + sum_{k<=p} w^k/k would cancel catastrophically.  An
    exact hit z == zero is reported through the flag (value -inf).
    """
    if zero == 0:
        raise DomainError("zeros at the origin are handled by the multiplicity m")
    if not 0 <= p <= _MAX_GENUS:
        raise DomainError(f"p must be in 0..{_MAX_GENUS}, got {p}")
    w = complex(z) / complex(zero)
    if w == 1:
        return LogFactor(complex(-math.inf, 0.0), True)
    if abs(w) < 0.5:
        acc = 0.0 + 0.0j
        wk = w ** (p + 1)
        for k in range(p + 1, p + 61):
            acc -= wk / k
            wk *= w
        return LogFactor(acc, False)
    val = cmath.log(1.0 - w)
    for k in range(1, p + 1):
        val += w**k / k
    return LogFactor(val, False)


def _log_weierstrass_grid(zs: np.ndarray, zeros: np.ndarray, p: int) -> np.ndarray:
    """Sum of log E(z/zero, p) over all zeros, for each z (vectorized)."""
    out = np.zeros(len(zs), dtype=np.complex128)
    chunk = max(1, 2_000_000 // max(1, len(zeros)))
    for lo in range(0, len(zs), chunk):
        w = zs[lo : lo + chunk, None] / zeros[None, :]
        small = np.abs(w) < 0.5
        vals = np.zeros_like(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            wl = np.where(small, 0.5, w)  # placeholder on the small branch
            big_vals = np.log(1.0 - wl)
            for k in range(1, p + 1):
                big_vals += wl**k / k
        ws = np.where(small, w, 0.0)
        acc = np.zeros_like(w)
        wk = ws ** (p + 1)
        for k in range(p + 1, p + 61):
            acc -= wk / k
            wk = wk * ws
        vals = np.where(small, acc, big_vals)
        out[lo : lo + chunk] = vals.sum(axis=1)
    return out


class _ProductEvaluator:
    """log|P| evaluator for a truncated canonical product (growth module duck
    type)."""

    def __init__(self, zeros: np.ndarray, p: int, m: int):
        self.zeros = np.asarray(zeros, dtype=np.complex128)
        self.p = int(p)
        self.m = int(m)

    def _log_values(self, zs: np.ndarray) -> np.ndarray:
        vals = _log_weierstrass_grid(zs, self.zeros, self.p)
        out = vals.real
        if self.m:
            with np.errstate(divide="ignore"):
                out = out + self.m * np.log(np.abs(zs))
        return out

    def log_abs(self, z: complex) -> float:
        return float(self._log_values(np.array([complex(z)]))[0])

    def log_abs_circle(self, r: float, thetas: np.ndarray) -> np.ndarray:
        zs = r * np.exp(1j * np.asarray(thetas))
        return self._log_values(zs)

    def circle_log_complex(self, r: float, count: int) -> np.ndarray:
        thetas = 2.0 * math.pi * np.arange(count) / count
        zs = r * np.exp(1j * thetas)
        vals = _log_weierstrass_grid(zs, self.zeros, self.p)
        if self.m:
            vals = vals + self.m * np.log(zs.astype(np.complex128))
        return vals


# ---------------------------------------------------------------------------
# witness construction


@dataclass(frozen=True)
class WitnessReport:
    witness: bg.BargmannFunction
    genus_p: int
    origin_multiplicity_m: int
    truncation_count: int
    taylor_degree: int
    norm: float
    max_orthogonality_residual: float
    growth: Optional[gw.GrowthProfile]
    extraction: dict = field(default_factory=dict)


def default_genus(seq: sq.PointSequence) -> int:
    """Smallest genus matching the sequence: floor of the density exponent."""
    d = sq.nominal_density(seq)
    if d is not None:
        return max(int(math.floor(d.t)), 0)
    return 0


def _check_genus(seq: sq.PointSequence, p: int, count: int) -> None:
    """Numerically require sum |zeta_N|^-(p+1) to converge on the tail.

    Finite explicit sets are exempt (any p works for a finite product).
    """
    if seq.kind == "explicit":
        return
    moduli = seq.moduli[:count]
    window = tail_half(moduli)
    ns = np.arange(1, count + 1, dtype=float)[window]
    fit = fit_line(np.log(ns), np.log(moduli[window]))
    sigma = fit.slope  # |zeta_N| ~ N^sigma
    if (p + 1) * sigma <= 1.02:
        raise PreconditionError(
            f"genus p = {p} too small: sum |zeta|^-(p+1) diverges for "
            f"|zeta_N| ~ N^{sigma:.3f}; need p >= {math.ceil(1.02 / sigma - 1)}"
        )


def _scan_circle_profile(
    ev: _ProductEvaluator, r_lo: float, r_hi: float, n_radii: int = 48
) -> tuple[np.ndarray, np.ndarray]:
    radii = np.exp(np.linspace(math.log(r_lo), math.log(r_hi), n_radii))
    thetas = 2.0 * math.pi * np.arange(96) / 96
    log_max = np.array([float(np.max(ev.log_abs_circle(r, thetas))) for r in radii])
    return radii, log_max


def _band_radius(
    radii: np.ndarray, log_max: np.ndarray, band_center: float
) -> tuple[float, float]:
    """Radius whose circle log-derivative matches the band index."""
    x = np.log(radii)
    slopes = np.gradient(log_max, x)
    idx = int(np.searchsorted(slopes, band_center))
    idx = min(max(idx, 0), len(radii) - 1)
    return float(radii[idx]), float(log_max[idx])


def build_witness(
    family: fam.RhoFamily,
    seq: sq.PointSequence,
    p: int,
    truncation_count: int,
    taylor_degree: int,
    m: int = 0,
    growth_radii: Optional[Sequence[float]] = None,
) -> WitnessReport:
    """Construct a normalized state orthogonal to the first
    ``truncation_count`` coherent states of the sequence.

    Refuses when the density classification is not Undercomplete (for a
    too-dense zero set no admissible function can vanish on it) and when the
    genus is too small for the product to converge.  For finite explicit
    point sets both gates are vacuous and ``p = 0`` gives an exact
    polynomial witness.

    Zero phases on a one-sided ray make the truncated product's exponential
    compensators pile up (sum of 1/zeta grows with the truncation), which
    inflates the Fock support; random-phase sequences, which carry the same
    density, are better conditioned.
    """
    if truncation_count < 1 or truncation_count > len(seq):
        raise PreconditionError(
            f"truncation_count must be in 1..{len(seq)}, got {truncation_count}"
        )
    if taylor_degree < 4:
        raise PreconditionError("taylor_degree must be at least 4")
    if m < 0:
        raise DomainError("origin multiplicity m must be >= 0")
    if not 0 <= p <= _MAX_GENUS:
        raise DomainError(f"p must be in 0..{_MAX_GENUS}, got {p}")

    if seq.kind != "explicit":
        density = sq.nominal_density(seq)
        verdict = classify(family, density)
        if verdict.kind is not VerdictKind.UNDERCOMPLETE:
            raise PreconditionError(
                f"witness construction requires an undercomplete set; "
                f"classification of {seq.kind} density (t={density.t:g}, "
                f"delta={density.delta:g}) is {verdict.kind.value}"
            )
    _check_genus(seq, p, truncation_count)

    zeros = np.conj(seq.points[:truncation_count])
    ev = _ProductEvaluator(zeros, p, m)

    zmin = float(np.min(np.abs(zeros)))
    zmax = float(np.max(np.abs(zeros)))
    radii, log_max = _scan_circle_profile(ev, max(1e-3, 0.02 * zmin), 8.0 * math.sqrt(zmin * zmax))

    k_nodes = 1 << max(9, int(math.ceil(math.log2(4 * (taylor_degree + 1)))))
    log_abs_c = np.full(taylor_degree + 1, -np.inf)
    phase_c = np.zeros(taylor_degree + 1, dtype=np.complex128)
    band_radii = []
    gated = 0
    for lo in range(0, taylor_degree + 1, _BAND_WIDTH):
        hi = min(lo + _BAND_WIDTH - 1, taylor_degree)
        r_b, log_m_b = _band_radius(radii, log_max, 0.5 * (lo + hi))
        band_radii.append(r_b)
        log_vals = ev.circle_log_complex(r_b, k_nodes)
        scale = float(np.max(log_vals.real))
        samples = np.exp(log_vals - scale)
        coeffs = np.fft.fft(samples) / k_nodes
        floor = _NOISE_GATE_FACTOR * _EPS
        for n in range(lo, hi + 1):
            cn = coeffs[n]
            if abs(cn) <= floor:
                gated += 1
                continue
            log_abs_c[n] = scale + math.log(abs(cn)) - n * math.log(r_b)
            phase_c[n] = cn / abs(cn)

    log_sqrt_rho = 0.5 * family.log_rho_array(np.arange(taylor_degree + 1))
    log_abs_f = log_abs_c + log_sqrt_rho
    finite = np.isfinite(log_abs_f)
    if not np.any(finite):
        raise TruncationError("all extracted coefficients fell below the noise gate")
    peak = float(np.max(log_abs_f[finite]))
    if peak > 700.0:
        raise TruncationError(
            "witness Fock amplitudes exceed double range; this configuration "
            "needs rebalanced (e.g. random-phase) zeros"
        )
    fock = np.where(finite, np.exp(np.where(finite, log_abs_f, 0.0)), 0.0) * phase_c

    # the Fock tail must have died out well before the truncation edge
    tail_lo = max(1, int(0.9 * (taylor_degree + 1)))
    tail_max = float(np.max(np.abs(fock[tail_lo:])))
    if tail_max > 1e-8 * float(np.max(np.abs(fock))):
        raise TruncationError(
            f"Fock amplitudes not decayed by degree {taylor_degree} "
            f"(tail/peak = {tail_max / float(np.max(np.abs(fock))):.2e}); "
            "increase taylor_degree"
        )

    norm = math.sqrt(math.fsum((np.abs(fock) ** 2).tolist()))
    if not (norm > 0 and math.isfinite(norm)):
        raise TruncationError("witness has vanishing or non-finite norm")
    witness = bg.BargmannFunction(family=family, fock=fock / norm)

    log_resid = -math.inf
    for zero in zeros:
        lr = witness.log_abs(zero) - 0.5 * fam.log_normalization(
            family, abs(zero) ** 2
        )
        log_resid = max(log_resid, lr)
    max_resid = math.exp(log_resid) if math.isfinite(log_resid) else 0.0

    growth_profile = None
    if growth_radii is None and truncation_count >= 32:
        r_hi = 0.25 * zmax
        growth_radii = np.exp(
            np.linspace(math.log(max(r_hi / 12.0, 1e-2)), math.log(r_hi), 16)
        )
    if growth_radii is not None:
        try:
            growth_profile = gw.estimate_order_type(ev, growth_radii)
        except (PreconditionError, DomainError):
            growth_profile = None

    return WitnessReport(
        witness=witness,
        genus_p=p,
        origin_multiplicity_m=m,
        truncation_count=truncation_count,
        taylor_degree=taylor_degree,
        norm=norm,
        max_orthogonality_residual=max_resid,
        growth=growth_profile,
        extraction={
            "fft_nodes": k_nodes,
            "band_width": _BAND_WIDTH,
            "band_radii": band_radii,
            "gated_coefficients": gated,
            "noise_gate": _NOISE_GATE_FACTOR * _EPS,
        },
    )


# ---------------------------------------------------------------------------
# finite Gram-matrix corroboration


def _coherent_rows(
    family: fam.RhoFamily, points: Sequence[complex], fock_dim: int
) -> np.ndarray:
    """Rows of normalized truncated coherent vectors v_i[n] =
    z_i^n / (sqrt(rho(n)) sqrt(N(|z_i|^2)))."""
    pts = np.asarray(list(points), dtype=np.complex128)
    ns = np.arange(fock_dim)
    log_sqrt_rho = 0.5 * family.log_rho_array(ns)
    rows = np.zeros((len(pts), fock_dim), dtype=np.complex128)
    for i, z in enumerate(pts):
        if z == 0:
            rows[i, 0] = 1.0
            continue
        log_n = fam.log_normalization(family, abs(z) ** 2)
        log_mag = ns * math.log(abs(z)) - log_sqrt_rho - 0.5 * log_n
        rows[i] = np.exp(log_mag) * np.exp(1j * ns * cmath.phase(z))
    return rows


def _tail_mass(family: fam.RhoFamily, z: complex, fock_dim: int) -> float:
    if z == 0:
        return 0.0
    x = abs(z) ** 2
    log_n = fam.log_normalization(family, x)
    log_terms = fam._series_log_terms(family, math.log(x)) - log_n
    if fock_dim >= len(log_terms):
        return 0.0
    tail = log_terms[fock_dim:]
    mx = float(tail.max())
    return math.exp(mx) * float(np.sum(np.exp(tail - mx)))


def required_fock_dim(
    family: fam.RhoFamily, points: Sequence[complex], tail_threshold: float = 1e-10
) -> int:
    """Smallest truncation keeping every point's coherent tail below the
    threshold."""
    worst = max((abs(complex(z)) for z in points), default=0.0)
    if worst == 0:
        return 1
    x = worst**2
    log_n = fam.log_normalization(family, x)
    log_terms = fam._series_log_terms(family, math.log(x)) - log_n
    mags = np.exp(log_terms - log_terms.max())
    tails = (np.cumsum(mags[::-1])[::-1]) * math.exp(log_terms.max())
    idx = np.nonzero(tails <= tail_threshold)[0]
    if len(idx) == 0:
        return len(log_terms)
    return int(idx[0])


def gram_matrix(
    family: fam.RhoFamily, points: Sequence[complex], max_points: int = 400
) -> np.ndarray:
    """Hermitian Gram matrix of normalized coherent states at the points.

    Duplicate points make the matrix exactly singular; they trigger a
    warning, not an error.
    """
    pts = [complex(z) for z in points]
    if len(pts) > max_points:
        raise PreconditionError(f"at most {max_points} points supported, got {len(pts)}")
    if len(pts) != len(set(pts)):
        warnings.warn("duplicate points: Gram matrix is singular by construction")
    worst = max(abs(z) for z in pts) if pts else 0.0
    fock_dim = required_fock_dim(family, [worst], tail_threshold=1e-14) + 8
    rows = _coherent_rows(family, pts, fock_dim)
    return np.conj(rows) @ rows.T


@dataclass(frozen=True)
class RankDiagnostic:
    singular_values: list
    numerical_rank: int
    residual_vector_norm: float
    fock_dim: int


def finite_rank_diagnostic(
    family: fam.RhoFamily,
    points: Sequence[complex],
    fock_dim: int,
    rank_rel_threshold: float = 1e-8,
    tail_threshold: float = 1e-10,
) -> RankDiagnostic:
    """Singular-value diagnostics of the truncated coherent-vector matrix.

    ``numerical_rank`` counts singular values above the relative threshold;
    rank saturation at ``fock_dim`` with more points than dimensions is the
    finite-truncation signature of an overcomplete set.
    ``residual_vector_norm`` is the smallest singular value over the
    truncated Fock space: a small value exhibits a truncated vector nearly
    orthogonal to every state (0.0 exactly when points < fock_dim, where a
    nullspace exists for dimension reasons).  These are finite-size
    corroborations, not proofs; thresholds are reported, never implied.
    """
    if fock_dim < 8:
        raise PreconditionError(f"fock_dim must be >= 8, got {fock_dim}")
    pts = [complex(z) for z in points]
    worst = max(abs(z) for z in pts)
    tail = _tail_mass(family, worst, fock_dim)
    if tail > tail_threshold:
        need = required_fock_dim(family, pts, tail_threshold)
        raise PreconditionError(
            f"coherent tail mass {tail:.2e} at |z| = {worst:g} exceeds "
            f"{tail_threshold:g} for fock_dim = {fock_dim}; need >= {need}"
        )
    rows = _coherent_rows(family, pts, fock_dim)
    svals = np.linalg.svd(rows, compute_uv=False)
    rank = int(np.sum(svals > rank_rel_threshold * svals[0]))
    if fock_dim > len(pts):
        resid = 0.0
    else:
        resid = float(svals[-1])
    return RankDiagnostic(
        singular_values=[float(s) for s in svals],
        numerical_rank=rank,
        residual_vector_norm=resid,
        fock_dim=fock_dim,
    )


def projected_residual(
    family: fam.RhoFamily,
    points: Sequence[complex],
    fock_dim: int,
    state: bg.BargmannFunction,
) -> float:
    """||V w|| / ||w|| for the state's truncation to fock_dim: an upper-bound
    certificate for the smallest singular value of V."""
    vec = np.zeros(fock_dim, dtype=np.complex128)
    d = min(fock_dim, state.truncation)
    vec[:d] = state.fock[:d]
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise DomainError("state has no support below fock_dim")
    rows = _coherent_rows(family, points, fock_dim)
    return float(np.linalg.norm(np.conj(rows) @ vec) / norm)
