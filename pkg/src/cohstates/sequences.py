r"""Point sequences in the plane and their disk-counting density.

A sequence carries a canonical, phase-free modulus array alongside the
actual complex points: the density data (t, delta) with
``n(R) ~ delta * R^t`` depends only on the moduli, so estimates are
bit-for-bit identical between zero and randomized phase policies.
Random phases, when requested, come from a seeded PCG64 generator recorded
in the sequence metadata.

Generators
----------

``rectangular_lattice(A)``   grid  sqrt(A) * (N + i M), origin dropped;
                             n(R) -> pi R^2 / A, density (2, pi/A)
``one_d_lattice(l)``         +/- l, +/- 2l, ...; n(R) = 2R/l, density (1, 2/l)
``radial(t, delta)``         |z_N| = (N/delta)^(1/t), density (t, delta)
``radial_log(s)``            |z_N| = N^s, density (1/s, 1)
``explicit(points)``         user-provided points, sorted by modulus

The lattice spacing is sqrt(A) so that each unit cell has area A and the
stated counting law holds; points on a query circle are excluded (strict
|z| < R).
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, PreconditionError, SequenceExhaustedError
from .numerics import fit_line, tail_half

_RNG_NAME = "pcg64"


@dataclass(frozen=True)
class Density:
    t: float
    delta: float

    def __post_init__(self):
        if self.t <= 0 or self.delta <= 0:
            raise DomainError("density components must be positive")


class Ordering(enum.Enum):
    LESS = "Less"
    EQUAL = "Equal"
    GREATER = "Greater"


def compare(
    d1: Density, d2: Density, t_tol: float = 1e-9, delta_tol: float = 1e-9
) -> Ordering:
    """Lexicographic comparison of densities with explicit equality bands."""
    if d1.t < d2.t - t_tol:
        return Ordering.LESS
    if d1.t > d2.t + t_tol:
        return Ordering.GREATER
    if d1.delta < d2.delta - delta_tol:
        return Ordering.LESS
    if d1.delta > d2.delta + delta_tol:
        return Ordering.GREATER
    return Ordering.EQUAL


@dataclass(frozen=True)
class PointSequence:
    kind: str
    params: dict
    points: np.ndarray
    moduli: np.ndarray  # canonical, phase-independent, non-decreasing
    phase_policy: str
    seed: Optional[int] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.points) != len(self.moduli):
            raise DomainError("points and moduli must have equal length")
        if len(self.moduli) == 0:
            raise DomainError("empty sequence")
        if np.any(self.moduli <= 0):
            raise DomainError("zero-modulus points are not allowed")
        if np.any(np.diff(self.moduli) < 0):
            raise DomainError("moduli must be non-decreasing")

    def __len__(self) -> int:
        return len(self.points)

    def drop_leading(self, k: int) -> "PointSequence":
        """The same sequence with its first k points removed."""
        if not 0 <= k < len(self.points):
            raise DomainError(f"cannot drop {k} of {len(self.points)} points")
        return PointSequence(
            kind=self.kind,
            params=dict(self.params),
            points=self.points[k:],
            moduli=self.moduli[k:],
            phase_policy=self.phase_policy,
            seed=self.seed,
            metadata={**self.metadata, "dropped_leading": k},
        )


def _phases(count: int, phase_policy: str, seed: Optional[int]) -> np.ndarray:
    if phase_policy == "zero":
        return np.zeros(count)
    if phase_policy == "random":
        rng = np.random.default_rng(seed)
        return rng.uniform(0.0, 2.0 * math.pi, count)
    raise DomainError(f"unknown phase policy {phase_policy!r}")


def _finish(kind, params, base_points, moduli, count, phase_policy, seed):
    phases = _phases(count, phase_policy, seed)
    points = base_points * np.exp(1j * phases)
    return PointSequence(
        kind=kind,
        params=params,
        points=points,
        moduli=moduli,
        phase_policy=phase_policy,
        seed=seed,
        metadata={"phase_rng": _RNG_NAME if phase_policy == "random" else None},
    )


def rectangular_lattice(
    cell_area: float, count: int, phase_policy: str = "zero", seed: Optional[int] = None
) -> PointSequence:
    """First `count` nonzero points of the grid sqrt(A)(N + iM) by modulus."""
    if cell_area <= 0 or count < 1:
        raise DomainError("need cell_area > 0 and count >= 1")
    spacing = math.sqrt(cell_area)
    half = int(math.ceil(math.sqrt((count + 1) / math.pi))) + 2
    n_idx, m_idx = np.meshgrid(
        np.arange(-half, half + 1), np.arange(-half, half + 1), indexing="ij"
    )
    n_idx = n_idx.ravel()
    m_idx = m_idx.ravel()
    keep = (n_idx != 0) | (m_idx != 0)
    n_idx, m_idx = n_idx[keep], m_idx[keep]
    moduli = spacing * np.hypot(n_idx, m_idx)
    order = np.lexsort((m_idx, n_idx, moduli))
    if count > len(order):
        raise DomainError("internal enumeration too small; count too large")
    order = order[:count]
    base = spacing * (n_idx[order] + 1j * m_idx[order])
    return _finish(
        "rectangular_lattice",
        {"cell_area": float(cell_area)},
        base,
        moduli[order],
        count,
        phase_policy,
        seed,
    )


def one_d_lattice(
    spacing: float, count: int, phase_policy: str = "zero", seed: Optional[int] = None
) -> PointSequence:
    """Points l*N for N = +-1, +-2, ... ordered by modulus (+N before -N)."""
    if spacing <= 0 or count < 1:
        raise DomainError("need spacing > 0 and count >= 1")
    k = np.repeat(np.arange(1, count // 2 + 2), 2)[:count]
    signs = np.tile([1.0, -1.0], count // 2 + 1)[:count]
    base = spacing * k * signs
    moduli = spacing * k.astype(float)
    return _finish(
        "one_d_lattice",
        {"spacing": float(spacing)},
        base.astype(np.complex128),
        moduli,
        count,
        phase_policy,
        seed,
    )


def radial(
    t: float,
    delta: float,
    count: int,
    phase_policy: str = "zero",
    seed: Optional[int] = None,
) -> PointSequence:
    """|z_N| = (N / delta)^(1/t); exact density (t, delta)."""
    if t <= 0 or delta <= 0 or count < 1:
        raise DomainError("need t, delta > 0 and count >= 1")
    ns = np.arange(1, count + 1, dtype=float)
    moduli = (ns / delta) ** (1.0 / t)
    return _finish(
        "radial",
        {"t": float(t), "delta": float(delta)},
        moduli.astype(np.complex128),
        moduli,
        count,
        phase_policy,
        seed,
    )


def radial_log(
    s: float, count: int, phase_policy: str = "zero", seed: Optional[int] = None
) -> PointSequence:
    """|z_N| = N^s; density (1/s, 1)."""
    if s <= 0 or count < 1:
        raise DomainError("need s > 0 and count >= 1")
    ns = np.arange(1, count + 1, dtype=float)
    moduli = ns**s
    return _finish(
        "radial_log",
        {"s": float(s)},
        moduli.astype(np.complex128),
        moduli,
        count,
        phase_policy,
        seed,
    )


def explicit_sequence(points: Sequence[complex]) -> PointSequence:
    """Wrap user-provided points, sorted by modulus (origin not allowed)."""
    pts = np.asarray(list(points), dtype=np.complex128)
    if pts.size == 0:
        raise DomainError("empty sequence")
    moduli = np.abs(pts)
    if np.any(moduli == 0):
        raise DomainError("zero-modulus points are not allowed")
    order = np.lexsort((pts.imag, pts.real, moduli))
    return PointSequence(
        kind="explicit",
        params={},
        points=pts[order],
        moduli=moduli[order],
        phase_policy="zero",
        seed=None,
    )


def nominal_density(seq: PointSequence) -> Optional[Density]:
    """Exact density from generator parameters, None for explicit sets."""
    if seq.kind == "rectangular_lattice":
        return Density(t=2.0, delta=math.pi / seq.params["cell_area"])
    if seq.kind == "one_d_lattice":
        return Density(t=1.0, delta=2.0 / seq.params["spacing"])
    if seq.kind == "radial":
        return Density(t=seq.params["t"], delta=seq.params["delta"])
    if seq.kind == "radial_log":
        return Density(t=1.0 / seq.params["s"], delta=1.0)
    return None


def _required_count(seq: PointSequence, r: float) -> Optional[int]:
    d = nominal_density(seq)
    if d is None:
        return None
    return int(math.ceil(1.1 * d.delta * r**d.t)) + 8


def count_in_disk(seq: PointSequence, r: float) -> int:
    """Number of sequence points with |z| strictly below r."""
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    if seq.moduli[-1] <= r:
        need = _required_count(seq, r)
        hint = f"; need roughly {need} points" if need else ""
        raise SequenceExhaustedError(
            f"sequence of {len(seq)} points reaches only |z| = "
            f"{seq.moduli[-1]:g} <= {r}{hint}"
        )
    return int(np.searchsorted(seq.moduli, r, side="left"))


@dataclass(frozen=True)
class DensityEstimate:
    """Estimated density plus conservative uncertainty bounds.

    ``t_residual`` bounds the slope sensitivity of the log-log count fit to
    structured count perturbations (see numerics.fit_line); finite
    prefix edits of the sequence move the estimate by less than it.
    ``delta_residual_rel`` is the matching relative band for delta.
    """

    density: Density
    t_residual: float
    delta_residual_rel: float
    rms: float
    radii: list
    counts: list


def estimate_density(seq: PointSequence, radii: Sequence[float]) -> DensityEstimate:
    """Fit (t, delta) from disk counts on a geometric radius grid.

    Needs >= 8 increasing radii spanning two decades, all within the
    sequence's reach.  The fit window is the upper half of the grid, where
    counts must be positive and non-constant.
    """
    radii = np.asarray(sorted(float(r) for r in radii))
    if len(radii) < 8:
        raise PreconditionError("need at least 8 radii")
    if radii[-1] / radii[0] < 99.99:
        raise PreconditionError("radius grid must span at least two decades")
    counts = np.array([count_in_disk(seq, r) for r in radii])
    window = tail_half(radii)
    if np.any(counts[window] <= 0):
        raise PreconditionError("counts must be positive on the fit window")
    if counts[window][-1] == counts[window][0]:
        raise DomainError("counts are constant over the fit window; degenerate sequence")
    x = np.log(radii[window])
    y = np.log(counts[window].astype(float))
    fit = fit_line(x, y)
    t = float(fit.slope)
    if t <= 0:
        raise DomainError("estimated exponent is non-positive")
    delta = float(np.median(counts[window] / radii[window] ** t))
    x_med = float(np.median(x))
    return DensityEstimate(
        density=Density(t=t, delta=delta),
        t_residual=fit.slope_bound,
        delta_residual_rel=fit.slope_bound * x_med + 2.0 * fit.rms,
        rms=fit.rms,
        radii=[float(r) for r in radii],
        counts=[int(c) for c in counts],
    )


def parse_sequence_spec(
    spec: str, count: int, phase_policy: str = "zero", seed: Optional[int] = None
) -> PointSequence:
    """Build a sequence from a CLI spec string.

    Forms: ``lattice:A=<area>``, ``onedim:l=<spacing>``,
    ``radial:t=<t>,delta=<delta>``, ``radial_log:s=<s>``,
    ``file:<path>`` (CSV rows ``re,im``).
    """
    spec = spec.strip()
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        pts = []
        with open(path, "r", encoding="utf-8", newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                pts.append(complex(float(row[0]), float(row[1])))
        return explicit_sequence(pts)
    if ":" not in spec:
        raise DomainError(f"malformed sequence spec {spec!r}")
    name, _, arg_str = spec.partition(":")
    args = {}
    for item in arg_str.split(","):
        if not item:
            continue
        key, _, value = item.partition("=")
        if not value:
            raise DomainError(f"malformed parameter {item!r} in {spec!r}")
        args[key.strip()] = float(value)
    if name == "lattice":
        return rectangular_lattice(args["A"], count, phase_policy, seed)
    if name == "onedim":
        key = "l" if "l" in args else "ell"
        return one_d_lattice(args[key], count, phase_policy, seed)
    if name == "radial":
        return radial(args["t"], args["delta"], count, phase_policy, seed)
    if name == "radial_log":
        return radial_log(args["s"], count, phase_policy, seed)
    raise DomainError(f"unknown sequence kind {name!r}")


def save_csv(seq: PointSequence, path: str) -> None:
    """Write ``N,re,im,modulus`` rows (N is the 1-based sequence index)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "re", "im", "modulus"])
        for i, (p, m) in enumerate(zip(seq.points, seq.moduli), start=1):
            writer.writerow([i, repr(float(p.real)), repr(float(p.imag)), repr(float(m))])
