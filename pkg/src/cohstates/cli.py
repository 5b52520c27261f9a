"""Command-line front end: scriptable experiments emitting JSON and CSV.

Every command echoes its full configuration (plus seed and package version)
in the JSON output, so a run is reproducible bit-for-bit from its own
report.  Exit codes: 0 success, 1 contract violation (indeterminate verdict,
violated precondition, failed convergence), 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from . import bargmann as bg
from . import completeness as cp
from . import family as fam
from . import growth as gw
from . import sequences as sq
from .errors import (
    ConvergenceError,
    DomainError,
    IndeterminateError,
    PreconditionError,
    SequenceExhaustedError,
    TruncationError,
    UnsupportedWeightError,
)

_CONTRACT_ERRORS = (
    IndeterminateError,
    PreconditionError,
    TruncationError,
    ConvergenceError,
    SequenceExhaustedError,
    OverflowError,
)
_INPUT_ERRORS = (DomainError, UnsupportedWeightError, FileNotFoundError, KeyError)

_FAMILY_DESCRIPTIONS = {
    "factorial": "rho(n) = n!",
    "factorial_squared": "rho(n) = (n!)^2",
    "rho2": "rho(n) = (n!)^3 sqrt(pi) / (2 Gamma(n + 3/2))",
    "mittag_leffler": "rho(n) = Gamma(alpha n + beta) / Gamma(beta)",
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.complexfloating, complex)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _emit(payload: dict, args: argparse.Namespace) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    report = {
        "config": _jsonable(config),
        "version": __version__,
        **_jsonable(payload),
    }
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")


def _parse_radii(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise DomainError(f"radii spec must be lo:hi:count, got {spec!r}")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if not (0 < lo < hi) or count < 2:
        raise DomainError(f"bad radii spec {spec!r}")
    return np.exp(np.linspace(math.log(lo), math.log(hi), count))


def _sequence_from_args(args: argparse.Namespace) -> sq.PointSequence:
    seq = sq.parse_sequence_spec(args.seq, args.count, args.phases, args.seed)
    if getattr(args, "drop", 0):
        seq = seq.drop_leading(args.drop)
    return seq


# -- subcommands -------------------------------------------------------------


def cmd_families(args) -> int:
    fams = [fam.parse_family(args.family)] if args.family else fam.named_families()
    entries = []
    for f in fams:
        a, b = fam.growth_exponents(f)
        entries.append(
            {
                "label": f.label,
                "rho": _FAMILY_DESCRIPTIONS.get(f.name, "user supplied"),
                "growth_a": a,
                "growth_b": b,
                "closed_forms": f.has_closed_forms,
                "params": f.params,
            }
        )
    if args.json:
        _emit({"families": entries}, args)
    else:
        for e in entries:
            sys.stdout.write(
                f"{e['label']:22s} (a, b) = ({e['growth_a']:g}, {e['growth_b']:g})"
                f"  closed forms: {'yes' if e['closed_forms'] else 'no'}"
                f"  {e['rho']}\n"
            )
    return 0


def cmd_classify(args) -> int:
    f = fam.parse_family(args.family)
    seq = _sequence_from_args(args)
    if args.exact:
        density = sq.nominal_density(seq)
        if density is None:
            raise DomainError("explicit sequences have no exact density; drop --exact")
        verdict = cp.classify(f, density, t_tol=args.tol_t, delta_tol=args.tol_delta)
        estimate = None
    else:
        estimate = sq.estimate_density(seq, _parse_radii(args.radii))
        verdict = cp.classify_estimated(
            f, estimate, min_t_tol=args.tol_t, min_delta_tol=args.tol_delta
        )
    payload = {"verdict": verdict.kind.value, "rationale": verdict.rationale}
    if estimate is not None:
        payload["density_estimate"] = {
            "t": estimate.density.t,
            "delta": estimate.density.delta,
            "t_residual": estimate.t_residual,
            "delta_residual_rel": estimate.delta_residual_rel,
        }
    _emit(payload, args)
    return 0


def cmd_density(args) -> int:
    seq = _sequence_from_args(args)
    est = sq.estimate_density(seq, _parse_radii(args.radii))
    if args.out:
        sq.save_csv(seq, args.out)
    _emit(
        {
            "t": est.density.t,
            "delta": est.density.delta,
            "t_residual": est.t_residual,
            "delta_residual_rel": est.delta_residual_rel,
            "rms": est.rms,
            "radii": est.radii,
            "counts": est.counts,
        },
        args,
    )
    return 0


def _function_from_spec(spec: str, r_max: float):
    """extremal:<family> | coherent:<family>:<re>,<im> | exp:<s>:<r> |
    csv:<family>:<path>"""
    parts = spec.split(":")
    if parts[0] == "extremal" and len(parts) >= 2:
        f = fam.parse_family(":".join(parts[1:]))
        return bg.extremal_function(f, r_max)
    if parts[0] == "coherent" and len(parts) >= 3:
        f = fam.parse_family(":".join(parts[1:-1]))
        re_s, _, im_s = parts[-1].partition(",")
        return bg.coherent_function(f, complex(float(re_s), float(im_s or 0.0)))
    if parts[0] == "exp" and len(parts) == 3:
        s, r = float(parts[1]), float(parts[2])
        return gw.from_log_abs(lambda z: (s * z**r).real if z != 0 else 0.0)
    if parts[0] == "csv" and len(parts) >= 3:
        f = fam.parse_family(":".join(parts[1:-1]))
        return bg.load_amplitudes(f, parts[-1])
    raise DomainError(f"unknown function spec {spec!r}")


def cmd_growth(args) -> int:
    radii = _parse_radii(args.radii)
    fn = _function_from_spec(args.function, float(radii[-1]))
    profile = gw.estimate_order_type(fn, radii)
    if args.out:
        gw.save_max_modulus_csv(fn, radii, args.out)
    _emit(gw.profile_to_dict(profile), args)
    return 0


def cmd_moments(args) -> int:
    f = fam.parse_family(args.family)
    rows = []
    for n in range(args.n_max + 1):
        res = fam.moment_check(f, n, n_max=args.n_max)
        rows.append(
            {
                "n": n,
                "moment": res.moment,
                "relative_error_vs_rho": res.relative_error_vs_rho,
            }
        )
    _emit({"moments": rows}, args)
    return 0


def cmd_witness(args) -> int:
    f = fam.parse_family(args.family)
    seq = _sequence_from_args(args)
    p = args.p if args.p is not None else cp.default_genus(seq)
    report = cp.build_witness(
        f,
        seq,
        p=p,
        truncation_count=args.truncation,
        taylor_degree=args.degree,
        m=args.m,
    )
    if args.out:
        bg.save_amplitudes(report.witness, args.out)
    _emit(
        {
            "genus_p": report.genus_p,
            "origin_multiplicity_m": report.origin_multiplicity_m,
            "truncation_count": report.truncation_count,
            "taylor_degree": report.taylor_degree,
            "norm": report.norm,
            "max_orthogonality_residual": report.max_orthogonality_residual,
            "growth": None
            if report.growth is None
            else gw.profile_to_dict(report.growth),
            "extraction": report.extraction,
        },
        args,
    )
    return 0


def cmd_gram(args) -> int:
    f = fam.parse_family(args.family)
    pts = []
    import csv as _csv

    with open(args.points_file, "r", encoding="utf-8", newline="") as fh:
        for row in _csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            pts.append(complex(float(row[0]), float(row[1])))
    gram = cp.gram_matrix(f, pts)
    eigs = np.linalg.eigvalsh(gram)
    payload = {
        "points": len(pts),
        "smallest_eigenvalue": float(eigs[0]),
        "largest_eigenvalue": float(eigs[-1]),
    }
    if args.fock_dim:
        diag = cp.finite_rank_diagnostic(
            f, pts, args.fock_dim, tail_threshold=args.tail_threshold
        )
        payload["rank_diagnostic"] = {
            "fock_dim": diag.fock_dim,
            "numerical_rank": diag.numerical_rank,
            "residual_vector_norm": diag.residual_vector_norm,
        }
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write("index,singular_value\n")
                for i, s in enumerate(diag.singular_values):
                    fh.write(f"{i},{repr(s)}\n")
    _emit(payload, args)
    return 0


# -- parser ------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohstates",
        description=(
            "Coherent-state family diagnostics: density, growth, moments, "
            "completeness verdicts and orthogonal witnesses."
        ),
        epilog=(
            "family specs: factorial | factorial_squared | rho2 | "
            "ml:<alpha>:<beta> | file:<path>;  sequence specs: "
            "lattice:A=<area> | onedim:l=<spacing> | radial:t=<t>,delta=<d> | "
            "radial_log:s=<s> | file:<path>"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("families", help="list families and growth exponents")
    p.add_argument("family", nargs="?", help="restrict to one family spec")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_families)

    def add_seq_args(p, radii_default):
        p.add_argument("--seq", required=True, help="sequence spec")
        p.add_argument("--count", type=int, default=20000, help="points to generate")
        p.add_argument("--phases", choices=["zero", "random"], default="zero")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--drop", type=int, default=0, help="drop leading points")
        p.add_argument("--radii", default=radii_default, help="lo:hi:count geometric")

    p = sub.add_parser("classify", help="over/undercompleteness verdict")
    p.add_argument("--family", required=True)
    add_seq_args(p, "1:150:16")
    p.add_argument("--exact", action="store_true", help="use generator density")
    p.add_argument("--tol-t", dest="tol_t", type=float, default=1e-8)
    p.add_argument("--tol-delta", dest="tol_delta", type=float, default=1e-8)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("density", help="estimate sequence density (t, delta)")
    add_seq_args(p, "1:150:16")
    p.add_argument("--out", help="write sequence CSV here")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("growth", help="estimate order and type of a function")
    p.add_argument("--function", required=True, help="extremal:<family> | "
                   "coherent:<family>:<re>,<im> | exp:<s>:<r> | csv:<family>:<path>")
    p.add_argument("--radii", default="2:128:16")
    p.add_argument("--out", help="write (R, log M) CSV here")
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("moments", help="verify weight moments against rho(n)")
    p.add_argument("--family", required=True)
    p.add_argument("--n-max", dest="n_max", type=int, default=10)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("witness", help="build an orthogonal witness state")
    p.add_argument("--family", required=True)
    add_seq_args(p, "1:150:16")
    p.add_argument("-p", type=int, default=None, help="Weierstrass factor degree")
    p.add_argument("-m", type=int, default=0, help="origin zero multiplicity")
    p.add_argument("--truncation", type=int, required=True, help="zeros to include")
    p.add_argument("--degree", type=int, required=True, help="Taylor degree")
    p.add_argument("--out", help="write witness amplitudes CSV here")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("gram", help="Gram matrix and rank diagnostics")
    p.add_argument("--family", required=True)
    p.add_argument("--points-file", dest="points_file", required=True,
                   help="CSV rows re,im")
    p.add_argument("--fock-dim", dest="fock_dim", type=int, default=None)
    p.add_argument("--tail-threshold", dest="tail_threshold", type=float,
                   default=1e-10)
    p.add_argument("--out", help="write singular values CSV here")
    p.set_defaults(func=cmd_gram)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CONTRACT_ERRORS as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 1
    except _INPUT_ERRORS as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
