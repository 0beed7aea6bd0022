"""Command-line front end: every subcommand prints one JSON certificate on stdout.

Exit status is 0 when the certificate passed, 1 when a check failed and 2 for
bad input.  A one-line summary goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import oracles
from .certificates import Certificate
from .errors import CMLError, FlexNotOnCurve, NotDistinct, NotSquareFree, ProjectionCollision
from .monodromy import CoefficientPath, certify_exceptional_surjection, loop_permutation
from .plane_curves import (
    TernaryForm,
    admissible_sizes,
    banerjee_chen_sizes,
    cubic_torsion,
    flex_points,
    hessian,
    jordan_totient,
    torsion_stratum,
)
from .poly_core import (
    Configuration,
    MonicPolynomial,
    TolerancePolicy,
    complex_to_json,
    discriminant,
    from_roots,
    is_square_free,
    roots,
    same_points,
)
from .poly_maps import (
    TorsionMapSpec,
    difference_identities,
    phi_disjoin,
    psi_torsion,
    resolve_quartic,
    resolvent_d,
)
from .suite import SuiteConfig, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_BAD_INPUT = 0, 1, 2

# errors that mean the input itself is unusable
INPUT_ERRORS = (ValueError, KeyError, TypeError, OSError, NotSquareFree, NotDistinct, FlexNotOnCurve, ProjectionCollision)


class BadInput(Exception):
    pass


def _default_seed() -> int:
    env = os.environ.get("CML_SEED")
    if env is None:
        return 42
    try:
        return int(env)
    except ValueError:
        raise BadInput(f"CML_SEED={env!r} is not an integer")


def _load(path: Optional[str], what: str):
    if path is None:
        raise BadInput(f"this command needs --{what} FILE")
    with open(path) as fh:
        return json.load(fh)


def _poly(args) -> MonicPolynomial:
    return MonicPolynomial.from_json(_load(args.poly, "poly"))


def _config(args) -> Configuration:
    return Configuration.from_json(_load(args.config, "config"))


def _curve(args) -> TernaryForm:
    if args.curve is None:
        return TernaryForm.fermat(3)
    return TernaryForm.from_json(_load(args.curve, "curve"))


# ---------------------------------------------------------------- commands


def cmd_discriminant(args, cert: Certificate) -> None:
    f = _poly(args)
    cert.inputs = {"poly": f.to_json()}
    d = discriminant(f)
    cert.outputs = {"discriminant": complex_to_json(d)}
    if f.degree >= 2:
        oracle = oracles.discriminant_from_roots(roots(f, args.tol).points)
        err = abs(d - oracle) / max(abs(d), abs(oracle), 1e-300)
        cert.check("root_product_oracle", err <= 1e-8 or max(abs(d), abs(oracle)) == 0, "relative error", err)


def cmd_roots(args, cert: Certificate) -> None:
    f = _poly(args)
    cert.inputs = {"poly": f.to_json()}
    r = roots(f, args.tol)
    cert.outputs = {"roots": r.to_json()}
    back = np.array(from_roots(r).coeffs)
    err = float(np.max(np.abs(back - np.array(f.coeffs)))) / max(1.0, float(np.max(np.abs(f.coeffs))))
    cert.check("viete_reconstruction", err <= 1e-9, "coefficient error relative to max(1, ||a||)", err)


def cmd_viete(args, cert: Certificate) -> None:
    c = _config(args)
    cert.inputs = {"config": c.to_json()}
    f = from_roots(c)
    cert.outputs = {"poly": f.to_json()}
    if c.separation > 0:
        ok = same_points(roots(f, args.tol).points, c.points, 1e-9)
        cert.check("roots_round_trip", ok, "relative 1e-9")


def cmd_resolve_quartic(args, cert: Certificate) -> None:
    f = _poly(args)
    cert.inputs = {"poly": f.to_json()}
    res = resolve_quartic(f, args.tol)
    cert.outputs = res.to_json()
    cert.check("output_square_free", bool(is_square_free(res.output, args.tol)))
    err = max(difference_identities(res.input_roots.points, res.b_values.points))
    cert.check("difference_identities", err <= 1e-9, "b_i - b_j as products of root differences", err)


def cmd_resolvent_d(args, cert: Certificate) -> None:
    f = _poly(args)
    d = args.d if args.d is not None else 1
    cert.inputs = {"poly": f.to_json(), "d": d}
    out = resolvent_d(f, d, args.tol)
    cert.outputs = {"poly": out.to_json()}
    cert.check("output_square_free", bool(is_square_free(out, args.tol)))
    res = resolve_quartic(f, args.tol)
    want = [b * res.input_discriminant**d for b in res.b_values.points]
    got = roots(out, args.tol).as_array()
    err = max(float(np.min(np.abs(got - z))) / max(abs(z), 1e-300) for z in want)
    cert.check("root_scaling_law", err <= 1e-9, "roots equal disc^d times resolvent roots", err)


def cmd_phi(args, cert: Certificate) -> None:
    c = _config(args)
    cert.inputs = {"config": c.to_json()}
    out = phi_disjoin(c)
    cert.outputs = {"config": out.to_json()}
    cert.check("size", len(out) == len(c) + 1, f"{len(out)} points")
    cert.check("distinct", out.separation > 0, "output separation", out.separation)


def cmd_psi_torsion(args, cert: Certificate) -> None:
    lam = _config(args)
    k = args.k if args.k is not None else 2
    tau = complex(args.tau) if args.tau is not None else 1.0
    cert.inputs = {"config": lam.to_json(), "k": k, "tau": complex_to_json(tau)}
    out = psi_torsion(lam, TorsionMapSpec(k, tau), args.tol)
    cert.outputs = {"config": out.to_json()}
    cert.check("size_k2_minus_1", len(out) == k * k - 1, f"{len(out)} points")
    cert.check("distinct", out.separation > 0, "output separation", out.separation)
    if k == 2:
        ok = same_points(out.points, lam.points, 1e-10)
        cert.check("k2_reproduces_lambda", ok, "relative 1e-10")


def cmd_monodromy(args, cert: Certificate) -> None:
    if args.path is None:
        wps = [MonicPolynomial((0j, -complex(np.exp(2j * np.pi * k / 16)))) for k in range(17)]
        wps[-1] = wps[0]
        path = CoefficientPath(tuple(wps), tol=args.tol)
    else:
        path = CoefficientPath.from_json(_load(args.path, "path"), args.tol)
    cert.inputs = {"path": path.to_json()}
    res = loop_permutation(path, args.tol)
    cert.outputs = res.to_json()
    sep = res.min_separation_along_path
    cert.check("separated_along_path", sep > 10 * args.tol.distinct_tol, "min root separation", sep)


def cmd_certify(args, cert: Certificate) -> None:
    sub = certify_exceptional_surjection(args.tol, strict=False)
    cert.inputs, cert.outputs = sub.inputs, sub.outputs
    cert.checks.extend(sub.checks)


def cmd_flexes(args, cert: Certificate) -> None:
    F = _curve(args)
    cert.inputs = {"curve": F.to_json()}
    fl = flex_points(F, args.tol)
    cert.outputs = {"flexes": [p.to_json() for p in fl]}
    d = F.degree
    total = sum(p.multiplicity for p in fl)
    cert.check("multiplicity_sum", total == 3 * d * (d - 2), f"{total} vs 3d(d-2) = {3 * d * (d - 2)}")
    if fl:
        Fn, Hn = F.normalized(), hessian(F).normalized()
        worst = 0.0
        for p in fl:
            v = p.point.as_array()
            v = v / np.linalg.norm(v)
            worst = max(worst, abs(Fn(v)), abs(Hn(v)))
        cert.check("on_curve_and_hessian", worst <= 1e-8, "max |F|, |H| at unit representatives", worst)


def _flex(args, F: TernaryForm):
    fl = flex_points(F, args.tol)
    i = args.flex_index if args.flex_index is not None else 0
    if not 0 <= i < len(fl):
        raise BadInput(f"--flex-index must be in [0, {len(fl)})")
    return i, fl[i].point


def cmd_cubic_torsion(args, cert: Certificate) -> None:
    F = _curve(args)
    k = args.k if args.k is not None else 1
    i, flex = _flex(args, F)
    cert.inputs = {"curve": F.to_json(), "k": k, "flex_index": i, "flex": flex.to_json()}
    pts = cubic_torsion(F, k, flex, args.tol)
    cert.outputs = {"points": [p.to_json() for p in pts]}
    cert.check("size_9k2", len(pts) == 9 * k * k, f"{len(pts)} points")


def cmd_stratum(args, cert: Certificate) -> None:
    F = _curve(args)
    m = args.m if args.m is not None else 1
    i, flex = _flex(args, F)
    cert.inputs = {"curve": F.to_json(), "m": m, "flex_index": i, "flex": flex.to_json()}
    pts = torsion_stratum(F, m, flex, args.tol)
    cert.outputs = {"points": [p.to_json() for p in pts], "size": len(pts)}
    cert.check("size_9_J2", len(pts) == 9 * jordan_totient(m), f"{len(pts)} vs 9 J_2({m}) = {9 * jordan_totient(m)}")


def cmd_jordan(args, cert: Certificate) -> None:
    if args.m is None or args.m < 1:
        raise BadInput("jordan needs --m >= 1")
    cert.inputs = {"m": args.m}
    j = jordan_totient(args.m)
    cert.outputs = {"J2": j}
    if args.m <= 300:
        cert.check("counting_oracle", j == oracles.jordan_totient_by_counting(args.m), "exact-order elements of (Z/m)^2")


def cmd_sizes(args, cert: Certificate) -> None:
    bound = args.bound if args.bound is not None else 110
    cert.inputs = {"bound": bound}
    sizes = admissible_sizes(bound)
    cert.outputs = {"sizes": [s.n for s in sizes], "witnesses": [s.to_json() for s in sizes]}
    cert.check("witnesses_exact", all(s.n == 9 * sum(jordan_totient(m) for m in s.index_set) for s in sizes))
    if bound <= 1000:
        ref = oracles.admissible_sizes_by_enumeration(bound)
        cert.check("subset_enumeration_oracle", [s.n for s in sizes] == ref)


def cmd_bc_sizes(args, cert: Certificate) -> None:
    bound = args.bound if args.bound is not None else 2200
    cert.inputs = {"bound": bound}
    got = banerjee_chen_sizes(bound)
    cert.outputs = {"sizes": got}
    cert.check("counting_oracle", got == oracles.banerjee_chen_by_counting(bound))


COMMANDS = {
    "discriminant": cmd_discriminant,
    "roots": cmd_roots,
    "viete": cmd_viete,
    "resolve-quartic": cmd_resolve_quartic,
    "resolvent-d": cmd_resolvent_d,
    "phi": cmd_phi,
    "psi-torsion": cmd_psi_torsion,
    "monodromy": cmd_monodromy,
    "certify-s4s3": cmd_certify,
    "flexes": cmd_flexes,
    "cubic-torsion": cmd_cubic_torsion,
    "stratum": cmd_stratum,
    "jordan": cmd_jordan,
    "sizes": cmd_sizes,
    "bc-sizes": cmd_bc_sizes,
    "verify": None,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadInput(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--tol-root", type=float, default=None)
    common.add_argument("--tol-distinct", type=float, default=None)
    common.add_argument("--parallelism", type=int, default=1)
    common.add_argument("--bound", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--tau", type=complex)
    common.add_argument("--poly", metavar="FILE")
    common.add_argument("--config", metavar="FILE")
    common.add_argument("--curve", metavar="FILE")
    common.add_argument("--path", metavar="FILE")
    common.add_argument("--flex-index", type=int)
    common.add_argument("--out", metavar="FILE")
    parser = _Parser(prog="cml", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _tolerances(args) -> TolerancePolicy:
    kw = {}
    if args.tol_root is not None:
        kw["root_tol"] = args.tol_root
    if args.tol_distinct is not None:
        kw["distinct_tol"] = args.tol_distinct
    return TolerancePolicy(**kw)


def _emit(cert: Certificate, args) -> None:
    payload = cert.dumps()
    print(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
    status = "PASS" if cert.passed else "FAIL"
    n_ok = sum(c.passed for c in cert.checks)
    line = f"{cert.construction}: {status} ({n_ok}/{len(cert.checks)} checks)"
    failed = [c.name for c in cert.failed_checks()]
    if failed:
        line += " failed: " + ", ".join(failed)
    print(line, file=sys.stderr)


def run_subcommand(argv: Sequence[str]) -> int:
    try:
        args = build_parser().parse_args(list(argv))
        if args.seed is None:
            args.seed = _default_seed()
        args.tol = _tolerances(args)
        if args.command == "verify":
            cert = run_suite(SuiteConfig(args.seed, args.trials, args.parallelism, args.tol))
        else:
            cert = Certificate(args.command, tolerances=args.tol, seed=args.seed)
            t0 = time.perf_counter()
            try:
                COMMANDS[args.command](args, cert)
            except INPUT_ERRORS:
                raise
            except CMLError as exc:
                cert.check("computation", False, f"{type(exc).__name__}: {exc}")
            cert.timing = {"seconds": round(time.perf_counter() - t0, 3)}
            if not cert.checks:
                cert.check("computation", True, "no independent check applies to this input")
    except (BadInput, *INPUT_ERRORS, json.JSONDecodeError) as exc:
        print(f"cml: bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    _emit(cert, args)
    return EXIT_PASS if cert.passed else EXIT_FAIL


def main() -> None:
    sys.exit(run_subcommand(sys.argv[1:]))


if __name__ == "__main__":
    main()
