"""Acceptance criteria, one test per criterion.

Each criterion function returns ``(passed, detail)``; the pytest wrappers
assert on it and record a one-line verdict that conftest.py prints in the
terminal summary.  Running this file directly prints the same lines.
"""

from __future__ import annotations

import contextlib
import io
import json
import subprocess
import sys
import time

import numpy as np

from cml.certificates import Certificate
from cml.cli import run_subcommand
from cml.oracles import admissible_sizes_by_enumeration, discriminant_from_roots
from cml.plane_curves import (
    ProjectivePoint,
    TernaryForm,
    admissible_sizes,
    banerjee_chen_sizes,
    cubic_torsion,
    flex_points,
    hausdorff,
    is_smooth,
    torsion_stratum,
)
from cml.poly_core import (
    Configuration,
    discriminant,
    from_roots,
    is_square_free,
    random_monic,
    roots,
    same_points,
)
from cml.poly_maps import TorsionMapSpec, difference_identities, psi_torsion, resolve_quartic

SEED = 42
RESULTS: dict[int, tuple[bool, str]] = {}


def _run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = run_subcommand(argv)
    return code, out.getvalue()


def _square_free_quartic(rng):
    while True:
        f = random_monic(rng, 4)
        if is_square_free(f):
            return f


def criterion_1(tmp_dir) -> tuple[bool, str]:
    """Resolvent correctness."""
    t0 = time.perf_counter()
    path = f"{tmp_dir}/z4m1.json"
    with open(path, "w") as fh:
        json.dump({"degree": 4, "coeffs": [[0, 0], [0, 0], [0, 0], [-1, 0]]}, fh)
    code, out = _run_cli(["resolve-quartic", "--poly", path])
    cert = Certificate.loads(out)
    got = [complex(*c) for c in cert.outputs["coeffs"]]
    coeff_err = max(abs(a - b) for a, b in zip(got, [0, 4, 0]))
    rng = np.random.default_rng(SEED)
    worst, not_sf = 0.0, 0
    for _ in range(1000):
        res = resolve_quartic(_square_free_quartic(rng))
        not_sf += not is_square_free(res.output)
        worst = max(worst, *difference_identities(res.input_roots.points, res.b_values.points))
    dt = time.perf_counter() - t0
    ok = code == 0 and coeff_err <= 1e-10 and not_sf == 0 and worst <= 1e-9 and dt <= 10
    return ok, f"z^4-1 coeff err {coeff_err:.1e}; 1000 quartics: {not_sf} not square-free, identity err {worst:.1e}; {dt:.1f}s"


def criterion_2() -> tuple[bool, str]:
    """Exceptional surjection S4 -> S3."""
    t0 = time.perf_counter()
    code, out = _run_cli(["certify-s4s3"])
    dt = time.perf_counter() - t0
    cert = Certificate.loads(out)
    s3 = [tuple(p) for p in cert.outputs["s3_images"]]
    squares = [tuple(p) for p in cert.outputs["s3_images_of_squares"]]
    by_name = {c.name: c.passed for c in cert.checks}
    clauses = {
        "a": by_name.get("a_images_generate_S3", False),
        "b": by_name.get("b_sigma1_sigma3_agree", False) and by_name.get("b_kernel_is_klein_four", False),
        "c": by_name.get("c_squares_trivial", False),
    }
    exact = s3[0] == s3[2] and all(p == (0, 1, 2) for p in squares)
    ok = code == 0 and all(clauses.values()) and exact and dt <= 30
    return ok, f"clauses {clauses}, sigma images {s3}; {dt:.1f}s"


def criterion_3() -> tuple[bool, str]:
    """Flex counts."""
    t0 = time.perf_counter()
    fl = flex_points(TernaryForm.fermat(3))
    omega = np.exp(2j * np.pi * np.arange(3) / 3)
    closed = []
    for w in omega:
        closed += [ProjectivePoint((0, 1, -w)), ProjectivePoint((1, 0, -w)), ProjectivePoint((1, -w, 0))]
    dist = hausdorff([p.point for p in fl], closed)
    simple = len(fl) == 9 and all(p.multiplicity == 1 for p in fl)
    rng = np.random.default_rng(SEED)
    while True:
        Q = TernaryForm.random(rng, 4)
        if is_smooth(Q):
            break
    total = sum(p.multiplicity for p in flex_points(Q))
    dt = time.perf_counter() - t0
    ok = simple and dist <= 1e-8 and total == 24 and dt <= 60
    return ok, f"Fermat: {len(fl)} simple flexes, Hausdorff to closed form {dist:.1e}; quartic total {total}; {dt:.1f}s"


def criterion_4() -> tuple[bool, str]:
    """Torsion cardinalities."""
    rng = np.random.default_rng(SEED)
    bad, k2_err = [], 0.0
    for _ in range(20):
        lam = Configuration(tuple(complex(*v) for v in rng.normal(size=(3, 2))))
        for k in (2, 3, 4, 5):
            out = psi_torsion(lam, TorsionMapSpec(k))
            if len(out) != k * k - 1:
                bad.append((k, len(out)))
            if k == 2:
                a = np.sort_complex(out.as_array())
                b = np.sort_complex(lam.as_array())
                k2_err = max(k2_err, float(np.max(np.abs(a - b))) / lam.scale)
    ok = not bad and k2_err <= 1e-10
    return ok, f"20 lambdas x k=2..5: mismatches {bad}; k=2 vs lambda {k2_err:.1e}"


def criterion_5() -> tuple[bool, str]:
    """Multisection sizes (exact integers)."""
    sizes = [s.n for s in admissible_sizes(110)]
    fermat = TernaryForm.fermat(3)
    n72 = len(torsion_stratum(fermat, 3, flex_points(fermat)[0].point))
    bc = banerjee_chen_sizes(2200)
    parts = {
        "admissible": sizes == [9, 27, 36, 72, 81, 99, 108],
        "stratum_72": n72 == 72,
        "banerjee_chen": bc == [216, 432, 864, 1296, 2160],
    }
    return all(parts.values()), f"{parts}; admissible {sizes}; stratum {n72}; 18*J2 list {bc}"


def criterion_6() -> tuple[bool, str]:
    """Flex-origin independence."""
    F = TernaryForm.fermat(3)
    flexes = [p.point for p in flex_points(F)]
    ref = cubic_torsion(F, 2, flexes[0])
    worst = max(hausdorff(ref, cubic_torsion(F, 2, p)) for p in flexes[1:])
    return len(flexes) == 9 and worst <= 1e-7, f"max Hausdorff over 9 flexes {worst:.1e}"


def criterion_7() -> tuple[bool, str]:
    """Oracle equivalences."""
    rng = np.random.default_rng(SEED)
    disc_err = 0.0
    for _ in range(1000):
        p = random_monic(rng, int(rng.integers(2, 9)))
        oracle = discriminant_from_roots(roots(p).points)
        disc_err = max(disc_err, abs(discriminant(p) - oracle) / abs(oracle))
    fails = 0
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        c = Configuration(tuple(complex(*v) for v in rng.normal(size=(n, 2))))
        fails += not same_points(roots(from_roots(c)).points, c.points, 1e-9)
    enum = admissible_sizes_by_enumeration(110)
    absent = 45 not in enum and 45 not in [s.n for s in admissible_sizes(110)]
    ok = disc_err <= 1e-8 and fails == 0 and absent
    return ok, f"disc rel err {disc_err:.1e}; round trip failures {fails}/1000; 45 absent: {absent}"


def criterion_8() -> tuple[bool, str]:
    """Full verify run."""
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "cml.cli", "verify", "--seed", "42"], capture_output=True, text=True, timeout=600
    )
    dt = time.perf_counter() - t0
    ok = proc.returncode == 0 and dt <= 300
    return ok, f"exit {proc.returncode}; {dt:.1f}s; {proc.stderr.strip().splitlines()[-1] if proc.stderr else ''}"


def _record(n: int, result: tuple[bool, str]) -> None:
    RESULTS[n] = result
    assert result[0], result[1]


def test_criterion_1_resolvent(tmp_path):
    _record(1, criterion_1(tmp_path))


def test_criterion_2_exceptional_surjection():
    _record(2, criterion_2())


def test_criterion_3_flex_counts():
    _record(3, criterion_3())


def test_criterion_4_torsion_cardinality():
    _record(4, criterion_4())


def test_criterion_5_multisection_sizes():
    _record(5, criterion_5())


def test_criterion_6_flex_origin_independence():
    _record(6, criterion_6())


def test_criterion_7_oracles():
    _record(7, criterion_7())


def test_criterion_8_verify_suite():
    _record(8, criterion_8())


def summary_lines() -> list[str]:
    return [f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}" for n, (ok, detail) in sorted(RESULTS.items())]


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        runs = [
            lambda: criterion_1(tmp),
            criterion_2,
            criterion_3,
            criterion_4,
            criterion_5,
            criterion_6,
            criterion_7,
            criterion_8,
        ]
        for n, fn in enumerate(runs, 1):
            RESULTS[n] = fn()
            print(summary_lines()[-1], flush=True)
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
