"""Seeded property suite: one certificate per invariant, aggregated into one."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import oracles
from .certificates import Certificate
from .errors import CMLError
from .monodromy import (
    S4_BASEPOINT,
    CoefficientPath,
    certify_exceptional_surjection,
    elementary_braid_loop,
    loop_permutation,
)
from .plane_curves import (
    INFINITY,
    CurvePoint,
    MultisectionSize,
    TernaryForm,
    WeierstrassCurve,
    admissible_sizes,
    banerjee_chen_sizes,
    cubic_torsion,
    ec_add,
    ec_neg,
    flex_points,
    hausdorff,
    is_smooth,
    jordan_totient,
    point_distance,
    pairwise_distances,
    torsion_points,
    torsion_stratum,
)
from .poly_core import (
    DEFAULT_TOL,
    Configuration,
    MonicPolynomial,
    TolerancePolicy,
    discriminant,
    from_roots,
    is_square_free,
    random_monic,
    roots,
    same_points,
    unit_disk_sample,
)
from .poly_maps import (
    TorsionMapSpec,
    difference_identities,
    phi_disjoin,
    psi_torsion,
    resolve_quartic,
    resolvent_d,
    resolvent_roots,
)

# expensive curve properties never run more than this many trials
EXPENSIVE_TRIALS = 100
# sizes checked against exhaustive enumeration
ADMISSIBLE_BOUND = 500
BC_BOUND = 2200


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 42
    trials: int = 1000
    parallelism: int = 1
    tol: TolerancePolicy = field(default=DEFAULT_TOL)

    def __post_init__(self):
        if int(self.trials) < 1:
            raise ValueError("trials must be >= 1")
        if int(self.parallelism) < 1:
            raise ValueError("parallelism must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def expensive_trials(self) -> int:
        return min(self.trials, EXPENSIVE_TRIALS)

    def count(self, cap: int) -> int:
        return min(self.trials, cap)

    def to_json(self) -> dict:
        return {"seed": int(self.seed), "trials": int(self.trials), "parallelism": int(self.parallelism)}


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _random_config(rng: np.random.Generator, n: int) -> Configuration:
    return Configuration(tuple(complex(z) for z in rng.normal(size=n) + 1j * rng.normal(size=n)))


def _random_square_free_quartic(rng: np.random.Generator, tol: TolerancePolicy) -> MonicPolynomial:
    while True:
        f = random_monic(rng, 4)
        if is_square_free(f, tol):
            return f


# ---------------------------------------------------------------- poly_core


def prop_round_trip(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    worst, fails = 0.0, 0
    for _ in range(cfg.trials):
        n = int(rng.integers(1, 13))
        c = _random_config(rng, n)
        back = roots(from_roots(c), cfg.tol)
        if not same_points(back.points, c.points, 1e-9):
            fails += 1
        a, b = np.sort_complex(back.as_array()), np.sort_complex(c.as_array())
        worst = max(worst, float(np.max(np.abs(a - b))) / c.scale if n > 1 else float(abs(a[0] - b[0])))
    cert.check("roots_of_from_roots", fails == 0, f"{fails} of {cfg.trials} failed at rtol 1e-9", worst)


def prop_discriminant_oracle(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    worst = 0.0
    for _ in range(cfg.trials):
        p = random_monic(rng, int(rng.integers(2, 9)))
        worst = max(worst, _rel(discriminant(p), oracles.discriminant_from_roots(roots(p, cfg.tol).points)))
    cert.check("discriminant_vs_root_product", worst <= 1e-8, "relative error, n <= 8", worst)


def prop_permutation_invariance(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    fails = 0
    for _ in range(cfg.trials):
        c = _random_config(rng, int(rng.integers(1, 13)))
        shuffled = [c.points[i] for i in rng.permutation(len(c))]
        if from_roots(c).coeffs != from_roots(shuffled).coeffs:
            fails += 1
    cert.check("from_roots_bit_identical", fails == 0, f"{fails} of {cfg.trials} differ")


def prop_delta2(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    worst = 0.0
    for _ in range(cfg.trials):
        b, c = unit_disk_sample(rng, 2)
        worst = max(worst, _rel(discriminant(np.array([1, b, c])), oracles.delta2(b, c)))
    cert.check("delta2_closed_form", worst <= 1e-12, "relative error", worst)


def prop_delta3(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    worst = 0.0
    for _ in range(cfg.trials):
        b, c, d = unit_disk_sample(rng, 3)
        worst = max(worst, _rel(discriminant(np.array([1, b, c, d])), oracles.delta3(b, c, d)))
    cert.check("delta3_closed_form", worst <= 1e-10, "relative error", worst)


# ---------------------------------------------------------------- poly_maps


def prop_miracle(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    worst, not_sf = 0.0, 0
    for _ in range(cfg.trials):
        res = resolve_quartic(_random_square_free_quartic(rng, cfg.tol), cfg.tol)
        if not is_square_free(res.output, cfg.tol):
            not_sf += 1
        worst = max(worst, *difference_identities(res.input_roots.points, res.b_values.points))
    cert.check("output_square_free", not_sf == 0, f"{not_sf} of {cfg.trials} outputs not square-free")
    cert.check("difference_identities", worst <= 1e-9, "relative error of b_i - b_j identities", worst)


def prop_s4_invariance(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    worst = 0.0
    for _ in range(cfg.trials):
        a = roots(_random_square_free_quartic(rng, cfg.tol), cfg.tol).points
        base = np.sort_complex(np.array(resolvent_roots(*a)))
        perm = rng.permutation(4)
        moved = np.array(resolvent_roots(*(a[i] for i in perm)))
        # match as sets: nearest partner for every base value
        err = max(float(np.min(np.abs(moved - b))) for b in base)
        worst = max(worst, err / max(1.0, float(np.max(np.abs(base)))))
    cert.check("b_set_invariant_under_relabeling", worst <= 1e-10, "relative set distance", worst)


def prop_rd_scaling(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    worst = 0.0
    for _ in range(cfg.trials):
        f = _random_square_free_quartic(rng, cfg.tol)
        d = int(rng.integers(0, 3))
        res = resolve_quartic(f, cfg.tol)
        scaled = np.array(res.b_values.points) * res.input_discriminant**d
        got = roots(resolvent_d(f, d, cfg.tol), cfg.tol).as_array()
        # pointwise: each predicted root has a computed partner
        for z in scaled:
            worst = max(worst, float(np.min(np.abs(got - z))) / max(abs(z), 1e-300))
    cert.check("roots_scale_by_disc_power", worst <= 1e-9, "relative error, d in {0,1,2}", worst)


def prop_psi_cardinality(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    fails = []
    for _ in range(cfg.count(20)):
        lam = _random_config(rng, 3)
        tau = complex(*rng.normal(size=2))
        for k in (2, 3, 4, 5):
            out = psi_torsion(lam, TorsionMapSpec(k, tau), cfg.tol)
            if len(out) != k * k - 1 or not out.separation > 0:
                fails.append(k)
    cert.check("psi_size_k2_minus_1_distinct", not fails, f"failures at k = {fails}")


def prop_phi_separation(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    fails = 0
    for _ in range(cfg.trials):
        c = _random_config(rng, int(rng.integers(1, 10)))
        out = phi_disjoin(c)
        new = out.points[-1]
        if not (len(out) == len(c) + 1 and out.separation > 0 and all(abs(new) > abs(z) for z in c.points)):
            fails += 1
    cert.check("phi_output_distinct", fails == 0, f"{fails} of {cfg.trials} failed")


# ---------------------------------------------------------------- monodromy


def _circle_swap_loop(samples: int = 64) -> CoefficientPath:
    # z^2 - e^{2 pi i t}: the two square roots trade places
    wps = [MonicPolynomial((0j, -complex(np.exp(2j * np.pi * k / 16)))) for k in range(17)]
    wps[-1] = wps[0]
    return CoefficientPath(tuple(wps), samples)


def _test_loops(cfg: SuiteConfig, rng: np.random.Generator) -> list[tuple[str, str, CoefficientPath]]:
    """(check name, description, loop); names do not depend on the sampled loops."""
    loops = [("z2_circle", "z^2 - e^(2 pi i t)", _circle_swap_loop())]
    loops += [(f"sigma_{i}", f"n=4, i={i}", elementary_braid_loop(4, i, S4_BASEPOINT)) for i in (1, 2, 3)]
    for t in range(cfg.count(2)):
        n = int(rng.integers(3, 6))
        base = np.cumsum(0.5 + rng.random(n))
        i = int(rng.integers(1, n))
        loops.append((f"random_{t}", f"n={n}, i={i}", elementary_braid_loop(n, i, Configuration(tuple(base)))))
    return loops


def prop_sampling_invariance(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    for name, desc, loop in _test_loops(cfg, rng):
        a = loop_permutation(loop, cfg.tol).permutation
        b = loop_permutation(loop.refined(2), cfg.tol).permutation
        cert.check(f"{name}_doubled_samples", a == b, f"{desc}: {a} vs {b}")


def prop_inverse_law(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    for name, desc, loop in _test_loops(cfg, rng):
        a = loop_permutation(loop, cfg.tol).permutation
        b = loop_permutation(loop.reversed(), cfg.tol).permutation
        cert.check(f"{name}_reverse_is_inverse", b == a.inverse(), f"{desc}: {b} vs {a.inverse()}")


def prop_concatenation_law(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    gens = {i: elementary_braid_loop(4, i, S4_BASEPOINT) for i in (1, 2, 3)}
    perms = {i: loop_permutation(g, cfg.tol).permutation for i, g in gens.items()}
    for i, j in ((1, 2), (2, 3), (3, 1)):
        both = loop_permutation(gens[i] + gens[j], cfg.tol).permutation
        want = perms[i].then(perms[j])
        cert.check(f"sigma_{i}_then_sigma_{j}", both == want, f"{both} vs {want}")


def prop_certification(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    sub = certify_exceptional_surjection(cfg.tol, strict=False)
    for c in sub.checks:
        cert.check(c.name, c.passed, c.detail, c.measured)
    cert.outputs["certificate"] = sub.to_json(include_timing=False)


# ---------------------------------------------------------------- plane_curves


def prop_flex_count(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    per_degree = max(1, cfg.expensive_trials // 3)
    for d in (2, 3, 4):
        bad, tried = [], 0
        while tried < per_degree:
            F = TernaryForm.random(rng, d)
            if not is_smooth(F, cfg.tol):
                continue
            tried += 1
            total = sum(p.multiplicity for p in flex_points(F, cfg.tol, check_smooth=False))
            if total != 3 * d * (d - 2):
                bad.append(total)
        cert.check(f"degree_{d}_sum_is_{3 * d * (d - 2)}", not bad, f"{tried} curves, bad totals {bad}")


def _random_curve_point(E: WeierstrassCurve, rng: np.random.Generator) -> CurvePoint:
    x = complex(*rng.normal(size=2))
    return E.lift(x)[int(rng.integers(0, 2))]


def prop_group_axioms(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    E = WeierstrassCurve(Configuration((0j, 1 + 0j, -0.4 + 1.3j)))
    assoc, ident, inv = 0.0, 0.0, 0.0
    for _ in range(cfg.expensive_trials):
        P, Q, R = (_random_curve_point(E, rng) for _ in range(3))
        left = ec_add(E, ec_add(E, P, Q), R)
        right = ec_add(E, P, ec_add(E, Q, R))
        assoc = max(assoc, point_distance(left, right))
        ident = max(ident, point_distance(ec_add(E, P, INFINITY), P), point_distance(ec_add(E, INFINITY, P), P))
        s = ec_add(E, P, ec_neg(P))
        inv = max(inv, 0.0 if s.is_infinity else float("inf"))
    cert.check("associativity", assoc <= 1e-7, "relative distance", assoc)
    cert.check("identity", ident <= 1e-10, "relative distance", ident)
    cert.check("inverse", inv <= 1e-10, "P + (-P) is the point at infinity", inv)


def prop_torsion_cardinality(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    bad = []
    for _ in range(cfg.count(20)):
        E = WeierstrassCurve(_random_config(rng, 3))
        for k in (2, 3, 4, 5):
            got = len(torsion_points(E, k, cfg.tol))
            if got != k * k - 1:
                bad.append((k, got))
    cert.check("size_k2_minus_1", not bad, f"mismatches {bad}")


def _smooth_cubic(rng: np.random.Generator, tol: TolerancePolicy) -> TernaryForm:
    while True:
        F = TernaryForm.random(rng, 3)
        if is_smooth(F, tol):
            return F


def prop_stratification(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    curves = [("fermat", TernaryForm.fermat(3))]
    curves += [(f"random_{i}", _smooth_cubic(rng, cfg.tol)) for i in range(cfg.count(1))]
    for name, F in curves:
        flex = flex_points(F, cfg.tol)[0].point
        for m in (1, 2, 3, 4):
            divs = [d for d in range(1, m + 1) if m % d == 0]
            strata = [torsion_stratum(F, d, flex, cfg.tol) for d in divs]
            full = cubic_torsion(F, m, flex, cfg.tol)
            sizes_ok = sum(9 * jordan_totient(d) for d in divs) == 9 * m * m == len(full)
            union = [p for s in strata for p in s]
            # disjoint: no two points of the union coincide; union = full as sets
            gaps = pairwise_distances(union, union) + np.eye(len(union))
            sep = float(gaps.min())
            cover = hausdorff(union, full)
            cert.check(
                f"{name}_m{m}",
                sizes_ok and len(union) == len(full) and sep > 1e-7 and cover <= 1e-7,
                f"strata sizes {[len(s) for s in strata]}, |full| = {len(full)}, min gap {sep:.2e}",
                cover,
            )


def prop_flex_origin(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    curves = [("fermat", TernaryForm.fermat(3))]
    curves += [(f"random_{i}", _smooth_cubic(rng, cfg.tol)) for i in range(cfg.count(1))]
    for name, F in curves:
        flexes = [p.point for p in flex_points(F, cfg.tol)]
        ref = cubic_torsion(F, 2, flexes[0], cfg.tol)
        worst = max(hausdorff(ref, cubic_torsion(F, 2, p, cfg.tol)) for p in flexes[1:])
        cert.check(f"{name}_k2_hausdorff", len(flexes) == 9 and worst <= 1e-7, f"{len(flexes)} flexes", worst)


def prop_admissible_witness(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    sizes = admissible_sizes(ADMISSIBLE_BOUND)
    bad = [s.n for s in sizes if s.n != 9 * sum(jordan_totient(m) for m in s.index_set)]
    # rebuilding through the validating constructor re-runs the identity check
    rebuilt = [MultisectionSize(s.n, s.index_set) for s in sizes]
    cert.check("witness_identity_exact", not bad and len(rebuilt) == len(sizes), f"bad: {bad}")
    ref = oracles.admissible_sizes_by_enumeration(ADMISSIBLE_BOUND)
    cert.check("matches_subset_enumeration", [s.n for s in sizes] == ref, f"bound {ADMISSIBLE_BOUND}")
    cert.check("jordan_vs_counting", all(jordan_totient(m) == oracles.jordan_totient_by_counting(m) for m in range(1, 40)))
    cert.outputs["sizes_110"] = [s.n for s in admissible_sizes(110)]


def prop_banerjee_chen(cfg: SuiteConfig, rng: np.random.Generator, cert: Certificate) -> None:
    got = banerjee_chen_sizes(BC_BOUND)
    ref = oracles.banerjee_chen_by_counting(BC_BOUND)
    cert.check("matches_counting_oracle", got == ref, f"{got} vs {ref}")
    cert.outputs["sizes"] = got


PROPERTIES: list[tuple[str, Callable]] = [
    ("poly_core.round_trip", prop_round_trip),
    ("poly_core.discriminant_oracle", prop_discriminant_oracle),
    ("poly_core.permutation_invariance", prop_permutation_invariance),
    ("poly_core.delta2_closed_form", prop_delta2),
    ("poly_core.delta3_closed_form", prop_delta3),
    ("poly_maps.miracle_preservation", prop_miracle),
    ("poly_maps.s4_invariance", prop_s4_invariance),
    ("poly_maps.resolvent_d_scaling", prop_rd_scaling),
    ("poly_maps.psi_cardinality", prop_psi_cardinality),
    ("poly_maps.phi_separation", prop_phi_separation),
    ("monodromy.sampling_invariance", prop_sampling_invariance),
    ("monodromy.inverse_law", prop_inverse_law),
    ("monodromy.concatenation_law", prop_concatenation_law),
    ("monodromy.full_certification", prop_certification),
    ("plane_curves.flex_count", prop_flex_count),
    ("plane_curves.group_axioms", prop_group_axioms),
    ("plane_curves.torsion_cardinality", prop_torsion_cardinality),
    ("plane_curves.stratification", prop_stratification),
    ("plane_curves.flex_origin_independence", prop_flex_origin),
    ("plane_curves.admissible_witness", prop_admissible_witness),
    ("plane_curves.banerjee_chen_oracle", prop_banerjee_chen),
]


def property_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for property ``index``; does not depend on scheduling."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(index,)))


def run_property(cfg: SuiteConfig, index: int) -> Certificate:
    name, fn = PROPERTIES[index]
    cert = Certificate(name, inputs=cfg.to_json(), tolerances=cfg.tol, seed=int(cfg.seed))
    t0 = time.perf_counter()
    try:
        fn(cfg, property_rng(cfg.seed, index), cert)
    except CMLError as exc:
        cert.check("completed", False, f"{type(exc).__name__}: {exc}")
    if not cert.checks:
        cert.check("completed", False, "property recorded no checks")
    cert.timing = {"seconds": round(time.perf_counter() - t0, 3)}
    return cert


def run_suite(cfg: SuiteConfig) -> Certificate:
    t0 = time.perf_counter()
    idx = range(len(PROPERTIES))
    if cfg.parallelism > 1:
        with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            subs = list(pool.map(lambda i: run_property(cfg, i), idx))
    else:
        subs = [run_property(cfg, i) for i in idx]
    agg = Certificate("verify", inputs=cfg.to_json(), tolerances=cfg.tol, seed=int(cfg.seed))
    for sub in subs:
        failed = [c.name for c in sub.failed_checks()]
        agg.check(sub.construction, sub.passed, f"{len(sub.checks)} checks" + (f", failed {failed}" if failed else ""))
    agg.outputs = {"properties": [s.to_json(include_timing=False) for s in subs]}
    agg.timing = {"seconds": round(time.perf_counter() - t0, 3), "properties": {s.construction: s.timing for s in subs}}
    return agg
