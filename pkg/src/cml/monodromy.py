"""Root continuation along loops in coefficient space and permutation monodromy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AmbiguousMatching, CertificateFailed, PathHitsDiscriminant, TrackingAmbiguity
from .poly_core import (
    DEFAULT_TOL,
    Configuration,
    MonicPolynomial,
    TolerancePolicy,
    from_roots,
    is_square_free,
    roots,
    same_points,
)

# a segment is refined at most this many halvings below its base step
MAX_REFINEMENT = 40
NEWTON_STEPS = 8


@dataclass(frozen=True)
class Permutation:
    """Bijection of {0..n-1}; ``images[i]`` is where i goes."""

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise ValueError(f"{imgs} is not a permutation")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        imgs = list(range(n))
        imgs[i], imgs[j] = j, i
        return cls(tuple(imgs))

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition: (self * other)(i) = self(other(i))."""
        return Permutation(tuple(self.images[j] for j in other.images))

    def then(self, other: "Permutation") -> "Permutation":
        """Apply self first, then other (monodromy of a concatenated loop)."""
        return other * self

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.images == tuple(range(len(self.images)))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(len(self.images)):
            if i in seen:
                continue
            cyc = [i]
            seen.add(i)
            j = self.images[i]
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self.images[j]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def to_json(self) -> list[int]:
        return list(self.images)

    def __repr__(self) -> str:
        cyc = self.cycles()
        return "Permutation(" + ("".join(str(c).replace(",", "") for c in cyc) if cyc else "id") + ")"


@dataclass(frozen=True)
class CoefficientPath:
    """Piecewise-linear path through monic polynomials of one degree."""

    waypoints: tuple[MonicPolynomial, ...]
    samples_per_segment: int = 64
    tol: TolerancePolicy = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        wps = tuple(self.waypoints)
        object.__setattr__(self, "waypoints", wps)
        if len(wps) < 1:
            raise ValueError("a path needs at least one waypoint")
        if len({w.degree for w in wps}) != 1:
            raise ValueError("all waypoints must share one degree")
        if self.samples_per_segment < 1:
            raise ValueError("samples_per_segment must be >= 1")
        if wps[0].degree >= 2:
            for k, w in enumerate(wps):
                if not is_square_free(w, self.tol):
                    raise PathHitsDiscriminant(f"waypoint {k} is not square-free")

    @property
    def degree(self) -> int:
        return self.waypoints[0].degree

    @property
    def is_closed(self) -> bool:
        return self.waypoints[0].coeffs == self.waypoints[-1].coeffs

    def reversed(self) -> "CoefficientPath":
        return CoefficientPath(self.waypoints[::-1], self.samples_per_segment, self.tol)

    def refined(self, factor: int = 2) -> "CoefficientPath":
        return CoefficientPath(self.waypoints, self.samples_per_segment * factor, self.tol)

    def __add__(self, other: "CoefficientPath") -> "CoefficientPath":
        if self.waypoints[-1].coeffs != other.waypoints[0].coeffs:
            raise ValueError("paths do not compose: end and start differ")
        return CoefficientPath(
            self.waypoints + other.waypoints[1:],
            max(self.samples_per_segment, other.samples_per_segment),
            self.tol,
        )

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "waypoints": [w.to_json() for w in self.waypoints],
            "samples_per_segment": self.samples_per_segment,
        }

    @classmethod
    def from_json(cls, d: dict, tol: TolerancePolicy = DEFAULT_TOL) -> "CoefficientPath":
        wps = tuple(MonicPolynomial.from_json(w) for w in d["waypoints"])
        if "degree" in d and any(w.degree != int(d["degree"]) for w in wps):
            raise ValueError("waypoint degree disagrees with the path degree")
        return cls(wps, int(d.get("samples_per_segment", 64)), tol)


@dataclass(frozen=True)
class TrackResult:
    end: Configuration
    min_separation: float
    max_step_contraction: float


@dataclass(frozen=True)
class MonodromyResult:
    permutation: Permutation
    min_separation_along_path: float
    max_step_contraction: float

    def to_json(self) -> dict:
        return {
            "permutation": self.permutation.to_json(),
            "min_separation_along_path": self.min_separation_along_path,
            "max_step_contraction": self.max_step_contraction,
        }


def _newton_correct(a: np.ndarray, z: np.ndarray):
    """Newton on every tracked root; returns (roots, last step sizes, contraction ratio)."""
    n = a.size - 1
    da = a[:-1] * np.arange(n, 0, -1)
    prev = None
    contraction = 0.0
    step = np.zeros_like(z)
    for _ in range(NEWTON_STEPS):
        with np.errstate(all="ignore"):
            step = np.polyval(a, z) / np.polyval(da, z)
        if not np.all(np.isfinite(step)):
            return z, np.full(z.shape, np.inf), np.inf
        z = z - step
        size = float(np.max(np.abs(step)))
        if prev is not None and prev > 1e-12 * (1.0 + float(np.max(np.abs(z)))):
            contraction = max(contraction, size / prev)
        prev = size
        if size <= 1e-15 * (1.0 + float(np.max(np.abs(z)))):
            break
    return z, np.abs(step), contraction


def _min_sep(z: np.ndarray) -> float:
    if z.size < 2:
        return math.inf
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def _diameter(z: np.ndarray) -> float:
    if z.size < 2:
        return 1.0
    d = float(np.max(np.abs(z[:, None] - z[None, :])))
    return d if d > 0 else 1.0


def track_path(
    path: CoefficientPath, start: Configuration, tol: TolerancePolicy = DEFAULT_TOL
) -> TrackResult:
    """Continue the roots in ``start`` along ``path``; output aligned with ``start``.

    Euler predictor plus Newton corrector at each sample.  A step is accepted
    only if every root moves less than half the current minimum separation and
    the corrector converges; otherwise the step is halved.
    """
    n = path.degree
    if len(start) != n:
        raise ValueError("start configuration has the wrong size")
    first = path.waypoints[0].full()
    z = start.as_array().copy()
    if not same_points(z, roots(path.waypoints[0], tol).points, 1e-8):
        raise ValueError("start is not the root configuration of the first waypoint")
    min_sep = _min_sep(z)
    worst_contraction = 0.0
    if n >= 2 and not min_sep > tol.distinct_tol * _diameter(z):
        raise PathHitsDiscriminant("start configuration has coincident roots")
    h0 = 1.0 / path.samples_per_segment
    for seg in range(len(path.waypoints) - 1):
        a0 = path.waypoints[seg].full() if seg else first
        a1 = path.waypoints[seg + 1].full()
        if np.array_equal(a0, a1):
            continue
        t, h = 0.0, h0
        while t < 1.0:
            h = min(h, 1.0 - t)
            sep = _min_sep(z)
            accepted = False
            for _ in range(MAX_REFINEMENT):
                t_new = t + h if t + h < 1.0 else 1.0
                if t_new <= t:
                    # step below the resolution of t: the path is pinched here
                    break
                a_new = (1 - t_new) * a0 + t_new * a1
                guess = z + _predict(a0, a1, z, t, t_new)
                cand, last, contraction = _newton_correct(a_new, guess)
                moved = float(np.max(np.abs(cand - z)))
                if (
                    np.all(np.isfinite(cand))
                    and moved < 0.5 * sep
                    and float(np.max(last)) <= 1e-10 * (1.0 + float(np.max(np.abs(cand))))
                    and _min_sep(cand) > tol.distinct_tol * _diameter(cand)
                ):
                    accepted = True
                    break
                h /= 2
            if not accepted:
                if n >= 2 and _min_sep(z) <= 10 * tol.distinct_tol * _diameter(z):
                    raise PathHitsDiscriminant(f"segment {seg}, t={t:.6f}: roots collide")
                raise TrackingAmbiguity(
                    f"segment {seg}, t={t:.6f}: step refinement exhausted (separation {sep:.3e})"
                )
            z = cand
            t = t_new
            min_sep = min(min_sep, _min_sep(z))
            worst_contraction = max(worst_contraction, contraction)
            h = min(2 * h, h0)
        if n >= 2 and not is_square_free(path.waypoints[seg + 1], tol):
            raise PathHitsDiscriminant(f"waypoint {seg + 1} is not square-free")
    if n >= 2 and not min_sep > tol.distinct_tol * _diameter(z):
        raise TrackingAmbiguity(f"tracked roots came within {min_sep:.3e}")
    return TrackResult(Configuration(tuple(complex(v) for v in z), ordered=True), min_sep, worst_contraction)


def _predict(a0, a1, z, t, t_new):
    """Euler step with dz/dt = -(P_1 - P_0)(z) / P_t'(z)."""
    a_cur = (1 - t) * a0 + t * a1
    n = a_cur.size - 1
    with np.errstate(all="ignore"):
        da = a_cur[:-1] * np.arange(n, 0, -1)
        v = -np.polyval(a1 - a0, z) / np.polyval(da, z)
    v = np.where(np.isfinite(v), v, 0)
    return (t_new - t) * v


def _match(end: np.ndarray, start: np.ndarray) -> Permutation:
    n = start.size
    d = np.abs(end[:, None] - start[None, :])
    images = []
    for i in range(n):
        order = np.argsort(d[i])
        best = d[i, order[0]]
        if n > 1:
            second = d[i, order[1]]
            if not second >= 2 * best:
                raise AmbiguousMatching(f"strand {i}: nearest {best:.3e}, runner-up {second:.3e}")
        images.append(int(order[0]))
    if sorted(images) != list(range(n)):
        raise AmbiguousMatching(f"endpoint matching {images} is not injective")
    return Permutation(tuple(images))


def loop_permutation(path: CoefficientPath, tol: TolerancePolicy = DEFAULT_TOL) -> MonodromyResult:
    """Permutation of the sorted roots of the base polynomial induced by a closed path.

    ``images[i] = j`` means the strand starting at sorted root i ends at root j.
    """
    if not path.is_closed:
        raise ValueError("loop_permutation needs a closed path (first waypoint == last)")
    start = Configuration(roots(path.waypoints[0], tol).canonical(), ordered=True)
    res = track_path(path, start, tol)
    perm = _match(res.end.as_array(), start.as_array())
    return MonodromyResult(perm, res.min_separation, res.max_step_contraction)


def elementary_braid_loop(
    n: int, i: int, basepoint: Configuration, waypoints_per_twist: int = 16, samples_per_segment: int = 64
) -> CoefficientPath:
    """Half-twist exchanging real points i and i+1 (1-based) counter-clockwise.

    The two points travel on opposite halves of the circle through them; other
    points stay put.  The last waypoint is set to the first one exactly.
    """
    pts = [complex(p) for p in basepoint.points]
    if len(pts) != n:
        raise ValueError("basepoint size must equal n")
    if not 1 <= i <= n - 1:
        raise ValueError("need 1 <= i <= n-1")
    reals = [p.real for p in pts]
    if any(p.imag != 0 for p in pts) or any(b <= a for a, b in zip(reals, reals[1:])):
        raise ValueError("basepoint must be real and strictly increasing")
    lo, hi = reals[i - 1], reals[i]
    centre, radius = (lo + hi) / 2, (hi - lo) / 2
    wps = []
    for k in range(waypoints_per_twist + 1):
        theta = np.pi * k / waypoints_per_twist
        moving = list(pts)
        moving[i - 1] = centre - radius * np.exp(1j * theta)
        moving[i] = centre + radius * np.exp(1j * theta)
        wps.append(from_roots(moving))
    wps[-1] = wps[0]
    return CoefficientPath(tuple(wps), samples_per_segment)


def push_forward(path: CoefficientPath, fn) -> CoefficientPath:
    """Image path under a map Poly_n -> Poly_m applied at every waypoint."""
    wps = [fn(w) for w in path.waypoints]
    if path.is_closed:
        wps[-1] = wps[0]
    return CoefficientPath(tuple(wps), path.samples_per_segment, path.tol)


S4_BASEPOINT = Configuration((0.0, 1.0, 2.0, 3.0))
KLEIN_FOUR = frozenset(
    {
        (0, 1, 2, 3),
        (1, 0, 3, 2),
        (2, 3, 0, 1),
        (3, 2, 1, 0),
    }
)


def generated_group(gens: Sequence[Permutation]) -> set[tuple[int, ...]]:
    n = len(gens[0])
    seen = {tuple(range(n))}
    frontier = [Permutation.identity(n)]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = s * g
                if h.images not in seen:
                    seen.add(h.images)
                    nxt.append(h)
        frontier = nxt
    return seen


def induced_homomorphism(
    source_gens: Sequence[Permutation], target_gens: Sequence[Permutation]
) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Extend generator images to a map on the generated group; raise if ill-defined."""
    n, m = len(source_gens[0]), len(target_gens[0])
    table = {tuple(range(n)): Permutation.identity(m)}
    frontier = [(Permutation.identity(n), Permutation.identity(m))]
    while frontier:
        nxt = []
        for g, img in frontier:
            for s, t in zip(source_gens, target_gens):
                h, himg = s * g, t * img
                if h.images in table:
                    if table[h.images].images != himg.images:
                        raise CertificateFailed("homomorphism", f"{h} has two images")
                else:
                    table[h.images] = himg
                    nxt.append((h, himg))
        frontier = nxt
    return {k: v.images for k, v in table.items()}


def certify_exceptional_surjection(tol: TolerancePolicy = DEFAULT_TOL, strict: bool = True):
    """Certify that the quartic resolvent induces S_4 -> S_3 with kernel the Klein four-group.

    For each generator loop sigma_1..3 of B_4 at the basepoint {0,1,2,3}: track
    the loop in Poly_4, push it through the resolvent pointwise and track the
    image loop in Poly_3, and track the doubled image loop.  Clauses:

    (a) the three images generate S_3;
    (b) sigma_1 and sigma_3 have equal images and the induced map on S_4 is a
        well-defined homomorphism whose kernel is exactly the Klein four-group;
    (c) every sigma_i^2 maps to the identity.

    With ``strict`` a failing clause raises ``CertificateFailed``; otherwise the
    failed certificate is returned.
    """
    from .certificates import Certificate
    from .poly_maps import resolve_quartic

    cert = Certificate(
        "certify-s4s3",
        inputs={"basepoint": S4_BASEPOINT.to_json(), "generators": ["sigma_1", "sigma_2", "sigma_3"]},
        tolerances=tol,
    )
    source, target, squares, seps = [], [], [], []
    base_image = resolve_quartic(from_roots(S4_BASEPOINT), tol)
    for i in (1, 2, 3):
        loop = elementary_braid_loop(4, i, S4_BASEPOINT)
        src = loop_permutation(loop, tol)
        image_loop = push_forward(loop, lambda f: resolve_quartic(f, tol).output)
        img = loop_permutation(image_loop, tol)
        sq = loop_permutation(image_loop + image_loop, tol)
        source.append(src.permutation)
        target.append(img.permutation)
        squares.append(sq.permutation)
        seps.extend([src.min_separation_along_path, img.min_separation_along_path, sq.min_separation_along_path])
        cert.check(
            f"sigma_{i}_is_transposition",
            src.permutation == Permutation.transposition(4, i - 1, i),
            f"loop permutation {src.permutation}",
        )
    cert.outputs = {
        "resolvent_basepoint": base_image.output.to_json(),
        "s4_images": [p.to_json() for p in source],
        "s3_images": [p.to_json() for p in target],
        "s3_images_of_squares": [p.to_json() for p in squares],
    }
    group = generated_group(target)
    cert.check("a_images_generate_S3", len(group) == 6, f"generated subgroup of order {len(group)}", len(group))
    cert.check("b_sigma1_sigma3_agree", target[0] == target[2], f"{target[0]} vs {target[2]}")
    try:
        table = induced_homomorphism(source, target)
        kernel = frozenset(g for g, img in table.items() if img == (0, 1, 2))
        cert.check(
            "b_kernel_is_klein_four",
            len(table) == 24 and kernel == KLEIN_FOUR,
            f"|S4 image table| = {len(table)}, kernel = {sorted(kernel)}",
            len(kernel),
        )
    except CertificateFailed as exc:
        cert.check("b_kernel_is_klein_four", False, str(exc))
    cert.check("c_squares_trivial", all(p.is_identity() for p in squares), str(squares))
    min_sep = min(seps)
    cert.check(
        "min_separation_along_paths",
        min_sep > 10 * tol.distinct_tol,
        "every tracked configuration stayed separated",
        min_sep,
    )
    if strict and not cert.passed:
        bad = cert.failed_checks()[0]
        raise CertificateFailed(bad.name, bad.detail)
    return cert
