"""Complex polynomial arithmetic, root finding, resultants and configurations.

Monic polynomials are stored as their non-leading coefficients ``(a_1, ..., a_n)``
of ``Z^n + a_1 Z^(n-1) + ... + a_n``.  General (non-monic) polynomials are plain
numpy arrays, highest degree first, the same convention as ``numpy.polyval``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import NonConvergence

__all__ = [
    "TolerancePolicy",
    "DEFAULT_TOL",
    "MonicPolynomial",
    "Configuration",
    "SquareFreeCheck",
    "evaluate",
    "derivative",
    "roots",
    "from_roots",
    "sylvester_matrix",
    "resultant",
    "discriminant",
    "is_square_free",
    "same_points",
    "complex_to_json",
    "complex_from_json",
]


def _check_finite(z: complex, what: str = "value") -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite {what}: {z!r}")
    return z


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(pair) -> complex:
    if isinstance(pair, (int, float)):
        return _check_finite(complex(pair))
    re, im = pair
    return _check_finite(complex(float(re), float(im)))


@dataclass(frozen=True)
class TolerancePolicy:
    root_tol: float = 1e-12
    distinct_tol: float = 1e-9
    max_iterations: int = 500

    def __post_init__(self):
        if not (self.root_tol > 0 and self.distinct_tol > 0 and self.max_iterations > 0):
            raise ValueError("tolerances and iteration budget must be strictly positive")
        if not self.root_tol < self.distinct_tol:
            raise ValueError("root_tol must be smaller than distinct_tol")

    def to_json(self) -> dict:
        return {
            "root_tol": self.root_tol,
            "distinct_tol": self.distinct_tol,
            "max_iterations": self.max_iterations,
        }

    @classmethod
    def from_json(cls, d: dict) -> "TolerancePolicy":
        return cls(float(d["root_tol"]), float(d["distinct_tol"]), int(d["max_iterations"]))


DEFAULT_TOL = TolerancePolicy()


@dataclass(frozen=True)
class MonicPolynomial:
    """Element of the coefficient space C^n: ``Z^n + a_1 Z^(n-1) + ... + a_n``."""

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        cs = tuple(_check_finite(c, "coefficient") for c in self.coeffs)
        if len(cs) < 1:
            raise ValueError("a monic polynomial needs degree >= 1")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def from_array(cls, full: Sequence[complex]) -> "MonicPolynomial":
        """Build from a full coefficient vector (highest first), normalising the lead to 1."""
        full = np.asarray(full, dtype=complex)
        if full.size < 2 or full[0] == 0:
            raise ValueError("need a nonzero leading coefficient and degree >= 1")
        return cls(tuple(full[1:] / full[0]))

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def full(self) -> np.ndarray:
        """Coefficient array with the implicit leading 1, highest degree first."""
        return np.concatenate(([1.0 + 0j], np.asarray(self.coeffs, dtype=complex)))

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)

    def to_json(self) -> dict:
        return {"degree": self.degree, "coeffs": [complex_to_json(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, d: dict) -> "MonicPolynomial":
        coeffs = tuple(complex_from_json(c) for c in d["coeffs"])
        if "degree" in d and int(d["degree"]) != len(coeffs):
            raise ValueError(f"degree {d['degree']} does not match {len(coeffs)} coefficients")
        return cls(coeffs)

    def __repr__(self) -> str:
        terms = ", ".join(f"{c:.6g}" for c in self.coeffs)
        return f"MonicPolynomial(deg={self.degree}, [{terms}])"


def _canonical_key(z: complex) -> tuple[float, float]:
    return (z.real, z.imag)


@dataclass(frozen=True, eq=False)
class Configuration:
    """A tuple of complex points; unordered configurations compare as multisets."""

    points: tuple[complex, ...]
    ordered: bool = False
    separation: float = field(init=False)

    def __post_init__(self):
        pts = tuple(_check_finite(p, "point") for p in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "separation", _min_separation(pts))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def canonical(self) -> tuple[complex, ...]:
        return tuple(sorted(self.points, key=_canonical_key))

    def _eq_key(self):
        return (self.ordered, self.points if self.ordered else self.canonical())

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self._eq_key() == other._eq_key()

    def __hash__(self):
        return hash(self._eq_key())

    @property
    def diameter(self) -> float:
        if len(self.points) < 2:
            return 0.0
        arr = np.asarray(self.points)
        return float(np.max(np.abs(arr[:, None] - arr[None, :])))

    @property
    def scale(self) -> float:
        """Diameter, or 1 when the diameter vanishes (singletons, total collapse)."""
        d = self.diameter
        return d if d > 0 else 1.0

    def is_distinct(self, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        return self.separation > tol.distinct_tol * self.scale

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=complex)

    def to_json(self) -> dict:
        return {"ordered": self.ordered, "points": [complex_to_json(p) for p in self.points]}

    @classmethod
    def from_json(cls, d: dict) -> "Configuration":
        return cls(tuple(complex_from_json(p) for p in d["points"]), bool(d.get("ordered", False)))

    def __repr__(self) -> str:
        pts = ", ".join(f"{p:.6g}" for p in self.points)
        kind = "ordered" if self.ordered else "unordered"
        return f"Configuration({kind}, [{pts}])"


def _min_separation(pts: Sequence[complex]) -> float:
    if len(pts) < 2:
        return math.inf
    arr = np.asarray(pts, dtype=complex)
    dist = np.abs(arr[:, None] - arr[None, :])
    np.fill_diagonal(dist, np.inf)
    return float(dist.min())


def same_points(a: Iterable[complex], b: Iterable[complex], rtol: float) -> bool:
    """Multiset equality up to ``rtol`` relative to the common scale (optimal matching)."""
    a = np.asarray(list(a), dtype=complex)
    b = np.asarray(list(b), dtype=complex)
    if a.shape != b.shape:
        return False
    if a.size == 0:
        return True
    scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return bool(np.max(cost[rows, cols]) <= rtol * scale)


PolyLike = Union[MonicPolynomial, Sequence[complex], np.ndarray]


def _as_array(p: PolyLike) -> np.ndarray:
    if isinstance(p, MonicPolynomial):
        return p.full()
    arr = np.atleast_1d(np.asarray(p, dtype=complex))
    nz = np.flatnonzero(arr)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return arr[nz[0]:]


def evaluate(p: PolyLike, z: complex) -> complex:
    """Horner evaluation."""
    acc = 0j
    for c in _as_array(p):
        acc = acc * z + c
    return complex(acc)


def derivative(p: PolyLike) -> np.ndarray:
    c = _as_array(p)
    n = c.size - 1
    if n < 1:
        raise ValueError("derivative needs a polynomial of degree >= 1")
    return c[:-1] * np.arange(n, 0, -1)


def _residual_bound(a: np.ndarray, r: np.ndarray, root_tol: float) -> np.ndarray:
    # root_tol * (1+|r|)^n, scaled by the coefficient size so it is invariant
    # under the backward error of Horner evaluation.
    n = a.size - 1
    coef_scale = max(1.0, float(np.max(np.abs(a[1:]))))
    return root_tol * coef_scale * (1.0 + np.abs(r)) ** n


def _root_radius(a: np.ndarray) -> float:
    # Fujiwara bound: encloses every root without the overflow that the
    # Cauchy radius 1 + max|a_k| causes for large coefficients at high degree
    n = a.size - 1
    radius = 2.0 * float(np.max(np.abs(a[1:]) ** (1.0 / np.arange(1, n + 1))))
    return radius if radius > 0 else 1.0


def _aberth(a: np.ndarray, max_iterations: int, root_tol: float) -> tuple[np.ndarray, bool]:
    n = a.size - 1
    da = a[:-1] * np.arange(n, 0, -1)
    radius = _root_radius(a)
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    with np.errstate(all="ignore"):
        for _ in range(max_iterations):
            pz = np.polyval(a, z)
            dpz = np.polyval(da, z)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            w = np.where(pz == 0, 0.0, 1.0 / (dpz / pz - s))
            bad = ~np.isfinite(w)
            if bad.any():
                # nudge coincident iterates apart instead of producing NaN
                w[bad] = 1e-3 * radius * np.exp(1j * np.arange(bad.sum()))
            z = z - w
            # stop on steps small relative to the root scale, capped at 1 so
            # tiny-scale polynomials are not declared converged prematurely
            if np.all(np.abs(w) <= root_tol * (min(1.0, radius) + np.abs(z))):
                return z, True
    return z, False


def _newton_polish(a: np.ndarray, z: np.ndarray, steps: int = 6) -> np.ndarray:
    n = a.size - 1
    da = a[:-1] * np.arange(n, 0, -1)
    z = z.copy()
    with np.errstate(all="ignore"):
        for _ in range(steps):
            pz = np.polyval(a, z)
            dpz = np.polyval(da, z)
            step = pz / dpz
            if z.size > 1:
                dist = np.abs(z[:, None] - z[None, :])
                np.fill_diagonal(dist, np.inf)
                nearest = dist.min(axis=1)
            else:
                nearest = np.full(1, np.inf)
            cand = z - step
            ok = np.isfinite(cand) & (np.abs(step) < 0.5 * nearest)
            ok &= np.abs(np.polyval(a, np.where(ok, cand, z))) < np.abs(pz)
            if not ok.any():
                break
            z = np.where(ok, cand, z)
    return z


def _snap_clusters(z: np.ndarray, radius: float) -> np.ndarray:
    """Replace groups of roots closer than ``radius`` by their common mean."""
    n = z.size
    label = list(range(n))

    def find(i):
        while label[i] != i:
            label[i] = label[label[i]]
            i = label[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= radius:
                label[find(i)] = find(j)
    out = z.copy()
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    for members in groups.values():
        if len(members) > 1:
            out[members] = z[members].mean()
    return out


def roots(p: PolyLike, tol: TolerancePolicy = DEFAULT_TOL) -> Configuration:
    """All roots with multiplicity, as an unordered configuration.

    Aberth simultaneous iteration from a circle enclosing all roots, then
    guarded Newton polishing.  Repeated roots come back as coincident (or nearly
    coincident) points.  Raises ``NonConvergence`` when the budget runs out and
    some root still violates the residual bound.
    """
    c = _as_array(p)
    n = c.size - 1
    if n < 1:
        raise ValueError("roots needs degree >= 1")
    a = c / c[0]
    if n == 1:
        return Configuration((complex(-a[1]),))
    z, converged = _aberth(a, tol.max_iterations, tol.root_tol)
    z = _newton_polish(a, z)
    # relative to the root scale, like every other distinctness decision
    z = _snap_clusters(z, tol.root_tol * min(1.0, _root_radius(a)) * (1.0 + float(np.max(np.abs(z)))))
    resid = np.abs(np.polyval(a, z))
    ok = np.isfinite(z).all() and bool(np.all(resid <= _residual_bound(a, z, tol.root_tol)))
    if not ok and not converged:
        raise NonConvergence(
            f"degree {n}: no convergence in {tol.max_iterations} iterations "
            f"(max residual {float(np.max(resid)):.3e})"
        )
    if not ok:
        raise NonConvergence(f"degree {n}: residual {float(np.max(resid)):.3e} above bound")
    return Configuration(tuple(complex(v) for v in z))


def from_roots(c: Union[Configuration, Iterable[complex]]) -> MonicPolynomial:
    """Viete map: a_k = (-1)^k sigma_k of the points (input order irrelevant)."""
    pts = c.points if isinstance(c, Configuration) else tuple(complex(v) for v in c)
    if not pts:
        raise ValueError("from_roots needs at least one point")
    coeffs = np.array([1.0 + 0j])
    for r in sorted(pts, key=_canonical_key):
        nxt = np.empty(coeffs.size + 1, dtype=complex)
        nxt[:-1] = coeffs
        nxt[-1] = 0
        nxt[1:] -= r * coeffs
        coeffs = nxt
    return MonicPolynomial(tuple(complex(v) for v in coeffs[1:]))


def sylvester_matrix(p: PolyLike, q: PolyLike) -> np.ndarray:
    """Sylvester matrix of p (degree m) and q (degree n), size (m+n) x (m+n).

    Leading zeros are *not* stripped from numpy inputs so callers can impose a
    formal degree.
    """
    a = p.full() if isinstance(p, MonicPolynomial) else np.atleast_1d(np.asarray(p, dtype=complex))
    b = q.full() if isinstance(q, MonicPolynomial) else np.atleast_1d(np.asarray(q, dtype=complex))
    m, n = a.size - 1, b.size - 1
    if m < 1 or n < 1:
        raise ValueError("resultant needs both degrees >= 1")
    size = m + n
    s = np.zeros((size, size), dtype=complex)
    for i in range(n):
        s[i, i:i + m + 1] = a
    for i in range(m):
        s[n + i, i:i + n + 1] = b
    return s


def resultant(p: PolyLike, q: PolyLike) -> complex:
    """det of the Sylvester matrix (LAPACK LU with partial pivoting)."""
    a = _as_array(p)
    b = _as_array(q)
    return complex(np.linalg.det(sylvester_matrix(a, b)))


def discriminant(p: PolyLike) -> complex:
    """(-1)^(n(n-1)/2) Res(P, P') / lc(P); equals prod_{i<j} (r_i - r_j)^2 for monic P.

    With this sign, z^2 + bz + c has discriminant b^2 - 4c.
    """
    c = _as_array(p)
    n = c.size - 1
    if n < 2:
        raise ValueError("discriminant needs degree >= 2")
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(c, derivative(c)) / complex(c[0])


class SquareFreeCheck(NamedTuple):
    square_free: bool
    margin: float
    separation: float
    threshold: float

    def __bool__(self) -> bool:
        return self.square_free


def is_square_free(p: PolyLike, tol: TolerancePolicy = DEFAULT_TOL) -> SquareFreeCheck:
    """Square-free test combining |discriminant| and root separation.

    The discriminant threshold is the value produced by a configuration of the
    same diameter D with one pair at distance ``distinct_tol * D``, so the test
    is invariant under affine changes of variable.
    """
    c = _as_array(p)
    n = c.size - 1
    if n < 2:
        raise ValueError("square-free test needs degree >= 2")
    disc = discriminant(c)
    margin = abs(disc)
    try:
        conf = roots(c, tol)
    except NonConvergence:
        return SquareFreeCheck(False, margin, 0.0, math.inf)
    scale = conf.scale
    threshold = (tol.distinct_tol * scale) ** 2 * scale ** (n * (n - 1) - 2)
    ok = margin > threshold and conf.separation > tol.distinct_tol * scale
    return SquareFreeCheck(bool(ok), margin, conf.separation, threshold)


def unit_disk_sample(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform samples from the closed unit disk."""
    r = np.sqrt(rng.random(size))
    t = 2 * np.pi * rng.random(size)
    return r * np.exp(1j * t)


def random_monic(rng: np.random.Generator, degree: int) -> MonicPolynomial:
    return MonicPolynomial(tuple(complex(v) for v in unit_disk_sample(rng, degree)))
