"""Weierstrass curves y^2 = (x - l1)(x - l2)(x - l3): group law, division polynomials, torsion."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial

from ..errors import CardinalityMismatch, NotDistinct
from ..poly_core import (
    DEFAULT_TOL,
    Configuration,
    TolerancePolicy,
    complex_from_json,
    complex_to_json,
    from_roots,
    roots,
)

# relative threshold used to decide that two x-coordinates (or y and -y) agree
GROUP_LAW_TOL = 1e-9
# gate on |[k-1]P - (-P)| for accepted torsion points
TORSION_RESIDUAL = 1e-8


@dataclass(frozen=True)
class CurvePoint:
    """Affine point ``(x, y)``, or the point at infinity when ``x is None``."""

    x: Optional[complex] = None
    y: Optional[complex] = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def to_json(self) -> dict:
        if self.is_infinity:
            return {"inf": True, "x": [0.0, 0.0], "y": [0.0, 0.0]}
        return {"inf": False, "x": complex_to_json(self.x), "y": complex_to_json(self.y)}

    @classmethod
    def from_json(cls, d: dict) -> "CurvePoint":
        if d.get("inf"):
            return INFINITY
        return cls(complex_from_json(d["x"]), complex_from_json(d["y"]))


INFINITY = CurvePoint()


@dataclass(frozen=True)
class WeierstrassCurve:
    """The curve y^2 = (x - l1)(x - l2)(x - l3) with identity at infinity.

    ``shift`` is the mean of the branch points; with ``X = x - shift`` the curve
    reads ``y^2 = X^3 + A X + B``.
    """

    lam: Configuration

    def __post_init__(self):
        if len(self.lam) != 3:
            raise ValueError("a Weierstrass curve needs exactly three branch points")
        if not self.lam.is_distinct():
            raise NotDistinct(f"branch points {self.lam} are not distinct")

    @classmethod
    def from_short(cls, A: complex, B: complex, tol: TolerancePolicy = DEFAULT_TOL) -> "WeierstrassCurve":
        """Curve y^2 = x^3 + A x + B (branch points computed numerically)."""
        return cls(roots(np.array([1, 0, A, B], dtype=complex), tol))

    @cached_property
    def shift(self) -> complex:
        return sum(self.lam.points) / 3

    @cached_property
    def short_form(self) -> tuple[complex, complex]:
        centred = [p - self.shift for p in self.lam.points]
        _, a1, a2, a3 = from_roots(centred).full()
        # a1 vanishes up to rounding because the roots are centred
        return complex(a2), complex(a3)

    @property
    def A(self) -> complex:
        return self.short_form[0]

    @property
    def B(self) -> complex:
        return self.short_form[1]

    def rhs(self, x: complex) -> complex:
        l1, l2, l3 = self.lam.points
        return (x - l1) * (x - l2) * (x - l3)

    def residual(self, P: CurvePoint) -> float:
        if P.is_infinity:
            return 0.0
        return abs(P.y * P.y - self.rhs(P.x))

    def contains(self, P: CurvePoint, rtol: float = 1e-10) -> bool:
        if P.is_infinity:
            return True
        return self.residual(P) <= rtol * (1 + abs(P.x) ** 3)

    def lift(self, x: complex) -> tuple[CurvePoint, CurvePoint]:
        """The two points above x (equal when x is a branch point)."""
        y = cmath.sqrt(self.rhs(x))
        return CurvePoint(complex(x), y), CurvePoint(complex(x), -y)

    def to_json(self) -> dict:
        return {"lambda": self.lam.to_json(), "A": complex_to_json(self.A), "B": complex_to_json(self.B)}


def _close(a: complex, b: complex, scale: float, tol: float) -> bool:
    return abs(a - b) <= tol * scale


def ec_neg(P: CurvePoint) -> CurvePoint:
    return P if P.is_infinity else CurvePoint(P.x, -P.y)


def ec_add(E: WeierstrassCurve, P: CurvePoint, Q: CurvePoint, tol: float = GROUP_LAW_TOL) -> CurvePoint:
    """Chord-tangent addition with the point at infinity as identity.

    Coordinates are compared with relative tolerance ``tol`` so that a chord
    through numerically coincident points is treated as a tangent (or as a
    vertical line, giving infinity).
    """
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    l1, l2, l3 = E.lam.points
    s1 = l1 + l2 + l3
    xscale = 1.0 + max(abs(P.x), abs(Q.x))
    yscale = 1.0 + max(abs(P.y), abs(Q.y))
    if _close(P.x, Q.x, xscale, tol):
        # near a branch point y ~ sqrt(error in x), hence the square-root tolerance
        if _close(P.y, -Q.y, yscale, math.sqrt(tol)):
            return INFINITY
        # tangent: 2y y' = f'(x) with f = x^3 - s1 x^2 + s2 x - s3
        s2 = l1 * l2 + l1 * l3 + l2 * l3
        slope = (3 * P.x * P.x - 2 * s1 * P.x + s2) / (2 * P.y)
    else:
        slope = (Q.y - P.y) / (Q.x - P.x)
    x3 = slope * slope + s1 - P.x - Q.x
    y3 = slope * (P.x - x3) - P.y
    return CurvePoint(complex(x3), complex(y3))


def ec_mul(E: WeierstrassCurve, n: int, P: CurvePoint, tol: float = GROUP_LAW_TOL) -> CurvePoint:
    if n < 0:
        return ec_mul(E, -n, ec_neg(P), tol)
    acc = INFINITY
    base = P
    while n:
        if n & 1:
            acc = ec_add(E, acc, base, tol)
        n >>= 1
        if n:
            base = ec_add(E, base, base, tol)
    return acc


def point_distance(P: CurvePoint, Q: CurvePoint) -> float:
    """Relative distance between affine points; 0 for two infinities, inf for a mixed pair."""
    if P.is_infinity or Q.is_infinity:
        return 0.0 if P.is_infinity and Q.is_infinity else float("inf")
    scale = 1.0 + max(abs(P.x), abs(Q.x), abs(P.y), abs(Q.y))
    return max(abs(P.x - Q.x), abs(P.y - Q.y)) / scale


def _division_family(A: complex, B: complex, k: int) -> list[Polynomial]:
    """x-only factors f_0..f_k with psi_j = f_j (odd j) and psi_j = 2y f_j (even j)."""
    x = Polynomial([0, 1])
    g = Polynomial([B, A, 0, 1])
    G2 = (4 * g) ** 2  # (2y)^4
    f = [
        Polynomial([0]),
        Polynomial([1]),
        Polynomial([1]),
        3 * x**4 + 6 * A * x**2 + 12 * B * x - A**2,
        2 * (x**6 + 5 * A * x**4 + 20 * B * x**3 - 5 * A**2 * x**2 - 4 * A * B * x - 8 * B**2 - A**3),
    ]
    for j in range(5, k + 1):
        m = j // 2
        if j % 2:
            if m % 2 == 0:
                fj = G2 * f[m + 2] * f[m] ** 3 - f[m - 1] * f[m + 1] ** 3
            else:
                fj = f[m + 2] * f[m] ** 3 - G2 * f[m - 1] * f[m + 1] ** 3
        else:
            fj = f[m] * (f[m + 2] * f[m - 1] ** 2 - f[m - 2] * f[m + 1] ** 2)
        f.append(fj)
    return f[: k + 1]


def division_polynomial(E: WeierstrassCurve, k: int, short: bool = True) -> np.ndarray:
    """x-polynomial (highest degree first) whose roots are the x-coordinates of nonzero k-torsion.

    Odd k: psi_k itself, degree (k^2-1)/2.  Even k: the y-free factor psi_k/(2y)
    times x^3 + Ax + B, degree (k^2+2)/2.  ``short=True`` uses the depressed
    coordinate X = x - shift; otherwise the polynomial is in the curve's own x.
    """
    if k < 2:
        raise ValueError("division polynomials are defined here for k >= 2")
    A, B = E.short_form
    fk = _division_family(A, B, k)[k]
    if k % 2 == 0:
        fk = fk * Polynomial([B, A, 0, 1])
    if not short:
        # substitute X = x - shift
        fk = fk(Polynomial([-E.shift, 1]))
    coef = fk.coef[::-1].astype(complex)
    nz = np.flatnonzero(np.abs(coef) > 0)
    return coef[nz[0]:] if nz.size else coef


def _family_at(A: complex, B: complex, k: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """f_k(x) and f_k'(x) evaluated through the recurrence (dual numbers).

    Much better conditioned than evaluating the expanded high-degree polynomial.
    """
    one, zero = np.ones_like(x), np.zeros_like(x)

    def mul(a, b):
        return a[0] * b[0], a[0] * b[1] + a[1] * b[0]

    def sub(a, b):
        return a[0] - b[0], a[1] - b[1]

    def cube(a):
        return mul(a, mul(a, a))

    g = (x**3 + A * x + B, 3 * x**2 + A)
    G2 = mul((4 * g[0], 4 * g[1]), (4 * g[0], 4 * g[1]))
    f = [
        (zero, zero),
        (one, zero),
        (one, zero),
        (3 * x**4 + 6 * A * x**2 + 12 * B * x - A**2, 12 * x**3 + 12 * A * x + 12 * B),
        (
            2 * (x**6 + 5 * A * x**4 + 20 * B * x**3 - 5 * A**2 * x**2 - 4 * A * B * x - 8 * B**2 - A**3),
            2 * (6 * x**5 + 20 * A * x**3 + 60 * B * x**2 - 10 * A**2 * x - 4 * A * B),
        ),
    ]
    for j in range(5, k + 1):
        m = j // 2
        if j % 2:
            if m % 2 == 0:
                fj = sub(mul(G2, mul(f[m + 2], cube(f[m]))), mul(f[m - 1], cube(f[m + 1])))
            else:
                fj = sub(mul(f[m + 2], cube(f[m])), mul(G2, mul(f[m - 1], cube(f[m + 1]))))
        else:
            inner = sub(mul(f[m + 2], mul(f[m - 1], f[m - 1])), mul(f[m - 2], mul(f[m + 1], f[m + 1])))
            fj = mul(f[m], inner)
        f.append(fj)
    return f[k]


def _polished_x(A: complex, B: complex, k: int, xs: np.ndarray) -> np.ndarray:
    out = xs.copy()
    for _ in range(4):
        v, dv = _family_at(A, B, k, out)
        with np.errstate(all="ignore"):
            step = v / dv
        good = np.isfinite(step)
        cand = np.where(good, out - step, out)
        better = np.abs(_family_at(A, B, k, cand)[0]) < np.abs(v)
        out = np.where(better, cand, out)
    return out


def _torsion_residual(E: WeierstrassCurve, k: int, P: CurvePoint) -> float:
    return point_distance(ec_mul(E, k - 1, P), ec_neg(P))


def _order(E: WeierstrassCurve, P: CurvePoint, k: int) -> int:
    """Smallest j <= k with [j]P at infinity (k + 1 if none)."""
    Q = P
    for j in range(1, k + 1):
        if Q.is_infinity:
            return j
        Q = ec_add(E, Q, P)
    return k + 1


def _refine(E: WeierstrassCurve, k: int, P: CurvePoint) -> CurvePoint:
    """Newton-polish the x-coordinate of an approximate k-torsion point and re-lift."""
    if P.is_infinity:
        return P
    near = [lam for lam in E.lam.points if abs(P.x - lam) <= math.sqrt(GROUP_LAW_TOL) * (1 + abs(lam))]
    if near:
        return CurvePoint(near[0], 0j)
    A, B = E.short_form
    x = _polished_x(A, B, k, np.array([P.x - E.shift]))[0] + E.shift
    up, down = E.lift(complex(x))
    return up if abs(up.y - P.y) <= abs(down.y - P.y) else down


def _from_basis(E: WeierstrassCurve, k: int, good: list[CurvePoint]) -> Optional[list[CurvePoint]]:
    """All of E[k] - {O} as a P1 + b P2 for two well-resolved candidates, or None."""
    gens = [P for P in good if _order(E, P, k) == k]
    for i, P1 in enumerate(gens):
        row = [INFINITY]
        for _ in range(k - 1):
            row.append(ec_add(E, row[-1], P1))
        for P2 in gens[i + 1 :]:
            pts, col = [], INFINITY
            for b in range(k):
                pts.extend(ec_add(E, col, R) for R in row)
                col = ec_add(E, col, P2)
            pts = [_refine(E, k, Q) for Q in pts[1:]]
            if any(Q.is_infinity for Q in pts):
                continue
            try:
                _check_pairwise_distinct(pts, k)
            except CardinalityMismatch:
                continue
            return pts
    return None


def torsion_points(
    E: WeierstrassCurve, k: int, tol: TolerancePolicy = DEFAULT_TOL
) -> list[CurvePoint]:
    """The k^2 - 1 nonzero k-torsion points, each verified by k-fold addition.

    2-torsion is taken directly from the branch points.  For every other point
    the x-coordinate is a root of the y-free part of psi_k, lifted to +-y.  When
    some roots come out too inaccurate (large k, clustered torsion), the group
    is regenerated as a P1 + b P2 from two candidates that do pass the check.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    pts: list[CurvePoint] = []
    if k % 2 == 0:
        pts.extend(CurvePoint(lam, 0j) for lam in E.lam.points)
    if k > 2:
        A, B = E.short_form
        fk = _division_family(A, B, k)[k]
        X = roots(fk.coef[::-1].astype(complex), tol).as_array()
        X = _polished_x(A, B, k, X)
        for xv in X + E.shift:
            pts.extend(E.lift(complex(xv)))
    if len(pts) != k * k - 1:
        raise CardinalityMismatch(f"expected {k * k - 1} points of {k}-torsion, found {len(pts)}")
    errs = [_torsion_residual(E, k, P) for P in pts]
    bad = [e for e in errs if not e <= TORSION_RESIDUAL]
    if bad:
        good = [P for P, e in zip(pts, errs) if e <= TORSION_RESIDUAL]
        rebuilt = _from_basis(E, k, good)
        if rebuilt is None:
            raise CardinalityMismatch(
                f"{len(bad)} candidate {k}-torsion points fail the check (worst residual {max(bad):.2e})"
            )
        pts = rebuilt
        for P in pts:
            err = _torsion_residual(E, k, P)
            if not err <= TORSION_RESIDUAL:
                raise CardinalityMismatch(f"point {P} fails the {k}-torsion check (residual {err:.2e})")
    _check_pairwise_distinct(pts, k)
    return pts


def _check_pairwise_distinct(pts: list[CurvePoint], k: int) -> None:
    if len(pts) < 2:
        return
    xy = np.array([[p.x, p.y] for p in pts], dtype=complex)
    scale = 1.0 + np.max(np.abs(xy))
    d = np.max(np.abs(xy[:, None, :] - xy[None, :, :]), axis=2)
    np.fill_diagonal(d, np.inf)
    if d.min() <= 1e-7 * scale:
        raise CardinalityMismatch(f"{k}-torsion points collide numerically (min gap {d.min():.2e})")
