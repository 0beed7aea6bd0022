"""Smooth plane cubics as elliptic curves with a flex as origin."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from ..errors import CardinalityMismatch, FlexNotOnCurve
from ..poly_core import DEFAULT_TOL, TolerancePolicy, roots
from .arith import jordan_totient
from .elliptic import INFINITY, CurvePoint, WeierstrassCurve, point_distance, torsion_points
from .forms import ProjectivePoint, TernaryForm

# |F(p)| / ||F|| above this means the point is not on the curve
ON_CURVE_TOL = 1e-8
# torsion points of different orders are matched with this relative distance
MATCH_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class FlexFrame:
    """Projective isomorphism between a cubic with marked flex and a Weierstrass curve.

    ``matrix`` maps Weierstrass coordinates (x : y : 1) of ``curve`` to
    coordinates of the original cubic; the point at infinity (0 : 1 : 0) goes
    to the flex.
    """

    cubic: TernaryForm
    flex: ProjectivePoint
    curve: WeierstrassCurve
    matrix: np.ndarray

    def to_plane(self, P: CurvePoint) -> ProjectivePoint:
        if P.is_infinity:
            return ProjectivePoint(tuple(self.matrix @ np.array([0, 1, 0], dtype=complex)))
        return ProjectivePoint(tuple(self.matrix @ np.array([P.x, P.y, 1], dtype=complex)))


def _tangent_frame(F: TernaryForm, p: np.ndarray) -> np.ndarray:
    """Columns (q, p, r): q on the tangent line at p, r off it, all well conditioned."""
    ell = F.gradient(p)
    # null space of v -> ell . v, Hermitian-orthonormal basis
    _, _, vh = np.linalg.svd(ell[None, :])
    null = vh[1:].conj()
    pn = p / np.linalg.norm(p)
    best, q = -1.0, None
    for n in null:
        cand = n - np.vdot(pn, n) * pn
        if np.linalg.norm(cand) > best:
            best, q = np.linalg.norm(cand), cand
    q = q / np.linalg.norm(q)
    r = ell.conj() / np.vdot(ell, ell).real
    return np.column_stack([q, pn, r])


def weierstrass_frame(F: TernaryForm, flex: ProjectivePoint, tol: TolerancePolicy = DEFAULT_TOL) -> FlexFrame:
    """Move the flex to (0:1:0) with tangent z = 0, complete the square, read off the branch points."""
    if F.degree != 3:
        raise ValueError("Weierstrass reduction needs a cubic")
    Fn = F.normalized()
    p = flex.as_array()
    p = p / np.linalg.norm(p)
    if abs(Fn(p)) > ON_CURVE_TOL:
        raise FlexNotOnCurve(f"{flex} is not on the cubic (|F| = {abs(Fn(p)):.2e})")
    M = _tangent_frame(Fn, p)
    G = Fn.transform(M)
    scale = G.norm
    # terms living on the tangent line z = 0: only x^3 survives at a flex
    if max(abs(G[(2, 1, 0)]), abs(G[(1, 2, 0)]), abs(G[(0, 3, 0)])) > ON_CURVE_TOL * scale:
        raise FlexNotOnCurve(f"{flex} is on the cubic but is not a flex")
    c = G[(3, 0, 0)]
    e = G[(0, 2, 1)]
    a1, a3 = G[(1, 1, 1)], G[(0, 1, 2)]
    g2, g4, g6 = G[(2, 0, 1)], G[(1, 0, 2)], G[(0, 0, 3)]
    # e*eta^2 = -(c x^3 + g2 x^2 + g4 x + g6) + (a1 x + a3)^2 / (4e), eta = y + (a1 x + a3)/(2e)
    kappa = -c / e
    cubic = np.array(
        [
            kappa,
            -g2 / e + a1 * a1 / (4 * e * e),
            -g4 / e + 2 * a1 * a3 / (4 * e * e),
            -g6 / e + a3 * a3 / (4 * e * e),
        ]
    )
    E = WeierstrassCurve(roots(cubic, tol))
    sk = cmath.sqrt(kappa)
    # (x, Y, 1) on Y^2 = prod(x - lam) -> (x, y, 1) on G -> M (x, y, 1) on F
    N = np.array(
        [
            [1, 0, 0],
            [-a1 / (2 * e), sk, -a3 / (2 * e)],
            [0, 0, 1],
        ],
        dtype=complex,
    )
    return FlexFrame(F, flex, E, M @ N)


def _frame_torsion(frame: FlexFrame, n: int, tol: TolerancePolicy) -> list[CurvePoint]:
    """All n-torsion points including the identity (n^2 of them)."""
    if n == 1:
        return [INFINITY]
    return [INFINITY] + torsion_points(frame.curve, n, tol)


def cubic_torsion(
    F: TernaryForm, k: int, flex: ProjectivePoint, tol: TolerancePolicy = DEFAULT_TOL
) -> list[ProjectivePoint]:
    """The 9k^2 points of 3k-torsion on a smooth cubic, origin at ``flex``.

    For k = 1 these are exactly the nine flexes.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    frame = weierstrass_frame(F, flex, tol)
    pts = [frame.to_plane(P) for P in _frame_torsion(frame, 3 * k, tol)]
    _check_on_curve(F, pts)
    if len(pts) != 9 * k * k:
        raise CardinalityMismatch(f"expected {9 * k * k} points, got {len(pts)}")
    return pts


def _check_on_curve(F: TernaryForm, pts: list[ProjectivePoint]) -> None:
    Fn = F.normalized()
    for P in pts:
        v = P.as_array()
        if abs(Fn(v / np.linalg.norm(v))) > ON_CURVE_TOL:
            raise CardinalityMismatch(f"torsion point {P} is off the cubic")


def _divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def torsion_stratum(
    F: TernaryForm, m: int, flex: ProjectivePoint, tol: TolerancePolicy = DEFAULT_TOL
) -> list[ProjectivePoint]:
    """3m-torsion points that are not 3d-torsion for any proper divisor d of m.

    Exactly 9 J_2(m) points; computed as a set difference in Weierstrass
    coordinates.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    frame = weierstrass_frame(F, flex, tol)
    full = _frame_torsion(frame, 3 * m, tol)
    lower: list[CurvePoint] = []
    for d in _divisors(m)[:-1]:
        lower.extend(_frame_torsion(frame, 3 * d, tol))
    keep = [P for P in full if not any(point_distance(P, Q) <= MATCH_TOL for Q in lower)]
    expected = 9 * jordan_totient(m)
    if len(keep) != expected:
        raise CardinalityMismatch(f"stratum m={m}: expected {expected} points, got {len(keep)}")
    pts = [frame.to_plane(P) for P in keep]
    _check_on_curve(F, pts)
    return pts
