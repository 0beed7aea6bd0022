"""Maps between spaces of square-free polynomials.

* ``resolve_quartic``: Ferrari's resolvent Poly_4 -> Poly_3 via the root formulas
  b1 = (a1-a2-a3+a4)^2/4, b2 = (a1-a2+a3-a4)^2/4, b3 = (a1+a2-a3-a4)^2/4.
* ``resolvent_d``: the resolvent twisted by a power of the discriminant.
* ``phi_disjoin``: append the point sum|z_i| + 1.
* ``psi_torsion``: nonzero k-torsion of y^2 = prod(x - lambda_i), realised in C
  through x + tau*y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotDistinct, NotSquareFree, ProjectionCollision
from .plane_curves.elliptic import WeierstrassCurve, torsion_points
from .poly_core import (
    DEFAULT_TOL,
    Configuration,
    MonicPolynomial,
    TolerancePolicy,
    complex_from_json,
    complex_to_json,
    discriminant,
    from_roots,
    is_square_free,
    roots,
)


@dataclass(frozen=True)
class ResolventResult:
    output: MonicPolynomial
    b_values: Configuration
    input_discriminant: complex
    input_roots: Configuration

    def to_json(self) -> dict:
        d = self.output.to_json()
        d["b_values"] = self.b_values.to_json()
        d["input_discriminant"] = complex_to_json(self.input_discriminant)
        d["input_roots"] = self.input_roots.to_json()
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ResolventResult":
        return cls(
            MonicPolynomial.from_json(d),
            Configuration.from_json(d["b_values"]),
            complex_from_json(d["input_discriminant"]),
            Configuration.from_json(d["input_roots"]),
        )


@dataclass(frozen=True)
class TorsionMapSpec:
    k: int
    projection_tau: complex = 1.0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")


def resolvent_roots(a1: complex, a2: complex, a3: complex, a4: complex) -> tuple[complex, complex, complex]:
    return (
        (a1 - a2 - a3 + a4) ** 2 / 4,
        (a1 - a2 + a3 - a4) ** 2 / 4,
        (a1 + a2 - a3 - a4) ** 2 / 4,
    )


def difference_identities(a, b) -> list[float]:
    """Relative residuals of b1-b2 = (a4-a3)(a1-a2), b1-b3 = (a1-a3)(a4-a2), b2-b3 = (a1-a4)(a3-a2).

    Each right-hand side is a product of root differences, so distinct a's force
    distinct b's.
    """
    a1, a2, a3, a4 = a
    b1, b2, b3 = b
    pairs = [
        (b1 - b2, (a4 - a3) * (a1 - a2)),
        (b1 - b3, (a1 - a3) * (a4 - a2)),
        (b2 - b3, (a1 - a4) * (a3 - a2)),
    ]
    return [abs(lhs - rhs) / max(abs(rhs), 1e-300) for lhs, rhs in pairs]


def _require_square_free(f: MonicPolynomial, tol: TolerancePolicy):
    check = is_square_free(f, tol)
    if not check:
        raise NotSquareFree(f"{f} has a repeated root (|disc| = {check.margin:.3e})")
    return check


def resolve_quartic(f: MonicPolynomial, tol: TolerancePolicy = DEFAULT_TOL) -> ResolventResult:
    if f.degree != 4:
        raise ValueError("resolve_quartic needs a quartic")
    _require_square_free(f, tol)
    a = roots(f, tol).canonical()
    b = resolvent_roots(*a)
    return ResolventResult(
        output=from_roots(b),
        b_values=Configuration(b),
        input_discriminant=discriminant(f),
        input_roots=Configuration(a, ordered=True),
    )


def resolvent_d(f: MonicPolynomial, d: int, tol: TolerancePolicy = DEFAULT_TOL) -> MonicPolynomial:
    """Resolvent with its root configuration scaled by disc(f)^d.

    Scaling roots by s is the quasi-homogeneous coefficient scaling a_k -> s^k a_k,
    which keeps the output square-free.
    """
    if d < 0:
        raise ValueError("d must be nonnegative")
    res = resolve_quartic(f, tol)
    if d == 0:
        return res.output
    s = res.input_discriminant ** d
    return from_roots(s * b for b in res.b_values.points)


def phi_disjoin(c: Configuration) -> Configuration:
    if len(c) < 1:
        raise ValueError("need at least one point")
    if not c.separation > 0:
        raise NotDistinct("phi_disjoin needs distinct points")
    new = sum(abs(z) for z in c.points) + 1.0
    return Configuration(c.points + (complex(new),), ordered=c.ordered)


def psi_torsion(
    lam: Configuration, spec: TorsionMapSpec, tol: TolerancePolicy = DEFAULT_TOL
) -> Configuration:
    """Nonzero k-torsion points of y^2 = (x-l1)(x-l2)(x-l3), each sent to x + tau*y."""
    if len(lam) != 3:
        raise ValueError("psi_torsion takes three points")
    if not lam.is_distinct(tol):
        raise NotDistinct(f"{lam} is degenerate")
    E = WeierstrassCurve(Configuration(lam.points))
    pts = torsion_points(E, spec.k, tol)
    tau = complex(spec.projection_tau)
    out = Configuration(tuple(P.x + tau * P.y for P in pts))
    if len(out) > 1 and not out.is_distinct(tol):
        raise ProjectionCollision(
            f"tau={tau}: two torsion points project within {out.separation:.2e}; choose another tau"
        )
    return out


def disjoint_from(c: Configuration, other: Configuration, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True when no point of ``c`` coincides with a point of ``other`` (relative distinct_tol)."""
    a, b = c.as_array(), other.as_array()
    scale = max(c.scale, other.scale)
    return bool(np.min(np.abs(a[:, None] - b[None, :])) > tol.distinct_tol * scale)
