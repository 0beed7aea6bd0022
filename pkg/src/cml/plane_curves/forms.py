"""Homogeneous ternary forms, projective points and Hessians."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..poly_core import complex_from_json, complex_to_json

Exponent = tuple[int, int, int]

# relative slack when choosing the "first maximal" coordinate of a point
_TIE_SLACK = 1e-9


def monomials(d: int) -> list[Exponent]:
    """All exponent triples of total degree d, in lexicographically decreasing order."""
    return [(i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1)]


@dataclass(frozen=True, eq=False)
class TernaryForm:
    """Homogeneous polynomial of degree ``degree`` in x, y, z.

    ``coefficients`` maps exponent triples to complex numbers; zero entries are
    dropped on construction.
    """

    degree: int
    coefficients: Mapping[Exponent, complex] = field(repr=False)

    def __post_init__(self):
        clean: dict[Exponent, complex] = {}
        for exp, c in self.coefficients.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != 3 or min(exp) < 0 or sum(exp) != self.degree:
                raise ValueError(f"exponent {exp} does not have total degree {self.degree}")
            c = complex(c)
            if not np.isfinite(c):
                raise ValueError("non-finite coefficient")
            if c != 0:
                clean[exp] = clean.get(exp, 0j) + c
        clean = {e: c for e, c in clean.items() if c != 0}
        if not clean:
            raise ValueError("the zero form does not define a curve")
        object.__setattr__(self, "coefficients", dict(sorted(clean.items(), reverse=True)))

    @classmethod
    def from_terms(cls, degree: int, terms: Iterable[tuple[Sequence[int], complex]]) -> "TernaryForm":
        acc: dict[Exponent, complex] = {}
        for exp, c in terms:
            exp = tuple(exp)
            acc[exp] = acc.get(exp, 0j) + c
        return cls(degree, acc)

    @classmethod
    def fermat(cls, d: int) -> "TernaryForm":
        return cls(d, {(d, 0, 0): 1, (0, d, 0): 1, (0, 0, d): 1})

    @classmethod
    def random(cls, rng: np.random.Generator, d: int) -> "TernaryForm":
        """Coefficients i.i.d. standard complex Gaussian (smooth with probability 1)."""
        ms = monomials(d)
        c = (rng.normal(size=len(ms)) + 1j * rng.normal(size=len(ms))) / np.sqrt(2)
        return cls(d, dict(zip(ms, c)))

    @cached_property
    def _exps(self) -> np.ndarray:
        return np.array(list(self.coefficients), dtype=int).reshape(-1, 3)

    @cached_property
    def _coefs(self) -> np.ndarray:
        return np.array(list(self.coefficients.values()), dtype=complex)

    def __getitem__(self, exp: Exponent) -> complex:
        return self.coefficients.get(tuple(exp), 0j)

    @property
    def norm(self) -> float:
        return float(np.max(np.abs(self._coefs)))

    def __call__(self, p) -> np.ndarray | complex:
        """Evaluate at one point (shape (3,)) or a stack of points (shape (..., 3))."""
        p = np.asarray(p, dtype=complex)
        vals = np.prod(p[..., None, :] ** self._exps, axis=-1) @ self._coefs
        return complex(vals) if vals.ndim == 0 else vals

    def partial(self, var: int) -> "TernaryForm | complex":
        """Formal partial derivative; a plain complex number once the degree hits 0."""
        if self.degree == 0:
            return 0j
        out: dict[Exponent, complex] = {}
        for exp, c in self.coefficients.items():
            if exp[var]:
                e = list(exp)
                e[var] -= 1
                out[tuple(e)] = c * exp[var]
        if not out:
            return 0j
        return TernaryForm(self.degree - 1, out)

    def gradient(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=complex)
        out = []
        for var in range(3):
            d = self.partial(var)
            if isinstance(d, TernaryForm):
                out.append(d(p))
            else:
                out.append(np.full(p.shape[:-1], complex(d)) if p.ndim > 1 else complex(d))
        return np.stack(out, axis=-1) if p.ndim > 1 else np.array(out, dtype=complex)

    def scaled(self, s: complex) -> "TernaryForm":
        return TernaryForm(self.degree, {e: s * c for e, c in self.coefficients.items()})

    def normalized(self) -> "TernaryForm":
        return self.scaled(1.0 / self.norm)

    def transform(self, M) -> "TernaryForm":
        """The form X -> F(M X) for a 3x3 matrix M."""
        M = np.asarray(M, dtype=complex)
        lin = [_Poly3.linear(M[i]) for i in range(3)]
        acc = _Poly3.zero()
        for exp, c in self.coefficients.items():
            term = _Poly3.const(c)
            for var in range(3):
                term = term * (lin[var] ** exp[var])
            acc = acc + term
        return acc.to_form(self.degree)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "terms": [{"exp": list(e), "c": complex_to_json(c)} for e, c in self.coefficients.items()],
        }

    @classmethod
    def from_json(cls, d: dict) -> "TernaryForm":
        return cls.from_terms(int(d["degree"]), ((t["exp"], complex_from_json(t["c"])) for t in d["terms"]))

    def __repr__(self) -> str:
        names = "xyz"
        parts = []
        for exp, c in self.coefficients.items():
            mono = "*".join(f"{names[i]}^{e}" if e > 1 else names[i] for i, e in enumerate(exp) if e)
            parts.append(f"({c:.4g})*{mono}" if mono else f"({c:.4g})")
        return f"TernaryForm(d={self.degree}: {' + '.join(parts)})"


class _Poly3:
    """Sparse polynomial in three variables used for form arithmetic."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Exponent, complex]):
        self.terms = terms

    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def const(cls, c: complex):
        return cls({(0, 0, 0): complex(c)})

    @classmethod
    def linear(cls, row):
        return cls({(1, 0, 0): row[0], (0, 1, 0): row[1], (0, 0, 1): row[2]})

    @classmethod
    def of(cls, F: "TernaryForm | complex"):
        if isinstance(F, TernaryForm):
            return cls(dict(F.coefficients))
        return cls.const(F)

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0j) + c
        return _Poly3(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s):
        return _Poly3({e: s * c for e, c in self.terms.items()})

    def __mul__(self, other):
        out: dict[Exponent, complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[e] = out.get(e, 0j) + c1 * c2
        return _Poly3(out)

    def __pow__(self, k: int):
        out = _Poly3.const(1)
        for _ in range(k):
            out = out * self
        return out

    def to_form(self, degree: int, rtol: float = 0.0) -> TernaryForm:
        if not self.terms:
            raise ValueError("form vanishes identically")
        big = max(abs(c) for c in self.terms.values())
        kept = {e: c for e, c in self.terms.items() if abs(c) > rtol * big}
        return TernaryForm(degree, kept)


def hessian(F: TernaryForm) -> TernaryForm:
    """Determinant of the matrix of second partials, a form of degree 3(d-2).

    Cancellation noise below 1e-14 of the largest coefficient is dropped.
    Raises ``ValueError`` if the Hessian vanishes identically.
    """
    if F.degree < 2:
        raise ValueError("Hessian needs degree >= 2")
    first = [F.partial(i) for i in range(3)]
    H = [[_Poly3.of(f.partial(j) if isinstance(f, TernaryForm) else 0j) for j in range(3)] for f in first]
    det = (
        H[0][0] * (H[1][1] * H[2][2] - H[1][2] * H[2][1])
        - H[0][1] * (H[1][0] * H[2][2] - H[1][2] * H[2][0])
        + H[0][2] * (H[1][0] * H[2][1] - H[1][1] * H[2][0])
    )
    det.terms = {e: c for e, c in det.terms.items() if c != 0}
    if not det.terms:
        raise ValueError("Hessian vanishes identically")
    big = max(abs(c) for c in det.terms.values())
    if big <= 1e-14 * F.norm ** 3:
        raise ValueError("Hessian vanishes identically")
    return det.to_form(3 * (F.degree - 2), rtol=1e-14)


def _first_max_index(v: np.ndarray, slack: float = _TIE_SLACK) -> int:
    mags = np.abs(v)
    return int(np.flatnonzero(mags >= (1 - slack) * mags.max())[0])


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """Point of P^2, scaled so that its first maximal-modulus coordinate is exactly 1."""

    coords: tuple[complex, complex, complex]

    def __post_init__(self):
        v = np.asarray(self.coords, dtype=complex)
        if v.shape != (3,) or not np.all(np.isfinite(v)) or not np.any(v):
            raise ValueError(f"invalid projective coordinates {self.coords!r}")
        i = _first_max_index(v)
        v = v / v[i]
        v[i] = 1.0
        object.__setattr__(self, "coords", tuple(complex(c) for c in v))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=complex)

    def distance(self, other: "ProjectivePoint") -> float:
        return projective_distance(self.as_array(), other.as_array())

    def close_to(self, other: "ProjectivePoint", tol: float = 1e-9) -> bool:
        return self.distance(other) <= tol

    def to_json(self) -> list:
        return [complex_to_json(c) for c in self.coords]

    @classmethod
    def from_json(cls, d) -> "ProjectivePoint":
        return cls(tuple(complex_from_json(c) for c in d))

    def __repr__(self) -> str:
        return "(" + " : ".join(f"{c:.6g}" for c in self.coords) + ")"


def _unit_rows(pts) -> np.ndarray:
    a = np.atleast_2d(np.asarray(pts, dtype=complex))
    return a / np.linalg.norm(a, axis=-1, keepdims=True)


def _chordal(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise min over phases of ||a_i - u b_j|| for unit rows a, b."""
    inner = a.conj() @ b.T  # <a_i, b_j>
    mag = np.abs(inner)
    u = np.where(mag > 0, inner / np.where(mag > 0, mag, 1), 1)
    diff = a[:, None, :] - u[:, :, None] * b[None, :, :]
    return np.linalg.norm(diff, axis=-1)


def projective_distance(p, q) -> float:
    """Chordal distance between the lines through p and q (phase-aligned unit vectors).

    Accurate down to rounding for nearby points, unlike the sine-of-angle formula.
    """
    return float(_chordal(_unit_rows(p), _unit_rows(q))[0, 0])


def pairwise_distances(A: Sequence[ProjectivePoint], B: Sequence[ProjectivePoint]) -> np.ndarray:
    return _chordal(_unit_rows([p.as_array() for p in A]), _unit_rows([p.as_array() for p in B]))


def hausdorff(A: Sequence[ProjectivePoint], B: Sequence[ProjectivePoint]) -> float:
    """Hausdorff distance between finite point sets under ``projective_distance``."""
    if not A and not B:
        return 0.0
    if not A or not B:
        return float("inf")
    d = _chordal(_unit_rows([p.as_array() for p in A]), _unit_rows([p.as_array() for p in B]))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
