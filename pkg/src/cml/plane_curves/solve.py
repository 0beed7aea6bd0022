"""Common zeros of two plane curves by chart-wise resultant elimination.

Each solve works in a seeded random unitary frame ``U`` (so that, generically,
no two solutions share a coordinate and leading coefficients do not vanish) and
in the three affine charts of that frame.  A solution is kept only by the chart
of its first maximal frame coordinate, where both affine coordinates have
modulus <= 1; this keeps every back-substitution well conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import IllConditioned, NonConvergence
from ..poly_core import DEFAULT_TOL, TolerancePolicy, roots, sylvester_matrix
from .forms import ProjectivePoint, TernaryForm, _chordal, _first_max_index, _unit_rows, hessian

FRAME_SEEDS = (20240531, 7, 1009, 65537)
CLUSTER_TOL = 1e-6
AMBIGUITY_FACTOR = 10.0
# chart prefilter on resultant roots before polishing
_CHART_SLACK = 1.5


@dataclass(frozen=True)
class FlexPoint:
    point: ProjectivePoint
    multiplicity: int

    def to_json(self) -> dict:
        return {"point": self.point.to_json(), "multiplicity": self.multiplicity}


def random_frame(seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _univariate_coeffs(F: TernaryForm, base: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Coefficients (highest first) of t -> F(base + t*direction) for a stack of bases.

    Sampled at roots of unity and interpolated by FFT; shape (..., d+1).
    """
    d = F.degree
    m = d + 1
    w = np.exp(2j * np.pi * np.arange(m) / m)
    pts = base[..., None, :] + w[:, None] * direction
    vals = F(pts)
    low_first = np.fft.fft(vals, axis=-1) / m
    return low_first[..., ::-1]


def _hadamard(S: np.ndarray) -> float:
    return float(np.prod(np.linalg.norm(S, axis=1)))


class _Chart:
    def __init__(self, U: np.ndarray, c: int):
        i, j = [k for k in range(3) if k != c]
        self.U, self.c, self.i, self.j = U, c, i, j
        self.origin = U[:, c]
        self.ds = U[:, i]
        self.dt = U[:, j]

    def point(self, s, t) -> np.ndarray:
        return self.origin + np.multiply.outer(s, self.ds) + np.multiply.outer(t, self.dt)

    def frame_coords(self, s: complex, t: complex) -> np.ndarray:
        v = np.zeros(3, dtype=complex)
        v[self.c], v[self.i], v[self.j] = 1, s, t
        return v


def _resultant_samples(F, G, chart: _Chart, n_nodes: int):
    s_nodes = np.exp(2j * np.pi * np.arange(n_nodes) / n_nodes)
    bases = chart.origin + s_nodes[:, None] * chart.ds
    fc = _univariate_coeffs(F, bases, chart.dt)
    gc = _univariate_coeffs(G, bases, chart.dt)
    vals = np.empty(n_nodes, dtype=complex)
    rel = np.empty(n_nodes)
    for k in range(n_nodes):
        S = sylvester_matrix(fc[k], gc[k])
        vals[k] = np.linalg.det(S)
        rel[k] = abs(vals[k]) / max(_hadamard(S), 1e-300)
    return vals, rel


def _newton2(F, G, chart: _Chart, s: complex, t: complex, steps: int = 40):
    def resid(s, t):
        p = chart.point(s, t)
        return np.array([F(p), G(p)])

    r = resid(s, t)
    for _ in range(steps):
        p = chart.point(s, t)
        gF, gG = F.gradient(p), G.gradient(p)
        J = np.array([[gF @ chart.ds, gF @ chart.dt], [gG @ chart.ds, gG @ chart.dt]])
        try:
            ds, dt = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            break
        if not (np.isfinite(ds) and np.isfinite(dt)):
            break
        r_new = resid(s + ds, t + dt)
        if np.linalg.norm(r_new) >= np.linalg.norm(r):
            break
        s, t, r = s + ds, t + dt, r_new
        if np.linalg.norm(r) == 0:
            break
    return s, t


class CommonComponent(Exception):
    """The two curves share a component (resultant vanishes identically)."""


def _solve_in_chart(F, G, chart: _Chart, tol: TolerancePolicy) -> list[np.ndarray]:
    n_nodes = F.degree * G.degree + 1
    vals, rel = _resultant_samples(F, G, chart, n_nodes)
    if rel.max() <= 1e-11:
        raise CommonComponent
    coef = (np.fft.fft(vals) / n_nodes)[::-1]  # highest first
    big = np.abs(coef).max()
    nz = np.flatnonzero(np.abs(coef) > 1e-13 * big)
    coef = coef[nz[0]:]
    if coef.size < 2:
        return []
    s_roots = roots(coef, tol).as_array()
    found = []
    for s0 in s_roots:
        if abs(s0) > _CHART_SLACK:
            continue
        fc = _univariate_coeffs(F, chart.origin + s0 * chart.ds, chart.dt)
        t_cands = roots(fc, tol).as_array()
        gvals = np.array([abs(G(chart.point(s0, t))) for t in t_cands])
        t0 = t_cands[int(np.argmin(gvals))]
        s1, t1 = _newton2(F, G, chart, s0, t0)
        v = chart.frame_coords(s1, t1)
        if _first_max_index(v, 1e-6) != chart.c:
            continue
        found.append(chart.point(s1, t1))
    return found


def _cluster(points: list[np.ndarray]) -> list[tuple[np.ndarray, int]]:
    if not points:
        return []
    unit = _unit_rows(points)
    d = _chordal(unit, unit)
    n = len(points)
    label = list(range(n))
    for a in range(n):
        for b in range(a + 1, n):
            if d[a, b] <= CLUSTER_TOL:
                la, lb = label[a], label[b]
                label = [la if x == lb else x for x in label]
    groups: dict[int, list[int]] = {}
    for a in range(n):
        groups.setdefault(label[a], []).append(a)
    reps = []
    for members in groups.values():
        reps.append((points[members[0]], len(members)))
    if len(reps) > 1:
        rep_d = _chordal(_unit_rows([r for r, _ in reps]), _unit_rows([r for r, _ in reps]))
        np.fill_diagonal(rep_d, np.inf)
        if rep_d.min() <= AMBIGUITY_FACTOR * CLUSTER_TOL:
            raise IllConditioned(f"solution clusters only {rep_d.min():.2e} apart")
    return reps


def common_zeros(
    F: TernaryForm, G: TernaryForm, tol: TolerancePolicy = DEFAULT_TOL, expect_total: bool = True
) -> list[tuple[np.ndarray, int]]:
    """Intersection points of two curves with intersection-cluster multiplicities.

    Returns ``(point, multiplicity)`` pairs whose multiplicities add up to
    ``deg F * deg G`` (Bezout).  Tries several frames; raises
    ``IllConditioned`` when none gives a consistent count.  Raises
    ``CommonComponent`` if the curves share a component.
    """
    Fn, Gn = F.normalized(), G.normalized()
    total = F.degree * G.degree
    last_err = None
    for seed in FRAME_SEEDS:
        U = random_frame(seed)
        try:
            pts: list[np.ndarray] = []
            for c in range(3):
                pts.extend(_solve_in_chart(Fn, Gn, _Chart(U, c), tol))
            clusters = _cluster(pts)
        except (NonConvergence, IllConditioned) as exc:
            last_err = exc
            continue
        if not expect_total or sum(m for _, m in clusters) == total:
            return clusters
        last_err = IllConditioned(
            f"found {sum(m for _, m in clusters)} intersections, expected {total}"
        )
    raise IllConditioned(str(last_err))


def _gradient_scale(F: TernaryForm) -> float:
    return F.degree * float(np.sum(np.abs(F._coefs)))


def is_smooth(F: TernaryForm, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """No common projective zero of the three partials.

    Two seeded random combinations of the partials are intersected; every
    intersection is tested against all three partials with relative threshold
    ``sqrt(distinct_tol)``.  A shared component means singular along a curve.
    """
    if F.degree < 2:
        raise ValueError("smoothness is checked for degree >= 2")
    rng = np.random.default_rng(FRAME_SEEDS[0])
    parts = [F.partial(i) for i in range(3)]
    if F.degree == 2:
        # partials are linear: smooth iff they are independent
        M = np.array([[p[(1, 0, 0)], p[(0, 1, 0)], p[(0, 0, 1)]] if isinstance(p, TernaryForm) else [0, 0, 0]
                      for p in parts])
        sv = np.linalg.svd(M, compute_uv=False)
        return bool(sv[-1] > np.sqrt(tol.distinct_tol) * sv[0])
    forms = [p if isinstance(p, TernaryForm) else None for p in parts]

    def combo():
        w = rng.normal(size=3) + 1j * rng.normal(size=3)
        acc: dict = {}
        for wi, f in zip(w, forms):
            if f is None:
                continue
            for e, c in f.coefficients.items():
                acc[e] = acc.get(e, 0j) + wi * c
        return TernaryForm(F.degree - 1, acc)

    try:
        G1, G2 = combo(), combo()
        cands = common_zeros(G1, G2, tol, expect_total=False)
    except CommonComponent:
        return False
    scale = _gradient_scale(F)
    thresh = np.sqrt(tol.distinct_tol) * scale
    for p, _ in cands:
        p = p / np.linalg.norm(p)
        if np.max(np.abs(F.gradient(p))) <= thresh:
            return False
    return True


def flex_points(F: TernaryForm, tol: TolerancePolicy = DEFAULT_TOL, check_smooth: bool = True) -> list[FlexPoint]:
    """Inflection points of a smooth curve: F = Hess(F) = 0, with multiplicities.

    Multiplicities add up to 3d(d-2).  Conics have none.
    """
    if F.degree < 2:
        raise ValueError("flexes need degree >= 2")
    if check_smooth and not is_smooth(F, tol):
        raise ValueError("flex_points expects a smooth curve")
    H = hessian(F)
    if H.degree == 0:
        return []
    clusters = common_zeros(F, H, tol)
    out = [FlexPoint(ProjectivePoint(tuple(p)), m) for p, m in clusters]
    out.sort(key=lambda fp: tuple((c.real, c.imag) for c in fp.point.coords))
    return out
