"""Independent reference computations used to cross-check the main code paths.

Nothing here calls the routine it checks: discriminants come from root
products or closed forms, J_2 from counting, multisection sizes from
exhaustive subset enumeration.
"""

from __future__ import annotations

from itertools import combinations
from math import gcd

import numpy as np


def discriminant_from_roots(r) -> complex:
    r = np.asarray(r, dtype=complex)
    out = 1 + 0j
    for i in range(r.size):
        for j in range(i + 1, r.size):
            out *= (r[i] - r[j]) ** 2
    return complex(out)


def delta2(b: complex, c: complex) -> complex:
    return b * b - 4 * c


def delta3(b: complex, c: complex, d: complex) -> complex:
    return b * b * c * c - 4 * c**3 - 4 * b**3 * d - 27 * d * d + 18 * b * c * d


def jordan_totient_by_counting(m: int) -> int:
    """Number of elements of exact order m in (Z/m)^2."""
    return sum(1 for a in range(m) for b in range(m) if gcd(gcd(a, b), m) == 1)


def admissible_sizes_by_enumeration(bound: int) -> list[int]:
    """Sizes 9 * sum J_2(m) <= bound by enumerating every subset of candidate indices."""
    items = []
    m = 1
    while 9 * m * m / 2 <= bound + 9:
        j = jordan_totient_by_counting(m)
        if 9 * j <= bound:
            items.append((m, j))
        m += 1
    sums = set()
    for r in range(1, len(items) + 1):
        for subset in combinations(items, r):
            n = 9 * sum(j for _, j in subset)
            if n <= bound:
                sums.add(n)
    return sorted(sums)


def banerjee_chen_by_counting(bound: int) -> list[int]:
    vals = set()
    m = 4
    while 18 * m * m / 2 <= bound + 18:
        v = 18 * jordan_totient_by_counting(m)
        if v <= bound:
            vals.add(v)
        m += 1
    return sorted(vals)
