"""Exact integer arithmetic for torsion multisection sizes."""

from __future__ import annotations

from dataclasses import dataclass


def prime_factors(m: int) -> list[int]:
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def jordan_totient(m: int) -> int:
    """J_2(m) = m^2 prod_{p | m} (1 - p^-2), in exact integers."""
    if m < 1:
        raise ValueError("J_2 is defined for m >= 1")
    out = m * m
    for p in prime_factors(m):
        out = out // (p * p) * (p * p - 1)
    return out


@dataclass(frozen=True)
class MultisectionSize:
    n: int
    index_set: frozenset[int]

    def __post_init__(self):
        if not self.index_set or min(self.index_set) < 1:
            raise ValueError("the witness must be a nonempty set of positive integers")
        if self.n != 9 * sum(jordan_totient(m) for m in self.index_set):
            raise ValueError(f"witness {sorted(self.index_set)} does not produce {self.n}")

    def to_json(self) -> dict:
        return {"n": self.n, "witness": sorted(self.index_set)}


def _max_index(bound: int, factor: int) -> int:
    # J_2(m) >= m^2 * 6/pi^2 > m^2 / 2, so factor*J_2(m) <= bound forces m^2 < 2*bound/factor
    m = 1
    while m * m < 2 * bound / factor + 1:
        m += 1
    return m


def admissible_sizes(bound: int) -> list[MultisectionSize]:
    """Every n <= bound of the form 9 * sum_{m in I} J_2(m), I a finite set, with one witness each.

    0/1 subset-sum over the indices m with 9 J_2(m) <= bound; the witness kept
    for each sum is the first one found scanning m upwards.
    """
    if bound < 9:
        raise ValueError("bound must be >= 9")
    limit = bound // 9
    items = [m for m in range(1, _max_index(bound, 9) + 1) if jordan_totient(m) <= limit]
    witness: dict[int, frozenset[int]] = {0: frozenset()}
    for m in items:
        j = jordan_totient(m)
        for s in sorted(witness, reverse=True):
            t = s + j
            if t <= limit and t not in witness:
                witness[t] = witness[s] | {m}
    return [MultisectionSize(9 * s, witness[s]) for s in sorted(witness) if s > 0]


def banerjee_chen_sizes(bound: int) -> list[int]:
    """Sorted distinct values 18 J_2(m), m >= 4, not exceeding ``bound``."""
    if bound < 216:
        raise ValueError("bound must be >= 216")
    vals = {18 * jordan_totient(m) for m in range(4, _max_index(bound, 18) + 1)}
    return sorted(v for v in vals if v <= bound)
