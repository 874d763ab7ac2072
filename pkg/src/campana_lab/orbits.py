"""Orbit combinatorics of m-multisets under right translation.

S(G, m) is the set of orbits of m-multisets of group elements under
simultaneous right multiplication, S'(G, m) the sub-collection whose
representatives use at most d-1 distinct elements.  |S'(G, m)| is the
exponent b(d, m) that governs the logarithm power in the weak point
count, and the classes index the local L-factors of the regularisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

from .errors import InvalidCombination
from .groups import GroupTable, right_translate


@dataclass(frozen=True)
class OrbitClass:
    """One orbit of m-multisets; the representative is the lex-least member."""

    representative: tuple[int, ...]
    orbit_size: int
    distinct_support: int

    @property
    def m(self) -> int:
        return len(self.representative)


@dataclass(frozen=True)
class MonomialSum:
    """Homogeneous integer polynomial stored as exponent-vector -> coefficient.

    Zero coefficients are never stored, so equality of the mapping is
    equality of polynomials.
    """

    degree: int
    num_vars: int
    coefficients: tuple[tuple[tuple[int, ...], int], ...]

    @staticmethod
    def from_dict(degree: int, num_vars: int, coeffs: dict) -> "MonomialSum":
        items = tuple(sorted((k, v) for k, v in coeffs.items() if v != 0))
        return MonomialSum(degree, num_vars, items)

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.coefficients)

    def total_mass(self) -> int:
        return sum(v for _, v in self.coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for expo, c in self.coefficients:
            mono = "*".join(
                f"x{i}" if e == 1 else f"x{i}^{e}"
                for i, e in enumerate(expo)
                if e
            )
            parts.append(f"{c}" if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(parts)


def orbit_classes(G: GroupTable, m: int) -> list[OrbitClass]:
    """All classes of S(G, m), lex order of representatives.

    Multisets are generated explicitly and walked orbit by orbit, so the
    list doubles as an independent check on the closed-form counts.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    d = G.order
    seen: set[tuple[int, ...]] = set()
    classes = []
    for ms in combinations_with_replacement(range(d), m):
        if ms in seen:
            continue
        orbit = {right_translate(G, ms, g) for g in range(d)}
        seen.update(orbit)
        # lex iteration order makes ms the minimal member of a fresh orbit
        classes.append(
            OrbitClass(
                representative=ms,
                orbit_size=len(orbit),
                distinct_support=len(set(ms)),
            )
        )
    return classes


def reduced_classes(G: GroupTable, m: int) -> list[OrbitClass]:
    """S'(G, m): the classes whose support has at most d-1 distinct elements."""
    return [c for c in orbit_classes(G, m) if c.distinct_support <= G.order - 1]


def b_exponent(d: int, m: int) -> int:
    """(1/d)(C(d+m-1, d-1) - C(m-1, d-1)), the log-power exponent.

    The value is an orbit count (hence integral) exactly under the
    counting hypotheses; a non-integral quotient means the (d, m) pair
    is outside them and is refused.
    """
    if d < 2 or m < 2:
        raise ValueError(f"need d >= 2 and m >= 2, got ({d}, {m})")
    num = math.comb(d + m - 1, d - 1) - math.comb(m - 1, d - 1)
    if num % d != 0:
        raise InvalidCombination(
            f"b({d}, {m}) = {num}/{d} is not an integer; requires gcd(d, m) = 1 "
            "or d prime"
        )
    return num // d


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in range(2, int(math.isqrt(n)) + 1):
        if n % p == 0:
            return False
    return True


def count_s_gm(d: int, m: int) -> int:
    """Closed-form |S(G, m)| for gcd(d, m) = 1 or d prime."""
    if d < 1 or m < 1:
        raise ValueError(f"need d, m >= 1, got ({d}, {m})")
    total = math.comb(d + m - 1, d - 1)
    if math.gcd(d, m) == 1:
        assert total % d == 0
        return total // d
    if _is_prime(d):
        # d | m: the constant class {g^0 .. g^{d-1}} repeated m/d times is fixed
        assert (total - 1) % d == 0
        return (total - 1) // d + 1
    raise InvalidCombination(
        f"|S(G, m)| has no closed form for composite d = {d} with gcd(d, m) > 1"
    )


def phi_polynomial(G: GroupTable, cls: OrbitClass) -> MonomialSum:
    """Sum over base points i of the monomial x_{g_1(i)} ... x_{g_m(i)}.

    Well defined on the class: any orbit member yields the same polynomial.
    """
    d = G.order
    coeffs: dict[tuple[int, ...], int] = {}
    for i in range(d):
        expo = [0] * d
        for g in cls.representative:
            expo[G.cayley[g][i]] += 1
        key = tuple(expo)
        coeffs[key] = coeffs.get(key, 0) + 1
    return MonomialSum.from_dict(len(cls.representative), d, coeffs)


def full_monomial_sum(d: int, m: int) -> MonomialSum:
    """All degree-m monomials in d variables, each with coefficient 1."""
    coeffs: dict[tuple[int, ...], int] = {}
    for combo in combinations_with_replacement(range(d), m):
        expo = [0] * d
        for i in combo:
            expo[i] += 1
        coeffs[tuple(expo)] = 1
    return MonomialSum.from_dict(m, d, coeffs)


@dataclass(frozen=True)
class PartitionReport:
    holds: bool
    defect: MonomialSum


def partition_identity_check(G: GroupTable, m: int) -> PartitionReport:
    """Compare the sum of phi over S(G, m) with the full monomial sum.

    For d prime with d | m the right-hand side gains the correction term
    (d-1) * (x_0 ... x_{d-1})^(m/d).  The defect polynomial is empty
    exactly when the identity holds.
    """
    d = G.order
    if math.gcd(d, m) != 1 and not _is_prime(d):
        raise InvalidCombination(
            f"partition identity undefined for composite d = {d} with gcd(d, m) > 1"
        )
    lhs: dict[tuple[int, ...], int] = {}
    for cls in orbit_classes(G, m):
        for expo, c in phi_polynomial(G, cls).coefficients:
            lhs[expo] = lhs.get(expo, 0) + c
    rhs = full_monomial_sum(d, m).as_dict()
    if math.gcd(d, m) != 1:
        k = m // d
        diag = tuple([k] * d)
        rhs[diag] = rhs.get(diag, 0) + (d - 1)
    defect: dict[tuple[int, ...], int] = dict(lhs)
    for expo, c in rhs.items():
        defect[expo] = defect.get(expo, 0) - c
    report = MonomialSum.from_dict(m, d, defect)
    return PartitionReport(holds=report.is_zero(), defect=report)


def weighted_monomial_count(
    r: int, n: int, u: Sequence[int], values: Sequence[complex]
) -> complex:
    """Sum of values_1^a_1 ... values_r^a_r over a >= 0 with sum u_i a_i = n."""
    if len(u) != r or len(values) != r:
        raise ValueError("u and values must both have length r")
    if any(w < 1 for w in u):
        raise ValueError("weights must be >= 1")
    if n < 0:
        return 0.0
    # one-dimensional DP over the target degree
    acc = [complex(0)] * (n + 1)
    acc[0] = complex(1)
    for w, z in zip(u, values):
        nxt = [complex(0)] * (n + 1)
        for k in range(n + 1):
            if acc[k] == 0:
                continue
            zp = complex(1)
            j = k
            while j <= n:
                nxt[j] += acc[k] * zp
                zp *= z
                j += w
        acc = nxt
    return acc[n]


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict[tuple[int, ...], int] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, 0) + ca * cb
    return {k: v for k, v in out.items() if v != 0}


def fan_identity_check(orbit_sizes: Sequence[int]) -> bool:
    """Check the fan polynomial identity for one orbit decomposition.

    The sum of R terms over invariant cones (generated by unions of at
    most l-1 orbits), cleared of denominators by multiplying through by
    the product of (1 - u_i^{d_i}), must equal 1 - u_1^{d_1}...u_l^{d_l}.
    Exact integer polynomial arithmetic throughout.
    """
    sizes = list(orbit_sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("orbit sizes must be positive")
    l = len(sizes)

    def unit(i: int) -> dict:
        # the monomial u_i^{d_i}
        e = [0] * l
        e[i] = sizes[i]
        return {tuple(e): 1}

    one = {tuple([0] * l): 1}
    lhs: dict[tuple[int, ...], int] = {}
    for mask in range(1 << l):
        members = [i for i in range(l) if mask >> i & 1]
        if len(members) >= l:
            continue
        term = dict(one)
        for i in range(l):
            if i in set(members):
                term = _poly_mul(term, unit(i))
            else:
                factor = {tuple([0] * l): 1}
                for e, c in unit(i).items():
                    factor[e] = factor.get(e, 0) - c
                term = _poly_mul(term, factor)
        for e, c in term.items():
            lhs[e] = lhs.get(e, 0) + c
    lhs = {k: v for k, v in lhs.items() if v != 0}

    rhs = dict(one)
    top = dict(one)
    for i in range(l):
        top = _poly_mul(top, unit(i))
    for e, c in top.items():
        rhs[e] = rhs.get(e, 0) - c
    rhs = {k: v for k, v in rhs.items() if v != 0}
    return lhs == rhs


def all_partitions(n: int, largest: int | None = None) -> Iterable[list[int]]:
    """Partitions of n in weakly decreasing order."""
    if n == 0:
        yield []
        return
    if largest is None:
        largest = n
    for first in range(min(n, largest), 0, -1):
        for rest in all_partitions(n - first, first):
            yield [first] + rest
