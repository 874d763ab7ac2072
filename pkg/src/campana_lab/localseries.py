"""Truncated local transform series in the variable x = q^(-s).

Characters are modelled by free unit-modulus values, one per place
above p, constrained only where the theory forces it (their product is
1 at totally split unramified places for characters trivial on the
maximal compact).  All identities checked here are polynomial in these
values, so seeded random draws give high-confidence verification.

Places of residue degree f are identified with the left cosets of a
fixed order-f subgroup; Galois twisting permutes the cosets, which at
totally split places is just the regular action.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidCombination, RamifiedUnsupported
from .groups import GroupTable
from .orbits import b_exponent, reduced_classes, weighted_monomial_count

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class SplitType:
    """Unramified decomposition shape: g orbits of equal size f (f*g = d)."""

    d: int
    orbit_sizes: tuple[int, ...]
    ramified: bool = False

    def __post_init__(self):
        sizes = tuple(self.orbit_sizes)
        if self.ramified:
            if sizes != (self.d,):
                raise ValueError("ramified split types carry a single orbit")
            return
        if not sizes or len(set(sizes)) != 1:
            raise ValueError(f"orbit sizes must be equal, got {sizes}")
        if sizes[0] * len(sizes) != self.d:
            raise ValueError(f"orbit sizes {sizes} do not partition d = {self.d}")

    @property
    def f(self) -> int:
        return self.orbit_sizes[0]

    @property
    def g(self) -> int:
        return len(self.orbit_sizes)

    @property
    def totally_split(self) -> bool:
        return not self.ramified and self.f == 1

    @staticmethod
    def split(d: int) -> "SplitType":
        return SplitType(d, tuple([1] * d))

    @staticmethod
    def inert(d: int) -> "SplitType":
        return SplitType(d, (d,))

    @staticmethod
    def with_degree(d: int, f: int) -> "SplitType":
        if d % f != 0:
            raise ValueError(f"f = {f} does not divide d = {d}")
        return SplitType(d, tuple([f] * (d // f)))


@dataclass(frozen=True)
class CharacterValues:
    """One unit-modulus value per place above p."""

    z: tuple[complex, ...]

    def __post_init__(self):
        for v in self.z:
            if abs(abs(v) - 1.0) > UNIT_TOL:
                raise ValueError(f"character value {v} is not unit modulus")

    @staticmethod
    def trivial(g: int) -> "CharacterValues":
        return CharacterValues(tuple([complex(1.0)] * g))

    def product(self) -> complex:
        out = complex(1.0)
        for v in self.z:
            out *= v
        return out


def draw_character_values(
    st: SplitType, rng, constrained: bool = True
) -> CharacterValues:
    """Seeded random draw of unit-modulus place values.

    Characters trivial on the maximal compact have product one over the
    places above an unramified prime (so a single place carries the
    value 1); ``constrained=False`` drops that relation for stress tests
    where the identity is insensitive to it.
    """
    g = st.g
    if constrained:
        angles = [rng.uniform(0.0, 2.0 * math.pi) for _ in range(g - 1)]
        angles.append(-sum(angles))
    else:
        angles = [rng.uniform(0.0, 2.0 * math.pi) for _ in range(g)]
    return CharacterValues(tuple(cmath.exp(1j * a) for a in angles))


@dataclass(frozen=True)
class LocalSeries:
    """Coefficients of a series in x = q^(-s); index n is the x^n term."""

    coeffs: tuple[complex, ...]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int) -> complex:
        return self.coeffs[n]

    def evaluate(self, x: float) -> complex:
        acc = complex(0.0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def max_abs(self, lo: int, hi: int) -> float:
        return max(abs(self.coeffs[n]) for n in range(lo, hi + 1))


def _check_compatible(st: SplitType, cv: CharacterValues) -> None:
    if len(cv.z) != st.g:
        raise ValueError(
            f"need {st.g} character values for this split type, got {len(cv.z)}"
        )


def c_coefficients(st: SplitType, cv: CharacterValues, N: int) -> LocalSeries:
    """Coefficients of the local L-factor of the character itself.

    c_n sums the weighted monomials of degree n in the place values,
    with every place weighted by the common residue degree.
    """
    _check_compatible(st, cv)
    if st.ramified:
        raise RamifiedUnsupported("no local transform model at ramified places")
    u = tuple([st.f] * st.g)
    coeffs = [
        weighted_monomial_count(st.g, n, u, cv.z) for n in range(N + 1)
    ]
    return LocalSeries(tuple(coeffs))


def weak_local_transform(
    st: SplitType, cv: CharacterValues, m: int, N: int
) -> LocalSeries:
    """Transform of the aggregate-multiplicity indicator against the character.

    The constant term is 1, the band 1..m-1 vanishes by the indicator,
    and from degree m on the coefficients are c_n - c_{n-d}.
    """
    if st.ramified:
        raise RamifiedUnsupported("no local transform model at ramified places")
    _check_compatible(st, cv)
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    c = c_coefficients(st, cv, N)
    d = st.d
    coeffs = [complex(1.0)]
    for n in range(1, N + 1):
        if n < m:
            coeffs.append(complex(0.0))
        else:
            prev = c[n - d] if n >= d else complex(0.0)
            coeffs.append(c[n] - prev)
    _assert_growth(coeffs, 2.0, d)
    return LocalSeries(tuple(coeffs))


def _assert_growth(coeffs: Sequence[complex], scale: float, base: float) -> None:
    # |coeff_n| <= scale * base^n, compared in log space to dodge overflow
    for n, cn in enumerate(coeffs):
        a = abs(cn)
        if a <= scale + 1e-9:
            continue
        assert math.log(a - 1e-9) <= math.log(scale) + n * math.log(base), (n, cn)


def _coset_action(G: GroupTable, f: int):
    """Left cosets of the first order-f cyclic subgroup, with the G-action.

    Returns (number of cosets, action) where action(g, i) is the index
    of g * (coset i).  Totally split (f = 1) reduces to the regular
    action; inert (f = d) has a single coset fixed by everything.
    """
    d = G.order
    gen = next((h for h in range(d) if G.element_order(h) == f), None)
    if gen is None:
        raise InvalidCombination(
            f"group {G} has no element of order {f}; split type incompatible"
        )
    sub = [G.identity]
    cur = gen
    while cur != G.identity:
        sub.append(cur)
        cur = G.cayley[cur][gen]
    cosets: list[tuple[int, ...]] = []
    index: dict[tuple[int, ...], int] = {}
    for g in range(d):
        key = tuple(sorted(G.cayley[g][h] for h in sub))
        if key not in index:
            index[key] = len(cosets)
            cosets.append(key)

    def action(g: int, i: int) -> int:
        key = tuple(sorted(G.cayley[g][h] for h in cosets[i]))
        return index[key]

    return len(cosets), action


def regularization_coefficients(
    G: GroupTable, st: SplitType, cv: CharacterValues, m: int, N: int
) -> LocalSeries:
    """Expansion of the product of local L-factors over the reduced classes.

    Each class contributes, per place, a geometric factor whose ratio is
    the product of the place values twisted through the class members;
    the support therefore lies on multiples of f*m.
    """
    d = G.order
    if st.d != d:
        raise ValueError(f"split type degree {st.d} does not match group order {d}")
    if st.ramified:
        raise RamifiedUnsupported("no local transform model at ramified places")
    _check_compatible(st, cv)
    if math.gcd(d, m) != 1 and not _is_prime(d):
        raise InvalidCombination(
            f"regularization undefined for composite d = {d} with gcd(d, m) > 1"
        )
    ncosets, action = _coset_action(G, st.f)
    assert ncosets == st.g
    classes = reduced_classes(G, m)
    step = st.f * m
    coeffs = [complex(0.0)] * (N + 1)
    coeffs[0] = complex(1.0)
    for cls in classes:
        for w in range(ncosets):
            ratio = complex(1.0)
            for gj in cls.representative:
                ratio *= cv.z[action(gj, w)]
            # multiply the running series by (1 - ratio x^step)^(-1)
            for n in range(step, N + 1):
                coeffs[n] += ratio * coeffs[n - step]
    _assert_growth(coeffs, 1.0, b_exponent(d, m) * d)
    return LocalSeries(tuple(coeffs))


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, int(math.isqrt(n)) + 1))


def division_recursion(a: LocalSeries, b: LocalSeries, m: int) -> LocalSeries:
    """Quotient series via d_n = a_n - sum b_{mr} d_{n-mr}.

    The divisor must be unit-normalised and supported on multiples of m.
    """
    if abs(a[0] - 1.0) > UNIT_TOL:
        raise ValueError("dividend must have constant term 1")
    if abs(b[0] - 1.0) > UNIT_TOL:
        raise ValueError("divisor must have constant term 1")
    for n in range(1, len(b)):
        if n % m != 0 and abs(b[n]) > UNIT_TOL:
            raise ValueError(f"divisor has off-grid coefficient at degree {n}")
    N = len(a) - 1
    out = [complex(0.0)] * (N + 1)
    for n in range(N + 1):
        acc = a[n]
        r = 1
        while m * r <= n:
            if m * r < len(b):
                acc -= b[m * r] * out[n - m * r]
            r += 1
        out[n] = acc
    return LocalSeries(tuple(out))


@dataclass(frozen=True)
class VanishingReport:
    max_abs: float
    series: LocalSeries
    m: int

    @property
    def holds(self) -> bool:
        return self.max_abs < 1e-9


def vanishing_check(
    G: GroupTable, st: SplitType, cv: CharacterValues, m: int, N: int | None = None
) -> VanishingReport:
    """Quotient coefficients in degrees 1..m must vanish.

    Requires the product-one constraint on totally split character
    values; the quotient coefficients are additionally checked against
    their exponential growth bound.
    """
    if st.totally_split and abs(cv.product() - 1.0) > 1e-9:
        raise ValueError("totally split character values must have product 1")
    if N is None:
        N = m
    N = max(N, m)
    a = weak_local_transform(st, cv, m, N)
    b = regularization_coefficients(G, st, cv, m, N)
    dd = division_recursion(a, b, m)
    _assert_growth(dd.coeffs, 1.0, 2.0 * b_exponent(G.order, m) * G.order)
    return VanishingReport(max_abs=dd.max_abs(1, m), series=dd, m=m)


def campana_lattice_coefficients(
    st: SplitType, cv: CharacterValues, m: int, r_max: int
) -> LocalSeries:
    """Character sums over admissible minimal cocharacter vectors.

    gamma_r sums the twisted values over vectors (alpha_w) >= 0 with
    minimum 0 and height exponent sum f*alpha_w = r, where each nonzero
    alpha_w clears the multiplicity threshold f*alpha_w >= m.
    """
    if st.ramified:
        raise RamifiedUnsupported("no local transform model at ramified places")
    _check_compatible(st, cv)
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    f, g = st.f, st.g
    lo = (m + f - 1) // f  # smallest admissible nonzero alpha
    out = [complex(0.0)] * (r_max + 1)

    def count(r: int) -> complex:
        total = complex(0.0)

        def rec(w: int, remaining: int, value: complex, any_zero: bool):
            nonlocal total
            if w == g:
                if remaining == 0 and any_zero:
                    total += value
                return
            rec(w + 1, remaining, value, True)
            alpha = lo
            while f * alpha <= remaining:
                rec(w + 1, remaining - f * alpha,
                    value * cv.z[w] ** (f * alpha), any_zero)
                alpha += 1

        rec(0, r, complex(1.0), False)
        return total

    for r in range(r_max + 1):
        out[r] = count(r)
    return LocalSeries(tuple(out))


@dataclass(frozen=True)
class CampanaLocalReport:
    gamma: LocalSeries
    gamma_m: complex
    expected_gamma_m: complex
    quotient_max_abs: float
    m: int

    @property
    def holds(self) -> bool:
        return (
            self.gamma.max_abs(1, self.m - 1) < 1e-9
            and abs(self.gamma_m - self.expected_gamma_m) < 1e-9
            and self.quotient_max_abs < 1e-9
        )


def campana_leading_check(
    st: SplitType, cv: CharacterValues, m: int
) -> CampanaLocalReport:
    """Leading lattice coefficient and regularity of the quotient.

    gamma_m must equal the sum of m-th powers over places whose degree
    divides m (an empty sum when there is a single place, which admits
    no admissible vector), and the quotient by the local factor of the
    m-th power character must vanish in degrees 1..m.
    """
    if st.ramified:
        raise RamifiedUnsupported("no local transform model at ramified places")
    _check_compatible(st, cv)
    f, g = st.f, st.g
    if g >= 2 and f > 1 and m % f == 0:
        raise InvalidCombination(
            f"split type f = {f} with f | m = {m} falls outside the counting "
            "hypotheses"
        )
    gamma = campana_lattice_coefficients(st, cv, m, m)
    if g >= 2 and m % f == 0:
        expected = sum(z ** m for z in cv.z)
    else:
        expected = complex(0.0)
    # local factor of the m-th power character at argument m*s
    N = m
    lser = [complex(0.0)] * (N + 1)
    lser[0] = complex(1.0)
    step = f * m
    for z in cv.z:
        ratio = z**m
        for n in range(step, N + 1):
            lser[n] += ratio * lser[n - step]
    quotient = division_recursion(gamma, LocalSeries(tuple(lser)), m)
    return CampanaLocalReport(
        gamma=gamma,
        gamma_m=gamma[m],
        expected_gamma_m=expected,
        quotient_max_abs=quotient.max_abs(1, m),
        m=m,
    )


def untruncated_transform(st: SplitType, cv: CharacterValues, N: int) -> LocalSeries:
    """Transform with no indicator: 1 + sum (c_n - c_{n-d}) x^n for n >= 1."""
    if st.ramified:
        raise RamifiedUnsupported("no local transform model at ramified places")
    c = c_coefficients(st, cv, N)
    d = st.d
    coeffs = [complex(1.0)]
    for n in range(1, N + 1):
        prev = c[n - d] if n >= d else complex(0.0)
        coeffs.append(c[n] - prev)
    return LocalSeries(tuple(coeffs))
