"""Galois number fields over Q with a chosen basis.

A FieldSpec fixes a monic integer minimal polynomial for a primitive
element, a rational basis written as polynomials in that element, and a
single Galois generator (so the supported Galois groups are cyclic,
which covers every field the counting experiments use).  From these the
module derives exact structure constants, the norm form, prime
splitting data and per-factor valuation vectors of integer points.

Valuations at split primes go through Hensel-lifted factors of the
minimal polynomial and Sylvester resultants evaluated as exact integer
determinants, so no modular division ever happens in a non-domain.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .arith import factorize, is_prime
from .errors import (
    BadPrimeForMinPoly,
    NotABasis,
    NotGalois,
    NotIrreducible,
    UnknownName,
    UnsupportedPrime,
    ZeroVector,
)

Poly = tuple[Fraction, ...]  # coefficients, low degree first


# ---------------------------------------------------------------------------
# exact polynomial arithmetic over Q
# ---------------------------------------------------------------------------

def _trim(p: Sequence[Fraction]) -> Poly:
    i = len(p)
    while i > 0 and p[i - 1] == 0:
        i -= 1
    return tuple(p[:i])


def _padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _trim([
        (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
    ])


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return _trim(out)


def _pmod(a: Poly, mod: Poly) -> Poly:
    # mod must be monic
    a = list(a)
    d = len(mod) - 1
    while len(a) > d:
        c = a[-1]
        if c:
            for i in range(d):
                a[len(a) - 1 - d + i] -= c * mod[i]
        a.pop()
    return _trim(a)


def _pcompose_mod(outer: Poly, inner: Poly, mod: Poly) -> Poly:
    # outer(inner) reduced mod, by Horner
    acc: Poly = ()
    for c in reversed(outer):
        acc = _pmod(_padd(_pmul(acc, inner), (c,)), mod)
    return acc


def _peval_frac(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _pderiv(p: Sequence) -> list:
    return [i * p[i] for i in range(1, len(p))]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float) and x.is_integer():
        return Fraction(int(x))
    raise ValueError(f"cannot interpret {x!r} as an exact rational")


# ---------------------------------------------------------------------------
# exact linear algebra over Q (d <= 12, plain Gaussian elimination)
# ---------------------------------------------------------------------------

def _mat_inverse(m: list[list[Fraction]]) -> list[list[Fraction]] | None:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _int_det_bareiss(m: list[list[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free Bareiss)."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StructureConstants:
    """Exact multiplication, Galois and unit tables in the chosen basis."""

    mult: tuple  # mult[i][j][k] = coefficient of w_k in w_i * w_j
    galois: tuple  # galois[g][i][k] = coefficient of w_k in sigma^g(w_i)
    one: tuple  # 1 = sum one[k] * w_k
    bad_primes: frozenset[int]

    def is_integral(self) -> bool:
        return not self.bad_primes


@dataclass(frozen=True)
class SplittingData:
    prime: int
    e: int
    f: int
    g: int

    @property
    def frobenius_orbit_sizes(self) -> tuple[int, ...]:
        return (self.f,) * self.g

    @property
    def degree(self) -> int:
        return self.e * self.f * self.g

    def __str__(self) -> str:
        kind = (
            "totally split" if self.e == 1 and self.f == 1
            else "inert" if self.g == 1 and self.e == 1
            else "totally ramified" if self.g == 1 and self.f == 1
            else f"(e={self.e}, f={self.f}, g={self.g})"
        )
        return f"p={self.prime}: {kind}"


@dataclass(frozen=True)
class FieldSpec:
    """Degree-d cyclic Galois field with basis and derived exact data."""

    label: str
    degree: int
    min_poly: tuple[int, ...]  # monic, low degree first, length d+1
    basis: tuple[Poly, ...]  # d polynomials in theta, rational coefficients
    galois_gen: Poly
    automorphisms: tuple[Poly, ...]  # iterates of galois_gen, id first
    structure: StructureConstants
    norm_form: tuple[tuple[tuple[int, ...], Fraction], ...]
    disc_min_poly: int
    basis_denominator: int
    _caches: dict = field(
        default_factory=dict, compare=False, repr=False, hash=False
    )

    def __hash__(self):
        return hash((self.label, self.min_poly, self.basis))


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------

def _subset_sums(degrees: list[int]) -> set[int]:
    sums = {0}
    for d in degrees:
        sums |= {s + d for s in sums}
    return sums


def _check_irreducible(mz: list[int]) -> None:
    """Certify irreducibility over Q or raise NotIrreducible.

    Integer-root exclusion settles degree <= 3.  Higher degrees combine
    factor-degree patterns modulo several good primes with a bounded
    search for quadratic factors; an uncertified polynomial is refused.
    """
    d = len(mz) - 1
    if d <= 1:
        return
    c0 = mz[0]
    if c0 == 0:
        raise NotIrreducible("constant term 0: divisible by T")
    divisors = {1}
    for p, e in factorize(abs(c0)).factors:
        divisors = {dd * p**k for dd in divisors for k in range(e + 1)}
    for r in sorted(divisors):
        for root in (r, -r):
            if _peval_frac(tuple(map(Fraction, mz)), Fraction(root)) == 0:
                raise NotIrreducible(f"integer root {root}")
    if d <= 3:
        return

    disc = _disc_int(mz)
    # root exclusion above already rules out factors of degree 1 and d-1
    allowed = set(range(2, d - 1))
    p = 2
    tried = 0
    while allowed and tried < 25 and p < 500:
        if disc % p != 0:
            degs = [deg for _, deg, mult in _fp_factor(mz, p) for _ in range(mult)]
            allowed &= _subset_sums(degs)
            allowed -= {0, d}
            tried += 1
        p = _next_prime(p)
    if not allowed:
        return
    if 2 in allowed or d - 2 in allowed:
        if _has_quadratic_factor(mz):
            raise NotIrreducible("found a quadratic factor")
        allowed -= {2, d - 2}
        if not allowed:
            return
    raise NotIrreducible(
        f"no irreducibility certificate found (possible factor degrees {sorted(allowed)})"
    )


def _has_quadratic_factor(mz: list[int]) -> bool:
    # bounded search for a monic integer quadratic factor T^2 + aT + b
    root_bound = 1 + max(abs(c) for c in mz[:-1])
    if root_bound > 60:
        raise NotIrreducible(
            "coefficients too large for the quadratic-factor certificate"
        )
    for a in range(-2 * root_bound, 2 * root_bound + 1):
        for b in range(-(root_bound**2), root_bound**2 + 1):
            if b == 0:
                continue
            rem = _zpoly_mod(mz, [b, a, 1])
            if all(c == 0 for c in rem):
                return True
    return False


def _zpoly_mod(a: Sequence[int], mod: Sequence[int]) -> list[int]:
    # remainder of integer polys, mod monic; stays integral
    a = list(a)
    dm = len(mod) - 1
    while len(a) > dm:
        c = a[-1]
        if c:
            for i in range(dm):
                a[len(a) - 1 - dm + i] -= c * mod[i]
        a.pop()
    return a


def _next_prime(p: int) -> int:
    q = p + 1
    while not is_prime(q):
        q += 1
    return q


def _disc_int(mz: Sequence[int]) -> int:
    """Discriminant of a monic integer polynomial via Sylvester resultant."""
    d = len(mz) - 1
    if d == 1:
        return 1
    deriv = _pderiv(list(mz))
    res = _sylvester_resultant_int(list(mz), deriv)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * res


def _sylvester_resultant_int(f: list[int], g: list[int]) -> int:
    # Res(f, g) for integer polys, f monic of degree >= 1
    while g and g[-1] == 0:
        g.pop()
    n = len(f) - 1
    e = len(g) - 1
    if not g:
        return 0
    if e == 0:
        return g[0] ** n
    size = n + e
    m = [[0] * size for _ in range(size)]
    for i in range(e):
        for j, c in enumerate(reversed(f)):
            m[i][i + j] = c
    for i in range(n):
        for j, c in enumerate(reversed(g)):
            m[e + i][i + j] = c
    return _int_det_bareiss(m)


def field_from_spec(raw: dict) -> FieldSpec:
    """Build and validate a FieldSpec from a parsed config mapping."""
    label = str(raw.get("label", "custom"))
    try:
        mz = [int(c) for c in raw["min_poly"]]
    except KeyError:
        raise NotIrreducible("config requires min_poly") from None
    while len(mz) > 1 and mz[-1] == 0:
        mz.pop()
    d = len(mz) - 1
    if d < 1:
        raise NotIrreducible("min_poly must have degree >= 1")
    if mz[-1] != 1:
        raise NotIrreducible("min_poly must be monic")
    _check_irreducible(mz)
    mp = tuple(Fraction(c) for c in mz)

    basis_raw = raw.get("basis")
    if basis_raw is None:
        basis_raw = [[0] * k + [1] for k in range(d)]  # power basis
    if len(basis_raw) != d:
        raise NotABasis(f"need {d} basis elements, got {len(basis_raw)}")
    basis = tuple(_trim([_frac(c) for c in b]) for b in basis_raw)
    if any(len(b) > d for b in basis):
        raise NotABasis("basis polynomials must have degree < d")
    bmat = [[b[j] if j < len(b) else Fraction(0) for j in range(d)] for b in basis]
    binv = _mat_inverse(bmat)
    if binv is None:
        raise NotABasis("basis polynomials are linearly dependent")

    gg_raw = raw.get("galois_gen", [0, 1])
    gg = _trim([_frac(c) for c in gg_raw])
    if _pcompose_mod(mp, gg, mp) != ():
        raise NotGalois("galois_gen does not map the primitive element to a root")
    auts = [_pmod((Fraction(0), Fraction(1)), mp)]  # identity: T reduced mod mu
    cur = _pmod(gg, mp)
    while cur != auts[0]:
        auts.append(cur)
        cur = _pcompose_mod(gg, cur, mp)
        if len(auts) > d:
            break
    if len(auts) != d or cur != auts[0]:
        raise NotGalois(
            f"galois_gen generates {len(auts)} automorphisms, expected {d}"
        )

    structure = _derive_structure(d, mp, basis, binv, auts)
    norm_form = _derive_norm_form(d, structure)
    disc = _disc_int(mz)
    denom = 1
    for b in basis:
        for c in b:
            denom = denom * c.denominator // math.gcd(denom, c.denominator)

    return FieldSpec(
        label=label,
        degree=d,
        min_poly=tuple(mz),
        basis=basis,
        galois_gen=gg,
        automorphisms=tuple(auts),
        structure=structure,
        norm_form=norm_form,
        disc_min_poly=disc,
        basis_denominator=denom,
    )


def _peval_like(outer: Poly, inner: Poly, mod: Poly) -> Poly:
    return _pcompose_mod(outer, inner, mod)


def _derive_structure(
    d: int,
    mp: Poly,
    basis: tuple[Poly, ...],
    binv: list[list[Fraction]],
    auts: list[Poly],
) -> StructureConstants:
    def in_basis(p: Poly) -> tuple[Fraction, ...]:
        coeffs = [p[j] if j < len(p) else Fraction(0) for j in range(d)]
        return tuple(
            sum(coeffs[j] * binv[j][k] for j in range(d)) for k in range(d)
        )

    mult = tuple(
        tuple(in_basis(_pmod(_pmul(basis[i], basis[j]), mp)) for j in range(d))
        for i in range(d)
    )
    galois = tuple(
        tuple(in_basis(_pcompose_mod(basis[i], g, mp)) for i in range(d))
        for g in auts
    )
    one = in_basis((Fraction(1),))

    bad: set[int] = set()
    seen: set[int] = set()

    def collect(fr: Fraction) -> None:
        q = fr.denominator
        if q == 1 or q in seen:
            return
        seen.add(q)
        bad.update(p for p, _ in factorize(q).factors)

    for block in mult:
        for row in block:
            for c in row:
                collect(c)
    for block in galois:
        for row in block:
            for c in row:
                collect(c)
    for c in one:
        collect(c)
    # sanity: w_i * w_j recomputed through the tables must match
    return StructureConstants(mult, galois, one, frozenset(bad))


def _derive_norm_form(d: int, structure: StructureConstants):
    """Expand det of the multiplication-by-beta matrix symbolically.

    Entry (k, j) of the matrix is sum_i x_i * a[i][j][k]; the determinant
    is the norm form, a homogeneous degree-d polynomial in x_0..x_{d-1}.
    """
    zero = tuple([0] * d)

    def var(i: int) -> dict:
        e = [0] * d
        e[i] = 1
        return {tuple(e): Fraction(1)}

    entries = [[{} for _ in range(d)] for _ in range(d)]
    for k in range(d):
        for j in range(d):
            cell: dict = {}
            for i in range(d):
                c = structure.mult[i][j][k]
                if c:
                    e = [0] * d
                    e[i] = 1
                    key = tuple(e)
                    cell[key] = cell.get(key, 0) + c
            entries[k][j] = cell

    def mul(a: dict, b: dict) -> dict:
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                out[key] = out.get(key, 0) + ca * cb
        return {k: v for k, v in out.items() if v != 0}

    import itertools

    total: dict = {}
    for perm in itertools.permutations(range(d)):
        sign = _perm_sign(perm)
        term = {zero: Fraction(sign)}
        for k in range(d):
            term = mul(term, entries[k][perm[k]])
            if not term:
                break
        for e, c in term.items():
            total[e] = total.get(e, 0) + c
    total = {k: v for k, v in total.items() if v != 0}
    return tuple(sorted(total.items()))


def _perm_sign(perm) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _parse_simple_toml(text: str) -> dict:
    """Fallback key = value parser for field-spec files on Python < 3.11."""
    out: dict = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"unsupported TOML line: {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = json.loads(value.replace("'", '"'))
    return out


def field_from_file(path: str | Path) -> FieldSpec:
    """Read a field spec from TOML or JSON."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix.lower() == ".toml":
        try:
            import tomllib

            raw = tomllib.loads(text)
        except ModuleNotFoundError:
            raw = _parse_simple_toml(text)
    else:
        raw = json.loads(text)
    raw.setdefault("label", p.stem)
    return field_from_spec(raw)


_REAL_QUAD_RE = re.compile(r"^real_quadratic\((\d+)\)$")

BUILTIN_FIELDS = ("gaussian", "eisenstein", "real_quadratic(D)", "cyclic_cubic_9",
                  "cyclotomic_5", "rational")


def builtin_field(name: str) -> FieldSpec:
    """Named field specs with documented bases; see README for the list."""
    s = name.strip().lower().replace(" ", "")
    if s == "gaussian":
        return field_from_spec({
            "label": "gaussian",
            "min_poly": [1, 0, 1],
            "basis": [[1], [0, 1]],
            "galois_gen": [0, -1],
        })
    if s == "eisenstein":
        # theta = (1 + sqrt(-3))/2, norm form x^2 + xy + y^2
        return field_from_spec({
            "label": "eisenstein",
            "min_poly": [1, -1, 1],
            "basis": [[1], [0, 1]],
            "galois_gen": [1, -1],
        })
    m = _REAL_QUAD_RE.match(s)
    if m:
        D = int(m.group(1))
        if D < 2 or any(e >= 2 for _, e in factorize(D).factors):
            raise UnknownName(f"real_quadratic needs squarefree D >= 2, got {D}")
        if D % 4 == 1:
            spec = {
                "min_poly": [(1 - D) // 4, -1, 1],  # theta = (1+sqrt(D))/2
                "galois_gen": [1, -1],
            }
        else:
            spec = {"min_poly": [-D, 0, 1], "galois_gen": [0, -1]}
        spec["label"] = f"real_quadratic({D})"
        spec["basis"] = [[1], [0, 1]]
        return field_from_spec(spec)
    if s == "cyclic_cubic_9":
        # maximal real subfield of the 9th cyclotomic field, disc 81
        return field_from_spec({
            "label": "cyclic_cubic_9",
            "min_poly": [1, -3, 0, 1],
            "basis": [[1], [0, 1], [0, 0, 1]],
            "galois_gen": [-2, 0, 1],
        })
    if s == "cyclotomic_5":
        return field_from_spec({
            "label": "cyclotomic_5",
            "min_poly": [1, 1, 1, 1, 1],
            "basis": [[1], [0, 1], [0, 0, 1], [0, 0, 0, 1]],
            "galois_gen": [0, 0, 1],
        })
    if s == "rational":
        return field_from_spec({
            "label": "rational",
            "min_poly": [-1, 1],
            "basis": [[1]],
            "galois_gen": [0, 1],
        })
    raise UnknownName(f"unknown builtin field {name!r}")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def structure_constants(F: FieldSpec) -> StructureConstants:
    return F.structure


def norm(F: FieldSpec, x: Sequence[int]):
    """Exact norm of sum x_i * w_i via the expanded norm form."""
    if len(x) != F.degree:
        raise ValueError(f"expected {F.degree} coordinates, got {len(x)}")
    if all(c == 0 for c in x):
        raise ZeroVector("norm of the zero vector")
    total = Fraction(0)
    for expo, c in F.norm_form:
        term = c
        for xi, e in zip(x, expo):
            if e:
                term *= Fraction(xi) ** e
        total += term
    if total.denominator == 1:
        return int(total)
    return total


def norm_via_matrix(F: FieldSpec, x: Sequence[int]):
    """Norm as the determinant of the multiplication matrix (cross-check)."""
    d = F.degree
    if all(c == 0 for c in x):
        raise ZeroVector("norm of the zero vector")
    m = [[sum(Fraction(x[i]) * F.structure.mult[i][j][k] for i in range(d))
          for j in range(d)] for k in range(d)]
    det = _frac_det(m)
    return int(det) if det.denominator == 1 else det


def _frac_det(m: list[list[Fraction]]) -> Fraction:
    n = len(m)
    a = [row[:] for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def multiply_coordinates(
    F: FieldSpec, x: Sequence, y: Sequence
) -> tuple[Fraction, ...]:
    """Coordinates of the product of two basis-coordinate vectors."""
    d = F.degree
    out = [Fraction(0)] * d
    for i in range(d):
        if not x[i]:
            continue
        for j in range(d):
            if not y[j]:
                continue
            c = Fraction(x[i]) * Fraction(y[j])
            for k in range(d):
                a = F.structure.mult[i][j][k]
                if a:
                    out[k] += c * a
    return tuple(out)


def galois_apply(F: FieldSpec, g: int, x: Sequence) -> tuple[Fraction, ...]:
    """Coordinates of sigma^g applied to the element with coordinates x."""
    d = F.degree
    if not 0 <= g < d:
        raise ValueError(f"automorphism index {g} out of range 0..{d - 1}")
    out = [Fraction(0)] * d
    for i in range(d):
        if not x[i]:
            continue
        xi = Fraction(x[i])
        for k in range(d):
            b = F.structure.galois[g][i][k]
            if b:
                out[k] += xi * b
    return tuple(out)


def splitting_data(F: FieldSpec, p: int) -> SplittingData:
    """(e, f, g) for p from the factorization of min_poly mod p.

    Requires the monogenic set-up, under which repeated factors mod p
    mean genuine ramification.  Non-uniform factor shapes contradict the
    Galois hypothesis and are refused.
    """
    key = ("split", p)
    cached = F._caches.get(key)
    if cached is not None:
        return cached
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    d = F.degree
    factors = _fp_factor(list(F.min_poly), p)
    degrees = {deg for _, deg, _ in factors}
    mults = {mult for _, _, mult in factors}
    if len(degrees) != 1 or len(mults) != 1:
        raise BadPrimeForMinPoly(
            f"p={p}: non-uniform factor shape {[(deg, mult) for _, deg, mult in factors]} "
            "contradicts a Galois monogenic spec"
        )
    fdeg = degrees.pop()
    e = mults.pop()
    g = len(factors)
    assert e * fdeg * g == d
    if e > 1 and F.disc_min_poly % p != 0:
        raise BadPrimeForMinPoly(f"p={p}: repeated factors but p does not divide disc")
    sd = SplittingData(prime=p, e=e, f=fdeg, g=g)
    F._caches[key] = sd
    return sd


def valuation_vector(
    F: FieldSpec, x: Sequence[int], p: int, cap: int
) -> list[tuple[int, int]]:
    """Per-local-factor valuations [(deg f_w, min(v_p(f_w(x)), cap))].

    g = 1 places (inert or totally ramified) report the single pair
    (d, v_p(norm)).  At unramified split places the minimal polynomial
    factors are Hensel-lifted to p^(cap+1) and each factor value is the
    Sylvester resultant with the coordinate polynomial, computed as an
    exact integer determinant.
    """
    if all(c == 0 for c in x):
        raise ZeroVector("valuations of the zero vector")
    if math.gcd(*[int(c) for c in x]) != 1:
        raise ValueError("coordinate vector must be primitive")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if F.basis_denominator % p == 0:
        raise UnsupportedPrime(f"p={p} divides a basis denominator")
    if p in F.structure.bad_primes:
        raise UnsupportedPrime(f"p={p} is a bad prime of the basis")

    sd = splitting_data(F, p)
    d = F.degree
    if sd.g == 1:
        nv = abs(int(norm(F, x)))
        v = 0
        while nv % p == 0:
            nv //= p
            v += 1
            if v >= cap:
                break
        return [(d, min(v, cap))]
    if sd.e > 1:
        raise UnsupportedPrime(
            f"p={p} is partially ramified (e={sd.e}, g={sd.g}); unsupported"
        )

    lifted = _lifted_factors(F, p, cap + 1)
    beta = _beta_int_poly(F, x)
    pk = p ** (cap + 1)
    out = []
    for fw in lifted:
        res = _sylvester_resultant_int([c % pk for c in fw], beta) % pk
        if res == 0:
            v = cap
        else:
            v = 0
            while res % p == 0:
                res //= p
                v += 1
            v = min(v, cap)
        out.append((sd.f, v))
    return out


def _beta_int_poly(F: FieldSpec, x: Sequence[int]) -> list[int]:
    """Integer coefficients of sum x_i w_i(T); denominators must be 1."""
    d = F.degree
    coeffs = [Fraction(0)] * d
    for i, xi in enumerate(x):
        if xi:
            b = F.basis[i]
            for j, c in enumerate(b):
                coeffs[j] += xi * c
    out = []
    for c in coeffs:
        assert c.denominator == 1
        out.append(int(c))
    while out and out[-1] == 0:
        out.pop()
    return out


def _lifted_factors(F: FieldSpec, p: int, precision: int) -> list[list[int]]:
    """Monic factors of min_poly modulo p^precision.

    Lifts are cached at power-of-two precisions and truncated down, so
    per-point cap choices do not trigger fresh lifting work.
    """
    eff = 8
    while eff < precision:
        eff *= 2
    key = ("lift", p, eff)
    cached = F._caches.get(key)
    if cached is None:
        base = _fp_factor(list(F.min_poly), p)
        assert all(mult == 1 for _, _, mult in base)
        factors = [poly for poly, _, _ in base]
        cached = _hensel_lift(list(F.min_poly), factors, p, eff)
        F._caches[key] = cached
    pk = p**precision
    return [[c % pk for c in fw] for fw in cached]


# ---------------------------------------------------------------------------
# polynomial arithmetic over F_p (int lists, low degree first)
# ---------------------------------------------------------------------------

def _fp_trim(a: list[int], p: int) -> list[int]:
    a = [c % p for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return _fp_trim(out, p)


def _fp_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = a[:]
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    q = [0] * max(0, len(a) - db)
    while len(a) - 1 >= db and a:
        c = a[-1] * inv % p
        if c:
            q[len(a) - 1 - db] = c
            for i in range(db + 1):
                a[len(a) - 1 - db + i] = (a[len(a) - 1 - db + i] - c * b[i]) % p
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return _fp_trim(q, p), _fp_trim(a, p)


def _fp_mod(a: list[int], b: list[int], p: int) -> list[int]:
    return _fp_divmod(a, b, p)[1]


def _fp_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _fp_trim(a, p), _fp_trim(b, p)
    while b:
        a, b = b, _fp_mod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _fp_powmod(a: list[int], n: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    a = _fp_mod(a, mod, p)
    while n:
        if n & 1:
            result = _fp_mod(_fp_mul(result, a, p), mod, p)
        a = _fp_mod(_fp_mul(a, a, p), mod, p)
        n >>= 1
    return result


def _fp_factor_squarefree(f: list[int], p: int) -> list[list[int]]:
    """Irreducible factors of a squarefree monic polynomial over F_p."""
    out: list[list[int]] = []
    # distinct-degree split
    h = [0, 1]
    k = 0
    rest = f[:]
    stages: list[tuple[list[int], int]] = []
    while len(rest) - 1 >= 2 * (k + 1):
        k += 1
        h = _fp_powmod(h, p, rest, p)
        diff = _fp_trim([(c - (1 if i == 1 else 0)) % p for i, c in
                         enumerate(h + [0] * max(0, 2 - len(h)))], p)
        g = _fp_gcd(diff, rest, p)
        if len(g) > 1:
            stages.append((g, k))
            rest = _fp_divmod(rest, g, p)[0]
            h = _fp_mod(h, rest, p)
    if len(rest) > 1:
        stages.append((rest, len(rest) - 1))
    for poly, deg in stages:
        out.extend(_fp_edf(poly, deg, p))
    return sorted(out)


def _fp_edf(f: list[int], k: int, p: int) -> list[list[int]]:
    """Cantor-Zassenhaus split of an equal-degree product, deterministic seed."""
    if len(f) - 1 == k:
        return [f]
    seed = (p * 1_000_003 + sum(c * 31**i for i, c in enumerate(f))) & 0x7FFFFFFF
    rng = random.Random(seed)
    n = len(f) - 1
    while True:
        a = [rng.randrange(p) for _ in range(n)]
        a = _fp_trim(a, p)
        if len(a) < 1:
            continue
        if p == 2:
            b = a[:]
            c = a[:]
            for _ in range(k - 1):
                c = _fp_mod(_fp_mul(c, c, p), f, p)
                b = _fp_trim([(x + y) % p for x, y in
                              zip(b + [0] * len(c), c + [0] * len(b))], p)
        else:
            b = _fp_powmod(a, (p**k - 1) // 2, f, p)
            b = _fp_trim([(c - (1 if i == 0 else 0)) % p for i, c in enumerate(b)] or [p - 1], p)
        g = _fp_gcd(b, f, p)
        if 1 < len(g) < len(f):
            rest = _fp_divmod(f, g, p)[0]
            return _fp_edf(g, k, p) + _fp_edf(rest, k, p)


def _fp_factor(fz: Sequence[int], p: int) -> list[tuple[list[int], int, int]]:
    """Complete factorization over F_p: list of (monic factor, degree, multiplicity)."""
    f = _fp_trim(list(fz), p)
    assert len(f) >= 2, "polynomial vanishes mod p"
    inv = pow(f[-1], -1, p)
    f = [c * inv % p for c in f]
    result: dict[tuple[int, ...], int] = {}
    _fp_factor_rec(f, p, 1, result)
    out = [(list(k), len(k) - 1, mult) for k, mult in result.items()]
    out.sort()
    return out


def _fp_factor_rec(
    f: list[int], p: int, scale: int, result: dict[tuple[int, ...], int]
) -> None:
    if len(f) <= 1:
        return
    deriv = _fp_trim(_pderiv(f), p)
    if not deriv:
        # f(T) = u(T^p) = u(T)^p over F_p
        u = [f[i] for i in range(0, len(f), p)]
        _fp_factor_rec(u, p, scale * p, result)
        return
    c = _fp_gcd(f, deriv, p)
    w = _fp_divmod(f, c, p)[0]
    for g in _fp_factor_squarefree(w, p):
        e = 0
        rest = f
        while True:
            q, r = _fp_divmod(rest, g, p)
            if r:
                break
            rest = q
            e += 1
        result[tuple(g)] = result.get(tuple(g), 0) + e * scale
        f = rest
    _fp_factor_rec(f, p, scale, result)


# ---------------------------------------------------------------------------
# Hensel lifting (quadratic, with Bezout tracking)
# ---------------------------------------------------------------------------

def _zp_trim(a: list[int], m: int) -> list[int]:
    a = [c % m for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _zp_mul(a: list[int], b: list[int], m: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % m
    return _zp_trim(out, m)


def _zp_divmod_monic(a: list[int], b: list[int], m: int) -> tuple[list[int], list[int]]:
    # b monic: division is exact arithmetic over Z/m
    a = a[:]
    db = len(b) - 1
    q = [0] * max(0, len(a) - db)
    while len(a) - 1 >= db and a:
        c = a[-1] % m
        if c:
            q[len(a) - 1 - db] = c
            for i in range(db + 1):
                a[len(a) - 1 - db + i] = (a[len(a) - 1 - db + i] - c * b[i]) % m
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return _zp_trim(q, m), _zp_trim(a, m)


def _fp_xgcd(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int], list[int]]:
    # returns (g, s, t) with s a + t b = g over F_p, g monic
    r0, r1 = _fp_trim(a, p), _fp_trim(b, p)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = _fp_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _fp_trim([(x - y) % p for x, y in _zip_pad(s0, _fp_mul(q, s1, p))], p)
        t0, t1 = t1, _fp_trim([(x - y) % p for x, y in _zip_pad(t0, _fp_mul(q, t1, p))], p)
    if r0:
        inv = pow(r0[-1], -1, p)
        r0 = [c * inv % p for c in r0]
        s0 = [c * inv % p for c in s0]
        t0 = [c * inv % p for c in t0]
    return r0, s0, t0


def _zip_pad(a: list[int], b: list[int]):
    n = max(len(a), len(b))
    return zip(a + [0] * (n - len(a)), b + [0] * (n - len(b)))


def _zp_add(a: list[int], b: list[int], m: int) -> list[int]:
    return _zp_trim([(x + y) % m for x, y in _zip_pad(a, b)], m)


def _zp_sub(a: list[int], b: list[int], m: int) -> list[int]:
    return _zp_trim([(x - y) % m for x, y in _zip_pad(a, b)], m)


def _hensel_step(
    f: list[int], g: list[int], h: list[int], s: list[int], t: list[int], m: int
) -> tuple[list[int], list[int], list[int], list[int]]:
    """One quadratic lift of f = g h with Bezout pair s g + t h = 1 (mod m).

    Returns the factorization and Bezout pair valid mod m^2; g, h monic.
    """
    m2 = m * m
    e = _zp_sub(f, _zp_mul(g, h, m2), m2)
    q, r = _zp_divmod_monic(_zp_mul(s, e, m2), h, m2)
    g_new = _zp_add(_zp_add(g, _zp_mul(t, e, m2), m2), _zp_mul(q, g, m2), m2)
    h_new = _zp_add(h, r, m2)
    b = _zp_sub(_zp_add(_zp_mul(s, g_new, m2), _zp_mul(t, h_new, m2), m2), [1], m2)
    c, dd = _zp_divmod_monic(_zp_mul(s, b, m2), h_new, m2)
    s_new = _zp_sub(s, dd, m2)
    t_new = _zp_sub(_zp_sub(t, _zp_mul(t, b, m2), m2), _zp_mul(c, g_new, m2), m2)
    return g_new, h_new, s_new, t_new


def _hensel_pair_lift(
    f: list[int], g: list[int], h: list[int], p: int, precision: int
) -> tuple[list[int], list[int]]:
    """Lift a coprime monic factorization f = g h from mod p to mod p^precision."""
    _, s, t = _fp_xgcd(g, h, p)
    # s g + t h = 1 (mod p)
    m = p
    while m < p**precision:
        g, h, s, t = _hensel_step(f, g, h, s, t, m)
        m = m * m
    pk = p**precision
    return _zp_trim(g, pk), _zp_trim(h, pk)


def _hensel_lift(
    f: list[int], factors: list[list[int]], p: int, precision: int
) -> list[list[int]]:
    """Lift pairwise: peel one factor at a time against the product of the rest."""
    if precision <= 1:
        return [_fp_trim(x, p) for x in factors]
    if len(factors) == 1:
        return [_zp_trim(f, p**precision)]
    g = factors[0]
    h = [1]
    for other in factors[1:]:
        h = _fp_mul(h, other, p)
    g_lift, h_lift = _hensel_pair_lift(_zp_trim(f, p**precision), g, h, p, precision)
    return [g_lift] + _hensel_lift(h_lift, factors[1:], p, precision)
