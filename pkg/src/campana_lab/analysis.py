"""Asymptotic fits, residue values and the truncated leading constant.

The leading-constant estimate multiplies the m/((b-1)! d) prefactor,
the residue pieces of the regularising zeta power, and a truncated
Euler product of local quotient factors with trivial character values.
Archimedean and nontrivial-character contributions are out of reach at
desk scale and are recorded as caveats rather than guessed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .arith import sieve_primes
from .errors import InsufficientData, UnsupportedField
from .fieldspec import FieldSpec, splitting_data
from .groups import cyclic
from .localseries import (
    CharacterValues,
    SplitType,
    division_recursion,
    regularization_coefficients,
    weak_local_transform,
)
from .orbits import b_exponent
from .points import CountTable


# ---------------------------------------------------------------------------
# fitting enumerated counts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FitReport:
    m: int
    b: int
    c_fit: float
    ratios: tuple[tuple[float, float], ...]  # (B, N / (B^(1/m) log(B)^(b-1)))
    stability: float
    slope_est: float

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "b": self.b,
            "c_fit": self.c_fit,
            "ratios": [[B, r] for B, r in self.ratios],
            "stability": self.stability,
            "slope_est": self.slope_est,
        }


def _pick_counts(table: CountTable, kind: str) -> list[tuple[int, int]]:
    out = []
    for row in table.rows:
        if kind == "weak":
            n = row.projective_weak
        elif kind == "campana":
            n = row.projective_campana
            if n is None:
                raise InsufficientData("table carries no campana counts")
        elif kind == "mfull":
            n = row.vector_mfull
        else:
            raise ValueError(f"unknown count kind {kind!r}")
        out.append((row.B, n))
    return out


def fit_counts(table: CountTable, m: int, b: int, kind: str = "weak") -> FitReport:
    """Normalised ratios, doubling stability and log-log slope.

    Needs at least 4 checkpoints spanning two doublings of the height
    bound, with nonzero counts for the logarithmic fit.
    """
    data = [(B, n) for B, n in _pick_counts(table, kind) if n > 0]
    if len(data) < 4:
        raise InsufficientData("need at least 4 checkpoints with nonzero counts")
    Bs = [B for B, _ in data]
    if max(Bs) < 4 * min(Bs):
        raise InsufficientData("checkpoints must span at least two doublings in B")

    ratios = []
    for B, n in data:
        denom = B ** (1.0 / m) * math.log(B) ** (b - 1)
        ratios.append((float(B), n / denom))

    logB = np.log([B for B, _ in data])
    logN = np.log([n for _, n in data])
    slope, _ = np.polyfit(logB, logN, 1)

    def ratio_near(target: float) -> float:
        i = int(np.argmin(np.abs(logB - math.log(target))))
        return ratios[i][1]

    B_top = data[-1][0]
    r_top = ratios[-1][1]
    r_half = ratio_near(B_top / 2)
    r_quarter = ratio_near(B_top / 4)
    changes = []
    if r_half > 0:
        changes.append(abs(r_top - r_half) / r_half)
    if r_quarter > 0:
        changes.append(abs(r_half - r_quarter) / r_quarter)
    stability = max(changes) if changes else float("inf")

    return FitReport(
        m=m,
        b=b,
        c_fit=r_top,
        ratios=tuple(ratios),
        stability=stability,
        slope_est=float(slope),
    )


# ---------------------------------------------------------------------------
# Dedekind zeta residues
# ---------------------------------------------------------------------------

def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a | n) for n >= 1."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _quadratic_l_value(D: int) -> float:
    """L(1, chi_D) by the finite class-number-formula sums."""
    q = abs(D)
    if D < 0:
        total = sum(kronecker_symbol(D, a) * a for a in range(1, q))
        return -math.pi * total / (q * math.sqrt(q))
    total = sum(
        kronecker_symbol(D, a) * math.log(math.sin(math.pi * a / q))
        for a in range(1, q)
    )
    return -total / math.sqrt(D)


def _cubic_character_table(f: int) -> list[complex]:
    """Values of a primitive cubic character modulo f (f = 9 or prime)."""
    if f == 9:
        gen, order = 2, 6
    else:
        if f % 3 != 1:
            raise UnsupportedField(f"no cubic character modulo {f}")
        from .arith import factorize as _factorize

        qs = [q for q, _ in _factorize(f - 1).factors]
        gen = next(
            g for g in range(2, f)
            if all(pow(g, (f - 1) // q, f) != 1 for q in qs)
        )
        order = f - 1
    omega = cmath.exp(2j * math.pi / 3)
    table = [complex(0.0)] * f
    cur = 1
    for k in range(order):
        table[cur] = omega ** (k % 3)
        cur = cur * gen % f
    return table


def _cubic_l_value(f: int, blocks: int = 60_000) -> complex:
    """L(1, chi) for the cubic character modulo f, block-accelerated.

    Character sums over a full period vanish and so does the weighted
    first moment (cubic characters are even), so period blocks decay
    cubically; the k^-3 tail is added in closed form.
    """
    table = _cubic_character_table(f)
    n = np.arange(1, f * blocks + 1)
    chi = np.asarray([table[i % f] for i in range(f)])
    values = chi[n % f]
    total = np.sum(values / n)
    # tail: sum over k >= blocks of S2 / (f k)^3 with S2 the quadratic moment
    s2 = sum(table[r] * r * r for r in range(f))
    tail = s2 / f**3 * (1.0 / (2.0 * blocks**2))
    return complex(total + tail)


def dedekind_residue(F: FieldSpec, precision: float = 1e-9) -> float:
    """Residue at s = 1 of the Dedekind zeta function of the field.

    Quadratic fields use the finite character-sum formulas for the
    Kronecker character of the discriminant; cyclic cubics use the
    squared modulus of an accelerated cubic L-value.
    """
    d = F.degree
    if d == 1:
        return 1.0
    if d == 2:
        # monogenic spec, so disc(min_poly) is the fundamental discriminant
        return _quadratic_l_value(F.disc_min_poly)
    if d == 3:
        disc = F.disc_min_poly
        f = math.isqrt(disc)
        if f * f != disc:
            raise UnsupportedField(
                f"cubic discriminant {disc} is not a perfect square"
            )
        blocks = max(20_000, int(2.0 / (f * math.sqrt(max(precision, 1e-13)))))
        blocks = min(blocks, 400_000)
        lval = _cubic_l_value(f, blocks)
        return float(abs(lval) ** 2)
    raise UnsupportedField(
        f"no Dirichlet decomposition wired for degree {d} fields"
    )


# ---------------------------------------------------------------------------
# leading-constant estimate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantEstimate:
    prefactor: float
    residue_ratio: float
    zeta_residue_power: float
    euler_truncation: float
    p_max: int
    caveats: tuple[str, ...]
    skipped_primes: tuple[int, ...]
    trace: tuple[tuple[int, float], ...] = ()

    @property
    def value(self) -> float:
        return (
            self.prefactor
            * self.residue_ratio
            * self.zeta_residue_power
            * self.euler_truncation
        )

    def to_json_dict(self) -> dict:
        return {
            "prefactor": self.prefactor,
            "residue_ratio": self.residue_ratio,
            "zeta_residue_power": self.zeta_residue_power,
            "euler_truncation": self.euler_truncation,
            "estimate": self.value,
            "p_max": self.p_max,
            "caveats": list(self.caveats),
            "skipped_primes": list(self.skipped_primes),
        }


def _trivial_quotient_series(d: int, f: int, m: int, terms: int):
    """Quotient series of the weak transform by the regularisation,
    trivial character, for one unramified split type."""
    st = SplitType.with_degree(d, f)
    cv = CharacterValues.trivial(d // f)
    a = weak_local_transform(st, cv, m, terms)
    b = regularization_coefficients(cyclic(d), st, cv, m, terms)
    q = division_recursion(a, b, m)
    return [c.real for c in q.coeffs]


def local_quotient_factor(d: int, f: int, m: int, x: float, terms: int = 0) -> float:
    """Trivial-character local quotient factor evaluated at x = p^(-1/m)."""
    if terms <= 0:
        terms = max(64, int(math.ceil(40.0 * math.log(10) / -math.log(x))))
        terms = min(terms, 4096)
    coeffs = _trivial_quotient_series(d, f, m, terms)
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def constant_estimate(
    F: FieldSpec, m: int, p_max: int, collect_trace: bool = False
) -> ConstantEstimate:
    """Trivial-character truncated estimate of the leading constant.

    Multiplies m/((b-1)! d), the rational-over-field residue ratio, the
    (Res zeta_E / m)^b piece extracted from the zeta-power pole, and the
    Euler product over good p <= p_max of the local quotient factors.
    Ramified and bad primes are skipped and listed.
    """
    d = F.degree
    b = b_exponent(d, m)
    res_e = dedekind_residue(F)
    prefactor = m / (math.factorial(b - 1) * d)
    residue_ratio = 1.0 / res_e  # Res zeta_Q / Res zeta_E over the rationals
    zeta_residue_power = (res_e / m) ** b

    caveats = [
        "height uses the max-norm metrization at the archimedean place",
        "archimedean local factor omitted",
        "only the trivial character contributes to this estimate",
    ]
    skipped: list[int] = []
    series_cache: dict[int, list[float]] = {}
    terms_for_two = max(96, int(math.ceil(40.0 * math.log(10) * m / math.log(2))))
    terms_for_two = min(terms_for_two, 4096)

    log_sum = 0.0
    comp = 0.0  # Kahan compensation
    trace: list[tuple[int, float]] = []
    primes = sieve_primes(p_max)
    trace_stride = max(1, len(primes) // 400)
    for i, p in enumerate(primes):
        if F.disc_min_poly % p == 0 or p in F.structure.bad_primes:
            skipped.append(p)
            continue
        sd = splitting_data(F, p)
        coeffs = series_cache.get(sd.f)
        if coeffs is None:
            coeffs = _trivial_quotient_series(d, sd.f, m, terms_for_two)
            series_cache[sd.f] = coeffs
        x = p ** (-1.0 / m)
        factor = 0.0
        for c in reversed(coeffs):
            factor = factor * x + c
        assert factor > 0.0, (p, factor)
        term = math.log(factor)
        y = term - comp
        t = log_sum + y
        comp = (t - log_sum) - y
        log_sum = t
        if collect_trace and (i % trace_stride == 0 or i == len(primes) - 1):
            trace.append((p, math.exp(log_sum)))
    euler = math.exp(log_sum)

    if skipped:
        caveats.append(f"primes {skipped} skipped (ramified or bad)")
    return ConstantEstimate(
        prefactor=prefactor,
        residue_ratio=residue_ratio,
        zeta_residue_power=zeta_residue_power,
        euler_truncation=euler,
        p_max=p_max,
        caveats=tuple(caveats),
        skipped_primes=tuple(skipped),
        trace=tuple(trace),
    )
