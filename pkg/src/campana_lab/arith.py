"""Integer factorization and m-full (powerful) number tests.

Factorization is trial division under a tuned bound, then Brent-cycle
Pollard rho on the cofactor.  Primality below 3.3e24 uses the proven
deterministic Miller-Rabin witness set (first 13 primes); wider inputs
additionally pass a strong Lucas test, so no random witnesses are ever
drawn and results are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import Unfactored

# first 13 primes: proven witness set for n < 3.317e24
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_PROVEN_BOUND = 3_317_044_064_679_887_385_961_981

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)

MAX_MAGNITUDE = 1 << 126


@dataclass(frozen=True)
class Factorization:
    """sign * product(p^e) = n, primes strictly increasing, exponents >= 1."""

    sign: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        n = self.sign
        for p, e in self.factors:
            n *= p**e
        return n

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0


def _miller_rabin(n: int, a: int) -> bool:
    # returns True when n passes the strong test to base a
    if n % a == 0:
        return n == a
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
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


def _strong_lucas(n: int) -> bool:
    # Selfridge parameter choice; n odd, not a perfect square
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    Q = (1 - D) // 4
    d = n + 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # Lucas chain by binary expansion of d
    U, V, qk = 0, 2, 1
    for bit in bin(d)[2:]:
        U, V = U * V % n, (V * V - 2 * qk) % n
        qk = qk * qk % n
        if bit == "1":
            U, V = (U + V) * pow(2, -1, n) % n, (V + D * U) * pow(2, -1, n) % n
            qk = qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * qk) % n
        qk = qk * qk % n
        if V == 0:
            return True
    return False


def is_prime(n: int) -> bool:
    """Deterministic primality for |n| < 2^126."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if not all(_miller_rabin(n, a) for a in _MR_WITNESSES):
        return False
    if n < _MR_PROVEN_BOUND:
        return True
    r = math.isqrt(n)
    if r * r == n:
        return False
    return _strong_lucas(n)


def _pollard_brent(n: int, seed: int) -> int:
    # Brent's cycle variant; returns a non-trivial factor of composite odd n
    if n % 2 == 0:
        return 2
    y, c, m = seed % n or 1, (seed * 2654435761 + 1) % n or 1, 128
    g = r = q = 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g


_TRIAL_BOUND = 20_000


def _trial_division(n: int, bound: int) -> tuple[list[tuple[int, int]], int]:
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    p = 5
    step = 2
    while p <= bound and p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += step
        step = 6 - step
    return out, n


def factorize(n: int, trial_bound: int = _TRIAL_BOUND) -> Factorization:
    """Complete factorization of a nonzero integer with |n| < 2^126."""
    if n == 0:
        raise ValueError("cannot factor 0")
    if abs(n) >= MAX_MAGNITUDE:
        raise ValueError(f"|n| must be < 2^126, got {n}")
    sign = -1 if n < 0 else 1
    n = abs(n)
    small, rest = _trial_division(n, trial_bound)
    found: dict[int, int] = dict(small)

    stack = [rest] if rest > 1 else []
    budget = 64
    while stack:
        c = stack.pop()
        if c == 1:
            continue
        if is_prime(c):
            found[c] = found.get(c, 0) + 1
            continue
        r = math.isqrt(c)
        if r * r == c:
            stack.extend((r, r))
            continue
        f = c
        seed = 2
        while f == c:
            f = _pollard_brent(c, seed)
            seed += 1
            budget -= 1
            if budget <= 0:
                raise Unfactored(f"rho budget exhausted on cofactor {c}")
        stack.extend((f, c // f))

    factors = tuple(sorted(found.items()))
    result = Factorization(sign, factors)
    assert result.value() == sign * n
    return result


def is_m_full(n: int, m: int, excluded: Iterable[int] = ()) -> bool:
    """True when every prime outside ``excluded`` divides n to order >= m.

    Units (|n| = 1) are m-full; signs are ignored.
    """
    if n == 0:
        raise ValueError("m-fullness is undefined for 0")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    n = abs(n)
    for p in excluded:
        while n % p == 0:
            n //= p
    if n == 1:
        return True
    return all(e >= m for _, e in factorize(n).factors)


def is_m_full_with_witness(
    n: int, m: int, excluded: Iterable[int] = ()
) -> tuple[bool, tuple[int, int] | None]:
    """m-fullness verdict plus the smallest failing (prime, exponent)."""
    if n == 0:
        raise ValueError("m-fullness is undefined for 0")
    n = abs(n)
    for p in excluded:
        while n % p == 0:
            n //= p
    if n == 1:
        return True, None
    for p, e in factorize(n).factors:
        if e < m:
            return False, (p, e)
    return True, None


def fast_m_full(
    n: int, m: int, excluded: Iterable[int] = (), trial_bound: int = 1000
) -> bool:
    """Same verdict as is_m_full; rejects early on any small exponent < m."""
    if n == 0:
        raise ValueError("m-fullness is undefined for 0")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    n = abs(n)
    excl = set(excluded)
    for p in excl:
        while n % p == 0:
            n //= p
    if n == 1:
        return True
    for p in (2, 3):
        if p not in excl and n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e < m:
                return False
    p, step = 5, 2
    while p <= trial_bound and p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e < m:
                return False
        p += step
        step = 6 - step
    if n == 1:
        return True
    if p * p > n:
        # cofactor is prime (all smaller divisors exhausted)
        return m <= 1
    # every remaining prime factor exceeds trial_bound, so an m-full
    # cofactor must exceed trial_bound^m: cheap rejection without factoring
    if n <= trial_bound**m:
        return False
    return is_m_full(n, m, ())


def sieve_primes(limit: int) -> list[int]:
    """Primes <= limit by a bytearray sieve."""
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, b in enumerate(sieve) if b]


def integer_root(n: int, k: int) -> int:
    """Largest r with r^k <= n, exact for big integers."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n < 2:
        return n
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def m_full_numbers_up_to(limit: int, m: int) -> list[int]:
    """Sorted list of all m-full positive integers <= limit (including 1)."""
    if limit < 1:
        return []
    primes = sieve_primes(integer_root(limit, m) + 1)
    primes = [p for p in primes if p**m <= limit]
    out: list[int] = []

    def walk(idx: int, cur: int) -> None:
        out.append(cur)
        for i in range(idx, len(primes)):
            p = primes[i]
            base = cur * p**m
            if base > limit:
                break
            val = base
            while val <= limit:
                walk(i + 1, val)
                val *= p

    walk(0, 1)
    out.sort()
    return out
