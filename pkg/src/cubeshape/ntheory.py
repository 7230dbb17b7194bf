"""Small integer number-theory helpers: primality, factoring, congruences."""

from __future__ import annotations

import math
import random

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_TRIAL_LIMIT = 10_000


class FactorizationError(ArithmeticError):
    """Raised when an integer cannot be completely factored."""

    def __init__(self, n: int, partial: dict[int, int], cofactor: int):
        self.partial = partial
        self.cofactor = cofactor
        super().__init__(f"could not factor {n}: unfactored cofactor {cofactor}")


def is_probable_prime(n: int) -> bool:
    # Deterministic Miller-Rabin for n < 3.3e24 with these bases.
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int, rng: random.Random, max_iter: int = 1 << 20) -> int | None:
    if n % 2 == 0:
        return 2
    for _ in range(20):
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = q = r = 1
        x = ys = y
        steps = 0
        while g == 1 and steps < max_iter:
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
            steps += r
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of ``|n|`` as ``{p: e}``; trial division then Pollard rho."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    p = 2
    while p <= _TRIAL_LIMIT and p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n == 1:
        return out
    rng = random.Random(0x5EED)
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        f = _pollard_rho(m, rng)
        if f is None:
            raise FactorizationError(n, dict(out), m)
        stack.extend((f, m // f))
    return dict(sorted(out.items()))


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel: ``n = squarefree_part(n) * f**2``."""
    sign = -1 if n < 0 else 1
    m = 1
    for p, e in factorize(n).items():
        if e % 2:
            m *= p
    return sign * m


def fundamental_discriminant(n: int) -> int:
    m = squarefree_part(n)
    return m if m % 4 == 1 else 4 * m


def divisors(n: int) -> list[int]:
    n = abs(n)
    if n == 0:
        raise ValueError("0 has infinitely many divisors")
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def solve_linear_congruence(a: int, b: int, m: int) -> tuple[int, int] | None:
    """Solve ``a*x = b (mod m)``; returns ``(x0, step)`` or None if unsolvable."""
    m = abs(m)
    g = math.gcd(a, m)
    if b % g:
        return None
    step = m // g
    if step == 1:
        return 0, 1
    x0 = (b // g) * pow(a // g, -1, step) % step
    return x0, step


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int] | None:
    """Combine ``x = r1 (m1)`` and ``x = r2 (m2)`` for arbitrary moduli."""
    g = math.gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    lcm = m1 // g * m2
    if m1 // g == 1:
        return r2 % lcm, lcm
    k = ((r2 - r1) // g) * pow(m1 // g, -1, m2 // g) % (m2 // g)
    return (r1 + m1 * k) % lcm, lcm
