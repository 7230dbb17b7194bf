"""Binary cubic forms and the cubic rings they parametrize.

A form ``F = a x^3 + b x^2 y + c x y^2 + d y^3`` corresponds to the ring
``R_F`` with basis ``1, alpha, beta`` and

    alpha*beta = -a d
    alpha^2    = -a c - b alpha + a beta
    beta^2     = -b d - d alpha + c beta

``GL_2(Z)`` acts by the twisted action ``g.F(x, y) = F((x, y) g) / det g``.
Forms are never normalized behind the caller's back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from . import ntheory
from .quad_geodesics import BinaryQuadraticForm


class DegenerateFormError(ValueError):
    pass


class BinaryCubicForm(NamedTuple):
    a: int
    b: int
    c: int
    d: int

    @classmethod
    def parse(cls, text: str) -> "BinaryCubicForm":
        """Parse the literal ``"a,b,c,d"``."""
        return cls(*parse_int_literal(text, 4))

    def __call__(self, x, y):
        a, b, c, d = self
        return a * x**3 + b * x * x * y + c * x * y * y + d * y**3

    def content(self) -> int:
        return math.gcd(*self)

    def __str__(self) -> str:
        return ",".join(str(v) for v in self)


class LiteralError(ValueError):
    def __init__(self, text: str, position: int, reason: str):
        self.position = position
        super().__init__(f"malformed literal {text!r} at position {position}: {reason}")


def parse_int_literal(text: str, count: int) -> tuple[int, ...]:
    parts = text.split(",")
    if len(parts) != count:
        raise LiteralError(text, len(parts), f"expected {count} comma-separated integers, got {len(parts)}")
    out = []
    for i, p in enumerate(parts, start=1):
        try:
            out.append(int(p.strip()))
        except ValueError:
            raise LiteralError(text, i, f"{p.strip()!r} is not an integer") from None
    return tuple(out)


UnimodularPair = tuple[tuple[int, int], tuple[int, int]]


def det2(g) -> int:
    return g[0][0] * g[1][1] - g[0][1] * g[1][0]


def matmul2(g, h):
    return (
        (g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
        (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]),
    )


@dataclass(frozen=True)
class CubicRingStructure:
    """Structure constants of ``R_F`` in the basis ``1, alpha, beta``.

    Each product is a triple of coordinates on ``(1, alpha, beta)``.
    """

    form: BinaryCubicForm

    @property
    def products(self) -> dict[str, tuple[int, int, int]]:
        a, b, c, d = self.form
        return {
            "alpha*beta": (-a * d, 0, 0),
            "alpha^2": (-a * c, -b, a),
            "beta^2": (-b * d, -d, c),
        }

    def multiply(self, x: tuple[int, int, int], y: tuple[int, int, int]) -> tuple[int, int, int]:
        p = self.products
        x0, x1, x2 = x
        y0, y1, y2 = y
        out = [x0 * y0, x0 * y1 + x1 * y0, x0 * y2 + x2 * y0]
        for coef, key in ((x1 * y1, "alpha^2"), (x1 * y2 + x2 * y1, "alpha*beta"), (x2 * y2, "beta^2")):
            for i in range(3):
                out[i] += coef * p[key][i]
        return tuple(out)

    def trace(self, x: tuple[int, int, int]) -> int:
        """Trace of multiplication by ``x``; tr(alpha) = -b, tr(beta) = c."""
        a, b, c, d = self.form
        return 3 * x[0] - b * x[1] + c * x[2]


def disc(F) -> int:
    a, b, c, d = F
    return b * b * c * c - 4 * a * c**3 - 4 * b**3 * d - 27 * a * a * d * d + 18 * a * b * c * d


def hessian(F) -> BinaryQuadraticForm:
    a, b, c, d = F
    return BinaryQuadraticForm(b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d)


def trace_zero_gram(F) -> tuple[tuple[int, int], tuple[int, int]]:
    p, q, u = hessian(F)
    return ((6 * p, 3 * q), (3 * q, 6 * u))


def primitive_tzf(F) -> tuple[BinaryQuadraticForm, int]:
    """Primitive trace-zero form and the content of the Hessian."""
    h = hessian(F)
    g = math.gcd(*h)
    if g == 0:
        raise DegenerateFormError(f"form {tuple(F)} has zero Hessian")
    return BinaryQuadraticForm(h.r // g, h.s // g, h.t // g), g


def act(g: UnimodularPair, F) -> BinaryCubicForm:
    """Twisted action ``F((x, y) g) / det g``."""
    det = det2(g)
    if abs(det) != 1:
        raise ValueError(f"matrix {g} is not unimodular")
    (g11, g12), (g21, g22) = g
    F = BinaryCubicForm(*F)
    a, b, c, d = F
    # F(g11 x + g21 y, g12 x + g22 y), expanded coefficientwise
    a2 = F(g11, g12)
    d2 = F(g21, g22)
    b2 = (
        3 * a * g11 * g11 * g21
        + b * (g11 * g11 * g22 + 2 * g11 * g12 * g21)
        + c * (g12 * g12 * g21 + 2 * g11 * g12 * g22)
        + 3 * d * g12 * g12 * g22
    )
    c2 = (
        3 * a * g11 * g21 * g21
        + b * (g21 * g21 * g12 + 2 * g11 * g21 * g22)
        + c * (g22 * g22 * g11 + 2 * g12 * g21 * g22)
        + 3 * d * g12 * g22 * g22
    )
    return BinaryCubicForm(a2 * det, b2 * det, c2 * det, d2 * det)


def is_irreducible(F) -> bool:
    """True iff F has no linear factor over Q (rational root test)."""
    a, b, c, d = F
    if a == 0 or d == 0:
        return False
    for q in ntheory.divisors(a):
        for p in ntheory.divisors(d):
            if math.gcd(p, q) != 1:
                continue
            for pp in (p, -p):
                if a * pp**3 + b * pp * pp * q + c * pp * q * q + d * q**3 == 0:
                    return False
    return True


def _p1_roots_mod(F, p: int) -> list[tuple[int, int]]:
    a, b, c, d = (v % p for v in F)
    roots = [(x0, 1) for x0 in range(p) if (a * x0**3 + b * x0 * x0 + c * x0 + d) % p == 0]
    if a == 0:
        roots.append((1, 0))
    return roots


def is_maximal_at(F, p: int) -> bool:
    """Maximality of ``R_F`` at the prime ``p``.

    Not maximal iff p divides the content, or a root of F mod p moved to
    ``[1:0]`` gives ``p^2 | a'`` and ``p | b'``.
    """
    if not ntheory.is_probable_prime(p):
        raise ValueError(f"{p} is not prime")
    F = BinaryCubicForm(*F)
    if all(v % p == 0 for v in F):
        return False
    for x0, y0 in _p1_roots_mod(F, p):
        # unimodular lift with first row (x0, y0)
        g = ((x0, y0), (-1, 0)) if y0 == 1 else ((1, 0), (0, 1))
        G = act(g, F)
        if G.a % (p * p) == 0 and G.b % p == 0:
            return False
    return True


def is_maximal(F) -> bool:
    D = disc(F)
    if D == 0:
        raise DegenerateFormError(f"form {tuple(F)} has zero discriminant")
    for p, e in ntheory.factorize(D).items():
        if e >= 2 and not is_maximal_at(F, p):
            return False
    return True


def resolvent_disc(F) -> int:
    """Fundamental discriminant of the quadratic resolvent field Q(sqrt(disc F))."""
    D = disc(F)
    if D >= 0:
        raise ValueError(f"form {tuple(F)} is not complex cubic (disc = {D})")
    if not is_irreducible(F):
        raise ValueError(f"form {tuple(F)} is reducible")
    return ntheory.fundamental_discriminant(D)


def classify_3(F) -> str:
    """Ramification of 3: ``unramified_or_split``, ``tame`` or ``wild``."""
    k = ntheory.valuation(disc(F), 3)
    if k == 0:
        return "unramified_or_split"
    if k == 1:
        return "tame"
    if k in (3, 4, 5):
        return "wild"
    raise ValueError(f"ord_3(disc) = {k} is impossible for a maximal cubic ring")
