"""Exact arithmetic in the real cubic field Q(theta).

``theta`` is the real root of ``F(x, 1)`` for a binary cubic form
``F = (a, b, c, d)`` with negative discriminant.  Elements are stored in the
power basis ``1, alpha, alpha**2`` of ``alpha = a*theta``, whose minimal
polynomial ``x**3 + b*x**2 + a*c*x + a**2*d`` is monic; reduction therefore
never introduces denominators.  Signs are decided exactly by bisecting a
rational isolating interval for ``alpha``.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

_Number = int | Fraction


class ContextMismatchError(ValueError):
    pass


def _cubic_disc(a: int, b: int, c: int, d: int) -> int:
    return b * b * c * c - 4 * a * c**3 - 4 * b**3 * d - 27 * a * a * d * d + 18 * a * b * c * d


class NumberFieldContext:
    """The field Q(theta) attached to a complex cubic form.

    Holds the monic minimal polynomial of ``alpha = a*theta`` and a cache of
    nested rational isolating intervals for ``alpha``.  The cache is guarded
    by a lock so a context can be shared between threads.
    """

    def __init__(self, source_form: Sequence[int]):
        a, b, c, d = (int(v) for v in source_form)
        if _cubic_disc(a, b, c, d) >= 0:
            raise ValueError(f"form {(a, b, c, d)} does not have negative discriminant")
        if a == 0 or d == 0:
            raise ValueError(f"form {(a, b, c, d)} is reducible")
        self.source_form = source_form
        self.coeffs = (a, b, c, d)
        # alpha**3 = -(p2*alpha**2 + p1*alpha + p0)
        self.monic_min_poly = (b, a * c, a * a * d)
        p2, p1, p0 = self.monic_min_poly
        bound = 1 + max(abs(p2), abs(p1), abs(p0))
        lo, hi = Fraction(-bound), Fraction(bound)
        self.cached_refinements: list[tuple[Fraction, Fraction]] = [(lo, hi)]
        self._lock = threading.Lock()
        # a monic integer cubic is reducible iff it has an integer root
        while hi - lo >= 1:
            lo, hi = self._refine()
        for k in range(int(lo) - 1, int(hi) + 2):
            if self._f(k) == 0:
                raise ValueError(f"form {(a, b, c, d)} is reducible (alpha = {k})")
        self.zero = FieldElement(self, (0, 0, 0))
        self.one = FieldElement(self, (1, 0, 0))
        self.alpha = FieldElement(self, (0, 1, 0))

    def _f(self, x: _Number) -> _Number:
        p2, p1, p0 = self.monic_min_poly
        return ((x + p2) * x + p1) * x + p0

    def _refine(self) -> tuple[Fraction, Fraction]:
        with self._lock:
            lo, hi = self.cached_refinements[-1]
            mid = (lo + hi) / 2
            fm = self._f(mid)
            if fm == 0:
                nxt = (mid, mid)
            elif fm > 0:  # f is negative left of the unique real root
                nxt = (lo, mid)
            else:
                nxt = (mid, hi)
            self.cached_refinements.append(nxt)
            return nxt

    @property
    def isolating_interval(self) -> tuple[Fraction, Fraction]:
        return self.cached_refinements[0]

    def interval(self) -> tuple[Fraction, Fraction]:
        """Tightest cached interval for alpha."""
        return self.cached_refinements[-1]

    # convenient elements
    def element(self, coeffs: Iterable[_Number]) -> "FieldElement":
        return FieldElement(self, tuple(coeffs))

    def theta(self) -> "FieldElement":
        a = self.coeffs[0]
        return FieldElement(self, (0, Fraction(1, a), 0))

    def theta_inv(self) -> "FieldElement":
        return self.from_theta_basis((1, 0, 0))

    def from_theta_basis(self, coeffs: Sequence[_Number]) -> "FieldElement":
        return FieldElement(self, basis_convert(coeffs, "from_theta_basis", self))

    def to_theta_basis(self, x: "FieldElement") -> tuple[Fraction, Fraction, Fraction]:
        return basis_convert(x.coeffs, "to_theta_basis", self)

    def __repr__(self) -> str:
        return f"NumberFieldContext(form={self.coeffs})"


class FieldElement:
    """Immutable element ``c0 + c1*alpha + c2*alpha**2`` of Q(theta)."""

    __slots__ = ("context", "coeffs")

    def __init__(self, context: NumberFieldContext, coeffs: Sequence[_Number]):
        if len(coeffs) != 3:
            raise ValueError("a field element needs exactly three coordinates")
        object.__setattr__(self, "context", context)
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.context is not self.context:
                raise ContextMismatchError("elements belong to different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.context, (other, 0, 0))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.context, [x + y for x, y in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.context, [-x for x in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.context, [x - y for x, y in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.context, [x * other for x in self.coeffs])
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        x0, x1, x2 = self.coeffs
        y0, y1, y2 = o.coeffs
        e0 = x0 * y0
        e1 = x0 * y1 + x1 * y0
        e2 = x0 * y2 + x1 * y1 + x2 * y0
        e3 = x1 * y2 + x2 * y1
        e4 = x2 * y2
        p2, p1, p0 = self.context.monic_min_poly
        # alpha^3 = -p2 a^2 - p1 a - p0 ; alpha^4 = (p2^2-p1) a^2 + (p2 p1-p0) a + p2 p0
        return FieldElement(
            self.context,
            (
                e0 - p0 * e3 + p2 * p0 * e4,
                e1 - p1 * e3 + (p2 * p1 - p0) * e4,
                e2 - p2 * e3 + (p2 * p2 - p1) * e4,
            ),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(theta)")
            return FieldElement(self.context, [x / other for x in self.coeffs])
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = self.context.one, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.coeffs == (Fraction(other), 0, 0)
        if isinstance(other, FieldElement):
            return self.context is other.context and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((id(self.context), self.coeffs))

    def __repr__(self):
        c0, c1, c2 = self.coeffs
        return f"FieldElement({c0} + {c1}*alpha + {c2}*alpha^2)"

    def __str__(self):
        terms = []
        for c, mono in zip(self.coeffs, ("", "*alpha", "*alpha^2")):
            if c:
                terms.append(f"({c}){mono}" if mono else str(c))
        return " + ".join(terms) if terms else "0"

    # comparisons go through the exact sign
    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return self.coeffs[1] == 0 and self.coeffs[2] == 0

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.coeffs[0]

    def inverse(self) -> "FieldElement":
        return nf_inverse(self)

    def sign(self) -> int:
        return nf_sign(self)

    def value_range(self, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
        """Exact range of ``c0 + c1*x + c2*x**2`` for ``x`` in ``[lo, hi]``."""
        c0, c1, c2 = self.coeffs
        vals = [c0 + c1 * lo + c2 * lo * lo, c0 + c1 * hi + c2 * hi * hi]
        if c2:
            vertex = -c1 / (2 * c2)
            if lo < vertex < hi:
                vals.append(c0 + c1 * vertex + c2 * vertex * vertex)
        return min(vals), max(vals)

    def to_float(self, abs_err: _Number = Fraction(1, 10**13)) -> float:
        return nf_to_float(self, abs_err)

    def __float__(self):
        return self.to_float()


def nf_arith(x: FieldElement, y: FieldElement, op: str) -> FieldElement:
    if x.context is not y.context:
        raise ContextMismatchError("elements belong to different fields")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown operation {op!r}")


def _det3(m) -> Fraction:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def nf_inverse(x: FieldElement) -> FieldElement:
    """Inverse by Cramer's rule on the multiplication-by-x matrix."""
    if x.is_zero():
        raise ZeroDivisionError("zero has no inverse in Q(theta)")
    ctx = x.context
    cols = [(x * ctx.element(e)).coeffs for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    m = [[cols[j][i] for j in range(3)] for i in range(3)]
    det = _det3(m)  # the norm of x, nonzero in a field
    out = []
    for k in range(3):
        mk = [row[:] for row in m]
        for i in range(3):
            mk[i][k] = Fraction(1 if i == 0 else 0)
        out.append(_det3(mk) / det)
    return FieldElement(ctx, out)


def nf_sign(x: FieldElement) -> int:
    """Exact sign of the real number x(theta)."""
    c0, c1, c2 = x.coeffs
    if c1 == 0 and c2 == 0:
        return (c0 > 0) - (c0 < 0)
    ctx = x.context
    lo, hi = ctx.interval()
    while True:
        vmin, vmax = x.value_range(lo, hi)
        if vmin > 0:
            return 1
        if vmax < 0:
            return -1
        if lo == hi:  # alpha rational would contradict irreducibility
            raise ArithmeticError("degenerate isolating interval")
        lo, hi = ctx._refine()


def nf_to_float(x: FieldElement, abs_err: _Number = Fraction(1, 10**13)) -> float:
    abs_err = Fraction(abs_err)
    if abs_err <= 0:
        raise ValueError("abs_err must be positive")
    c0, c1, c2 = x.coeffs
    if c1 == 0 and c2 == 0:
        return float(c0)
    ctx = x.context
    lo, hi = ctx.interval()
    while True:
        vmin, vmax = x.value_range(lo, hi)
        if vmax - vmin <= abs_err:
            return float((vmin + vmax) / 2)
        lo, hi = ctx._refine()


def basis_convert(
    coeffs_in_basis: Sequence[_Number], direction: str, ctx: NumberFieldContext
) -> tuple[Fraction, Fraction, Fraction]:
    """Change coordinates between ``(theta^-1, 1, theta)`` and ``(1, alpha, alpha^2)``."""
    a, b, c, d = ctx.coeffs
    if d == 0:
        raise ValueError("theta^-1 is undefined when d = 0")
    e = [Fraction(v) for v in coeffs_in_basis]
    if direction == "from_theta_basis":
        ti, one, th = e
        # theta = alpha/a ; theta^-1 = -(alpha^2/a + b*alpha/a + c)/d
        return (one - ti * c / d, th / a - ti * b / (a * d), -ti / (a * d))
    if direction == "to_theta_basis":
        p0, p1, p2 = e
        # 1 -> (0,1,0); alpha -> (0,0,a); alpha^2 -> (-a*d, -a*c, -a*b)
        return (-a * d * p2, p0 - a * c * p2, a * p1 - a * b * p2)
    raise ValueError(f"unknown direction {direction!r}")
