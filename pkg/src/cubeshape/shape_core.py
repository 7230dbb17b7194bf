"""Exact shapes of complex cubic rings.

For a binary cubic form ``F`` with ``disc F < 0`` the shape of ``R_F`` is the
point of the upper half plane attached to the Gram matrix of the projected
lattice ``M^perp`` in the basis ``alpha^perp = 3 alpha + b``,
``beta^perp = 3 beta - c``.  Entries live in Q(theta), theta the real root
of ``F(x, 1)``, and every decision below uses exact signs there.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .cubic_rings import BinaryCubicForm, disc, hessian, is_irreducible, trace_zero_gram
from .exact_arith import FieldElement, NumberFieldContext, nf_to_float

Exact = Union[FieldElement, Fraction, int]

_FLOAT_ERR = Fraction(1, 10**15)


class ShapeError(ValueError):
    pass


class RootFindingError(ArithmeticError):
    pass


def _sign(v: Exact) -> int:
    if isinstance(v, FieldElement):
        return v.sign()
    return (v > 0) - (v < 0)


def _to_float(v: Exact) -> float:
    if isinstance(v, FieldElement):
        return nf_to_float(v, _FLOAT_ERR)
    return float(v)


def field_of(F) -> NumberFieldContext:
    """Q(theta) for a complex cubic form, with the usual preconditions."""
    F = BinaryCubicForm(*F)
    if disc(F) >= 0:
        raise ShapeError(f"form {tuple(F)} is not complex cubic (disc = {disc(F)})")
    if not is_irreducible(F):
        raise ShapeError(f"form {tuple(F)} is reducible")
    return NumberFieldContext(F)


def minkowski_gram(F, ctx: NumberFieldContext | None = None) -> list[list[FieldElement]]:
    """Gram matrix of the Minkowski lattice of ``R_F`` in the basis 1, alpha, beta."""
    ctx = ctx or field_of(F)
    a, b, c, d = F
    th = ctx.from_theta_basis
    m12, m13 = ctx.one * (-b), ctx.one * c
    m22 = th((-3 * a * d, -a * c, -a * b))
    m23 = th((-b * d, -b * c, -a * c))
    m33 = th((-c * d, -b * d, -3 * a * d))
    return [
        [ctx.one * 3, m12, m13],
        [m12, m22, m23],
        [m13, m23, m33],
    ]


@dataclass(frozen=True)
class ShapeGram:
    """Gram matrix ``[[g11, g12], [g12, g22]]`` of ``M^perp``."""

    context: NumberFieldContext | None
    g11: Exact
    g12: Exact
    g22: Exact

    def __post_init__(self):
        if _sign(self.g11) <= 0 or _sign(self.g11 * self.g22 - self.g12 * self.g12) <= 0:
            raise ShapeError("Gram matrix is not positive definite")

    @property
    def form(self) -> tuple[Exact, Exact, Exact]:
        """As a quadratic form ``(r_M, s_M, t_M)``."""
        return self.g11, 2 * self.g12, self.g22

    @classmethod
    def from_form(cls, r, s, t) -> "ShapeGram":
        """Rational positive definite form ``r x^2 + s xy + t y^2``."""
        return cls(None, Fraction(r), Fraction(s) / 2, Fraction(t))


def shape_gram(F, ctx: NumberFieldContext | None = None) -> ShapeGram:
    ctx = ctx or field_of(F)
    a, b, c, d = F
    th = ctx.from_theta_basis
    g11 = th((-27 * a * d, -3 * (b * b + 3 * a * c), -9 * a * b))
    g12 = th((-9 * b * d, -6 * b * c, -9 * a * c))
    g22 = th((-9 * c * d, -3 * (c * c + 3 * b * d), -27 * a * d))
    return ShapeGram(ctx, g11, g12, g22)


@dataclass(frozen=True)
class ShapePoint:
    x_exact: Exact
    y_squared_exact: Exact
    x_float: float
    y_float: float

    @property
    def z(self) -> complex:
        return complex(self.x_float, self.y_float)

    @property
    def norm_squared(self) -> Exact:
        return self.x_exact * self.x_exact + self.y_squared_exact

    @classmethod
    def from_exact(cls, x: Exact, y2: Exact) -> "ShapePoint":
        if _sign(y2) <= 0:
            raise ShapeError("point is not in the upper half plane")
        return cls(x, y2, _to_float(x), math.sqrt(_to_float(y2)))


def shape_point(sg: ShapeGram) -> ShapePoint:
    g11, g12, g22 = sg.g11, sg.g12, sg.g22
    inv = 1 / g11 if isinstance(g11, FieldElement) else Fraction(1) / g11
    x = g12 * inv
    y2 = (g11 * g22 - g12 * g12) * inv * inv
    return ShapePoint.from_exact(x, y2)


Unimodular = tuple[tuple[int, int], tuple[int, int]]


def _mul(g, h):
    return (
        (g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
        (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]),
    )


def _exact_round(x: Exact) -> int:
    """``n`` with ``-1/2 < x - n <= 1/2``."""
    n = math.floor(_to_float(x) + 0.5)
    while _sign(x - n - Fraction(1, 2)) > 0:
        n += 1
    while _sign(x - n + Fraction(1, 2)) <= 0:
        n -= 1
    return n


def reduce_to_gauss(z: ShapePoint) -> tuple[ShapePoint, Unimodular]:
    """GL_2(Z)-move ``z`` into ``{0 <= x <= 1/2, |z| >= 1}``.

    Returns the reduced point and ``g`` with ``reduced = g.z`` (Moebius,
    conjugating first when ``det g < 0``).
    """
    x, N = z.x_exact, z.norm_squared
    g: Unimodular = ((1, 0), (0, 1))
    for _ in range(100_000):
        n = _exact_round(x)
        if n:
            x, N = x - n, N - 2 * n * x + n * n
            g = _mul(((1, -n), (0, 1)), g)
        if _sign(N - 1) < 0:
            # z -> -1/z
            inv = 1 / N
            x, N = -x * inv, inv
            g = _mul(((0, -1), (1, 0)), g)
            continue
        break
    else:  # pragma: no cover - reduction always terminates
        raise ArithmeticError("Gauss reduction did not terminate")
    if _sign(x) < 0:
        x = -x
        g = _mul(((-1, 0), (0, 1)), g)
    y2 = N - x * x
    if isinstance(z.x_exact, FieldElement) and not isinstance(x, FieldElement):
        x = z.x_exact.context.one * x
    return ShapePoint.from_exact(x, y2), g


def reduced_shape(F, ctx: NumberFieldContext | None = None) -> tuple[ShapePoint, Unimodular]:
    return reduce_to_gauss(shape_point(shape_gram(F, ctx)))


def re_shape_is_rational(F, ctx: NumberFieldContext | None = None) -> tuple[bool, FieldElement]:
    sg = shape_gram(F, ctx)
    x = sg.g12 / sg.g11
    return x.is_rational(), x


def boundary_test(F, ctx: NumberFieldContext | None = None) -> str:
    """Where the reduced shape sits relative to the Gauss domain boundary."""
    pt, _ = reduced_shape(F, ctx)
    x, N = pt.x_exact, pt.norm_squared
    if x == 0:
        return "on_x_equals_0"
    if x == Fraction(1, 2):
        return "on_x_equals_half"
    if N == 1:
        return "on_unit_circle"
    return "interior"


def on_geodesic_certificate(F, ctx: NumberFieldContext | None = None) -> bool:
    """Exact check ``2p t_M - q s_M + 2u r_M = 0`` with ``(p, q, u) = H(F)``."""
    p, q, u = hessian(F)
    r_m, s_m, t_m = shape_gram(F, ctx).form
    return (t_m * (2 * p) - s_m * q + r_m * (2 * u)).is_zero()


def majorant_check_exact(F, ctx: NumberFieldContext | None = None) -> bool:
    """``M T^{-1} M = T`` over Q(theta), M the shape Gram, T the trace-zero Gram."""
    sg = shape_gram(F, ctx)
    (t11, t12), (_, t22) = trace_zero_gram(F)
    det_t = t11 * t22 - t12 * t12
    if det_t == 0:
        raise ShapeError(f"trace-zero form of {tuple(F)} is degenerate")
    m11, m12, m22 = sg.g11, sg.g12, sg.g22
    # M adj(T) M == det(T) T, avoiding rational inverses
    a11, a12, a22 = t22, -t12, t11
    p11 = m11 * a11 + m12 * a12
    p12 = m11 * a12 + m12 * a22
    p21 = m12 * a11 + m22 * a12
    p22 = m12 * a12 + m22 * a22
    lhs = (
        p11 * m11 + p12 * m12,
        p11 * m12 + p12 * m22,
        p21 * m12 + p22 * m22,
    )
    rhs = (det_t * t11, det_t * t12, det_t * t22)
    return all((l - r).is_zero() for l, r in zip(lhs, rhs))


# -- numeric majorant check in any degree ---------------------------------


def _poly_rem(num: list[Fraction], den: list[Fraction]) -> list[Fraction]:
    """Remainder of polynomials given highest-degree first."""
    num = list(num)
    while len(num) >= len(den) and any(num):
        if num[0] == 0:
            num.pop(0)
            continue
        q = num[0] / den[0]
        for i in range(len(den)):
            num[i] -= q * den[i]
        num.pop(0)
    while num and num[0] == 0:
        num.pop(0)
    return num


def is_squarefree(coeffs: Sequence[int]) -> bool:
    """gcd(f, f') is constant, computed exactly."""
    f = [Fraction(c) for c in coeffs]
    n = len(f) - 1
    g = [c * (n - i) for i, c in enumerate(f[:-1])]
    while g:
        f, g = g, _poly_rem(f, g)
    return len(f) == 1


@dataclass(frozen=True)
class EmbeddingMatrix:
    """``A[j, k] = sigma_j(x^k)`` for the power basis of Z[x]/(f)."""

    degree: int
    A: np.ndarray
    source_polynomial: tuple[int, ...]


def polynomial_roots(coeffs: Sequence[int], tol: float = 1e-10, seed: int = 0, max_restarts: int = 8) -> np.ndarray:
    """All complex roots by Aberth iteration, restarting from perturbed starts."""
    c = np.array(coeffs, dtype=complex)
    c = c / c[0]
    n = len(c) - 1
    dc = np.polyder(c)
    bound = 1 + max(abs(c[1:]))
    rng = random.Random(seed)
    for attempt in range(max_restarts):
        phase = rng.uniform(0, 2 * math.pi)
        radius = bound * rng.uniform(0.5, 1.0)
        z = np.array([radius * cmath.exp(1j * (phase + 2 * math.pi * k / n + 0.3)) for k in range(n)])
        for _ in range(500):
            ratio = np.polyval(c, z) / np.polyval(dc, z)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1)
            s = (1 / diff).sum(axis=1) - 1  # drop the unit diagonal
            step = ratio / (1 - ratio * s)
            z = z - step
            if np.max(np.abs(step)) < 1e-16 * max(1.0, np.max(np.abs(z))):
                break
        # Newton polish
        for _ in range(3):
            z = z - np.polyval(c, z) / np.polyval(dc, z)
        scale = np.polyval(np.abs(c), np.abs(z))
        if np.all(np.abs(np.polyval(c, z)) <= tol * np.maximum(scale, 1.0)):
            return z
    raise RootFindingError(f"root finder failed to converge for {list(coeffs)}")


def embedding_matrix(coeffs: Sequence[int], roots: np.ndarray | None = None) -> EmbeddingMatrix:
    n = len(coeffs) - 1
    if roots is None:
        roots = polynomial_roots(coeffs)
    A = np.array([[r**k for k in range(n)] for r in roots])
    return EmbeddingMatrix(n, A, tuple(coeffs))


def _majorant_residual(B: np.ndarray) -> float:
    M = (B.conj().T @ B).real
    T = (B.T @ B).real
    R = M @ np.linalg.solve(T, M) - T
    return float(np.max(np.abs(R)))


def majorant_check_numeric(coeffs: Sequence[int], tol: float = 1e-8) -> tuple[float, float]:
    """Residuals of ``M T^{-1} M = T`` for the full and the trace-zero lattice.

    ``coeffs`` lists a monic integer polynomial, highest degree first.
    """
    if len(coeffs) < 3 or coeffs[0] != 1:
        raise ValueError("need a monic polynomial of degree >= 2")
    if not is_squarefree(coeffs):
        raise ShapeError("polynomial has repeated roots")
    emb = embedding_matrix(coeffs)
    A, n = emb.A, emb.degree
    full = _majorant_residual(A)
    traces = A.sum(axis=0).real
    perp = np.column_stack([n * A[:, k] - traces[k] * A[:, 0] for k in range(1, n)])
    return full, _majorant_residual(perp)
