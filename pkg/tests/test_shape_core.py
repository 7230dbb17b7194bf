import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cubeshape.enumeration import enumerate_oriented
from cubeshape.quad_geodesics import BinaryQuadraticForm as BQF, gauss_reduce_float
from cubeshape.shape_core import (
    ShapeError,
    ShapeGram,
    ShapePoint,
    boundary_test,
    field_of,
    majorant_check_exact,
    majorant_check_numeric,
    minkowski_gram,
    on_geodesic_certificate,
    polynomial_roots,
    re_shape_is_rational,
    reduce_to_gauss,
    reduced_shape,
    shape_gram,
    shape_point,
)

CBRT2 = 2 ** (1 / 3)


def test_minkowski_gram_pure_cubic():
    F = (1, 0, 0, -2)
    ctx = field_of(F)
    G = minkowski_gram(F, ctx)
    t, ti = ctx.theta(), ctx.theta_inv()
    assert G[0][0] == 3 and G[1][1] == 6 * ti and G[2][2] == 6 * t
    assert all(G[i][j] == 0 for i in range(3) for j in range(3) if i != j)


def test_minkowski_gram_entry():
    F = (1, 1, 12, -22)
    ctx = field_of(F)
    G = minkowski_gram(F, ctx)
    assert G[0] == [3, -1, 12]
    assert G[1][1] == 66 * ctx.theta_inv() - 12 - ctx.theta()


def test_shape_gram_examples():
    ctx = field_of((1, 0, 0, -2))
    sg = shape_gram((1, 0, 0, -2), ctx)
    assert (sg.g11, sg.g12, sg.g22) == (54 * ctx.theta_inv(), 0, 54 * ctx.theta())
    ctx = field_of((1, 1, 12, -22))
    sg = shape_gram((1, 1, 12, -22), ctx)
    # the theta coefficient is -9; it is what makes the float value 293.4
    assert sg.g11 == 594 * ctx.theta_inv() - 111 - 9 * ctx.theta()
    assert abs(sg.g11.to_float() - 293.4) < 0.1


def test_shape_point_examples():
    z = shape_point(ShapeGram.from_form(1, 0, 1)).z
    assert abs(z - 1j) < 1e-15
    z = shape_point(ShapeGram.from_form(2, 2, 3))
    assert z.x_exact == Fraction(1, 2) and z.y_squared_exact == Fraction(5, 4)
    pt = shape_point(shape_gram((1, 0, 0, -2)))
    assert pt.x_exact == 0 and abs(pt.y_float - CBRT2) < 1e-12
    with pytest.raises((ShapeError, ValueError)):
        shape_point(ShapeGram.from_form(1, 4, 1))


def test_reduce_to_gauss_examples():
    pt = shape_point(shape_gram((1, 0, 0, -2)))
    red, g = reduce_to_gauss(pt)
    assert g == ((1, 0), (0, 1)) and red.x_exact == 0
    shifted = ShapePoint.from_exact(pt.x_exact + 1, pt.y_squared_exact)
    red, g = reduce_to_gauss(shifted)
    assert red.x_exact == 0 and abs(red.y_float - CBRT2) < 1e-12
    raw = shape_point(shape_gram((1, 1, 12, -22)))
    assert abs(raw.z - complex(-0.2956, 2.7724)) < 1e-3
    red, _ = reduce_to_gauss(raw)
    assert abs(red.z - complex(0.2956, 2.7724)) < 1e-3


@settings(max_examples=200, deadline=None)
@given(st.fractions(-50, 50, max_denominator=40), st.fractions(Fraction(1, 40), 10, max_denominator=40))
def test_gauss_reduction_bounds(x, y2):
    red, g = reduce_to_gauss(ShapePoint.from_exact(x, y2))
    assert 0 <= red.x_exact <= Fraction(1, 2)
    assert red.norm_squared >= 1
    assert abs(det := g[0][0] * g[1][1] - g[0][1] * g[1][0]) == 1
    # the float reducer lands on the same point
    z = gauss_reduce_float(complex(float(x), math.sqrt(float(y2))))
    assert abs(z - red.z) < 1e-9 or abs(abs(z) - 1) < 1e-9  # unit circle: z and its mirror both reduced


def test_rationality_and_boundary():
    ok, x = re_shape_is_rational((1, 0, 0, -2))
    assert ok and x == 0
    assert not re_shape_is_rational((11, 4, -1, -4))[0]
    assert not re_shape_is_rational((1, 1, 12, -22))[0]
    assert boundary_test((1, 0, 0, -2)) == "on_x_equals_0"
    assert boundary_test((1, 1, 2, 3)) == "interior"
    assert boundary_test((11, 4, -1, -4)) == "interior"


def test_on_geodesic_certificate_examples():
    assert on_geodesic_certificate((1, 0, 0, -2))
    assert on_geodesic_certificate((1, 1, 12, -22))
    assert on_geodesic_certificate((11, 4, -1, -4))


def test_majorant_exact_examples():
    assert majorant_check_exact((1, 0, 0, -2))
    assert majorant_check_exact((1, 1, 12, -22))
    assert majorant_check_exact((1, 1, 2, 3))


@pytest.mark.parametrize("coeffs", [[1, 0, 0, -2], [1, 0, 0, -1, -1], [1, 0, 0, 0, -1, -1], [1, 0, -2], [1, 1, 1, 1, 1, 3]])
def test_majorant_numeric(coeffs):
    full, perp = majorant_check_numeric(coeffs, 1e-8)
    assert full < 1e-8 and perp < 1e-8


def test_numeric_errors():
    with pytest.raises(ValueError):
        majorant_check_numeric([1, -2, 1], 1e-8)  # (x-1)^2


def test_polynomial_roots_against_numpy():
    for coeffs in ([1, 0, 0, -2], [1, 0, 0, -1, -1], [1, -3, 0, 7, 2, -1]):
        ours = np.sort_complex(polynomial_roots(coeffs))
        ref = np.sort_complex(np.roots(coeffs))
        assert np.max(np.abs(ours - ref)) < 1e-9


def _numeric_shape(F):
    """Independent float pipeline: roots -> Minkowski vectors -> perp projection -> Gram."""
    a, b, c, d = F
    roots = np.roots([a, b, c, d])
    emb = lambda f: np.array([f(r) for r in roots])  # noqa: E731
    basis = [emb(lambda r: a * r), emb(lambda r: a * r * r + b * r)]
    perp = [3 * v - v.sum().real for v in basis]
    ip = lambda u, v: float(np.real(np.sum(u * np.conj(v))))  # noqa: E731
    g11, g12, g22 = ip(perp[0], perp[0]), ip(perp[0], perp[1]), ip(perp[1], perp[1])
    z = complex(g12 / g11, math.sqrt(g11 * g22 - g12 * g12) / g11)
    return gauss_reduce_float(z)


def _sample_forms():
    forms = []
    for Q in (BQF(1, 8, 1), BQF(2, 10, 5), BQF(3, 12, 7), BQF(6, 18, 11), BQF(1, 3, 1), BQF(5, 15, 9), BQF(1, 7, 1)):
        forms += [rec.form for rec in enumerate_oriented(Q, 10**6, threads=1)]
    forms = sorted(set(forms))
    step = max(1, len(forms) // 100)
    return forms[::step][:100]


def test_shape_matches_independent_numeric_pipeline():
    forms = _sample_forms()
    assert len(forms) == 100
    for F in forms:
        red, _ = reduced_shape(F)
        assert abs(red.z - _numeric_shape(F)) < 1e-9, F
