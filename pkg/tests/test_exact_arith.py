from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cubeshape.exact_arith import (
    ContextMismatchError,
    NumberFieldContext,
    basis_convert,
    nf_arith,
    nf_inverse,
    nf_sign,
    nf_to_float,
)

CBRT2 = NumberFieldContext((1, 0, 0, -2))


def el(*c, ctx=CBRT2):
    return ctx.element(c)


def test_defining_relation():
    t = CBRT2.theta()
    assert nf_arith(t, t * t, "mul") == el(2, 0, 0)
    assert nf_arith(t, el(0, 0, 0), "add") == t
    assert nf_arith(t - 1, t * t + t + 1, "mul") == el(1, 0, 0)


def test_inverses():
    t = CBRT2.theta()
    assert nf_inverse(t) == el(0, 0, Fraction(1, 2))
    assert nf_inverse(el(1, 0, 0)) == el(1, 0, 0)
    assert nf_inverse(1 + t) == el(Fraction(1, 3), Fraction(-1, 3), Fraction(1, 3))
    with pytest.raises(ZeroDivisionError):
        nf_inverse(el(0, 0, 0))


def test_signs():
    t = CBRT2.theta()
    assert nf_sign(t - 1) == 1
    assert nf_sign(el(0, 0, 0)) == 0
    assert nf_sign(t * t - t - 1) == -1


def test_to_float():
    t = CBRT2.theta()
    assert abs(nf_to_float(t, Fraction(1, 10**12)) - 1.259921049894873) < 1e-12
    assert nf_to_float(el(0, 0, 0)) == 0.0
    assert abs(nf_to_float(nf_inverse(t), Fraction(1, 10**12)) - 0.7937005259841) < 1e-12


def test_basis_convert():
    assert basis_convert((0, 1, 0), "from_theta_basis", CBRT2) == (1, 0, 0)
    assert basis_convert((1, 0, 0), "from_theta_basis", CBRT2) == (0, 0, Fraction(1, 2))
    with pytest.raises(ValueError):
        basis_convert((1, 0, 0), "from_theta_basis", NumberFieldContext((1, 1, 1, 0)))
    assert CBRT2.from_theta_basis((1, 0, 0)) == el(0, 0, Fraction(1, 2))
    x = CBRT2.from_theta_basis((3, -5, 7))
    assert CBRT2.to_theta_basis(x) == (3, -5, 7)


def test_context_mismatch():
    other = NumberFieldContext((1, 0, 0, -3))
    with pytest.raises(ContextMismatchError):
        nf_arith(CBRT2.theta(), other.theta(), "add")


FORMS = [(1, 0, 0, -2), (1, 1, 12, -22), (11, 4, -1, -4), (1, 1, 2, 3)]
coef = st.fractions(min_value=-20, max_value=20, max_denominator=7)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FORMS), st.tuples(coef, coef, coef), st.tuples(coef, coef, coef))
def test_field_axioms_and_float_consistency(F, u, v):
    ctx = NumberFieldContext(F)
    x, y = ctx.element(u), ctx.element(v)
    assert x + y - y == x
    assert abs((x * y).to_float() - x.to_float() * y.to_float()) < 1e-6 * (1 + abs(x.to_float() * y.to_float()))
    if not x.is_zero():
        assert x * nf_inverse(x) == ctx.one
        assert nf_sign(x) == (1 if x.to_float() > 0 else -1)
    assert ctx.to_theta_basis(ctx.from_theta_basis(u)) == tuple(u)
