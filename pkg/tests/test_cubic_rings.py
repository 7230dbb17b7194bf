import pytest
from hypothesis import given, settings, strategies as st

from cubeshape.cubic_rings import (
    BinaryCubicForm,
    DegenerateFormError,
    LiteralError,
    act,
    classify_3,
    disc,
    hessian,
    is_irreducible,
    is_maximal,
    is_maximal_at,
    primitive_tzf,
    resolvent_disc,
    trace_zero_gram,
)
from cubeshape.enumeration import delta_v
from cubeshape.quad_geodesics import BinaryQuadraticForm as BQF


def test_disc_examples():
    assert disc((1, 0, 0, -2)) == -108
    assert disc((1, 0, 0, 0)) == 0
    assert disc((1, 1, 2, 3)) == -175
    assert disc((11, 4, -1, -4)) == -48020
    assert disc((1, 1, 12, -22)) == -24500


def test_hessian_examples():
    assert hessian((1, 0, 0, -2)) == (0, 18, 0)
    assert hessian((1, 1, 12, -22)) == (-35, 210, 210)
    assert hessian((11, 4, -1, -4)) == (49, 392, 49)


def test_trace_zero_gram():
    assert trace_zero_gram((1, 0, 0, -2)) == ((0, 54), (54, 0))
    assert trace_zero_gram((1, 1, 12, -22)) == ((-210, 630), (630, 1260))


def test_primitive_tzf():
    assert primitive_tzf((1, 0, 0, -2)) == ((0, 1, 0), 18)
    assert primitive_tzf((1, 1, 12, -22)) == ((-1, 6, 6), 35)
    assert primitive_tzf((11, 4, -1, -4)) == ((1, 8, 1), 49)


def test_act():
    F = BinaryCubicForm(3, -1, 4, 1)
    assert act(((1, 0), (0, 1)), F) == F
    assert act(((0, 1), (1, 0)), (1, 2, 3, 4)) == (-4, -3, -2, -1)
    G = act(((1, 0), (1, 1)), (1, 0, 0, -2))
    assert G == (1, 3, 3, -1) and disc(G) == -108


def test_irreducible():
    assert is_irreducible((1, 0, 0, -2))
    assert not is_irreducible((3, 1, -1, -3))
    assert not is_irreducible((0, 1, 0, -2))


def test_maximality():
    assert is_maximal_at((1, 0, 0, -2), 2)
    assert not is_maximal_at((2, 4, 6, 8), 2)
    assert not is_maximal_at((1, 0, 0, -16), 2)
    with pytest.raises(ValueError):
        is_maximal_at((1, 0, 0, -2), 4)
    assert is_maximal((1, 0, 0, -2))
    assert not is_maximal((1, 0, 0, -16))
    assert is_maximal((1, 1, 2, 3))


def test_resolvent_and_classify():
    assert resolvent_disc((1, 0, 0, -2)) == -3
    assert resolvent_disc((11, 4, -1, -4)) == -20
    assert resolvent_disc((1, 1, 2, 3)) == -7
    assert classify_3((1, 0, 0, -2)) == "wild"
    assert disc((1, -2, -1, -1)) == -87 and is_maximal((1, -2, -1, -1))
    assert classify_3((1, -2, -1, -1)) == "tame"
    assert classify_3((1, 1, 2, 3)) == "unramified_or_split"


def test_parse_literal():
    assert BinaryCubicForm.parse("1,0,0,-2") == (1, 0, 0, -2)
    with pytest.raises(LiteralError) as exc:
        BinaryCubicForm.parse("1,0,x,-2")
    assert exc.value.position >= 0


def test_worked_example_cross_check():
    # the two discriminant formulas agree on the (4,-1) point of (1,8,1)
    assert delta_v(4, -1, BQF(1, 8, 1)) == disc((11, 4, -1, -4))
    assert delta_v(1, -1, BQF(1, 8, 1)) == disc((3, 1, -1, -3)) == -2000


small = st.integers(-6, 6)
unimodular = st.sampled_from(
    [((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 1), (0, 1)), ((1, 0), (1, 1)), ((0, -1), (1, 0)), ((2, 1), (1, 1)),
     ((1, -2), (0, 1)), ((-1, 0), (0, 1))]
)


@settings(max_examples=150, deadline=None)
@given(st.tuples(small, small, small, small), unimodular)
def test_invariants_under_gl2(F, g):
    G = act(g, F)
    assert disc(G) == disc(F)
    if disc(F) != 0:
        det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        # Hessian is a covariant: it transforms like a quadratic form (twisted by det)
        H = BQF(*hessian(F)).act(g)
        assert tuple(hessian(G)) == tuple(H) or tuple(hessian(G)) == tuple(det * v for v in H)
        assert is_irreducible(G) == is_irreducible(F)
        if disc(F) < 0 and is_irreducible(F):
            assert is_maximal(G) == is_maximal(F)


def test_degenerate_inputs():
    with pytest.raises(DegenerateFormError):
        primitive_tzf((1, 0, 0, 0))
    with pytest.raises(ValueError):
        is_maximal((1, 0, 0, 0))
    with pytest.raises(ValueError):
        classify_3((1, 0, 0, -9))  # ord_3(disc) = 7: not a maximal ring
    assert classify_3((1, 0, 0, -3)) == "wild"
