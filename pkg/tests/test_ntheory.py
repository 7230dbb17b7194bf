import math

from hypothesis import given, strategies as st

from cubeshape import ntheory


def test_factorize_small():
    assert ntheory.factorize(48020) == {2: 2, 5: 1, 7: 4}
    assert ntheory.factorize(1) == {}


@given(st.integers(min_value=2, max_value=10**12))
def test_factorize_roundtrip(n):
    f = ntheory.factorize(n)
    assert math.prod(p**e for p, e in f.items()) == n
    assert all(ntheory.is_probable_prime(p) for p in f)


def test_fundamental_discriminant():
    assert ntheory.fundamental_discriminant(-48020) == -20
    assert ntheory.fundamental_discriminant(-108) == -3
    assert ntheory.fundamental_discriminant(-175) == -7


@given(st.integers(-500, 500), st.integers(-500, 500), st.integers(1, 300))
def test_solve_linear_congruence(a, b, m):
    sol = ntheory.solve_linear_congruence(a, b, m)
    brute = [x for x in range(m) if (a * x - b) % m == 0]
    if sol is None:
        assert brute == []
    else:
        x0, step = sol
        assert set(brute) == {(x0 + k * step) % m for k in range(m)}
