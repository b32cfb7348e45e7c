import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ribetkit.matrices import (Mat2, conjugate_simultaneous, det_leibniz, det_n, multilinearity_expand,
                               word_product)
from ribetkit.poly import PolyRing, VariableTable
from ribetkit.rings import ZZ, RingSpec, make_ring

R8 = make_ring(RingSpec.truncated_dvr(2, 3))
square = st.integers(0, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n))
mat2 = st.lists(st.integers(0, 7), min_size=4, max_size=4).map(
    lambda e: Mat2.from_rows([e[:2], e[2:]], R8))


@given(square)
@settings(max_examples=80, deadline=None)
def test_det_matches_sympy_and_leibniz(M):
    expected = sympy.Matrix(M).det() if M else 1
    assert det_n(M, ZZ) == expected
    assert det_leibniz(M, ZZ) == expected


@given(square)
@settings(max_examples=50, deadline=None)
def test_det_mod_is_reduction_of_integer_det(M):
    assert det_n([[R8(x) for x in row] for row in M], R8) == det_n(M, ZZ) % 8


@given(mat2, mat2)
def test_mat2_trace_det_identities(A, B):
    assert (A * B).det() == R8.mul(A.det(), B.det())
    assert (A * B).trace() == (B * A).trace()
    # Cayley-Hamilton
    t, d = A.trace(), A.det()
    assert (A * A - A.scale(t) + Mat2.identity(R8).scale(d)).is_zero()


@given(mat2, st.lists(mat2, min_size=1, max_size=3))
def test_simultaneous_conjugation_preserves_trace_det(g, Ms):
    if not R8.is_unit(g.det()):
        return
    for M, C in zip(Ms, conjugate_simultaneous(g, Ms)):
        assert (M.trace(), M.det()) == (C.trace(), C.det())
        assert g * C == M * g


def test_word_product_order():
    A = Mat2.from_rows([[1, 1], [0, 1]], ZZ)
    B = Mat2.from_rows([[1, 0], [1, 1]], ZZ)
    assert word_product([A, B], (0, 1), ZZ) == A * B
    assert word_product([A, B], (), ZZ) == Mat2.identity(ZZ)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n),
    st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n))))
@settings(max_examples=50, deadline=None)
def test_multilinearity_expansion(pair):
    M, Mp = pair
    terms = multilinearity_expand(M, Mp, ZZ)
    assert sum(s * det_n(N, ZZ) for s, N in terms) == det_n(Mp, ZZ) - det_n(M, ZZ)


def test_det_over_polynomials():
    t = VariableTable(["x", "y"])
    P = PolyRing(t)
    x, y = P.var("x"), P.var("y")
    M = [[x, y, P.one], [P.one, x, y], [y, P.one, x]]
    assert det_n(M, P) == x ** 3 + y ** 3 + P.one - x * y.scale(3)
    assert det_leibniz(M, P) == det_n(M, P)
