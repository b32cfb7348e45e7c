import random
from itertools import product

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form

from ribetkit.fitting import (PROPERTIES, PresentedModule, faithful_quotient_check,
                              fitting_from_smith, fitting_ideal, hnf_index, howell_form, kernel_mod,
                              run_property_suite, smith_form, solve_mod)
from ribetkit.rings import ZZ, RingSpec, ideal_in_ring, make_ring


def matrices(max_n=4, max_m=4, bound=9):
    return st.tuples(st.integers(1, max_n), st.integers(1, max_m)).flatmap(
        lambda nm: st.lists(st.lists(st.integers(-bound, bound), min_size=nm[1], max_size=nm[1]),
                            min_size=nm[0], max_size=nm[0]))


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


@given(matrices())
@settings(max_examples=80, deadline=None)
def test_smith_form_matches_sympy(A):
    sf = smith_form(A)
    assert _matmul(_matmul(sf.U, A), sf.V) == sf.S
    ref = smith_normal_form(sympy.Matrix(A), domain=sympy.ZZ)
    k = min(len(A), len(A[0]))
    ref_diag = sorted(abs(ref[i, i]) for i in range(k))
    assert sorted(abs(d) for d in sf.diagonal[:k]) == ref_diag
    nz = [d for d in sf.diagonal if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@given(matrices(max_n=5, max_m=3))
@settings(max_examples=80, deadline=None)
def test_fitting_minors_equal_smith_product(A):
    m = len(A[0])
    assert fitting_ideal(PresentedModule(ZZ, A, m)) == fitting_from_smith(A, m)


@given(matrices(max_n=4, max_m=3, bound=5))
@settings(max_examples=60, deadline=None)
def test_integer_fitting_is_order(A):
    m = len(A[0])
    F = fitting_ideal(PresentedModule(ZZ, A, m))
    assert F == ideal_in_ring(ZZ, [hnf_index(A, m)])


def test_fitting_examples():
    R = make_ring(RingSpec.truncated_dvr(2, 3))
    # ZZ/8 / (2) has Fitting ideal (2)
    assert fitting_ideal(PresentedModule(R, [[2]], 1)) == ideal_in_ring(R, [2])
    # free module of rank 1: no relations
    assert fitting_ideal(PresentedModule(R, [], 1)).is_zero()
    # zero module
    assert fitting_ideal(PresentedModule(R, [], 0)).is_unit_ideal()
    assert fitting_ideal(PresentedModule(ZZ, [[2, 0], [0, 3]], 2)) == ideal_in_ring(ZZ, [6])


def _span(A, N, width):
    span = {tuple([0] * width)}
    for row in A:
        span = {tuple((s + k * x) % N for s, x in zip(v, row)) for v in span for k in range(N)}
    return span


@given(st.sampled_from([4, 8, 9, 6, 12]), st.integers(1, 3).flatmap(
    lambda m: st.lists(st.lists(st.integers(0, 11), min_size=m, max_size=m), min_size=0, max_size=3)))
@settings(max_examples=60, deadline=None)
def test_howell_form_span(N, A):
    width = len(A[0]) if A else 2
    H = howell_form(A, N, width)
    span = _span(A, N, width)
    assert H.span_size() == len(span)
    for v in product(range(N), repeat=width):
        assert H.contains(v) == (v in span)


@given(st.sampled_from([4, 8, 9]), st.integers(1, 3).flatmap(
    lambda m: st.lists(st.lists(st.integers(0, 8), min_size=m, max_size=m), min_size=1, max_size=3)),
    st.data())
@settings(max_examples=60, deadline=None)
def test_solve_and_kernel_mod(N, A, data):
    k, m = len(A), len(A[0])
    target = data.draw(st.lists(st.integers(0, N - 1), min_size=m, max_size=m))
    sols = [x for x in product(range(N), repeat=k)
            if all(sum(xi * A[i][j] for i, xi in enumerate(x)) % N == t for j, t in enumerate(target))]
    x = solve_mod(A, target, N)
    if not sols:
        assert x is None
    else:
        assert tuple(x) == min(sols)
    kernel = [x for x in product(range(N), repeat=k)
              if all(sum(xi * A[i][j] for i, xi in enumerate(x)) % N == 0 for j in range(m))]
    K = kernel_mod(A, N)
    assert (K.span_size() if K.rows else 1) == len(kernel)


@pytest.mark.parametrize("which", PROPERTIES)
def test_property_suite_small(which):
    res = run_property_suite(random.Random(f"unit:{which}"), 40, [which])[which]
    assert res["passed"] == res["instances"] == 40


def test_faithful_quotient_over_fiber_product():
    base = RingSpec.truncated_dvr(2, 2)
    T = make_ring(RingSpec.fiber_product(base, base, 2))
    res = faithful_quotient_check(T, [(1, 0), (0, 1)], [(2, 0)])
    assert res["faithful"] and res["contained"]
    # the ambient product has 16 elements
    assert res["span_size"] == 16
    res = faithful_quotient_check(T, [(2, 0), (0, 2)], [(2, 2)])
    assert not res["faithful"]
