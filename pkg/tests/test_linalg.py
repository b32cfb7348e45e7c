from fractions import Fraction

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ribetkit.linalg import Echelon, rank_mod_p, solve_sparse

rows_strategy = st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=1, max_size=5)


def as_vec(row):
    return {k: x for k, x in enumerate(row) if x}


@given(rows_strategy)
@settings(max_examples=60, deadline=None)
def test_rank_over_QQ_matches_sympy(rows):
    ech = Echelon()
    for r in rows:
        ech.add({k: Fraction(x) for k, x in as_vec(r).items()})
    assert ech.rank == sympy.Matrix(rows).rank()


@given(rows_strategy, st.sampled_from([2, 3, 5]))
@settings(max_examples=60, deadline=None)
def test_rank_mod_p_via_sympy_gf(rows, p):
    from sympy.polys.matrices import DomainMatrix
    from sympy import GF
    ref = DomainMatrix([[GF(p)(x) for x in r] for r in rows], (len(rows), 4), GF(p)).rank()
    assert rank_mod_p([as_vec(r) for r in rows], p) == ref


@given(rows_strategy, st.lists(st.integers(-3, 3), min_size=5, max_size=5))
@settings(max_examples=60, deadline=None)
def test_solve_reconstructs_target(rows, coeffs):
    target = {}
    for c, r in zip(coeffs, rows):
        for k, x in as_vec(r).items():
            target[k] = target.get(k, 0) + c * x
    target = {k: Fraction(x) for k, x in target.items() if x}
    sol = solve_sparse([(i, {k: Fraction(x) for k, x in as_vec(r).items()}) for i, r in enumerate(rows)], target)
    assert sol is not None
    back = {}
    for i, c in sol.items():
        for k, x in as_vec(rows[i]).items():
            back[k] = back.get(k, 0) + c * x
    assert {k: x for k, x in back.items() if x} == target


def test_solve_reports_inconsistency():
    assert solve_sparse([("a", {0: Fraction(1), 1: Fraction(1)})], {0: Fraction(1)}) is None
    assert solve_sparse([("a", {0: 1})], {0: 1, 1: 1}, modulus=3) is None
