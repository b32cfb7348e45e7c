from math import comb

import pytest

from ribetkit import koszul
from ribetkit.formal import build_context
from ribetkit.poly import VariableTable, parse_poly


def cycle(r):
    return build_context(r, [["delta", i, i % r + 1] for i in range(1, r + 1)])


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_koszul_ranks_and_square_zero(r):
    K = koszul.build_koszul(cycle(r))
    assert K.ranks() == [comb(r, i) for i in range(r + 1)]
    assert koszul.check_complex(K)


@pytest.mark.parametrize("r", [2, 3, 4])
def test_corrupted_sign_breaks_square_zero(r):
    K = koszul.build_koszul(cycle(r))
    assert not koszul.check_complex(koszul.corrupt_sign(K, 2))


@pytest.mark.parametrize("rows", [
    [["delta", 1, 1]],
    [["delta", 1, 2], ["delta", 2, 1]],
    [["eps"], ["delta", 2, 1]],
    [["delta", 1, 2], ["delta", 2, 3], ["delta", 3, 1]],
    [["eps"], ["delta", 1, 3], ["delta", 3, 2]],
])
def test_wcomplex_and_diagram(rows):
    ctx = build_context(len(rows), rows)
    W = koszul.build_wcomplex(ctx)
    r = ctx.r
    assert W.ranks() == [1] + [comb(r, i) * 4 ** i for i in range(1, r + 1)]
    assert koszul.check_complex(W)
    assert koszul.check_diagram_commutes(ctx)


def test_iota_labels():
    assert koszul.iota(2, (1, 3)) == ((1, 3), ("B", "B"))


@pytest.mark.parametrize("r", [2, 3])
@pytest.mark.parametrize("p", [2, 3])
def test_generic_linear_forms_exact(r, p):
    rep = koszul.check_regular_sequence(koszul.generic_linear_forms(r), p, 5 if r == 2 else 4)
    assert rep.exact and rep.consistent and rep.first_failure() is None


def test_context_B_regular():
    rep = koszul.check_regular_sequence(build_context(2, [["delta", 1, 2], ["delta", 2, 1]]), 3, 5)
    assert rep.ok


def test_dependent_pair_fails_at_degree_two():
    t = VariableTable(["x", "y"])
    f = parse_poly("x*y", t)
    rep = koszul.graded_exactness([f, f], 2, 4)
    assert not rep.exact
    assert rep.first_failure() == 2
    # the syzygy e1 - e2 of K_1 sits in internal degree deg f = 2
    assert [d.exact for d in rep.degrees] == [True, True, False, False, False]
    assert not rep.degrees[2].euler_ok


def test_regular_pair_in_two_variables():
    t = VariableTable(["x", "y"])
    rep = koszul.graded_exactness([parse_poly("x", t), parse_poly("y^2", t)], 3, 5)
    assert rep.ok
    # R/(x, y^2) has Hilbert function 1, 1, 0, ...
    assert [d.hilbert for d in rep.degrees] == [1, 1, 0, 0, 0, 0]


def test_non_homogeneous_rejected():
    t = VariableTable(["x"])
    with pytest.raises(ValueError):
        koszul.graded_exactness([parse_poly("x + 1", t)], 2, 2)
