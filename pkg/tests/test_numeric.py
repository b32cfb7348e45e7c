import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ribetkit import numeric
from ribetkit.fitting import fitting_from_smith
from ribetkit.matrices import Mat2, conjugate_simultaneous
from ribetkit.numeric import (Cocycle, FiniteRepresentation, HypothesisViolation, NontrivialCocycle,
                              PrecisionExhausted, QuotientModule, build_M_and_check, check_trace_det_in_I,
                              dvr_recursion, enumerate_group, exhaustive_coboundary_search, span_delta)
from ribetkit.rings import RingSpec, ideal_in_ring, make_ring
from ribetkit.checks import desk_instance


def naive_closure(rep):
    """Independent group closure on tuples of residues."""
    N = rep.ring.modulus
    gens = [(g.a, g.b, g.c, g.d) for g in rep.generators]

    def mul(x, y):
        return ((x[0] * y[0] + x[1] * y[2]) % N, (x[0] * y[1] + x[1] * y[3]) % N,
                (x[2] * y[0] + x[3] * y[2]) % N, (x[2] * y[1] + x[3] * y[3]) % N)
    seen = {(1, 0, 0, 1)}
    frontier = list(seen)
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
    return seen


INSTANCES = {
    "congruence_kernel": numeric.congruence_kernel_instance,
    "borel": numeric.borel_instance,
    "desk3": lambda: desk_instance(3),
    "desk4": lambda: desk_instance(4),
    "step_two": numeric.step_two_instance,
    "dihedral": lambda: numeric.dihedral_instance()[0],
}


@pytest.mark.parametrize("name", sorted(INSTANCES))
def test_group_enumeration_matches_naive_closure(name):
    rep = INSTANCES[name]()
    group = enumerate_group(rep)
    assert {(g.matrix.a, g.matrix.b, g.matrix.c, g.matrix.d) for g in group} == naive_closure(rep)


@pytest.mark.parametrize("name", sorted(INSTANCES))
def test_relations_and_fitting_routes(name):
    rep = INSTANCES[name]()
    data = span_delta(rep)
    assert data.verify()
    R = rep.ring
    # epsilon rows annihilate the spanning set, delta rows express products
    for row in data.eps_rows:
        total = Mat2.zero(R)
        for e, M in zip(row, data.spanning):
            total = total + M.scale(e)
        assert total.is_zero()
    for (i, j), coeffs in data.delta.items():
        total = Mat2.zero(R)
        for e, M in zip(coeffs, data.spanning):
            total = total + M.scale(e)
        assert total == data.spanning[i - 1] * data.spanning[j - 1]
    check = build_M_and_check(rep, data)
    rows = [row for _, row in data.relation_rows()]
    assert check.fitting == fitting_from_smith(rows, data.r, R)
    assert check.oracle_agrees


# frozen values; the order of M comes from additive enumeration, independent of the minors
FROZEN = {
    "congruence_kernel": dict(order=8, r=3, fitting=[0], module_order=8, proxy=False),
    "borel": dict(r=2, fitting=[4], proxy=True),
    "desk3": dict(order=64, r=4, fitting=[0], module_order=8, proxy=False),
    "desk4": dict(order=1024, fitting=[8], module_order=8, proxy=False),
}


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_frozen_instance_values(name):
    rep = INSTANCES[name]()
    want = FROZEN[name]
    group = enumerate_group(rep)
    check = build_M_and_check(rep, span_delta(rep, group))
    if "order" in want:
        assert len(group) == want["order"] == len(naive_closure(rep))
    if "r" in want:
        assert check.data.r == want["r"]
    if "module_order" in want:
        assert check.module_order == want["module_order"]
    assert check.fitting == ideal_in_ring(rep.ring, want["fitting"])
    assert check.proxy == want["proxy"]
    assert check.contained and check.all_dets_in_ideal and check.all_Dprime_w_zero
    assert check.detzero_under_proxy
    assert check_trace_det_in_I(rep, check.data, random.Random(0))


def test_trivial_representation_is_degenerate():
    R = make_ring(RingSpec.truncated_dvr(2, 3))
    rep = FiniteRepresentation(R, [[[1, 0], [0, 1]]], ideal=ideal_in_ring(R, [2]))
    check = build_M_and_check(rep)
    assert check.data.r == 0
    assert check.fitting.is_unit_ideal()
    assert not check.contained and not check.proxy


@given(st.integers(0, 10_000))
@settings(max_examples=6, deadline=None)
def test_random_generator_sets_satisfy_numeric_lemmas(seed):
    rep = numeric.random_generator_instance(random.Random(seed), 2, 3, 2)
    group = enumerate_group(rep)
    assert rep.check_char_congruence(group)
    check = build_M_and_check(rep, span_delta(rep, group), random.Random(seed))
    assert check.contained and check.all_dets_in_ideal and check.all_Dprime_w_zero
    assert check.detzero_under_proxy
    assert check_trace_det_in_I(rep, check.data, random.Random(seed))


def test_char_congruence_failure_detected():
    R = make_ring(RingSpec.truncated_dvr(2, 3))
    rep = FiniteRepresentation(R, [[[3, 0], [0, 1]]], [1], [1], ideal_in_ring(R, [4]))
    assert not rep.check_char_congruence()


@given(st.integers(0, 15), st.sampled_from([3, 5, 7]))
@settings(max_examples=30, deadline=None)
def test_split_conjugate_digits_trivialize(x0, chi2):
    rep = numeric.split_conjugate_instance(x0=x0, chi2=chi2)
    res = dvr_recursion(rep)
    assert isinstance(res, PrecisionExhausted)
    X = res.value(2)
    u = Mat2.from_rows([[1, X], [0, 1]], rep.ring)
    (M,) = conjugate_simultaneous(u.inverse(), rep.generators)
    assert M.b % 2 ** len(res.digits) == 0 and M.c == 0


def test_split_conjugate_recovers_digits():
    res = dvr_recursion(numeric.split_conjugate_instance())
    assert isinstance(res, PrecisionExhausted)
    assert res.digits == [1, 0, 1] and res.value(2) == 5


def test_step_two_instance():
    trace, kappas = [], []
    res = dvr_recursion(numeric.step_two_instance(), trace=trace, kappas=kappas)
    assert isinstance(res, NontrivialCocycle) and res.step == 2
    assert res.digits == [1]
    assert res.kappa.check_cocycle()
    assert exhaustive_coboundary_search(res.kappa) == []
    assert exhaustive_coboundary_search(kappas[0])
    assert [t["coboundary"] for t in trace] == [True, False]
    assert all(t["lower_left_ok"] for t in trace)


def test_search_finds_step_two_instances():
    hits = numeric.search_step_two_instances(3)
    assert hits == [(3, 0), (3, 1), (3, 2)]


def test_recursion_hypotheses():
    R = make_ring(RingSpec.truncated_dvr(2, 3))
    no_chars = FiniteRepresentation(R, [[[1, 2], [0, 1]]])
    with pytest.raises(HypothesisViolation):
        dvr_recursion(no_chars)
    # lower-left entry is a unit: not triangular modulo p
    bad = FiniteRepresentation(R, [[[1, 0], [1, 1]]], [1], [1])
    with pytest.raises(HypothesisViolation):
        dvr_recursion(bad)


def test_swap_repair_path():
    # lower triangular shape with the characters swapped on the diagonal
    R = make_ring(RingSpec.truncated_dvr(3, 3))
    rep = FiniteRepresentation(R, [[[2, 0], [3, 1]]], [1], [2])
    trace = []
    res = dvr_recursion(rep, trace=trace)
    assert trace[0].get("repair") == "swap"
    assert isinstance(res, (PrecisionExhausted, NontrivialCocycle))


@given(st.integers(0, 26), st.sampled_from([0, 1]))
@settings(max_examples=20, deadline=None)
def test_coboundaries_are_cocycles(x, seed):
    rep, _ = numeric.dihedral_instance(random.Random(seed))
    group = enumerate_group(rep)
    R = rep.ring
    module = QuotientModule(R, ideal_in_ring(R, [9]), ideal_in_ring(R, [1]))
    action = [R.mul(R.try_invert(g.chi2), g.chi1) for g in group]
    values = [module.reduce(R.mul(R.sub(a, 1), x)) for a in action]
    kappa = Cocycle(group, values, action, module)
    assert kappa.check_cocycle()
    assert numeric.h1_coboundary_test(kappa) is not None


@given(st.integers(0, 1000))
@settings(max_examples=8, deadline=None)
def test_distinguishable_construction(seed):
    rep, tau = numeric.dihedral_instance(random.Random(seed))
    res = numeric.distinguishable_construct(rep, tau)
    assert len(res.conjugated) == 54
    assert res.eigenvalues == (1, 26)
    assert res.B == ideal_in_ring(rep.ring, [1]) and res.IB == ideal_in_ring(rep.ring, [3])
    assert res.adcong_ok and res.cocycle_ok and res.kappa_tau_zero
    assert res.surjective and res.witness_ok and res.fitting_in_I
    assert res.witnesses_checked == 3


def test_distinguishable_requires_unit_difference():
    R = make_ring(RingSpec.truncated_dvr(3, 2))
    rep = FiniteRepresentation(R, [[[1, 1], [0, 1]]], [1], [1], ideal_in_ring(R, [3]))
    with pytest.raises(HypothesisViolation):
        numeric.distinguishable_construct(rep, [0])


def test_hensel_roots_and_eigenbasis():
    R = make_ring(RingSpec.truncated_dvr(3, 3))
    M = Mat2.from_rows([[1, 3], [3, 2]], R)
    t, d = M.trace(), M.det()
    roots = numeric.hensel_roots(M, [1, 2])
    for lam in roots:
        assert (lam * lam - t * lam + d) % 27 == 0
    P = numeric.eigenbasis(M, *roots)
    D = P.inverse() * M * P
    assert D.b == 0 and D.c == 0
