from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ribetkit import formal, numeric
from ribetkit.formal import ContextError, NotFoundWithinBound, build_context
from ribetkit.groebner import PolyIdeal
from ribetkit.matrices import det_n
from ribetkit.poly import QQ, apply_unipotent, parse_poly, poly_sum

TWO_ROW = [["delta", 1, 2], ["delta", 2, 1]]


@pytest.fixture(scope="module")
def two_row():
    return build_context(2, TWO_ROW)


def test_row_multiset_counts():
    # row types: one epsilon type and r^2 delta types; multisets of size r
    for r in (1, 2, 3):
        assert len(formal.all_row_multisets(r)) == comb(r * r + 1 + r - 1, r)


def test_parse_rows():
    rows = formal.parse_rows([["eps"], ["eps"], ["delta", 1, 2]])
    assert [row.to_json() for row in rows] == [["eps", 1], ["eps", 2], ["delta", 1, 2]]
    with pytest.raises(ContextError):
        formal.parse_rows([["gamma", 1]])


def test_context_errors():
    with pytest.raises(ContextError):
        build_context(5, [["eps"]] * 5)
    with pytest.raises(ContextError):
        build_context(2, [["delta", 1, 3], ["eps"]])
    with pytest.raises(ContextError):
        build_context(2, [["eps"]])


def test_two_row_altered_matrix_matches_hand_expansion(two_row):
    ctx = two_row
    P = lambda s: parse_poly(s, ctx.table)
    Dp = [[P("delta121 - d2"), P("delta122 - a1")], [P("delta211 - a2"), P("delta212 - d1")]]
    D = [[P("delta121"), P("delta122")], [P("delta211"), P("delta212")]]
    assert ctx.Dprime == Dp and ctx.D == D
    assert ctx.e == det_n(Dp, ctx.R) - det_n(D, ctx.R)
    assert ctx.e == P("-a1*a2 + d1*d2 - d1*delta121 + a2*delta122 + a1*delta211 - d2*delta212")


def test_two_row_identity_modulo_J(two_row):
    ctx = two_row
    expected = parse_poly("(a1 + d1)*delta211 + (a2 + d2)*delta122 - (a1*a2 + b1*c2 + c1*b2 + d1*d2)",
                          ctx.table)
    assert expected == formal.expected_two_row_a(ctx)
    assert ctx.J.normal_form((ctx.e - expected).change_ring(QQ)).is_zero()
    # e itself is not in J: the trace part is needed
    assert not ctx.J.normal_form(ctx.e.change_ring(QQ)).is_zero()


def test_two_row_multilinear_terms(two_row):
    terms = formal.two_row_terms(two_row)
    assert len(terms) == 3
    assert poly_sum(two_row.table, [f.scale(s) for s, f in terms]) == two_row.e


def test_Dprime_w_components_are_Jprime_generators(two_row):
    comps = formal.Dprime_w(two_row)
    assert [-c for c in comps] == two_row.Jprime_generators


ALL_R3 = [rows for r in (1, 2, 3) for rows in formal.all_row_multisets(r)]


@pytest.mark.parametrize("rows", ALL_R3[::7], ids=lambda rows: str([row.label() for row in rows]))
def test_formal_lemmas_on_sampled_contexts(rows):
    ctx = build_context(len(rows), [row.to_json() for row in rows])
    assert formal.check_e_in_IR(ctx)
    assert formal.check_Dprime_w(ctx)
    assert formal.check_Jprime_in_J(ctx)
    assert formal.check_B_stability(ctx, "J")
    assert formal.check_B_stability(ctx, "Jprime")
    assert formal.check_ebar_invariance(ctx)


def test_stability_negative_control(two_row):
    ideal = PolyIdeal([parse_poly("c1", two_row.table)])
    assert not formal.check_B_stability(two_row, ideal=ideal)


def test_A_generators_dedup(two_row):
    gens = formal.enumerate_A_generators(two_row, 2)
    labels = [g.label() for g in gens]
    assert labels == ["tr(1)", "det(1)", "tr(2)", "det(2)", "tr(11)", "det(11)", "tr(12)", "det(12)",
                      "tr(22)", "det(22)"]
    by_label = dict(zip(labels, gens))
    assert by_label["tr(12)"].poly == (two_row.rho[1] * two_row.rho[0]).trace()
    for g in gens:
        assert apply_unipotent(g.poly) == g.poly.to_table(g.poly.table.extend(["x"]))


def _expand(cert):
    ctx = cert.ctx
    a = poly_sum(ctx.table, [t.poly(ctx) for t in cert.terms], QQ)
    j = poly_sum(ctx.table, [h * ctx.J_generators[k].change_ring(QQ) for k, h in cert.cofactors.items()], QQ)
    return a, j


@pytest.mark.parametrize("rows", formal.all_row_multisets(2), ids=lambda rows: str([r.label() for r in rows]))
def test_certificates_r2(rows):
    ctx = build_context(2, [row.to_json() for row in rows])
    cert = formal.solve_membership_A_plus_J(ctx, degree_bound=6)
    assert cert.verified
    a, j = _expand(cert)
    assert a + j == ctx.e.change_ring(QQ)
    assert a == cert.a_part()
    assert formal.check_air_structure(ctx, cert)


def test_certificate_r2_is_two_row_identity_mod_J(two_row):
    cert = formal.solve_membership_A_plus_J(two_row)
    diff = cert.a_part() - formal.expected_two_row_a(two_row).change_ring(QQ)
    assert two_row.J.normal_form(diff).is_zero()
    js = cert.to_json()
    assert js["a"] and all(t["generators"] for t in js["a"]) and js["verified"]


def test_certificate_r3_cycle():
    ctx = build_context(3, [["delta", 1, 2], ["delta", 2, 3], ["delta", 3, 1]])
    cert = formal.solve_membership_A_plus_J(ctx, degree_bound=6)
    assert cert.verified and formal.check_air_structure(ctx, cert)
    a, j = _expand(cert)
    assert a + j == ctx.e.change_ring(QQ)


def test_certificate_bound_enforced(two_row):
    with pytest.raises(NotFoundWithinBound):
        formal.solve_membership_A_plus_J(two_row, degree_bound=1)


def test_air_structure_rejects_constant_parts(two_row):
    cert = formal.solve_membership_A_plus_J(two_row)
    bad = formal.Certificate(two_row, cert.target, cert.terms + [formal.CertificateTerm(
        Fraction(1), tuple(1 if n == "delta121" else 0 for n in two_row.table.names), ())],
        cert.cofactors, cert.content)
    assert not formal.check_air_structure(two_row, bad)


def test_numeric_bridge_on_borel_instance():
    rep = numeric.borel_instance()
    data = numeric.span_delta(rep)
    check = numeric.build_M_and_check(rep, data)
    seen = 0
    for c in check.relation_checks:
        ctx = build_context(data.r, [list(lab) for lab in c.labels])
        cert = formal.solve_membership_A_plus_J(ctx)
        res = formal.numeric_bridge(ctx, data, rep.ideal, cert)
        assert res.J_vanishes and res.e_matches and res.a_in_I
        assert res.det_D == c.det and res.det_D_in_I
        seen += 1
    assert seen == len(check.relation_checks) > 0


def test_specialization_needs_matching_rows():
    rep = numeric.borel_instance()
    data = numeric.span_delta(rep)
    ctx = build_context(2, [["eps", 9], ["delta", 1, 2]])
    with pytest.raises(ContextError):
        formal.specialization(ctx, data)
