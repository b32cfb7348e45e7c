"""Formal relation rings and the membership of the determinant difference in A + J.

A context fixes ``r`` and one row type per row of the relation matrix.  It
owns the polynomial ring ``R = R0[a_i, b_i, c_i, d_i]`` where ``R0`` holds one
variable per entry of the relation matrix, the generic matrices ``rho_i``,
the relation ideal ``J`` with its b-coefficient subideal ``J'``, the matrices
``D`` and ``D'`` and their determinant difference ``e``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement, product
from math import lcm
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .groebner import DEFAULT_SPAIR_BUDGET, PolyIdeal, stable_under_substitution
from .linalg import Echelon
from .matrices import Mat2, det_n, mat_vec, multilinearity_expand, word_product
from .poly import (Poly, PolyRing, VariableTable, apply_unipotent, degrevlex, evaluate,
                   is_weight_homogeneous, poly_sum)
from .rings import QQ, ZZ, Ring

MAX_R = 4
LETTERS = "ABCD"


class ContextError(ValueError):
    pass


class NotFoundWithinBound(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Row types


@dataclass(frozen=True)
class EpsRow:
    """An epsilon-type row; ``q`` numbers the epsilon rows of a context from 1."""

    q: int = 1

    def to_json(self):
        return ["eps", self.q]

    def label(self) -> str:
        return f"Eps{self.q}"


@dataclass(frozen=True)
class DeltaRow:
    i: int
    j: int

    def to_json(self):
        return ["delta", self.i, self.j]

    def label(self) -> str:
        return f"Delta({self.i},{self.j})"


RowSpec = Union[EpsRow, DeltaRow]


def parse_rows(rows: Sequence) -> list[RowSpec]:
    """Read rows given as ``["eps"]``, ``["eps", q]`` or ``["delta", i, j]`` (or RowSpec objects).

    Bare ``["eps"]`` rows are numbered by occurrence.
    """
    out: list[RowSpec] = []
    q = 0
    for row in rows:
        if isinstance(row, EpsRow):
            q += 1
            out.append(EpsRow(q))
        elif isinstance(row, DeltaRow):
            out.append(row)
        elif row and row[0] == "eps" and len(row) == 2:
            out.append(EpsRow(int(row[1])))
        elif row and row[0] == "eps":
            q += 1
            out.append(EpsRow(q))
        elif row and row[0] == "delta" and len(row) == 3:
            out.append(DeltaRow(int(row[1]), int(row[2])))
        else:
            raise ContextError(f"cannot read row {row!r}")
    return out


def all_row_multisets(r: int) -> list[list[RowSpec]]:
    """Every multiset of ``r`` row types (epsilon rows first, delta rows sorted)."""
    types = ["eps"] + [(i, j) for i in range(1, r + 1) for j in range(1, r + 1)]
    out = []
    for combo in combinations_with_replacement(range(len(types)), r):
        rows = [["eps"] if types[k] == "eps" else ["delta", *types[k]] for k in combo]
        out.append(parse_rows(rows))
    return out


# ---------------------------------------------------------------------------
# Context


def _row_vars(row: RowSpec, r: int) -> list[str]:
    if isinstance(row, EpsRow):
        return [f"eps{row.q}_{k}" for k in range(1, r + 1)]
    return [f"delta{row.i}{row.j}{k}" for k in range(1, r + 1)]


@dataclass
class FormalContext:
    r: int
    rows: tuple
    table: VariableTable
    R: PolyRing
    rho: list               # Mat2 over R
    blocks: list            # per row: {"A": .., "B": .., "C": .., "D": ..}
    D: list
    Dprime: list
    e: Poly
    w: list
    order: Any = degrevlex
    budget: int = DEFAULT_SPAIR_BUDGET

    # ideals ---------------------------------------------------------------

    @property
    def J_generators(self) -> list[Poly]:
        return [blk[L] for blk in self.blocks for L in LETTERS]

    @property
    def Jprime_generators(self) -> list[Poly]:
        return [blk["B"] for blk in self.blocks]

    @cached_property
    def J(self) -> PolyIdeal:
        return PolyIdeal(self.J_generators, self.order, QQ, self.table, self.budget)

    @cached_property
    def Jprime(self) -> PolyIdeal:
        return PolyIdeal(self.Jprime_generators, self.order, QQ, self.table, self.budget)

    # gradings -------------------------------------------------------------

    @cached_property
    def var_multidegree(self) -> list[tuple]:
        """Index multidegree of each variable; every relation is homogeneous for it."""
        r = self.r
        out = []
        for cls, idx in self.table.classes:
            v = [0] * r
            if cls in ("a", "b", "c", "d"):
                v[idx[0] - 1] += 1
            elif cls == "delta":
                i, j, k = idx
                v[i - 1] += 1
                v[j - 1] += 1
                v[k - 1] -= 1
            elif cls == "eps":
                v[idx[1] - 1] -= 1
            out.append(tuple(v))
        return out

    def multidegree(self, exp) -> tuple:
        md = [0] * self.r
        for k, vec in zip(exp, self.var_multidegree):
            if k:
                for t, x in enumerate(vec):
                    md[t] += k * x
        return tuple(md)

    def grading(self, exp) -> tuple:
        """(total degree, b/c weight, index multidegree)."""
        w = self.table.weights
        return (sum(exp), sum(k * x for k, x in zip(exp, w)), self.multidegree(exp))

    @property
    def r0_indices(self) -> list[int]:
        return self.table.indices_of_class("eps", "delta")

    @property
    def abcd_indices(self) -> list[int]:
        return self.table.indices_of_class("a", "b", "c", "d")

    def to_json(self):
        return {"r": self.r, "rows": [row.to_json() for row in self.rows]}

    def label(self) -> str:
        return "[" + ", ".join(row.label() for row in self.rows) + "]"


def build_context(r: int, rows: Sequence, max_r: int = MAX_R,
                  budget: int = DEFAULT_SPAIR_BUDGET) -> FormalContext:
    if not 1 <= r <= max_r:
        raise ContextError(f"r = {r} outside 1..{max_r}")
    rows = tuple(parse_rows(rows))
    if len(rows) != r:
        raise ContextError(f"need exactly {r} rows, got {len(rows)}")
    for row in rows:
        if isinstance(row, DeltaRow) and not (1 <= row.i <= r and 1 <= row.j <= r):
            raise ContextError(f"row {row.label()} has an index outside 1..{r}")
    r0_names: list[str] = []
    for row in sorted({row for row in rows if isinstance(row, DeltaRow)}, key=lambda x: (x.i, x.j)):
        r0_names += _row_vars(row, r)
    for row in sorted({row for row in rows if isinstance(row, EpsRow)}, key=lambda x: x.q):
        r0_names += _row_vars(row, r)
    table = VariableTable.standard(r, r0_names)
    R = PolyRing(table, ZZ)
    v = R.var
    rho = [Mat2(v(f"a{i}"), v(f"b{i}"), v(f"c{i}"), v(f"d{i}"), R) for i in range(1, r + 1)]
    blocks, D, Dp = [], [], []
    for row in rows:
        names = _row_vars(row, r)
        coeffs = [v(n) for n in names]
        combo = Mat2.zero(R)
        for c, M in zip(coeffs, rho):
            combo = combo + M.scale(c)
        if isinstance(row, EpsRow):
            rel = combo
            altered = list(coeffs)
        else:
            rel = rho[row.i - 1] * rho[row.j - 1] - combo
            altered = list(coeffs)
            altered[row.j - 1] = altered[row.j - 1] - v(f"a{row.i}")
            altered[row.i - 1] = altered[row.i - 1] - v(f"d{row.j}")
        blocks.append(dict(zip(LETTERS, rel.entries())))
        D.append(coeffs)
        Dp.append(altered)
    e = det_n(Dp, R) - det_n(D, R)
    w = [v(f"b{i}") for i in range(1, r + 1)]
    ctx = FormalContext(r, rows, table, R, rho, blocks, D, Dp, e, w, budget=budget)
    _verify_context(ctx)
    return ctx


def _verify_context(ctx: FormalContext) -> None:
    # D' differs from D only by -a_i at column j and -d_j at column i of delta rows
    for row, a, b in zip(ctx.rows, ctx.D, ctx.Dprime):
        diff = [x - y for x, y in zip(a, b)]
        if isinstance(row, EpsRow):
            if any(diff):
                raise AssertionError("epsilon row was altered")
        else:
            want = [ctx.R.zero] * ctx.r
            want[row.j - 1] = want[row.j - 1] + ctx.R.var(f"a{row.i}")
            want[row.i - 1] = want[row.i - 1] + ctx.R.var(f"d{row.j}")
            if diff != want:
                raise AssertionError(f"row {row.label()} altered incorrectly")
    gens = set(ctx.J_generators)
    if not all(g in gens for g in ctx.Jprime_generators):
        raise AssertionError("J' generators are not among the J generators")


# ---------------------------------------------------------------------------
# Identity checks on a context


def in_IR(f: Poly) -> bool:
    """Membership in the ideal generated by all a, b, c, d variables."""
    idx = f.table.indices_of_class("a", "b", "c", "d")
    return all(any(exp[i] for i in idx) for exp in f.terms)


def check_e_in_IR(ctx: FormalContext) -> bool:
    return in_IR(ctx.e)


def Dprime_w(ctx: FormalContext) -> list[Poly]:
    return mat_vec(ctx.Dprime, ctx.w, ctx.R)


def check_Dprime_w(ctx: FormalContext) -> bool:
    """Each component of ``D' w`` is plus or minus the row's J' generator."""
    for comp, gen in zip(Dprime_w(ctx), ctx.Jprime_generators):
        if comp != gen and comp != -gen:
            return False
    return True


def check_Jprime_in_J(ctx: FormalContext) -> bool:
    return all(ctx.J.contains(g) for g in ctx.Jprime_generators)


def check_B_stability(ctx: FormalContext, which: str = "J", ideal: Optional[PolyIdeal] = None) -> bool:
    """Torus stability by weight homogeneity; unipotent stability by Groebner membership."""
    I = ideal if ideal is not None else (ctx.J if which == "J" else ctx.Jprime)
    if not all(is_weight_homogeneous(g) for g in I.gens):
        return False
    return stable_under_substitution(I)


def check_ebar_invariance(ctx: FormalContext) -> bool:
    """``e`` is weight 0 and its unipotent image agrees with it modulo ``J'``."""
    e = ctx.e
    if e.is_zero():
        return True
    if not is_weight_homogeneous(e) or any(k for k in _weights(e)):
        return False
    moved = apply_unipotent(e)
    diff = moved - e.to_table(moved.table)
    for k, coeff in diff.coefficients_in("x").items():
        if not ctx.Jprime.contains(coeff.to_table(ctx.table)):
            return False
    return True


def _weights(f: Poly):
    w = f.table.weights
    return {sum(k * x for k, x in zip(e, w)) for e in f.terms}


def two_row_terms(ctx: FormalContext) -> list[tuple[int, Poly]]:
    """``(sign, det N)`` from multilinearity of ``det(D') - det(D)`` over altered rows."""
    return [(s, det_n(N, ctx.R)) for s, N in multilinearity_expand(ctx.D, ctx.Dprime, ctx.R)]


# ---------------------------------------------------------------------------
# Trace and determinant generators


@dataclass(frozen=True)
class TraceDetGenerator:
    word: tuple           # 1-based letters
    flavor: str           # "trace" | "det"
    poly: Poly = field(compare=False, hash=False, repr=False)

    @property
    def multiplicity(self) -> tuple:
        return self.word

    def label(self) -> str:
        inner = "".join(str(k) for k in self.word)
        return f"{'tr' if self.flavor == 'trace' else 'det'}({inner})"

    def to_json(self):
        return {"flavor": self.flavor, "word": list(self.word)}


def _min_rotation(word: tuple) -> tuple:
    return min(word[k:] + word[:k] for k in range(len(word))) if word else word


def enumerate_A_generators(ctx: FormalContext, L: int = 2) -> list[TraceDetGenerator]:
    """Traces and determinants of words of length ``1..L`` in the generic matrices.

    Trace words are kept up to rotation; determinant words up to reordering,
    since the determinant is multiplicative.
    """
    if L > MAX_R:
        raise ContextError(f"word length {L} above {MAX_R}")
    out = []
    seen_tr, seen_det = set(), set()
    for n in range(1, L + 1):
        for word in product(range(1, ctx.r + 1), repeat=n):
            M = word_product(ctx.rho, [k - 1 for k in word], ctx.R)
            tkey = _min_rotation(word)
            if tkey not in seen_tr:
                seen_tr.add(tkey)
                out.append(TraceDetGenerator(tkey, "trace", M.trace()))
            dkey = tuple(sorted(word))
            if dkey not in seen_det:
                seen_det.add(dkey)
                out.append(TraceDetGenerator(dkey, "det", M.det()))
    return out


# ---------------------------------------------------------------------------
# Membership certificates


@dataclass
class CertificateTerm:
    coeff: Fraction
    r0_monomial: tuple          # exponent over the context table, R0 variables only
    generators: tuple           # TraceDetGenerator tuple (possibly empty)

    def poly(self, ctx: FormalContext) -> Poly:
        f = Poly.monomial(ctx.table, self.r0_monomial, Fraction(self.coeff), QQ)
        for g in self.generators:
            f = f * g.poly.change_ring(QQ)
        return f

    def to_json(self, ctx: FormalContext):
        return {"coeff": str(self.coeff),
                "r0_monomial": Poly.monomial(ctx.table, self.r0_monomial, 1).render(),
                "generators": [g.to_json() for g in self.generators]}


@dataclass
class Certificate:
    ctx: FormalContext
    target: Poly
    terms: list                      # CertificateTerm
    cofactors: dict                  # J generator index -> Poly over QQ
    content: int                     # denominator cleared in the integral check
    verified: bool = False

    def a_part(self) -> Poly:
        return poly_sum(self.ctx.table, (t.poly(self.ctx) for t in self.terms), QQ)

    def j_part(self) -> Poly:
        gens = self.ctx.J_generators
        return poly_sum(self.ctx.table,
                        (h * gens[k].change_ring(QQ) for k, h in self.cofactors.items()), QQ)

    def verify_integral(self) -> bool:
        """``L * target = L * a + sum (L h_k) g_k`` expanded over ZZ, without Groebner bases."""
        L = self.content
        table = self.ctx.table
        gens = self.ctx.J_generators

        def to_zz(f: Poly) -> Poly:
            scaled = {e: Fraction(c) * L for e, c in f.terms.items()}
            if any(c.denominator != 1 for c in scaled.values()):
                raise ArithmeticError("content does not clear denominators")
            return Poly(table, {e: int(c) for e, c in scaled.items()}, ZZ)

        lhs = self.target.change_ring(ZZ).scale(L) if self.target.ring != QQ else to_zz(self.target)
        rhs = to_zz(self.a_part())
        for k, h in self.cofactors.items():
            rhs = rhs + to_zz(h) * gens[k]
        return lhs == rhs

    def to_json(self):
        gens = self.ctx.J_generators
        return {
            "context": self.ctx.to_json(),
            "target": self.target.render(),
            "a": [t.to_json(self.ctx) for t in self.terms],
            "a_rendered": self.a_part().render(),
            "cofactors": [{"generator": k, "block": divmod(k, 4)[0] + 1, "entry": LETTERS[k % 4],
                           "generator_poly": gens[k].render(), "cofactor": h.render()}
                          for k, h in sorted(self.cofactors.items())],
            "content": self.content,
            "verified": self.verified,
        }


def _r0_monomials_by_grading(ctx: FormalContext, max_degree: int) -> dict:
    idx = ctx.r0_indices
    n = len(ctx.table)
    out: dict = {}
    for deg in range(max_degree + 1):
        for combo in combinations_with_replacement(idx, deg):
            e = [0] * n
            for i in combo:
                e[i] += 1
            e = tuple(e)
            out.setdefault(ctx.grading(e), []).append(e)
    return out


def _poly_grading(ctx: FormalContext, f: Poly) -> Optional[tuple]:
    gr = {ctx.grading(e) for e in f.terms}
    return gr.pop() if len(gr) == 1 else None


def _add_grading(g1, g2):
    return (g1[0] + g2[0], g1[1] + g2[1], tuple(x + y for x, y in zip(g1[2], g2[2])))


def _sub_grading(g1, g2):
    return (g1[0] - g2[0], g1[1] - g2[1], tuple(x - y for x, y in zip(g1[2], g2[2])))


def ansatz(ctx: FormalContext, target_grading: tuple, max_generators: int = 2,
           word_length: Optional[int] = None) -> list[tuple[tuple, tuple]]:
    """Pairs ``(R0 exponent, generator tuple)`` whose product has ``target_grading``."""
    deg = target_grading[0]
    L = word_length if word_length is not None else min(deg, MAX_R)
    gens = [g for g in enumerate_A_generators(ctx, max(L, 1)) if g.poly.total_degree() <= deg]
    graded = [(g, _poly_grading(ctx, g.poly)) for g in gens]
    r0 = _r0_monomials_by_grading(ctx, deg)
    zero = (0, 0, (0,) * ctx.r)
    out = []
    for k in range(0, max_generators + 1):
        for combo in combinations_with_replacement(range(len(graded)), k):
            gr = zero
            for i in combo:
                gr = _add_grading(gr, graded[i][1])
            if gr[0] > deg:
                continue
            need = _sub_grading(target_grading, gr)
            for mono in r0.get(need, ()):
                out.append((mono, tuple(graded[i][0] for i in combo)))
    return out


def solve_membership_A_plus_J(ctx: FormalContext, target: Optional[Poly] = None,
                              degree_bound: int = 6, max_generators: int = 2) -> Certificate:
    """Find ``target = a + j`` with ``a`` in the trace/determinant algebra over R0."""
    target = ctx.e if target is None else target
    tq = target.change_ring(QQ)
    if tq.is_zero():
        cert = Certificate(ctx, target, [], {}, 1)
        cert.verified = cert.verify_integral()
        return cert
    gr = _poly_grading(ctx, target)
    if gr is None:
        raise ContextError("target is not homogeneous for the context gradings")
    if gr[0] > degree_bound:
        raise NotFoundWithinBound(f"target degree {gr[0]} exceeds the bound {degree_bound}")
    J = ctx.J
    nf_target = J.normal_form(tq)
    candidates = ansatz(ctx, gr, max_generators)
    ech = Echelon(None, track=True)
    polys = {}
    for idx, (mono, gens) in enumerate(candidates):
        f = Poly.monomial(ctx.table, mono, 1, QQ)
        for g in gens:
            f = f * g.poly.change_ring(QQ)
        polys[idx] = f
        ech.add(J.normal_form(f).terms, idx)
    coeffs = ech.solve(nf_target.terms)
    if coeffs is None:
        raise NotFoundWithinBound(
            f"no combination of {len(candidates)} ansatz terms (at most {max_generators} generators) works")
    terms = [CertificateTerm(Fraction(c), candidates[i][0], candidates[i][1])
             for i, c in sorted(coeffs.items())]
    a = poly_sum(ctx.table, (polys[i].scale(Fraction(c)) for i, c in coeffs.items()), QQ)
    j = tq - a
    cofactors = solve_cofactors(ctx, j)
    denoms = [Fraction(t.coeff).denominator for t in terms]
    denoms += [Fraction(c).denominator for h in cofactors.values() for c in h.terms.values()]
    L = lcm(*denoms) if denoms else 1
    cert = Certificate(ctx, target, terms, cofactors, L)
    cert.verified = cert.verify_integral()
    if not cert.verified:
        raise ArithmeticError("certificate failed exact re-expansion")
    return cert


def solve_cofactors(ctx: FormalContext, j: Poly) -> dict[int, Poly]:
    """Express homogeneous ``j`` in J as ``sum h_k g_k`` by a graded linear solve."""
    if j.is_zero():
        return {}
    gr = _poly_grading(ctx, j)
    if gr is None:
        raise ContextError("element of J is not homogeneous")
    gens = ctx.J_generators
    n = len(ctx.table)
    ech = Echelon(None, track=True)
    allidx = list(range(n))
    for k, g in enumerate(gens):
        if g.is_zero():
            continue
        ggr = _poly_grading(ctx, g)
        need = _sub_grading(gr, ggr)
        if need[0] < 0:
            continue
        for combo in combinations_with_replacement(allidx, need[0]):
            e = [0] * n
            for i in combo:
                e[i] += 1
            e = tuple(e)
            if ctx.grading(e) != need:
                continue
            ech.add(g.mul_term(e, 1).change_ring(QQ).terms, (k, e))
    sol = ech.solve(j.terms)
    if sol is None:
        raise ArithmeticError("element claimed in J has no cofactors in its degree")
    out: dict[int, dict] = {}
    for (k, e), c in sol.items():
        out.setdefault(k, {})[e] = Fraction(c)
    return {k: Poly(ctx.table, t, QQ) for k, t in sorted(out.items())}


def check_air_structure(ctx: FormalContext, cert: Certificate) -> bool:
    """The a-part vanishes when every a, b, c, d is 0 and all generator words are nonempty."""
    if any(not g.word for t in cert.terms for g in t.generators):
        return False
    return in_IR(cert.a_part())


def expected_two_row_a(ctx: FormalContext) -> Poly:
    """``tr(rho_1) delta_211 + tr(rho_2) delta_122 - tr(rho_1 rho_2)`` for the r = 2 delta context."""
    v = ctx.R.var
    t1, t2 = ctx.rho[0].trace(), ctx.rho[1].trace()
    t12 = (ctx.rho[0] * ctx.rho[1]).trace()
    return t1 * v("delta211") + t2 * v("delta122") - t12


# ---------------------------------------------------------------------------
# Numeric bridge


def specialization(ctx: FormalContext, data) -> dict:
    """Values of every context variable under a numeric epsilon/delta datum."""
    if data.r != ctx.r:
        raise ContextError(f"numeric data has r = {data.r}, context has r = {ctx.r}")
    vals: dict = {}
    for i in range(1, ctx.r + 1):
        a, b, c, d = data.entries(i)
        vals.update({f"a{i}": a, f"b{i}": b, f"c{i}": c, f"d{i}": d})
    for row in ctx.rows:
        names = _row_vars(row, ctx.r)
        if isinstance(row, EpsRow):
            if row.q > len(data.eps_rows):
                raise ContextError(f"numeric data has only {len(data.eps_rows)} epsilon rows")
            values = data.eps_rows[row.q - 1]
        else:
            values = data.delta[(row.i, row.j)]
        vals.update(dict(zip(names, values)))
    return vals


@dataclass
class BridgeResult:
    J_vanishes: bool
    e_matches: bool
    e_value: Any
    a_value: Optional[Any]
    a_in_I: Optional[bool]
    det_D: Any
    det_D_in_I: bool


def numeric_bridge(ctx: FormalContext, data, ideal, cert: Optional[Certificate] = None) -> BridgeResult:
    """Specialize the context at numeric data and compare with the numeric matrices."""
    T = data.ring
    vals = specialization(ctx, data)
    J_ok = all(evaluate(g, vals, T) == 0 for g in ctx.J_generators)
    e_val = evaluate(ctx.e, vals, T)
    D = [[vals[n] for n in _row_vars(row, ctx.r)] for row in ctx.rows]
    Dp = [[evaluate(x, vals, T) for x in row] for row in ctx.Dprime]
    detD = det_n(D, T)
    e_num = T.sub(det_n(Dp, T), detD)
    a_val = a_in = None
    if cert is not None:
        L = cert.content
        Linv = T.try_invert(L)
        if Linv is not None:
            a_int = poly_sum(ctx.table, (t.poly(ctx) for t in cert.terms), QQ).scale(L)
            a_zz = Poly(ctx.table, {e: int(c) for e, c in a_int.terms.items()}, ZZ)
            a_val = T.mul(Linv, evaluate(a_zz, vals, T))
            a_in = ideal.contains(a_val) and a_val == e_val
    return BridgeResult(J_ok, e_val == e_num, e_val, a_val, a_in, detD, ideal.contains(detD))
