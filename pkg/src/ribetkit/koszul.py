"""Koszul complex on the J' generators and the adjoint-tensor complex above J.

Maps are stored sparsely: ``maps[i][source_label]`` is a dict from target
labels to polynomial entries.  Boundary signs are ``(-1)^(j-1)`` for the
``j``-th factor counted from 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, product
from math import comb
from typing import Dict, List, Optional, Sequence

from .formal import LETTERS, FormalContext
from .groebner import PolyIdeal
from .linalg import Echelon
from .poly import Poly, VariableTable, poly_sum
from .rings import RingSpec, make_ring

Map = Dict[tuple, Dict[tuple, Poly]]


@dataclass
class FreeComplex:
    """``0 -> C_n -> ... -> C_1 -> C_0``; ``maps[i]`` goes from ``C_i`` to ``C_{i-1}``."""

    table: VariableTable
    bases: list                 # bases[i] = list of labels of C_i
    maps: dict                  # i -> Map, for i = 1..n
    name: str = "koszul"

    @property
    def length(self) -> int:
        return len(self.bases) - 1

    def ranks(self) -> list[int]:
        return [len(b) for b in self.bases]

    def apply(self, i: int, vec: Dict[tuple, Poly]) -> Dict[tuple, Poly]:
        out: Dict[tuple, list] = {}
        for src, coeff in vec.items():
            for tgt, entry in self.maps[i].get(src, {}).items():
                out.setdefault(tgt, []).append(entry * coeff)
        res = {t: poly_sum(self.table, fs) for t, fs in out.items()}
        return {t: f for t, f in res.items() if not f.is_zero()}

    def image_of_basis(self, i: int, label: tuple) -> Dict[tuple, Poly]:
        return dict(self.maps[i].get(label, {}))


WComplex = FreeComplex


def _one(table):
    return Poly.const(table, 1)


def _koszul_maps(table: VariableTable, gens: Sequence[Poly]) -> FreeComplex:
    r = len(gens)
    idx = range(1, r + 1)
    bases = [list(combinations(idx, i)) for i in range(r + 1)]
    maps = {}
    for i in range(1, r + 1):
        m: Map = {}
        for S in bases[i]:
            col = {}
            for j, k in enumerate(S):
                sign = 1 if j % 2 == 0 else -1
                col[S[:j] + S[j + 1:]] = gens[k - 1].scale(sign)
            m[S] = col
        maps[i] = m
    return FreeComplex(table, bases, maps)


def build_koszul(ctx: FormalContext) -> FreeComplex:
    """Koszul complex on ``B_k`` = the b-coefficient of the k-th relation block."""
    return _koszul_maps(ctx.table, ctx.Jprime_generators)


def koszul_on(gens: Sequence[Poly]) -> FreeComplex:
    """Koszul complex on arbitrary polynomials sharing one table."""
    if not gens:
        raise ValueError("need at least one element")
    return _koszul_maps(gens[0].table, list(gens))


def build_wcomplex(ctx: FormalContext) -> FreeComplex:
    """Complex of tensor words over the relation blocks; ``W_0`` is a single copy of R."""
    r = ctx.r
    blocks = ctx.blocks
    bases = [[((), ())]]
    for i in range(1, r + 1):
        bases.append([(S, X) for S in combinations(range(1, r + 1), i)
                      for X in product(LETTERS, repeat=i)])
    maps = {}
    for i in range(1, r + 1):
        m: Map = {}
        for S, X in bases[i]:
            col = {}
            for j in range(i):
                sign = 1 if j % 2 == 0 else -1
                tgt = (S[:j] + S[j + 1:], X[:j] + X[j + 1:])
                col[tgt] = blocks[S[j] - 1][X[j]].scale(sign)
            m[(S, X)] = col
        maps[i] = m
    return FreeComplex(ctx.table, bases, maps, name="wcomplex")


def iota(i: int, S: tuple) -> tuple:
    """Wedge label ``S`` goes to the tensor word of B letters on ``S``."""
    return (S, ("B",) * i)


def check_complex(C: FreeComplex) -> bool:
    """Every consecutive composite vanishes identically."""
    for i in range(2, C.length + 1):
        for src in C.bases[i]:
            if C.apply(i - 1, C.image_of_basis(i, src)):
                return False
    return True


def check_diagram_commutes(ctx: FormalContext) -> bool:
    K = build_koszul(ctx)
    W = build_wcomplex(ctx)
    r = ctx.r
    if len({iota(len(S), S) for i in range(r + 1) for S in K.bases[i]}) != sum(K.ranks()):
        return False
    for i in range(1, r + 1):
        for S in K.bases[i]:
            lhs = W.image_of_basis(i, iota(i, S))
            fS = K.image_of_basis(i, S)
            rhs = {iota(i - 1, T) if i > 1 else ((), ()): f for T, f in fS.items()}
            if {k: v for k, v in lhs.items() if not v.is_zero()} != \
                    {k: v for k, v in rhs.items() if not v.is_zero()}:
                return False
    image_g1 = {next(iter(W.image_of_basis(1, lab).values())) for lab in W.bases[1]}
    return image_g1 == set(ctx.J_generators)


def corrupt_sign(C: FreeComplex, i: int) -> FreeComplex:
    """Copy of ``C`` with the sign of every second entry of ``maps[i]`` flipped (a control)."""
    maps = {k: {s: dict(col) for s, col in m.items()} for k, m in C.maps.items()}
    for src, col in maps[i].items():
        keys = sorted(col)
        if len(keys) > 1:
            col[keys[1]] = -col[keys[1]]
    return FreeComplex(C.table, C.bases, maps, C.name + "-corrupted")


# ---------------------------------------------------------------------------
# Graded exactness over prime fields


def generic_linear_forms(r: int) -> list[Poly]:
    """``L_i = sum_j x_ij y_j`` in ``ZZ[x_ij, y_j]``."""
    names = [f"x{i}{j}" for i in range(1, r + 1) for j in range(1, r + 1)]
    names += [f"y{j}" for j in range(1, r + 1)]
    table = VariableTable(names)
    out = []
    for i in range(1, r + 1):
        terms = [Poly.var(table, f"x{i}{j}") * Poly.var(table, f"y{j}") for j in range(1, r + 1)]
        out.append(poly_sum(table, terms))
    return out


def _monomials(n: int, deg: int):
    if deg < 0:
        return
    for combo in combinations_with_replacement(range(n), deg):
        e = [0] * n
        for i in combo:
            e[i] += 1
        yield tuple(e)


def _hilbert_from_leading(leads: Sequence[tuple], n: int, deg: int) -> int:
    count = 0
    for e in _monomials(n, deg):
        if not any(all(x <= y for x, y in zip(L, e)) for L in leads):
            count += 1
    return count


@dataclass
class DegreeReport:
    degree: int
    dims: list               # dim of C_i in this degree, i = 0..n
    ranks: list              # rank of maps[i] in this degree, i = 1..n
    exact: bool              # exact at every i >= 1
    euler: int               # alternating sum of dims
    hilbert: int             # dim of (R / ideal) in this degree from a Groebner basis
    euler_ok: bool

    def to_json(self):
        return {"degree": self.degree, "dims": self.dims, "ranks": self.ranks, "exact": self.exact,
                "euler": self.euler, "hilbert": self.hilbert, "euler_ok": self.euler_ok}


@dataclass
class RegularityReport:
    prime: int
    degree_bound: int
    degrees: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return all(d.exact for d in self.degrees)

    @property
    def consistent(self) -> bool:
        return all(d.euler_ok for d in self.degrees)

    @property
    def ok(self) -> bool:
        return self.exact and self.consistent

    def first_failure(self) -> Optional[int]:
        return next((d.degree for d in self.degrees if not (d.exact and d.euler_ok)), None)

    def to_json(self):
        return {"prime": self.prime, "degree_bound": self.degree_bound, "exact": self.exact,
                "consistent": self.consistent, "degrees": [d.to_json() for d in self.degrees]}


def graded_exactness(gens: Sequence[Poly], p: int, dmax: int) -> RegularityReport:
    """Ranks of the graded Koszul differentials over GF(p) in internal degrees 0..dmax."""
    gens = list(gens)
    table = gens[0].table
    n = len(table)
    degs = []
    for g in gens:
        if not g.is_homogeneous() or g.is_zero():
            raise ValueError("graded exactness needs nonzero homogeneous elements")
        degs.append(g.total_degree())
    C = koszul_on(gens)
    r = len(gens)
    field_ring = make_ring(RingSpec.prime_field(p))
    I = PolyIdeal(gens, field=field_ring, table=table)
    leads = [max(t, key=I.order.key) for t in I.basis_terms(dmax)[0]]
    report = RegularityReport(p, dmax)
    for d in range(dmax + 1):
        dims, ranks = [], []
        for i in range(r + 1):
            dims.append(sum(comb(n - 1 + d - sum(degs[k - 1] for k in S), n - 1)
                            if d - sum(degs[k - 1] for k in S) >= 0 else 0 for S in C.bases[i]))
        for i in range(1, r + 1):
            ech = Echelon(p)
            for S in C.bases[i]:
                shift = d - sum(degs[k - 1] for k in S)
                for mono in _monomials(n, shift):
                    vec = {}
                    for tgt, entry in C.maps[i][S].items():
                        for e, c in entry.terms.items():
                            key = (tgt, tuple(x + y for x, y in zip(e, mono)))
                            vec[key] = (vec.get(key, 0) + c) % p
                    vec = {k: v for k, v in vec.items() if v}
                    if vec:
                        ech.add(vec)
            ranks.append(ech.rank)
        exact = all(dims[i] - ranks[i - 1] == (ranks[i] if i < r else 0) for i in range(1, r + 1))
        euler = sum((-1) ** i * x for i, x in enumerate(dims))
        hilb = _hilbert_from_leading(leads, n, d)
        report.degrees.append(DegreeReport(d, dims, ranks, exact, euler, hilb, euler == hilb))
    return report


def check_regular_sequence(ctx_or_gens, p: int, dmax: int) -> RegularityReport:
    """Graded exactness of the Koszul complex on the context's ``B_k`` (or given elements)."""
    gens = ctx_or_gens.Jprime_generators if isinstance(ctx_or_gens, FormalContext) else ctx_or_gens
    return graded_exactness(gens, p, dmax)
