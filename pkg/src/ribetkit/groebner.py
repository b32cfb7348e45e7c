"""Buchberger's algorithm over QQ and prime fields.

Pairs are selected by sugar degree and filtered with the Gebauer-Moeller
installation of the product and chain criteria.  For homogeneous ideals a
basis truncated at a degree bound is enough to decide membership of elements
up to that degree, which is how most membership questions here are answered.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .poly import Exp, MonomialOrder, Poly, VariableTable, apply_unipotent, degrevlex
from .rings import QQ, ZZ, ModularRing, Ring, RingError, make_ring, RingSpec

DEFAULT_SPAIR_BUDGET = 200_000


class BudgetExceeded(RuntimeError):
    """Raised when Buchberger's algorithm processes more S-pairs than allowed."""

    def __init__(self, processed: int, budget: int):
        super().__init__(f"S-pair budget exceeded: {processed} > {budget}")
        self.processed = processed
        self.budget = budget


# ---------------------------------------------------------------------------
# Dict-level kernels


def _divides(a: Exp, b: Exp) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exp, b: Exp) -> Exp:
    return tuple(x if x > y else y for x, y in zip(a, b))


def _coprime(a: Exp, b: Exp) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


class _Field:
    def __init__(self, ring: Ring):
        if ring is QQ:
            self.mod = None
        elif isinstance(ring, ModularRing) and ring.is_field:
            self.mod = ring.modulus
        else:
            raise RingError(f"Groebner bases need QQ or a prime field, not {ring}")
        self.ring = ring

    def norm(self, c):
        return Fraction(c) if self.mod is None else int(c) % self.mod

    def inv(self, c):
        return 1 / c if self.mod is None else pow(c, -1, self.mod)


class _Poly:
    """Mutable working polynomial: dict plus cached leading monomial."""

    __slots__ = ("terms", "lm", "lc", "sugar")

    def __init__(self, terms, key, sugar=None):
        self.terms = terms
        if terms:
            self.lm = max(terms, key=key)
            self.lc = terms[self.lm]
        else:
            self.lm = None
            self.lc = 0
        self.sugar = sugar if sugar is not None else max((sum(e) for e in terms), default=0)


def _sub_mul(p: dict, c, shift: Exp, g: dict, mod) -> None:
    """p <- p - c * x^shift * g, in place."""
    for e, v in g.items():
        m = tuple([x + y for x, y in zip(e, shift)])
        w = p.get(m, 0) - c * v
        if mod is not None:
            w %= mod
        if w:
            p[m] = w
        else:
            p.pop(m, None)


def _reduce_full(f: dict, basis: Sequence[_Poly], key, mod, top_only=False) -> dict:
    """Normal form of ``f`` modulo ``basis`` (monic leading coefficients)."""
    p = dict(f)
    r: dict = {}
    lms = [(g.lm, g) for g in basis if g.terms]
    while p:
        lt = max(p, key=key)
        c = p[lt]
        for lm, g in lms:
            if _divides(lm, lt):
                shift = tuple([x - y for x, y in zip(lt, lm)])
                _sub_mul(p, c, shift, g.terms, mod)
                break
        else:
            if top_only:
                r.update(p)
                return r
            r[lt] = c
            del p[lt]
    return r


def _make_monic(terms: dict, key, field: _Field) -> dict:
    if not terms:
        return terms
    lm = max(terms, key=key)
    inv = field.inv(terms[lm])
    mod = field.mod
    if mod is None:
        return {e: c * inv for e, c in terms.items()}
    return {e: c * inv % mod for e, c in terms.items()}


def buchberger(gens: Sequence[dict], key, field: _Field, nvars: int,
               degree_bound: Optional[int] = None,
               budget: int = DEFAULT_SPAIR_BUDGET) -> tuple[list[dict], dict]:
    """Reduced Groebner basis of ``gens``; returns ``(basis, stats)``."""
    mod = field.mod
    polys: list[_Poly] = []
    stats = {"spairs": 0, "reductions_to_zero": 0, "pairs_skipped": 0}

    G: list[int] = []
    P: list[tuple[int, int]] = []  # live pairs
    heap: list = []
    counter = 0

    def lcm_of(i, j):
        return _lcm(polys[i].lm, polys[j].lm)

    def pair_sugar(i, j, L):
        di = polys[i].sugar - sum(polys[i].lm)
        dj = polys[j].sugar - sum(polys[j].lm)
        return sum(L) + max(di, dj)

    def update(h: int):
        nonlocal P, G
        lmh = polys[h].lm
        C = [(h, g) for g in G]
        D: list[tuple[int, int]] = []
        while C:
            pair = C.pop(0)
            L = lcm_of(*pair)
            if _coprime(lmh, polys[pair[1]].lm):
                D.append(pair)
                continue
            dominated = any(_divides(lcm_of(*q), L) for q in C) or any(_divides(lcm_of(*q), L) for q in D)
            if not dominated:
                D.append(pair)
            else:
                stats["pairs_skipped"] += 1
        E = []
        for pair in D:
            if _coprime(lmh, polys[pair[1]].lm):
                stats["pairs_skipped"] += 1
            else:
                E.append(pair)
        keep = []
        for (a, b) in P:
            L = lcm_of(a, b)
            if (_divides(lmh, L) and lcm_of(a, h) != L and lcm_of(h, b) != L):
                stats["pairs_skipped"] += 1
                continue
            keep.append((a, b))
        P = keep + E
        G = [g for g in G if not _divides(lmh, polys[g].lm)] + [h]

    def insert(terms: dict, sugar=None) -> int:
        terms = _make_monic(terms, key, field)
        polys.append(_Poly(terms, key, sugar))
        return len(polys) - 1

    # input: reduce trivially and insert in increasing leading-term order
    start = []
    for g in gens:
        g = {e: field.norm(c) for e, c in g.items()}
        g = {e: c for e, c in g.items() if c}
        if g:
            start.append(g)
    start.sort(key=lambda t: (max(sum(e) for e in t), key(max(t, key=key))))
    for g in start:
        basis = [polys[i] for i in G]
        r = _reduce_full(g, basis, key, mod)
        if r:
            if degree_bound is not None and max(sum(e) for e in g) > degree_bound:
                # generators above the bound are irrelevant for truncated bases
                continue
            h = insert(r, max(sum(e) for e in g))
            update(h)

    while P:
        # choose pair with minimal sugar, ties by lcm order
        P.sort(key=lambda q: (pair_sugar(q[0], q[1], lcm_of(*q)), key(lcm_of(*q))))
        i, j = P.pop(0)
        L = lcm_of(i, j)
        if degree_bound is not None and sum(L) > degree_bound:
            stats["pairs_skipped"] += 1
            continue
        stats["spairs"] += 1
        if stats["spairs"] > budget:
            raise BudgetExceeded(stats["spairs"], budget)
        fi, fj = polys[i], polys[j]
        s: dict = {}
        _sub_mul(s, -1, tuple(a - b for a, b in zip(L, fi.lm)), fi.terms, mod)
        _sub_mul(s, 1, tuple(a - b for a, b in zip(L, fj.lm)), fj.terms, mod)
        sugar = pair_sugar(i, j, L)
        basis = [polys[g] for g in G]
        r = _reduce_full(s, basis, key, mod)
        if not r:
            stats["reductions_to_zero"] += 1
            continue
        h = insert(r, sugar)
        update(h)

    # interreduce
    final = [polys[g] for g in G]
    final.sort(key=lambda g: key(g.lm))
    minimal = [g for g in final
               if not any(h is not g and _divides(h.lm, g.lm) and (h.lm != g.lm or id(h) < id(g))
                          for h in final)]
    reduced = []
    for g in minimal:
        others = [h for h in minimal if h is not g]
        tail = dict(g.terms)
        lead = g.lm
        lc = tail.pop(lead)
        r = _reduce_full(tail, others, key, mod)
        r[lead] = lc
        reduced.append(_make_monic(r, key, field))
    reduced.sort(key=lambda t: key(max(t, key=key)), reverse=True)
    stats["basis_size"] = len(reduced)
    return reduced, stats


# ---------------------------------------------------------------------------
# Public ideal object


class PolyIdeal:
    """Ideal of a polynomial ring over a field, with cached Groebner bases.

    Integer-coefficient generators are read over ``field`` (default QQ).
    """

    def __init__(self, gens: Iterable[Poly], order: MonomialOrder = degrevlex,
                 field: Ring = QQ, table: Optional[VariableTable] = None,
                 budget: int = DEFAULT_SPAIR_BUDGET):
        gens = list(gens)
        if table is None:
            if not gens:
                raise ValueError("empty ideal needs an explicit variable table")
            table = gens[0].table
        self.table = table
        self.order = order
        self.field = field
        self._field = _Field(field)
        self.budget = budget
        self.gens: list[Poly] = [self._lift(g) for g in gens]
        self.homogeneous = all(g.is_homogeneous() for g in self.gens)
        self._bases: dict[Optional[int], tuple[list[dict], dict]] = {}

    def _lift(self, f: Poly) -> Poly:
        if f.table != self.table:
            f = f.to_table(self.table)
        if f.ring == self.field:
            return f
        if self.field is QQ or f.ring in (ZZ, QQ):
            return Poly(self.table, f.terms, self.field)
        raise RingError(f"cannot read {f.ring} coefficients over {self.field}")

    def __repr__(self):
        return f"PolyIdeal({len(self.gens)} generators over {self.field})"

    def __len__(self):
        return len(self.gens)

    # bases ----------------------------------------------------------------

    def basis_terms(self, degree_bound: Optional[int] = None):
        if degree_bound is not None and not self.homogeneous:
            degree_bound = None
        if None in self._bases:
            return self._bases[None]
        if degree_bound is not None:
            # any cached truncation at a higher bound is also valid here
            for d, cached in self._bases.items():
                if d is not None and d >= degree_bound:
                    return cached
        res = buchberger([g.terms for g in self.gens], self.order.key, self._field,
                         len(self.table), degree_bound=degree_bound, budget=self.budget)
        self._bases[degree_bound] = res
        return res

    def groebner_basis(self, degree_bound: Optional[int] = None) -> list[Poly]:
        terms, _ = self.basis_terms(degree_bound)
        return [Poly(self.table, t, self.field, _trusted=True) for t in terms]

    def stats(self) -> dict:
        out = {}
        for d, (_, st) in self._bases.items():
            out["full" if d is None else f"degree<={d}"] = dict(st)
        return out

    # membership -----------------------------------------------------------

    def normal_form(self, f: Poly, degree_bound: Optional[int] = None) -> Poly:
        f = self._lift(f)
        if self.homogeneous and degree_bound is None:
            degree_bound = max(f.total_degree(), 0)
        terms, _ = self.basis_terms(degree_bound)
        key = self.order.key
        basis = [_Poly(t, key) for t in terms]
        return Poly(self.table, _reduce_full(f.terms, basis, key, self._field.mod),
                    self.field, _trusted=True)

    def contains(self, f: Poly) -> bool:
        return self.normal_form(f).is_zero()

    def __contains__(self, f: Poly) -> bool:
        return self.contains(f)

    def is_unit_ideal(self) -> bool:
        return self.contains(Poly.const(self.table, 1, self.field))

    def issubset(self, other: "PolyIdeal") -> bool:
        return all(other.contains(g) for g in self.gens)


def groebner_basis(I: PolyIdeal, degree_bound: Optional[int] = None) -> PolyIdeal:
    """Compute and cache the reduced basis of ``I``; returns ``I``."""
    I.basis_terms(degree_bound)
    return I


def normal_form(f: Poly, I: PolyIdeal) -> Poly:
    return I.normal_form(f)


def contains(I: PolyIdeal, f: Poly) -> bool:
    return I.contains(f)


def stable_under_substitution(I: PolyIdeal, endo: Callable[[Poly], Poly] = None,
                              aux: str = "x") -> bool:
    """True iff every coefficient of ``endo(g)`` in ``aux`` lies in ``I``.

    ``endo`` defaults to the lower unipotent action; coefficients are read back
    over the ideal's own table.
    """
    return not unstable_witnesses(I, endo, aux)


def unstable_witnesses(I: PolyIdeal, endo: Callable[[Poly], Poly] = None,
                       aux: str = "x") -> list[tuple[int, int]]:
    """Pairs ``(generator index, power of aux)`` whose coefficient escapes ``I``."""
    if endo is None:
        endo = lambda g: apply_unipotent(g, aux)
    bad = []
    for gi, g in enumerate(I.gens):
        image = endo(g)
        if aux not in image.table:
            coeffs = {0: image}
        else:
            coeffs = image.coefficients_in(aux)
        for k, coeff in coeffs.items():
            coeff = coeff.to_table(I.table) if coeff.table != I.table else coeff
            if not I.contains(coeff):
                bad.append((gi, k))
    return bad
