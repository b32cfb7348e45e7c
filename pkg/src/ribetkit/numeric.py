"""Finite-precision versions of the cocycle constructions.

Everything happens over a finite local ring ``T = ZZ/p^n``: matrix groups are
enumerated breadth first, the module ``rho(Delta)/rho(Delta^2)`` is presented
through its epsilon/delta relations, the uniformizer recursion produces
cocycles or runs out of precision, and the eigenbasis construction yields a
cocycle valued in ``B/IB``.  Verdicts hold at the stated precision only.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .fitting import PresentedModule, fitting_ideal, howell_form, kernel_mod, solve_mod
from .matrices import Mat2, det_n, mat_vec
from .rings import LocalIdeal, ModularRing, Ring, RingError, ideal_in_ring

DEFAULT_GROUP_BUDGET = 100_000


class HypothesisViolation(ValueError):
    """Input does not satisfy the hypotheses a construction needs."""


class GroupBudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Representations and group enumeration


@dataclass
class GroupElement:
    matrix: Mat2
    word: tuple  # 0-based generator indices
    chi1: Any = None
    chi2: Any = None


@dataclass
class FiniteRepresentation:
    ring: ModularRing
    generators: list
    chi1: Optional[list] = None
    chi2: Optional[list] = None
    ideal: Optional[LocalIdeal] = None

    def __post_init__(self):
        R = self.ring
        if not isinstance(R, ModularRing) or not R.is_local:
            raise RingError(f"representations need a truncated DVR ZZ/p^n, not {R}")
        self.generators = [g if isinstance(g, Mat2) else Mat2.from_rows(g, R) for g in self.generators]
        for g in self.generators:
            if not R.is_unit(g.det()):
                raise HypothesisViolation(f"generator {g.to_json()} has non-unit determinant")
        for chi in (self.chi1, self.chi2):
            if chi is not None:
                if len(chi) != len(self.generators):
                    raise ValueError("character needs one value per generator")
                if not all(R.is_unit(R(v)) for v in chi):
                    raise HypothesisViolation("character values must be units")
        if self.chi1 is not None:
            self.chi1 = [R(v) for v in self.chi1]
        if self.chi2 is not None:
            self.chi2 = [R(v) for v in self.chi2]
        if self.ideal is None:
            self.ideal = ideal_in_ring(R, [R.p])

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def precision(self) -> int:
        return self.ring.n

    def check_char_congruence(self, group: Optional[list] = None) -> bool:
        """``tr = chi1 + chi2`` and ``det = chi1 chi2`` modulo ``I`` on group elements."""
        R, I = self.ring, self.ideal
        elems = group if group is not None else enumerate_group(self)
        for g in elems:
            c1 = g.chi1 if g.chi1 is not None else R.one
            c2 = g.chi2 if g.chi2 is not None else R.one
            if not I.contains(R.sub(g.matrix.trace(), R.add(c1, c2))):
                return False
            if not I.contains(R.sub(g.matrix.det(), R.mul(c1, c2))):
                return False
        return True


def _key(M: Mat2) -> tuple:
    return M.entries()


def enumerate_group(rep: FiniteRepresentation, budget: int = DEFAULT_GROUP_BUDGET) -> list[GroupElement]:
    """Breadth-first closure of the generators, with one word per element.

    Characters are propagated along every Cayley-graph edge; an inconsistency
    means the given values do not define a character of the group.
    """
    R = rep.ring
    one = GroupElement(Mat2.identity(R), (), R.one if rep.chi1 else None, R.one if rep.chi2 else None)
    seen: dict[tuple, GroupElement] = {_key(one.matrix): one}
    order = [one]
    queue = deque([one])
    while queue:
        g = queue.popleft()
        for i, s in enumerate(rep.generators):
            h = g.matrix * s
            c1 = R.mul(g.chi1, rep.chi1[i]) if rep.chi1 else None
            c2 = R.mul(g.chi2, rep.chi2[i]) if rep.chi2 else None
            k = _key(h)
            old = seen.get(k)
            if old is not None:
                if (old.chi1, old.chi2) != (c1, c2):
                    raise HypothesisViolation(
                        f"characters are not well defined: word {old.word} vs {g.word + (i,)}")
                continue
            if len(order) >= budget:
                raise GroupBudgetExceeded(f"group has more than {budget} elements")
            el = GroupElement(h, g.word + (i,), c1, c2)
            seen[k] = el
            order.append(el)
            queue.append(el)
    return order


# ---------------------------------------------------------------------------
# rho(Delta), epsilon and delta relations


def _vec(M: Mat2) -> list[int]:
    return list(M.entries())


@dataclass
class DeltaEpsilonData:
    ring: ModularRing
    spanning: list            # Mat2 rho_i = rho(g_i) - 1
    words: list               # word of g_i
    eps_rows: list            # Howell basis of {eps : sum eps_i rho_i = 0}
    delta: dict               # (i, j) -> [delta_ij1, ..., delta_ijr], 1-based keys

    @property
    def r(self) -> int:
        return len(self.spanning)

    def relation_rows(self) -> list[tuple[tuple, list]]:
        """Labelled rows: ``(("eps", q), row)`` and ``(("delta", i, j), row)``."""
        rows = [(("eps", q + 1), list(e)) for q, e in enumerate(self.eps_rows)]
        for (i, j), row in sorted(self.delta.items()):
            rows.append((("delta", i, j), list(row)))
        return rows

    def verify(self) -> bool:
        R = self.ring
        r = self.r
        zero = Mat2.zero(R)
        for e in self.eps_rows:
            total = zero
            for c, M in zip(e, self.spanning):
                total = total + M.scale(c)
            if not total.is_zero():
                return False
        for (i, j), row in self.delta.items():
            lhs = self.spanning[i - 1] * self.spanning[j - 1]
            rhs = zero
            for c, M in zip(row, self.spanning):
                rhs = rhs + M.scale(c)
            if lhs != rhs:
                return False
        return True

    def entries(self, i: int) -> tuple:
        """``(a, b, c, d)`` of the 1-based spanning matrix ``i``."""
        return self.spanning[i - 1].entries()


def span_delta(rep: FiniteRepresentation, group: Optional[list] = None) -> DeltaEpsilonData:
    """Greedy spanning set of ``rho(Delta)`` with its epsilon and delta relations."""
    R = rep.ring
    N = R.modulus
    group = group if group is not None else enumerate_group(rep)
    I2 = Mat2.identity(R)
    spanning, words, rows = [], [], []
    H = howell_form([], N, 4)
    for g in group:
        A = g.matrix - I2
        v = _vec(A)
        if H.contains(v):
            continue
        spanning.append(A)
        words.append(g.word)
        rows.append(v)
        H = howell_form(rows, N, 4)
    r = len(spanning)
    eps_rows = kernel_mod(rows, N).rows if r else []
    delta = {}
    for i in range(r):
        for j in range(r):
            target = _vec(spanning[i] * spanning[j])
            sol = solve_mod(rows, target, N)
            if sol is None:
                raise ArithmeticError(
                    f"rho_{i + 1} rho_{j + 1} is not in the span of the rho_k; the span is wrong")
            delta[(i + 1, j + 1)] = sol
    data = DeltaEpsilonData(R, spanning, words, [list(e) for e in eps_rows], delta)
    if not data.verify():
        raise ArithmeticError("stored epsilon/delta relations do not verify")
    return data


def altered_matrix(data: DeltaEpsilonData, labels: Sequence[tuple], rows: Sequence[list]) -> list[list]:
    """Numeric ``D'``: on a delta row ``(i, j)`` subtract ``a_i`` at ``j`` and ``d_j`` at ``i``."""
    R = data.ring
    out = []
    for lab, row in zip(labels, rows):
        row = list(row)
        if lab[0] == "delta":
            _, i, j = lab
            a_i = data.entries(i)[0]
            d_j = data.entries(j)[3]
            row[j - 1] = R.sub(row[j - 1], a_i)
            row[i - 1] = R.sub(row[i - 1], d_j)
        out.append(row)
    return out


def b_vector(data: DeltaEpsilonData) -> list:
    return [M.b for M in data.spanning]


def irreducibility_proxy(data: DeltaEpsilonData) -> bool:
    """The b-entries of the spanning matrices generate the unit ideal."""
    return ideal_in_ring(data.ring, b_vector(data)).is_unit_ideal()


def _additive_closure(gens: Sequence[list], N: int) -> set:
    span = {(0,) * 4}
    frontier = list(span)
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((x + y) % N for x, y in zip(v, g))
                if w not in span:
                    span.add(w)
                    nxt.append(w)
        frontier = nxt
    return span


def module_order_by_enumeration(data: DeltaEpsilonData) -> int:
    """``#(rho(Delta)/rho(Delta^2))`` from explicit additive closures."""
    N = data.ring.modulus
    top = _additive_closure([_vec(M) for M in data.spanning], N)
    prods = [_vec(A * B) for A in data.spanning for B in data.spanning]
    bottom = _additive_closure(prods, N)
    if len(top) % len(bottom):
        raise ArithmeticError("rho(Delta^2) is not a subgroup of rho(Delta)")
    return len(top) // len(bottom)


@dataclass
class RelationMatrixCheck:
    labels: tuple
    det: int
    det_in_ideal: bool
    Dprime_w_zero: bool
    det_Dprime: int
    proxy: bool


@dataclass
class ModuleCheck:
    data: DeltaEpsilonData
    presentation: PresentedModule
    fitting: LocalIdeal
    contained: bool
    module_order: int
    oracle_agrees: bool
    relation_checks: list
    exhaustive: bool
    proxy: bool

    @property
    def all_dets_in_ideal(self) -> bool:
        return all(c.det_in_ideal for c in self.relation_checks)

    @property
    def all_Dprime_w_zero(self) -> bool:
        return all(c.Dprime_w_zero for c in self.relation_checks)

    @property
    def detzero_under_proxy(self) -> bool:
        return all(c.det_Dprime == 0 for c in self.relation_checks if c.proxy)


def relation_matrices(data: DeltaEpsilonData, rng: random.Random, samples: int = 100,
                      exhaustive_max_r: int = 3):
    """Yield ``(labels, rows)`` for r x r matrices of relation rows."""
    rows = data.relation_rows()
    r = data.r
    if r == 0:
        return [], True
    if r <= exhaustive_max_r:
        return [tuple(zip(*c)) for c in combinations(rows, r)], True
    chosen = []
    for _ in range(samples):
        pick = sorted(rng.sample(range(len(rows)), r))
        chosen.append(tuple(zip(*[rows[k] for k in pick])))
    return chosen, False


def build_M_and_check(rep: FiniteRepresentation, data: Optional[DeltaEpsilonData] = None,
                      rng: Optional[random.Random] = None, samples: int = 100) -> ModuleCheck:
    """Present ``M = rho(Delta)/rho(Delta^2)``, compute its Fitting ideal and test it against ``I``."""
    R = rep.ring
    rng = rng or random.Random(0)
    data = data if data is not None else span_delta(rep)
    r = data.r
    rows = [row for _, row in data.relation_rows()]
    M = PresentedModule(R, rows, r)
    F = fitting_ideal(M)
    order = module_order_by_enumeration(data)
    oracle = F == ideal_in_ring(R, [order])
    proxy = irreducibility_proxy(data) if r else False
    w = b_vector(data)
    checks = []
    mats, exhaustive = relation_matrices(data, rng, samples)
    for labels, D in mats:
        d = det_n([list(x) for x in D], R)
        Dp = altered_matrix(data, labels, D)
        Dw = mat_vec(Dp, w, R)
        checks.append(RelationMatrixCheck(
            labels=tuple(labels), det=d, det_in_ideal=rep.ideal.contains(d),
            Dprime_w_zero=all(x == 0 for x in Dw), det_Dprime=det_n(Dp, R), proxy=proxy))
    return ModuleCheck(data, M, F, F <= rep.ideal, order, oracle, checks, exhaustive, proxy)


def check_trace_det_in_I(rep: FiniteRepresentation, data: Optional[DeltaEpsilonData] = None,
                         rng: Optional[random.Random] = None, trials: int = 50) -> bool:
    """Traces and determinants of spanning elements, random combinations and products lie in ``I``."""
    R, I = rep.ring, rep.ideal
    rng = rng or random.Random(0)
    data = data if data is not None else span_delta(rep)
    mats = list(data.spanning)
    if not mats:
        return True
    for _ in range(trials):
        combo = Mat2.zero(R)
        for M in mats:
            combo = combo + M.scale(rng.randrange(R.modulus))
        mats.append(combo)
        k = rng.randint(2, 3)
        prod = Mat2.identity(R)
        for _ in range(k):
            prod = prod * rng.choice(data.spanning)
        mats.append(prod)
    return all(I.contains(M.trace()) and I.contains(M.det()) for M in mats)


# ---------------------------------------------------------------------------
# Cocycles


class QuotientModule:
    """``top / sub`` for ideals ``sub <= top`` of a finite residue ring."""

    def __init__(self, ring: ModularRing, sub: LocalIdeal, top: Optional[LocalIdeal] = None):
        self.ring = ring
        self.sub = sub
        self.top = top if top is not None else ideal_in_ring(ring, [1])
        if not sub <= self.top:
            raise ValueError("submodule is not contained in the ambient ideal")

    def reduce(self, x) -> int:
        return self.sub.reduce(self.ring(x))

    def elements(self) -> list[int]:
        return sorted({self.reduce(x) for x in self.top.elements()})

    def contains(self, x) -> bool:
        return self.top.contains(self.ring(x))

    def size(self) -> int:
        return len(self.elements())

    def span(self, values: Sequence[int]) -> LocalIdeal:
        """Submodule generated by ``values`` as an ideal between ``sub`` and ``top``."""
        return ideal_in_ring(self.ring, list(values) + list(self.sub.generators()))

    def __repr__(self):
        return f"QuotientModule({self.top!r} / {self.sub!r})"


@dataclass
class Cocycle:
    """Values ``kappa(sigma)`` in a module with twisted action ``action(sigma)``."""

    elements: list        # GroupElement list, BFS order
    values: list          # module elements, aligned with ``elements``
    action: list          # chi2^-1 chi1 (sigma), aligned with ``elements``
    module: QuotientModule

    def check_cocycle(self) -> bool:
        R = self.module.ring
        index = {_key(g.matrix): k for k, g in enumerate(self.elements)}
        for i, s in enumerate(self.elements):
            for j, t in enumerate(self.elements):
                k = index[_key(s.matrix * t.matrix)]
                rhs = R.add(self.values[i], R.mul(self.action[i], self.values[j]))
                if self.module.reduce(self.values[k]) != self.module.reduce(rhs):
                    return False
        return True

    def is_zero(self) -> bool:
        return all(self.module.reduce(v) == 0 for v in self.values)

    def to_json(self):
        return [{"word": list(g.word), "value": int(v)} for g, v in zip(self.elements, self.values)]


def h1_coboundary_test(kappa: Cocycle) -> Optional[int]:
    """Some ``x`` with ``kappa(s) = (action(s) - 1) x`` for all ``s``, else None."""
    R, mod = kappa.module.ring, kappa.module
    for x in mod.elements():
        if all(mod.reduce(v) == mod.reduce(R.mul(R.sub(a, 1), x))
               for v, a in zip(kappa.values, kappa.action)):
            return x
    return None


# ---------------------------------------------------------------------------
# Uniformizer recursion


@dataclass
class NontrivialCocycle:
    step: int
    kappa: Cocycle
    digits: list
    precision_left: int
    kind: str = "nontrivial_cocycle"


@dataclass
class PrecisionExhausted:
    digits: list
    precision_used: int
    kind: str = "precision_exhausted"

    def value(self, p: int) -> int:
        return sum(x * p ** k for k, x in enumerate(self.digits))


@dataclass
class _TriangularState:
    """Entries of every group element at the current step."""

    p: int
    prec: int            # a, b, d known modulo p^prec
    cprec: int           # c known modulo p^cprec
    a: list
    b: list
    c: list
    d: list

    @property
    def mod(self) -> int:
        return self.p ** self.prec


def _residual_shape(state: _TriangularState, chi1, chi2) -> str:
    p = state.p
    if any(c % p for c in state.c):
        return "bad"
    if all((a - x) % p == 0 for a, x in zip(state.a, chi1)) and \
            all((d - y) % p == 0 for d, y in zip(state.d, chi2)):
        return "upper"
    if all((a - y) % p == 0 for a, y in zip(state.a, chi2)) and \
            all((d - x) % p == 0 for d, x in zip(state.d, chi1)):
        return "swapped"
    return "bad"


def _swap_repair(state: _TriangularState) -> _TriangularState:
    """Conjugate by diag(p, 1) then exchange basis vectors; costs one digit."""
    p = state.p
    prec = state.prec - 1
    m = p ** prec
    a = [x % m for x in state.d]
    d = [x % m for x in state.a]
    b = [(c // p) % m for c in state.c]   # c/p becomes the new upper-right entry
    c = [(p * x) % (p ** (state.prec + 1)) for x in state.b]
    return _TriangularState(p, prec, state.prec + 1, a, b, c, d)


def _residue_cocycle(group, state: _TriangularState, chi1, chi2, ring: ModularRing) -> Cocycle:
    """``kappa = chi2^-1 b`` modulo the maximal ideal."""
    p = state.p
    residue = ideal_in_ring(ring, [p])
    values, action = [], []
    for b, x, y in zip(state.b, chi1, chi2):
        yinv = pow(y, -1, ring.modulus)
        values.append(b * yinv % p)
        action.append(x * yinv % ring.modulus)
    return Cocycle(group, values, action, QuotientModule(ring, residue))


def dvr_recursion(rep: FiniteRepresentation, group: Optional[list] = None,
                  repair: bool = True, trace: Optional[list] = None,
                  kappas: Optional[list] = None):
    """Run the conjugation loop by ``(1 x; 0 p)`` until a nontrivial cocycle appears.

    Returns :class:`NontrivialCocycle` or :class:`PrecisionExhausted`.  When
    ``trace`` is a list, per-step diagnostics are appended to it; ``kappas``
    collects the residual cocycle of every step.
    """
    R = rep.ring
    if rep.chi1 is None or rep.chi2 is None:
        raise HypothesisViolation("the recursion needs both characters")
    group = group if group is not None else enumerate_group(rep)
    p, n = R.p, R.n
    chi1 = [g.chi1 for g in group]
    chi2 = [g.chi2 for g in group]
    state = _TriangularState(p, n, n, [g.matrix.a for g in group], [g.matrix.b for g in group],
                             [g.matrix.c for g in group], [g.matrix.d for g in group])
    shape = _residual_shape(state, chi1, chi2)
    if shape == "swapped" and repair:
        state = _swap_repair(state)
        shape = _residual_shape(state, chi1, chi2)
        if trace is not None:
            trace.append({"repair": "swap", "precision": state.prec})
    if shape != "upper":
        raise HypothesisViolation("residual representation is not upper triangular with "
                                  "diagonal (chi1, chi2) and cannot be repaired")
    digits: list[int] = []
    step = 0
    while True:
        step += 1
        lower_ok = all(c % p ** step == 0 for c in state.c)
        kappa = _residue_cocycle(group, state, chi1, chi2, R)
        x = h1_coboundary_test(kappa)
        if kappas is not None:
            kappas.append(kappa)
        if trace is not None:
            trace.append({"step": step, "precision": state.prec, "lower_left_ok": lower_ok,
                          "coboundary": x is not None})
        if not lower_ok:
            raise ArithmeticError(f"lower-left entries not divisible by p^{step}")
        if x is None:
            return NontrivialCocycle(step, kappa, digits, state.prec)
        if state.prec <= 1:
            return PrecisionExhausted(digits, n)
        digit = _choose_digit(state, chi1, chi2)
        digits.append(digit)
        state = _conjugate_step(state, digit)


def _choose_digit(state: _TriangularState, chi1, chi2) -> int:
    """Residue mod p of the first solution ``y`` of ``b = (chi1 - chi2) y`` to the highest power."""
    p = state.p
    for j in range(state.prec, 0, -1):
        m = p ** j
        A = [[(x - y) % m for x, y in zip(chi1, chi2)]]
        sol = solve_mod(A, [b % m for b in state.b], m)
        if sol is not None:
            return sol[0] % p
    raise ArithmeticError("coboundary witness vanished")  # excluded by the mod-p test


def _conjugate_step(state: _TriangularState, x: int) -> _TriangularState:
    p = state.p
    M = state.mod
    prec = state.prec - 1
    m = p ** prec
    a, b, c, d = [], [], [], []
    for ai, bi, ci, di in zip(state.a, state.b, state.c, state.d):
        num = (bi + x * (di - ai) - x * x * ci) % M
        if num % p:
            raise ArithmeticError("upper-right entry not divisible by the uniformizer")
        a.append((ai + x * ci) % m)
        b.append((num // p) % m)
        c.append((p * ci) % p ** (state.cprec + 1))
        d.append((di - x * ci) % m)
    return _TriangularState(p, prec, state.cprec + 1, a, b, c, d)


def exhaustive_coboundary_search(kappa: Cocycle) -> list[int]:
    """Every ``x`` in the ring (not only the quotient) that trivializes ``kappa``."""
    R, mod = kappa.module.ring, kappa.module
    hits = []
    for x in range(R.modulus):
        if all(mod.reduce(v) == mod.reduce(R.mul(R.sub(a, 1), x))
               for v, a in zip(kappa.values, kappa.action)):
            hits.append(x)
    return hits


# ---------------------------------------------------------------------------
# Residually distinguishable construction


def hensel_roots(M: Mat2, approx: Sequence[int]) -> list[int]:
    """Lift approximate eigenvalues of ``M`` to exact roots of its characteristic polynomial."""
    R = M.ring
    t, D = M.trace(), M.det()
    roots = []
    for lam in approx:
        lam = R(lam)
        for _ in range(2 * R.n + 2):
            f = R.add(R.sub(R.mul(lam, lam), R.mul(t, lam)), D)
            if f == 0:
                break
            fp = R.sub(R.mul(2, lam), t)
            inv = R.try_invert(fp)
            if inv is None:
                raise HypothesisViolation("eigenvalues are not distinct modulo the maximal ideal")
            lam = R.sub(lam, R.mul(f, inv))
        if R.add(R.sub(R.mul(lam, lam), R.mul(t, lam)), D) != 0:
            raise HypothesisViolation("Hensel lifting did not converge")
        roots.append(lam)
    return roots


def eigenbasis(M: Mat2, lam1: int, lam2: int) -> Mat2:
    """Invertible ``P`` with ``P^-1 M P = diag(lam1, lam2)``."""
    R = M.ring
    cols = []
    for other in (lam2, lam1):
        K = M - Mat2.diag(other, other, R)
        # columns of M - other lie in the eigenspace of the remaining eigenvalue
        options = [(K.a, K.c), (K.b, K.d)]
        col = next((v for v in options if R.is_unit(v[0]) or R.is_unit(v[1])), None)
        if col is None:
            raise HypothesisViolation("no unit eigenvector; eigenvalues not distinct mod m")
        cols.append(col)
    P = Mat2(cols[0][0], cols[1][0], cols[0][1], cols[1][1], R)
    if not R.is_unit(P.det()):
        raise HypothesisViolation("eigenvectors are not independent modulo m")
    return P


@dataclass
class DistinguishableResult:
    basis: Mat2
    eigenvalues: tuple
    conjugated: list            # Mat2 per group element in the eigenbasis
    adcong_ok: bool
    B: LocalIdeal
    IB: LocalIdeal
    kappa: Cocycle
    cocycle_ok: bool
    kappa_tau_zero: bool
    surjective: bool
    witness_ok: bool
    witnesses_checked: int
    fitting_in_I: bool


def distinguishable_construct(rep: FiniteRepresentation, tau_word: Sequence[int],
                              group: Optional[list] = None) -> DistinguishableResult:
    """Eigenbasis of ``rho(tau)``, congruences for a and d, and the cocycle in ``B/IB``."""
    R, I = rep.ring, rep.ideal
    if rep.chi1 is None or rep.chi2 is None:
        raise HypothesisViolation("the construction needs both characters")
    group = group if group is not None else enumerate_group(rep)
    tau_mat = Mat2.identity(R)
    c1t, c2t = R.one, R.one
    for i in tau_word:
        tau_mat = tau_mat * rep.generators[i]
        c1t, c2t = R.mul(c1t, rep.chi1[i]), R.mul(c2t, rep.chi2[i])
    if not R.is_unit(R.sub(c1t, c2t)):
        raise HypothesisViolation("chi1(tau) - chi2(tau) is not a unit")
    lam1, lam2 = hensel_roots(tau_mat, [c1t, c2t])
    if not (I.contains(R.sub(lam1, c1t)) and I.contains(R.sub(lam2, c2t))):
        raise HypothesisViolation("eigenvalues are not congruent to the characters modulo I")
    P = eigenbasis(tau_mat, lam1, lam2)
    Pinv = P.inverse()
    conj = [Pinv * g.matrix * P for g in group]
    adcong = all(I.contains(R.sub(M.a, g.chi1)) and I.contains(R.sub(M.d, g.chi2))
                 for M, g in zip(conj, group))
    B = ideal_in_ring(R, [M.b for M in conj])
    IB = B * I
    module = QuotientModule(R, IB, B)
    values, action = [], []
    for M, g in zip(conj, group):
        inv2 = R.try_invert(g.chi2)
        values.append(module.reduce(R.mul(inv2, M.b)))
        action.append(R.mul(inv2, g.chi1))
    kappa = Cocycle(group, values, action, module)
    cocycle_ok = kappa.check_cocycle()
    tau_index = next(k for k, g in enumerate(group) if g.matrix == tau_mat)
    kappa_tau_zero = module.reduce(values[tau_index]) == 0
    surjective = module.span(values) == B
    # witness extraction for every cohomologous cocycle
    u = R.sub(action[tau_index], R.one)
    uinv = R.try_invert(u)
    witness_ok = uinv is not None
    count = 0
    for x in module.elements():
        count += 1
        shifted = [module.reduce(R.add(v, R.mul(R.sub(a, R.one), x))) for v, a in zip(values, action)]
        recovered = module.reduce(R.mul(uinv, shifted[tau_index])) if uinv is not None else None
        if recovered != module.reduce(x):
            witness_ok = False
            break
        if module.span(shifted) != B:
            witness_ok = False
            break
    fitting_in_I = _cyclic_fitting(R, B, IB) <= I
    return DistinguishableResult(P, (lam1, lam2), conj, adcong, B, IB, kappa, cocycle_ok,
                                 kappa_tau_zero, surjective, witness_ok, count, fitting_in_I)


def _cyclic_fitting(R: ModularRing, B: LocalIdeal, IB: LocalIdeal) -> LocalIdeal:
    """Fitting ideal of ``B/IB`` presented on the generator of the principal ideal ``B``."""
    beta = B.generators()[0]
    relations = [[t] for t in range(R.modulus) if IB.contains(R.mul(t, beta))]
    return fitting_ideal(PresentedModule(R, relations, 1))


# ---------------------------------------------------------------------------
# Instances


def _local(p: int, n: int) -> ModularRing:
    from .rings import RingSpec, make_ring
    return make_ring(RingSpec.truncated_dvr(p, n))


def congruence_kernel_instance() -> FiniteRepresentation:
    """Kernel of SL2(ZZ/4) -> SL2(ZZ/2) with ``I = (2)``; all b-entries are even."""
    R = _local(2, 2)
    gens = [[[1, 2], [0, 1]], [[1, 0], [2, 1]], [[3, 0], [0, 3]]]
    return FiniteRepresentation(R, gens, ideal=ideal_in_ring(R, [2]))


def borel_instance() -> FiniteRepresentation:
    """``<(1 1; 0 1), diag(3, 1)>`` over ZZ/8 with ``I = (2)``."""
    R = _local(2, 3)
    gens = [[[1, 1], [0, 1]], [[3, 0], [0, 1]]]
    return FiniteRepresentation(R, gens, ideal=ideal_in_ring(R, [2]))


def split_conjugate_instance(p: int = 2, n: int = 4, x0: int = 5,
                             chi1: int = 1, chi2: int = 3) -> FiniteRepresentation:
    """``u^-1 diag(chi1, chi2) u`` with ``u = (1 x0; 0 1)``."""
    from .matrices import conjugate_simultaneous
    R = _local(p, n)
    u = Mat2.from_rows([[1, x0], [0, 1]], R)
    (g,) = conjugate_simultaneous(u, [Mat2.diag(chi1, chi2, R)])
    return FiniteRepresentation(R, [g], [chi1], [chi2], ideal=ideal_in_ring(R, [p]))


def step_two_instance() -> FiniteRepresentation:
    """Over ZZ/27: one conjugation step, then a nontrivial cocycle."""
    R = _local(3, 3)
    gens = [[[1, 3], [0, 1]], [[1, 2], [0, -1]]]
    return FiniteRepresentation(R, gens, [1, 1], [1, -1], ideal=ideal_in_ring(R, [3]))


def search_step_two_instances(limit: int = 5) -> list[tuple[int, int]]:
    """Upper-right entries ``(b1, b2)`` of ``(1 b1; 0 1), (1 b2; 0 -1)`` over ZZ/27 stopping at step 2."""
    R = _local(3, 3)
    hits = []
    for b1 in range(27):
        for b2 in range(27):
            rep = FiniteRepresentation(R, [[[1, b1], [0, 1]], [[1, b2], [0, -1]]], [1, 1], [1, -1])
            res = dvr_recursion(rep)
            if isinstance(res, NontrivialCocycle) and res.step == 2 \
                    and not exhaustive_coboundary_search(res.kappa):
                hits.append((b1, b2))
                if len(hits) >= limit:
                    return hits
    return hits


def dihedral_instance(rng: Optional[random.Random] = None) -> tuple[FiniteRepresentation, tuple]:
    """Dihedral group over ZZ/27 in a random basis; returns the rep and the word of ``tau``."""
    R = _local(3, 3)
    rng = rng or random.Random(0)
    while True:
        S0 = Mat2.from_rows([[rng.randrange(27) for _ in range(2)] for _ in range(2)], R)
        if R.is_unit(S0.det()):
            break
    base = [Mat2.from_rows([[1, 1], [0, 1]], R), Mat2.diag(1, -1, R)]
    gens = [S0.inverse() * g * S0 for g in base]
    return FiniteRepresentation(R, gens, [1, 1], [1, -1], ideal=ideal_in_ring(R, [3])), (1,)


def random_generator_instance(rng: random.Random, p: int, n: int, count: int) -> FiniteRepresentation:
    """``count`` generators ``U + p X`` with ``U`` in ``{1, (1 1; 0 1)}`` and ``I = (p)``."""
    R = _local(p, n)
    unip = Mat2.from_rows([[1, 1], [0, 1]], R)
    gens = []
    while len(gens) < count:
        U = rng.choice([Mat2.identity(R), unip])
        X = Mat2(*(rng.randrange(R.modulus) for _ in range(4)), R)
        g = U + X.scale(p)
        if R.is_unit(g.det()):
            gens.append(g)
    return FiniteRepresentation(R, gens, ideal=ideal_in_ring(R, [p]))
