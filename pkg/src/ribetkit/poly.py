"""Sparse multivariate polynomials with exact coefficients.

A polynomial is a dict from exponent tuples to nonzero coefficients, tied to a
shared :class:`VariableTable`.  Coefficient rings are ``ZZ``, ``QQ`` or a
residue ring ``ZZ/N``; coefficients are stored as native ``int``/``Fraction``
values so arithmetic stays on the fast path.
"""

from __future__ import annotations

import ast
import re
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .rings import QQ, ZZ, ModularRing, Ring, RingError

Exp = Tuple[int, ...]

_NAME_CLASSES = [
    ("eps", re.compile(r"^eps(\d+)_(\d+)$")),
    ("delta", re.compile(r"^delta(\d)(\d)(\d)$")),
    ("a", re.compile(r"^a(\d+)$")),
    ("b", re.compile(r"^b(\d+)$")),
    ("c", re.compile(r"^c(\d+)$")),
    ("d", re.compile(r"^d(\d+)$")),
]


def classify_name(name: str) -> tuple[str, tuple[int, ...]]:
    """Return the name class and its integer indices; unknown names are ``aux``."""
    for cls, pat in _NAME_CLASSES:
        m = pat.match(name)
        if m:
            return cls, tuple(int(g) for g in m.groups())
    return "aux", ()


class VariableTable:
    """Ordered, immutable list of variable names with their name classes."""

    def __init__(self, names: Iterable[str]):
        self.names: tuple[str, ...] = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        for n in self.names:
            if not n.isidentifier():
                raise ValueError(f"invalid variable name {n!r}")
        self.index: dict[str, int] = {n: i for i, n in enumerate(self.names)}
        self.classes = tuple(classify_name(n) for n in self.names)

    @classmethod
    def standard(cls, r: int, extra: Sequence[str] = ()) -> "VariableTable":
        names = [f"{s}{i}" for s in "abcd" for i in range(1, r + 1)]
        return cls(names + list(extra))

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self.index

    def __eq__(self, other):
        return isinstance(other, VariableTable) and other.names == self.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VariableTable({list(self.names)})"

    def extend(self, names: Iterable[str]) -> "VariableTable":
        new = [n for n in names if n not in self.index]
        return VariableTable(self.names + tuple(new))

    def indices_of_class(self, *classes: str) -> list[int]:
        return [i for i, (c, _) in enumerate(self.classes) if c in classes]

    def class_of(self, name: str) -> str:
        return self.classes[self.index[name]][0]

    @cached_property
    def weights(self) -> tuple[int, ...]:
        """(b,c)-weight of each variable: +1 for b, -1 for c, 0 otherwise."""
        return tuple(1 if c == "b" else -1 if c == "c" else 0 for c, _ in self.classes)


# ---------------------------------------------------------------------------
# Monomial orders


class MonomialOrder:
    """A monomial order given by a sort key on exponent tuples.

    ``block`` orders compare the ``aux`` block lexicographically first and break
    ties by degrevlex on the remaining variables.
    """

    def __init__(self, name: str, aux: Sequence[int] = ()):
        if name not in ("lex", "degrevlex", "block"):
            raise ValueError(f"unknown monomial order {name!r}")
        self.name = name
        self.aux = tuple(aux)
        if name == "lex":
            self.key = _lex_key
        elif name == "degrevlex":
            self.key = _degrevlex_key
        else:
            aux_set = set(self.aux)
            aux_idx = self.aux

            def key(e: Exp, _aux=aux_idx, _aux_set=aux_set):
                rest = tuple(v for i, v in enumerate(e) if i not in _aux_set)
                return (tuple(e[i] for i in _aux), _degrevlex_key(rest))

            self.key = key

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and (self.name, self.aux) == (other.name, other.aux)

    def __hash__(self):
        return hash((self.name, self.aux))

    def __repr__(self):
        return f"MonomialOrder({self.name!r}{', aux=' + repr(self.aux) if self.aux else ''})"

    def compare(self, e1: Exp, e2: Exp) -> int:
        k1, k2 = self.key(e1), self.key(e2)
        return (k1 > k2) - (k1 < k2)


def _lex_key(e: Exp):
    return e


def _degrevlex_key(e: Exp):
    return (sum(e), tuple(-v for v in reversed(e)))


lex = MonomialOrder("lex")
degrevlex = MonomialOrder("degrevlex")


def block_order(table: VariableTable, aux_names: Sequence[str]) -> MonomialOrder:
    return MonomialOrder("block", [table.index[n] for n in aux_names])


# ---------------------------------------------------------------------------
# Polynomials


def _coeff_ops(ring: Ring):
    """Return (normalizer, modulus or None) for native coefficients of ``ring``."""
    if ring is ZZ:
        return int, None
    if ring is QQ:
        return Fraction, None
    if isinstance(ring, ModularRing):
        return ring, ring.modulus
    raise RingError(f"polynomial coefficients must be ZZ, QQ or ZZ/N, not {ring}")


class Poly:
    """Immutable sparse polynomial."""

    __slots__ = ("table", "ring", "terms", "_mod", "_hash")

    def __init__(self, table: VariableTable, terms: Mapping[Exp, object] | None = None,
                 ring: Ring = ZZ, *, _trusted: bool = False):
        self.table = table
        self.ring = ring
        self._hash = None
        normalize, mod = _coeff_ops(ring)
        self._mod = mod
        if _trusted:
            self.terms = terms
            return
        clean: Dict[Exp, object] = {}
        n = len(table)
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent {e} has wrong length for {n} variables")
            c = normalize(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        if mod is not None:
            clean = {e: c % mod for e, c in clean.items() if c % mod}
        self.terms = {e: c for e, c in clean.items() if c}

    # construction ---------------------------------------------------------

    @classmethod
    def zero(cls, table, ring=ZZ) -> "Poly":
        return cls(table, {}, ring, _trusted=True)

    @classmethod
    def const(cls, table, c, ring=ZZ) -> "Poly":
        return cls(table, {(0,) * len(table): c}, ring)

    @classmethod
    def var(cls, table, name: str, ring=ZZ) -> "Poly":
        e = [0] * len(table)
        e[table.index[name]] = 1
        return cls(table, {tuple(e): 1}, ring, _trusted=True)

    @classmethod
    def monomial(cls, table, exp: Exp, c=1, ring=ZZ) -> "Poly":
        return cls(table, {tuple(exp): c}, ring)

    def _new(self, terms: Dict[Exp, object]) -> "Poly":
        return Poly(self.table, terms, self.ring, _trusted=True)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.table is not self.table and other.table != self.table:
                raise ValueError("variable table mismatch")
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingError(f"coefficient ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.table, other, self.ring)
        return NotImplemented

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        mod = self._mod
        for e, c in small.items():
            v = out.get(e, 0) + c
            if mod is not None:
                v %= mod
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        mod = self._mod
        if mod is None:
            return self._new({e: -c for e, c in self.terms.items()})
        return self._new({e: -c % mod for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        mod = self._mod
        for e, c in other.terms.items():
            v = out.get(e, 0) - c
            if mod is not None:
                v %= mod
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return self._new(out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: Dict[Exp, object] = {}
        get = out.get
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = tuple([x + y for x, y in zip(e1, e2)])
                out[e] = get(e, 0) + c1 * c2
        mod = self._mod
        if mod is not None:
            out = {e: c % mod for e, c in out.items() if c % mod}
        else:
            out = {e: c for e, c in out.items() if c}
        return self._new(out)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        if self.ring is QQ:
            c = Fraction(c)
        elif self._mod is not None:
            c = self.ring(c)
        if not c:
            return self._new({})
        mod = self._mod
        if mod is None:
            return self._new({e: v * c for e, v in self.terms.items()})
        return self._new({e: v * c % mod for e, v in self.terms.items() if v * c % mod})

    def mul_term(self, exp: Exp, c) -> "Poly":
        mod = self._mod
        out = {}
        for e, v in self.terms.items():
            w = v * c
            if mod is not None:
                w %= mod
            if w:
                out[tuple([x + y for x, y in zip(e, exp)])] = w
        return self._new(out)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.const(self.table, 1, self.ring)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.table, other, self.ring)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.table, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    # inspection -----------------------------------------------------------

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, indices: Iterable[int]) -> int:
        idx = list(indices)
        return max((sum(e[i] for i in idx) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def sorted_terms(self, order: MonomialOrder = degrevlex):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder = degrevlex):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms.items(), key=lambda t: order.key(t[0]))

    def constant_coeff(self):
        return self.terms.get((0,) * len(self.table), 0)

    def variables(self) -> list[str]:
        used = set()
        for e in self.terms:
            used.update(i for i, v in enumerate(e) if v)
        return [self.table.names[i] for i in sorted(used)]

    def coefficients_in(self, name: str) -> dict[int, "Poly"]:
        """Split ``f = sum_k f_k * name**k`` with each ``f_k`` free of ``name``."""
        i = self.table.index[name]
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[i]
            stripped = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[stripped] = c
        return {k: self._new(v) for k, v in sorted(out.items())}

    def change_ring(self, ring: Ring) -> "Poly":
        if ring == self.ring:
            return self
        return Poly(self.table, self.terms, ring)

    def to_table(self, table: VariableTable) -> "Poly":
        """Re-express over another table containing every used variable."""
        if table == self.table:
            return self
        pos = []
        for i, n in enumerate(self.table.names):
            pos.append(table.index.get(n))
        out = {}
        n = len(table)
        for e, c in self.terms.items():
            new = [0] * n
            for i, v in enumerate(e):
                if v:
                    if pos[i] is None:
                        raise ValueError(f"variable {self.table.names[i]} missing from target table")
                    new[pos[i]] = v
            out[tuple(new)] = c
        return Poly(table, out, self.ring, _trusted=True)

    def content(self) -> int:
        """Gcd of the (integer) coefficients."""
        from math import gcd
        g = 0
        for c in self.terms.values():
            g = gcd(g, int(c))
        return g

    def clear_denominators(self) -> tuple[int, "Poly"]:
        """Return ``(m, m*f)`` with ``m*f`` integral and ``m`` the least such."""
        from math import lcm
        m = 1
        for c in self.terms.values():
            m = lcm(m, Fraction(c).denominator)
        return m, Poly(self.table, {e: int(Fraction(c) * m) for e, c in self.terms.items()}, ZZ)

    # rendering ------------------------------------------------------------

    def render(self, order: MonomialOrder = degrevlex) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms(order):
            mono = "*".join(
                n if v == 1 else f"{n}**{v}"
                for n, v in zip(self.table.names, e) if v)
            neg = c < 0 if self._mod is None else False
            mag = -c if neg else c
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            elif isinstance(mag, Fraction) and mag.denominator != 1:
                body = f"({mag})*{mono}"
            else:
                body = f"{mag}*{mono}"
            parts.append(("- " if neg else "+ ") + body)
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]

    __str__ = render

    def __repr__(self):
        return f"Poly({self.render()!r})"

    def to_json(self):
        return self.render()


def poly_sum(table: VariableTable, polys: Iterable[Poly], ring: Ring = ZZ) -> Poly:
    out: Dict[Exp, object] = {}
    mod = None
    for f in polys:
        mod = f._mod
        for e, c in f.terms.items():
            out[e] = out.get(e, 0) + c
    if mod is not None:
        out = {e: c % mod for e, c in out.items() if c % mod}
    else:
        out = {e: c for e, c in out.items() if c}
    return Poly(table, out, ring, _trusted=True)


class PolyRing:
    """Ring adapter so polynomials can serve as matrix entries."""

    def __init__(self, table: VariableTable, coeffs: Ring = ZZ):
        self.table = table
        self.coeffs = coeffs
        self.zero = Poly.zero(table, coeffs)
        self.one = Poly.const(table, 1, coeffs)

    def __call__(self, x):
        if isinstance(x, Poly):
            return x
        if isinstance(x, str):
            return parse_poly(x, self.table, self.coeffs)
        return Poly.const(self.table, x, self.coeffs)

    def var(self, name: str) -> Poly:
        return Poly.var(self.table, name, self.coeffs)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def is_zero(self, x):
        return not x.terms

    def eq(self, x, y):
        return x == y

    def sum(self, xs):
        return poly_sum(self.table, xs, self.coeffs)

    def try_invert(self, x):
        if len(x.terms) == 1:
            (e, c), = x.terms.items()
            if not any(e):
                inv = self.coeffs.try_invert(c)
                if inv is not None:
                    return Poly.const(self.table, inv, self.coeffs)
        return None

    def format(self, x):
        return x.render()

    def to_json_value(self, x):
        return x.render()

    def __eq__(self, other):
        return isinstance(other, PolyRing) and (other.table, other.coeffs) == (self.table, self.coeffs)

    def __hash__(self):
        return hash((self.table, self.coeffs))

    def __repr__(self):
        return f"PolyRing({len(self.table)} vars over {self.coeffs})"


# ---------------------------------------------------------------------------
# Substitution and gradings


def substitute(f: Poly, assignment: Mapping[str, Poly], target: Optional[VariableTable] = None) -> Poly:
    """Ring-homomorphic substitution of variables by polynomials.

    Unassigned variables map to themselves in ``target`` (default: the table
    of the images, else ``f.table``).
    """
    if target is None:
        target = next((g.table for g in assignment.values() if isinstance(g, Poly)), f.table)
    ring = f.ring
    images = []
    for n in f.table.names:
        if n in assignment:
            g = assignment[n]
            if not isinstance(g, Poly):
                g = Poly.const(target, g, ring)
            if g.table != target:
                raise ValueError(f"image of {n} lives over a different table")
            if g.ring != ring:
                raise RingError(f"image of {n} has coefficients in {g.ring}, expected {ring}")
            images.append(g)
        else:
            if n not in target.index:
                raise ValueError(f"variable {n} has no image in the target table")
            images.append(Poly.var(target, n, ring))
    # cache powers per variable
    powers: list[dict[int, Poly]] = [{0: Poly.const(target, 1, ring), 1: g} for g in images]

    def power(i: int, k: int) -> Poly:
        cache = powers[i]
        if k not in cache:
            cache[k] = power(i, k - 1) * images[i]
        return cache[k]

    out: list[Poly] = []
    for e, c in f.terms.items():
        term = Poly.const(target, c, ring)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        out.append(term)
    return poly_sum(target, out, ring)


def evaluate(f: Poly, values: Mapping[str, object], ring: Ring):
    """Evaluate ``f`` at ring elements; every used variable must be assigned."""
    names = f.table.names
    total = ring.zero
    for e, c in f.terms.items():
        term = ring.from_int(int(c)) if not isinstance(c, Fraction) else ring(c)
        for i, k in enumerate(e):
            if k:
                if names[i] not in values:
                    raise KeyError(f"no value for variable {names[i]}")
                term = ring.mul(term, ring.pow(values[names[i]], k))
        total = ring.add(total, term)
    return total


def weight(exp: Exp, table: VariableTable) -> int:
    w = table.weights
    return sum(v * wi for v, wi in zip(exp, w) if wi)


def weight_decompose(f: Poly) -> dict[int, Poly]:
    """Split ``f`` into (b-degree minus c-degree) homogeneous components."""
    buckets: dict[int, dict] = {}
    for e, c in f.terms.items():
        buckets.setdefault(weight(e, f.table), {})[e] = c
    return {k: f._new(v) for k, v in sorted(buckets.items())}


def is_weight_homogeneous(f: Poly) -> bool:
    return len(weight_decompose(f)) <= 1


def apply_unipotent(f: Poly, aux: str = "x", table: Optional[VariableTable] = None) -> Poly:
    """Conjugate every ``(a_i b_i; c_i d_i)`` by the lower unipotent with entry ``aux``.

    Substitutes a -> a + b x, c -> c + (d - a) x - b x^2, d -> d - b x; the
    result lives over ``table`` (default: ``f.table`` extended by ``aux``).
    """
    if table is None:
        table = f.table.extend([aux])
    ring = f.ring
    x = Poly.var(table, aux, ring)
    assignment: dict[str, Poly] = {}
    for n, (cls, idx) in zip(f.table.names, f.table.classes):
        if cls not in ("a", "c", "d"):
            continue
        i = idx[0]
        a = Poly.var(table, f"a{i}", ring)
        b = Poly.var(table, f"b{i}", ring)
        c = Poly.var(table, f"c{i}", ring)
        d = Poly.var(table, f"d{i}", ring)
        if cls == "a":
            assignment[n] = a + b * x
        elif cls == "c":
            assignment[n] = c + (d - a) * x - b * x * x
        else:
            assignment[n] = d - b * x
    return substitute(f.to_table(table) if table != f.table else f,
                      assignment, target=table) if assignment else f.to_table(table)


# ---------------------------------------------------------------------------
# Parsing


class PolyParseError(ValueError):
    pass


def parse_poly(text: str, table: VariableTable, ring: Ring = ZZ) -> Poly:
    """Parse an infix polynomial such as ``"a1*d2 - 3*b1^2 + 1/2"``."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise PolyParseError(f"cannot parse {text!r}: {exc.msg}") from None

    def walk(node) -> Poly:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return Poly.const(table, node.value, ring)
        if isinstance(node, ast.Name):
            if node.id not in table.index:
                raise PolyParseError(f"unknown variable {node.id!r}")
            return Poly.var(table, node.id, ring)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise PolyParseError("exponents must be integer literals")
                return walk(node.left) ** node.right.value
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if right.total_degree() > 0 or right.is_zero():
                    raise PolyParseError("division only by nonzero constants")
                inv = ring.try_invert(right.constant_coeff())
                if inv is None:
                    raise PolyParseError(f"{right.constant_coeff()} is not invertible in {ring}")
                return left.scale(inv)
        raise PolyParseError(f"unsupported syntax in {text!r}: {ast.dump(node)[:60]}")

    return walk(tree)
