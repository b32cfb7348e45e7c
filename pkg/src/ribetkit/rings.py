"""Exact coefficient rings.

Elements are plain Python values so they hash and compare cheaply: ``int`` for
the integers and every residue ring, ``Fraction`` for the rationals, and tuples
for finite products and fiber products.  A ring object is a stateless handle
that knows how to combine and canonicalize those values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product as cartesian
from typing import Any, Iterable, Iterator, Optional, Sequence


class RingError(ValueError):
    """Raised for malformed RingSpec values or unsupported operations."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_power(N: int) -> Optional[tuple[int, int]]:
    """Return ``(p, k)`` with ``N == p**k`` or None."""
    if N < 2:
        return None
    p = next(q for q in range(2, N + 1) if N % q == 0)
    k = 0
    while N % p == 0:
        N //= p
        k += 1
    return (p, k) if N == 1 else None


# ---------------------------------------------------------------------------
# Ring descriptions


@dataclass(frozen=True)
class RingSpec:
    kind: str
    p: Optional[int] = None
    n: Optional[int] = None
    N: Optional[int] = None
    factors: tuple["RingSpec", ...] = ()
    left: Optional["RingSpec"] = None
    right: Optional["RingSpec"] = None
    m: Optional[int] = None

    KINDS = ("integers", "rationals", "prime_field", "integers_mod",
             "truncated_dvr", "product", "fiber_product")

    @classmethod
    def integers(cls) -> "RingSpec":
        return cls("integers")

    @classmethod
    def rationals(cls) -> "RingSpec":
        return cls("rationals")

    @classmethod
    def prime_field(cls, p: int) -> "RingSpec":
        return cls("prime_field", p=p)

    @classmethod
    def integers_mod(cls, N: int) -> "RingSpec":
        return cls("integers_mod", N=N)

    @classmethod
    def truncated_dvr(cls, p: int, n: int) -> "RingSpec":
        return cls("truncated_dvr", p=p, n=n)

    @classmethod
    def product(cls, *factors: "RingSpec") -> "RingSpec":
        return cls("product", factors=tuple(factors))

    @classmethod
    def fiber_product(cls, left: "RingSpec", right: "RingSpec", m: int) -> "RingSpec":
        return cls("fiber_product", left=left, right=right, m=m)

    def to_json(self) -> dict:
        if self.kind in ("integers", "rationals"):
            return {"kind": self.kind}
        if self.kind == "prime_field":
            return {"kind": self.kind, "p": self.p}
        if self.kind == "integers_mod":
            return {"kind": self.kind, "N": self.N}
        if self.kind == "truncated_dvr":
            return {"kind": self.kind, "p": self.p, "n": self.n}
        if self.kind == "product":
            return {"kind": self.kind, "factors": [f.to_json() for f in self.factors]}
        return {"kind": self.kind, "left": self.left.to_json(),
                "right": self.right.to_json(), "m": self.m}

    @classmethod
    def from_json(cls, data: dict) -> "RingSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise RingError(f"ring spec must be an object with a 'kind': {data!r}")
        kind = data["kind"]
        try:
            if kind in ("integers", "rationals"):
                return cls(kind)
            if kind == "prime_field":
                return cls.prime_field(int(data["p"]))
            if kind == "integers_mod":
                return cls.integers_mod(int(data["N"]))
            if kind == "truncated_dvr":
                return cls.truncated_dvr(int(data["p"]), int(data["n"]))
            if kind == "product":
                return cls.product(*(cls.from_json(f) for f in data["factors"]))
            if kind == "fiber_product":
                return cls.fiber_product(cls.from_json(data["left"]),
                                         cls.from_json(data["right"]), int(data["m"]))
        except KeyError as exc:
            raise RingError(f"ring spec of kind {kind!r} is missing {exc}") from None
        raise RingError(f"unknown ring kind {kind!r}")

    def with_precision(self, n: int) -> "RingSpec":
        """Same spec with every truncated DVR set to precision ``n``."""
        if self.kind == "truncated_dvr":
            return RingSpec.truncated_dvr(self.p, n)
        if self.kind == "product":
            return RingSpec.product(*(f.with_precision(n) for f in self.factors))
        if self.kind == "fiber_product":
            return RingSpec.fiber_product(self.left.with_precision(n),
                                          self.right.with_precision(n), self.m)
        return self


# ---------------------------------------------------------------------------
# Ring handles


class Ring:
    spec: RingSpec
    is_field = False
    is_finite = False
    modulus: Optional[int] = None
    zero: Any = 0
    one: Any = 1

    def __call__(self, x: Any) -> Any:
        raise NotImplementedError

    def from_int(self, k: int) -> Any:
        return self(k)

    def add(self, x, y):
        raise NotImplementedError

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        raise NotImplementedError

    def neg(self, x):
        raise NotImplementedError

    def is_zero(self, x) -> bool:
        return x == self.zero

    def eq(self, x, y) -> bool:
        return self.is_zero(self.sub(x, y))

    def try_invert(self, x) -> Optional[Any]:
        raise NotImplementedError

    def is_unit(self, x) -> bool:
        return self.try_invert(x) is not None

    def div(self, x, y):
        inv = self.try_invert(y)
        if inv is None:
            raise ZeroDivisionError(f"{y!r} is not a unit in {self}")
        return self.mul(x, inv)

    def pow(self, x, k: int):
        if k < 0:
            x = self.div(self.one, x)
            k = -k
        result, base = self.one, x
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def sum(self, xs: Iterable) -> Any:
        total = self.zero
        for x in xs:
            total = self.add(total, x)
        return total

    def elements(self) -> Iterator:
        raise RingError(f"{self} is not finite")

    def size(self) -> int:
        raise RingError(f"{self} is not finite")

    def to_json_value(self, x) -> Any:
        return x

    def format(self, x) -> str:
        return str(x)

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and other.spec == self.spec

    def __hash__(self) -> int:
        return hash(self.spec)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec.to_json()})"


class IntegerRing(Ring):
    spec = RingSpec.integers()

    def __call__(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise RingError(f"{x} is not an integer")
            return int(x.numerator)
        return int(x)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def is_zero(self, x):
        return x == 0

    def try_invert(self, x):
        return x if x in (1, -1) else None

    def reduce_mod(self, x, m: int) -> int:
        return x % m

    def __str__(self):
        return "ZZ"


class RationalField(Ring):
    spec = RingSpec.rationals()
    is_field = True
    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, x):
        return Fraction(x)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def is_zero(self, x):
        return x == 0

    def try_invert(self, x):
        return None if x == 0 else 1 / Fraction(x)

    def to_json_value(self, x):
        x = Fraction(x)
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def __str__(self):
        return "QQ"


class ModularRing(Ring):
    """ZZ/N with canonical residues in ``[0, N)``.

    Covers prime fields, general residue rings and truncated DVRs ``ZZ/p^n``;
    for the latter ``p`` and ``n`` are recorded and the valuation is available.
    """

    is_finite = True

    def __init__(self, spec: RingSpec, N: int, p: Optional[int] = None,
                 n: Optional[int] = None):
        self.spec = spec
        self.modulus = N
        self.p = p
        self.n = n
        self.is_field = is_prime(N)
        pp = prime_power(N)
        if pp is not None and p is None:
            self.p, self.n = pp

    @property
    def is_local(self) -> bool:
        return self.p is not None

    def __call__(self, x):
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.modulus) % self.modulus
        return int(x) % self.modulus

    def add(self, x, y):
        return (x + y) % self.modulus

    def sub(self, x, y):
        return (x - y) % self.modulus

    def mul(self, x, y):
        return x * y % self.modulus

    def neg(self, x):
        return -x % self.modulus

    def is_zero(self, x):
        return x % self.modulus == 0

    def try_invert(self, x):
        if math.gcd(x, self.modulus) != 1:
            return None
        return pow(x, -1, self.modulus)

    def elements(self):
        return iter(range(self.modulus))

    def size(self):
        return self.modulus

    def reduce_mod(self, x, m: int) -> int:
        return x % m

    def valuation(self, x) -> int:
        """p-adic valuation of a residue; ``n`` for zero."""
        if not self.is_local:
            raise RingError(f"{self} is not local")
        x %= self.modulus
        if x == 0:
            return self.n
        v = 0
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def split_unit(self, x) -> tuple[int, int]:
        """Write ``x = u * p**k`` with ``u`` a unit; zero gives ``(0, n)``."""
        k = self.valuation(x)
        if k == self.n:
            return 0, k
        return (x // self.p ** k) % self.modulus, k

    def __str__(self):
        if self.spec.kind == "truncated_dvr":
            return f"ZZ/{self.p}^{self.n}"
        return f"ZZ/{self.modulus}"


class ProductRing(Ring):
    def __init__(self, spec: RingSpec, factors: Sequence[Ring]):
        self.spec = spec
        self.factors = tuple(factors)
        self.is_finite = all(f.is_finite for f in self.factors)
        self.zero = tuple(f.zero for f in self.factors)
        self.one = tuple(f.one for f in self.factors)

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            return tuple(f(x) for f in self.factors)
        x = tuple(x)
        if len(x) != len(self.factors):
            raise RingError(f"expected {len(self.factors)} components, got {x!r}")
        return tuple(f(c) for f, c in zip(self.factors, x))

    def add(self, x, y):
        return tuple(f.add(a, b) for f, a, b in zip(self.factors, x, y))

    def sub(self, x, y):
        return tuple(f.sub(a, b) for f, a, b in zip(self.factors, x, y))

    def mul(self, x, y):
        return tuple(f.mul(a, b) for f, a, b in zip(self.factors, x, y))

    def neg(self, x):
        return tuple(f.neg(a) for f, a in zip(self.factors, x))

    def is_zero(self, x):
        return all(f.is_zero(a) for f, a in zip(self.factors, x))

    def try_invert(self, x):
        invs = [f.try_invert(a) for f, a in zip(self.factors, x)]
        return None if any(v is None for v in invs) else tuple(invs)

    def elements(self):
        return cartesian(*(list(f.elements()) for f in self.factors))

    def size(self):
        return math.prod(f.size() for f in self.factors)

    def to_json_value(self, x):
        return [f.to_json_value(a) for f, a in zip(self.factors, x)]

    def format(self, x):
        return "(" + ", ".join(f.format(a) for f, a in zip(self.factors, x)) + ")"

    def __str__(self):
        return " x ".join(str(f) for f in self.factors)


class FiberProductRing(ProductRing):
    """Pairs ``(a, b)`` of ``left x right`` with ``a = b`` modulo ``m``."""

    def __init__(self, spec: RingSpec, left: Ring, right: Ring, m: int):
        super().__init__(spec, (left, right))
        self.left, self.right, self.m = left, right, m

    def _residue(self, ring: Ring, x) -> int:
        return ring.reduce_mod(x, self.m)

    def __call__(self, x):
        a, b = super().__call__(x)
        if self._residue(self.left, a) != self._residue(self.right, b):
            raise RingError(f"({a}, {b}) violates the congruence modulo {self.m}")
        return (a, b)

    def project_left(self, x):
        return x[0]

    def project_right(self, x):
        return x[1]

    def elements(self):
        for a in self.left.elements():
            ra = self._residue(self.left, a)
            for b in self.right.elements():
                if self._residue(self.right, b) == ra:
                    yield (a, b)

    def size(self):
        return sum(1 for _ in self.elements())

    def __str__(self):
        return f"{{(a, b) in {self.left} x {self.right} : a = b mod {self.m}}}"


ZZ = IntegerRing()
QQ = RationalField()


def make_ring(spec: RingSpec | dict) -> Ring:
    """Build a ring handle from a spec, validating its invariants."""
    if isinstance(spec, dict):
        spec = RingSpec.from_json(spec)
    kind = spec.kind
    if kind == "integers":
        return ZZ
    if kind == "rationals":
        return QQ
    if kind == "prime_field":
        if spec.p is None or not is_prime(spec.p):
            raise RingError(f"prime field needs a prime, got {spec.p}")
        return ModularRing(spec, spec.p, spec.p, 1)
    if kind == "integers_mod":
        if spec.N is None or spec.N < 2:
            raise RingError(f"ZZ/N needs N >= 2, got {spec.N}")
        return ModularRing(spec, spec.N)
    if kind == "truncated_dvr":
        if spec.p is None or not is_prime(spec.p):
            raise RingError(f"truncated DVR needs a prime, got {spec.p}")
        if spec.n is None or spec.n < 1:
            raise RingError(f"truncated DVR needs precision n >= 1, got {spec.n}")
        return ModularRing(spec, spec.p ** spec.n, spec.p, spec.n)
    if kind == "product":
        if not spec.factors:
            raise RingError("product ring needs at least one factor")
        return ProductRing(spec, [make_ring(f) for f in spec.factors])
    if kind == "fiber_product":
        left, right = make_ring(spec.left), make_ring(spec.right)
        m = spec.m
        if m is None or m < 1:
            raise RingError(f"fiber product needs a modulus m >= 1, got {m}")
        for side in (left, right):
            if isinstance(side, ModularRing):
                if side.modulus % m:
                    raise RingError(f"m = {m} does not divide the modulus of {side}")
            elif side is not ZZ:
                raise RingError(f"fiber product factor {side} has no projection to ZZ/{m}")
        return FiberProductRing(spec, left, right, m)
    raise RingError(f"unknown ring kind {kind!r}")


def try_invert(ring: Ring, x) -> Optional[Any]:
    return ring.try_invert(x)


# ---------------------------------------------------------------------------
# Ideals of coefficient rings


class LocalIdeal:
    """A finitely generated ideal with decidable membership and equality."""

    ring: Ring

    def contains(self, x) -> bool:
        raise NotImplementedError

    def generators(self) -> tuple:
        raise NotImplementedError

    def reduce(self, x):
        """Canonical representative of the coset ``x + I``."""
        raise NotImplementedError

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(g) for g in self.generators())

    def is_unit_ideal(self) -> bool:
        return self.contains(self.ring.one)

    def issubset(self, other: "LocalIdeal") -> bool:
        return all(other.contains(g) for g in self.generators())

    def __le__(self, other: "LocalIdeal") -> bool:
        return self.issubset(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocalIdeal) or other.ring != self.ring:
            return NotImplemented
        return self.issubset(other) and other.issubset(self)

    def __hash__(self):
        return hash((self.ring, self.canonical()))

    def canonical(self):
        return self.generators()

    def __add__(self, other: "LocalIdeal") -> "LocalIdeal":
        return ideal_in_ring(self.ring, list(self.generators()) + list(other.generators()))

    def __mul__(self, other: "LocalIdeal") -> "LocalIdeal":
        R = self.ring
        return ideal_in_ring(R, [R.mul(a, b) for a in self.generators()
                                 for b in other.generators()])

    def to_json(self):
        return [self.ring.to_json_value(g) for g in self.generators()]

    def __repr__(self):
        gens = ", ".join(self.ring.format(g) for g in self.generators())
        return f"({gens}) in {self.ring}"


class PrincipalIdeal(LocalIdeal):
    """Ideal of ZZ, QQ or ZZ/N held by its canonical generator.

    For ZZ the generator is the nonnegative gcd.  For ZZ/N it is the gcd with
    N, a divisor of N; the zero ideal is stored as ``N`` and reported as 0.
    """

    def __init__(self, ring: Ring, gens: Iterable):
        self.ring = ring
        vals = [ring(g) for g in gens]
        if ring is QQ:
            self.gen = Fraction(1) if any(v != 0 for v in vals) else Fraction(0)
        elif ring is ZZ:
            self.gen = reduce(math.gcd, vals, 0)
        else:
            self.gen = reduce(math.gcd, vals, ring.modulus)

    def contains(self, x) -> bool:
        x = self.ring(x)
        if self.ring is QQ:
            return x == 0 or self.gen != 0
        if self.gen == 0:
            return x == 0
        return x % self.gen == 0

    def generators(self):
        if isinstance(self.ring, ModularRing) and self.gen == self.ring.modulus:
            return (0,)
        return (self.gen,)

    def reduce(self, x):
        x = self.ring(x)
        if self.ring is QQ:
            return Fraction(0) if self.gen else x
        return x if self.gen == 0 else x % self.gen

    def canonical(self):
        return self.generators()

    def elements(self):
        if not isinstance(self.ring, ModularRing):
            raise RingError("infinite ideal")
        return iter(range(0, self.ring.modulus, self.gen))


class ProductIdeal(LocalIdeal):
    def __init__(self, ring: ProductRing, parts: Sequence[LocalIdeal]):
        self.ring = ring
        self.parts = tuple(parts)

    def contains(self, x) -> bool:
        x = self.ring(x)
        return all(I.contains(c) for I, c in zip(self.parts, x))

    def generators(self):
        # standard idempotent-weighted generators, one per factor
        gens = []
        for i, I in enumerate(self.parts):
            for g in I.generators():
                gens.append(tuple(g if j == i else f.zero
                                  for j, f in enumerate(self.ring.factors)))
        return tuple(gens)

    def reduce(self, x):
        x = self.ring(x)
        return tuple(I.reduce(c) for I, c in zip(self.parts, x))

    def canonical(self):
        return tuple(I.canonical() for I in self.parts)

    def elements(self):
        return cartesian(*(list(I.elements()) for I in self.parts))


class EnumeratedIdeal(LocalIdeal):
    """Ideal of a finite ring stored as its full element set."""

    def __init__(self, ring: Ring, gens: Iterable):
        self.ring = ring
        self._gens = tuple(dict.fromkeys(ring(g) for g in gens))
        universe = list(ring.elements())
        span = {ring.zero}
        for g in self._gens:
            multiples = {ring.mul(t, g) for t in universe}
            span = {ring.add(s, u) for s in span for u in multiples}
        self._elements = frozenset(span)

    def contains(self, x) -> bool:
        return self.ring(x) in self._elements

    def generators(self):
        return self._gens or (self.ring.zero,)

    def elements(self):
        return iter(sorted(self._elements))

    def reduce(self, x):
        R = self.ring
        x = R(x)
        return min(R.add(x, y) for y in self._elements)

    def canonical(self):
        return tuple(sorted(self._elements))

    def issubset(self, other):
        if isinstance(other, EnumeratedIdeal):
            return self._elements <= other._elements
        return super().issubset(other)

    def __len__(self):
        return len(self._elements)


def ideal_in_ring(ring: Ring, gens: Iterable) -> LocalIdeal:
    """Ideal generated by ``gens`` with a canonical, comparable form."""
    gens = list(gens)
    if ring is ZZ or ring is QQ or isinstance(ring, ModularRing):
        return PrincipalIdeal(ring, gens)
    if isinstance(ring, FiberProductRing):
        if not ring.is_finite:
            raise RingError(f"ideals of the infinite ring {ring} are not supported")
        return EnumeratedIdeal(ring, gens)
    if isinstance(ring, ProductRing):
        parts = [ideal_in_ring(f, [g[i] for g in map(ring, gens)])
                 for i, f in enumerate(ring.factors)]
        return ProductIdeal(ring, parts)
    raise RingError(f"ideals of {ring} are not supported")
