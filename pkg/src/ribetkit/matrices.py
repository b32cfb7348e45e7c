"""Exact 2x2 algebra and small determinants over arbitrary rings.

Entries may be coefficient-ring elements or polynomials; every routine takes a
ring handle (a :class:`~ribetkit.rings.Ring` or a
:class:`~ribetkit.poly.PolyRing`) that supplies the arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Any, Iterator, List, Sequence, Tuple


@dataclass(frozen=True)
class Mat2:
    a: Any
    b: Any
    c: Any
    d: Any
    ring: Any = field(compare=False, hash=False, repr=False)

    @classmethod
    def identity(cls, ring) -> "Mat2":
        return cls(ring.one, ring.zero, ring.zero, ring.one, ring)

    @classmethod
    def zero(cls, ring) -> "Mat2":
        return cls(ring.zero, ring.zero, ring.zero, ring.zero, ring)

    @classmethod
    def from_rows(cls, rows, ring) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(ring(a), ring(b), ring(c), ring(d), ring)

    @classmethod
    def diag(cls, x, y, ring) -> "Mat2":
        return cls(ring(x), ring.zero, ring.zero, ring(y), ring)

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def rows(self) -> list:
        return [[self.a, self.b], [self.c, self.d]]

    def _check(self, other: "Mat2"):
        if other.ring != self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __mul__(self, other: "Mat2") -> "Mat2":
        if not isinstance(other, Mat2):
            return self.scale(other)
        self._check(other)
        R = self.ring
        m = R.mul
        return Mat2(R.add(m(self.a, other.a), m(self.b, other.c)),
                    R.add(m(self.a, other.b), m(self.b, other.d)),
                    R.add(m(self.c, other.a), m(self.d, other.c)),
                    R.add(m(self.c, other.b), m(self.d, other.d)), R)

    def __add__(self, other: "Mat2") -> "Mat2":
        self._check(other)
        R = self.ring
        return Mat2(*(R.add(x, y) for x, y in zip(self.entries(), other.entries())), R)

    def __sub__(self, other: "Mat2") -> "Mat2":
        self._check(other)
        R = self.ring
        return Mat2(*(R.sub(x, y) for x, y in zip(self.entries(), other.entries())), R)

    def __neg__(self) -> "Mat2":
        R = self.ring
        return Mat2(*(R.neg(x) for x in self.entries()), R)

    def scale(self, s) -> "Mat2":
        R = self.ring
        return Mat2(*(R.mul(s, x) for x in self.entries()), R)

    def trace(self):
        return self.ring.add(self.a, self.d)

    def det(self):
        R = self.ring
        return R.sub(R.mul(self.a, self.d), R.mul(self.b, self.c))

    def charpoly(self) -> tuple:
        """Coefficients ``(1, -tr, det)`` of ``x^2 - tr x + det``."""
        R = self.ring
        return (R.one, R.neg(self.trace()), self.det())

    def adjugate(self) -> "Mat2":
        R = self.ring
        return Mat2(self.d, R.neg(self.b), R.neg(self.c), self.a, R)

    def inverse(self) -> "Mat2":
        inv = self.ring.try_invert(self.det())
        if inv is None:
            raise ValueError(f"determinant {self.det()!r} is not a unit")
        return self.adjugate().scale(inv)

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(x) for x in self.entries())

    def __pow__(self, k: int) -> "Mat2":
        if k < 0:
            return self.inverse() ** (-k)
        out, base = Mat2.identity(self.ring), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def map(self, fn, ring=None) -> "Mat2":
        return Mat2(*(fn(x) for x in self.entries()), ring if ring is not None else self.ring)

    def to_json(self):
        R = self.ring
        conv = getattr(R, "to_json_value", lambda x: x)
        return [[conv(self.a), conv(self.b)], [conv(self.c), conv(self.d)]]

    def __repr__(self):
        return f"Mat2({self.a!r}, {self.b!r}; {self.c!r}, {self.d!r})"


def trace(M: Mat2):
    return M.trace()


def det(M: Mat2):
    return M.det()


def charpoly(M: Mat2):
    return M.charpoly()


def conjugate_simultaneous(g: Mat2, Ms: Sequence[Mat2]) -> list[Mat2]:
    """Return ``g^-1 M g`` for every ``M``; ``g`` must have unit determinant."""
    ginv = g.inverse()
    return [ginv * M * g for M in Ms]


def word_product(mats: Sequence[Mat2], word: Sequence[int], ring) -> Mat2:
    """Product ``mats[w0] * mats[w1] * ...`` for a word of 0-based indices."""
    out = Mat2.identity(ring)
    for i in word:
        out = out * mats[i]
    return out


# ---------------------------------------------------------------------------
# Square matrices


Matrix = Sequence[Sequence[Any]]


def det_n(M: Matrix, ring) -> Any:
    """Determinant by Laplace expansion with memoized minors.

    Only ring addition and multiplication are used, so it is valid over
    non-domains such as ``ZZ/p^n`` and over polynomial rings.
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("det_n needs a square matrix")
    if n == 0:
        return ring.one
    memo: dict = {}

    def minor(row: int, cols: tuple) -> Any:
        # determinant of rows row..n-1 restricted to cols
        if row == n - 1:
            return M[row][cols[0]]
        hit = memo.get((row, cols))
        if hit is not None:
            return hit
        total = ring.zero
        for pos, col in enumerate(cols):
            entry = M[row][col]
            if ring.is_zero(entry):
                continue
            sub = minor(row + 1, cols[:pos] + cols[pos + 1:])
            if ring.is_zero(sub):
                continue
            term = ring.mul(entry, sub)
            total = ring.add(total, term) if pos % 2 == 0 else ring.sub(total, term)
        memo[(row, cols)] = total
        return total

    return minor(0, tuple(range(n)))


def _perm_sign(p: Sequence[int]) -> int:
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def det_leibniz(M: Matrix, ring) -> Any:
    """Independent determinant by the permutation expansion."""
    n = len(M)
    total = ring.zero
    for p in permutations(range(n)):
        term = ring.one
        for i in range(n):
            term = ring.mul(term, M[i][p[i]])
        total = ring.add(total, term) if _perm_sign(p) > 0 else ring.sub(total, term)
    return total


def mat_sub(M: Matrix, N: Matrix, ring) -> list[list]:
    return [[ring.sub(x, y) for x, y in zip(r, s)] for r, s in zip(M, N)]


def mat_vec(M: Matrix, v: Sequence, ring) -> list:
    return [ring.sum(ring.mul(x, y) for x, y in zip(row, v)) for row in M]


def multilinearity_expand(M: Matrix, Mp: Matrix, ring) -> list[tuple[int, list[list]]]:
    """Expand ``det(Mp) - det(M)`` over rows that differ.

    Returns pairs ``(sign, N)`` where ``N`` is ``M`` with a nonempty set ``S``
    of differing rows replaced by the rows of ``M - Mp`` and ``sign`` is
    ``(-1)^|S|``, so that ``sum sign * det(N) = det(Mp) - det(M)``.
    """
    if len(M) != len(Mp) or any(len(r) != len(s) for r, s in zip(M, Mp)):
        raise ValueError("shape mismatch")
    diff = mat_sub(M, Mp, ring)
    changed = [i for i, row in enumerate(diff) if not all(ring.is_zero(x) for x in row)]
    out = []
    for k in range(1, len(changed) + 1):
        for S in combinations(changed, k):
            N = [list(diff[i]) if i in S else list(M[i]) for i in range(len(M))]
            out.append(((-1) ** k, N))
    return out
