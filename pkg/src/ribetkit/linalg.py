"""Sparse linear algebra over QQ and prime fields.

Vectors are dicts ``key -> coefficient`` with comparable keys.  An
:class:`Echelon` keeps basis vectors with distinct leading keys (the maximum
key under a sort key) so that span membership is decided by top reduction.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

Vector = Dict[Hashable, object]


def _identity(k):
    return k


class Echelon:
    """Incremental row echelon form with optional combination tracking.

    ``modulus`` is None for QQ or a prime for GF(p).  With ``track=True`` each
    basis vector remembers its expression in terms of the tags of the vectors
    that were added, which lets :meth:`solve` return explicit coefficients.
    """

    def __init__(self, modulus: Optional[int] = None, key: Callable = _identity,
                 track: bool = False):
        self.modulus = modulus
        self.key = key
        self.track = track
        self.rows: Dict[Hashable, Tuple[Vector, Optional[Vector]]] = {}

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _norm(self, c):
        if self.modulus is None:
            return Fraction(c)
        return int(c) % self.modulus

    def _inv(self, c):
        if self.modulus is None:
            return 1 / Fraction(c)
        return pow(int(c), -1, self.modulus)

    def _axpy(self, v: Vector, c, w: Vector) -> None:
        """v <- v - c*w in place."""
        mod = self.modulus
        for k, x in w.items():
            y = v.get(k, 0) - c * x
            if mod is not None:
                y %= mod
            if y:
                v[k] = y
            else:
                v.pop(k, None)

    def _lead(self, v: Vector):
        return max(v, key=self.key)

    def reduce(self, vec: Vector, combo: Optional[Vector] = None):
        """Top-reduce ``vec``; return ``(residual, combination)``.

        The combination ``c`` satisfies ``vec = residual + sum c[t] * added[t]``.
        The residual is zero iff ``vec`` lies in the span.
        """
        v = {k: self._norm(x) for k, x in vec.items()}
        v = {k: x for k, x in v.items() if x}
        comb: Vector = dict(combo) if combo else {}
        while v:
            lead = self._lead(v)
            row = self.rows.get(lead)
            if row is None:
                break
            basis, bcomb = row
            c = v[lead]
            self._axpy(v, c, basis)
            if self.track:
                # basis = sum bcomb[t] added[t]; vec - c*basis tracked by +c*bcomb
                self._axpy(comb, -c, bcomb)
        return v, comb

    def add(self, vec: Vector, tag: Hashable = None) -> bool:
        """Insert ``vec``; return True if it increased the rank."""
        v, comb = self.reduce(vec)
        if not v:
            return False
        if self.track:
            # v = vec - sum comb added
            comb = {t: (-x) % self.modulus if self.modulus else -x for t, x in comb.items()}
            comb[tag] = self._norm(comb.get(tag, 0) + 1)
            comb = {t: x for t, x in comb.items() if x}
        lead = self._lead(v)
        inv = self._inv(v[lead])
        v = {k: self._norm(x * inv) for k, x in v.items()}
        if self.track:
            comb = {t: self._norm(x * inv) for t, x in comb.items()}
            comb = {t: x for t, x in comb.items() if x}
        self.rows[lead] = (v, comb if self.track else None)
        return True

    def contains(self, vec: Vector) -> bool:
        return not self.reduce(vec)[0]

    def solve(self, target: Vector) -> Optional[Vector]:
        """Coefficients ``c`` with ``target = sum c[t] * added[t]``, or None."""
        if not self.track:
            raise ValueError("solve needs an Echelon built with track=True")
        residual, comb = self.reduce(target)
        if residual:
            return None
        return {t: x for t, x in comb.items() if x}


def solve_sparse(columns: Sequence[Tuple[Hashable, Vector]], target: Vector,
                 modulus: Optional[int] = None, key: Callable = _identity) -> Optional[Vector]:
    """Find ``c`` with ``sum c[tag] * vec = target`` for ``(tag, vec)`` in ``columns``."""
    ech = Echelon(modulus, key=key, track=True)
    for tag, vec in columns:
        ech.add(vec, tag)
    return ech.solve(target)


def rank_mod_p(rows: Iterable[Vector], p: int, key: Callable = _identity) -> int:
    ech = Echelon(p, key=key)
    for r in rows:
        ech.add(r)
    return ech.rank


def dense_rank_mod_p(matrix: Sequence[Sequence[int]], p: int) -> int:
    rows = [{j: x % p for j, x in enumerate(row) if x % p} for row in matrix]
    return rank_mod_p(rows, p)
