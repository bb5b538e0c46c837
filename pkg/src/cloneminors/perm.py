"""Permutation groups on A = {0, ..., k-1}, small enough to list every element."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError, StructuralError

Perm = tuple[int, ...]


def compose_perms(p: Sequence[int], q: Sequence[int]) -> Perm:
    """The permutation a -> p(q(a))."""
    return tuple(p[a] for a in q)


def invert_perm(p: Sequence[int]) -> Perm:
    inv = [0] * len(p)
    for a, b in enumerate(p):
        inv[b] = a
    return tuple(inv)


def check_perm(p: Sequence[int], k: int) -> Perm:
    p = tuple(int(a) for a in p)
    if sorted(p) != list(range(k)):
        raise DomainError(f"{p} is not a permutation of {k} elements")
    return p


def cycles(p: Sequence[int]) -> list[tuple[int, ...]]:
    """Cycle decomposition, each cycle starting at its least element."""
    seen: set[int] = set()
    out = []
    for a in range(len(p)):
        if a in seen:
            continue
        cycle = [a]
        seen.add(a)
        b = p[a]
        while b != a:
            cycle.append(b)
            seen.add(b)
            b = p[b]
        out.append(tuple(cycle))
    return out


def format_perm(p: Sequence[int]) -> str:
    parts = ["(" + " ".join(map(str, c)) + ")" for c in cycles(p) if len(c) > 1]
    return "".join(parts) or "()"


@dataclass(frozen=True)
class PermGroup:
    """A permutation group listed element by element.

    Elements are sorted lexicographically, so element 0 is the identity.
    Products follow function composition: (g*h)(a) = g(h(a)).
    """

    k: int
    elements: tuple[Perm, ...]

    def __post_init__(self):
        elems = tuple(sorted({check_perm(p, self.k) for p in self.elements}))
        object.__setattr__(self, "elements", elems)
        ident = tuple(range(self.k))
        if not elems or elems[0] != ident:
            raise StructuralError("a group must contain the identity")
        members = set(elems)
        for p in elems:
            if invert_perm(p) not in members:
                raise StructuralError("not closed under inverses")
            for q in elems:
                if compose_perms(p, q) not in members:
                    raise StructuralError("not closed under composition")

    @classmethod
    def generated_by(cls, k: int, generators: Iterable[Sequence[int]]) -> "PermGroup":
        gens = [check_perm(g, k) for g in generators]
        ident = tuple(range(k))
        found = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for p in frontier:
                for g in gens:
                    q = compose_perms(g, p)
                    if q not in found:
                        found.add(q)
                        nxt.append(q)
            frontier = nxt
        return cls(k, tuple(found))

    @classmethod
    def symmetric(cls, k: int) -> "PermGroup":
        return cls(k, tuple(itertools.permutations(range(k))))

    @classmethod
    def trivial(cls, k: int) -> "PermGroup":
        return cls(k, (tuple(range(k)),))

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @functools.cached_property
    def _index(self) -> dict[Perm, int]:
        return {p: i for i, p in enumerate(self.elements)}

    def index_of(self, p: Sequence[int]) -> int:
        try:
            return self._index[tuple(p)]
        except KeyError:
            raise DomainError(f"{tuple(p)} is not in the group") from None

    @functools.cached_property
    def product_table(self) -> tuple[tuple[int, ...], ...]:
        """product_table[i][j] is the index of elements[i] * elements[j]."""
        return tuple(
            tuple(self._index[compose_perms(p, q)] for q in self.elements)
            for p in self.elements)

    @functools.cached_property
    def inverse_table(self) -> tuple[int, ...]:
        return tuple(self._index[invert_perm(p)] for p in self.elements)

    def act(self, g: int, point: Sequence[int]) -> tuple[int, ...]:
        """Coordinatewise action of element index g on a tuple."""
        p = self.elements[g]
        return tuple(p[a] for a in point)

    def stabilizer(self, point: Sequence[int]) -> tuple[int, ...]:
        point = tuple(point)
        return tuple(i for i in range(self.order) if self.act(i, point) == point)

    def subgroup(self, indices: Iterable[int]) -> "PermGroup":
        return PermGroup(self.k, tuple(self.elements[i] for i in indices))

    def subgroups(self) -> list[frozenset[int]]:
        """Every subgroup, as a set of element indices (grown one generator at a time)."""
        table = self.product_table

        def close(gens: frozenset[int]) -> frozenset[int]:
            found = set(gens) | {0}
            frontier = list(found)
            while frontier:
                nxt = []
                for a in frontier:
                    for g in gens:
                        c = table[g][a]
                        if c not in found:
                            found.add(c)
                            nxt.append(c)
                frontier = nxt
            return frozenset(found)

        start = frozenset({0})
        found = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for sub in frontier:
                for g in range(self.order):
                    if g in sub:
                        continue
                    bigger = close(sub | {g})
                    if bigger not in found:
                        found.add(bigger)
                        nxt.append(bigger)
            frontier = nxt
        return sorted(found, key=lambda s: (len(s), sorted(s)))
