"""Elements, tuples and operation tables on A = {0, ..., k-1}.

Tuples of length n are indexed big-endian: the tuple (a_1, ..., a_n) has
index a_1 * k**(n-1) + ... + a_n.  An n-ary operation is stored as the flat
sequence of its k**n values in index order.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ContractViolation, DomainError, StructuralError

MIN_K = 2
MAX_K = 6


def check_domain_size(k: int) -> int:
    """Return k if it is an allowed domain size, else raise DomainError."""
    if not isinstance(k, (int, np.integer)) or not MIN_K <= k <= MAX_K:
        raise DomainError(f"domain size must be in {MIN_K}..{MAX_K}, got {k!r}")
    return int(k)


def encode_tuple(t: Sequence[int], k: int) -> int:
    """Mixed-radix big-endian index of the tuple t over {0..k-1}."""
    if len(t) == 0:
        raise DomainError("tuples must have length at least 1")
    index = 0
    for a in t:
        if not 0 <= a < k:
            raise DomainError(f"entry {a!r} is not an element of a {k}-element set")
        index = index * k + int(a)
    return index


def decode_tuple(index: int, k: int, n: int) -> tuple[int, ...]:
    """Inverse of encode_tuple for tuples of length n."""
    if n < 1:
        raise DomainError("tuples must have length at least 1")
    if not 0 <= index < k ** n:
        raise DomainError(f"index {index} out of range for k={k}, n={n}")
    out = [0] * n
    for pos in range(n - 1, -1, -1):
        index, out[pos] = divmod(index, k)
    return tuple(out)


@functools.lru_cache(maxsize=256)
def tuples_of(k: int, n: int) -> tuple[tuple[int, ...], ...]:
    """All n-tuples over {0..k-1} in index order."""
    return tuple(itertools.product(range(k), repeat=n))


@functools.lru_cache(maxsize=64)
def coordinate_array(k: int, n: int) -> np.ndarray:
    """Array of shape (k**n, n); row i is the tuple with index i."""
    grids = np.indices((k,) * n, dtype=np.int64).reshape(n, -1)
    out = np.ascontiguousarray(grids.T)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class OpTable:
    """An n-ary operation on {0..k-1} given by its value table.

    k = 1 is accepted only so that quotients by the full relation can be
    represented; every builder in the package works with 2 <= k <= 6.
    """

    k: int
    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or not 1 <= self.k <= MAX_K:
            raise DomainError(f"domain size must be in 1..{MAX_K}, got {self.k!r}")
        if not isinstance(self.arity, (int, np.integer)) or self.arity < 1:
            raise DomainError("arity must be at least 1 (constants are unary)")
        table = self.table
        if not isinstance(table, tuple):
            table = tuple(int(v) for v in table)
            object.__setattr__(self, "table", table)
        if len(table) != self.k ** self.arity:
            raise StructuralError(
                f"table length {len(table)} != {self.k}**{self.arity}")
        if min(table) < 0 or max(table) >= self.k:
            raise DomainError("table entry outside the domain")

    @classmethod
    def from_array(cls, k: int, arity: int, values) -> "OpTable":
        arr = np.asarray(values)
        return cls(k, arity, tuple(arr.astype(np.int64).ravel().tolist()))

    @classmethod
    def from_function(cls, k: int, arity: int, fn) -> "OpTable":
        """Tabulate fn, called with the arguments unpacked."""
        return cls(k, arity, tuple(int(fn(*t)) for t in tuples_of(k, arity)))

    @functools.cached_property
    def array(self) -> np.ndarray:
        arr = np.asarray(self.table, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def value(self, point: Sequence[int]) -> int:
        if len(point) != self.arity:
            raise StructuralError(f"expected {self.arity} arguments, got {len(point)}")
        return self.table[encode_tuple(point, self.k)]

    def __call__(self, *args) -> int:
        if len(args) == 1 and isinstance(args[0], (tuple, list)):
            args = tuple(args[0])
        return self.value(args)

    def to_json(self) -> dict:
        return {"k": self.k, "arity": self.arity, "table": list(self.table)}

    @classmethod
    def from_json(cls, data: dict) -> "OpTable":
        try:
            return cls(int(data["k"]), int(data["arity"]), tuple(int(v) for v in data["table"]))
        except KeyError as exc:
            raise StructuralError(f"operation JSON lacks field {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def __repr__(self) -> str:
        body = "".join(map(str, self.table)) if self.k <= 10 and len(self.table) <= 81 else "..."
        return f"OpTable(k={self.k}, arity={self.arity}, table={body})"


@dataclass(frozen=True)
class OpVector:
    """A tuple (h_1, ..., h_m) of operations sharing k and arity: a map A^n -> A^m."""

    components: tuple[OpTable, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise StructuralError("an operation vector needs at least one component")
        k, n = comps[0].k, comps[0].arity
        for h in comps:
            if h.k != k or h.arity != n:
                raise StructuralError("components must share domain size and arity")

    @property
    def k(self) -> int:
        return self.components[0].k

    @property
    def arity(self) -> int:
        return self.components[0].arity

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[OpTable]:
        return iter(self.components)

    def __getitem__(self, i: int) -> OpTable:
        return self.components[i]

    def __call__(self, point: Sequence[int]) -> tuple[int, ...]:
        return tuple(h.value(point) for h in self.components)

    def to_json(self) -> list:
        return [h.to_json() for h in self.components]

    @classmethod
    def from_json(cls, data: list) -> "OpVector":
        return cls(tuple(OpTable.from_json(item) for item in data))


def _as_vector(hs) -> OpVector:
    if isinstance(hs, OpVector):
        return hs
    if isinstance(hs, OpTable):
        return OpVector((hs,))
    return OpVector(tuple(hs))


def compose(g: OpTable, hs) -> OpTable:
    """The n-ary operation x -> g(h_1(x), ..., h_m(x))."""
    hs = _as_vector(hs)
    if hs.k != g.k:
        raise StructuralError("domain sizes differ")
    if len(hs) != g.arity:
        raise StructuralError(f"{g.arity}-ary operation composed with {len(hs)} operations")
    k = g.k
    index = np.zeros(k ** hs.arity, dtype=np.int64)
    for h in hs:
        index = index * k + h.array
    return OpTable.from_array(k, hs.arity, g.array[index])


def projection(k: int, n: int, i: int) -> OpTable:
    """The i-th n-ary projection, 1 <= i <= n."""
    check_domain_size(k)
    if n < 1:
        raise DomainError("arity must be at least 1")
    if not 1 <= i <= n:
        raise DomainError(f"projection position {i} out of range 1..{n}")
    return OpTable.from_array(k, n, coordinate_array(k, n)[:, i - 1])


def projections(k: int, n: int) -> OpVector:
    """All n-ary projections, in position order: the identity map A^n -> A^n."""
    return OpVector(tuple(projection(k, n, i) for i in range(1, n + 1)))


def identity(k: int) -> OpTable:
    return projection(k, 1, 1)


def constant(k: int, value: int, arity: int = 1) -> OpTable:
    check_domain_size(k)
    if not 0 <= value < k:
        raise DomainError(f"{value} is not an element of a {k}-element set")
    return OpTable(k, arity, (value,) * k ** arity)


def all_operations(k: int, n: int) -> Iterator[OpTable]:
    """Every n-ary operation on a k-element set, in lexicographic table order."""
    for table in itertools.product(range(k), repeat=k ** n):
        yield OpTable(k, n, table)


def range_of(f: OpTable) -> frozenset[int]:
    return frozenset(f.table)


def _check_position(f: OpTable, i: int) -> None:
    if not 1 <= i <= f.arity:
        raise DomainError(f"position {i} out of range 1..{f.arity}")


def depends_on(f: OpTable, i: int) -> bool:
    """Whether two tuples differing only at position i (1-based) get different values."""
    _check_position(f, i)
    cube = f.array.reshape((f.k,) * f.arity)
    return bool(np.any(np.diff(cube, axis=i - 1) != 0))


def essential_positions(f: OpTable) -> tuple[int, ...]:
    return tuple(i for i in range(1, f.arity + 1) if depends_on(f, i))


def essential_arity(f: OpTable) -> int:
    return len(essential_positions(f))


def unary_part(f: OpTable) -> tuple[int, OpTable] | None:
    """For an essentially at most unary f, return (position, u) with f(x) = u(x_position).

    Constants report position 1.  Returns None if f depends on two or more variables.
    """
    positions = essential_positions(f)
    if len(positions) > 1:
        return None
    pos = positions[0] if positions else 1
    values = []
    for a in range(f.k):
        point = [0] * f.arity
        point[pos - 1] = a
        values.append(f.value(point))
    return pos, OpTable(f.k, 1, tuple(values))


def blocks_to_labels(k: int, blocks: Iterable[Iterable[int]]) -> tuple[int, ...]:
    """Block index of each element, blocks numbered by their least element."""
    blocks = sorted((sorted(set(b)) for b in blocks), key=lambda b: b[0] if b else -1)
    labels = [-1] * k
    for idx, block in enumerate(blocks):
        if not block:
            raise StructuralError("empty block")
        for a in block:
            if not 0 <= a < k or labels[a] != -1:
                raise StructuralError("blocks must partition the domain")
            labels[a] = idx
    if -1 in labels:
        raise StructuralError("blocks must cover the domain")
    return tuple(labels)


def quotient_op(f: OpTable, theta) -> OpTable:
    """The action of f on the blocks of the equivalence theta.

    Blocks are numbered by their least element.  Raises ContractViolation if
    f does not preserve theta.
    """
    if theta.k != f.k:
        raise StructuralError("domain sizes differ")
    labels = np.asarray(blocks_to_labels(f.k, theta.blocks()), dtype=np.int64)
    b = int(labels.max()) + 1
    coords = coordinate_array(f.k, f.arity)
    block_index = np.zeros(len(coords), dtype=np.int64)
    for pos in range(f.arity):
        block_index = block_index * b + labels[coords[:, pos]]
    image = labels[f.array]
    result = np.full(b ** f.arity, -1, dtype=np.int64)
    result[block_index] = image
    if np.any(result[block_index] != image):
        raise ContractViolation("the operation does not preserve the equivalence")
    return OpTable.from_array(b, f.arity, result)
