"""Relations on A, the preservation test, Rosenberg relation builders and clone descriptions."""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import (
    OpTable, blocks_to_labels, check_domain_size, encode_tuple, essential_arity,
    range_of, tuples_of, unary_part,
)
from .errors import ContractViolation, DomainError, StructuralError
from .perm import PermGroup, check_perm, compose_perms, cycles

MAX_RELATION_SLOTS = 10 ** 6
PRESERVE_CHUNK = 2 ** 20


@dataclass(frozen=True)
class Relation:
    """An r-ary relation on {0..k-1} as a membership table over k**r tuple slots."""

    k: int
    arity: int
    members: tuple[bool, ...]
    allow_empty: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.k, int) or not 1 <= self.k:
            raise DomainError(f"bad domain size {self.k!r}")
        if self.arity < 1:
            raise DomainError("relation arity must be at least 1")
        if self.k ** self.arity > MAX_RELATION_SLOTS:
            raise DomainError(f"{self.k}**{self.arity} membership slots exceed the cap")
        members = tuple(bool(v) for v in self.members)
        object.__setattr__(self, "members", members)
        if len(members) != self.k ** self.arity:
            raise StructuralError("membership table has the wrong length")
        if not self.allow_empty and not any(members):
            raise ContractViolation("empty relation (use allow_empty=True to permit it)")

    @classmethod
    def from_tuples(cls, k: int, arity: int, tuples: Iterable[Sequence[int]],
                    allow_empty: bool = False) -> "Relation":
        members = [False] * k ** arity
        for t in tuples:
            if len(t) != arity:
                raise StructuralError(f"tuple {tuple(t)} does not have length {arity}")
            members[encode_tuple(t, k)] = True
        return cls(k, arity, tuple(members), allow_empty)

    @classmethod
    def from_predicate(cls, k: int, arity: int, pred: Callable[..., bool],
                       allow_empty: bool = False) -> "Relation":
        return cls(k, arity, tuple(bool(pred(*t)) for t in tuples_of(k, arity)), allow_empty)

    @functools.cached_property
    def tuples(self) -> tuple[tuple[int, ...], ...]:
        return tuple(t for t, m in zip(tuples_of(self.k, self.arity), self.members) if m)

    @functools.cached_property
    def tuple_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.tuples)

    @functools.cached_property
    def member_array(self) -> np.ndarray:
        arr = np.asarray(self.members, dtype=bool)
        arr.setflags(write=False)
        return arr

    @property
    def size(self) -> int:
        return len(self.tuples)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, t) -> bool:
        t = tuple(t)
        if len(t) != self.arity or any(not 0 <= a < self.k for a in t):
            return False
        return self.members[encode_tuple(t, self.k)]

    def issubset(self, other: "Relation") -> bool:
        _same_shape(self, other)
        return all(b or not a for a, b in zip(self.members, other.members))

    def to_json(self) -> dict:
        return {"k": self.k, "arity": self.arity, "tuples": [list(t) for t in self.tuples]}

    @classmethod
    def from_json(cls, data: dict) -> "Relation":
        try:
            return cls.from_tuples(int(data["k"]), int(data["arity"]),
                                   [tuple(t) for t in data["tuples"]],
                                   allow_empty=not data["tuples"])
        except KeyError as exc:
            raise StructuralError(f"relation JSON lacks field {exc}") from None

    # Properties of binary relations and of totally reflexive relations.

    def is_totally_reflexive(self) -> bool:
        """Contains every tuple whose coordinates are not pairwise distinct."""
        return all(m for t, m in zip(tuples_of(self.k, self.arity), self.members)
                   if len(set(t)) < len(t))

    def is_totally_symmetric(self) -> bool:
        return all(tuple(p) in self.tuple_set
                   for t in self.tuples for p in itertools.permutations(t))

    def is_equivalence(self) -> bool:
        if self.arity != 2:
            return False
        s = self.tuple_set
        if any((a, a) not in s for a in range(self.k)):
            return False
        if any((b, a) not in s for a, b in s):
            return False
        return all((a, c) in s for a, b in s for b2, c in s if b == b2)

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        """Blocks of an equivalence relation, ordered by least element."""
        if not self.is_equivalence():
            raise ContractViolation("relation is not an equivalence")
        seen: set[int] = set()
        out = []
        for a in range(self.k):
            if a in seen:
                continue
            block = tuple(b for b in range(self.k) if (a, b) in self.tuple_set)
            seen.update(block)
            out.append(block)
        return tuple(out)

    def labels(self) -> tuple[int, ...]:
        """Block number of each element (blocks ordered by least element)."""
        return blocks_to_labels(self.k, self.blocks())


def _same_shape(a: Relation, b: Relation) -> None:
    if a.k != b.k or a.arity != b.arity:
        raise StructuralError("relations differ in domain size or arity")


def equivalence_from_blocks(k: int, blocks: Iterable[Iterable[int]]) -> Relation:
    labels = blocks_to_labels(k, blocks)
    return Relation.from_predicate(k, 2, lambda a, b: labels[a] == labels[b])


def equality_relation(k: int) -> Relation:
    return Relation.from_predicate(k, 2, lambda a, b: a == b)


def full_relation(k: int, arity: int = 2) -> Relation:
    return Relation(k, arity, (True,) * k ** arity)


def subset_relation(k: int, subset: Iterable[int]) -> Relation:
    """A subset of A as a unary relation."""
    subset = set(subset)
    if not subset or any(not 0 <= a < k for a in subset):
        raise DomainError("a subset must be nonempty and inside the domain")
    return Relation.from_tuples(k, 1, [(a,) for a in sorted(subset)])


def permutation_graph(perm: Sequence[int] | OpTable) -> Relation:
    """The graph {(a, perm(a))} of a permutation, as a binary relation."""
    if isinstance(perm, OpTable):
        if perm.arity != 1:
            raise DomainError("a permutation must be a unary operation")
        perm = perm.table
    k = len(perm)
    perm = check_perm(perm, k)
    return Relation.from_tuples(k, 2, [(a, perm[a]) for a in range(k)])


def in_power(rho: Relation, rows: Sequence[Sequence[int]]) -> bool:
    """Whether the r rows (n-tuples) form a member of rho^n, read column by column."""
    if len(rows) != rho.arity:
        raise StructuralError(f"expected {rho.arity} rows, got {len(rows)}")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise StructuralError("rows must have equal length")
    return all(tuple(r[i] for r in rows) in rho.tuple_set for i in range(n))


# Preservation.

def preserves(f: OpTable, rho: Relation) -> bool:
    """Whether f applied row-wise to every n-column matrix of rho-members stays in rho.

    Cost is |rho|**n evaluations, processed in vectorized chunks.
    """
    if f.k != rho.k:
        raise StructuralError("operation and relation live on different domains")
    k, n, r = f.k, f.arity, rho.arity
    members = np.asarray(rho.tuples, dtype=np.int64).reshape(-1, r)
    count = len(members)
    if count == 0:
        return True
    fa = f.array
    member_table = rho.member_array
    # Split the n columns into a leading group iterated in Python and a
    # trailing group handled by broadcasting.
    tail = n
    while tail > 1 and count ** tail > PRESERVE_CHUNK:
        tail -= 1
    head = n - tail
    tail_index = np.zeros((count ** tail, r), dtype=np.int64)
    grids = np.indices((count,) * tail).reshape(tail, -1)
    for pos in range(tail):
        tail_index = tail_index * k + members[grids[pos]]
    tail_weight = k ** tail
    for head_cols in itertools.product(range(count), repeat=head):
        head_index = np.zeros(r, dtype=np.int64)
        for c in head_cols:
            head_index = head_index * k + members[c]
        point_index = head_index[None, :] * tail_weight + tail_index
        values = fa[point_index]
        code = np.zeros(len(values), dtype=np.int64)
        for j in range(r):
            code = code * k + values[:, j]
        if not member_table[code].all():
            return False
    return True


def preserves_subset(f: OpTable, subset: Iterable[int]) -> bool:
    return preserves(f, subset_relation(f.k, subset))


def preserves_permutation(f: OpTable, perm: Sequence[int] | OpTable) -> bool:
    return preserves(f, permutation_graph(perm))


# Chains and h-regular families.

@dataclass(frozen=True)
class ChainE:
    """A strictly increasing chain of equivalences strictly between equality and A^2."""

    k: int
    relations: tuple[Relation, ...] = ()

    def __post_init__(self):
        rels = tuple(self.relations)
        object.__setattr__(self, "relations", rels)
        check_domain_size(self.k)
        for rel in rels:
            if rel.k != self.k or not rel.is_equivalence():
                raise ContractViolation("chain members must be equivalences on the domain")
            if len(rel.blocks()) in (1, self.k):
                raise ContractViolation("chain members must differ from equality and the full relation")
        for lower, upper in zip(rels, rels[1:]):
            if lower == upper or not lower.issubset(upper):
                raise ContractViolation("chain must be strictly increasing")

    @classmethod
    def from_partitions(cls, k: int, partitions: Iterable[Iterable[Iterable[int]]]) -> "ChainE":
        return cls(k, tuple(equivalence_from_blocks(k, p) for p in partitions))

    @property
    def length(self) -> int:
        return len(self.relations)

    def partitions(self) -> list[list[list[int]]]:
        return [[list(b) for b in rel.blocks()] for rel in self.relations]

    @functools.cached_property
    def level_labels(self) -> tuple[tuple[int, ...], ...]:
        """Block labels for levels 0..r+1: equality, the chain members, then A^2."""
        eq = tuple(range(self.k))
        return (eq,) + tuple(rel.labels() for rel in self.relations) + ((0,) * self.k,)

    def level_of_pair(self, a: int, b: int) -> int:
        """Least level whose relation contains (a, b)."""
        for level, labels in enumerate(self.level_labels):
            if labels[a] == labels[b]:
                return level
        raise AssertionError("the top level relates everything")

    def to_json(self) -> dict:
        return {"k": self.k, "partitions": self.partitions()}

    @classmethod
    def from_json(cls, data: dict) -> "ChainE":
        return cls.from_partitions(int(data["k"]), data["partitions"])


def is_chain(relations: Sequence[Relation]) -> bool:
    """Whether the equivalences are pairwise comparable under inclusion."""
    for rel in relations:
        if not rel.is_equivalence():
            raise ContractViolation("every member must be an equivalence relation")
    return all(a.issubset(b) or b.issubset(a) for a, b in itertools.combinations(relations, 2))


@dataclass(frozen=True)
class HRegularFamily:
    """Equivalences theta_1..theta_r, each with h blocks, all block choices intersecting."""

    k: int
    h: int
    thetas: tuple[Relation, ...]

    def __post_init__(self):
        thetas = tuple(self.thetas)
        object.__setattr__(self, "thetas", thetas)
        if self.h < 3:
            raise ContractViolation("h-regular families need h >= 3")
        if not thetas:
            raise ContractViolation("the family must be nonempty")
        for theta in thetas:
            if theta.k != self.k or not theta.is_equivalence():
                raise ContractViolation("members must be equivalences on the domain")
            if len(theta.blocks()) != self.h:
                raise ContractViolation(f"every member must have exactly {self.h} blocks")
        block_lists = [theta.blocks() for theta in thetas]
        for choice in itertools.product(*block_lists):
            common = set(choice[0]).intersection(*choice[1:])
            if not common:
                raise ContractViolation("some choice of blocks has empty intersection")

    @classmethod
    def from_partitions(cls, k: int, h: int, partitions) -> "HRegularFamily":
        return cls(k, h, tuple(equivalence_from_blocks(k, p) for p in partitions))

    def encoding(self) -> tuple[tuple[int, ...], ...]:
        """phi(a) = (block of a in theta_1, ..., block of a in theta_r)."""
        labels = [theta.labels() for theta in self.thetas]
        return tuple(tuple(lab[a] for lab in labels) for a in range(self.k))


# Builders for the Rosenberg relation types.

def make_central_relation(k: int, c: int, arity: int) -> Relation:
    """Tuples with a repeated coordinate or containing c; central with center c."""
    if not 0 <= c < k:
        raise DomainError(f"{c} is not an element")
    if not 1 <= arity <= k - 1:
        raise DomainError("central relations have arity between 1 and k-1")
    return Relation.from_predicate(k, arity, lambda *t: len(set(t)) < len(t) or c in t)


def make_central_sigma(k: int, c: int) -> Relation:
    """The (k-1)-ary central relation with center c."""
    if k < 3:
        raise DomainError("the (k-1)-ary central relation needs k >= 3")
    check_domain_size(k)
    return make_central_relation(k, c, k - 1)


@dataclass(frozen=True)
class CentralCheck:
    centers: frozenset[int]
    reason: str | None

    @property
    def is_central(self) -> bool:
        return self.reason is None


def validate_central(rho: Relation) -> CentralCheck:
    """Central elements of rho, or an empty set with a reason code.

    Reason codes: not-reflexive, not-symmetric, trivial, no-center.
    """
    if not 1 <= rho.arity <= rho.k - 1:
        raise DomainError("central relations have arity between 1 and k-1")
    if not rho.is_totally_reflexive():
        return CentralCheck(frozenset(), "not-reflexive")
    if not rho.is_totally_symmetric():
        return CentralCheck(frozenset(), "not-symmetric")
    if rho.size in (0, rho.k ** rho.arity):
        return CentralCheck(frozenset(), "trivial")
    centers = frozenset(
        c for c in range(rho.k)
        if all((c,) + t in rho.tuple_set for t in tuples_of(rho.k, rho.arity - 1))
    ) if rho.arity > 1 else frozenset(t[0] for t in rho.tuples)
    if not centers:
        return CentralCheck(frozenset(), "no-center")
    return CentralCheck(centers, None)


def make_h_regular(family: HRegularFamily) -> Relation:
    """h-tuples that are not a transversal of the blocks of any member of the family."""
    labels = [theta.labels() for theta in family.thetas]
    h = family.h

    def not_transversal(*t):
        return all(len({lab[a] for a in t}) < h for lab in labels)

    rel = Relation.from_predicate(family.k, h, not_transversal)
    if not (rel.is_totally_reflexive() and rel.is_totally_symmetric()):
        raise AssertionError("h-regular relation must be totally reflexive and symmetric")
    return rel


def make_iota(k: int) -> Relation:
    """k-tuples whose entries are not pairwise distinct."""
    check_domain_size(k)
    return Relation.from_predicate(k, k, lambda *t: len(set(t)) < k)


def make_burle_beta(k: int) -> Relation:
    """The 4-ary relation {(x,x,y,y), (x,y,x,y), (x,y,y,x)}."""
    check_domain_size(k)
    tuples = set()
    for x, y in itertools.product(range(k), repeat=2):
        tuples.update({(x, x, y, y), (x, y, x, y), (x, y, y, x)})
    return Relation.from_tuples(k, 4, tuples)


def _prime_factor(k: int) -> tuple[int, int] | None:
    """(p, r) with k = p**r for a prime p, or None."""
    for p in range(2, k + 1):
        if k % p == 0:
            r, m = 0, k
            while m % p == 0:
                m //= p
                r += 1
            return (p, r) if m == 1 else None
    return None


def elementary_abelian_addition(k: int) -> tuple[tuple[int, ...], ...]:
    """Addition table of (Z_p)^r on k = p**r elements, coordinates read in base p."""
    pr = _prime_factor(k)
    if pr is None:
        raise DomainError(f"{k} is not a prime power")
    p, r = pr

    def digits(a):
        return [(a // p ** i) % p for i in range(r)]

    def add(a, b):
        return sum(((x + y) % p) * p ** i for i, (x, y) in enumerate(zip(digits(a), digits(b))))

    return tuple(tuple(add(a, b) for b in range(k)) for a in range(k))


def _check_elementary_abelian(table: Sequence[Sequence[int]], k: int) -> int:
    """Validate an addition table; return the prime exponent p."""
    add = [list(row) for row in table]
    if len(add) != k or any(len(row) != k for row in add):
        raise DomainError("addition table must be k x k")
    if any(not 0 <= v < k for row in add for v in row):
        raise DomainError("addition table entries must be elements")
    zeros = [e for e in range(k) if all(add[e][a] == a for a in range(k))]
    if not zeros:
        raise DomainError("no identity element")
    zero = zeros[0]
    for a, b in itertools.product(range(k), repeat=2):
        if add[a][b] != add[b][a]:
            raise DomainError("operation is not commutative")
    for a, b, c in itertools.product(range(k), repeat=3):
        if add[add[a][b]][c] != add[a][add[b][c]]:
            raise DomainError("operation is not associative")
    for a in range(k):
        if zero not in add[a]:
            raise DomainError("an element has no inverse")
    pr = _prime_factor(k)
    if pr is None:
        raise DomainError(f"{k} is not a prime power")
    p = pr[0]
    for a in range(k):
        acc = zero
        for _ in range(p):
            acc = add[acc][a]
        if acc != zero:
            raise DomainError("group is not of prime exponent")
    return p


def make_prime_affine(k: int, addition: Sequence[Sequence[int]] | None = None) -> Relation:
    """The graph {(x, y, z, x - y + z)} of the affine ternary operation of an elementary abelian group."""
    check_domain_size(k)
    add = elementary_abelian_addition(k) if addition is None else addition
    _check_elementary_abelian(add, k)
    zero = next(e for e in range(k) if all(add[e][a] == a for a in range(k)))
    neg = [next(b for b in range(k) if add[a][b] == zero) for a in range(k)]
    return Relation.from_tuples(
        k, 4, [(x, y, z, add[add[x][neg[y]]][z]) for x, y, z in tuples_of(k, 3)])


def make_bounded_order(k: int, pairs: Iterable[Sequence[int]]) -> Relation:
    """A partial order (given by its pairs; reflexive closure added) with least and greatest elements."""
    check_domain_size(k)
    s = {tuple(p) for p in pairs} | {(a, a) for a in range(k)}
    rel = Relation.from_tuples(k, 2, s)
    if any((b, a) in s and a != b for a, b in s):
        raise ContractViolation("relation is not antisymmetric")
    if any((a, d) not in s for a, b in s for c, d in s if b == c):
        raise ContractViolation("relation is not transitive")
    if not any(all((lo, a) in s for a in range(k)) for lo in range(k)):
        raise ContractViolation("order has no least element")
    if not any(all((a, hi) in s for a in range(k)) for hi in range(k)):
        raise ContractViolation("order has no greatest element")
    return rel


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


def is_prime_permutation(perm: Sequence[int]) -> bool:
    """Fixed-point-free with all cycles of the same prime length."""
    lengths = {len(c) for c in cycles(perm)}
    return len(lengths) == 1 and _is_prime(lengths.pop())


def make_prime_permutation(perm: Sequence[int]) -> Relation:
    """Graph of a prime permutation; raises if the permutation is not prime."""
    k = len(perm)
    perm = check_perm(perm, k)
    if not is_prime_permutation(perm):
        raise ContractViolation("permutation is not fixed-point-free with equal prime cycles")
    return permutation_graph(perm)


def make_equivalence(k: int, blocks: Iterable[Iterable[int]]) -> Relation:
    """A nontrivial equivalence relation given by its blocks."""
    rel = equivalence_from_blocks(k, blocks)
    if len(rel.blocks()) in (1, k):
        raise ContractViolation("equivalence must differ from equality and the full relation")
    return rel


def aut_of_chain(chain: ChainE) -> PermGroup:
    """All permutations of A preserving every member of the chain."""
    good = []
    for p in itertools.permutations(range(chain.k)):
        op = OpTable(chain.k, 1, p)
        if all(preserves(op, rel) for rel in chain.relations):
            good.append(p)
    return PermGroup(chain.k, tuple(good))


def group_generators(group: PermGroup) -> tuple[tuple[int, ...], ...]:
    """A small generating set, chosen greedily in element order."""
    gens: list[tuple[int, ...]] = []
    current = PermGroup.trivial(group.k)
    for p in group.elements[1:]:
        if p in current._index:
            continue
        gens.append(p)
        current = PermGroup.generated_by(group.k, gens)
        if current.order == group.order:
            break
    return tuple(gens)


def nonempty_subsets(k: int) -> list[frozenset[int]]:
    return [frozenset(c) for size in range(1, k + 1)
            for c in itertools.combinations(range(k), size)]


# Clone descriptions.

NAMED_TAGS = ("FullClone", "Projections", "SlupeckiChain", "SlupeckiChainM",
              "TAMinus", "DiscriminatorClone", "ChainClone")


@dataclass(frozen=True)
class Relational:
    """Pol of relations, permutations (via their graphs) and subsets."""

    k: int
    relations: tuple[Relation, ...] = ()
    permutations: tuple[OpTable, ...] = ()
    subsets: tuple[frozenset[int], ...] = ()

    def __post_init__(self):
        check_domain_size(self.k)
        object.__setattr__(self, "relations", tuple(self.relations))
        perms = tuple(p if isinstance(p, OpTable) else OpTable(self.k, 1, tuple(p))
                      for p in self.permutations)
        object.__setattr__(self, "permutations", perms)
        object.__setattr__(self, "subsets", tuple(frozenset(s) for s in self.subsets))
        for rel in self.relations:
            if rel.k != self.k:
                raise StructuralError("relation on a different domain")
        for p in perms:
            if p.k != self.k or p.arity != 1:
                raise DomainError("permutations must be unary operations on the domain")
            check_perm(p.table, self.k)
        for s in self.subsets:
            if not s or any(not 0 <= a < self.k for a in s):
                raise DomainError("subsets must be nonempty and inside the domain")

    def constraints(self) -> tuple[Relation, ...]:
        """Every constraint as a relation: listed relations, permutation graphs, subsets."""
        return (self.relations
                + tuple(permutation_graph(p) for p in self.permutations)
                + tuple(subset_relation(self.k, s) for s in self.subsets))

    def to_json(self) -> dict:
        return {"type": "Relational", "k": self.k,
                "relations": [r.to_json() for r in self.relations],
                "permutations": [list(p.table) for p in self.permutations],
                "subsets": [sorted(s) for s in self.subsets]}


@dataclass(frozen=True)
class Named:
    """A clone referred to by name; index, monoid and chain are used by some tags."""

    k: int
    tag: str
    index: int | None = None
    monoid: tuple[OpTable, ...] = ()
    chain: ChainE | None = None

    def __post_init__(self):
        check_domain_size(self.k)
        if self.tag not in NAMED_TAGS:
            raise DomainError(f"unknown clone name {self.tag!r}")
        object.__setattr__(self, "monoid", tuple(self.monoid))
        if self.tag in ("SlupeckiChain", "SlupeckiChainM"):
            if self.index is None or not 0 <= self.index <= self.k:
                raise DomainError("chain index must satisfy 0 <= i <= k")
        if self.tag == "SlupeckiChainM":
            for u in self.monoid:
                if u.k != self.k or u.arity != 1:
                    raise DomainError("monoid members must be unary operations on the domain")
        if self.tag == "ChainClone":
            if self.chain is None or self.chain.k != self.k:
                raise DomainError("ChainClone needs a chain on the same domain")

    def to_json(self) -> dict:
        data: dict = {"type": "Named", "k": self.k, "tag": self.tag}
        if self.index is not None:
            data["index"] = self.index
        if self.tag == "SlupeckiChainM":
            data["monoid"] = sorted(list(u.table) for u in self.monoid)
        if self.chain is not None:
            data["chain"] = self.chain.to_json()
        return data


@dataclass(frozen=True)
class Generated:
    """The clone generated by a list of operations."""

    k: int
    generators: tuple[OpTable, ...] = ()

    def __post_init__(self):
        check_domain_size(self.k)
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            if g.k != self.k:
                raise StructuralError("generator on a different domain")

    def to_json(self) -> dict:
        return {"type": "Generated", "k": self.k,
                "generators": [g.to_json() for g in self.generators]}


CloneSpec = Relational | Named | Generated


def full_clone(k: int) -> Named:
    return Named(k, "FullClone")


def projection_clone(k: int) -> Named:
    return Named(k, "Projections")


def slupecki_chain(k: int, i: int) -> Named:
    return Named(k, "SlupeckiChain", i)


def slupecki_chain_m(k: int, i: int, monoid: Iterable[OpTable]) -> Named:
    return Named(k, "SlupeckiChainM", i, tuple(monoid))


def ta_minus(k: int) -> Named:
    return Named(k, "TAMinus")


def discriminator_clone(k: int) -> Named:
    return Named(k, "DiscriminatorClone")


def chain_clone(chain: ChainE) -> Named:
    return Named(chain.k, "ChainClone", chain=chain)


def ta_minus_monoid(k: int) -> tuple[OpTable, ...]:
    """The identity together with all non-bijective unary operations."""
    out = [OpTable(k, 1, tuple(range(k)))]
    for t in itertools.product(range(k), repeat=k):
        if len(set(t)) < k:
            out.append(OpTable(k, 1, t))
    return tuple(out)


def spec_to_json(spec: CloneSpec) -> dict:
    return spec.to_json()


def spec_from_json(data: dict) -> CloneSpec:
    kind = data.get("type")
    k = int(data["k"])
    if kind == "Relational":
        return Relational(
            k,
            tuple(Relation.from_json(r) for r in data.get("relations", [])),
            tuple(OpTable(k, 1, tuple(p)) for p in data.get("permutations", [])),
            tuple(frozenset(s) for s in data.get("subsets", [])))
    if kind == "Named":
        chain = ChainE.from_json(data["chain"]) if "chain" in data else None
        monoid = tuple(OpTable(k, 1, tuple(t)) for t in data.get("monoid", []))
        return Named(k, data["tag"], data.get("index"), monoid, chain)
    if kind == "Generated":
        return Generated(k, tuple(OpTable.from_json(g) for g in data.get("generators", [])))
    raise StructuralError(f"unknown clone description type {kind!r}")


def canonical_key(spec: CloneSpec) -> str:
    """Canonical serialization used as a cache key."""
    data = spec.to_json()
    if data["type"] == "Relational":
        data["relations"] = sorted(data["relations"], key=lambda r: json.dumps(r, sort_keys=True))
        data["permutations"] = sorted(data["permutations"])
        data["subsets"] = sorted(data["subsets"])
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def relational_form(spec: CloneSpec) -> Relational | None:
    """The equivalent relational description when the clone is defined by relations.

    FullClone, ChainClone and DiscriminatorClone are defined as Pol of explicit
    relations; other named clones and generated clones return None.
    """
    if isinstance(spec, Relational):
        return spec
    if isinstance(spec, Named):
        k = spec.k
        if spec.tag == "FullClone":
            return Relational(k)
        if spec.tag == "ChainClone":
            group = aut_of_chain(spec.chain)
            return Relational(k, spec.chain.relations,
                              tuple(OpTable(k, 1, p) for p in group_generators(group)),
                              tuple(nonempty_subsets(k)))
        if spec.tag == "DiscriminatorClone":
            group = PermGroup.symmetric(k)
            return Relational(k, (), tuple(OpTable(k, 1, p) for p in group_generators(group)),
                              tuple(nonempty_subsets(k)))
    return None


@functools.lru_cache(maxsize=64)
def monoid_closure(k: int, generators: tuple[tuple[int, ...], ...]) -> frozenset[tuple[int, ...]]:
    """Unary tables of the submonoid generated by the given maps and the identity."""
    found = {tuple(range(k))} | set(generators)
    frontier = list(found)
    while frontier:
        nxt = []
        for u in frontier:
            for g in generators:
                for w in (compose_perms(g, u), compose_perms(u, g)):
                    if w not in found:
                        found.add(w)
                        nxt.append(w)
        frontier = nxt
    return frozenset(found)


def _is_quasilinear(f: OpTable) -> bool:
    """Whether f = g(h_1(x_1) xor ... xor h_n(x_n)) for maps h_i: A -> {0,1}, g: {0,1} -> A."""
    values = sorted(range_of(f))
    if len(values) == 1:
        return True
    if len(values) > 2:
        return False
    top = values[1]
    k, n = f.k, f.arity
    base = (0,) * n
    base_bit = int(f.value(base) == top)
    shifts = []
    for i in range(n):
        row = []
        for a in range(k):
            point = list(base)
            point[i] = a
            row.append(int(f.value(point) == top) ^ base_bit)
        shifts.append(row)
    for point in tuples_of(k, n):
        bit = base_bit
        for i, a in enumerate(point):
            bit ^= shifts[i][a]
        if bit != int(f.value(point) == top):
            return False
    return True


def _in_slupecki_chain(f: OpTable, i: int, unary_ok: Callable[[OpTable], bool]) -> bool:
    part = unary_part(f)
    if part is not None:
        return unary_ok(part[1])
    if i == 0:
        return False
    if i == 1:
        return _is_quasilinear(f)
    return len(range_of(f)) <= i


def named_membership(f: OpTable, spec: Named) -> bool:
    """Membership in a named clone, straight from its definition."""
    if f.k != spec.k:
        raise StructuralError("operation and clone live on different domains")
    tag = spec.tag
    if tag == "FullClone":
        return True
    if tag == "Projections":
        part = unary_part(f)
        return part is not None and essential_arity(f) == 1 and part[1].table == tuple(range(f.k))
    if tag == "SlupeckiChain":
        return _in_slupecki_chain(f, spec.index, lambda u: True)
    if tag == "SlupeckiChainM":
        closure = monoid_closure(spec.k, tuple(sorted(u.table for u in spec.monoid)))
        return _in_slupecki_chain(f, spec.index, lambda u: u.table in closure)
    if tag == "TAMinus":
        part = unary_part(f)
        if part is None:
            return False
        u = part[1].table
        return u == tuple(range(f.k)) or len(set(u)) < f.k
    rel = relational_form(spec)
    assert rel is not None
    return relational_membership(f, rel)


def relational_membership(f: OpTable, spec: Relational) -> bool:
    if f.k != spec.k:
        raise StructuralError("operation and clone live on different domains")
    return all(preserves(f, rel) for rel in spec.constraints())


def clone_membership(f: OpTable, spec: CloneSpec, session=None) -> bool:
    """Whether f belongs to the clone described by spec.

    Generated clones are decided by closing the generators up to the arity of
    f; beyond the session's closure bound an UndecidedError is raised.
    """
    if f.k != spec.k:
        raise StructuralError("operation and clone live on different domains")
    if isinstance(spec, Relational):
        return relational_membership(f, spec)
    if isinstance(spec, Named):
        return named_membership(f, spec)
    from .search import default_session
    session = session or default_session()
    return session.generated_membership(f, spec)
