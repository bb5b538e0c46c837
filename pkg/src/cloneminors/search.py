"""Brute-force decision procedures: clone enumeration, generator closure, C-minors and classes.

Everything here is exhaustive within explicit budgets.  A search that would
exceed its budget raises BudgetExceeded; it never returns a partial answer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .core import (
    OpTable, OpVector, compose, coordinate_array, decode_tuple, encode_tuple,
    projections, range_of, tuples_of, unary_part,
)
from .errors import BudgetExceeded, DomainError, StructuralError, UndecidedError
from .relations import (
    CloneSpec, Generated, Named, Relation, Relational, canonical_key, clone_membership,
    monoid_closure, named_membership, preserves, relational_form, subset_relation,
)

DEFAULT_BUDGET_TABLES = 2 * 10 ** 7
DEFAULT_BUDGET_ASSIGNMENTS = 10 ** 8
DEFAULT_CLOSURE_ARITY = 3
MATRIX_CAP = 10 ** 6


@dataclass
class Session:
    """Budgets and caches shared by a sequence of searches.

    budget_tables caps candidate tables per enumeration or closure call;
    budget_assignments caps pointwise assignments per minor or extension search;
    closure_arity bounds the arity at which Generated membership is decided;
    minor_engine picks the search for relational clones: "propagate" keeps
    arc consistency, "pointwise" is plain backtracking in point order.
    """

    budget_tables: int = DEFAULT_BUDGET_TABLES
    budget_assignments: int = DEFAULT_BUDGET_ASSIGNMENTS
    closure_arity: int = DEFAULT_CLOSURE_ARITY
    minor_engine: str = "propagate"
    _members: dict = field(default_factory=dict, repr=False)
    _minors: dict = field(default_factory=dict, repr=False)
    _constraints: dict = field(default_factory=dict, repr=False)

    def clear(self) -> None:
        self._members.clear()
        self._minors.clear()
        self._constraints.clear()

    def members(self, spec: CloneSpec, n: int) -> np.ndarray:
        """The n-ary part of the clone as a lexicographically sorted (N, k**n) array."""
        key = (canonical_key(spec), n)
        if key not in self._members:
            self._members[key] = _enumerate_members(spec, n, self)
        return self._members[key]

    def constraint(self, rel: Relation, n: int) -> "_Constraint":
        key = (rel.k, rel.arity, rel.members, n)
        if key not in self._constraints:
            self._constraints[key] = _Constraint(rel, n)
        return self._constraints[key]

    def generated_membership(self, f: OpTable, spec: Generated) -> bool:
        if f.arity > self.closure_arity:
            raise UndecidedError(
                f"membership in a generated clone is decided only up to arity {self.closure_arity}")
        return _row_in(self.members(spec, f.arity), f.array)


_DEFAULT = Session()


def default_session() -> Session:
    return _DEFAULT


def _row_in(sorted_rows: np.ndarray, row: np.ndarray) -> bool:
    lo, hi = _narrow(sorted_rows, 0, len(sorted_rows), row)
    return hi > lo


def _narrow(rows: np.ndarray, lo: int, hi: int, prefix: np.ndarray, start: int = 0):
    """Range of rows in [lo, hi) that agree with prefix on columns start..len(prefix)-1."""
    for col in range(start, len(prefix)):
        column = rows[lo:hi, col]
        a = int(np.searchsorted(column, prefix[col], side="left"))
        b = int(np.searchsorted(column, prefix[col], side="right"))
        lo, hi = lo + a, lo + b
        if lo >= hi:
            break
    return lo, hi


class _Constraint:
    """A relation viewed as constraints on an n-ary table, bucketed by the last point they involve.

    Each matrix of rho^n is stored as its r rows (point indices).  When the
    matrix count exceeds MATRIX_CAP the constraint is checked only on
    completed tables.
    """

    def __init__(self, rel: Relation, n: int):
        self.rel = rel
        k, r = rel.k, rel.arity
        members = np.asarray(rel.tuples, dtype=np.int64).reshape(-1, r)
        total = len(members) ** n
        self.incremental = total <= MATRIX_CAP
        self.weights = k ** np.arange(r - 1, -1, -1, dtype=np.int64)
        self.member = rel.member_array
        if not self.incremental:
            return
        grids = np.indices((len(members),) * n).reshape(n, -1)
        rows = np.zeros((total, r), dtype=np.int64)
        for t in range(n):
            rows = rows * k + members[grids[t]]
        last = rows.max(axis=1)
        order = np.argsort(last, kind="stable")
        self.rows = rows[order]
        bounds = np.searchsorted(last[order], np.arange(k ** n + 1))
        self.bounds = bounds

    def check_point(self, tables: np.ndarray, i: int) -> bool:
        """Check every matrix whose rows all lie at points <= i and include point i."""
        s, e = self.bounds[i], self.bounds[i + 1]
        if s == e:
            return True
        vals = tables[:, self.rows[s:e]]
        return bool(self.member[vals @ self.weights].all())

    def check_complete(self, tables: np.ndarray, k: int, n: int) -> bool:
        return all(preserves(OpTable.from_array(k, n, t), self.rel) for t in tables)


class _Counter:
    def __init__(self, limit: int, what: str):
        self.limit = limit
        self.count = 0
        self.what = what

    def tick(self, amount: int = 1) -> None:
        self.count += amount
        if self.count > self.limit:
            raise BudgetExceeded(f"{self.what} budget of {self.limit} exceeded")


def _pointwise_search(k: int, n: int, m: int, candidates: Sequence[Sequence[tuple]],
                      constraints: Sequence[_Constraint], memberset: np.ndarray | None,
                      counter: _Counter) -> Iterator[np.ndarray]:
    """Depth-first search over points in index order for m tables of arity n.

    candidates[i] lists the allowed value vectors at point i in search order.
    Yields each complete (m, k**n) array satisfying every constraint and,
    if memberset is given, with every row in memberset.
    """
    size = k ** n
    if any(len(c) == 0 for c in candidates):
        return
    tables = np.zeros((m, size), dtype=np.int64)
    incremental = [c for c in constraints if c.incremental]
    deferred = [c for c in constraints if not c.incremental]
    total = len(memberset) if memberset is not None else 0
    # ranges[i] holds per-component [lo, hi) member ranges after assigning points < i
    ranges = [None] * (size + 1)
    ranges[0] = [(0, total)] * m
    choice = [-1] * size
    i = 0
    while i >= 0:
        choice[i] += 1
        if choice[i] >= len(candidates[i]):
            choice[i] = -1
            i -= 1
            continue
        counter.tick()
        vec = candidates[i][choice[i]]
        tables[:, i] = vec
        if memberset is not None:
            new = []
            for j, (lo, hi) in enumerate(ranges[i]):
                column = memberset[lo:hi, i]
                a = int(np.searchsorted(column, vec[j], side="left"))
                b = int(np.searchsorted(column, vec[j], side="right"))
                if a >= b:
                    new = None
                    break
                new.append((lo + a, lo + b))
            if new is None:
                continue
            ranges[i + 1] = new
        if not all(c.check_point(tables, i) for c in incremental):
            continue
        if i == size - 1:
            if all(c.check_complete(tables, k, n) for c in deferred):
                yield tables.copy()
            continue
        i += 1
    return


_POPCOUNT = np.asarray([bin(v).count("1") for v in range(1 << 6)], dtype=np.int64)


class _Propagator:
    """Generalized arc consistency for m tables of arity n.

    Domains are bitmasks, one per (component, point).  Point constraints
    require the value vector at each point to be one of its candidates;
    relation constraints require every matrix of rho^n, read through a
    component, to land in rho.
    """

    def __init__(self, k: int, n: int, m: int, candidates: Sequence[Sequence[tuple]],
                 constraints: Sequence[_Constraint]):
        size = k ** n
        width = max(len(c) for c in candidates)
        cand = np.zeros((size, width, m), dtype=np.int64)
        valid = np.zeros((size, width), dtype=bool)
        for i, vecs in enumerate(candidates):
            if vecs:
                cand[i, :len(vecs)] = np.asarray(vecs, dtype=np.int64).reshape(len(vecs), m)
                valid[i, :len(vecs)] = True
        self.m = m
        self.cand = cand
        self.valid = valid
        self.cand_bits = np.where(valid[:, :, None], 1 << cand, 0)
        self.relations = []
        for c in constraints:
            if c.incremental and len(c.rows):
                tuples = np.asarray(c.rel.tuples, dtype=np.int64).reshape(-1, c.rel.arity)
                self.relations.append((c.rows, tuples, 1 << tuples))

    def initial(self) -> np.ndarray:
        return np.bitwise_or.reduce(self.cand_bits, axis=1).T.copy()

    def propagate(self, dom: np.ndarray) -> bool:
        """Shrink dom in place to a fixpoint; False if some domain becomes empty."""
        while True:
            before = dom.copy()
            ok = self.valid & np.all((dom.T[:, None, :] >> self.cand) & 1, axis=2)
            dom &= np.bitwise_or.reduce(np.where(ok[:, :, None], self.cand_bits, 0), axis=1).T
            if not dom.all():
                return False
            for rows, tuples, bits in self.relations:
                for j in range(self.m):
                    sub = dom[j][rows]
                    support = np.all((sub[None, :, :] >> tuples[:, None, :]) & 1, axis=2)
                    for q in range(rows.shape[1]):
                        allowed = np.bitwise_or.reduce(
                            np.where(support, bits[:, q:q + 1], 0), axis=0)
                        np.bitwise_and.at(dom[j], rows[:, q], allowed)
                if not dom.all():
                    return False
            if np.array_equal(before, dom):
                return True


def _propagation_search(k: int, n: int, m: int, candidates: Sequence[Sequence[tuple]],
                        constraints: Sequence[_Constraint], counter: _Counter) -> Iterator[np.ndarray]:
    """Depth-first search maintaining arc consistency; yields each complete (m, k**n) array.

    Constraints too large to hold as matrices are checked on complete tables.
    """
    if any(len(c) == 0 for c in candidates):
        return
    prop = _Propagator(k, n, m, candidates, constraints)
    deferred = [c for c in constraints if not c.incremental]
    stack = [prop.initial()]
    while stack:
        dom = stack.pop()
        counter.tick()
        if not prop.propagate(dom):
            continue
        sizes = _POPCOUNT[dom]
        if np.all(sizes == 1):
            tables = np.log2(dom).astype(np.int64)
            if all(c.check_complete(tables, k, n) for c in deferred):
                yield tables
            continue
        open_sizes = np.where(sizes > 1, sizes, np.iinfo(np.int64).max)
        j, i = np.unravel_index(int(np.argmin(open_sizes)), dom.shape)
        values = [a for a in range(k) if dom[j, i] >> a & 1]
        for a in reversed(values):
            child = dom.copy()
            child[j, i] = 1 << a
            stack.append(child)


# Enumeration of n-ary parts.

def _sorted_unique(rows: np.ndarray) -> np.ndarray:
    if len(rows) == 0:
        return rows
    rows = np.unique(rows, axis=0)
    return rows


def _essentially_unary(k: int, n: int, unary_ok) -> list[tuple[int, ...]]:
    coords = coordinate_array(k, n)
    out = set()
    for u in itertools.product(range(k), repeat=k):
        if not unary_ok(u):
            continue
        ua = np.asarray(u)
        if len(set(u)) == 1:
            out.add((u[0],) * k ** n)
            continue
        for pos in range(n):
            out.add(tuple(ua[coords[:, pos]].tolist()))
    return sorted(out)


def _small_range_tables(k: int, n: int, size: int, counter: _Counter) -> np.ndarray:
    """All n-ary tables whose range has at most `size` elements."""
    points = k ** n
    estimate = math.comb(k, size) * size ** points
    counter.tick(estimate)
    chunks = []
    for subset in itertools.combinations(range(k), size):
        vals = np.asarray(subset, dtype=np.int64)
        grid = np.indices((size,) * points, dtype=np.int8).reshape(points, -1).T
        chunks.append(vals[grid])
    return _sorted_unique(np.concatenate(chunks).astype(np.int64))


def _quasilinear_tables(k: int, n: int) -> list[tuple[int, ...]]:
    coords = coordinate_array(k, n)
    out = set()
    for hs in itertools.product(itertools.product((0, 1), repeat=k), repeat=n):
        bits = np.zeros(k ** n, dtype=np.int64)
        for pos, h in enumerate(hs):
            bits ^= np.asarray(h)[coords[:, pos]]
        for a, b in itertools.product(range(k), repeat=2):
            out.add(tuple(np.where(bits == 1, b, a).tolist()))
    return sorted(out)


def _enumerate_named(spec: Named, n: int, session: Session, counter: _Counter) -> np.ndarray:
    k = spec.k
    tag = spec.tag
    if tag == "Projections":
        return _sorted_unique(np.asarray([p.table for p in projections(k, n)], dtype=np.int64))
    if tag == "TAMinus":
        rows = _essentially_unary(
            k, n, lambda u: u == tuple(range(k)) or len(set(u)) < k)
        return np.asarray(rows, dtype=np.int64)
    if tag in ("SlupeckiChain", "SlupeckiChainM"):
        if tag == "SlupeckiChainM":
            closure = monoid_closure(k, tuple(sorted(u.table for u in spec.monoid)))
            unary_ok = closure.__contains__
        else:
            unary_ok = lambda u: True
        rows = np.asarray(_essentially_unary(k, n, unary_ok), dtype=np.int64)
        i = spec.index
        if i == 1:
            extra = np.asarray(_quasilinear_tables(k, n), dtype=np.int64)
            extra = extra[[unary_part(OpTable(k, n, tuple(t))) is None for t in extra.tolist()]]
            rows = np.concatenate([rows, extra]) if len(extra) else rows
        elif i >= 2:
            extra = _small_range_tables(k, n, min(i, k), counter)
            keep = [named_membership(OpTable(k, n, tuple(t)), spec) for t in extra.tolist()] \
                if tag == "SlupeckiChainM" else None
            if keep is not None:
                extra = extra[np.asarray(keep, dtype=bool)]
            rows = np.concatenate([rows, extra]) if len(extra) else rows
        return _sorted_unique(rows)
    rel = relational_form(spec)
    assert rel is not None
    return _enumerate_relational(rel, n, session, counter)


def _enumerate_relational(spec: Relational, n: int, session: Session,
                          counter: _Counter) -> np.ndarray:
    k = spec.k
    constraints = [session.constraint(rel, n) for rel in spec.constraints()]
    candidates = [[(a,) for a in range(k)]] * k ** n
    search_counter = _Counter(session.budget_assignments, "assignment")
    found = []
    for tables in _pointwise_search(k, n, 1, candidates, constraints, None, search_counter):
        counter.tick()
        found.append(tables[0])
    if not found:
        return np.zeros((0, k ** n), dtype=np.int64)
    return np.asarray(found, dtype=np.int64)


def _enumerate_members(spec: CloneSpec, n: int, session: Session) -> np.ndarray:
    if n < 1:
        raise DomainError("arity must be at least 1")
    counter = _Counter(session.budget_tables, "table")
    if isinstance(spec, Generated):
        return close_generators(spec.generators, n, spec.k, session)
    if isinstance(spec, Named):
        if spec.tag == "FullClone":
            counter.tick(spec.k ** spec.k ** n)
            return np.asarray(list(itertools.product(range(spec.k), repeat=spec.k ** n)),
                              dtype=np.int64)
        return _enumerate_named(spec, n, session, counter)
    return _enumerate_relational(spec, n, session, counter)


def enum_clone_ops(spec: CloneSpec, n: int, session: Session | None = None) -> Iterator[OpTable]:
    """Every n-ary member of the clone, each once, in lexicographic table order."""
    session = session or default_session()
    rows = session.members(spec, n)
    for row in rows.tolist():
        yield OpTable(spec.k, n, tuple(row))


def count_clone_ops(spec: CloneSpec, n: int, session: Session | None = None) -> int:
    session = session or default_session()
    return len(session.members(spec, n))


def close_generators(gens: Iterable[OpTable], n: int, k: int | None = None,
                     session: Session | None = None) -> np.ndarray:
    """The n-ary part of the clone generated by gens, as a sorted (N, k**n) array.

    Starts from the n-ary projections and composes generators with tuples of
    current members until nothing new appears.  Each n-ary member of the
    generated clone has a term whose subterms are all n-ary, so this is exact.
    """
    gens = list(gens)
    if k is None:
        if not gens:
            raise DomainError("k is required when there are no generators")
        k = gens[0].k
    if any(g.k != k for g in gens):
        raise StructuralError("generators on different domains")
    session = session or default_session()
    counter = _Counter(session.budget_tables, "table")
    found: dict[tuple, int] = {}
    rows: list[np.ndarray] = []
    for p in projections(k, n):
        if p.table not in found:
            found[p.table] = len(rows)
            rows.append(p.array)
    old = 0
    while True:
        new_start = len(rows)
        current = np.asarray(rows, dtype=np.int64)
        for g in gens:
            m = g.arity
            total = len(current)
            # tuples that use at least one member added in the previous round
            for combo in itertools.product(range(total), repeat=m):
                if max(combo) < old:
                    continue
                counter.tick()
                index = np.zeros(k ** n, dtype=np.int64)
                for c in combo:
                    index = index * k + current[c]
                val = g.array[index]
                key = tuple(val.tolist())
                if key not in found:
                    found[key] = len(rows)
                    rows.append(val)
        if len(rows) == new_start:
            break
        old = new_start
    return _sorted_unique(np.asarray(rows, dtype=np.int64))


# C-minors.

@dataclass(frozen=True)
class MinorWitness:
    """Operations h_1..h_m in the clone with f = g(h_1, ..., h_m)."""

    hs: OpVector

    def to_json(self) -> list:
        return self.hs.to_json()


def _search_setup(spec: CloneSpec, n: int, session: Session):
    rel = relational_form(spec)
    if rel is not None:
        return [session.constraint(c, n) for c in rel.constraints()], None
    return [], session.members(spec, n)


def is_minor(f: OpTable, g: OpTable, spec: CloneSpec,
             session: Session | None = None) -> MinorWitness | None:
    """A witness h with f = g o h and every h_j in the clone, or None if there is none."""
    session = session or default_session()
    if f.k != g.k or f.k != spec.k:
        raise StructuralError("operations and clone must share the domain")
    key = (f.arity, f.table, g.arity, g.table, canonical_key(spec))
    if key in session._minors:
        return session._minors[key]
    result = _find_minor(f, g, spec, session)
    session._minors[key] = result
    return result


def _find_minor(f: OpTable, g: OpTable, spec: CloneSpec, session: Session) -> MinorWitness | None:
    k, n, m = f.k, f.arity, g.arity
    if not range_of(f) <= range_of(g):
        return None
    preimages: dict[int, list[tuple[int, ...]]] = {a: [] for a in range(k)}
    for u, v in zip(tuples_of(k, m), g.table):
        preimages[v].append(u)
    candidates = [preimages[v] for v in f.table]
    constraints, memberset = _search_setup(spec, n, session)
    counter = _Counter(session.budget_assignments, "assignment")
    if memberset is None and session.minor_engine == "propagate":
        found = _propagation_search(k, n, m, candidates, constraints, counter)
    else:
        found = _pointwise_search(k, n, m, candidates, constraints, memberset, counter)
    for tables in found:
        hs = OpVector(tuple(OpTable.from_array(k, n, t) for t in tables))
        _verify_witness(f, g, hs, spec, session)
        return MinorWitness(hs)
    return None


def _verify_witness(f: OpTable, g: OpTable, hs: OpVector, spec: CloneSpec,
                    session: Session) -> None:
    if compose(g, hs) != f:
        raise AssertionError("minor witness does not compose to f")
    for h in hs:
        if isinstance(spec, Generated):
            ok = _row_in(session.members(spec, h.arity), h.array)
        else:
            ok = clone_membership(h, spec, session)
        if not ok:
            raise AssertionError("minor witness component is not in the clone")


def are_equivalent(f: OpTable, g: OpTable, spec: CloneSpec,
                   session: Session | None = None) -> bool:
    return (is_minor(f, g, spec, session) is not None
            and is_minor(g, f, spec, session) is not None)


@dataclass(frozen=True)
class ClassPartition:
    """Operations with a class number each; equal numbers mean C-equivalent."""

    items: tuple[OpTable, ...]
    class_id: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(set(self.class_id))

    def classes(self) -> list[list[OpTable]]:
        out: dict[int, list[OpTable]] = {}
        for item, cid in zip(self.items, self.class_id):
            out.setdefault(cid, []).append(item)
        return [out[c] for c in sorted(out)]

    def same_class(self, i: int, j: int) -> bool:
        return self.class_id[i] == self.class_id[j]


def partition_classes(ops: Sequence[OpTable], spec: CloneSpec,
                      session: Session | None = None,
                      method: str = "representatives") -> ClassPartition:
    """Partition ops into C-equivalence classes.

    method="representatives" compares each operation with one representative
    of every class found so far that has the same range (equivalent operations
    have equal ranges, and equivalence is transitive).  method="digraph"
    decides the minor relation for every pair with comparable ranges and takes
    strongly connected components of the resulting quasiorder digraph.
    """
    session = session or default_session()
    ops = list(ops)
    if method == "digraph":
        return _partition_digraph(ops, spec, session)
    if method != "representatives":
        raise DomainError(f"unknown partition method {method!r}")
    reps: dict[frozenset, list[tuple[int, OpTable]]] = {}
    ids = []
    next_id = 0
    for f in ops:
        bucket = reps.setdefault(range_of(f), [])
        for cid, rep in bucket:
            if are_equivalent(f, rep, spec, session):
                ids.append(cid)
                break
        else:
            bucket.append((next_id, f))
            ids.append(next_id)
            next_id += 1
    return ClassPartition(tuple(ops), tuple(ids))


def _partition_digraph(ops: list[OpTable], spec: CloneSpec, session: Session) -> ClassPartition:
    size = len(ops)
    src, dst = [], []
    ranges = [range_of(f) for f in ops]
    for i, j in itertools.permutations(range(size), 2):
        if ranges[i] <= ranges[j] and is_minor(ops[i], ops[j], spec, session) is not None:
            src.append(i)
            dst.append(j)
    graph = csr_matrix((np.ones(len(src)), (src, dst)), shape=(size, size))
    _, labels = connected_components(graph, directed=True, connection="strong")
    # renumber classes by first occurrence
    seen: dict[int, int] = {}
    ids = tuple(seen.setdefault(int(lab), len(seen)) for lab in labels)
    return ClassPartition(tuple(ops), ids)


# Restriction clones.

@dataclass
class RestrictedClone:
    """Membership in C_B, the restrictions to B of members of C that preserve B.

    Operations on B are given over {0..|B|-1}, element i standing for the
    i-th smallest element of B.
    """

    spec: CloneSpec
    subset: tuple[int, ...]
    session: Session = field(default_factory=default_session)

    def __post_init__(self):
        subset = tuple(sorted(set(self.subset)))
        if not subset or any(not 0 <= a < self.spec.k for a in subset):
            raise DomainError("B must be a nonempty subset of the domain")
        self.subset = subset

    def extension(self, fb: OpTable) -> OpTable | None:
        """A member of C preserving B whose restriction to B is fb, or None."""
        k, b = self.spec.k, len(self.subset)
        if fb.k != b:
            raise StructuralError(f"operation must live on {b} elements")
        n = fb.arity
        position = {a: i for i, a in enumerate(self.subset)}
        candidates = []
        for x in tuples_of(k, n):
            if all(a in position for a in x):
                value = self.subset[fb.value(tuple(position[a] for a in x))]
                candidates.append([(value,)])
            else:
                candidates.append([(a,) for a in range(k)])
        constraints, memberset = _search_setup(self.spec, n, self.session)
        if b < k:
            constraints = constraints + [self.session.constraint(subset_relation(k, self.subset), n)]
        counter = _Counter(self.session.budget_assignments, "assignment")
        for tables in _pointwise_search(k, n, 1, candidates, constraints, memberset, counter):
            ext = OpTable.from_array(k, n, tables[0])
            if not clone_membership(ext, self.spec, self.session) or (
                    b < k and not preserves(ext, subset_relation(k, self.subset))):
                raise AssertionError("extension failed verification")
            return ext
        return None

    def contains(self, fb: OpTable) -> bool:
        return self.extension(fb) is not None

    def members(self, n: int) -> list[OpTable]:
        """Every n-ary member of C_B, by testing all |B|**(|B|**n) tables."""
        b = len(self.subset)
        counter = _Counter(self.session.budget_tables, "table")
        counter.tick(b ** b ** n)
        if b == 1:
            return [OpTable(1, n, (0,))]
        out = []
        for table in itertools.product(range(b), repeat=b ** n):
            fb = OpTable(b, n, table)
            if self.contains(fb):
                out.append(fb)
        return out


def restrict_clone(spec: CloneSpec, subset: Iterable[int],
                   session: Session | None = None) -> RestrictedClone:
    return RestrictedClone(spec, tuple(subset), session or default_session())


# Growth of n-ary parts.

@dataclass(frozen=True)
class GrowthRow:
    n: int
    count: int
    big_clone_value: float
    meets_big_clone_value: bool
    gilbert_value: int
    meets_gilbert: bool
    affine_value: int
    within_affine: bool

    def to_json(self) -> dict:
        return {"n": self.n, "count": self.count,
                "k_pow_k_pow_n_over_n": self.big_clone_value,
                "count_ge_k_pow_k_pow_n_over_n": self.meets_big_clone_value,
                "gilbert_2_pow_binom": self.gilbert_value,
                "count_ge_gilbert": self.meets_gilbert,
                "affine_k_pow_rn_plus_1": self.affine_value,
                "count_le_affine": self.within_affine}


def _prime_power_exponent(k: int) -> int:
    for p in range(2, k + 1):
        if k % p == 0:
            r, m = 0, k
            while m % p == 0:
                m //= p
                r += 1
            return r if m == 1 else 1
    return 1


def growth_report(spec: CloneSpec, n_max: int, session: Session | None = None) -> list[GrowthRow]:
    """Exact |C^(n)| for n = 1..n_max next to the growth bounds it can be compared with.

    The columns are k**(k**n/n), 2**binom(n, n//2) and k**(r*n+1) with k = q**r.
    The flags state only whether each inequality holds at that n.
    """
    session = session or default_session()
    k = spec.k
    r = _prime_power_exponent(k)
    rows = []
    for n in range(1, n_max + 1):
        count = count_clone_ops(spec, n, session)
        big = float(k) ** (k ** n / n)
        gilbert = 2 ** math.comb(n, n // 2)
        affine = k ** (r * n + 1)
        rows.append(GrowthRow(n, count, big, count >= big, gilbert, count >= gilbert,
                              affine, count <= affine))
    return rows

