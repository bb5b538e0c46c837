"""Special operations and the infinite witness families f_n, with tuple-level checks.

Every family is an ordered list of guarded cases followed by an "otherwise"
value.  Evaluation applies the first matching case and, at the same time,
audits every other matching guard: two guards that match the same point with
different values abort with an AssertionError, since that can only be a bug
in the construction.  Guards and values are vectorized over point arrays, so
the same definition serves full tabulation and single-point evaluation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import MAX_K, OpTable, blocks_to_labels, check_domain_size, tuples_of
from .errors import BudgetExceeded, ContractViolation, DomainError
from .relations import (
    ChainE, CloneSpec, HRegularFamily, Relation, Relational, equivalence_from_blocks, in_power,
    make_central_relation, make_central_sigma, make_h_regular, make_iota, slupecki_chain,
    validate_central,
)

TABLE_CAP = 10 ** 6
PHI_BUDGET = 10 ** 6

# Special operations.


def discriminator(k: int) -> OpTable:
    """t(x, y, z) = z if x = y, else x."""
    check_domain_size(k)
    return OpTable.from_function(k, 3, lambda x, y, z: z if x == y else x)


def minority_from_chain(chain: ChainE) -> OpTable:
    """The 2/3-minority operation attached to a chain of equivalences.

    theta(a, b) is the lowest level of equality < chain < A^2 relating a and b.
    m(x, y, z) = z when x~y~z or x~y!~z, and x when x~z!~y or y~z!~x.
    """
    k = chain.k
    level = [[chain.level_of_pair(a, b) for b in range(k)] for a in range(k)]

    def m(x, y, z):
        xy, xz, yz = level[x][y], level[x][z], level[y][z]
        if xy == xz == yz or xy < xz == yz:
            return z
        if xz < xy == yz or yz < xy == xz:
            return x
        raise AssertionError(f"triple {(x, y, z)} fits none of the four cases")

    return OpTable.from_function(k, 3, m)


def relabel(f: OpTable, perm: Sequence[int]) -> OpTable:
    """The operation x -> perm(f(perm^-1(x))), i.e. f transported along perm."""
    k = f.k
    if sorted(perm) != list(range(k)):
        raise DomainError(f"{tuple(perm)} is not a permutation of {k} elements")
    inverse = np.argsort(np.asarray(perm))
    coords = inverse[_points(k, f.arity)]
    index = np.zeros(len(coords), dtype=np.int64)
    for pos in range(f.arity):
        index = index * k + coords[:, pos]
    return OpTable.from_array(k, f.arity, np.asarray(perm)[f.array[index]])


# The invariant Phi and covers of the range.


@dataclass(frozen=True)
class PhiSignature:
    """(range f, f(c, ..., c), o_class); o_class is 0 when a box of proper sets around c covers the range."""

    range: frozenset[int]
    value_at_zero: int
    o_class: int

    def __post_init__(self):
        if self.value_at_zero not in self.range:
            raise ContractViolation("f(c, ..., c) must lie in the range")
        if self.o_class not in (0, 1):
            raise DomainError("o_class is 0 or 1")

    def to_json(self) -> dict:
        return {"range": sorted(self.range), "value_at_zero": self.value_at_zero,
                "o_class": self.o_class}


def _box_values(f: OpTable, sets: Sequence[Iterable[int]]) -> set[int]:
    cube = f.array.reshape((f.k,) * f.arity)
    sub = cube[np.ix_(*[sorted(s) for s in sets])]
    return set(np.unique(sub).tolist())


def phi_signature(f: OpTable, c: int = 0, budget: int = PHI_BUDGET) -> PhiSignature:
    """The signature of f relative to the central element c.

    o_class = 0 iff f[C_1 x ... x C_n] = range f for some sets with c in C_i != A.
    Enlarging a C_i keeps a covering box covering, so it suffices to try the
    maximal choices C_i = A minus {a_i} with a_i != c.
    """
    k, n = f.k, f.arity
    if k < 3:
        raise DomainError("the signature is defined for k >= 3")
    if not 0 <= c < k:
        raise DomainError(f"{c} is not an element")
    target = set(f.table)
    others = [a for a in range(k) if a != c]
    if len(others) ** n > budget:
        raise BudgetExceeded(f"{len(others)}**{n} boxes exceed the budget {budget}")
    o_class = 1
    for removed in itertools.product(others, repeat=n):
        sets = [[a for a in range(k) if a != r] for r in removed]
        if _box_values(f, sets) == target:
            o_class = 0
            break
    return PhiSignature(frozenset(target), f.value((c,) * n), o_class)


def jablonskii_cover(f: OpTable) -> tuple[frozenset[int], ...] | None:
    """Sets D_1..D_n with every |D_i| < |range f| and f[D_1 x ... x D_n] = range f, or None.

    Only maximal candidates (size |range f| - 1) are tried; enlarging a set
    keeps a cover a cover.
    """
    k, n = f.k, f.arity
    target = set(f.table)
    size = len(target) - 1
    if size < 1:
        return None
    choices = [frozenset(s) for s in itertools.combinations(range(k), min(size, k))]
    for sets in itertools.product(choices, repeat=n):
        if _box_values(f, sets) == target:
            return tuple(sets)
    return None


# Witness families.

FAMILY_TAGS = ("CentralR", "SlupeckiBk2", "HRegMulti", "HRegSingle", "SlupCentral",
               "SlupSubset", "SlupEqrel", "Centralk1Subset1", "Centralk1Subset2",
               "Centralk1Eqrel", "Centralk1Central", "Centralk1Perm")


@dataclass(frozen=True)
class FamilySpec:
    """One member f_n of a witness family.

    Parameters unused by a family must be left as None; missing ones take the
    family's normalized default (see resolve_spec).
      r        CentralR relation arity, SlupSubset |B|, HRegMulti family size
      h        block count for HRegMulti and HRegSingle
      blocks   the equivalence for HRegSingle, SlupEqrel and Centralk1Eqrel
      subset   B for Centralk1Subset1/2
      perm     gamma for Centralk1Perm
      relation rho for CentralR
    """

    family: str
    k: int
    n: int
    r: int | None = None
    h: int | None = None
    blocks: tuple[tuple[int, ...], ...] | None = None
    subset: tuple[int, ...] | None = None
    perm: tuple[int, ...] | None = None
    relation: Relation | None = None

    def to_json(self) -> dict:
        data: dict = {"family": self.family, "k": self.k, "n": self.n}
        for name in ("r", "h"):
            if getattr(self, name) is not None:
                data[name] = getattr(self, name)
        if self.blocks is not None:
            data["blocks"] = [list(b) for b in self.blocks]
        if self.subset is not None:
            data["subset"] = list(self.subset)
        if self.perm is not None:
            data["perm"] = list(self.perm)
        if self.relation is not None:
            data["relation"] = self.relation.to_json()
        return data


def _points(k: int, n: int) -> np.ndarray:
    return np.indices((k,) * n, dtype=np.int64).reshape(n, -1).T


@dataclass(frozen=True)
class _Case:
    name: str
    guard: Callable[[np.ndarray], np.ndarray]
    value: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FamilyFunction:
    """An executable f_n: ordered cases, the otherwise value, and its special tuples.

    expected lists (tuple, value) pairs the construction must reproduce;
    sparse means every point outside the special tuples takes the otherwise value.
    """

    spec: FamilySpec
    arity: int
    cases: tuple[_Case, ...]
    otherwise: Callable[[np.ndarray], np.ndarray]
    expected: tuple[tuple[tuple[int, ...], int], ...]
    sparse: bool
    data: dict = field(default_factory=dict, compare=False)

    @property
    def k(self) -> int:
        return self.spec.k

    def evaluate(self, points) -> np.ndarray:
        """Values at the rows of points, auditing every overlap of guards."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.int64))
        if pts.shape[1] != self.arity:
            raise DomainError(f"expected points of length {self.arity}")
        if pts.size and (pts.min() < 0 or pts.max() >= self.k):
            raise DomainError("point entries must be domain elements")
        out = np.asarray(self.otherwise(pts), dtype=np.int64).copy()
        decided = np.zeros(len(pts), dtype=bool)
        for case in self.cases:
            mask = np.asarray(case.guard(pts), dtype=bool)
            if not mask.any():
                continue
            vals = np.asarray(case.value(pts[mask]), dtype=np.int64)
            earlier = decided[mask]
            if np.any(out[mask][earlier] != vals[earlier]):
                raise AssertionError(
                    f"case {case.name!r} overlaps an earlier case with a different value")
            target = np.flatnonzero(mask)[~earlier]
            out[target] = vals[~earlier]
            decided |= mask
        return out

    def value(self, point: Sequence[int]) -> int:
        return int(self.evaluate([tuple(point)])[0])

    @property
    def table_size(self) -> int:
        return self.k ** self.arity

    def full_values(self) -> np.ndarray:
        """Values at every point in index order; raises BudgetExceeded above TABLE_CAP."""
        if self.table_size > TABLE_CAP:
            raise BudgetExceeded(
                f"{self.k}**{self.arity} points exceed the tabulation cap {TABLE_CAP}")
        return self.evaluate(_points(self.k, self.arity))

    def table(self) -> OpTable:
        if self.k > MAX_K:
            raise DomainError(
                f"k={self.k} is beyond table support; evaluate points with family_function")
        return OpTable.from_array(self.k, self.arity, self.full_values())


def _match_any(targets: Sequence[Sequence[int]]) -> Callable[[np.ndarray], np.ndarray]:
    rows = np.asarray(targets, dtype=np.int64).reshape(len(targets), -1)

    def guard(pts: np.ndarray) -> np.ndarray:
        mask = np.zeros(len(pts), dtype=bool)
        for row in rows:
            mask |= np.all(pts == row, axis=1)
        return mask
    return guard


def _constant_rows(values: Iterable[int]) -> Callable[[np.ndarray], np.ndarray]:
    allowed = np.asarray(sorted(values), dtype=np.int64)

    def guard(pts: np.ndarray) -> np.ndarray:
        same = np.all(pts == pts[:, :1], axis=1)
        return same & np.isin(pts[:, 0], allowed)
    return guard


def _const(v: int) -> Callable[[np.ndarray], np.ndarray]:
    return lambda pts: np.full(len(pts), v, dtype=np.int64)


def _first(pts: np.ndarray) -> np.ndarray:
    return pts[:, 0].copy()


def _related_to(target: Sequence[int], labels: np.ndarray, strict: bool):
    """Rows related to target coordinatewise under labels; strict excludes target itself."""
    row = np.asarray(target, dtype=np.int64)
    lab_row = labels[row]

    def guard(pts: np.ndarray) -> np.ndarray:
        mask = np.all(labels[pts] == lab_row, axis=1)
        if strict:
            mask &= ~np.all(pts == row, axis=1)
        return mask
    return guard


# Tuples used by the constructions.


def e_tuple(i: int, n: int) -> tuple[int, ...]:
    """(1, ..., 1, 0, 2, 0, 1, ..., 1) of length n with the 2 at position i (2 <= i <= n-1)."""
    if n < 3 or not 2 <= i <= n - 1:
        raise DomainError(f"need 2 <= i <= n-1 and n >= 3, got i={i}, n={n}")
    t = [1] * n
    t[i - 2], t[i - 1], t[i] = 0, 2, 0
    return tuple(t)


def rotation_tuple(a: int, k: int, n: int) -> tuple[int, ...]:
    """(a, a+1, ..., a-1) mod k, padded to length n >= k with its last entry."""
    if n < k:
        raise DomainError("rotation tuples need n >= k")
    head = [(a + j) % k for j in range(k)]
    return tuple(head + [head[-1]] * (n - k))


def block_rotation_tuple(a: int, k: int, n: int) -> tuple[int, ...]:
    """k constant blocks of length n with values a, a+1, ..., a-1 (mod k)."""
    return tuple((a + j) % k for j in range(k) for _ in range(n))


def check_e_tuple_iff(k: int, n: int) -> bool:
    """(e_i, e_j, 3..k-1 constants) lies in sigma_0^n exactly when j - i <= 1, for 2 <= i <= j <= n-1."""
    sigma = make_central_sigma(k, 0)
    consts = [(b,) * n for b in range(3, k)]
    for i in range(2, n):
        for j in range(i, n):
            inside = in_power(sigma, [e_tuple(i, n), e_tuple(j, n)] + consts)
            if inside != (j - i <= 1):
                return False
    return True


# Family construction.


def _min_n(family: str, k: int) -> int:
    if family in ("CentralR", "SlupeckiBk2", "HRegMulti", "HRegSingle"):
        return 2
    if family in ("SlupCentral", "SlupEqrel"):
        return 1
    if family == "SlupSubset":
        return k
    if family == "Centralk1Perm" and k == 3:
        return 7
    if family == "Centralk1Central":
        # excluding h(c_1) = c_2 reads the second entry of e_{n-1}, which is 1 only for n >= 5
        return 5
    return 4


def family_min_n(family: str, k: int) -> int:
    """Least family index n for which f_n is defined."""
    if family not in FAMILY_TAGS:
        raise DomainError(f"unknown family {family!r}")
    return _min_n(family, k)


def _interval_blocks(blocks) -> bool:
    flat = [a for b in blocks for a in b]
    return flat == sorted(flat) and all(list(b) == list(range(b[0], b[-1] + 1)) for b in blocks)


def _norm_blocks(k: int, blocks) -> tuple[tuple[int, ...], ...]:
    blocks = tuple(tuple(sorted(b)) for b in blocks)
    blocks_to_labels(k, blocks)
    return tuple(sorted(blocks))


def _hreg_multi_data(k: int, h: int, r: int) -> dict:
    size = h ** r
    codes = np.minimum(np.arange(k), size - 1)
    digits = np.stack([(codes // h ** (r - 1 - i)) % h for i in range(r)], axis=1)
    t = [int(u * (size - 1) // (h - 1)) for u in range(h)]
    reps = [int(np.flatnonzero(codes == c)[0]) for c in range(size)]
    extra = [a for a in reps if a not in t]
    o, e = extra[0], extra[1]
    return {"theta": codes.astype(np.int64), "thetas": digits.astype(np.int64),
            "t": tuple(t), "o": o, "e": e,
            "transversal": tuple([o, e] + t + extra[2:])}


def resolve_spec(spec: FamilySpec) -> FamilySpec:
    """Validate the parameters and fill in the normalized defaults."""
    fam, k, n = spec.family, spec.k, spec.n
    if fam not in FAMILY_TAGS:
        raise DomainError(f"unknown family {fam!r}; expected one of {', '.join(FAMILY_TAGS)}")
    if fam == "HRegMulti":
        if not isinstance(k, int) or k < 2:
            raise DomainError("bad domain size")
    else:
        check_domain_size(k)
    if not isinstance(n, int) or n < _min_n(fam, k):
        raise DomainError(f"{fam} is defined for n >= {_min_n(fam, k)}, got {n}")
    used = {"CentralR": {"r", "relation"}, "SlupSubset": {"r"}, "HRegMulti": {"h", "r"},
            "HRegSingle": {"h", "blocks"}, "SlupEqrel": {"blocks"},
            "Centralk1Eqrel": {"blocks"}, "Centralk1Subset1": {"subset"},
            "Centralk1Subset2": {"subset"}, "Centralk1Perm": {"perm"}}.get(fam, set())
    for name in ("r", "h", "blocks", "subset", "perm", "relation"):
        if name not in used and getattr(spec, name) is not None:
            raise DomainError(f"{fam} takes no parameter {name!r}")

    if fam == "CentralR":
        if k < 4:
            raise DomainError("CentralR needs k >= 4")
        r = spec.r if spec.r is not None else 2
        if not 2 <= r <= k - 2:
            raise DomainError("CentralR needs 2 <= r <= k-2")
        rho = spec.relation if spec.relation is not None else make_central_relation(k, 0, r)
        if rho.k != k or rho.arity != r:
            raise DomainError("the relation must be r-ary on the domain")
        check = validate_central(rho)
        if not check.is_central or 0 not in check.centers:
            raise ContractViolation("the relation must be central with central element 0")
        if tuple(range(1, r + 1)) in rho:
            raise ContractViolation("the normalization needs (1, ..., r) outside the relation")
        return replace(spec, r=r, relation=rho)
    if fam == "SlupeckiBk2":
        if k < 4:
            raise DomainError("SlupeckiBk2 needs k > 3")
        return spec
    if fam == "HRegMulti":
        h = spec.h if spec.h is not None else 3
        r = spec.r if spec.r is not None else 2
        if h < 3 or r < 2:
            raise DomainError("HRegMulti needs h >= 3 and r >= 2")
        if k < h ** r:
            raise DomainError(f"HRegMulti needs k >= h**r = {h ** r}")
        return replace(spec, h=h, r=r)
    if fam == "HRegSingle":
        if k < 4:
            raise DomainError("HRegSingle needs k >= 4")
        if spec.blocks is None:
            h = spec.h if spec.h is not None else 3
            if not 3 <= h <= k - 1:
                raise DomainError("HRegSingle needs 3 <= h <= k-1")
            blocks = ((0, 1),) + tuple((b,) for b in range(2, h)) + (tuple(range(h, k)),)
        else:
            blocks = _norm_blocks(k, spec.blocks)
        h = len(blocks)
        if spec.h is not None and spec.h != h:
            raise DomainError("h must equal the number of blocks")
        labels = blocks_to_labels(k, blocks)
        if h < 3 or h == k:
            raise ContractViolation("theta needs at least 3 blocks and must not be equality")
        if len({labels[u] for u in range(1, h + 1)}) != h:
            raise ContractViolation("the normalization needs {1..h} to be a transversal")
        if labels[0] != labels[1]:
            raise ContractViolation("the normalization needs 0 and 1 in the same block")
        return replace(spec, h=h, blocks=_norm_blocks(k, blocks))
    if fam == "SlupCentral":
        if k < 3:
            raise DomainError("SlupCentral needs k >= 3")
        return spec
    if fam == "SlupSubset":
        if k < 3:
            raise DomainError("SlupSubset needs k >= 3")
        r = spec.r if spec.r is not None else 2
        if not 2 <= r < k:
            raise DomainError("SlupSubset needs 2 <= |B| < k")
        return replace(spec, r=r)
    if fam == "SlupEqrel":
        if k < 3:
            raise DomainError("SlupEqrel needs k >= 3")
        blocks = spec.blocks or ((0, 1), tuple(range(2, k)))
        blocks = _norm_blocks(k, blocks)
        if not _interval_blocks(blocks):
            raise ContractViolation("the normalization needs blocks that are intervals")
        if len(blocks) < 2 or 1 not in blocks[0]:
            raise ContractViolation("epsilon must be nontrivial with 0 and 1 related")
        return replace(spec, blocks=blocks)
    if fam == "Centralk1Eqrel":
        blocks = _norm_blocks(k, spec.blocks or ((0, 1), tuple(range(2, k))))
        labels = blocks_to_labels(k, blocks)
        if len(blocks) in (1, k):
            raise ContractViolation("epsilon must be nontrivial")
        if labels[0] == labels[2]:
            raise ContractViolation("the normalization needs (0, 2) outside epsilon")
        if labels.count(labels[0]) == 1 and labels.count(labels[2]) == 1:
            raise ContractViolation("the block of 0 or the block of 2 must have two elements")
        return replace(spec, blocks=blocks)
    if fam == "Centralk1Subset1":
        subset = tuple(sorted(set(spec.subset if spec.subset is not None else (0, 1))))
        if not {0, 1} <= set(subset) or 2 in subset or len(subset) >= k:
            raise ContractViolation("the normalization needs 0, 1 in B, 2 outside B, B proper")
        return replace(spec, subset=subset)
    if fam == "Centralk1Subset2":
        subset = tuple(sorted(set(spec.subset if spec.subset is not None else (2,))))
        if 0 in subset or 2 not in subset or any(not 0 <= a < k for a in subset):
            raise ContractViolation("the normalization needs 2 in B and 0 outside B")
        return replace(spec, subset=subset)
    if fam == "Centralk1Perm":
        if spec.perm is None:
            perm = (0, 2, 1) if k == 3 else (0,) + tuple(range(2, k)) + (1,)
        else:
            perm = tuple(spec.perm)
        if sorted(perm) != list(range(k)):
            raise DomainError("gamma must be a permutation of the domain")
        if [a for a in range(k) if perm[a] == a] != [0]:
            raise ContractViolation("the normalization needs 0 as the only fixed point")
        if k >= 4 and perm[2] != 3:
            raise ContractViolation("the normalization needs gamma(2) = 3")
        return replace(spec, perm=perm)
    return spec


def _schema(spec: FamilySpec, cs: list[tuple[int, ...]], l: int, data: dict) -> FamilyFunction:
    """The operation: 1 on c_i (i < n-l), 2 on c_{n-l}, b on b-constants (b >= 3), else 0."""
    k, n = spec.k, spec.n
    ones, two = cs[:n - l - 1], cs[n - l - 1]
    cases = (
        _Case("c_i, i < n-l", _match_any(ones), _const(1)),
        _Case("c_{n-l}", _match_any([two]), _const(2)),
    )
    expected = [(c, 1) for c in ones] + [(two, 2)]
    if k > 3:
        cases += (_Case("constant b >= 3", _constant_rows(range(3, k)), _first),)
        expected += [((b,) * n, b) for b in range(3, k)]
    data = dict(data, c=tuple(cs), l=l)
    return FamilyFunction(spec, n, cases, _const(0), tuple(expected), True, data)


def _subset2_tuples(n: int) -> list[tuple[int, ...]]:
    return [(2,) * n, (2,) + (0,) * (n - 1)] + [e_tuple(i - 1, n) for i in range(3, n + 1)]


def family_function(spec: FamilySpec) -> FamilyFunction:
    """The executable case definition of f_n for the given family member."""
    spec = resolve_spec(spec)
    fam, k, n = spec.family, spec.k, spec.n

    if fam == "CentralR":
        r = spec.r
        a = [tuple(1 if j in (2 * i - 2, 2 * i - 1) else 0 for j in range(2 * n))
             for i in range(1, n + 1)]
        b = [tuple(0 if j in (2 * i - 2, 2 * i - 1) else (1 if j % 2 == 0 else 2)
                   for j in range(2 * n)) for i in range(1, n + 1)]
        c = [tuple((2 if j == 2 * i - 2 else 1) if j in (2 * i - 2, 2 * i - 1) else 0
                   for j in range(2 * n)) for i in range(1, n + 1)]
        cases = [_Case("a_i", _match_any(a), _const(0)),
                 _Case("b_i", _match_any(b), _const(1)),
                 _Case("c_i", _match_any(c), _const(2))]
        expected = [(t, 0) for t in a] + [(t, 1) for t in b] + [(t, 2) for t in c]
        if r >= 3:
            cases.append(_Case("constant u, 3 <= u <= r", _constant_rows(range(3, r + 1)), _first))
            expected += [((u,) * (2 * n), u) for u in range(3, r + 1)]
        return FamilyFunction(spec, 2 * n, tuple(cases), _const(r + 1), tuple(expected), True,
                              {"a": a, "b": b, "c": c, "rho": spec.relation})

    if fam == "SlupeckiBk2":
        u = [tuple(1 if j == i else k - 1 for j in range(n)) for i in range(n)]
        cases = (_Case("constant l, 1 <= l <= k-2", _constant_rows(range(1, k - 1)), _first),
                 _Case("u_i", _match_any(u), _const(k - 1)))
        expected = [((l,) * n, l) for l in range(1, k - 1)] + [(t, k - 1) for t in u]
        return FamilyFunction(spec, n, cases, _const(0), tuple(expected), True, {"u": u})

    if fam in ("HRegMulti", "HRegSingle"):
        if fam == "HRegMulti":
            data = _hreg_multi_data(k, spec.h, spec.r)
            labels, e, o = data["theta"], data["e"], data["o"]
            expected = [((t,) * n, t) for t in data["t"]]
        else:
            labels = np.asarray(blocks_to_labels(k, spec.blocks), dtype=np.int64)
            e, o = 1, 0
            data = {"theta": labels, "e": 1, "o": 0}
            v = [tuple(2 if j == i else 1 for j in range(n)) for i in range(n)]
            data["v"] = v
            expected = [((u,) * n, u) for u in range(2, spec.h + 1)] + [(t, 1) for t in v]

        def all_related_off_e(pts, labels=labels, e=e):
            lab = labels[pts]
            return np.all(lab == lab[:, :1], axis=1) & (lab[:, 0] != labels[e])

        def all_but_one_e(pts, labels=labels, e=e):
            return np.sum(labels[pts] == labels[e], axis=1) == pts.shape[1] - 1

        cases = (_Case("all related, first not related to e", all_related_off_e, _first),
                 _Case("exactly n-1 entries related to e", all_but_one_e, _const(e)))
        return FamilyFunction(spec, n, cases, _const(o), tuple(expected), False, data)

    if fam == "SlupCentral":
        cases = (_Case("constant u >= 1", _constant_rows(range(1, k)), _first),)
        expected = tuple(((u,) * n, u) for u in range(1, k))
        return FamilyFunction(spec, n, cases, _const(0), expected, True, {})

    if fam == "SlupSubset":
        r = spec.r
        es = [rotation_tuple(a, k, n) for a in range(k)]
        e1 = np.asarray(es[1], dtype=np.int64)

        def in_b(pts):
            return np.all(pts < r, axis=1)

        def first_one(pts):
            return (pts[:, 0] == 1) & ~in_b(pts) & ~np.all(pts == e1, axis=1)

        cases = (_Case("inside B^n", in_b, _first),
                 _Case("constant a >= r", _constant_rows(range(r, k)), _first),
                 _Case("first entry 1, outside B^n, not e_1", first_one, _const(1)),
                 _Case("e_a with a != 1", _match_any([es[a] for a in range(k) if a != 1]),
                       _const(1)))
        expected = ([((a,) * n, a) for a in range(k)]
                    + [(es[a], 1) for a in range(k) if a != 1] + [(es[1], 0)])
        return FamilyFunction(spec, n, cases, _const(0), tuple(expected), False,
                              {"e": es, "B": tuple(range(r))})

    if fam == "SlupEqrel":
        labels = np.asarray(blocks_to_labels(k, spec.blocks), dtype=np.int64)
        es = [block_rotation_tuple(a, k, n) for a in range(k)]
        cases = [_Case("e_a", _match_any(es), _first)]
        for a in range(k):
            cases.append(_Case(f"related to e_{a}, not equal",
                               _related_to(es[a], labels, strict=True), _const((a + 1) % k)))
        expected = [(es[a], a) for a in range(k)]
        for a in range(k):
            for ell in range(n):
                expected.append((bumped_zero(es[a], ell), (a + 1) % k))
        return FamilyFunction(spec, k * n, tuple(cases), _const(0), tuple(expected), False,
                              {"e": es, "theta": labels})

    if fam == "Centralk1Subset1":
        cs = [(0, 0) + (1,) * (n - 2)] + [e_tuple(i, n) for i in range(2, n)]
        return _schema(spec, cs, 1, {"B": spec.subset})
    if fam == "Centralk1Subset2":
        return _schema(spec, _subset2_tuples(n), 0, {"B": spec.subset})
    if fam == "Centralk1Central":
        return _schema(spec, _subset2_tuples(n), 0, {})
    if fam == "Centralk1Perm":
        cs = _subset2_tuples(n)
        if k == 3:
            cs[0] = (2,) * (n - 3) + (0, 1, 0)
        return _schema(spec, cs, 0, {"gamma": spec.perm})

    assert fam == "Centralk1Eqrel"
    labels = np.asarray(blocks_to_labels(k, spec.blocks), dtype=np.int64)
    es = {i: e_tuple(i, n) for i in range(2, n)}
    middle = [es[i] for i in range(3, n - 1)]
    cases = [_Case("e_2", _match_any([es[2]]), _const(1)),
             _Case("class of e_2, not e_2", _related_to(es[2], labels, True), _const(2))]
    if middle:
        cases.append(_Case("e_i, 2 < i < n-1", _match_any(middle), _const(1)))
        for i in range(3, n - 1):
            cases.append(_Case(f"class of e_{i}, not e_{i}", _related_to(es[i], labels, True),
                               _const(0)))
    cases += [_Case("e_{n-1}", _match_any([es[n - 1]]), _const(2)),
              _Case("class of e_{n-1}, not e_{n-1}", _related_to(es[n - 1], labels, True),
                    _const(0))]
    expected = [(es[2], 1)] + [(t, 1) for t in middle] + [(es[n - 1], 2)]
    if k > 3:
        cases.append(_Case("constant b >= 3", _constant_rows(range(3, k)), _first))
        expected += [((b,) * n, b) for b in range(3, k)]
    return FamilyFunction(spec, n, tuple(cases), _const(0), tuple(expected), False,
                          {"e": es, "theta": labels})


def bumped_zero(t: Sequence[int], ell: int) -> tuple[int, ...]:
    """t with its ell-th zero (counting from 0) replaced by 1."""
    zeros = [j for j, a in enumerate(t) if a == 0]
    out = list(t)
    out[zeros[ell]] = 1
    return tuple(out)


def witness_family(spec: FamilySpec) -> OpTable:
    """The table of f_n (needs k <= 6 and k**arity within TABLE_CAP)."""
    return family_function(spec).table()


def family_clone(spec: FamilySpec) -> CloneSpec | None:
    """The clone whose equivalence the family separates, or None when k exceeds MAX_K."""
    spec = resolve_spec(spec)
    fam, k = spec.family, spec.k
    if k > MAX_K:
        return None
    sigma = make_central_sigma(k, 0) if k >= 3 else None
    if fam == "CentralR":
        return Relational(k, (spec.relation,))
    if fam == "SlupeckiBk2":
        return slupecki_chain(k, k - 2)
    if fam == "HRegSingle":
        family = HRegularFamily.from_partitions(k, spec.h, [spec.blocks])
        return Relational(k, (make_h_regular(family),))
    if fam == "SlupCentral":
        return Relational(k, (sigma, make_iota(k)))
    if fam == "SlupSubset":
        return Relational(k, (make_iota(k),), subsets=(frozenset(range(spec.r)),))
    if fam == "SlupEqrel":
        return Relational(k, (equivalence_from_blocks(k, spec.blocks), make_iota(k)))
    if fam in ("Centralk1Subset1", "Centralk1Subset2"):
        return Relational(k, (sigma,), subsets=(frozenset(spec.subset),))
    if fam == "Centralk1Eqrel":
        return Relational(k, (sigma, equivalence_from_blocks(k, spec.blocks)))
    if fam == "Centralk1Central":
        return Relational(k, (sigma, make_central_sigma(k, 2)))
    if fam == "Centralk1Perm":
        return Relational(k, (sigma,), permutations=(OpTable(k, 1, spec.perm),))
    raise AssertionError(f"no clone recorded for {fam}")


# Sanity checks.


@dataclass(frozen=True)
class Claim:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class SanityReport:
    spec: FamilySpec
    claims: tuple[Claim, ...]
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.claims)

    def failures(self) -> list[Claim]:
        return [c for c in self.claims if not c.passed]

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "ok": self.ok,
                "claims": [c.to_json() for c in self.claims], "notes": list(self.notes)}


def _dependence_gaps(ff: FamilyFunction, values: np.ndarray | None) -> list[int]:
    """Positions for which no pair of points differing only there has different values.

    Witness pairs are first sought around the special tuples; the full table,
    when available, settles the remaining positions exactly.
    """
    k, n = ff.k, ff.arity
    covered = set()
    for point, _ in ff.expected:
        base = ff.value(point)
        for i in range(n):
            if i in covered:
                continue
            variants = [point[:i] + (b,) + point[i + 1:] for b in range(k) if b != point[i]]
            if np.any(ff.evaluate(variants) != base):
                covered.add(i)
    gaps = [i for i in range(n) if i not in covered]
    if gaps and values is not None:
        cube = values.reshape((k,) * n)
        gaps = [i for i in gaps if not np.any(np.diff(cube, axis=i) != 0)]
    return [i + 1 for i in gaps]


def _quotient(values: np.ndarray, labels: np.ndarray, k: int, n: int) -> np.ndarray | None:
    """The quotient table over the blocks, or None if the blocks are not preserved."""
    b = int(labels.max()) + 1
    pts = _points(k, n)
    index = np.zeros(len(pts), dtype=np.int64)
    for pos in range(n):
        index = index * b + labels[pts[:, pos]]
    image = labels[values]
    out = np.full(b ** n, -1, dtype=np.int64)
    out[index] = image
    if np.any(out[index] != image):
        return None
    return out


def _is_symmetric(cube: np.ndarray) -> bool:
    n = cube.ndim
    if n < 2:
        return True
    swap = list(range(n))
    swap[0], swap[1] = 1, 0
    cycle = list(range(1, n)) + [0]
    return bool(np.array_equal(cube, cube.transpose(swap))
                and np.array_equal(cube, cube.transpose(cycle)))


def family_sanity(spec: FamilySpec) -> SanityReport:
    """Machine-check the tuple-level facts that the inequivalence argument for f_n uses."""
    ff = family_function(spec)
    spec = ff.spec
    fam, k, n = spec.family, spec.k, spec.n
    claims: list[Claim] = []
    notes: list[str] = []

    def claim(name: str, ok, detail: str = "") -> None:
        claims.append(Claim(name, bool(ok), detail))

    values = None
    if ff.table_size <= TABLE_CAP:
        try:
            values = ff.full_values()
            claim("cases consistent on every point", True, f"{ff.table_size} points")
        except AssertionError as exc:
            claim("cases consistent on every point", False, str(exc))
    else:
        notes.append(f"{k}**{ff.arity} points exceed the tabulation cap; checks use special tuples")
        try:
            ff.evaluate([p for p, _ in ff.expected])
            claim("cases consistent on special tuples", True)
        except AssertionError as exc:
            claim("cases consistent on special tuples", False, str(exc))

    got = [ff.value(p) for p, _ in ff.expected]
    bad = [(p, v, g) for (p, v), g in zip(ff.expected, got) if v != g]
    claim("special tuples take their listed values", not bad,
          "" if not bad else f"first mismatch {bad[0]}")

    if ff.sparse:
        points = [p for p, _ in ff.expected]
        claim("special tuples are pairwise distinct", len(set(points)) == len(points))
        if values is not None:
            listed: dict[int, set] = {}
            for p, v in ff.expected:
                listed.setdefault(v, set()).add(p)
            default = int(ff.otherwise(np.zeros((1, ff.arity), dtype=np.int64))[0])
            ok = True
            for v in range(k):
                pre = set(map(tuple, _points(k, ff.arity)[values == v].tolist()))
                if v == default:
                    ok &= not (pre & set(points))
                else:
                    ok &= pre == listed.get(v, set())
            claim("each non-default value has exactly the listed preimages", ok)

    dependence_claimed = fam in ("SlupeckiBk2", "SlupCentral", "SlupSubset", "SlupEqrel",
                                 "HRegSingle", "HRegMulti")
    if dependence_claimed:
        gaps = _dependence_gaps(ff, values)
        claim("f_n depends on all of its variables", not gaps,
              "" if not gaps else f"no witness pair for positions {gaps}")

    checker = _SANITY.get(fam)
    if checker is not None:
        checker(ff, values, claim, notes)
    return SanityReport(spec, tuple(claims), tuple(notes))


def _check_central_r(ff, values, claim, notes):
    n, r, rho = ff.spec.n, ff.spec.r, ff.data["rho"]
    a, b, c = ff.data["a"], ff.data["b"], ff.data["c"]
    rest = [(u,) * (2 * n) for u in range(3, r + 1)]

    def inside(x, y):
        return in_power(rho, [x, y] + rest)

    idx = range(n)
    claim("(a_p, b_p, 3..r) in rho^2n for all p", all(inside(a[p], b[p]) for p in idx))
    claim("(c_p, b_p, 3..r) in rho^2n for all p", all(inside(c[p], b[p]) for p in idx))
    claim("(a_p, c_q, 3..r) in rho^2n for p != q",
          all(inside(a[p], c[q]) for p in idx for q in idx if p != q))
    claim("(a_s, b_j, 3..r) not in rho^2n for j != s",
          not any(inside(a[s], b[j]) for s in idx for j in idx if j != s))
    claim("(c_j, b_s, 3..r) not in rho^2n for j != s",
          not any(inside(c[j], b[s]) for s in idx for j in idx if j != s))
    claim("(a_s, c_s, 3..r) not in rho^2n", not any(inside(a[s], c[s]) for s in idx))


def _check_hreg(ff, values, claim, notes):
    spec = ff.spec
    k, n = spec.k, spec.n
    labels = ff.data["theta"]
    if spec.family == "HRegMulti":
        h, r = spec.h, spec.r
        digits = ff.data["thetas"]
        t = ff.data["t"]
        claim("phi is onto {1..h}^r",
              len({tuple(row) for row in digits.tolist()}) == h ** r)
        claim("t_1..t_h is a transversal of every theta_i",
              all(len({int(digits[x, i]) for x in t}) == h for i in range(r)))
        trans = ff.data["transversal"]
        claim("o, e, t_1, ..., t_s is a transversal of theta",
              len(trans) == h ** r and len({int(labels[x]) for x in trans}) == h ** r)
    else:
        h = spec.h
        claim("1..h is a transversal of theta", len({int(labels[u]) for u in range(1, h + 1)}) == h)
        claim("0 and 1 lie in one block", labels[0] == labels[1])
    if values is None:
        notes.append("quotient checks skipped: table beyond the cap")
        return
    quotient = _quotient(values, labels, k, n)
    claim("f_n preserves theta", quotient is not None)
    if quotient is not None:
        b = int(labels.max()) + 1
        cube = quotient.reshape((b,) * n)
        claim("the quotient of f_n is symmetric", _is_symmetric(cube))
        claim("the quotient of f_n depends on all variables",
              all(np.any(np.diff(cube, axis=i) != 0) for i in range(n)))


def _check_slup_central(ff, values, claim, notes):
    k, n = ff.spec.k, ff.spec.n
    sigma = make_central_sigma(k, 0)
    ok_in = True
    ok_out = True
    vectors = tuples_of(k, n) if k ** n <= 10 ** 5 else [
        tuple(v if j == i else 0 for j in range(n)) for i in range(n) for v in range(1, k)]
    for vec in vectors:
        nonzero = [x for x in vec if x != 0]
        if not nonzero:
            continue
        slot = nonzero[0]
        rows = [(u,) * n for u in range(1, k)]
        base = rows.copy()
        base[slot - 1] = (0,) * n
        ok_in &= in_power(sigma, base)
        rows[slot - 1] = tuple(vec)
        ok_out &= not in_power(sigma, rows)
    claim("(1..b-1, 0, b+1..k-1 constants) in sigma_0^n", ok_in)
    claim("replacing the 0-constant by a tuple with an entry b leaves sigma_0^n", ok_out,
          f"{len(vectors)} replacement tuples")


def _check_slup_subset(ff, values, claim, notes):
    k, n, r = ff.spec.k, ff.spec.n, ff.spec.r
    es = ff.data["e"]
    claim("no e_a lies in B^n", all(max(e) >= r for e in es))
    claim("the e_a exhaust A at every position",
          all({e[i] for e in es} == set(range(k)) for i in range(n)))
    top = (k - 1,) * n
    claim("f(k-1, ..., k-1) = k-1 and changing any entry to 0 gives 0",
          ff.value(top) == k - 1
          and all(ff.value(top[:i] + (0,) + top[i + 1:]) == 0 for i in range(n)))
    if values is None:
        notes.append("preimage uniqueness skipped: table beyond the cap")
        return
    pts = _points(k, n)
    for a in range(k):
        if a == 1:
            continue
        rows = pts[(pts[:, 0] == a) & (values == 1)]
        claim(f"e_{a} is the only tuple with first entry {a} and value 1",
              len(rows) == 1 and tuple(rows[0]) == es[a])
    rows = pts[(pts[:, 0] == 1) & (values == 0)]
    claim("e_1 is the only tuple with first entry 1 and value 0",
          len(rows) == 1 and tuple(rows[0]) == es[1])
    for a in range(r, k):
        rows = pts[values == a]
        claim(f"the constant tuple is the only preimage of {a}",
              len(rows) == 1 and tuple(rows[0]) == (a,) * n)
    in_b = np.all(pts < r, axis=1)
    claim("f_n restricted to B^n is the first projection",
          bool(np.array_equal(values[in_b], pts[in_b, 0])))


def _check_slup_eqrel(ff, values, claim, notes):
    k, n = ff.spec.k, ff.spec.n
    labels = ff.data["theta"]
    es = ff.data["e"]

    def related(x, y):
        return all(labels[p] == labels[q] for p, q in zip(x, y))

    claim("(e_a, e_b) not in epsilon^kn for a != b",
          not any(related(es[a], es[b]) for a in range(k) for b in range(k) if a != b))
    bumps = [(a, ell, bumped_zero(es[a], ell)) for a in range(k) for ell in range(n)]
    claim("replacing a 0 of e_a by 1 gives a distinct epsilon-related tuple",
          all(related(es[a], t) and t != es[a] for a, _, t in bumps))
    positions = set()
    for a, _, t in bumps:
        diff = [j for j in range(k * n) if t[j] != es[a][j]]
        if len(diff) == 1 and ff.value(t) != ff.value(es[a]):
            positions.add(diff[0])
    claim("every position has a one-entry change of some e_a that changes the value",
          positions == set(range(k * n)))
    claim("the e_a exhaust A at every position",
          all({e[j] for e in es} == set(range(k)) for j in range(k * n)))
    if values is None:
        notes.append("class images checked on e_a and its one-zero bumps only")
        claim("f_n takes a and a+1 on the class of e_a",
              all({ff.value(es[a]), ff.value(bumped_zero(es[a], 0))} == {a, (a + 1) % k}
                  for a in range(k)))
        return
    pts = _points(k, k * n)
    lab = labels[pts]
    ok = True
    anywhere = np.zeros(len(pts), dtype=bool)
    for a in range(k):
        mask = np.all(lab == labels[np.asarray(es[a])], axis=1)
        anywhere |= mask
        ok &= set(np.unique(values[mask]).tolist()) == {a, (a + 1) % k}
    claim("f_n[class of e_a] = {a, a+1}", ok)
    claim("f_n is 0 off the classes of the e_a", bool(np.all(values[~anywhere] == 0)))


def _condition_one(k: int, cs: Sequence[tuple[int, ...]]) -> bool:
    n = len(cs[0])
    sigma = make_central_sigma(k, 0)
    consts = [(b,) * n for b in range(3, k)]
    for i in range(len(cs)):
        for j in range(i, len(cs)):
            if in_power(sigma, [cs[i], cs[j]] + consts) != (j - i <= 1):
                return False
    return True


def _check_centralk1(ff, values, claim, notes):
    spec = ff.spec
    fam, k, n = spec.family, spec.k, spec.n
    claim("e_i iff: (e_i, e_j, 3..k-1) in sigma_0^n exactly when j - i <= 1",
          check_e_tuple_iff(k, n))
    if fam == "Centralk1Eqrel":
        _check_centralk1_eqrel(ff, values, claim, notes)
        return
    cs = ff.data["c"]
    claim("condition (1): (c_i, c_j, 3..k-1) in sigma_0^n exactly when j - i <= 1",
          _condition_one(k, cs))
    notes.append("condition (2) is checked through the tuple facts its argument uses, "
                 "not by quantifying over all h")
    if fam in ("Centralk1Subset1", "Centralk1Subset2"):
        subset = set(spec.subset)
        last = n - 2 if fam == "Centralk1Subset1" else n - 1
        claim("c_1 lies in B^n", set(cs[0]) <= subset)
        claim(f"c_2, ..., c_{last} lie outside B^n",
              all(not set(c) <= subset for c in cs[1:last]))
    elif fam == "Centralk1Central":
        sigma2 = make_central_sigma(k, 2)
        consts = [(b,) * n for b in range(3, k)]
        claim("(c_1, c_n, 3..k-1) in sigma_2^n", in_power(sigma2, [cs[0], cs[-1]] + consts))
        claim("(c_i, c_n, 3..k-1) not in sigma_2^n for 2 <= i < n",
              not any(in_power(sigma2, [cs[i], cs[-1]] + consts) for i in range(1, n - 1)))
    elif fam == "Centralk1Perm":
        gamma = spec.perm
        if k == 3:
            claim("gamma maps c_1 onto c_n", tuple(gamma[a] for a in cs[0]) == cs[-1])
        else:
            claim("gamma maps c_1 = 2-constant onto the 3-constant",
                  tuple(gamma[a] for a in cs[0]) == (3,) * n)


def _check_centralk1_eqrel(ff, values, claim, notes):
    k, n = ff.spec.k, ff.spec.n
    labels = ff.data["theta"]
    es = ff.data["e"]

    def related(x, y):
        return all(labels[p] == labels[q] for p, q in zip(x, y))

    idx = range(2, n)
    claim("(e_i, e_j) not in epsilon^n for i != j",
          not any(related(es[i], es[j]) for i in idx for j in idx if i != j))
    mates = {}
    for i in idx:
        t = es[i]
        for pos, a in enumerate(t):
            other = [b for b in range(k) if b != a and labels[b] == labels[a]]
            if a in (0, 2) and other:
                mates[i] = t[:pos] + (other[0],) + t[pos + 1:]
                break
    claim("each class of e_i has a second element", set(mates) == set(idx))
    want = {i: ({1, 2} if i == 2 else {2, 0} if i == n - 1 else {1, 0}) for i in idx}
    if values is None:
        claim("f_n takes the two listed values on each class of e_i",
              all(i in mates and {ff.value(es[i]), ff.value(mates[i])} == want[i] for i in idx))
        return
    pts = _points(k, n)
    lab = labels[pts]
    anywhere = np.zeros(len(pts), dtype=bool)
    ok = True
    for i in idx:
        mask = np.all(lab == labels[np.asarray(es[i])], axis=1)
        anywhere |= mask
        ok &= set(np.unique(values[mask]).tolist()) == want[i]
    claim("f_n[class of e_i] is {1,2}, {1,0} or {2,0} as listed", ok)
    allowed = {0} | set(range(3, k))
    claim("other classes map into {0, 3, ..., k-1}",
          set(np.unique(values[~anywhere]).tolist()) <= allowed)


_SANITY = {
    "CentralR": _check_central_r,
    "HRegMulti": _check_hreg,
    "HRegSingle": _check_hreg,
    "SlupCentral": _check_slup_central,
    "SlupSubset": _check_slup_subset,
    "SlupEqrel": _check_slup_eqrel,
    "Centralk1Subset1": _check_centralk1,
    "Centralk1Subset2": _check_centralk1,
    "Centralk1Central": _check_centralk1,
    "Centralk1Perm": _check_centralk1,
    "Centralk1Eqrel": _check_centralk1,
}


def sanity_grid(ks: Iterable[int] = (3, 4, 5), n_max: int = 6,
                families: Iterable[str] = FAMILY_TAGS) -> list[SanityReport]:
    """family_sanity over every applicable (family, k, n) with n_min <= n <= n_max."""
    reports = []
    for fam in families:
        for k in ks:
            for n in range(_min_n(fam, k), n_max + 1):
                try:
                    spec = resolve_spec(FamilySpec(fam, k, n))
                except (DomainError, ContractViolation):
                    continue
                reports.append(family_sanity(spec))
    return reports
