"""Labeled group trees of operations and the tree-based C-minor decision for chain clones.

For a chain E of equivalences rho_1 < ... < rho_r on A with automorphism
group G, the tree of an n-ary operation f has a node (i, B) for every block B
of (rho_i)^n, i = 0..r+1 (rho_0 is equality, rho_{r+1} is A^2).  Leaves are
the tuples of A^n; each leaf x carries the label of f on the pointed orbit
(Gx, x).  f is a C-minor of g for C = Pol(E, Aut E, all nonempty subsets)
exactly when there is a label-increasing G-homomorphism between their trees.
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import OpTable, coordinate_array, range_of
from .errors import BudgetExceeded, DomainError, StructuralError
from .perm import PermGroup
from .relations import ChainE, aut_of_chain
from .search import ClassPartition

MAX_TREE_POINTS = 10 ** 5


@dataclass(frozen=True)
class PointedOrbit:
    group: PermGroup
    point: tuple[int, ...]
    orbit: frozenset[tuple[int, ...]]
    stabilizer: tuple[int, ...]


def orbit_and_stabilizer(group: PermGroup, point: Sequence[int]) -> PointedOrbit:
    point = tuple(point)
    if any(not 0 <= a < group.k for a in point):
        raise DomainError("point entries must be elements")
    orbit = frozenset(group.act(g, point) for g in range(group.order))
    return PointedOrbit(group, point, orbit, group.stabilizer(point))


@dataclass(frozen=True)
class LeafLabel:
    """The restriction of an operation to a pointed orbit, up to the equivalence of labels.

    values[g] is the operation's value at (group element g) applied to the base point.
    """

    coord_set: tuple[int, ...]
    stabilizer: tuple[int, ...]
    values: tuple[int, ...]

    def act(self, group: PermGroup, g: int) -> "LeafLabel":
        """The label moved by group element g: same orbit, base point g applied."""
        prod = group.product_table
        values = tuple(self.values[prod[d][g]] for d in range(group.order))
        inv = group.inverse_table[g]
        stab = tuple(sorted(prod[prod[g][s]][inv] for s in self.stabilizer))
        perm = group.elements[g]
        coords = tuple(sorted(perm[a] for a in self.coord_set))
        return LeafLabel(coords, stab, values)

    def to_json(self) -> dict:
        return {"coord_set": list(self.coord_set), "stabilizer": list(self.stabilizer),
                "values": list(self.values)}


def label_of(g: OpTable, x: Sequence[int], group: PermGroup) -> LeafLabel:
    x = tuple(x)
    if len(x) != g.arity:
        raise StructuralError("point length differs from the arity")
    values = tuple(g.value(group.act(d, x)) for d in range(group.order))
    return LeafLabel(tuple(sorted(set(x))), group.stabilizer(x), values)


def label_leq(mu: LeafLabel, nu: LeafLabel) -> bool:
    """mu below nu: smaller stabilizer, larger coordinate set, same values along the orbit map."""
    return (set(mu.stabilizer) <= set(nu.stabilizer)
            and set(mu.coord_set) >= set(nu.coord_set)
            and mu.values == nu.values)


def label_equiv(mu: LeafLabel, nu: LeafLabel) -> bool:
    return mu == nu


def label_class_bound(chain: ChainE) -> int:
    """k**(k + 2|G|), an upper bound on the number of label classes."""
    group = aut_of_chain(chain)
    return chain.k ** (chain.k + 2 * group.order)


class TreeFrame:
    """The unlabeled tree P_n(E) with its group action; shared by every n-ary operation."""

    def __init__(self, chain: ChainE, n: int, group: PermGroup | None = None):
        k = chain.k
        if k ** n > MAX_TREE_POINTS:
            raise BudgetExceeded(f"{k}**{n} leaves exceed the tree size cap")
        self.chain = chain
        self.k = k
        self.n = n
        self.group = group if group is not None else aut_of_chain(chain)
        levels = chain.level_labels
        self.depth = len(levels) - 1
        coords = coordinate_array(k, n)
        self.level_nodes: list[list[tuple[int, ...]]] = []
        self.node_level: list[int] = []
        self.node_key: list[tuple[int, ...]] = []
        index: dict[tuple[int, tuple[int, ...]], int] = {}
        for level, labels in enumerate(levels):
            lab = np.asarray(labels)[coords]
            keys = sorted(set(map(tuple, lab.tolist())))
            self.level_nodes.append(keys)
            for key in keys:
                index[(level, key)] = len(self.node_key)
                self.node_key.append(key)
                self.node_level.append(level)
        self.index = index
        size = len(self.node_key)
        self.size = size
        self.root = index[(self.depth, (0,) * n)]
        parent = [-1] * size
        for node in range(size):
            level = self.node_level[node]
            if level == self.depth:
                continue
            upper = levels[level + 1]
            # every element of a rho_level block lies in one rho_{level+1} block
            rep = self._representative(node)
            parent[node] = index[(level + 1, tuple(upper[a] for a in rep))]
        self.parent = tuple(parent)
        children: list[list[int]] = [[] for _ in range(size)]
        for node, p in enumerate(parent):
            if p >= 0:
                children[p].append(node)
        self.children = tuple(tuple(c) for c in children)
        self.leaves = tuple(range(len(self.level_nodes[0])))
        # action[g][node]: image of node under group element g
        action = np.zeros((self.group.order, size), dtype=np.int64)
        for g, perm in enumerate(self.group.elements):
            for node in range(size):
                level = self.node_level[node]
                rep = self._representative(node)
                moved = tuple(levels[level][perm[a]] for a in rep)
                action[g, node] = index[(level, moved)]
        self.action = action
        self.stabilizers = tuple(
            tuple(int(g) for g in np.nonzero(action[:, node] == node)[0]) for node in range(size))

    def _representative(self, node: int) -> tuple[int, ...]:
        """Some tuple of A^n inside the block of node."""
        level = self.node_level[node]
        labels = self.chain.level_labels[level]
        key = self.node_key[node]
        first = {}
        for a in range(self.k - 1, -1, -1):
            first[labels[a]] = a
        return tuple(first[b] for b in key)

    def point(self, leaf: int) -> tuple[int, ...]:
        return self.node_key[leaf]

    def orbit(self, node: int) -> tuple[int, ...]:
        return tuple(sorted(set(self.action[:, node].tolist())))


@functools.lru_cache(maxsize=128)
def _frame(chain: ChainE, n: int) -> TreeFrame:
    return TreeFrame(chain, n)


@dataclass
class LabeledTree:
    """A labeled G-subtree of P_n(E): the nodes present and the labels of its leaves."""

    frame: TreeFrame
    nodes: frozenset[int]
    labels: dict[int, LeafLabel]
    op: OpTable | None = None

    @property
    def group(self) -> PermGroup:
        return self.frame.group

    @property
    def root(self) -> int:
        return self.frame.root

    @property
    def depth(self) -> int:
        return self.frame.depth

    def children(self, node: int) -> tuple[int, ...]:
        return tuple(c for c in self.frame.children[node] if c in self.nodes)

    def leaves(self) -> list[int]:
        return sorted(n for n in self.nodes if self.frame.node_level[n] == 0)

    def level_sizes(self) -> list[int]:
        counts = [0] * (self.depth + 1)
        for node in self.nodes:
            counts[self.frame.node_level[node]] += 1
        return counts

    def __len__(self) -> int:
        return len(self.nodes)

    def restrict(self, nodes: Iterable[int]) -> "LabeledTree":
        nodes = frozenset(nodes)
        return LabeledTree(self.frame, nodes,
                           {a: lab for a, lab in self.labels.items() if a in nodes}, self.op)

    def describe(self, node: int) -> str:
        level = self.frame.node_level[node]
        key = self.frame.node_key[node]
        if level == 0:
            return f"(0,{key})"
        blocks = self.frame.chain.level_labels[level]
        parts = []
        for b in key:
            parts.append("{" + ",".join(str(a) for a in range(self.frame.k) if blocks[a] == b) + "}")
        return f"({level}," + "x".join(parts) + ")"

    def to_json(self) -> dict:
        frame = self.frame
        nodes = sorted(self.nodes)
        return {
            "k": frame.k, "n": frame.n, "depth": frame.depth,
            "chain": frame.chain.to_json(),
            "group": [list(p) for p in frame.group.elements],
            "nodes": [{"id": a, "level": frame.node_level[a], "block": list(frame.node_key[a]),
                       "parent": frame.parent[a] if a != frame.root else None} for a in nodes],
            "action": [[int(frame.action[g, a]) for a in nodes] for g in range(frame.group.order)],
            "leaf_labels": {str(a): self.labels[a].to_json() for a in nodes if a in self.labels},
        }

    def render(self) -> str:
        lines = []

        def walk(node, indent):
            text = "  " * indent + self.describe(node)
            if node in self.labels:
                lab = self.labels[node]
                text += f"  label values={''.join(map(str, lab.values))} stab={list(lab.stabilizer)}"
            lines.append(text)
            for child in self.children(node):
                walk(child, indent + 1)

        walk(self.root, 0)
        return "\n".join(lines)


def build_tree(f: OpTable, chain: ChainE) -> LabeledTree:
    if f.k != chain.k:
        raise StructuralError("operation and chain live on different domains")
    frame = _frame(chain, f.arity)
    group = frame.group
    labels = {leaf: label_of(f, frame.point(leaf), group) for leaf in frame.leaves}
    return LabeledTree(frame, frozenset(range(frame.size)), labels, f)


def check_equivariant_labels(tree: LabeledTree) -> bool:
    """Whether label(g a) = g label(a) for every leaf a and group element g."""
    frame, group = tree.frame, tree.group
    for leaf, lab in tree.labels.items():
        for g in range(group.order):
            if tree.labels[int(frame.action[g, leaf])] != lab.act(group, g):
                return False
    return True


# Homomorphisms.

def _leaf_ok(mu: LeafLabel, nu: LeafLabel, mode: str) -> bool:
    return label_leq(mu, nu) if mode == "increasing" else mu == nu


def _child_orbits(tree: LabeledTree, node: int) -> list[int]:
    """Least member of each orbit of the node's stabilizer on its children."""
    frame = tree.frame
    stab = frame.stabilizers[node]
    seen: set[int] = set()
    reps = []
    for child in tree.children(node):
        if child in seen:
            continue
        reps.append(child)
        seen.update(int(frame.action[g, child]) for g in stab)
    return reps


def find_hom(P: LabeledTree, Q: LabeledTree, mode: str = "increasing") -> dict[int, int] | None:
    """A label-increasing (or label-preserving) G-homomorphism P -> Q as a node map, or None."""
    if mode not in ("increasing", "preserving"):
        raise DomainError(f"unknown mode {mode!r}")
    fp, fq = P.frame, Q.frame
    if fp.group != fq.group or fp.depth != fq.depth or fp.k != fq.k:
        raise StructuralError("trees must share the group and the depth")
    memo: dict[tuple[int, int], int | None] = {}
    choices: dict[tuple[int, int], dict[int, int]] = {}

    def feasible(c: int, d: int) -> bool:
        key = (c, d)
        if key in memo:
            return memo[key] is not None
        ok = set(fp.stabilizers[c]) <= set(fq.stabilizers[d])
        picked: dict[int, int] = {}
        if ok and fp.node_level[c] == 0:
            ok = _leaf_ok(P.labels[c], Q.labels[d], mode)
        elif ok:
            q_children = Q.children(d)
            for rep in _child_orbits(P, c):
                for cand in q_children:
                    if feasible(rep, cand):
                        picked[rep] = cand
                        break
                else:
                    ok = False
                    break
        memo[key] = 1 if ok else None
        if ok:
            choices[key] = picked
        return ok

    if not feasible(P.root, Q.root):
        return None
    built: dict[tuple[int, int], dict[int, int]] = {}

    def subtree_map(c: int, d: int) -> dict[int, int]:
        # the map on the subtree of c: representatives follow the recorded
        # choices, the rest of each orbit is fixed by equivariance under Stab(c)
        key = (c, d)
        if key in built:
            return built[key]
        out = {c: d}
        for rep, img in choices[key].items():
            sub = subtree_map(rep, img)
            for g in fp.stabilizers[c]:
                for a, b in sub.items():
                    out[int(fp.action[g, a])] = int(fq.action[g, b])
        built[key] = out
        return out

    mapping = subtree_map(P.root, Q.root)
    hom = {a: mapping[a] for a in P.nodes}
    verify_hom(P, Q, hom, mode)
    return hom


def verify_hom(P: LabeledTree, Q: LabeledTree, hom: dict[int, int], mode: str) -> None:
    """Raise AssertionError unless hom satisfies root, successor, equivariance and leaf conditions."""
    fp, fq = P.frame, Q.frame
    if set(hom) != set(P.nodes) or not set(hom.values()) <= set(Q.nodes):
        raise AssertionError("hom is not a total map into Q")
    if hom[P.root] != Q.root:
        raise AssertionError("root not mapped to root")
    for a, b in hom.items():
        if a != P.root and hom[fp.parent[a]] != fq.parent[b]:
            raise AssertionError("successor not preserved")
        for g in range(fp.group.order):
            if hom[int(fp.action[g, a])] != int(fq.action[g, b]):
                raise AssertionError("not equivariant")
        if fp.node_level[a] == 0 and not _leaf_ok(P.labels[a], Q.labels[b], mode):
            raise AssertionError("leaf labels not related")


# Cores.

@dataclass
class CoreResult:
    tree: LabeledTree
    trace: list[dict] = field(default_factory=list)


def _remove_orbit(tree: LabeledTree, node: int) -> frozenset[int]:
    frame = tree.frame
    orbit = set(frame.orbit(node))
    drop = set()
    for a in tree.nodes:
        b = a
        while b != -1:
            if b in orbit:
                drop.add(a)
                break
            b = frame.parent[b]
    return tree.nodes - drop


def core_with_trace(tree: LabeledTree, seed: int | None = 0) -> CoreResult:
    """Shrink the tree by images of non-surjective label-preserving endomorphisms until none exist.

    Orbits are tried in an order shuffled by seed (None keeps node order).
    """
    current = tree
    trace = []
    rng = random.Random(seed)
    while True:
        frame = current.frame
        reps = sorted({min(frame.orbit(a)) for a in current.nodes if a != current.root})
        if seed is not None:
            rng.shuffle(reps)
        for rep in reps:
            target = current.restrict(_remove_orbit(current, rep))
            if not target.nodes or target.root not in target.nodes:
                continue
            if len(target.leaves()) == 0 or not _uniform(target):
                continue
            hom = find_hom(current, target, "preserving")
            if hom is None:
                continue
            image = frozenset(hom.values())
            trace.append({"removed_orbit_of": rep, "size_before": len(current),
                          "size_after": len(image)})
            current = current.restrict(image)
            break
        else:
            return CoreResult(current, trace)


def _uniform(tree: LabeledTree) -> bool:
    frame = tree.frame
    return all(frame.node_level[a] == 0 or tree.children(a) for a in tree.nodes)


def core_of(tree: LabeledTree, seed: int | None = 0) -> LabeledTree:
    return core_with_trace(tree, seed).tree


def is_core(tree: LabeledTree) -> bool:
    """Whether every label-preserving endomorphism is onto, by searching for one that is not."""
    for rep in sorted({min(tree.frame.orbit(a)) for a in tree.nodes if a != tree.root}):
        target = tree.restrict(_remove_orbit(tree, rep))
        if _uniform(target) and find_hom(tree, target, "preserving") is not None:
            return False
    return True


# Isomorphism via canonical codes.

def canonical_code(tree: LabeledTree) -> tuple:
    """An isomorphism invariant that is complete for labeled G-trees.

    A leaf's code is its label.  An internal node's code lists, for each orbit
    of its stabilizer on its children, the least (stabilizer, code) pair over
    the orbit, sorted.
    """
    frame = tree.frame
    memo: dict[int, tuple] = {}

    def code(node: int) -> tuple:
        if node in memo:
            return memo[node]
        if frame.node_level[node] == 0:
            lab = tree.labels[node]
            out = ("leaf", lab.coord_set, lab.stabilizer, lab.values)
        else:
            stab = frame.stabilizers[node]
            parts = []
            seen: set[int] = set()
            for child in tree.children(node):
                if child in seen:
                    continue
                orbit = {int(frame.action[g, child]) for g in stab}
                seen |= orbit
                parts.append(min((frame.stabilizers[c], code(c)) for c in orbit))
            out = ("node", tuple(sorted(parts)))
        memo[node] = out
        return out

    return (frame.stabilizers[tree.root], code(tree.root))


def trees_isomorphic(P: LabeledTree, Q: LabeledTree) -> bool:
    if P.frame.group != Q.frame.group or P.depth != Q.depth:
        raise StructuralError("trees must share the group and the depth")
    return canonical_code(P) == canonical_code(Q)


# Minors through trees.

def minor_via_trees(f: OpTable, g: OpTable, chain: ChainE) -> bool:
    """Whether f is a minor of g for Pol(E, Aut E, all nonempty subsets), via core homomorphisms."""
    if f.k != g.k or f.k != chain.k:
        raise StructuralError("operations and chain must share the domain")
    return find_hom(_core_cached(f, chain), _core_cached(g, chain), "increasing") is not None


@functools.lru_cache(maxsize=200000)
def _core_cached(f: OpTable, chain: ChainE) -> LabeledTree:
    return core_of(build_tree(f, chain))


def count_classes_tree(ops: Sequence[OpTable], chain: ChainE) -> ClassPartition:
    """Partition ops by mutual label-increasing homomorphisms between cores.

    Operations with isomorphic cores are placed together without a search.
    """
    ops = list(ops)
    cores = [_core_cached(f, chain) for f in ops]
    codes = [canonical_code(c) for c in cores]
    code_class: dict[tuple, int] = {}
    reps: dict[frozenset, list[tuple[int, int]]] = {}
    ids = []
    next_id = 0
    for idx, (f, core, code) in enumerate(zip(ops, cores, codes)):
        if code in code_class:
            ids.append(code_class[code])
            continue
        bucket = reps.setdefault(range_of(f), [])
        for cid, rep in bucket:
            other = cores[rep]
            if (find_hom(core, other, "increasing") is not None
                    and find_hom(other, core, "increasing") is not None):
                ids.append(cid)
                code_class[code] = cid
                break
        else:
            bucket.append((next_id, idx))
            code_class[code] = next_id
            ids.append(next_id)
            next_id += 1
    return ClassPartition(tuple(ops), tuple(ids))


def core_count_log2(chain: ChainE, depth: int | None = None, max_bits: int = 10 ** 6) -> int | None:
    """log2 of the recursive bound on the number of non-isomorphic cores of a given depth.

    n_0 = |S| with |S| the label class bound; n_d(G) = 2**(sum of n_{d-1}(H) over subgroups H of G).
    Returns None when the value does not fit in max_bits.
    """
    group = aut_of_chain(chain)
    depth = chain.length + 1 if depth is None else depth
    s = label_class_bound(chain)
    subgroups = group.subgroups()
    members = {sub: [t for t in subgroups if t <= sub] for sub in subgroups}
    # n[H] for the current depth, as exact integers
    current = {sub: s for sub in subgroups}
    if depth == 0:
        return math.ceil(math.log2(s))
    for d in range(1, depth + 1):
        logs = {sub: sum(current[t] for t in members[sub]) for sub in subgroups}
        if d == depth:
            return logs[frozenset(range(group.order))]
        if any(v > max_bits for v in logs.values()):
            return None
        current = {sub: 2 ** v for sub, v in logs.items()}
    return None
