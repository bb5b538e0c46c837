"""Group actions, leaf labels, labeled trees, homomorphisms, cores and the tree-based minor test."""

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from cloneminors.core import OpTable, all_operations, constant, identity
from cloneminors.perm import PermGroup
from cloneminors.relations import ChainE, Generated, aut_of_chain, chain_clone
from cloneminors.search import is_minor, partition_classes
from cloneminors.trees import (
    build_tree, canonical_code, check_equivariant_labels, core_of, core_with_trace,
    count_classes_tree, find_hom, is_core, label_class_bound, label_equiv, label_leq, label_of,
    minor_via_trees, orbit_and_stabilizer, trees_isomorphic, verify_hom,
)
from cloneminors.witnesses import discriminator

CHAIN3 = ChainE.from_partitions(3, [[[0, 1], [2]]])
# A = {1,2,3,4} coded as 0..3; levels {1},{2},{3,4} and {1,2},{3,4}
CHAIN47 = ChainE.from_partitions(4, [[[0], [1], [2, 3]], [[0, 1], [2, 3]]])
# g: 1->2, 2->4, 3->4, 4->3 in the same coding
G411 = OpTable(4, 1, (1, 3, 3, 2))
EMPTY2 = ChainE(2)


def random_op(rng, k, n):
    return OpTable(k, n, tuple(rng.randrange(k) for _ in range(k ** n)))


def test_orbit_examples():
    sym = PermGroup.symmetric(3)
    po = orbit_and_stabilizer(sym, (0, 0))
    assert po.orbit == {(0, 0), (1, 1), (2, 2)} and len(po.stabilizer) == 2
    triv = PermGroup.trivial(3)
    po = orbit_and_stabilizer(triv, (2, 1))
    assert po.orbit == {(2, 1)} and po.stabilizer == (0,)
    group = aut_of_chain(CHAIN47)
    po = orbit_and_stabilizer(group, (0,))
    assert po.orbit == {(0,), (1,)}
    assert {group.elements[g] for g in po.stabilizer} == {(0, 1, 2, 3), (0, 1, 3, 2)}


def test_example_labels_are_pairwise_distinct():
    tree = build_tree(G411, CHAIN47)
    labels = [tree.labels[leaf] for leaf in tree.leaves()]
    assert len(labels) == 4 and len(set(labels)) == 4
    assert len({lab.coord_set for lab in labels}) == 4
    for mu, nu in itertools.permutations(labels, 2):
        assert not label_leq(mu, nu)


def test_constant_labels_share_values():
    group = aut_of_chain(CHAIN3)
    f = constant(3, 2, 2)
    labels = [label_of(f, x, group) for x in itertools.product(range(3), repeat=2)]
    assert {lab.values for lab in labels} == {(2,) * group.order}
    assert len({(lab.coord_set, lab.stabilizer) for lab in labels}) > 1


def test_label_action_law():
    group = aut_of_chain(CHAIN47)
    prod = group.product_table
    for x in range(4):
        base = label_of(identity(4), (x,), group)
        for g in range(group.order):
            moved = label_of(identity(4), group.act(g, (x,)), group)
            assert moved.values == tuple(base.values[prod[d][g]] for d in range(group.order))
            assert moved == base.act(group, g)


def _all_labels(chain, arities=(1, 2)):
    group = aut_of_chain(chain)
    labels = set()
    for n in arities:
        points = list(itertools.product(range(chain.k), repeat=n))
        for f in all_operations(chain.k, n):
            for x in points:
                labels.add(label_of(f, x, group))
    return group, labels


def test_label_bound_examples():
    assert label_class_bound(CHAIN3) == 3 ** 7
    assert label_class_bound(EMPTY2) == 2 ** 6


def test_label_quasiorder_on_unary_labels_exhaustive():
    group, labels = _all_labels(CHAIN3, arities=(1,))
    labels = sorted(labels, key=repr)
    for mu in labels:
        assert label_leq(mu, mu)
    for mu, nu, xi in itertools.product(labels, repeat=3):
        if label_leq(mu, nu) and label_leq(nu, xi):
            assert label_leq(mu, xi)
    for mu, nu in itertools.product(labels, repeat=2):
        assert label_equiv(mu, nu) == (label_leq(mu, nu) and label_leq(nu, mu))
        if label_leq(mu, nu):
            for g in range(group.order):
                assert label_leq(mu.act(group, g), nu.act(group, g))


@given(st.integers(0, 2 ** 32), st.integers(2, 4))
def test_label_transitivity_random(seed, k):
    rng = random.Random(seed)
    chain = ChainE(k) if k == 2 else ChainE.from_partitions(k, [[[0, 1]] + [[a] for a in range(2, k)]])
    group = aut_of_chain(chain)
    labels = []
    for _ in range(12):
        n = rng.choice([1, 2])
        f = random_op(rng, k, n)
        labels.append(label_of(f, tuple(rng.randrange(k) for _ in range(n)), group))
    for mu, nu, xi in itertools.product(labels, repeat=3):
        if label_leq(mu, nu) and label_leq(nu, xi):
            assert label_leq(mu, xi)


def test_tree_shapes():
    tree = build_tree(identity(4), CHAIN47)
    assert len(tree) == 10 and tree.level_sizes() == [4, 3, 2, 1]
    flat = build_tree(identity(3), ChainE(3))
    assert flat.depth == 1 and flat.level_sizes() == [3, 1] and flat.group.order == 6
    assert build_tree(constant(3, 0, 2), CHAIN3).level_sizes() == [9, 4, 1]


def test_tree_json_and_render():
    tree = build_tree(G411, CHAIN47)
    data = tree.to_json()
    assert len(data["nodes"]) == 10 and len(data["leaf_labels"]) == 4
    assert tree.render().count("\n") == 9


@given(st.integers(0, 2 ** 32))
def test_labels_are_equivariant(seed):
    rng = random.Random(seed)
    f = random_op(rng, 3, rng.choice([1, 2]))
    assert check_equivariant_labels(build_tree(f, CHAIN3))


def test_identity_hom_and_constant_homs():
    rng = random.Random(2)
    f = random_op(rng, 3, 2)
    tree = build_tree(f, CHAIN3)
    hom = find_hom(tree, tree, "preserving")
    assert hom is not None
    verify_hom(tree, tree, hom, "preserving")
    c1, c2 = build_tree(constant(3, 1), CHAIN3), build_tree(constant(3, 1, 2), CHAIN3)
    assert find_hom(c1, c2) is not None and find_hom(c2, c1) is not None
    assert is_minor(constant(3, 1), constant(3, 1, 2), chain_clone(CHAIN3)) is not None


def test_hom_rejects_mismatched_trees():
    with pytest.raises(Exception):
        find_hom(build_tree(identity(3), CHAIN3), build_tree(identity(3), ChainE(3)))


def test_core_fixpoint_and_constant_collapse():
    tree = build_tree(constant(3, 0, 2), CHAIN3)
    result = core_with_trace(tree)
    core = result.tree
    assert is_core(core)
    assert core_of(core).nodes == core.nodes
    assert result.trace and all(s["size_after"] < s["size_before"] for s in result.trace)
    # the block {2} x {0,1} folds onto {0,1} x {2}: leaves (2,0), (2,1) carry the same
    # labels as (0,2), (1,2); every other leaf has a label of its own
    assert core.level_sizes() == [7, 3, 1]
    points = {core.frame.point(leaf) for leaf in core.leaves()}
    assert points == {(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 2)}


def test_identity_tree_on_three_points_is_a_core():
    tree = build_tree(identity(3), CHAIN3)
    assert is_core(tree)
    assert core_of(tree).nodes == tree.nodes


@given(st.integers(0, 2 ** 32))
def test_core_properties(seed):
    rng = random.Random(seed)
    f = random_op(rng, 3, rng.choice([1, 2]))
    tree = build_tree(f, CHAIN3)
    a = core_of(tree, seed=rng.randrange(1000))
    b = core_of(tree, seed=None)
    assert is_core(a) and is_core(b)
    assert trees_isomorphic(a, b)
    assert core_of(a, seed=5).nodes == a.nodes
    assert find_hom(tree, a, "preserving") is not None
    assert find_hom(a, tree, "preserving") is not None


def test_isomorphism_examples():
    rng = random.Random(4)
    f = random_op(rng, 3, 2)
    tree = build_tree(f, CHAIN3)
    assert trees_isomorphic(tree, tree)
    other = build_tree(constant(3, 1, 2), CHAIN3)
    assert not trees_isomorphic(tree, other)
    # equivalent constants of different arities: the binary core keeps leaves with
    # two-element coordinate sets, so the cores are not isomorphic, yet homs go both ways
    c1 = core_of(build_tree(constant(3, 0), CHAIN3))
    c2 = core_of(build_tree(constant(3, 0, 2), CHAIN3))
    assert not trees_isomorphic(c1, c2)
    assert find_hom(c1, c2) is not None and find_hom(c2, c1) is not None


@given(st.integers(0, 2 ** 32))
def test_isomorphism_is_an_equivalence(seed):
    rng = random.Random(seed)
    ops = [random_op(rng, 3, 1) for _ in range(6)]
    cores = [core_of(build_tree(f, CHAIN3)) for f in ops]
    codes = [canonical_code(c) for c in cores]
    for i, j in itertools.product(range(6), repeat=2):
        assert trees_isomorphic(cores[i], cores[j]) == (codes[i] == codes[j])
        if codes[i] == codes[j]:
            # isomorphic cores admit label-preserving homs both ways
            assert find_hom(cores[i], cores[j], "preserving") is not None


def test_minor_via_trees_matches_oracle_on_sample():
    spec = chain_clone(CHAIN3)
    rng = random.Random(9)
    for _ in range(60):
        f = random_op(rng, 3, rng.choice([1, 2]))
        g = random_op(rng, 3, rng.choice([1, 2]))
        assert minor_via_trees(f, g, CHAIN3) == (is_minor(f, g, spec) is not None)
    f = random_op(rng, 3, 2)
    assert minor_via_trees(f, f, CHAIN3)


def test_discriminator_chain_matches_generated_oracle_on_unary_and_binary():
    spec = Generated(2, (discriminator(2),))
    ops = list(all_operations(2, 1)) + list(all_operations(2, 2))
    for f, g in itertools.product(ops, repeat=2):
        assert minor_via_trees(f, g, EMPTY2) == (is_minor(f, g, spec) is not None)


def test_count_classes_matches_partition():
    spec = Generated(2, (discriminator(2),))
    ops = list(all_operations(2, 1)) + list(all_operations(2, 2))
    by_tree = count_classes_tree(ops, EMPTY2)
    by_oracle = partition_classes(ops, spec)
    for i, j in itertools.combinations(range(len(ops)), 2):
        assert by_tree.same_class(i, j) == by_oracle.same_class(i, j)
    constants = [constant(2, 0), constant(2, 1), constant(2, 0, 2), constant(2, 1, 2)]
    part = count_classes_tree(constants, EMPTY2)
    # constants with the same value are equivalent; the two values are swapped by Aut
    assert part.count == 2
