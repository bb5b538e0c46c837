"""Relations, preservation, Rosenberg relation builders and clone descriptions."""

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from cloneminors.core import OpTable, all_operations, constant, identity, projection, tuples_of
from cloneminors.errors import ContractViolation, DomainError
from cloneminors.perm import PermGroup
from cloneminors.relations import (
    ChainE, Generated, HRegularFamily, Relation, Relational, aut_of_chain, canonical_key,
    clone_membership, equivalence_from_blocks, full_clone, is_chain, is_prime_permutation,
    make_bounded_order, make_burle_beta, make_central_relation, make_central_sigma,
    make_equivalence, make_h_regular, make_iota, make_prime_affine, make_prime_permutation,
    preserves, projection_clone, slupecki_chain, spec_from_json, subset_relation, ta_minus,
    validate_central,
)
from cloneminors.search import enum_clone_ops
from cloneminors.witnesses import discriminator


def naive_preserves(f, rho):
    """Direct definition: every choice of arity(f) members, applied row-wise."""
    for cols in itertools.product(rho.tuples, repeat=f.arity):
        image = tuple(f.value(tuple(col[j] for col in cols)) for j in range(rho.arity))
        if image not in rho.tuple_set:
            return False
    return True


def test_preserves_examples():
    eps = equivalence_from_blocks(3, [[0, 1], [2]])
    assert preserves(identity(3), eps)
    assert preserves(identity(3), make_central_sigma(3, 0))
    assert not preserves(OpTable(3, 1, (0, 2, 2)), eps)
    assert preserves(constant(3, 0), make_central_sigma(3, 0))


@given(st.lists(st.integers(0, 2), min_size=9, max_size=9), st.integers(0, 3))
def test_preserves_matches_definition(table, which):
    f = OpTable(3, 2, tuple(table))
    rho = [equivalence_from_blocks(3, [[0, 1], [2]]), make_central_sigma(3, 0),
           make_iota(3), subset_relation(3, {0, 2})][which]
    assert preserves(f, rho) == naive_preserves(f, rho)


def test_relation_validation():
    with pytest.raises(ContractViolation):
        Relation.from_tuples(2, 1, [])
    assert Relation.from_tuples(2, 1, [], allow_empty=True).size == 0
    rel = Relation.from_tuples(3, 2, [(0, 1), (2, 2)])
    assert (0, 1) in rel and (1, 0) not in rel and (5, 0) not in rel
    assert Relation.from_json(rel.to_json()) == rel


def test_central_sigma_sizes():
    s = make_central_sigma(3, 0)
    assert s.tuple_set == {(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (0, 2), (2, 0)}
    assert make_central_sigma(3, 1).size == 7
    # triples with a repeat or a 0: 64 minus the 3*2*1 injective triples avoiding 0
    assert make_central_sigma(4, 0).size == 58
    brute = sum(1 for t in tuples_of(4, 3) if len(set(t)) < 3 or 0 in t)
    assert brute == 58


@pytest.mark.parametrize("k", [3, 4, 5])
def test_central_sigma_has_exactly_its_center(k):
    for c in range(k):
        check = validate_central(make_central_sigma(k, c))
        assert check.is_central and check.centers == {c}


def test_validate_central_reasons():
    assert validate_central(make_central_sigma(3, 0)).centers == {0}
    assert validate_central(Relation(3, 2, (True,) * 9)).reason == "trivial"
    unary = subset_relation(3, {0, 1})
    assert validate_central(unary).centers == {0, 1}
    assert validate_central(Relation.from_tuples(3, 2, [(0, 1)])).reason == "not-reflexive"
    asym = Relation.from_tuples(3, 2, [(a, a) for a in range(3)] + [(0, 1)])
    assert validate_central(asym).reason == "not-symmetric"
    no_center = Relation.from_tuples(
        4, 2, [(a, a) for a in range(4)] + [(0, 1), (1, 0), (2, 3), (3, 2)])
    assert validate_central(no_center).reason == "no-center"


def test_iota_size_and_h_regular():
    assert make_iota(3).size == 21
    fam = HRegularFamily.from_partitions(3, 3, [[[0], [1], [2]]])
    assert make_h_regular(fam) == make_iota(3)
    theta = [[0, 1], [2], [3]]
    rel = make_h_regular(HRegularFamily.from_partitions(4, 3, [theta]))
    labels = (0, 0, 1, 2)
    assert rel.tuple_set == {t for t in tuples_of(4, 3) if len({labels[a] for a in t}) < 3}


def test_h_regular_family_checks():
    with pytest.raises(ContractViolation):
        HRegularFamily.from_partitions(4, 3, [[[0, 1], [2, 3]]])
    # two 3-block partitions of a 4-element set cannot have all block choices meet
    with pytest.raises(ContractViolation):
        HRegularFamily.from_partitions(4, 3, [[[0, 1], [2], [3]], [[0], [1, 2], [3]]])


def test_h_regular_relations_are_totally_reflexive_and_symmetric():
    for k in (3, 4):
        for h in range(3, k + 1):
            for labels in itertools.product(range(h), repeat=k):
                if set(labels) != set(range(h)) or labels[0] != 0:
                    continue
                blocks = [[a for a in range(k) if labels[a] == b] for b in range(h)]
                rel = make_h_regular(HRegularFamily.from_partitions(k, h, [blocks]))
                assert rel.is_totally_reflexive() and rel.is_totally_symmetric()


def test_prime_affine():
    r2 = make_prime_affine(2)
    assert r2.size == 8
    assert r2.tuple_set == {(x, y, z, x ^ y ^ z) for x, y, z in tuples_of(2, 3)}
    assert [t for t in r2.tuples if t[:3] == (0, 0, 0)] == [(0, 0, 0, 0)]
    assert make_prime_affine(3).size == 27
    beta = make_burle_beta(3)
    restricted = {t for t in beta.tuples if set(t) <= {0, 1}}
    assert restricted == r2.tuple_set
    assert make_prime_affine(4).size == 64
    with pytest.raises(DomainError):
        make_prime_affine(6)


def test_bounded_order_and_discriminator():
    order = make_bounded_order(2, [(0, 1)])
    assert not preserves(discriminator(2), order)
    assert preserves(OpTable.from_function(2, 2, min), order)
    with pytest.raises(ContractViolation):
        make_bounded_order(3, [(0, 1)])
    assert make_bounded_order(3, [(0, 2), (2, 1), (0, 1)]).size == 6


def test_prime_permutations():
    assert is_prime_permutation((1, 2, 0))
    assert is_prime_permutation((1, 0, 3, 2))
    assert not is_prime_permutation((1, 2, 3, 0))
    assert not is_prime_permutation((0, 2, 1))
    with pytest.raises(ContractViolation):
        make_prime_permutation((1, 2, 3, 0))
    with pytest.raises(ContractViolation):
        make_equivalence(3, [[0, 1, 2]])


def test_aut_of_chain_examples():
    assert aut_of_chain(ChainE(3)).order == 6
    e47 = ChainE.from_partitions(4, [[[0], [1], [2, 3]], [[0, 1], [2, 3]]])
    group = aut_of_chain(e47)
    assert group == PermGroup.generated_by(4, [(1, 0, 2, 3), (0, 1, 3, 2)])
    assert group.order == 4
    assert set(aut_of_chain(ChainE.from_partitions(3, [[[0, 1], [2]]])).elements) == {
        (0, 1, 2), (1, 0, 2)}


def test_aut_of_chain_is_exactly_the_preserving_permutations():
    chain = ChainE.from_partitions(4, [[[0, 1], [2], [3]], [[0, 1], [2, 3]]])
    group = set(aut_of_chain(chain).elements)
    for p in itertools.permutations(range(4)):
        ok = all(preserves(OpTable(4, 1, p), rel) for rel in chain.relations)
        assert ok == (p in group)


def test_is_chain_examples():
    a = equivalence_from_blocks(3, [[0, 1], [2]])
    b = equivalence_from_blocks(3, [[0], [1, 2]])
    assert is_chain([a])
    assert not is_chain([a, b])
    c = equivalence_from_blocks(4, [[0, 1], [2], [3]])
    d = equivalence_from_blocks(4, [[0, 1], [2, 3]])
    assert is_chain([c, d])
    with pytest.raises(ContractViolation):
        ChainE(3, (b, a))


def test_clone_membership_examples():
    specs = [full_clone(3), projection_clone(3), slupecki_chain(3, 2), ta_minus(3),
             Relational(3, (make_central_sigma(3, 0),))]
    for spec in specs:
        for i in (1, 2):
            assert clone_membership(projection(3, 2, i), spec)
    plus = OpTable.from_function(3, 2, lambda x, y: (x + y) % 3)
    assert not clone_membership(plus, slupecki_chain(3, 2))
    order = Relational(2, (make_bounded_order(2, [(0, 1)]),))
    assert not clone_membership(discriminator(2), order)


def test_slupecki_equals_pol_iota_on_unary_and_sampled_binary():
    spec = slupecki_chain(3, 2)
    iota = make_iota(3)
    for f in all_operations(3, 1):
        assert clone_membership(f, spec) == preserves(f, iota)
    rng = random.Random(7)
    for _ in range(400):
        f = OpTable(3, 2, tuple(rng.randrange(3) for _ in range(9)))
        assert clone_membership(f, spec) == preserves(f, iota)


def test_generated_preservation_spot_check():
    """Members of the clone generated by relation-preserving ops preserve the relation."""
    order = make_bounded_order(2, [(0, 1)])
    gens = [OpTable.from_function(2, 2, min), OpTable.from_function(2, 2, max)]
    assert all(preserves(g, order) for g in gens)
    for f in enum_clone_ops(Generated(2, tuple(gens)), 2):
        assert preserves(f, order)


def test_spec_json_round_trip_and_key():
    spec = Relational(3, (make_central_sigma(3, 0), make_central_relation(3, 1, 1)),
                      ((1, 0, 2),), (frozenset({0, 1}),))
    back = spec_from_json(spec.to_json())
    assert back == spec
    assert canonical_key(back) == canonical_key(spec)
    swapped = Relational(3, spec.relations[::-1], spec.permutations, spec.subsets)
    assert canonical_key(swapped) == canonical_key(spec)
