"""Acceptance criteria 1-13, one or more tests per criterion.

The terminal summary prints one PASS/FAIL line per criterion.  Two literal
statements are known to be false; their tests assert them as stated and are
marked as strict expected failures, so they show up as FAIL in the summary.
"""

import itertools
import math
import random
import time

import numpy as np
import pytest

from chains import all_chains
from cloneminors.core import OpTable, all_operations, depends_on, range_of
from cloneminors.experiments import cmd_crosscheck, oracle_feasible, phi_groups
from cloneminors.relations import (
    ChainE, Relational, aut_of_chain, chain_clone, clone_membership, full_clone,
    make_bounded_order, make_central_sigma, make_iota, make_prime_affine, preserves,
    projection_clone, slupecki_chain,
)
from cloneminors.search import Session, enum_clone_ops, growth_report, is_minor, partition_classes
from cloneminors.trees import (
    build_tree, core_of, label_class_bound, label_leq, label_of, trees_isomorphic,
)
from cloneminors.witnesses import (
    FAMILY_TAGS, FamilySpec, check_e_tuple_iff, discriminator, family_clone, jablonskii_cover,
    minority_from_chain, sanity_grid, witness_family,
)

CHAIN3 = ChainE.from_partitions(3, [[[0, 1], [2]]])
CHAIN47 = ChainE.from_partitions(4, [[[0], [1], [2, 3]], [[0, 1], [2, 3]]])


def criterion(number, title):
    return pytest.mark.criterion(number, title)


def ops_up_to(k, n_max):
    return [f for n in range(1, n_max + 1) for f in all_operations(k, n)]


# 1. Full clone: equivalence is equality of ranges.

@criterion(1, "full clone classes are the equal-range classes")
@pytest.mark.parametrize("k,n_max", [(2, 3), (3, 2)])
def test_c01_full_clone_range_partition(k, n_max):
    start = time.perf_counter()
    ops = ops_up_to(k, n_max)
    part = partition_classes(ops, full_clone(k))
    by_range = {}
    for i, f in enumerate(ops):
        by_range.setdefault(frozenset(range_of(f)), set()).add(part.class_id[i])
    assert all(len(ids) == 1 for ids in by_range.values())
    assert part.count == len(by_range) == 2 ** k - 1
    assert time.perf_counter() - start < 60


# 2. Projection clone: equivalent operations agree up to renaming and dummy variables.

def essential_shape(f):
    """The table of f restricted to its essential variables (others fixed at 0)."""
    ess = [i for i in range(1, f.arity + 1) if depends_on(f, i)]
    table = []
    for x in itertools.product(range(f.k), repeat=len(ess)):
        point = [0] * f.arity
        for pos, v in zip(ess, x):
            point[pos - 1] = v
        table.append(f.value(tuple(point)))
    return len(ess), tuple(table)


def same_up_to_variable_permutation(a, b, k):
    (na, ta), (nb, tb) = a, b
    if na != nb:
        return False
    points = list(itertools.product(range(k), repeat=na))
    index = {x: i for i, x in enumerate(points)}
    for perm in itertools.permutations(range(na)):
        if all(ta[i] == tb[index[tuple(x[p] for p in perm)]] for i, x in enumerate(points)):
            return True
    return False


@criterion(2, "projection clone keeps essential arity and table up to renaming")
def test_c02_projection_clone():
    ops = ops_up_to(2, 3)
    part = partition_classes(ops, projection_clone(2))
    shapes = [essential_shape(f) for f in ops]
    pairs = 0
    for i, j in itertools.combinations(range(len(ops)), 2):
        same = same_up_to_variable_permutation(shapes[i], shapes[j], 2)
        assert part.same_class(i, j) == same
        pairs += part.same_class(i, j)
    assert pairs > 0


# 3. Tree criterion against the brute-force oracle.

@criterion(3, "tree criterion agrees with brute-force minors")
def test_c03_crosscheck_chain_k3():
    report = cmd_crosscheck(CHAIN3, 2, seed=0, max_pairs=1000)
    data = {c.check_id: c.data for c in report.checks.values()}
    assert report.exit_code == 0, report.render_text()
    assert data["arity 1 x 1"]["pairs"] == 729 and data["arity 1 x 1"]["mode"] == "exhaustive"
    sampled = sum(data[f"arity {n} x {m}"]["pairs"] for n, m in [(1, 2), (2, 1), (2, 2)])
    assert sampled >= 1000
    assert all(d["agree"] == d["pairs"] for d in data.values())


@criterion(3, "tree criterion agrees with brute-force minors")
def test_c03_crosscheck_empty_chain_k2_discriminator():
    report = cmd_crosscheck(ChainE(2), 2, seed=0, max_pairs=10 ** 6, oracle="discriminator")
    assert report.exit_code == 0, report.render_text()
    assert sum(c.data["pairs"] for c in report.checks.values()) == (4 + 16) ** 2


# 4. Cores.

def endomorphisms(tree):
    """Every label-preserving G-equivariant node map of the tree into itself."""
    frame = tree.frame
    action = frame.action
    order = sorted(tree.nodes, key=lambda a: -frame.node_level[a])

    def extend(i, phi):
        while i < len(order) and order[i] in phi:
            i += 1
        if i == len(order):
            yield dict(phi)
            return
        a = order[i]
        for b in tree.children(phi[frame.parent[a]]):
            new = {}
            ok = True
            for g in range(action.shape[0]):
                src, dst = int(action[g, a]), int(action[g, b])
                if dst not in tree.nodes or phi.get(src, dst) != dst or new.get(src, dst) != dst:
                    ok = False
                    break
                new[src] = dst
            if ok and frame.node_level[a] == 0:
                ok = all(tree.labels[s] == tree.labels[d] for s, d in new.items())
            if ok:
                phi.update(new)
                yield from extend(i + 1, phi)
                for s in new:
                    del phi[s]

    root = tree.root
    yield from extend(0, {root: root})


def random_chain(rng, k):
    choices = [c for c in all_chains(k) if c.length <= 2]
    return rng.choice(choices)


@criterion(4, "cores: only onto endomorphisms, idempotent, order-independent")
def test_c04_cores():
    rng = random.Random(2024)
    reduced = 0
    for _ in range(200):
        k = rng.choice([2, 3])
        n = rng.choice([1, 2])
        chain = random_chain(rng, k)
        # small ranges make trees that fold, so the reduction is exercised
        values = rng.sample(range(k), rng.randint(1, k))
        f = OpTable(k, n, tuple(rng.choice(values) for _ in range(k ** n)))
        tree = build_tree(f, chain)
        core = core_of(tree, seed=rng.randrange(10 ** 6))
        reduced += len(core) < len(tree)
        for phi in endomorphisms(core):
            assert set(phi.values()) == set(core.nodes)
        assert core_of(core, seed=rng.randrange(10 ** 6)).nodes == core.nodes
        other = core_of(tree, seed=rng.randrange(10 ** 6))
        assert trees_isomorphic(core, other)
    assert reduced >= 10


# 5. Label quasiorder laws.

@criterion(5, "label quasiorder laws and class bound")
def test_c05_label_laws():
    group = aut_of_chain(CHAIN3)
    labels = set()
    for n in (1, 2):
        points = list(itertools.product(range(3), repeat=n))
        for f in all_operations(3, n):
            for x in points:
                labels.add(label_of(f, x, group))
    labels = sorted(labels, key=repr)
    size = len(labels)
    assert size <= label_class_bound(CHAIN3) == 3 ** (3 + 2 * 2)
    leq = np.array([[label_leq(a, b) for b in labels] for a in labels])
    assert leq.diagonal().all()
    two_step = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
    assert not (two_step & ~leq).any()
    equal = np.array([[a == b for b in labels] for a in labels])
    assert ((leq & leq.T) == equal).all()
    position = {lab: i for i, lab in enumerate(labels)}
    for g in range(group.order):
        moved = [lab.act(group, g) for lab in labels]
        assert all(m in position for m in moved)
        perm = np.array([position[m] for m in moved])
        assert (leq[np.ix_(perm, perm)] == leq).all()


# 6. The minority operation of a chain.

@criterion(6, "2/3-minority identities, membership, and m = t_A at E empty")
@pytest.mark.parametrize("k", [2, 3, 4])
def test_c06_minority_identities_and_membership(k):
    for chain in all_chains(k):
        m = minority_from_chain(chain)
        for x, y in itertools.product(range(k), repeat=2):
            assert m(x, x, y) == y and m(x, y, x) == x and m(x, y, y) == x
        assert clone_membership(m, chain_clone(chain))


@criterion(6, "2/3-minority identities, membership, and m = t_A at E empty")
@pytest.mark.parametrize("k", [
    2,
    pytest.param(3, marks=pytest.mark.xfail(strict=True, reason=(
        "with no chain every injective triple falls in the first case, so m returns z "
        "where t_A returns x"))),
    pytest.param(4, marks=pytest.mark.xfail(strict=True, reason=(
        "with no chain every injective triple falls in the first case, so m returns z "
        "where t_A returns x"))),
])
def test_c06_empty_chain_minority_is_discriminator(k):
    assert minority_from_chain(ChainE(k)) == discriminator(k)


# 7. The Phi signature for Pol(sigma_0, {0}).

@criterion(7, "Phi signature determines classes of Pol(sigma_0, {0}), at most 42")
def test_c07_phi_classes():
    start = time.perf_counter()
    spec = Relational(3, (make_central_sigma(3, 0),), subsets=(frozenset({0}),))
    session = Session()
    ops = [f for n in (1, 2) for f in enum_clone_ops(spec, n, session)]
    assert set(ops) == {f for f in ops_up_to(3, 2) if clone_membership(f, spec)}
    groups = phi_groups(ops)
    for members in groups.values():
        rep = members[0]
        for f in members[1:]:
            assert is_minor(f, rep, spec, session) is not None
            assert is_minor(rep, f, spec, session) is not None
    part = partition_classes(ops, spec, session)
    assert part.count <= len(groups) <= 7 * 3 * 2
    assert time.perf_counter() - start < 15 * 60


# 8. Covers of the range by boxes of smaller sets.

@criterion(8, "Jablonskii cover for binary ops with 3-element range")
def test_c08_jablonskii():
    checked = 0
    for f in all_operations(3, 2):
        if len(range_of(f)) != 3 or not (depends_on(f, 1) and depends_on(f, 2)):
            continue
        cover = jablonskii_cover(f)
        assert cover is not None and all(len(d) <= 2 for d in cover)
        image = {f.value((a, b)) for a in cover[0] for b in cover[1]}
        assert image == {0, 1, 2}
        checked += 1
    assert checked > 0


# 9. The worked tree example.

@criterion(9, "ten-node tree with a 4-element group and four distinct labels")
def test_c09_example_tree():
    tree = build_tree(OpTable(4, 1, (0, 1, 2, 3)), CHAIN47)
    assert len(tree) == 10 and tree.level_sizes() == [4, 3, 2, 1]
    assert tree.group.order == 4
    labelled = build_tree(OpTable(4, 1, (1, 3, 3, 2)), CHAIN47)
    labels = [labelled.labels[leaf] for leaf in labelled.leaves()]
    assert len(labels) == 4 and len(set(labels)) == 4


# 10. Growth of small clones.

def monotone_count(n):
    """Monotone Boolean n-ary functions by a direct check of every table."""
    points = list(itertools.product((0, 1), repeat=n))
    below = [(i, j) for i, x in enumerate(points) for j, y in enumerate(points)
             if i != j and all(a <= b for a, b in zip(x, y))]
    tables = np.array(list(itertools.product((0, 1), repeat=2 ** n)), dtype=np.int8)
    ok = np.ones(len(tables), dtype=bool)
    for i, j in below:
        ok &= tables[:, i] <= tables[:, j]
    return int(ok.sum())


@criterion(10, "growth: monotone and affine Boolean clones")
def test_c10_growth():
    start = time.perf_counter()
    monotone = Relational(2, (make_bounded_order(2, [(0, 1)]),))
    rows = growth_report(monotone, 4)
    assert rows[0].count == 3
    for row in rows:
        assert row.count == monotone_count(row.n)
        assert row.count >= 2 ** math.comb(row.n, row.n // 2) and row.meets_gilbert
    affine = Relational(2, (make_prime_affine(2),))
    for row in growth_report(affine, 3):
        assert row.count == 2 ** (row.n + 1) == row.affine_value and row.within_affine
    assert time.perf_counter() - start < 60


# 11. The Slupecki clone.

@criterion(11, "Slupecki clone equals Pol iota_3 on unary and binary ops")
def test_c11_slupecki():
    spec = slupecki_chain(3, 2)
    iota = make_iota(3)
    for f in ops_up_to(3, 2):
        assert clone_membership(f, spec) == preserves(f, iota)


# 12. Witness families.

@criterion(12, "witness sanity grid and the e-tuple criterion")
def test_c12_sanity_grid():
    start = time.perf_counter()
    reports = sanity_grid(ks=(3, 4, 5), n_max=6)
    failures = [(r.spec, r.failures()) for r in reports if not r.ok]
    assert not failures
    assert {r.spec.family for r in reports} == set(FAMILY_TAGS) - {"HRegMulti"}
    for k in (3, 4, 5):
        for n in range(3, 7):
            assert check_e_tuple_iff(k, n)
    assert time.perf_counter() - start < 5 * 60


# 13. The first pair of the Slupecki-central family.

def _slup_central(n):
    return witness_family(FamilySpec("SlupCentral", 3, n))


@criterion(13, "f_2 and f_3 of the Slupecki-central family are incomparable")
def test_c13_f3_not_below_f2():
    clone = family_clone(FamilySpec("SlupCentral", 3, 2))
    assert is_minor(_slup_central(3), _slup_central(2), clone) is None


@criterion(13, "f_2 and f_3 of the Slupecki-central family are incomparable")
@pytest.mark.xfail(strict=True, reason=(
    "f_2 is a minor of f_3: the search returns a witness that composes back to f_2"))
def test_c13_f2_not_below_f3():
    clone = family_clone(FamilySpec("SlupCentral", 3, 2))
    assert is_minor(_slup_central(2), _slup_central(3), clone) is None


@criterion(13, "f_2 and f_3 of the Slupecki-central family are incomparable")
def test_c13_search_scope_is_reported():
    clone = family_clone(FamilySpec("SlupCentral", 3, 2))
    session = Session()
    assert oracle_feasible(clone, 3, session) is None
    reason = oracle_feasible(clone, 5, session)
    assert reason is not None and reason.startswith("scope:")
