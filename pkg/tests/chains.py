"""Shared test helper: enumeration of chains of equivalence relations."""

import itertools

from cloneminors.relations import ChainE


def all_chains(k):
    """Every strictly increasing chain of nontrivial equivalences on k points."""
    labelings = set()
    for lab in itertools.product(range(k), repeat=k):
        canon, seen = [], {}
        for x in lab:
            canon.append(seen.setdefault(x, len(seen)))
        if 1 < len(seen) < k:
            labelings.add(tuple(canon))
    parts = [[[a for a in range(k) if lab[a] == b] for b in range(max(lab) + 1)] for lab in labelings]

    def finer(p, q):
        return all(any(set(b) <= set(c) for c in q) for b in p) and p != q

    chains = [[]]
    frontier = [[p] for p in parts]
    while frontier:
        chains.extend(frontier)
        frontier = [c + [p] for c in frontier for p in parts if finer(c[-1], p)]
    return [ChainE.from_partitions(k, c) for c in chains]
