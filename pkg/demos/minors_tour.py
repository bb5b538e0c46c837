"""C-minors and C-equivalence on small domains, checked two ways.

Run with: python demos/minors_tour.py
"""

import itertools

from cloneminors.core import all_operations, range_of
from cloneminors.experiments import cmd_crosscheck
from cloneminors.relations import ChainE, chain_clone, clone_membership, full_clone, projection_clone
from cloneminors.search import is_minor, partition_classes
from cloneminors.witnesses import discriminator, minority_from_chain

# Over the full clone only the range matters.
ops = [f for n in (1, 2) for f in all_operations(2, n)]
part = partition_classes(ops, full_clone(2))
print(f"full clone, k=2, arity <= 2: {part.count} classes")
for cls in part.classes():
    print(f"  range {sorted(range_of(cls[0]))}: {len(cls)} ops")

# Over the projections, classes are tables up to renaming variables.
part = partition_classes(ops, projection_clone(2))
print(f"projection clone, k=2, arity <= 2: {part.count} classes")

# A witness for a minor relation.
f, g = next(all_operations(2, 1)), discriminator(2)
w = is_minor(f, g, full_clone(2))
print(f"{f!r} = t_A o {[h.table for h in w.hs]}")

# Trees against the brute-force search for a chain clone.
chain = ChainE.from_partitions(3, [[[0, 1], [2]]])
report = cmd_crosscheck(chain, 2, seed=0, max_pairs=300)
print(report.render_text())

# The minority operation of a chain lies in its clone.
m = minority_from_chain(chain)
ok = all(m(x, x, y) == y and m(x, y, x) == x and m(x, y, y) == x
         for x, y in itertools.product(range(3), repeat=2))
print("minority identities hold:", ok)
print("minority in Pol(E, Aut E, P+(A)):", clone_membership(m, chain_clone(chain)))
