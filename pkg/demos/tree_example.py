"""Labeled trees on a four-element set with a chain of two equivalences.

Run with: python demos/tree_example.py
"""

from cloneminors.core import OpTable, constant
from cloneminors.relations import ChainE
from cloneminors.trees import build_tree, core_with_trace, minor_via_trees, trees_isomorphic

# A = {0,1,2,3}; levels {0},{1},{2,3} and {0,1},{2,3}
chain = ChainE.from_partitions(4, [[[0], [1], [2, 3]], [[0, 1], [2, 3]]])
g = OpTable(4, 1, (1, 3, 3, 2))

tree = build_tree(g, chain)
print(f"|Aut E| = {tree.group.order}, {len(tree)} nodes, level sizes {tree.level_sizes()}")
print(tree.render())
for leaf in tree.leaves():
    print(f"leaf {tree.frame.point(leaf)}: {tree.labels[leaf].to_json()}")

# Constants fold: the core of a binary constant is smaller than its tree.
small = ChainE.from_partitions(3, [[[0, 1], [2]]])
c1, c2 = constant(3, 0), constant(3, 0, 2)
result = core_with_trace(build_tree(c2, small))
print(f"binary constant: tree {build_tree(c2, small).level_sizes()} -> core {result.tree.level_sizes()}")
for step in result.trace:
    print(f"  removed the orbit of node {step['removed_orbit_of']}: "
          f"{step['size_before']} -> {step['size_after']} nodes")
print("unary and binary constant are equivalent:",
      minor_via_trees(c1, c2, small) and minor_via_trees(c2, c1, small))
print("their cores are isomorphic:",
      trees_isomorphic(core_with_trace(build_tree(c1, small)).tree, result.tree))
