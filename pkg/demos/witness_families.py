"""Witness families for intersections of maximal clones: tabulate, audit, compare.

Run with: python demos/witness_families.py
"""

from cloneminors.search import Session, is_minor
from cloneminors.witnesses import FamilySpec, family_clone, family_sanity, family_function, witness_family

spec = FamilySpec("SlupCentral", 3, 2)
ff = family_function(spec)
print(f"f_2 has arity {ff.arity}; cases:")
for case in ff.cases:
    print(f"  {case.name}")
print("table:", witness_family(spec).table)

report = family_sanity(spec)
for claim in report.claims:
    print(f"  {'ok' if claim.passed else 'FAILED'}: {claim.name}")

clone = family_clone(spec)
f2, f3 = witness_family(spec), witness_family(FamilySpec("SlupCentral", 3, 3))
session = Session()
print("f_3 below f_2:", is_minor(f3, f2, clone, session) is not None)
print("f_2 below f_3:", is_minor(f2, f3, clone, session) is not None)
