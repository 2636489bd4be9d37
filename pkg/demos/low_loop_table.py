"""
Cohomology of the odd graph complex at low loop order
=====================================================

Rows are the loop order b = e - v, columns the degree d = 1 - v + 2e.
Every slot printed here is interior, so the numbers are exact.
"""

from gch.complexes import DimensionTable, Engine, gc_table

# two random 31-bit primes, with a rational recount if they ever disagree
engine = Engine(field="p2", seed=0)

# rows 0..3, graphs with at most 7 vertices
entries = {}
for b in range(4):
    entries.update(gc_table([b], range(3 + 2 * b, 9 + 2 * b), engine).entries)

table = DimensionTable("b", entries)
print(table.pretty())

# the nonzero classes: the loop L3, the theta graph, K4 and one at b=3
print("nonzero at", sorted(k for k, x in entries.items() if x))

# chain group sizes behind a few of the entries
for g in [(3, 3, 0), (2, 3, 0), (4, 6, 0), (6, 9, 0), (7, 10, 0)]:
    print(g, "basis size", len(engine.basis(g)))
