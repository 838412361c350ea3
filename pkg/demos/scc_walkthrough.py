# Maintaining strongly connected components while the graph changes.
#
#     python3 demos/scc_walkthrough.py

from congraph import SccGraph
from congraph.oracle import tarjan_scc

g = SccGraph()
for k in range(1, 11):
    g.add_vertex(k)

# three cycles joined by one-way bridges: 3 -> 4 and 7 -> 9
edges = [(1, 2), (2, 3), (3, 1), (3, 4),
         (4, 5), (5, 6), (6, 7), (7, 4), (7, 9),
         (8, 9), (9, 10), (10, 8)]
for u, v in edges:
    g.add_edge(u, v)
g.compact_empty_components()

print("components after seeding")
print(g.export_partition())
print("signed edge list of 10:", g.edge_lists()[10])

# closing the loop from the last cycle back to the first merges everything
g.add_edge(8, 3)
print("after adding 8 -> 3, empties reaped:", g.compact_empty_components())
print(g.export_partition())

# checkScc and belongsTo are lock-free reads
print("1 and 10 together?", g.check_scc(1, 10))

# pulling 9 out breaks the 8-9-10 cycle and the bridge through it
g.remove_vertex(9)
g.compact_empty_components()
print("after removing vertex 9")
print(g.export_partition())

assert g.partition() == tarjan_scc(g.snapshot())
print("matches offline Tarjan, ccCount =", g.cc_count.value)
