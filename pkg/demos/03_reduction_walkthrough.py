"""
From a sequence to a bounded-degree digraph
===========================================

Decompose the seven-vertex example pattern, reduce the six-element
sequence 1 2 1 3 2 1, and watch the lazy oracle answer queries.
"""
from __future__ import annotations

from digraph_lab.embed import count_subgraph_copies
from digraph_lab.occurrence import IntSequence
from digraph_lab.oracle import OracleSession, QueryModel
from digraph_lab.patterns import decomposition_report, three_source_pattern, prepare_pattern
from digraph_lab.reduction import ReductionOracle, SequenceAccess, build_offline, consistency_check

h = three_source_pattern()
dec = prepare_pattern(h)
print(decomposition_report(dec))

seq = IntSequence([1, 2, 1, 3, 2, 1], dec.k)
g = build_offline(seq, dec, seed=0)
print(g, "copies of H:", count_subgraph_copies(g, h))

# Value 1 occurs k = 3 times, so only its center copy receives all three
# source components. Values 2 and 3 leave their copies incomplete.

access = SequenceAccess(seq)
oracle = ReductionOracle(access, dec, seq.n, seed=0)
session = OracleSession(oracle, QueryModel.UNIDIRECTIONAL)

# A center vertex is answered from the pattern alone.
print("out_neighbor(26, 1) =", session.out_neighbor(26, 1), "sequence reads:", access.query_count)

# A source vertex costs one sequence read, and only the first time.
for v in (1, 2, 3, 1):
    print(f"out_neighbor({v}, 1) =", session.out_neighbor(v, 1), "sequence reads:", access.query_count)

print("lazy answers match the offline graph:", consistency_check(seq, dec, seed=0, order_seed=1))
