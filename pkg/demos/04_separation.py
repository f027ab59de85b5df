"""
Bidirectional versus unidirectional testing
===========================================

A small version of the separation experiment: the bidirectional tester
needs a flat number of queries, while the unidirectional tester only
succeeds once its budget grows like n^(2/3).
"""
from __future__ import annotations

import math

from digraph_lab.experiments import cmd_separation, separation_eps
from digraph_lab.patterns import k_star, prepare_pattern

k = 3
dec = prepare_pattern(k_star(k))
print("graph farness of far instances:", separation_eps(k, dec))

rows = cmd_separation(k, [600, 6000], trials=40, seed=7)
print(f"{'n':>6} {'family':>6} {'tester':>15} {'budget':>7} {'reject':>7} {'queries':>9}")
for r in rows:
    print(
        f"{r['n']:>6} {r['family']:>6} {r['tester']:>15} {r['budget']:>7} "
        f"{float(r['reject_rate']):>7.2f} {float(r['mean_queries']):>9.1f}"
    )

# The small budget is ceil(n^(1/3)); the large one scales as n^(2/3).
for n in (600, 6000):
    print(n, "small budget", math.ceil(n ** (1 / 3)))
