"""
Yes-instances and far instances
===============================

Realize p and q as integer sequences and compare what a sampler sees.
"""
from __future__ import annotations

from digraph_lab.occurrence import (
    build_family,
    histogram,
    make_q,
    nearest_realizable,
    occurrence_farness,
    realizable_step,
)
from digraph_lab.errors import Unrealizable

k = 3

# Lengths must be multiples of a step fixed by the denominators of q.
step = realizable_step(make_q(k))
print("realizable step for q:", step)
print("nearest lengths to 13:", nearest_realizable(make_q(k), 13))
try:
    build_family("B", k, 13, seed=0)
except Unrealizable as exc:
    print("n=13 ->", exc)

a = build_family("A", k, 12, seed=1)
b = build_family("B", k, 12, seed=1)
print("C_A:", a.tolist(), "histogram", histogram(a).counts, "farness", occurrence_farness(a, k))
print("C_B:", b.tolist(), "histogram", histogram(b).counts, "farness", occurrence_farness(b, k))

# At scale the farness of the far family stays at q_k / k.
big = build_family("B", k, 60000, seed=2)
print("n=60000 far instance farness:", occurrence_farness(big, k), ">= q_k/k =", make_q(k)[k] / k)
