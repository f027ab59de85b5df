"""
Two frequency distributions with proportional moments
=====================================================

Walk through the exact rational objects behind the hard instances: the
alternating binomial vector, the pair (p, q), and the moment ratios.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from digraph_lab.occurrence import (
    alternating_binomial_vector,
    make_p,
    make_q,
    moment,
    proportionality_factor,
    verify_proportional_moments,
)

k = 4

# The vector (-1)^i binom(k, i) is orthogonal to i^j for j = 1..k-1
# and has inner product -1 with the constant row.
vec = alternating_binomial_vector(k)
vander = np.array([[i**j for i in range(1, k + 1)] for j in range(k)])
print("alternating vector:", vec)
print("Vandermonde rows times vector:", (vander @ np.array(vec)).tolist())

# p never puts mass on frequency k; q does.
p, q = make_p(k), make_q(k)
print("p =", [str(x) for x in p.probs])
print("q =", [str(x) for x in q.probs])

# Every moment below k differs by the same factor.
rho = proportionality_factor(k)
for j in range(1, k):
    print(f"E_q[i^{j}] / E_p[i^{j}] = {moment(q, j) / moment(p, j)}   (rho = {rho})")

# The check is exact for every k we care about.
for k in range(2, 13):
    wit = verify_proportional_moments(make_p(k), make_q(k), k)
    assert wit.valid and wit.rho == proportionality_factor(k)
    assert make_q(k)[k] >= Fraction(1, 2**k)
print("k = 2..12: all moment ratios equal rho")
