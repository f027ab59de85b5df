"""
What a histogram of samples reveals
===================================

Sample Poisson(s) positions from a yes-instance and a far instance and
measure how well a fitted fingerprint statistic tells them apart.
"""
from __future__ import annotations

import math

from digraph_lab.occurrence import make_p, make_q
from digraph_lab.testers import poisson_histogram_distinguisher

k, n = 3, 6000
for s in (0, math.ceil(n ** (1 / 3)), math.ceil(n ** 0.5), math.ceil(n ** (2 / 3)), 5 * math.ceil(n ** (2 / 3))):
    stats = poisson_histogram_distinguisher(make_p(k), make_q(k), k, n, s, trials=200, seed=3)
    print(f"s={s:>6}  advantage={stats.advantage:.3f}")

# The simple threshold on values seen at least ceil(k/2) times is weaker.
s = 5 * math.ceil(n ** (2 / 3))
stats = poisson_histogram_distinguisher(make_p(k), make_q(k), k, n, s, 200, 3, statistic="collision")
print(f"collision statistic at s={s}: advantage={stats.advantage:.3f}")
