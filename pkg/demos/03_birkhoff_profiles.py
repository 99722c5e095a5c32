"""Rigid Birkhoff sums across one inner cell.

At the rigidity time q_n the sum phi^(q_n) is continuous and strictly
increasing on each cell with the edge fiftieths removed; its slope rides
q_n log q_n in the middle of the cell and spikes near the right edge where
one orbit point approaches the singularity to ~1/(50 q_n).
"""

import math

import numpy as np

from logcascade import birkhoff as bk
from logcascade.contfrac import alpha_star_table, golden_table
from logcascade.lemma_lab import inner_cell_bounds
from logcascade.observable import make_paper_phi, truncate

table = alpha_star_table(8)
phi = make_paper_phi()
n, cell = 5, 17
q = table.q[n]

left, right = inner_cell_bounds(table, n, cell)
xs = [left + (right - left) * j // 15 for j in range(16)]
vals, _, _ = bk.rigid_values(table, n, xs, phi)
derivs, _, _ = bk.rigid_values(table, n, xs, phi, derivative=True)

print(f"phi^(q_{n}) across inner cell {cell} (q_{n} = {q}):")
print(f"{'s':>6} {'value':>12} {'deriv/(q log q)':>16}")
qlogq = q * math.log(q)
for j, xb in enumerate(xs):
    s = (xb * q) / (1 << table.w) - cell
    print(f"{s:6.3f} {vals[j]:12.5f} {derivs[j] / qlogq:16.3f}")
print("monotone:", bool(np.all(np.diff(vals) > 0)))

# The cocycle property ties sums at different times together.
x = bk.OrbitPoint.from_value(0.3, table.w)
a = bk.cocycle_sum(phi, table, x, 150)
b = bk.cocycle_sum(phi, table, x, 52)
c = bk.cocycle_sum(phi, table, x.advance(52, table), 98)
print("cocycle identity gap:", abs(a.value - b.value - c.value))

# Denjoy-Koksma at a golden-mean denominator: bounded-variation sums stay
# within the variation bound at rigidity times.
golden = golden_table(24)
rep = bk.denjoy_koksma_check(bk.SawtoothObservable(), golden, 20, 200, seed=1)
print(f"sawtooth at q = {golden.q[20]}: max |sum| = {rep.max_deviation:.4f} "
      f"<= {rep.bound}")

tobs = truncate(phi, table.q[3])
rep2 = bk.denjoy_koksma_check(tobs, table, 3, 100, seed=2, derivative=True)
print(f"truncated derivative at q_3: max deviation {rep2.max_deviation:.1f} "
      f"<= {rep2.bound}")
