"""Continued-fraction engine tour.

The laboratory's canonical rotation number is the positive root of
x**2 + 100*x - 100, whose expansion repeats (1, 100).  Every other level has
q_{n+1} >= 100 q_n with alpha below its convergent, which is exactly the
regime where the rigid-sum lemmas operate.
"""

from logcascade.contfrac import (
    PartialQuotientSeq,
    alpha_star_table,
    check_conditions,
    convergents,
    gauss_digit_stats,
    gauss_prediction,
    levy_estimate,
)

table = alpha_star_table(8)
print("alpha* ~", table.alpha_float)
print("convergents:")
for i in range(table.depth + 1):
    print(f"  p_{i}/q_{i} = {table.p[i]}/{table.q[i]}")
print("exact invariant checks:", table.verify_invariants())
print("large-ratio levels:", table.h_set())

profile = check_conditions(table, subsequence=[3, 5, 7])
print("series partial sums (1/log q_n):",
      [round(s, 4) for s in profile.series_partial_sums])
print("subsequence density liminf:", profile.density_liminf)

# For comparison, the golden mean never reaches the 100x ratio.
golden = convergents(PartialQuotientSeq.from_pattern((1,), 20))
print("golden-mean large-ratio levels:", golden.h_set())

# Almost-every-alpha statistics: digit frequencies against the invariant
# measure, and the growth exponent of the denominators.
stats = gauss_digit_stats(300, 40, seed=7)
print("digit frequencies vs predictions:")
for k in range(1, 6):
    print(f"  k={k}: {stats.frequency(k):.4f} vs {gauss_prediction(k):.4f}")
est = levy_estimate(100, 50, seed=7)
print(f"log q_n / n at depth 50: mean {est.mean:.4f}, spread {est.spread:.4f}")
print("limit constant pi^2/(12 log 2) =", 1.1865691104156255)
