"""Observable shapes: one-sided, symmetric, and asymmetric singularities.

The asymmetric shape splits into a one-sided part plus a symmetric part;
only the one-sided part drives the monotone rigid sums, while the symmetric
remainder contributes O(q_n), small against q_n log q_n.
"""

import math

from logcascade.observable import (
    SingularObservable,
    decompose_asymmetric,
    make_paper_phi,
    make_symmetric_phi,
    truncate,
)
from fractions import Fraction

phi = make_paper_phi()
print("one-sided phi(x) = -1 - log(1-x):")
print("  phi(0.5) =", phi(0.5))
print("  phi'(0.5) =", phi.derivative(0.5))
print("  mean =", phi.mean, "classification =", phi.classification)

sym = make_symmetric_phi()
print("symmetric phi(0.5) =", sym(0.5), "classification =", sym.classification)

arnold = SingularObservable(Fraction(0), 2.0, 1.0, (), -3.0, mean_zero=True)
dec = decompose_asymmetric(arnold)
print("(2,1) shape splits into one-sided", (dec.tilde.c_left, dec.tilde.c_right),
      "plus symmetric D =", dec.symmetric.c_left)
x = 0.37
print("pointwise recomposition gap:",
      abs(dec.tilde(x) + dec.symmetric(x) - arnold(x)))

# Truncation next to the singular approach: exact closed forms.
q5 = 10403
tobs = truncate(phi, q5)
m = 50 * q5
print(f"truncated at 1/(50 q_5) = 1/{m}:")
print(f"  variation        = {tobs.variation:.6f} (= 2 log(50 q) - 1)")
print(f"  mean             = {tobs.mean:.6e} (= -log(50 q)/(50 q))")
print(f"  commonly quoted  = {tobs.paper_stated_mean:.6e} (approximation)")
print(f"  Var of phi-bar'  = {tobs.derivative_variation:.0f} (= 100 q - 1)")
print(f"  mean of phi-bar' = {tobs.derivative_mean:.6f} (= log(50 q))")
assert abs(tobs.variation - (2 * math.log(m) - 1)) < 1e-12
