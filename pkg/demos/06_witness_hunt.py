"""Essential-value witnesses.

A number a is an essential value when every positive-measure set C returns
into itself at some time N with Birkhoff sum within eps of a.  At rigidity
times the return displacement is below 1/q_{n+1}, so any level-set interval
inside C lands back in C; scanning levels and cells produces an explicit
certified witness for each target a - the numerical shadow of the fact that
the essential-value group is all of the reals.
"""

from logcascade import essval as ev
from logcascade.birkhoff import OrbitPoint, rigid_sum
from logcascade.contfrac import alpha_star_table
from logcascade.observable import make_paper_phi

table = alpha_star_table(8)
phi = make_paper_phi()
c_set = ev.IntervalSet.from_floats([(0.1, 0.35)], table.w)

for a in (-1.0, 0.0, 1.0):
    rec = ev.witness_search(c_set, a, 0.5, [3, 5], table, phi)
    print(f"a = {a:+.1f}: level {rec.level}, cell {rec.cell}, "
          f"x = {rec.x_bits / (1 << table.w):.6f}")
    print(f"  Birkhoff value {rec.birkhoff_value:+.4f} (|. - a| < 0.5: "
          f"{rec.value_in_band}); displacement {rec.displacement:.3e} "
          f"{'down' if rec.displacement_dir < 0 else 'up'}")
    print(f"  x in C: {rec.in_set}; x + q_n alpha in C: {rec.returns_to_set}")
    v = rigid_sum(phi, table, OrbitPoint(rec.x_bits, table.w), rec.level)
    print(f"  engine re-verification: {v.value:+.4f}")

tiny = ev.IntervalSet.from_floats([(0.5, 0.5 + 2.0 ** -45)], table.w)
miss = ev.witness_search(tiny, 0.0, 0.25, [3], table, phi)
print("sub-resolution target set -> found:", miss.found,
      "| near misses:", miss.near_misses)
