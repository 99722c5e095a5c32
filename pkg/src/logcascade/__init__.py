"""Numerics laboratory for cylindrical cascades over irrational rotations.

The package certifies, at desk scale, the quantitative machinery behind the
ergodicity of the skew product (x, y) -> (x + alpha, y + phi(x)) when phi has
one logarithmic singularity and zero mean: exact continued fractions,
high-precision Birkhoff sums at rigidity times, level-set interval families,
hole accounting for coverage arguments, and an empirical essential-value probe.
"""

from .contfrac import (
    ConvergentTable,
    PartialQuotientSeq,
    alpha_star_table,
    check_conditions,
    convergents,
    expand,
    gauss_digit_stats,
    golden_table,
    levy_estimate,
)
from .observable import (
    SingularObservable,
    TruncatedObservable,
    decompose_asymmetric,
    make_paper_phi,
    make_symmetric_phi,
    truncate,
)

__version__ = "0.1.0"
