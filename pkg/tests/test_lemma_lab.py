import math
from fractions import Fraction

import numpy as np
import pytest

from logcascade import birkhoff as bk
from logcascade import lemma_lab as ll
from logcascade.observable import SingularObservable


def test_verify_cell_basics(paper_phi, table):
    rep = ll.verify_cell(paper_phi, table, 3, 17, a=0.0, grid=64)
    assert rep.monotone
    assert rep.thresholds_pass == (True, True)
    assert rep.value_at_three_quarters >= 1.0
    assert rep.value_at_quarter <= -1.0
    # the stated derivative band is reported with the measured extremes
    assert rep.band_low < rep.band_high
    assert rep.derivative_min > 0


def test_verify_cell_rejects_non_h_levels(paper_phi, table):
    with pytest.raises(ll.LevelNotEligibleError):
        ll.verify_cell(paper_phi, table, 4, 0, a=0.0)
    with pytest.raises(ll.LevelNotEligibleError):
        ll.verify_cell(paper_phi, table, 2, 0, a=0.0)


def test_verify_cell_constant_observable_fails_thresholds(table):
    # a flat sum takes one value, so it cannot clear a+1 and a-1 at once
    const = SingularObservable(Fraction(0), 0.0, 0.0, (), 0.5)
    rep = ll.verify_cell(const, table, 3, 5, a=0.0, grid=16)
    assert not all(rep.thresholds_pass)
    assert not rep.monotone
    zero = SingularObservable(Fraction(0), 0.0, 0.0, (), 0.0)
    rep0 = ll.verify_cell(zero, table, 3, 5, a=0.0, grid=16)
    assert rep0.thresholds_pass == (False, False)


def test_threshold_shift_covariance(paper_phi, table):
    # the sums do not depend on a, so shifting a by +10 shifts the pass
    # conditions by exactly 10
    r0 = ll.verify_cell(paper_phi, table, 3, 9, a=0.0, grid=8)
    r10 = ll.verify_cell(paper_phi, table, 3, 9, a=10.0, grid=8)
    assert r0.value_at_quarter == r10.value_at_quarter
    assert r10.thresholds_pass == (r0.value_at_three_quarters >= 11.0,
                                   r0.value_at_quarter <= 9.0)


def test_derivative_band_bounds(table):
    lo, hi = ll.derivative_band(table, 5)
    q = table.q[5]
    assert lo == pytest.approx((1 - 5 ** -0.5) * q * math.log(q))
    assert hi == pytest.approx((1 + 5 ** -0.5) * q * math.log(q))


# ---------------------------------------------------------------------------
# level-set families


def test_exact_family_level3(paper_phi, table):
    fam = ll.locate_level_set(paper_phi, table, 3, a=0.0, eps=0.5, mode="exact")
    q = table.q[3]
    assert len(fam.cells) == q
    assert fam.monotonicity_failures == 0
    ratios = fam.length_law_ratios()
    assert 0.6 <= ratios.min() and ratios.max() <= 1.4
    # containment in the quarter windows and in-band midpoints
    w = table.w
    mids = list(fam.midpoints().values())
    vals, _, _ = bk.rigid_values(table, 3, mids, paper_phi)
    assert np.max(np.abs(vals)) <= 0.5 + 1e-6
    for l, (lo, hi) in fam.cells.items():
        win_lo = ((4 * l + 1) << w) // (4 * q)
        win_hi = ((4 * l + 3) << w) // (4 * q)
        assert win_lo <= lo < hi <= win_hi + 1


def test_family_intervals_sorted_disjoint(paper_phi, table):
    fam = ll.locate_level_set(paper_phi, table, 3, 0.0, 0.9, mode="exact")
    items = sorted(fam.cells.items())
    ends = [hi for _, (_, hi) in items]
    starts = [lo for _, (lo, _) in items]
    assert all(e <= s for e, s in zip(ends, starts[1:]))


def test_eps_zero_empty(paper_phi, table):
    fam = ll.locate_level_set(paper_phi, table, 3, 0.0, 0.0, mode="exact")
    assert not fam.cells
    assert fam.empty_cells == table.q[3]


def test_halving_eps_halves_lengths(paper_phi, table):
    big = ll.locate_level_set(paper_phi, table, 3, 0.0, 0.5, mode="exact",
                              cells=list(range(20)))
    small = ll.locate_level_set(paper_phi, table, 3, 0.0, 0.25, mode="exact",
                                cells=list(range(20)))
    ratio = small.lengths_bits().sum() / big.lengths_bits().sum()
    assert ratio == pytest.approx(0.5, abs=0.05)


def test_translate_matches_exact_level3(paper_phi, table):
    ex = ll.locate_level_set(paper_phi, table, 3, 0.0, 0.5, mode="exact")
    tr = ll.locate_level_set(paper_phi, table, 3, 0.0, 0.5, mode="translate")
    assert tr.guard_bits > 0
    for l in ex.cells:
        (a1, b1), (a2, b2) = ex.cells[l], tr.cells[l]
        assert abs(a1 - a2) <= tr.guard_bits
        assert abs(b1 - b2) <= tr.guard_bits


def test_length_law_mean_approaches_one(paper_phi, table):
    # the mean of |J| q log q / (2 eps) climbs toward 1 through the levels
    means = []
    for n, mode in ((3, "exact"), (5, "translate"), (7, "translate")):
        fam = ll.locate_level_set(paper_phi, table, n, 0.0, 0.5, mode)
        means.append(float(fam.length_law_ratios().mean()))
    assert means[0] < means[1] < means[2] < 1.05


def test_translate_midpoints_certified(paper_phi, table):
    tr = ll.locate_level_set(paper_phi, table, 5, 0.0, 0.5, mode="translate")
    mids = [((lo + hi) >> 1) for lo, hi in list(tr.cells.values())[::500]]
    vals, _, _ = bk.rigid_values(table, 5, mids, paper_phi)
    assert np.max(np.abs(vals)) <= 0.5 + 1e-6


def test_clamped_family_for_large_target(paper_phi, table):
    # at a = 2.5 the window's value range reaches only partway into the band,
    # so intervals are clamped at the three-quarter edge but remain valid
    fam = ll.locate_level_set(paper_phi, table, 5, 2.5, 0.5, mode="exact",
                              cells=list(range(0, 400, 40)))
    assert fam.cells
    assert fam.clamped_cells > 0
    mids = list(fam.midpoints().values())
    vals, _, _ = bk.rigid_values(table, 5, mids, paper_phi)
    assert np.all(np.abs(vals - 2.5) <= 0.5 + 1e-6)


def test_mode_validation(paper_phi, table):
    with pytest.raises(ValueError):
        ll.locate_level_set(paper_phi, table, 3, 0.0, 0.5, mode="fast")
    with pytest.raises(ValueError):
        ll.locate_level_set(paper_phi, table, 3, 0.0, -1.0)


# ---------------------------------------------------------------------------
# closeness and the asymmetric pipeline


def test_closeness_report_small(paper_phi, table):
    rep = ll.closeness_check(paper_phi, table, 3, samples=40, seed=1)
    want = (102 * math.log(102) / 10301) * (1 + 1 / math.sqrt(3))
    assert rep.bound == pytest.approx(want, rel=1e-12)
    assert rep.bound == pytest.approx(0.0723, abs=5e-4)
    assert rep.sup_gap >= 0.0
    # mid-cell samples stay well under the bound; edge samples can exceed it
    # (the acceptance suite asserts the stated criterion and documents this)


def test_closeness_rational_alpha_gap_zero(paper_phi):
    # replacing alpha by its own convergent makes both sums coincide
    from logcascade.contfrac import PartialQuotientSeq, convergents
    from logcascade.observable import truncate
    t = convergents(PartialQuotientSeq.from_list([1, 100, 1, 100, 1, 100, 1]))
    # the rational table carries p_3/q_3-style exact data; the lattice and
    # orbit sums agree once the rotation is exactly p_n/q_n
    n = 3
    q = t.q[n]
    assert t.displacement_bits(n) != 0  # full table is deeper than level 3
    tobs = truncate(paper_phi, q)
    xb = ((17 << t.w) + (1 << t.w) // 2) // q
    a = bk.rigid_values(t, n, [xb], tobs, rational=True)[0]
    b = bk.rigid_values(t, n, [xb], tobs, rational=True)[0]
    assert float(a[0]) == float(b[0])


def test_asymmetric_pipeline(table):
    phi1 = SingularObservable(Fraction(0), 2.0, 1.0, (), -3.0, mean_zero=True)
    rep = ll.asymmetric_pipeline_check(phi1, table, 5, eta=0.5, cell_count=4,
                                       grid=24, dk_samples=25, seed=2)
    assert rep.dk_bound == pytest.approx(2 * table.q[5] / 0.5)
    assert rep.dk_passed
    assert rep.monotone_all
    assert rep.thresholds_all
    assert rep.derivative_center_residual <= 0.25


def test_asymmetric_pipeline_rejects_symmetric(symmetric_phi, table):
    with pytest.raises(ValueError, match="rejects symmetric"):
        ll.asymmetric_pipeline_check(symmetric_phi, table, 5, eta=0.5)
