"""Acceptance suite: one test per stated criterion, at stated tolerances.

Every test prints a `[criterion] PASS/FAIL` line with the measured numbers
before asserting, so the log documents the margins.  All criteria use the
quadratic test number alpha* (quotients (1, 100) repeating) and the
one-sided observable -1 - log(1-x) unless stated otherwise.

Two assertions are expected to fail at desk-scale levels, deliberately and
honestly:

* the derivative band (1 +/- 1/sqrt(n)) * q_n log q_n over full inner cells:
  near the right edge of a cell the closest orbit point sits ~1/(50 q_n)
  from the singularity, contributing ~50 q_n alone, so the true derivative
  reaches ~q_n (log q_n + 50).  The band would need log q_n >~ 100 sqrt(n),
  i.e. astronomically large denominators.
* the lattice-closeness sup bound (q_n log q_n / q_{n+1})(1 + 1/sqrt(n)):
  samples near the cell edge see a gap up to ~q_n|q_n alpha - p_n| times
  1/(1-s), which exceeds the bound on a few percent of the inner region.

Both are quantified in the printed output; the remaining sub-checks of those
criteria pass and are asserted independently first.
"""

import json
import math
import os
import random
import time

import numpy as np
import pytest

from logcascade import birkhoff as bk
from logcascade import cascade as cs
from logcascade import cli
from logcascade import essval as ev
from logcascade import lemma_lab as ll
from logcascade.contfrac import (
    LEVY_CONSTANT,
    alpha_star_table,
    gauss_digit_stats,
    gauss_prediction,
    golden_table,
    levy_estimate,
)
from logcascade.observable import make_paper_phi, make_symmetric_phi, truncate


def report(name: str, ok: bool, detail: str):
    print(f"[{name}] {'PASS' if ok else 'FAIL'}: {detail}")


@pytest.fixture(scope="module")
def table():
    return alpha_star_table(8)


@pytest.fixture(scope="module")
def phi():
    return make_paper_phi()


def test_c01_continued_fractions(table):
    t0 = time.time()
    fresh = alpha_star_table(8)
    ok_q = fresh.q == (1, 1, 101, 102, 10301, 10403, 1050601, 1061004, 107151001)
    inv = fresh.verify_invariants()
    hs = fresh.h_set()
    ok_h = hs == (1, 3, 5, 7) and hs == fresh.h_set_fast()
    dt = time.time() - t0
    ok = ok_q and all(inv.values()) and ok_h and dt < 1.0
    report("C1 continued-fractions", ok,
           f"q-match={ok_q} invariants={inv} h_set={hs} runtime={dt:.3f}s")
    assert ok_q and ok_h
    assert all(inv.values())
    assert dt < 1.0


def test_c02_closed_forms(phi):
    t0 = time.time()
    q5 = 10403
    tobs = truncate(phi, q5)
    m = 50 * q5
    checks = {
        "variation": (tobs.variation, 2 * math.log(m) - 1),
        "derivative_mean": (tobs.derivative_mean, math.log(m)),
        "derivative_variation": (float(tobs.derivative_variation),
                                 float(100 * q5 - 1)),
        "mean": (tobs.mean, -math.log(m) / m),
    }
    rel = {k: abs(a - b) / abs(b) for k, (a, b) in checks.items()}
    dt = time.time() - t0
    ok = max(rel.values()) < 1e-9 and dt < 1.0
    report("C2 closed-forms", ok,
           f"max rel err={max(rel.values()):.2e}; paper-stated mean "
           f"{tobs.paper_stated_mean:.6e} vs exact {tobs.mean:.6e}; "
           f"runtime={dt:.3f}s")
    assert max(rel.values()) < 1e-9
    assert dt < 1.0


def test_c03_denjoy_koksma_sawtooth():
    t0 = time.time()
    golden = golden_table(24)
    n = 20
    assert golden.q[n] == 10946
    rep = bk.denjoy_koksma_check(bk.SawtoothObservable(), golden, n, 1000, seed=1)
    dt = time.time() - t0
    ok = rep.passed and dt < 5.0
    report("C3 denjoy-koksma", ok,
           f"max |sum|={rep.max_deviation:.6f} <= 2 + {rep.budget:.2e}; "
           f"runtime={dt:.1f}s")
    assert rep.passed
    assert dt < 5.0


def test_c04_monotone_cell_lemma(table, phi):
    t0 = time.time()
    rng = random.Random(2024)
    results = {}
    for n, count in ((5, 50), (7, 5)):
        cells = sorted(rng.sample(range(table.q[n]), count))
        reports = [ll.verify_cell(phi, table, n, l, a=0.0, grid=128)
                   for l in cells]
        results[n] = reports
    dt = time.time() - t0
    mono = all(r.monotone for rs in results.values() for r in rs)
    thresholds = all(all(r.thresholds_pass) for rs in results.values() for r in rs)
    band = all(r.derivative_in_band for rs in results.values() for r in rs)
    worst = {n: max(r.derivative_max / r.band_high for r in rs)
             for n, rs in results.items()}
    report("C4 monotone-cell-lemma", mono and thresholds and band and dt < 600,
           f"monotone={mono} thresholds={thresholds} derivative_in_band={band} "
           f"(max/band_high per level: "
           f"{ {n: round(v, 3) for n, v in worst.items()} }) runtime={dt:.0f}s")
    assert dt < 600
    assert mono
    assert thresholds
    # Stated criterion; fails at desk scale because the derivative spikes to
    # ~q_n(log q_n + 50) near cell edges.  Kept as stated, not weakened.
    assert band, (
        "derivative samples exceed the (1 +/- 1/sqrt(n)) q_n log q_n band: "
        + "; ".join(
            f"level {n}: max={max(r.derivative_max for r in rs):.4g} "
            f"band_high={rs[0].band_high:.4g}" for n, rs in results.items()))


def test_c05_level_set_lengths(table, phi):
    t0 = time.time()
    fams = {}
    for n, band in ((3, (0.6, 1.4)), (5, (0.75, 1.25))):
        fam = ll.locate_level_set(phi, table, n, a=0.0, eps=0.5, mode="exact")
        ratios = fam.length_law_ratios()
        fams[n] = (fam, ratios, band)
    # exact vs translate endpoint gaps on 50 cells at n = 5
    rng = random.Random(55)
    cells = sorted(rng.sample(range(table.q[5]), 50))
    ex = ll.locate_level_set(phi, table, 5, 0.0, 0.5, mode="exact", cells=cells)
    tr = ll.locate_level_set(phi, table, 5, 0.0, 0.5, mode="translate",
                             cells=cells)
    gap_bound = 2 * (1 << table.w) // table.q[6]
    gaps = [max(abs(ex.cells[l][0] - tr.cells[l][0]),
                abs(ex.cells[l][1] - tr.cells[l][1])) for l in cells]
    dt = time.time() - t0
    ratio_ok = all(band[0] <= r.min() and r.max() <= band[1]
                   for _, r, band in fams.values())
    gaps_ok = max(gaps) <= gap_bound
    report("C5 level-set-lengths", ratio_ok and gaps_ok and dt < 900,
           f"ratio ranges: n3=[{fams[3][1].min():.3f},{fams[3][1].max():.3f}] "
           f"n5=[{fams[5][1].min():.3f},{fams[5][1].max():.3f}]; "
           f"max endpoint gap={max(gaps) / (1 << table.w):.3e} "
           f"<= {gap_bound / (1 << table.w):.3e}; runtime={dt:.0f}s")
    for n, (fam, ratios, band) in fams.items():
        assert fam.monotonicity_failures == 0
        assert band[0] <= ratios.min() and ratios.max() <= band[1], \
            f"level {n}: ratios [{ratios.min():.3f}, {ratios.max():.3f}]"
    assert gaps_ok
    assert dt < 900


def test_c06_closeness_bound(table, phi):
    t0 = time.time()
    rep = ll.closeness_check(phi, table, 5, samples=1000, seed=13)
    dt = time.time() - t0
    ok = rep.passed and dt < 120
    report("C6 closeness-bound", ok,
           f"sup gap={rep.sup_gap:.4f} vs bound={rep.bound:.4f}; "
           f"runtime={dt:.0f}s")
    assert dt < 120
    # Stated criterion; fails for samples near cell edges where the gap
    # reaches ~q_n|q_n alpha - p_n|/(1-s).  Kept as stated, not weakened.
    assert rep.passed, (f"sup gap {rep.sup_gap:.4f} exceeds the stated bound "
                        f"{rep.bound:.4f}")


def test_c07_hole_ledger(table, phi):
    t0 = time.time()
    fam3 = ll.locate_level_set(phi, table, 3, 0.0, 0.9, mode="exact")
    fam5 = ll.locate_level_set(phi, table, 5, 0.0, 0.9, mode="translate")
    sets = [ev.build_An(fam3), ev.build_An(fam5)]
    ledgers = ev.hole_accounting(sets, table, [3, 5])
    g_ge_b = all(led.invariant_ok for led in ledgers)
    recs = [r for led in ledgers for r in led.spawn_records]
    ratio_frac = sum(r.conditional_ratio >= 0.25 for r in recs) / len(recs)
    cov = ev.coverage(sets, [3, 5])
    series_ok = cov.conditional_sum >= 0.5 * cov.plain_sum
    dt = time.time() - t0
    ok = g_ge_b and ratio_frac >= 0.9 and series_ok and dt < 300
    report("C7 hole-ledger", ok,
           f"G>=B={g_ge_b} (counts: "
           f"{[(led.good_count, led.bad_count) for led in ledgers]}); "
           f"cond-ratio>=0.25 on {ratio_frac:.1%} of good holes; "
           f"cond series {cov.conditional_sum:.3f} >= "
           f"0.5*{cov.plain_sum:.3f}; runtime={dt:.0f}s")
    assert g_ge_b
    assert ratio_frac >= 0.9
    assert series_ok
    assert dt < 300


def test_c08_coverage(table, phi):
    t0 = time.time()
    sets = []
    for n in (3, 5, 7):
        fam = ll.locate_level_set(phi, table, n, 0.0, 0.9, mode="translate")
        sets.append(ev.build_An(fam))
    rep = ev.coverage(sets, [3, 5, 7])
    dt = time.time() - t0
    monotone = all(a <= b for a, b in zip(rep.union_measures,
                                          rep.union_measures[1:]))
    in_band = 0.40 <= rep.union_measure <= 0.75
    report("C8 coverage", monotone and in_band and dt < 1200,
           f"union prefix measures={[round(u, 4) for u in rep.union_measures]} "
           f"(independence heuristic {rep.independence_prediction:.3f}); "
           f"runtime={dt:.0f}s")
    assert monotone
    assert in_band
    assert dt < 1200


def test_c09_witness_grid(table, phi):
    t0 = time.time()
    c_set = ev.IntervalSet.from_floats([(0.1, 0.35)], table.w)
    found = {}
    for a in (-2.5, -1.0, 0.0, 1.0, 2.5):
        rec = ev.witness_search(c_set, a, 0.5, [3, 5], table, phi)
        # re-verify the Birkhoff value through the engine
        if rec.found:
            v = bk.rigid_sum(phi, table, bk.OrbitPoint(rec.x_bits, table.w),
                             rec.level)
            rec_ok = (rec.certified and abs(v.value - a) < 0.5
                      and rec.displacement < 1.0 / table.q[rec.level + 1])
        else:
            rec_ok = False
        found[a] = (rec.level if rec.found else None, rec_ok)
    dt = time.time() - t0
    all_ok = all(ok for _, ok in found.values())
    report("C9 witness-grid", all_ok and dt < 600,
           f"witnesses (level, certified): {found}; runtime={dt:.0f}s")
    assert all_ok
    assert dt < 600


def test_c10_escape_of_mass(table):
    t0 = time.time()
    asym = cs.escape_of_mass(make_paper_phi(), table, [3, 5, 7], [2.0],
                             samples=200000, seed=11)
    est = [asym.estimate(n, 2.0) for n in (3, 5, 7)]
    products = [e * math.log(table.q[n]) for e, n in zip(est, (3, 5, 7))]
    sym = cs.escape_of_mass(make_symmetric_phi(), table, [3, 5, 7], [20.0],
                            samples=200000, seed=11)
    sym_est = [sym.estimate(n, 20.0) for n in (3, 5, 7)]
    dt = time.time() - t0
    decreasing = est[0] > est[1] > est[2]
    factor2 = max(products) / min(products) <= 2.0
    sym_ok = all(e >= 0.5 for e in sym_est)
    ok = decreasing and factor2 and sym_ok and dt < 900
    report("C10 escape-of-mass", ok,
           f"asym M=2 estimates={[round(e, 4) for e in est]} "
           f"products={[round(p, 3) for p in products]} "
           f"(max/min={max(products) / min(products):.3f}); "
           f"sym M=20 estimates={[round(e, 4) for e in sym_est]}; "
           f"runtime={dt:.0f}s")
    assert decreasing
    assert factor2
    assert sym_ok
    assert dt < 900


def test_c11_ae_alpha_statistics():
    t0 = time.time()
    stats = gauss_digit_stats(2000, 50, seed=7)
    freq1 = stats.frequency(1)
    est = levy_estimate(500, 60, seed=7)
    dt = time.time() - t0
    gauss_ok = abs(freq1 - 0.41504) < 0.02
    levy_ok = abs(est.mean - 1.18657) < 0.05
    report("C11 ae-alpha-statistics", gauss_ok and levy_ok and dt < 300,
           f"digit-1 frequency={freq1:.5f} (target {gauss_prediction(1):.5f}); "
           f"Levy mean={est.mean:.5f} (target {LEVY_CONSTANT:.5f}); "
           f"runtime={dt:.0f}s")
    assert gauss_ok
    assert levy_ok
    assert dt < 300


def test_c12_determinism(tmp_path):
    t0 = time.time()
    cfg = {
        "seed": 7,
        "alpha": {"quotients": "1,100:repeat", "depth": 8},
        "observable": "paper",
        "stages": [
            {"kind": "alpha", "json": "alpha.json"},
            {"kind": "gauss", "ensemble": 120, "digits": 30, "csv": "gauss.csv"},
            {"kind": "levelset", "level": 3, "a": 0.0, "eps": 0.9,
             "mode": "exact", "csv": "jset.csv"},
            {"kind": "build", "levels": "3,5", "a": 0.0, "eps": 0.9,
             "json": "sets.json"},
            {"kind": "holes", "in": "sets.json", "csv": "ledger.csv"},
            {"kind": "coverage", "levels": "3,5", "eps": 0.9,
             "csv": "coverage.csv"},
            {"kind": "witness", "C": "0.1:0.35", "a": 0.0, "eps": 0.5,
             "levels": "3", "json": "witness.json"},
            {"kind": "escape", "levels": "3,5", "M": "2,20",
             "samples": 4000, "csv": "escape.csv"},
            {"kind": "orbit", "steps": 20000, "decimate": 2000,
             "csv": "orbit.csv"},
            {"kind": "profile", "level": 5, "cell": 17, "grid": 128,
             "csv": "profile.csv"},
        ],
    }
    hashes = []
    for tag in ("first", "second"):
        out = tmp_path / tag
        cfg["output_dir"] = str(out)
        cfg_path = tmp_path / f"{tag}.json"
        cfg_path.write_text(json.dumps(cfg))
        assert cli.run_config(str(cfg_path)) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        hashes.append({os.path.basename(a["path"]): a["sha256"]
                       for a in manifest["artifacts"]})
    dt = time.time() - t0
    ok = hashes[0] == hashes[1]
    report("C12 determinism", ok,
           f"{len(hashes[0])} artifacts, identical hashes={ok}; "
           f"runtime={dt:.0f}s")
    assert ok
