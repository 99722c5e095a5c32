"""Numerical certification of the monotone-sum and level-set lemmas.

On each cell [l/q_n, (l+1)/q_n] with the edge fiftieths removed, the rigid
sum phi^(q_n) is continuous and strictly increasing, its derivative tracks
q_n log q_n, and the quarter/three-quarter anchor values clear a+1 / a-1.
The level-set intervals J_{n,l}(a, eps) where the sum lies in [a-eps, a+eps]
follow the 2*eps/(q_n log q_n) length law.  Everything here reports measured
margins; asymptotic claims are asserted only by the acceptance suite at the
levels it picks.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .birkhoff import rigid_values
from .contfrac import ConvergentTable
from .fixedpoint import derive_seed
from .observable import (
    SingularObservable,
    TruncatedObservable,
    decompose_asymmetric,
    truncate,
    truncate_symmetric,
)
from . import birkhoff


class LevelNotEligibleError(ValueError):
    pass


def _require_h_level(table: ConvergentTable, n: int):
    if n not in table.h_set():
        raise LevelNotEligibleError(
            f"level {n} is not a large-ratio level of this rotation number")


def _cell_bits(table: ConvergentTable, n: int, l: int, num: int, den: int) -> int:
    """Exact bits of l/q_n + num/(den*q_n)."""
    q = table.q[n]
    return ((l * den + num) << table.w) // (den * q)


def inner_cell_bounds(table: ConvergentTable, n: int, l: int,
                      margin_num: int = 1, margin_den: int = 50) -> tuple[int, int]:
    """Bits of the cell with margin_num/margin_den of a cell cut at both ends."""
    left = _cell_bits(table, n, l, margin_num, margin_den)
    right = _cell_bits(table, n, l + 1, -margin_num, margin_den)
    return left, right


@dataclass(frozen=True)
class CellReport:
    level: int
    cell: int
    grid: int
    monotone: bool
    derivative_min: float
    derivative_max: float
    band_low: float
    band_high: float
    derivative_in_band: bool
    value_at_quarter: float
    value_at_three_quarters: float
    thresholds_pass: tuple[bool, bool]
    target: float


def derivative_band(table: ConvergentTable, n: int) -> tuple[float, float]:
    q = table.q[n]
    qlogq = q * math.log(q)
    r = 1.0 / math.sqrt(n)
    return (1.0 - r) * qlogq, (1.0 + r) * qlogq


def verify_cell(phi: SingularObservable, table: ConvergentTable, n: int, l: int,
                a: float, grid: int = 128) -> CellReport:
    """Monotonicity, derivative band, and threshold anchors on one cell."""
    _require_h_level(table, n)
    q = table.q[n]
    if not 0 <= l < q:
        raise ValueError("cell index out of range")
    if grid < 2:
        raise ValueError("grid needs at least two points")
    left, right = inner_cell_bounds(table, n, l)
    xs = [left + (right - left) * j // (grid - 1) for j in range(grid)]
    values, _, _ = rigid_values(table, n, xs, phi)
    derivs, _, _ = rigid_values(table, n, xs, phi, derivative=True)
    anchors = [_cell_bits(table, n, l, 1, 4), _cell_bits(table, n, l, 3, 4)]
    av, _, _ = rigid_values(table, n, anchors, phi)
    lo, hi = derivative_band(table, n)
    dmin, dmax = float(np.min(derivs)), float(np.max(derivs))
    return CellReport(
        level=n, cell=l, grid=grid,
        monotone=bool(np.all(np.diff(values) > 0.0)),
        derivative_min=dmin, derivative_max=dmax,
        band_low=lo, band_high=hi,
        derivative_in_band=bool(lo <= dmin and dmax <= hi),
        value_at_quarter=float(av[0]),
        value_at_three_quarters=float(av[1]),
        thresholds_pass=(bool(av[1] >= a + 1.0), bool(av[0] <= a - 1.0)),
        target=a,
    )


# ---------------------------------------------------------------------------
# level-set families


@dataclass
class LevelSetFamily:
    """Intervals J_{n,l}(a, eps), per cell, as exact fixed-point endpoints.

    mode "exact" bisects phi^(q_n) per cell; mode "translate" bisects the
    lattice sum once and translates, with guard the position uncertainty
    (closeness bound over the derivative lower bound, <= 2/q_{n+1}).
    Skipped cells are counted by reason: bracket monotonicity failures and
    cells whose window value range misses [a-eps, a+eps] entirely.
    """

    level: int
    q: int
    w: int
    a: float
    eps: float
    mode: str
    cells: dict[int, tuple[int, int]]
    guard_bits: int
    monotonicity_failures: int
    empty_cells: int
    clamped_cells: int

    def lengths_bits(self) -> np.ndarray:
        return np.array([r - l for l, r in self.cells.values()], dtype=float)

    def measure(self) -> Fraction:
        total = sum(r - l for l, r in self.cells.values())
        return Fraction(total, 1 << self.w)

    def midpoints(self) -> dict[int, int]:
        return {l: (lo + hi) >> 1 for l, (lo, hi) in self.cells.items()}

    def length_law_ratios(self) -> np.ndarray:
        """Measured |J| * q log q / (2 eps) per cell."""
        scale = self.q * math.log(self.q) / (2.0 * self.eps)
        return self.lengths_bits() / float(1 << self.w) * scale


def _batched_bisect(phi, table, n, lo_bits: list[int], hi_bits: list[int],
                    targets: np.ndarray, iters: int,
                    rational: bool = False) -> list[int]:
    lo = list(lo_bits)
    hi = list(hi_bits)
    for _ in range(iters):
        mids = [(a + b) >> 1 for a, b in zip(lo, hi)]
        vals, _, _ = rigid_values(table, n, mids, phi, rational=rational)
        go_right = vals < targets
        for j in range(len(mids)):
            if go_right[j]:
                lo[j] = mids[j]
            else:
                hi[j] = mids[j]
    return [(a + b) >> 1 for a, b in zip(lo, hi)]


_RESOLUTION_BITS = 60


def locate_level_set(phi: SingularObservable, table: ConvergentTable, n: int,
                     a: float, eps: float, mode: str = "exact",
                     cells: list[int] | None = None) -> LevelSetFamily:
    """Find the J_{n,l}(a, eps) family on the quarter-to-three-quarter windows.

    Endpoints whose target value falls outside the window's value range are
    clamped to the window edge (the clamped interval still satisfies the
    in-band invariant; it is just not maximal).  eps = 0 yields empty cells.
    """
    _require_h_level(table, n)
    if mode not in ("exact", "translate"):
        raise ValueError("mode must be 'exact' or 'translate'")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    q = table.q[n]
    w = table.w
    cell_list = list(range(q)) if cells is None else sorted(set(cells))
    if cell_list and not 0 <= cell_list[0] <= cell_list[-1] < q:
        raise ValueError("cell indices out of range")

    width_bits = (1 << w) // (2 * q)
    iters = max(1, width_bits.bit_length() - (w - _RESOLUTION_BITS))

    if mode == "translate":
        fam = _translate_family(phi, table, n, a, eps, cell_list, iters)
    else:
        fam = _exact_family(phi, table, n, a, eps, cell_list, iters)
    return fam


def _family_from_windows(phi, table, n, a, eps, cell_list, iters, *,
                         rational: bool):
    lows = [_cell_bits(table, n, l, 1, 4) for l in cell_list]
    highs = [_cell_bits(table, n, l, 3, 4) for l in cell_list]
    v_lo, _, _ = rigid_values(table, n, lows, phi, rational=rational)
    v_hi, _, _ = rigid_values(table, n, highs, phi, rational=rational)

    keep, mono_fail, empty = [], 0, 0
    clamped = 0
    for j, l in enumerate(cell_list):
        if not v_lo[j] < v_hi[j]:
            mono_fail += 1
            continue
        if eps == 0 or v_hi[j] < a - eps or v_lo[j] > a + eps:
            empty += 1
            continue
        keep.append(j)

    cells: dict[int, tuple[int, int]] = {}
    if keep:
        lo_t = np.array([a - eps] * len(keep))
        hi_t = np.array([a + eps] * len(keep))
        lo_b = [lows[j] for j in keep]
        hi_b = [highs[j] for j in keep]
        lefts = _batched_bisect(phi, table, n, lo_b, hi_b, lo_t, iters, rational)
        rights = _batched_bisect(phi, table, n, lo_b, hi_b, hi_t, iters, rational)
        for pos, j in enumerate(keep):
            lft = lefts[pos]
            rgt = rights[pos]
            if v_lo[j] >= a - eps:
                lft = lows[j]
                clamped += 1
            if v_hi[j] <= a + eps:
                rgt = highs[j]
                clamped += 1
            if lft < rgt:
                cells[cell_list[j]] = (lft, rgt)
            else:
                empty += 1
    return cells, mono_fail, empty, clamped


def _exact_family(phi, table, n, a, eps, cell_list, iters) -> LevelSetFamily:
    cells, mono, empty, clamped = _family_from_windows(
        phi, table, n, a, eps, cell_list, iters, rational=False)
    return LevelSetFamily(n, table.q[n], table.w, a, eps, "exact", cells,
                          guard_bits=0, monotonicity_failures=mono,
                          empty_cells=empty, clamped_cells=clamped)


def _translate_family(phi, table, n, a, eps, cell_list, iters) -> LevelSetFamily:
    q = table.q[n]
    w = table.w
    tobs = phi if isinstance(phi, TruncatedObservable) else truncate(phi, q)
    base_cells, mono, empty0, clamped = _family_from_windows(
        tobs, table, n, a, eps, [0], iters, rational=True)
    guard_bits = -(-2 * (1 << w) // table.q[n + 1]) if n + 1 <= table.depth else 0
    cells: dict[int, tuple[int, int]] = {}
    empty = empty0 * len(cell_list)
    if base_cells:
        j_left, j_right = base_cells[0]
        for l in cell_list:
            shift = (l << w) // q
            cells[l] = (j_left + shift, j_right + shift)
    return LevelSetFamily(n, q, w, a, eps, "translate", cells,
                          guard_bits=guard_bits,
                          monotonicity_failures=mono * len(cell_list) if mono else 0,
                          empty_cells=empty, clamped_cells=clamped)


# ---------------------------------------------------------------------------
# closeness of true-orbit and lattice sums


@dataclass(frozen=True)
class ClosenessReport:
    level: int
    samples: int
    sup_gap: float
    bound: float
    passed: bool
    seed: int


def closeness_bound(table: ConvergentTable, n: int) -> float:
    q = table.q[n]
    return (q * math.log(q) / table.q[n + 1]) * (1.0 + 1.0 / math.sqrt(n))


def closeness_check(phi: SingularObservable, table: ConvergentTable, n: int,
                    samples: int, seed: int = 0) -> ClosenessReport:
    """sup over inner-cell samples of |truncated rigid sum - lattice sum|."""
    _require_h_level(table, n)
    q = table.q[n]
    w = table.w
    tobs = truncate(phi, q)
    rng = random.Random(derive_seed(seed, f"lemma:closeness:{n}"))
    span = 48 * (1 << w) // 50
    base = (1 << w) // 50
    xs = []
    for _ in range(samples):
        l = rng.randrange(q)
        s_bits = base + rng.randrange(span)
        xs.append(((l << w) + s_bits) // q)
    v_orbit, _, _ = rigid_values(table, n, xs, tobs)
    v_lattice, _, _ = rigid_values(table, n, xs, tobs, rational=True)
    sup = float(np.max(np.abs(v_orbit - v_lattice)))
    bound = closeness_bound(table, n)
    return ClosenessReport(n, samples, sup, bound, sup <= bound, seed)


# ---------------------------------------------------------------------------
# asymmetric pipeline


@dataclass(frozen=True)
class AsymmetricPipelineReport:
    level: int
    eta: float
    dk_bound: float
    dk_max: float
    dk_passed: bool
    shrink: float
    cells: tuple[int, ...]
    monotone_all: bool
    thresholds_all: bool
    derivative_center_residual: float


def asymmetric_pipeline_check(phi1: SingularObservable, table: ConvergentTable,
                              n: int, eta: float, cell_count: int = 8,
                              grid: int = 64, a: float = 0.0, seed: int = 0,
                              dk_samples: int = 200,
                              shrink: float = 0.125) -> AsymmetricPipelineReport:
    """Two-sided pipeline: split off the symmetric part, bound its truncated
    derivative sums, and re-check the cell properties for the full observable
    on cells shrunk by `shrink` of a cell at each end.

    The derivative is no longer pinned to the q_n log q_n band; its relative
    deviation at cell centers is reported as the residual.
    """
    dec = decompose_asymmetric(phi1)
    if dec.degenerate:
        raise ValueError("pipeline rejects symmetric input: one-sided part vanishes")
    _require_h_level(table, n)
    q = table.q[n]
    sym_tr = truncate_symmetric(dec.symmetric, q, eta)
    dk = birkhoff.denjoy_koksma_check(sym_tr, table, n, dk_samples, seed=seed)

    rng = random.Random(derive_seed(seed, f"lemma:pipeline:{n}"))
    cells = sorted(rng.sample(range(q), min(cell_count, q)))
    num = int(round(shrink * 200))
    mono_all = True
    thr_all = True
    worst_resid = 0.0
    for l in cells:
        left = _cell_bits(table, n, l, num, 200)
        right = _cell_bits(table, n, l + 1, -num, 200)
        xs = [left + (right - left) * j // (grid - 1) for j in range(grid)]
        vals, _, _ = rigid_values(table, n, xs, phi1)
        mono_all = mono_all and bool(np.all(np.diff(vals) > 0.0))
        anchors = [_cell_bits(table, n, l, 1, 4), _cell_bits(table, n, l, 3, 4)]
        av, _, _ = rigid_values(table, n, anchors, phi1)
        thr_all = thr_all and av[1] >= a + 1.0 and av[0] <= a - 1.0
        mid = [(left + right) >> 1]
        dv, _, _ = rigid_values(table, n, mid, phi1, derivative=True)
        qlogq = q * math.log(q)
        worst_resid = max(worst_resid, abs(float(dv[0]) - qlogq) / qlogq)
    return AsymmetricPipelineReport(
        level=n, eta=eta, dk_bound=dk.bound, dk_max=dk.max_deviation,
        dk_passed=dk.passed, shrink=shrink, cells=tuple(cells),
        monotone_all=mono_all, thresholds_all=thr_all,
        derivative_center_residual=worst_resid)
