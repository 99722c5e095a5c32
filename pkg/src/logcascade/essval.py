"""Exact interval-set machinery and the essential-value probe.

Level sets A_n(a, eps) are unions of the per-cell intervals; pushing forward
by q_n rotation steps moves every interval by less than 1/q_{n+1}.  The hole
ledger tracks the complement of accumulated level sets, classifying holes by
the 6/q threshold of the next family to be inserted, and the witness search
looks for a point of a target set C whose q_n-return lands back in C with
Birkhoff value near a.  All set arithmetic is exact on W-bit endpoints;
measures are exact dyadic rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .birkhoff import OrbitPoint, rigid_sum
from .contfrac import ConvergentTable
from .lemma_lab import LevelSetFamily, locate_level_set


@dataclass(frozen=True)
class IntervalSet:
    """Sorted disjoint half-open intervals [a, b) in exact W-bit units."""

    w: int
    intervals: tuple[tuple[int, int], ...]
    level: int | None = None
    window: tuple[int, int] | None = None

    @staticmethod
    def from_pairs(pairs, w: int, level: int | None = None,
                   window=None) -> "IntervalSet":
        modulus = 1 << w
        items = []
        for a, b in pairs:
            if not (0 <= a <= modulus and 0 <= b <= modulus):
                raise ValueError("interval endpoints out of range")
            if a < b:
                items.append((a, b))
        items.sort()
        merged: list[list[int]] = []
        for a, b in items:
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return IntervalSet(w, tuple((a, b) for a, b in merged), level, window)

    @staticmethod
    def from_family(family: LevelSetFamily) -> "IntervalSet":
        return IntervalSet.from_pairs(family.cells.values(), family.w,
                                      level=family.level)

    @staticmethod
    def full_circle(w: int) -> "IntervalSet":
        return IntervalSet(w, ((0, 1 << w),))

    @staticmethod
    def from_floats(pairs, w: int) -> "IntervalSet":
        modulus = 1 << w
        return IntervalSet.from_pairs(
            [(round(a * modulus), round(b * modulus)) for a, b in pairs], w)

    @property
    def measure_bits(self) -> int:
        return sum(b - a for a, b in self.intervals)

    def measure(self) -> Fraction:
        return Fraction(self.measure_bits, 1 << self.w)

    @property
    def measure_float(self) -> float:
        return self.measure_bits / (1 << self.w)

    def __len__(self) -> int:
        return len(self.intervals)

    def contains_bits(self, x: int) -> bool:
        import bisect
        i = bisect.bisect_right(self.intervals, (x, 1 << (self.w + 1)))
        if i:
            a, b = self.intervals[i - 1]
            if a <= x < b:
                return True
        return False

    def union(self, other: "IntervalSet") -> "IntervalSet":
        self._check(other)
        return IntervalSet.from_pairs(self.intervals + other.intervals, self.w)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        self._check(other)
        out = []
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] <= b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(self.w, tuple(out))

    def complement(self) -> "IntervalSet":
        """Complement within the window (full circle when unwindowed)."""
        lo, hi = self.window or (0, 1 << self.w)
        out = []
        cursor = lo
        for a, b in self.intervals:
            a, b = max(a, lo), min(b, hi)
            if a >= b:
                continue
            if cursor < a:
                out.append((cursor, a))
            cursor = max(cursor, b)
        if cursor < hi:
            out.append((cursor, hi))
        return IntervalSet(self.w, tuple(out), window=self.window)

    def translate(self, delta_bits: int) -> "IntervalSet":
        modulus = 1 << self.w
        delta = delta_bits % modulus
        pairs = []
        for a, b in self.intervals:
            a2, b2 = a + delta, b + delta
            if b2 <= modulus:
                pairs.append((a2, b2))
            elif a2 >= modulus:
                pairs.append((a2 - modulus, b2 - modulus))
            else:
                pairs.append((a2, modulus))
                pairs.append((0, b2 - modulus))
        return IntervalSet.from_pairs(pairs, self.w, level=self.level)

    def restrict(self, window: tuple[int, int]) -> "IntervalSet":
        return IntervalSet(self.w, self.intersect(
            IntervalSet(self.w, (window,))).intervals, self.level, window)

    def largest_interval(self) -> tuple[int, int] | None:
        if not self.intervals:
            return None
        return max(self.intervals, key=lambda ab: ab[1] - ab[0])

    def _check(self, other: "IntervalSet"):
        if self.w != other.w:
            raise ValueError("interval sets carry different precisions")


def build_An(family: LevelSetFamily) -> IntervalSet:
    """Union of the level-set intervals of one family."""
    return IntervalSet.from_family(family)


def push_forward(a_set: IntervalSet, table: ConvergentTable, n: int) -> IntervalSet:
    """Translate by q_n * alpha (exact bits); verifies the rigidity bound.

    The displacement magnitude must be below 1/q_{n+1}, which is exactly the
    reason the pushed family nearly self-aligns with the original.
    """
    disp = table.displacement_bits(n)
    if n + 1 <= table.depth and abs(disp) * table.q[n + 1] >= (1 << table.w):
        raise AssertionError("rigidity displacement bound violated")
    shift = (table.q[n] * table.alpha_bits) % (1 << table.w)
    out = a_set.translate(shift)
    if out.measure_bits != a_set.measure_bits:
        raise AssertionError("translation must preserve measure")
    return out


# ---------------------------------------------------------------------------
# hole accounting


@dataclass(frozen=True)
class Hole:
    left: int
    right: int
    good: bool
    good_paper_literal: bool

    @property
    def length_bits(self) -> int:
        return self.right - self.left


@dataclass(frozen=True)
class SpawnRecord:
    hole: tuple[int, int]
    full_cells: int
    spawned_good: int
    spawned_bad: int
    conditional_ratio: float


@dataclass(frozen=True)
class HoleLedger:
    stage: int
    level: int
    holes: tuple[Hole, ...]
    threshold_bits: int
    threshold_paper_bits: int
    good_count: int
    bad_count: int
    spawn_records: tuple[SpawnRecord, ...] = ()

    @property
    def invariant_ok(self) -> bool:
        return self.good_count >= self.bad_count


def _classify_holes(complement: IntervalSet, thr_bits: int, thr_paper: int,
                    stage: int, level: int) -> HoleLedger:
    holes = tuple(Hole(a, b, (b - a) >= thr_bits, (b - a) >= thr_paper)
                  for a, b in complement.intervals)
    good = sum(h.good for h in holes)
    return HoleLedger(stage, level, holes, thr_bits, thr_paper, good,
                      len(holes) - good)


def hole_accounting(families: list[IntervalSet], table: ConvergentTable,
                    levels: list[int]) -> list[HoleLedger]:
    """Ledger of the complement structure after each inserted level.

    Good means length >= 6/q_next with q_next the denominator of the next
    family to be inserted (for the final stage, the next level the rotation
    pattern would supply, when the table is deep enough).  The literal
    6/q_{stage+1} threshold from the stage count alone is reported alongside.
    Each good hole's spawn behaviour and the conditional-measure ratio
    mu(A_next & hole) / (mu(A_next) mu(hole)) feed the coverage argument.
    """
    if len(families) < 2:
        raise ValueError("hole accounting needs at least two levels")
    if list(levels) != sorted(levels):
        raise ValueError("families must arrive in increasing level order")
    w = table.w
    modulus = 1 << w

    def q_next_for(stage: int) -> int | None:
        if stage + 1 < len(levels):
            return table.q[levels[stage + 1]]
        guess = levels[-1] + 2
        return table.q[guess] if guess <= table.depth else None

    ledgers: list[HoleLedger] = []
    acc = families[0]
    for stage in range(len(families)):
        if stage:
            acc = acc.union(families[stage])
        qn = q_next_for(stage)
        thr = -(-6 * modulus // qn) if qn else modulus
        thr_paper = -(-6 * modulus // table.q[min(stage + 1, table.depth)])
        ledgers.append(_classify_holes(acc.complement(), thr, thr_paper,
                                       stage, levels[stage]))

    # spawn verification between consecutive stages
    out: list[HoleLedger] = []
    for stage, ledger in enumerate(ledgers):
        records = []
        if stage + 1 < len(ledgers):
            nxt_set = families[stage + 1]
            nxt_holes = ledgers[stage + 1].holes
            q_next = table.q[levels[stage + 1]]
            mu_next = nxt_set.measure()
            for h in ledger.holes:
                if not h.good:
                    continue
                r1 = -(-h.left * q_next // modulus)
                r2 = (h.right * q_next) >> w
                inside = [g for g in nxt_holes if g.left >= h.left and g.right <= h.right]
                hole_set = IntervalSet(w, ((h.left, h.right),))
                inter = nxt_set.intersect(hole_set)
                denom = mu_next * hole_set.measure()
                ratio = float(inter.measure() / denom) if denom else math.inf
                records.append(SpawnRecord(
                    (h.left, h.right), max(0, r2 - r1),
                    sum(g.good for g in inside),
                    sum(not g.good for g in inside),
                    ratio))
        out.append(HoleLedger(ledger.stage, ledger.level, ledger.holes,
                              ledger.threshold_bits, ledger.threshold_paper_bits,
                              ledger.good_count, ledger.bad_count, tuple(records)))
    return out


# ---------------------------------------------------------------------------
# coverage diagnostics


@dataclass(frozen=True)
class CoverageReport:
    levels: tuple[int, ...]
    level_measures: tuple[float, ...]
    union_measures: tuple[float, ...]
    conditional_terms: tuple[float, ...]
    conditional_sum: float
    plain_sum: float
    independence_prediction: float
    bins: tuple[float, ...]

    @property
    def union_measure(self) -> float:
        return self.union_measures[-1] if self.union_measures else 0.0


def coverage(families: list[IntervalSet], levels: list[int],
             resolution: int = 64) -> CoverageReport:
    """Exact union measures per prefix plus the conditional-series diagnostic.

    The conditional terms mu(A_n | intersection of earlier complements) are
    the quantities whose divergence drives the covering argument; comparing
    their sum against sum(mu(A_n)) measures the near-independence the proof
    needs.  resolution only bins the final union for display.
    """
    if not families:
        return CoverageReport((), (), (), (), 0.0, 0.0, 0.0, ())
    w = families[0].w
    union = None
    unions, lm, cond = [], [], []
    pred = 1.0
    for fam in families:
        mu = fam.measure()
        lm.append(float(mu))
        pred *= 1.0 - float(mu)
        if union is None:
            cond.append(float(mu))
            union = fam
        else:
            holes = union.complement()
            inter = fam.intersect(holes)
            cond.append(float(inter.measure() / holes.measure())
                        if holes.measure_bits else 0.0)
            union = union.union(fam)
        unions.append(union.measure_float)
    bins = []
    if resolution > 0:
        modulus = 1 << w
        for b in range(resolution):
            lo = b * modulus // resolution
            hi = (b + 1) * modulus // resolution
            part = union.intersect(IntervalSet(w, ((lo, hi),)))
            bins.append(part.measure_bits / (hi - lo))
    return CoverageReport(tuple(levels), tuple(lm), tuple(unions), tuple(cond),
                          math.fsum(cond), math.fsum(lm), 1.0 - pred,
                          tuple(bins))


# ---------------------------------------------------------------------------
# witness search


@dataclass(frozen=True)
class WitnessRecord:
    target_set: tuple[tuple[int, int], ...]
    a: float
    eps: float
    found: bool
    level: int | None = None
    cell: int | None = None
    x_bits: int | None = None
    birkhoff_value: float | None = None
    displacement: float | None = None
    displacement_dir: int | None = None
    in_set: bool = False
    returns_to_set: bool = False
    value_in_band: bool = False
    near_misses: tuple[tuple[int, float], ...] = ()

    @property
    def certified(self) -> bool:
        return self.found and self.in_set and self.returns_to_set and self.value_in_band


_MIN_WITNESS_BITS = 40  # require an overlap interval of length >= 2**-40


def _cells_meeting(c_set: IntervalSet, q: int, w: int) -> list[int]:
    cells: set[int] = set()
    for lo, hi in c_set.intervals:
        first = (lo * q) >> w
        last = ((hi - 1) * q) >> w
        cells.update(range(first, min(last, q - 1) + 1))
    return sorted(cells)


# cap on (cells * q_n) below which witness families are bisected exactly
_EXACT_WORK_CAP = 60_000_000


def witness_search(c_set: IntervalSet, a: float, eps: float, levels: list[int],
                   table: ConvergentTable, phi, mode: str = "auto",
                   families: dict[int, LevelSetFamily] | None = None) -> WitnessRecord:
    """First (n, l) whose level-set interval meets C and returns into C.

    Scans levels in the given order and cells by index.  Families are built
    only on cells meeting C; they are bisected exactly when that work is
    affordable, otherwise translate mode is used and its cells deflated by
    the guard so every reported interval consists of certified level-set
    points.  A not-found outcome reports the largest overlap seen per level.
    """
    if c_set.measure_bits <= 0:
        raise ValueError("target set must have positive measure")
    w = table.w
    min_len = 1 << max(0, w - _MIN_WITNESS_BITS)
    near = []
    for n in levels:
        fam = (families or {}).get(n)
        if fam is None:
            cells = _cells_meeting(c_set, table.q[n], w)
            fam_mode = mode if mode != "auto" else (
                "exact" if len(cells) * table.q[n] <= _EXACT_WORK_CAP
                else "translate")
            fam = locate_level_set(phi, table, n, a, eps, mode=fam_mode,
                                   cells=cells)
        guard = fam.guard_bits
        shift = (table.q[n] * table.alpha_bits) % (1 << w)
        pulled = c_set.translate(-shift)
        best = 0
        for l in sorted(fam.cells):
            lo, hi = fam.cells[l]
            lo, hi = lo + guard, hi - guard
            if lo >= hi:
                continue
            j_set = IntervalSet(w, ((lo, hi),))
            overlap = j_set.intersect(c_set).intersect(pulled)
            piece = overlap.largest_interval()
            if piece is None:
                continue
            best = max(best, piece[1] - piece[0])
            if piece[1] - piece[0] >= min_len:
                xb = (piece[0] + piece[1]) >> 1
                pt = OrbitPoint(xb, w)
                val = rigid_sum(phi, table, pt, n).value
                disp_bits = table.displacement_bits(n)
                fwd = pt.advance(table.q[n], table)
                return WitnessRecord(
                    target_set=c_set.intervals, a=a, eps=eps, found=True,
                    level=n, cell=l, x_bits=xb, birkhoff_value=val,
                    displacement=abs(disp_bits) / (1 << w),
                    displacement_dir=-1 if disp_bits < 0 else 1,
                    in_set=c_set.contains_bits(xb),
                    returns_to_set=c_set.contains_bits(fwd.bits),
                    value_in_band=abs(val - a) < eps,
                    near_misses=tuple(near))
        near.append((n, best / (1 << w)))
    return WitnessRecord(target_set=c_set.intervals, a=a, eps=eps, found=False,
                         near_misses=tuple(near))
