"""Direct simulation of the cylindrical cascade (x, y) -> (x + alpha, y + phi(x)).

The orbit trace accumulates y exactly as the engine's cocycle would, with a
running compensated-summation budget.  Escape-of-mass estimates the measure
of {x : |phi^(q_n)(x)| <= M} by Monte Carlo; each sample is classified by a
certified two-sided bound built from the lattice closed form plus the exact
edge-band terms (the drift correction is sign-definite), and only samples
whose bound straddles the threshold pay for an exact rigid sum.  Estimates
are therefore exact per sample and deterministic given the seed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import birkhoff
from .birkhoff import (
    OrbitPoint,
    SingularityHitError,
    _iter_positions,
    _rigid_context,
    _TermEvaluator,
    cocycle_sum,
    rigid_values,
    structured_eligible,
)
from .contfrac import ConvergentTable
from .fixedpoint import derive_seed, summation_error_bound
from .observable import SingularObservable

LN2 = math.log(2.0)


@dataclass(frozen=True)
class OrbitTrace:
    steps_requested: int
    steps_completed: int
    decimation: int
    y0: float
    samples: tuple[tuple[int, float, float, float], ...]  # (step, x, y, err)
    return_stats: dict[float, int]
    truncated_at: int | None
    checkpoint_max_gap: float
    checkpoint_budget: float

    @property
    def truncated(self) -> bool:
        return self.truncated_at is not None


def iterate(phi: SingularObservable, table: ConvergentTable, x0, y0: float,
            steps: int, decimation: int = 1000,
            r_windows=(1.0, 2.0, 5.0, 10.0, 20.0), checkpoints: int = 10,
            seed: int = 0) -> OrbitTrace:
    """Iterate the skew product, recording a decimated trace of (x, y).

    A singular-guard hit truncates the trace at the offending step instead of
    producing a saturated value.  Ten cocycle checkpoints cross-check the
    running y against independently computed Birkhoff sums.
    """
    pt = OrbitPoint.from_value(x0, table.w)
    ev = _TermEvaluator(phi, "value", None, table.w)
    rng = random.Random(derive_seed(seed, "cascade:checkpoints"))
    check_at = sorted(rng.sample(range(1, steps + 1), min(checkpoints, steps)))
    check_y: dict[int, float] = {}

    samples = []
    counts = {float(r): 0 for r in r_windows}
    y = float(y0)
    absmass = 0.0
    truncated_at = None
    done = 0
    try:
        for start, ph, pl in _iter_positions(pt.bits, steps, table.w,
                                             step_bits=table.alpha_bits):
            terms, _, d_left, d_right = ev(ph, pl)
            if (phi.c_left and float(np.min(d_left)) < birkhoff._DD_GUARD) or \
                    (phi.c_right and float(np.min(d_right)) < birkhoff._DD_GUARD):
                bad = np.nonzero((d_left < birkhoff._DD_GUARD) |
                                 (d_right < birkhoff._DD_GUARD))[0]
                raise SingularityHitError(start + int(bad[0]))
            ys = y + np.cumsum(terms)
            absmass += float(np.sum(np.abs(terms)))
            err = summation_error_bound(absmass, start + terms.size)
            for r in counts:
                counts[r] += int(np.count_nonzero(np.abs(ys) <= r))
            # record the orbit point (x_t, y_t) whenever t is a decimation step
            j0 = (decimation - (start + 1) % decimation) % decimation
            for j in range(j0, terms.size, decimation):
                t = start + j + 1
                xt = pt.advance(t, table).value
                samples.append((t, xt, float(ys[j]), err))
            while check_at and check_at[0] <= start + terms.size:
                c = check_at.pop(0)
                check_y[c] = float(ys[c - 1 - start])
            y = float(ys[-1])
            done = start + terms.size
    except SingularityHitError as hit:
        truncated_at = hit.index
        done = hit.index

    max_gap = 0.0
    budget = 0.0
    for c, yc in check_y.items():
        if truncated_at is not None and c > truncated_at:
            continue
        ref = cocycle_sum(phi, table, pt, c)
        max_gap = max(max_gap, abs(yc - (y0 + ref.value)))
        budget = max(budget, ref.error_bound + summation_error_bound(absmass, done))
    return OrbitTrace(steps, done, decimation, y0, tuple(samples), counts,
                      truncated_at, max_gap, budget)


# ---------------------------------------------------------------------------
# escape of mass


@dataclass(frozen=True)
class EscapeRow:
    level: int
    m_threshold: float
    estimate: float
    half_width: float
    samples: int
    exact_evaluations: int


@dataclass(frozen=True)
class EscapeReport:
    rows: tuple[EscapeRow, ...]
    seed: int

    def estimate(self, level: int, m: float) -> float:
        for r in self.rows:
            if r.level == level and r.m_threshold == m:
                return r.estimate
        raise KeyError((level, m))


def _screen_values(table: ConvergentTable, n: int, obs: SingularObservable,
                   xs_bits: list[int]):
    """Drift-free rigid-sum values plus one-sided drift-tail bounds.

    Returns (v, tail_left, tail_right) with the true value guaranteed inside
    [v - tail_left, v + tail_right]: the lattice part is a loggamma closed
    form, the two edge bands (the orbit points nearest the singularity on
    each side, drift included) come from exact integers, and each side's
    interior drift correction is sign-definite and below q*eta times a
    harmonic tail.  O(1) work per point.
    """
    ctx = _rigid_context(table, n)
    q, w = ctx.q, ctx.w
    modulus = 1 << w
    eta_bits = ctx.eta_bits
    qeta = q * ctx.eta
    cL, cR, g0 = obs.c_left, obs.c_right, obs.constant
    wln2 = w * LN2
    guard_scaled = (q * modulus) >> 128

    m = len(xs_bits)
    s = np.empty(m)
    oms = np.empty(m)
    edge_logs = np.zeros(m)  # sum over edge bands of -c * ln(distance)
    scale = math.ldexp(1.0, -w)
    for j, xb in enumerate(xs_bits):
        qx = q * xb
        l = qx >> w
        sb = qx - (l << w)
        s[j] = float(sb) * scale
        oms[j] = float(modulus - sb) * scale
        ln_edges = 0.0
        ie = (q - l) % q * ctx.pinv % q
        edge_low = sb - ie * eta_bits
        wrapped = edge_low < 0
        if cL:
            i1 = (q - 1 - l) % q * ctx.pinv % q
            num1 = (modulus - sb) + i1 * eta_bits
            numq = (q * modulus - sb + ie * eta_bits) if not wrapped else -edge_low
            if min(num1, numq) <= guard_scaled:
                raise SingularityHitError(i1 if num1 < numq else ie)
            ln_edges -= cL * (math.log(num1) + math.log(numq) - 2.0 * wln2
                              - 2.0 * math.log(q))
        if cR:
            num0 = edge_low if not wrapped else q * modulus + edge_low
            if num0 <= guard_scaled:
                raise SingularityHitError(ie)
            ln_edges -= cR * (math.log(num0) - wln2 - math.log(q))
        edge_logs[j] = ln_edges

    logq = math.log(q)
    values = edge_logs + q * g0
    if cL:
        interior = (gammaln(q + 1.0 - s) - gammaln(np.maximum(oms, 5e-324))
                    - np.log(np.maximum(oms, 5e-324)) - np.log(q - s))
        values -= cL * (interior - (q - 2.0) * logq)
    if cR:
        interior = (gammaln(q + s) - gammaln(np.maximum(s, 5e-324))
                    - np.log(np.maximum(s, 5e-324)))
        values -= cR * (interior - (q - 1.0) * logq)

    harm = math.log(max(q - 2, 1)) + 1.0
    tail_left = cL * qeta * harm
    tail_right = cR * qeta / max(1.0 - qeta, 0.5) * harm
    return values, tail_left, tail_right


def _partial_corrections(table, n, obs, xs_bits, k_max):
    """Exact interior drift corrections for bands <= k_max, plus tail bound."""
    ctx = _rigid_context(table, n)
    q, w = ctx.q, ctx.w
    eta = ctx.eta
    cL, cR = obs.c_left, obs.c_right
    m = len(xs_bits)
    corr = np.zeros(m)
    ls = np.empty(m, dtype=np.int64)
    s_hi = np.empty(m)
    scale = math.ldexp(1.0, -w)
    for j, xb in enumerate(xs_bits):
        qx = q * xb
        l = qx >> w
        ls[j] = l
        s_hi[j] = float(qx - (l << w)) * scale
    km = min(k_max, q - 1)
    for j0 in range(0, m, birkhoff._SAMPLE_SLAB):
        j1 = min(j0 + birkhoff._SAMPLE_SLAB, m)
        lsl = ls[j0:j1, None]
        shl = s_hi[j0:j1, None]
        if cL:
            off = (q - lsl) % q
            for k0 in range(2, km + 1, birkhoff._BAND_CHUNK):
                k1 = min(k0 + birkhoff._BAND_CHUNK, km + 1)
                karr = np.arange(k0, k1, dtype=np.int64)[None, :]
                ik = ((off - karr) % q) * ctx.pinv % q
                corr[j0:j1] += -cL * np.sum(
                    birkhoff._log1p_poly((eta * ik) / (karr - shl)), axis=1)
        if cR:
            off = (-lsl) % q
            for m0 in range(1, km + 1, birkhoff._BAND_CHUNK):
                m1 = min(m0 + birkhoff._BAND_CHUNK, km + 1)
                marr = np.arange(m0, m1, dtype=np.int64)[None, :]
                im = ((marr + off) % q) * ctx.pinv % q
                corr[j0:j1] += -cR * np.sum(
                    birkhoff._log1p_poly((-eta * im) / (marr + shl)), axis=1)
    qeta = q * ctx.eta
    tail = math.log((q - 1) / max(km, 2))
    tail_left = cL * qeta * (tail + 2.0 / km)
    tail_right = cR * qeta / max(1.0 - qeta, 0.5) * (tail + 2.0 / km)
    return corr, tail_left, tail_right


def escape_of_mass(phi: SingularObservable, table: ConvergentTable,
                   levels: list[int], m_grid: list[float], samples: int,
                   seed: int = 11) -> EscapeReport:
    """Monte-Carlo measure of {x : |phi^(q_n)(x)| <= M} per level and M."""
    rows = []
    for n in levels:
        q = table.q[n]
        rng = random.Random(derive_seed(seed, f"cascade:escape:{n}"))
        xs = [rng.getrandbits(table.w) for _ in range(samples)]
        exact_n = 0
        if structured_eligible(phi, table, n):
            v, tl, tr = _screen_values(table, n, phi, xs)
            lo, hi = v - tl, v + tr

            def unresolved(lo_a, hi_a):
                need = np.zeros(lo_a.shape, dtype=bool)
                for m_thr in m_grid:
                    inside = (lo_a >= -m_thr) & (hi_a <= m_thr)
                    outside = (hi_a < -m_thr) | (lo_a > m_thr)
                    need |= ~(inside | outside)
                return need

            idx = np.nonzero(unresolved(lo, hi))[0]
            if idx.size and q > (1 << 17):
                sub = [xs[int(j)] for j in idx]
                corr, tl2, tr2 = _partial_corrections(table, n, phi, sub, 1 << 16)
                mid = v[idx] + corr
                lo[idx] = mid - tl2
                hi[idx] = mid + tr2
                idx = idx[unresolved(lo[idx], hi[idx])]
            if idx.size:
                sub = [xs[int(j)] for j in idx]
                vals, _, _ = rigid_values(table, n, sub, phi)
                lo[idx] = vals
                hi[idx] = vals
                exact_n = idx.size
            values_lo, values_hi = lo, hi
        else:
            vals, _, _ = rigid_values(table, n, xs, phi)
            values_lo = values_hi = vals
            exact_n = samples
        for m_thr in m_grid:
            inside = (values_lo >= -m_thr) & (values_hi <= m_thr)
            outside = (values_hi < -m_thr) | (values_lo > m_thr)
            if np.any(~(inside | outside)):
                raise AssertionError("escape screening left unresolved samples")
            p = float(np.count_nonzero(inside)) / samples
            hw = 1.96 * math.sqrt(max(p * (1.0 - p), 1e-12) / samples)
            rows.append(EscapeRow(n, float(m_thr), p, hw, samples, int(exact_n)))
    return EscapeReport(tuple(rows), seed)
