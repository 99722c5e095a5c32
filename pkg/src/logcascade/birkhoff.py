"""High-precision Birkhoff sums along irrational rotation orbits.

Two evaluation paths feed every public operation:

* a generic path lowering exact W-bit orbit points to double-double pairs
  and evaluating the observable term by term (any shape), and
* a structured path for rigid times q_n when the observable is a constant
  plus logs anchored at 0 and alpha sits below p_n/q_n.  The orbit point in
  lattice band k then sits at distance (k - s + eta*i_k)/q_n from the
  singularity with s, eta and i_k exact integers, so the log sum collapses
  to a loggamma difference plus a certified small-correction series.  This
  is what makes level-7 experiments (q_n ~ 10^6) affordable.

Positions are always exact; only value accumulation is floating point, with
fixed chunked compensated reduction so results never depend on scheduling.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from .contfrac import ConvergentTable
from .fixedpoint import (
    DEFAULT_BITS,
    SUM_CHUNK,
    bits_from_float,
    bits_from_fraction,
    bits_to_dd,
    dd_add,
    dd_frac,
    derive_seed,
    summation_error_bound,
)
from .observable import (
    SingularObservable,
    SymmetricTruncation,
    TruncatedObservable,
)

LN2 = math.log(2.0)

# dd distances below this are re-decided with exact integer arithmetic
_DD_GUARD = math.ldexp(1.0, -100)
_GUARD_FRACTION = Fraction(1, 1 << 128)

_MAX_COCYCLE = 1 << 62

# generic-path block size; fixed so reductions are reproducible
_BLOCK = 1 << 17

# batched structured path: samples per slab * bands per chunk
_SAMPLE_SLAB = 128
_BAND_CHUNK = 1 << 14


class SingularityHitError(RuntimeError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"orbit point {index} inside the singular guard radius")


class OverflowGuardError(OverflowError):
    pass


@dataclass(frozen=True)
class OrbitPoint:
    """Circle point as an exact W-bit fraction bits / 2**w."""

    bits: int
    w: int = DEFAULT_BITS

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.w):
            raise ValueError("bits out of range for the declared width")

    @staticmethod
    def from_value(x, w: int = DEFAULT_BITS) -> "OrbitPoint":
        if isinstance(x, OrbitPoint):
            return x
        if isinstance(x, Fraction):
            return OrbitPoint(bits_from_fraction(x, w), w)
        return OrbitPoint(bits_from_float(float(x), w), w)

    def advance(self, steps: int, table: ConvergentTable) -> "OrbitPoint":
        if table.w != self.w:
            raise ValueError("table precision does not match the point")
        modulus = 1 << self.w
        return OrbitPoint((self.bits + steps * table.alpha_bits) % modulus, self.w)

    @property
    def value(self) -> float:
        return self.bits / (1 << self.w)

    def fraction(self) -> Fraction:
        return Fraction(self.bits, 1 << self.w)

    def distance_to(self, fr: Fraction) -> Fraction:
        d = (self.fraction() - fr) % 1
        return min(d, 1 - d)


@dataclass(frozen=True)
class SumResult:
    value: float
    error_bound: float
    excluded: int
    terms: int


def _as_point(x, table: ConvergentTable) -> OrbitPoint:
    return x if isinstance(x, OrbitPoint) else OrbitPoint.from_value(x, table.w)


# ---------------------------------------------------------------------------
# generic dd-position path


_TABLE_CACHE: dict = {}


def _dd_entry_tables(count: int, step_bits: int | None, step_fraction: Fraction | None,
                     w: int):
    """(u, v) dd tables so position j = u + v*K costs two vector dd-adds."""
    key = (count, step_bits, step_fraction, w)
    hit = _TABLE_CACHE.get(key)
    if hit is not None:
        return hit
    k = 1 << max(0, (count.bit_length() + 1) // 2)
    k = min(k, 4096, count)
    nv = -(-count // k)
    modulus = 1 << w

    def entry_bits(j: int) -> int:
        if step_bits is not None:
            return (j * step_bits) % modulus
        fr = (j * step_fraction) % 1
        return (fr.numerator << w) // fr.denominator if j else 0

    uh = np.empty(k)
    ul = np.empty(k)
    for j in range(k):
        uh[j], ul[j] = bits_to_dd(entry_bits(j), w)
    vh = np.empty(nv)
    vl = np.empty(nv)
    for j in range(nv):
        vh[j], vl[j] = bits_to_dd(entry_bits(j * k), w)
    out = (k, (uh, ul), (vh, vl))
    if len(_TABLE_CACHE) > 64:
        _TABLE_CACHE.clear()
    _TABLE_CACHE[key] = out
    return out


def _iter_positions(x_bits: int, count: int, w: int, *, step_bits=None,
                    step_fraction=None):
    """Yield (start_index, pos_hi, pos_lo) blocks of frac(x + j*step)."""
    k, (uh, ul), (vh, vl) = _dd_entry_tables(count, step_bits, step_fraction, w)
    xh, xl = bits_to_dd(x_bits, w)
    sh, sl = dd_add(xh, xl, uh, ul)  # shape (k,)
    rows = max(1, _BLOCK // k)
    nv = vh.size
    for v0 in range(0, nv, rows):
        v1 = min(v0 + rows, nv)
        ph, pl = dd_add(sh[None, :], sl[None, :], vh[v0:v1, None], vl[v0:v1, None])
        ph, pl = dd_frac(ph, pl)
        start = v0 * k
        stop = min(v1 * k, count)
        yield start, ph.ravel()[: stop - start], pl.ravel()[: stop - start]


class _TermEvaluator:
    """Evaluate observable terms on dd position arrays.

    kind is "value" or "derivative"; a truncation zeroes terms inside its cut
    and counts them.  Distances closer than the dd screening threshold are
    flagged for exact re-decision by the caller.
    """

    def __init__(self, obs: SingularObservable, kind: str = "value",
                 truncation=None, w: int = DEFAULT_BITS):
        self.obs = obs
        self.kind = kind
        self.truncation = truncation
        self.x0_bits = bits_from_fraction(obs.x0, w) if obs.x0 else 0
        self.x0_dd = bits_to_dd(self.x0_bits, w)

    def __call__(self, pos_h, pos_l):
        obs = self.obs
        if self.x0_bits:
            h, l = dd_add(pos_h, pos_l, -self.x0_dd[0], -self.x0_dd[1])
            h, l = dd_frac(h, l)
        else:
            h, l = pos_h, pos_l
        d_right = h + l
        d_left = (1.0 - h) - l

        if self.kind == "value":
            terms = np.full_like(d_right, obs.constant)
            for kf, a, b in obs.trig:
                ang = (2.0 * math.pi * kf) * (pos_h + pos_l)
                terms += a * np.cos(ang) + b * np.sin(ang)
            if obs.c_left:
                terms -= obs.c_left * np.log(np.maximum(d_left, 5e-324))
            if obs.c_right:
                terms -= obs.c_right * np.log(np.maximum(d_right, 5e-324))
        else:
            terms = np.zeros_like(d_right)
            for kf, a, b in obs.trig:
                ang = (2.0 * math.pi * kf) * (pos_h + pos_l)
                terms += (2.0 * math.pi * kf) * (-a * np.sin(ang) + b * np.cos(ang))
            if obs.c_left:
                terms += obs.c_left / np.maximum(d_left, 5e-324)
            if obs.c_right:
                terms -= obs.c_right / np.maximum(d_right, 5e-324)

        excluded = 0
        if self.truncation is not None:
            mask = self._cut_mask(d_left, d_right)
            excluded = int(np.count_nonzero(mask))
            if excluded:
                terms = np.where(mask, 0.0, terms)
        return terms, excluded, d_left, d_right

    def _cut_mask(self, d_left, d_right):
        tr = self.truncation
        if isinstance(tr, SymmetricTruncation):
            wdt = tr.window
            return (d_right < wdt) | (d_left < wdt)
        wdt = float(tr.cut_width)
        return (d_right < wdt) if tr.mirrored else (d_left <= wdt)


def _exact_position(x_bits: int, index: int, step_bits: int, w: int,
                    x0_bits: int) -> tuple[float, Fraction, Fraction]:
    """(position float, exact left distance, exact right distance)."""
    modulus = 1 << w
    pos = (x_bits + index * step_bits) % modulus
    d_right = (pos - x0_bits) % modulus
    return pos / modulus, Fraction(modulus - d_right, modulus), Fraction(d_right, modulus)


def _generic_sum(evaluator: _TermEvaluator, x_bits: int, count: int, w: int, *,
                 step_bits=None, step_fraction=None) -> SumResult:
    obs = evaluator.obs
    parts, absparts = [], []
    excluded = 0
    for start, ph, pl in _iter_positions(x_bits, count, w, step_bits=step_bits,
                                         step_fraction=step_fraction):
        terms, exc, d_left, d_right = evaluator(ph, pl)
        excluded += exc
        near = np.zeros(terms.shape, dtype=bool)
        if obs.c_left and float(np.min(d_left)) < _DD_GUARD:
            near |= d_left < _DD_GUARD
        if obs.c_right and float(np.min(d_right)) < _DD_GUARD:
            near |= d_right < _DD_GUARD
        for j in np.nonzero(near)[0]:
            idx = start + int(j)
            if step_bits is None:
                step = Fraction(idx) * step_fraction
                pos_fr = (Fraction(x_bits, 1 << w) + step) % 1
                pos = float(pos_fr)
                d_r = (pos_fr - evaluator.obs.x0) % 1
                ex_l, ex_r = 1 - d_r, d_r
            else:
                pos, ex_l, ex_r = _exact_position(x_bits, idx, step_bits, w,
                                                  evaluator.x0_bits)
            tr = evaluator.truncation
            in_cut = False
            if isinstance(tr, TruncatedObservable):
                in_cut = (ex_r < tr.cut_width) if tr.mirrored else (ex_l <= tr.cut_width)
            elif isinstance(tr, SymmetricTruncation):
                in_cut = float(ex_r) < tr.window or float(ex_l) < tr.window
            if in_cut:
                continue  # the cut zeroes this term; closeness is irrelevant
            if (obs.c_left and ex_l <= _GUARD_FRACTION) or \
                    (obs.c_right and ex_r <= _GUARD_FRACTION):
                raise SingularityHitError(idx)
            if evaluator.kind == "value":
                fix = obs._g(pos)
                if obs.c_left:
                    fix -= obs.c_left * math.log(float(ex_l))
                if obs.c_right:
                    fix -= obs.c_right * math.log(float(ex_r))
            else:
                fix = obs._g_prime(pos)
                if obs.c_left:
                    fix += obs.c_left / float(ex_l)
                if obs.c_right:
                    fix -= obs.c_right / float(ex_r)
            terms[j] = fix
        for c0 in range(0, terms.size, SUM_CHUNK):
            blk = terms[c0:c0 + SUM_CHUNK]
            parts.append(float(np.sum(blk)))
            absparts.append(float(np.sum(np.abs(blk))))
    value = math.fsum(parts)
    absmass = math.fsum(absparts)
    return SumResult(value, summation_error_bound(absmass, count), excluded, count)


# ---------------------------------------------------------------------------
# structured rigid-time path


class _RigidContext:
    """Exact integers shared by structured evaluations at one (table, level)."""

    def __init__(self, table: ConvergentTable, n: int):
        self.table = table
        self.n = n
        self.q = table.q[n]
        self.p = table.p[n]
        self.w = table.w
        self.eta_bits = -table.displacement_bits(n)  # positive when alpha < p/q
        self.eta = self.eta_bits / (1 << self.w)
        self.pinv = pow(self.p % self.q, -1, self.q)


_RIGID_CACHE: dict[tuple[int, int, int], _RigidContext] = {}


def _rigid_context(table: ConvergentTable, n: int) -> _RigidContext:
    key = (id(table), n, table.w)
    ctx = _RIGID_CACHE.get(key)
    if ctx is None:
        ctx = _RigidContext(table, n)
        _RIGID_CACHE[key] = ctx
    return ctx


def structured_eligible(obs: SingularObservable, table: ConvergentTable, n: int) -> bool:
    if obs.x0 != 0 or obs.trig:
        return False
    if not 1 <= n < len(table.q):
        return False
    q = table.q[n]
    if q < 2:
        return False
    disp = table.displacement_bits(n)
    if disp >= 0:  # structured bands require alpha below p_n/q_n
        return False
    return q * (-disp) < (1 << table.w) // 64  # q*eta < 1/64 keeps bands intact


def _log1p_poly(w):
    # valid for |w| <= 1/64; quartic truncation error below 2e-10 per sum
    return w * (1.0 + w * (-0.5 + w * (1.0 / 3.0 - 0.25 * w)))


def _structured_batch(table: ConvergentTable, n: int, obs: SingularObservable,
                      xs_bits, *, derivative: bool = False, truncation=None,
                      rational: bool = False):
    """Rigid (or lattice) sums for a batch of points via exact band geometry.

    Returns (values, absmass, excluded) float/int arrays over the batch.
    truncation, when given, is the TruncatedObservable whose cut zeroes edge
    bands; only one-sided shapes carry a truncation.
    """
    ctx = _rigid_context(table, n)
    q, w = ctx.q, ctx.w
    modulus = 1 << w
    eta_bits = 0 if rational else ctx.eta_bits
    eta = 0.0 if rational else ctx.eta
    cL, cR, g0 = obs.c_left, obs.c_right, obs.constant
    cut_scaled = None
    if truncation is not None:
        if truncation.mirrored and not cR:
            raise ValueError("mirrored truncation on a left-sided observable")
        cut_scaled = modulus  # numerator units: cut iff 50*num_bits <(=) modulus

    m = len(xs_bits)
    values = np.zeros(m)
    absmass = np.zeros(m)
    excluded = np.zeros(m, dtype=np.int64)

    ls = np.empty(m, dtype=np.int64)
    s_hi = np.empty(m)
    s_full = np.empty(m)
    one_minus_s = np.empty(m)
    s_bits_arr: list[int] = []
    for j, xb in enumerate(xs_bits):
        qx = q * xb
        l = qx >> w
        sb = qx - (l << w)
        sh, sl = bits_to_dd(sb, w)
        ls[j] = l
        s_hi[j] = sh
        s_full[j] = sh + sl
        one_minus_s[j] = (1.0 - sh) - sl
        s_bits_arr.append(sb)

    # vector correction sums over interior bands
    left_corr = np.zeros(m)
    left_abs = np.zeros(m)
    right_corr = np.zeros(m)
    right_abs = np.zeros(m)
    left_deriv = np.zeros(m)
    right_deriv = np.zeros(m)

    for j0 in range(0, m, _SAMPLE_SLAB):
        j1 = min(j0 + _SAMPLE_SLAB, m)
        lsl = ls[j0:j1, None]
        shl = s_hi[j0:j1, None]
        if cL:
            off = (q - lsl) % q
            for k0 in range(2, q, _BAND_CHUNK):
                k1 = min(k0 + _BAND_CHUNK, q)
                karr = np.arange(k0, k1, dtype=np.int64)[None, :]
                ik = ((off - karr) % q) * ctx.pinv % q
                z = karr.astype(np.float64) - shl
                if derivative:
                    left_deriv[j0:j1] += np.sum(1.0 / (z + eta * ik), axis=1)
                elif not rational:
                    pv = _log1p_poly((eta * ik) / z)
                    left_corr[j0:j1] += np.sum(pv, axis=1)
                    left_abs[j0:j1] += np.sum(np.abs(pv), axis=1)
        if cR:
            off = (-lsl) % q
            for m0 in range(1, q, _BAND_CHUNK):
                m1 = min(m0 + _BAND_CHUNK, q)
                marr = np.arange(m0, m1, dtype=np.int64)[None, :]
                im = ((marr + off) % q) * ctx.pinv % q
                z = marr.astype(np.float64) + shl
                if derivative:
                    right_deriv[j0:j1] += np.sum(1.0 / (z - eta * im), axis=1)
                elif not rational:
                    pv = _log1p_poly((-eta * im) / z)
                    right_corr[j0:j1] += np.sum(pv, axis=1)
                    right_abs[j0:j1] += np.sum(np.abs(pv), axis=1)

    logq = math.log(q)
    wln2 = w * LN2
    guard_scaled = (q * modulus) >> 128

    for j in range(m):
        l = int(ls[j])
        sb = s_bits_arr[j]
        s = float(s_full[j])
        oms = float(one_minus_s[j])
        val = 0.0
        amass = q * abs(g0)
        exc = 0
        terms_kept = q

        # the band-q / band-0 orbit point is shared by both sides
        i_edge = (-l) % q * ctx.pinv % q
        edge_low_bits = sb - i_edge * eta_bits  # right-distance numerator
        wrapped = edge_low_bits < 0

        if cL:
            i1 = (q - 1 - l) % q * ctx.pinv % q
            num1 = (modulus - sb) + i1 * eta_bits
            numq = (q * modulus - sb + i_edge * eta_bits) if not wrapped \
                else -edge_low_bits
            cut1 = cut_scaled is not None and 50 * num1 <= cut_scaled
            cutq = cut_scaled is not None and wrapped and 50 * numq <= cut_scaled
            # points zeroed by the cut are legal no matter how close they sit
            if not cut1 and num1 <= guard_scaled:
                raise SingularityHitError(i1)
            if not cutq and numq <= guard_scaled:
                raise SingularityHitError(i_edge)
            if derivative:
                total = float(left_deriv[j])
                if not cut1:
                    total += q * modulus / num1 / q
                else:
                    terms_kept -= 1
                    exc += 1
                if not cutq:
                    total += q * modulus / numq / q
                else:
                    terms_kept -= 1
                    exc += 1
                val += cL * q * total
                amass += cL * q * total
            else:
                base = float(gammaln(q + 1.0 - s) - gammaln(max(oms, 5e-324)))
                interior = base - math.log(max(oms, 5e-324)) - math.log(q - s)
                logs = interior + float(left_corr[j])
                kept_logs = 0
                if not cut1:
                    logs += math.log(num1) - wln2
                else:
                    kept_logs -= 1
                    exc += 1
                if not cutq:
                    logs += math.log(numq) - wln2
                else:
                    kept_logs -= 1
                    exc += 1
                kept = q + kept_logs
                terms_kept = kept
                val += -cL * (logs - kept * logq)
                amass += cL * (q * logq - interior + float(left_abs[j]) + 2 * wln2)
        if cR:
            num0 = edge_low_bits if not wrapped else q * modulus + edge_low_bits
            cut0 = (cut_scaled is not None and truncation.mirrored
                    and not wrapped and 50 * num0 < cut_scaled)
            if not cut0 and num0 <= guard_scaled:
                raise SingularityHitError(i_edge)
            if derivative:
                total = float(right_deriv[j])
                if not cut0:
                    total += q * modulus / num0 / q
                else:
                    terms_kept -= 1
                    exc += 1
                val -= cR * q * total
                amass += cR * q * total
            else:
                base = float(gammaln(q + s) - gammaln(max(s, 5e-324)))
                interior = base - math.log(max(s, 5e-324))
                logs = interior + float(right_corr[j])
                kept = q
                if not cut0:
                    logs += math.log(num0) - wln2
                else:
                    kept -= 1
                    exc += 1
                if truncation is not None and truncation.mirrored:
                    terms_kept = kept
                val += -cR * (logs - kept * logq)
                amass += cR * (q * logq - interior + float(right_abs[j]) + wln2)

        if not derivative:
            val += terms_kept * g0
        values[j] = val
        absmass[j] = amass
        excluded[j] = exc
    return values, absmass, excluded


def rigid_values(table: ConvergentTable, n: int, xs_bits, obs,
                 *, derivative: bool = False, rational: bool = False):
    """Batched phi^(q_n) (or derivative / lattice) values at exact points.

    obs may be a SingularObservable or a TruncatedObservable; structured
    geometry is used when eligible, else each point falls back to the
    generic dd path.  Returns (values, error_bounds, excluded) arrays.
    """
    truncation = None
    base = obs
    if isinstance(obs, TruncatedObservable):
        truncation = obs
        base = obs.base
        if truncation.q_n != table.q[n]:
            raise ValueError("truncation level does not match the requested level")
    q = table.q[n]
    if structured_eligible(base, table, n):
        values, absmass, excluded = _structured_batch(
            table, n, base, xs_bits, derivative=derivative,
            truncation=truncation, rational=rational)
        bounds = np.array([summation_error_bound(a, q) for a in absmass])
        return values, bounds, excluded
    kind = "derivative" if derivative else "value"
    ev = _TermEvaluator(base, kind, truncation, table.w)
    out_v = np.empty(len(xs_bits))
    out_b = np.empty(len(xs_bits))
    out_e = np.zeros(len(xs_bits), dtype=np.int64)
    for j, xb in enumerate(xs_bits):
        if rational:
            r = _generic_sum(ev, xb, q, table.w, step_fraction=Fraction(1, q))
        else:
            r = _generic_sum(ev, xb, q, table.w, step_bits=table.alpha_bits)
        out_v[j], out_b[j], out_e[j] = r.value, r.error_bound, r.excluded
    return out_v, out_b, out_e


# ---------------------------------------------------------------------------
# public operations


def cocycle_sum(phi: SingularObservable, table: ConvergentTable, x, n: int) -> SumResult:
    """The cocycle value phi^(n)(x), all three branches including n < 0."""
    if abs(n) > _MAX_COCYCLE:
        raise OverflowGuardError("cocycle length beyond the 2**62 guard")
    pt = _as_point(x, table)
    if n == 0:
        return SumResult(0.0, 0.0, 0, 0)
    if n < 0:
        base = cocycle_sum(phi, table, pt.advance(n, table), -n)
        return SumResult(-base.value, base.error_bound, base.excluded, base.terms)
    ev = _TermEvaluator(phi, "value", None, table.w)
    return _generic_sum(ev, pt.bits, n, table.w, step_bits=table.alpha_bits)


def _check_level(table: ConvergentTable, n: int):
    if not 1 <= n <= table.depth:
        raise ValueError(f"level must lie in [1, {table.depth}]")


def rigid_sum(phi, table: ConvergentTable, x, n: int) -> SumResult:
    """phi^(q_n)(x); phi may be singular or truncated (cut terms excluded)."""
    _check_level(table, n)
    pt = _as_point(x, table)
    v, b, e = rigid_values(table, n, [pt.bits], phi)
    return SumResult(float(v[0]), float(b[0]), int(e[0]), table.q[n])


def rational_sum(phi_bar: TruncatedObservable, table: ConvergentTable, n: int,
                 x) -> SumResult:
    """Sum of the truncated observable over the exact lattice x + l/q_n."""
    _check_level(table, n)
    if phi_bar.q_n != table.q[n]:
        raise ValueError("truncation level does not match the requested level")
    pt = _as_point(x, table)
    v, b, e = rigid_values(table, n, [pt.bits], phi_bar, rational=True)
    return SumResult(float(v[0]), float(b[0]), int(e[0]), table.q[n])


def derivative_sum(phi, table: ConvergentTable, x, n: int) -> SumResult:
    """Sum of phi' along the rigid orbit of length q_n."""
    _check_level(table, n)
    pt = _as_point(x, table)
    v, b, e = rigid_values(table, n, [pt.bits], phi, derivative=True)
    return SumResult(float(v[0]), float(b[0]), int(e[0]), table.q[n])


# ---------------------------------------------------------------------------
# Denjoy-Koksma verification


class SawtoothObservable:
    """f(x) = {x} - 1/2; circle variation 2 (interior rise plus wrap jump)."""

    variation = 2.0
    mean = 0.0

    @staticmethod
    def terms(pos_h, pos_l):
        return (pos_h - 0.5) + pos_l


@dataclass(frozen=True)
class DKReport:
    level: int
    q: int
    bound: float
    max_deviation: float
    samples: int
    budget: float
    passed: bool
    variation_reported: float


def _dk_terms_sum(terms_fn, x_bits, count, w, step_bits):
    parts = []
    for start, ph, pl in _iter_positions(x_bits, count, w, step_bits=step_bits):
        arr = terms_fn(ph, pl)
        for c0 in range(0, arr.size, SUM_CHUNK):
            parts.append(float(np.sum(arr[c0:c0 + SUM_CHUNK])))
    return math.fsum(parts)


def denjoy_koksma_check(f, table: ConvergentTable, n: int, sample_count: int,
                        seed: int = 0, derivative: bool = False) -> DKReport:
    """Max over samples of |f^(q_n)(x) - q_n * mean(f)| against the BV bound.

    f is one of: SawtoothObservable, a smooth SingularObservable (trig
    polynomial), a TruncatedObservable (derivative=True checks its
    derivative), or a SymmetricTruncation (always its derivative, with the
    stated 2 q_n / eta bound).
    """
    _check_level(table, n)
    q = table.q[n]
    w = table.w

    if isinstance(f, SawtoothObservable) or f is SawtoothObservable:
        f = SawtoothObservable()
        terms_fn = lambda ph, pl: f.terms(ph, pl)
        mean, bound, var_reported = 0.0, f.variation, f.variation
        max_term = 1.0
    elif isinstance(f, SymmetricTruncation):
        d = f.base.c_left
        wdt = f.window
        fp_hi = d * (1.0 / wdt - 1.0 / (1.0 - wdt))
        var_reported = 4.0 * fp_hi
        bound = f.dk_bound
        mean = 0.0
        ev = _TermEvaluator(f.base, "derivative", f, w)
        terms_fn = lambda ph, pl: ev(ph, pl)[0]
        max_term = fp_hi
    elif isinstance(f, TruncatedObservable):
        if derivative:
            mean = f.derivative_mean
            bound = var_reported = f.derivative_variation
            max_term = 50.0 * q * 2
        else:
            mean = f.mean
            bound = var_reported = f.variation
            max_term = math.log(50.0 * q) + abs(f.base.constant)
        ev = _TermEvaluator(f.base, "derivative" if derivative else "value", f, w)
        terms_fn = lambda ph, pl: ev(ph, pl)[0]
    elif isinstance(f, SingularObservable):
        if f.c_left or f.c_right:
            raise ValueError("Denjoy-Koksma needs bounded variation; truncate first")
        grid = np.linspace(0.0, 1.0, 4097)
        gp = np.abs(np.gradient([f._g(float(t)) for t in grid], grid))
        var_reported = bound = float(np.trapezoid(gp, grid))
        mean = f.constant
        ev = _TermEvaluator(f, "value", None, w)
        terms_fn = lambda ph, pl: ev(ph, pl)[0]
        max_term = abs(f.constant) + sum(abs(a) + abs(b) for _, a, b in f.trig)
    else:
        raise TypeError("unsupported bounded-variation descriptor")

    budget = q * math.ldexp(max_term, -50)
    worst = 0.0
    for i in range(sample_count):
        rng = random.Random(derive_seed(seed, f"birkhoff:dk:{n}:{i}"))
        xb = rng.getrandbits(w)
        total = _dk_terms_sum(terms_fn, xb, q, w, table.alpha_bits)
        worst = max(worst, abs(total - q * mean))
    return DKReport(n, q, bound, worst, sample_count, budget,
                    worst <= bound + budget, var_reported)
