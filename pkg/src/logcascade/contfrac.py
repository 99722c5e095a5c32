"""Exact continued-fraction machinery.

Everything order-sensitive (convergent sandwich, the large-ratio level set,
digit certification) is decided with big-integer arithmetic; floating point
only appears in reported statistics.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .fixedpoint import DEFAULT_BITS, derive_seed

# ratio defining the large-ratio levels: q_{n+1} >= RATIO_FLOOR * q_n
RATIO_FLOOR = 100

# desk-scale cutoff used only to flag Liouville-like windows of expanded input
_WINDOW_QUOTIENT_CAP = 1000


class PrecisionExhaustedError(RuntimeError):
    """Raised when the input precision cannot certify the next digit."""

    def __init__(self, digits_ok: int, message: str | None = None):
        self.digits_ok = digits_ok
        super().__init__(message or f"precision-exhausted after {digits_ok} certified digits")


@dataclass(frozen=True)
class PartialQuotientSeq:
    """Positive partial quotients a_1..a_N with their provenance."""

    quotients: tuple[int, ...]
    source: str = "explicit"  # explicit | periodic | expanded
    pattern: tuple[int, ...] | None = None
    terminated: bool = False

    def __post_init__(self):
        if not self.quotients:
            raise ValueError("quotient sequence must be nonempty")
        if any(a < 1 for a in self.quotients):
            raise ValueError("every partial quotient must be >= 1")
        if self.source == "periodic":
            if not self.pattern:
                raise ValueError("periodic source requires a pattern")
            for i, a in enumerate(self.quotients):
                if a != self.pattern[i % len(self.pattern)]:
                    raise ValueError("periodic prefix does not match its pattern")

    @staticmethod
    def from_pattern(pattern, depth: int) -> "PartialQuotientSeq":
        pattern = tuple(int(a) for a in pattern)
        quots = tuple(pattern[i % len(pattern)] for i in range(depth))
        return PartialQuotientSeq(quots, source="periodic", pattern=pattern)

    @staticmethod
    def from_list(quotients) -> "PartialQuotientSeq":
        return PartialQuotientSeq(tuple(int(a) for a in quotients), source="explicit",
                                  terminated=True)

    def __len__(self) -> int:
        return len(self.quotients)

    def value(self) -> Fraction:
        """Exact value of the finite expansion [0; a_1, ..., a_N]."""
        num, den = 1, self.quotients[-1]
        for a in reversed(self.quotients[:-1]):
            num, den = den, a * den + num
        return Fraction(num, den)

    def canonical(self) -> "PartialQuotientSeq":
        """Resolve the trailing-1 ambiguity to the form not ending in 1."""
        q = list(self.quotients)
        if len(q) > 1 and q[-1] == 1:
            q.pop()
            q[-1] += 1
        return PartialQuotientSeq(tuple(q), source=self.source, terminated=self.terminated)


# ---------------------------------------------------------------------------
# expansion


def _euclid_digits(x: Fraction, n_max: int) -> tuple[list[int], bool]:
    digits = []
    num, den = x.numerator, x.denominator
    while len(digits) < n_max and num:
        a, rem = divmod(den, num)
        digits.append(a)
        den, num = num, rem
    return digits, (num == 0)


def _interval_digits(lo: Fraction, hi: Fraction, n_max: int) -> list[int]:
    digits: list[int] = []
    while len(digits) < n_max:
        if lo <= 0 or hi >= 1:
            raise PrecisionExhaustedError(len(digits))
        inv_hi = Fraction(hi.denominator, hi.numerator)
        inv_lo = Fraction(lo.denominator, lo.numerator)
        a_min = inv_hi.numerator // inv_hi.denominator
        a_max = inv_lo.numerator // inv_lo.denominator
        if a_min != a_max:
            raise PrecisionExhaustedError(len(digits))
        digits.append(a_min)
        lo, hi = inv_hi - a_min, inv_lo - a_min
    return digits


def expand(x, n_max: int, precision_bits: int | None = None) -> PartialQuotientSeq:
    """First n_max partial quotients of x in (0, 1).

    x may be a Fraction/float/decimal string (taken as an exact rational, so
    the expansion may terminate early) or a pair (bits, pbits) encoding the
    interval [(bits-1)/2**pbits, (bits+1)/2**pbits]; in the latter mode every
    digit is certified by interval containment and PrecisionExhaustedError
    signals that pbits is too small for n_max.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if isinstance(x, tuple):
        bits, pbits = x
        one = 1 << pbits
        if not 0 < bits < one:
            raise ValueError("fixed-point value must lie in (0, 1)")
        lo = Fraction(max(bits - 1, 0), one)
        hi = Fraction(min(bits + 1, one), one)
        digits = _interval_digits(lo, hi, n_max)
        return PartialQuotientSeq(tuple(digits), source="expanded")
    if isinstance(x, str):
        x = Fraction(x)
    elif isinstance(x, float):
        x = Fraction(x)
    if not isinstance(x, Fraction):
        raise TypeError("x must be a Fraction, float, decimal string or (bits, pbits)")
    if not 0 < x < 1:
        raise ValueError("x must lie in (0, 1)")
    digits, terminated = _euclid_digits(x, n_max)
    return PartialQuotientSeq(tuple(digits), source="expanded", terminated=terminated)


def quadratic_surd_bits(radicand: int, add: int, den: int, pbits: int) -> int:
    """floor-accurate fixed-point bits of (sqrt(radicand) + add) / den.

    The result b satisfies |(sqrt(radicand)+add)/den - b/2**pbits| <= 2**-pbits,
    which is exactly the containment the certified expander assumes.
    """
    guard = 32
    qb = pbits + guard
    s = math.isqrt(radicand << (2 * qb))
    num = s + (add << qb)
    return num // (den << guard)


# ---------------------------------------------------------------------------
# convergent tables


@dataclass
class ConvergentTable:
    """Exact convergents p_i/q_i (i = 0..N) plus a W-bit encoding of alpha.

    For periodic sources the encoding comes from an internal deep extension of
    the pattern, so alpha_bits carries the full W+8 bits of accuracy even when
    the visible table is shallow.  Explicit finite sources are exact rationals.
    """

    quotients: PartialQuotientSeq
    p: tuple[int, ...]
    q: tuple[int, ...]
    alpha_bits: int
    w: int
    deep_p: int
    deep_q: int
    rational: bool

    @property
    def depth(self) -> int:
        return len(self.quotients)

    @property
    def alpha_float(self) -> float:
        return self.alpha_bits / (1 << self.w)

    def alpha_fraction_proxy(self) -> Fraction:
        """Deep rational within 2**-(w+8) of alpha; exact when rational."""
        return Fraction(self.deep_p, self.deep_q)

    def displacement_bits(self, n: int) -> int:
        """Signed q_n*alpha - p_n in units of 2**-w (exact on alpha_bits)."""
        return self.q[n] * self.alpha_bits - (self.p[n] << self.w)

    def displacement(self, n: int) -> float:
        return self.displacement_bits(n) / (1 << self.w)

    def compares_below(self, n: int) -> bool:
        """Exact truth of alpha < p_n/q_n."""
        if self.rational:
            return Fraction(self.deep_p, self.deep_q) < Fraction(self.p[n], self.q[n])
        d = self.p[n] * self.deep_q - self.deep_p * self.q[n]
        if d == 0:
            raise ArithmeticError("deep proxy collided with a table convergent")
        # |alpha - p_n/q_n| > 1/(2 q_n q_{n+1}) while the proxy is within
        # 2**-(w+8); the construction guarantees the sign is decided.
        return d > 0

    def h_set(self, mirrored: bool = False) -> tuple[int, ...]:
        """Levels n with q_{n+1} >= 100 q_n and alpha on the paper side.

        mirrored=True selects alpha > p_n/q_n instead; the lemma machinery is
        only claimed for the default orientation.
        """
        out = []
        for n in range(self.depth):
            if self.q[n + 1] < RATIO_FLOOR * self.q[n]:
                continue
            below = self.compares_below(n)
            if below != mirrored:
                out.append(n)
        return tuple(out)

    def h_set_fast(self, mirrored: bool = False) -> tuple[int, ...]:
        """Same set decided through alpha_bits with an explicit guard margin."""
        out = []
        for n in range(self.depth):
            if self.q[n + 1] < RATIO_FLOOR * self.q[n]:
                continue
            d = self.displacement_bits(n)
            if abs(d) <= 2 * self.q[n]:
                raise ArithmeticError("alpha_bits guard too small to decide the sign")
            below = d < 0
            if below != mirrored:
                out.append(n)
        return tuple(out)

    def verify_invariants(self) -> dict:
        """Exact big-integer checks of the classical convergent identities."""
        n = self.depth
        a = self.quotients.quotients
        rec = self.q[0] == 1 and self.p[0] == 0 and self.q[1] == a[0] and self.p[1] == 1
        for i in range(1, n):
            rec = rec and self.q[i + 1] == a[i] * self.q[i] + self.q[i - 1]
            rec = rec and self.p[i + 1] == a[i] * self.p[i] + self.p[i - 1]
        det = all(self.p[i] * self.q[i - 1] - self.p[i - 1] * self.q[i] == (-1) ** (i - 1)
                  for i in range(1, n + 1))
        growth = all(self.q[i] * 5 ** (i - 2) >= 8 ** (i - 2) for i in range(2, n + 1))
        # strict sandwich holds for infinite expansions; finite rational
        # sources can sit exactly on either boundary (the expansion tail
        # terminates), so they get the boundary-inclusive comparison
        alpha = self.alpha_fraction_proxy()
        slack = Fraction(1, 1 << (self.w + 8))
        sandwich = True
        last = n - 1 if self.rational else n
        for i in range(last):
            gap = abs(alpha - Fraction(self.p[i], self.q[i]))
            lo = Fraction(1, 2 * self.q[i] * self.q[i + 1])
            hi = Fraction(1, self.q[i] * self.q[i + 1])
            if self.rational:
                sandwich = sandwich and lo <= gap <= hi
            else:
                sandwich = sandwich and (gap - slack > lo) and (gap + slack < hi)
        return {"recurrence": rec, "determinant": det, "growth": growth,
                "sandwich": sandwich}


def convergents(pq: PartialQuotientSeq, w: int = DEFAULT_BITS) -> ConvergentTable:
    a = pq.quotients
    p = [0, 1]
    q = [1, a[0]]
    for ai in a[1:]:
        p.append(ai * p[-1] + p[-2])
        q.append(ai * q[-1] + q[-2])

    if pq.source == "periodic":
        # extend internally until the convergent error drops below 2**-(w+10)
        dp, dq = p[-1], q[-1]
        dp_prev, dq_prev = p[-2], q[-2]
        i = len(a)
        target = 1 << (w + 10)
        while dq * dq_prev < target:
            ai = pq.pattern[i % len(pq.pattern)]
            dp, dp_prev = ai * dp + dp_prev, dp
            dq, dq_prev = ai * dq + dq_prev, dq
            i += 1
        rational = False
        deep_p, deep_q = dp, dq
    else:
        deep_p, deep_q = p[-1], q[-1]
        rational = True

    alpha_bits = ((deep_p << (w + 1)) // deep_q + 1) >> 1
    return ConvergentTable(pq, tuple(p), tuple(q), alpha_bits, w, deep_p, deep_q, rational)


# ---------------------------------------------------------------------------
# Diophantine condition profile


@dataclass
class AlphaProfile:
    h_set: tuple[int, ...]
    series_levels: tuple[int, ...]
    series_partial_sums: tuple[float, ...]
    subsequence: tuple[int, ...] | None
    subsequence_excluded: tuple[int, ...]
    subsequence_partial_sums: tuple[float, ...]
    density_liminf: float | None
    bounded_type: bool
    max_quotient: int
    liouville_score: float
    levy_sequence: tuple[tuple[int, float], ...]
    product_bounds_ok: bool
    increments_ratio: float | None
    increments_nonvanishing: bool | None


def _series_trend(partials: tuple[float, ...]):
    """Growth ratio of the last two dyadic increment blocks of the partials.

    A ratio near 1 means the increments are not dying off (divergence trend);
    geometric decay drives it toward 0.  Never a proof either way.
    """
    n = len(partials)
    if n < 8:
        return None, None
    s_n, s_half, s_quarter = partials[-1], partials[n // 2 - 1], partials[n // 4 - 1]
    prev = s_half - s_quarter
    if prev <= 0:
        return None, None
    ratio = (s_n - s_half) / prev
    return ratio, ratio >= 0.6


def check_conditions(table: ConvergentTable,
                     subsequence: list[int] | None = None) -> AlphaProfile:
    """Evaluate the rigidity-level and series conditions on a table window.

    Levels with q_n <= 1 contribute no series term (log q_n = 0) and are
    reported as excluded rather than raising.
    """
    n_levels = table.depth
    q = table.q
    series_levels = tuple(n for n in range(1, n_levels + 1) if q[n] > 1)
    partial = 0.0
    partials = []
    for n in series_levels:
        partial += 1.0 / math.log(q[n])
        partials.append(partial)

    sub = None
    sub_excluded: tuple[int, ...] = ()
    sub_partials: tuple[float, ...] = ()
    density = None
    if subsequence is not None:
        sub = tuple(int(n) for n in subsequence)
        if any(b <= a for a, b in zip(sub, sub[1:])):
            raise ValueError("subsequence-out-of-range: must be strictly increasing")
        if sub and (sub[0] < 1 or sub[-1] > n_levels):
            raise ValueError(
                f"subsequence-out-of-range: levels must lie in [1, {n_levels}]")
        density = min((k + 1) / nk for k, nk in enumerate(sub)) if sub else None
        acc = 0.0
        kept_partials = []
        excluded = []
        for nk in sub:
            if q[nk] <= 1:
                excluded.append(nk)
                continue
            acc += 1.0 / math.log(q[nk])
            kept_partials.append(acc)
        sub_excluded = tuple(excluded)
        sub_partials = tuple(kept_partials)

    a = table.quotients.quotients
    prod = 1
    bounds_ok = True
    for n in range(1, n_levels + 1):
        prod *= a[n - 1]
        bounds_ok = bounds_ok and prod <= q[n] <= prod * (1 << n)

    liouville = 0.0
    for n in range(1, n_levels):
        if q[n] > 1:
            liouville = max(liouville, math.log(q[n + 1]) / math.log(q[n]))

    levy = tuple((n, math.log(q[n]) / n) for n in range(1, n_levels + 1) if q[n] > 1)
    ratio, nonvanishing = _series_trend(tuple(partials))

    src = table.quotients.source
    bounded = True if src in ("periodic", "explicit") else max(a) <= _WINDOW_QUOTIENT_CAP

    return AlphaProfile(
        h_set=table.h_set(),
        series_levels=series_levels,
        series_partial_sums=tuple(partials),
        subsequence=sub,
        subsequence_excluded=sub_excluded,
        subsequence_partial_sums=sub_partials,
        density_liminf=density,
        bounded_type=bounded,
        max_quotient=max(a),
        liouville_score=liouville,
        levy_sequence=levy,
        product_bounds_ok=bounds_ok,
        increments_ratio=ratio,
        increments_nonvanishing=nonvanishing,
    )


# ---------------------------------------------------------------------------
# almost-every-alpha statistics


def gauss_prediction(k: int) -> float:
    """Invariant-measure weight of digit k: log2((k+1)^2 / (k(k+2)))."""
    return math.log2((k + 1) ** 2 / (k * (k + 2)))


@dataclass
class GaussDigitStats:
    ensemble: int
    digits_per_sample: int
    seed: int
    counts: dict[int, int]
    total_digits: int

    def frequency(self, k: int) -> float:
        return self.counts.get(k, 0) / self.total_digits

    def rows(self, k_max: int = 12):
        return [(k, self.frequency(k), gauss_prediction(k)) for k in range(1, k_max + 1)]


def _sample_bits(seed: int, label: str, pbits: int) -> int:
    rng = random.Random(derive_seed(seed, label))
    bits = 0
    while not 0 < bits < (1 << pbits):
        bits = rng.getrandbits(pbits)
    return bits


def gauss_digit_stats(ensemble_size: int, digits_per_sample: int, seed: int,
                      precision_bits: int | None = None) -> GaussDigitStats:
    """Digit frequencies of uniform random points, certified digit by digit."""
    if ensemble_size < 1:
        raise ValueError("ensemble_size must be >= 1")
    pbits = precision_bits or (12 * digits_per_sample + 256)
    counts: dict[int, int] = {}
    total = 0
    for i in range(ensemble_size):
        bits = _sample_bits(seed, f"contfrac:gauss:{i}", pbits)
        seq = expand((bits, pbits), digits_per_sample)
        for a in seq.quotients:
            counts[a] = counts.get(a, 0) + 1
            total += 1
    return GaussDigitStats(ensemble_size, digits_per_sample, seed, counts, total)


LEVY_CONSTANT = math.pi ** 2 / (12 * math.log(2))


@dataclass
class LevyEstimate:
    ensemble: int
    depth: int
    seed: int
    values: tuple[float, ...]

    @property
    def mean(self) -> float:
        return sum(self.values) / len(self.values)

    @property
    def spread(self) -> float:
        m = self.mean
        return math.sqrt(sum((v - m) ** 2 for v in self.values) / len(self.values))


def levy_estimate(ensemble_size: int, depth: int, seed: int,
                  precision_bits: int | None = None) -> LevyEstimate:
    """Ensemble statistics of log(q_depth)/depth for uniform random points."""
    if ensemble_size < 1:
        raise ValueError("ensemble_size must be >= 1")
    pbits = precision_bits or (12 * depth + 256)
    values = []
    for i in range(ensemble_size):
        bits = _sample_bits(seed, f"contfrac:levy:{i}", pbits)
        seq = expand((bits, pbits), depth)
        qp, qq = 1, seq.quotients[0]
        for a in seq.quotients[1:]:
            qp, qq = qq, a * qq + qp
        values.append(math.log(qq) / depth)
    return LevyEstimate(ensemble_size, depth, seed, tuple(values))


def alpha_star_table(depth: int = 8, w: int = DEFAULT_BITS) -> ConvergentTable:
    """Canonical test number: positive root of x**2 + 100x - 100 = 0.

    Its expansion repeats (1, 100), so the large-ratio levels are all odd n
    and the denominators grow by ~101 every two levels.
    """
    return convergents(PartialQuotientSeq.from_pattern((1, 100), depth), w)


def golden_table(depth: int = 40, w: int = DEFAULT_BITS) -> ConvergentTable:
    return convergents(PartialQuotientSeq.from_pattern((1,), depth), w)
