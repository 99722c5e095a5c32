"""Exact fixed-point circle arithmetic and double-double helpers.

Circle points are carried as W-bit unsigned integers b encoding x = b / 2**W,
so rotation orbits advance by exact modular addition.  For bulk numerics each
point is lowered to an unevaluated double-double pair (hi, lo) with
hi + lo = x up to ~2**-106, which keeps position error far below the scale
1/(50*q_n) where the logarithmic singularity amplifies it.
"""

from __future__ import annotations

import hashlib
import math
from fractions import Fraction

import numpy as np

# W >= 192 required by the orbit contracts; 256 leaves headroom so that
# q_n * alpha quantization stays below 2**-190 even at depth-8 denominators.
DEFAULT_BITS = 256

# Fixed reduction chunk so summation trees do not depend on thread count.
SUM_CHUNK = 1 << 20


def derive_seed(master: int, label: str) -> int:
    """Stable 64-bit stream seed for module:operation:index labels."""
    h = hashlib.sha256(f"{master}:{label}".encode()).digest()
    return int.from_bytes(h[:8], "big")


# ---------------------------------------------------------------------------
# scalar fixed point


def bits_from_fraction(fr: Fraction, w: int = DEFAULT_BITS) -> int:
    """Nearest W-bit fixed-point encoding of a rational in [0, 1)."""
    fr = fr % 1
    return ((fr.numerator << (w + 1)) // fr.denominator + 1) >> 1


def bits_from_float(x: float, w: int = DEFAULT_BITS) -> int:
    return bits_from_fraction(Fraction(x), w)


def fraction_from_bits(bits: int, w: int = DEFAULT_BITS) -> Fraction:
    return Fraction(bits, 1 << w)


def float_from_bits(bits: int, w: int = DEFAULT_BITS) -> float:
    return bits / (1 << w)


def sqrt_bits(n: int, w: int = DEFAULT_BITS) -> int:
    """floor(sqrt(n) * 2**w) computed exactly."""
    return math.isqrt(n << (2 * w))


def bits_to_dd(bits: int, w: int = DEFAULT_BITS) -> tuple[float, float]:
    """Split b/2**w into a double-double pair (exact to ~2**-(w) tail)."""
    hi = float(bits)
    lo = float(bits - int(hi))
    scale = math.ldexp(1.0, -w)
    return hi * scale, lo * scale


# ---------------------------------------------------------------------------
# vectorized double-double arithmetic (error-free transforms)


def two_sum(a, b):
    s = a + b
    bv = s - a
    err = (a - (s - bv)) + (b - bv)
    return s, err


def dd_add(ah, al, bh, bl):
    """(ah,al) + (bh,bl) with ~2**-104 relative error."""
    s, e = two_sum(ah, bh)
    e = e + (al + bl)
    hi = s + e
    lo = e - (hi - s)
    return hi, lo


def dd_frac(h, l):
    """Reduce a dd value in (-2, 4) to its fractional part in [0, 1)."""
    k = np.floor(h)
    h = h - k  # exact: k has few bits
    total = h + l
    shift = np.where(total >= 1.0, -1.0, np.where(total < 0.0, 1.0, 0.0))
    h = h + shift
    # renormalize
    hi = h + l
    lo = l - (hi - h)
    # guard against an exact landing on 1.0 after rounding
    wrap = hi >= 1.0
    if np.any(wrap):
        hi = np.where(wrap, hi - 1.0, hi)
    return hi, lo


def dd_table(step_bits: int, count: int, w: int = DEFAULT_BITS,
             stride: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """dd pairs of (i*stride*step) mod 1 for i = 0..count-1, exact per entry."""
    modulus = 1 << w
    inc = (step_bits * stride) % modulus
    hs = np.empty(count)
    ls = np.empty(count)
    acc = 0
    for i in range(count):
        hs[i], ls[i] = bits_to_dd(acc, w)
        acc += inc
        if acc >= modulus:
            acc -= modulus
    return hs, ls


def block_tables(step_bits: int, count: int, w: int = DEFAULT_BITS):
    """(u, v) decomposition tables so position i = u + v*K needs two dd adds.

    Keeps exact big-integer work at O(sqrt(count)) instead of O(count).
    """
    if count <= 0:
        raise ValueError("count must be positive")
    k = 1 << max(0, (count.bit_length() + 1) // 2)
    k = min(k, 4096, count)
    nv = -(-count // k)
    uh, ul = dd_table(step_bits, k, w)
    vh, vl = dd_table(step_bits, nv, w, stride=k)
    return k, (uh, ul), (vh, vl)


# ---------------------------------------------------------------------------
# deterministic compensated summation


def chunked_sum(values: np.ndarray) -> tuple[float, float]:
    """Deterministic sum of a 1-d array plus its absolute-value mass.

    Pairwise partial sums over fixed 2**20-element chunks are combined with
    math.fsum, so the reduction tree depends only on the term count.
    """
    n = values.size
    if n == 0:
        return 0.0, 0.0
    parts = []
    absparts = []
    for start in range(0, n, SUM_CHUNK):
        block = values[start:start + SUM_CHUNK]
        parts.append(float(np.sum(block)))
        absparts.append(float(np.sum(np.abs(block))))
    return math.fsum(parts), math.fsum(absparts)


def summation_error_bound(abs_mass: float, terms: int) -> float:
    """Budget covering the pairwise-within-chunk + fsum reduction error."""
    if terms == 0:
        return 0.0
    return abs_mass * math.ldexp(1.0, -50)
