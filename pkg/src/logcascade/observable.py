"""Circle observables with one logarithmic singularity.

The canonical shape is

    phi(x) = -cL * log({x0 - x}) - cR * log({x - x0}) + g(x)

with {.} the fractional part and g a trigonometric polynomial plus a
constant.  cL controls the blow-up as x approaches x0 from below, cR from
above.  Both unit log integrals equal 1, so the mean is cL + cR + constant
and mean-zero normalization is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

# evaluation closer to the singularity than this is a caller bug, not a value
GUARD_RADIUS = math.ldexp(1.0, -128)

TWO_PI = 2.0 * math.pi


class UnsupportedShapeError(ValueError):
    pass


@dataclass(frozen=True)
class SingularObservable:
    x0: Fraction
    c_left: float
    c_right: float
    trig: tuple[tuple[int, float, float], ...] = ()  # (freq, cos_coeff, sin_coeff)
    constant: float = 0.0
    mean_zero: bool = False

    def __post_init__(self):
        if self.c_left < 0 or self.c_right < 0:
            raise ValueError("log coefficients must be nonnegative")
        if any(k < 1 for k, _, _ in self.trig):
            raise ValueError("trig frequencies must be positive integers")
        if self.mean_zero and abs(self.mean) > 1e-12:
            raise ValueError("mean_zero observable must integrate to 0")

    @property
    def mean(self) -> float:
        return self.c_left + self.c_right + self.constant

    @property
    def classification(self) -> str:
        if self.c_left == 0 and self.c_right == 0:
            return "smooth"
        if self.c_left == 0 or self.c_right == 0:
            return "one_sided"
        if self.c_left == self.c_right:
            return "symmetric"
        return "asymmetric"

    def definition_limits(self) -> tuple[float, float]:
        """Literal second-derivative limits lim phi''(x) (x-x0)^2 per side.

        Both come out nonnegative (the left limit is c_left, the right is
        c_right), so their sum never distinguishes the symmetric case; the
        classification above therefore reads the coefficients directly and
        these limits are exposed for transparency only.
        """
        return self.c_left, self.c_right

    # -- scalar evaluation (bulk evaluation lives in the Birkhoff engine) --

    def _g(self, x: float) -> float:
        g = self.constant
        for k, a, b in self.trig:
            g += a * math.cos(TWO_PI * k * x) + b * math.sin(TWO_PI * k * x)
        return g

    def _g_prime(self, x: float) -> float:
        g = 0.0
        for k, a, b in self.trig:
            g += TWO_PI * k * (-a * math.sin(TWO_PI * k * x) + b * math.cos(TWO_PI * k * x))
        return g

    def _distances(self, x: float) -> tuple[float, float]:
        d_right = (x - float(self.x0)) % 1.0
        d_left = 1.0 - d_right
        return d_left, d_right

    def __call__(self, x: float) -> float:
        d_left, d_right = self._distances(x)
        v = self._g(x)
        if self.c_left:
            if d_left <= GUARD_RADIUS:
                raise ValueError("evaluation inside the singular guard radius")
            v -= self.c_left * math.log(d_left)
        if self.c_right:
            if d_right <= GUARD_RADIUS:
                raise ValueError("evaluation inside the singular guard radius")
            v -= self.c_right * math.log(d_right)
        return v

    def derivative(self, x: float) -> float:
        d_left, d_right = self._distances(x)
        v = self._g_prime(x)
        if self.c_left:
            if d_left <= GUARD_RADIUS:
                raise ValueError("evaluation inside the singular guard radius")
            v += self.c_left / d_left
        if self.c_right:
            if d_right <= GUARD_RADIUS:
                raise ValueError("evaluation inside the singular guard radius")
            v -= self.c_right / d_right
        return v

    # -- serialization -------------------------------------------------

    def to_descriptor(self) -> dict:
        x0 = self.x0
        return {
            "x0": float(x0) if x0.denominator & (x0.denominator - 1) == 0 else str(x0),
            "cL": self.c_left,
            "cR": self.c_right,
            "trig": [{"freq": k, "cos_coeff": a, "sin_coeff": b} for k, a, b in self.trig],
            "constant": self.constant,
            "mean_zero": self.mean_zero,
        }

    @staticmethod
    def from_descriptor(d: dict) -> "SingularObservable":
        x0 = d.get("x0", 0)
        x0 = Fraction(x0) if not isinstance(x0, Fraction) else x0
        trig = tuple((int(t["freq"]), float(t["cos_coeff"]), float(t["sin_coeff"]))
                     for t in d.get("trig", []))
        return SingularObservable(x0, float(d.get("cL", 0.0)), float(d.get("cR", 0.0)),
                                  trig, float(d.get("constant", 0.0)),
                                  bool(d.get("mean_zero", False)))


def make_paper_phi() -> SingularObservable:
    """phi(x) = -1 - log(1 - x): one-sided singularity at 0, zero mean."""
    return SingularObservable(Fraction(0), 1.0, 0.0, (), -1.0, mean_zero=True)


def make_symmetric_phi() -> SingularObservable:
    """phi(x) = -log(x) - log(1 - x) - 2: symmetric singularity at 0."""
    return SingularObservable(Fraction(0), 1.0, 1.0, (), -2.0, mean_zero=True)


@dataclass(frozen=True)
class Decomposition:
    tilde: SingularObservable
    symmetric: SingularObservable
    degenerate: bool


def decompose_asymmetric(phi1: SingularObservable) -> Decomposition:
    """Split into a one-sided part plus a symmetric part, both mean-balanced.

    The symmetric part carries D = min(cL, cR) on each side; the one-sided
    remainder keeps the excess.  When cL == cR the remainder is smooth and
    the monotone-sum machinery no longer applies to it, so the result is
    flagged degenerate.
    """
    if phi1.c_left == 0 and phi1.c_right == 0:
        raise UnsupportedShapeError("observable has no singular part to decompose")
    d = min(phi1.c_left, phi1.c_right)
    sym_const = -2.0 * d
    sym = SingularObservable(phi1.x0, d, d, (), sym_const,
                             mean_zero=phi1.mean_zero)
    tilde = SingularObservable(phi1.x0, phi1.c_left - d, phi1.c_right - d,
                               phi1.trig, phi1.constant - sym_const,
                               mean_zero=phi1.mean_zero)
    return Decomposition(tilde, sym, degenerate=(phi1.c_left == phi1.c_right))


@dataclass(frozen=True)
class TruncatedObservable:
    """phi zeroed on the approach window of width 1/(50 q_n) at the singularity.

    For the standard orientation (singular as x -> x0 from below) the cut is
    [x0 - 1/(50 q_n), x0); mirrored observables cut [x0, x0 + 1/(50 q_n)).
    Closed forms (variation, mean, and the same for the derivative) are exact
    expressions in log(50 q_n).
    """

    base: SingularObservable
    q_n: int
    mirrored: bool

    @property
    def cut_width(self) -> Fraction:
        return Fraction(1, 50 * self.q_n)

    @property
    def coefficient(self) -> float:
        return self.base.c_right if self.mirrored else self.base.c_left

    def in_cut(self, x: float) -> bool:
        d_left, d_right = self.base._distances(x)
        w = float(self.cut_width)
        return (d_right < w) if self.mirrored else (d_left <= w and d_left > 0.0)

    def __call__(self, x: float) -> float:
        if self.in_cut(x):
            return 0.0
        return self.base(x)

    # -- exact closed forms -------------------------------------------

    @property
    def _m(self) -> int:
        return 50 * self.q_n

    @property
    def variation(self) -> float:
        """Total variation over the fundamental interval starting at x0."""
        c, g0 = self.coefficient, self.base.constant
        logm = math.log(self._m)
        return c * logm + abs(c * logm + g0)

    @property
    def mean(self) -> float:
        c, g0, m = self.coefficient, self.base.constant, self._m
        return c * (1.0 - 1.0 / m - math.log(m) / m) + g0 * (1.0 - 1.0 / m)

    @property
    def derivative_variation(self) -> float:
        return self.coefficient * (2 * self._m - 1)

    @property
    def derivative_mean(self) -> float:
        mean = self.coefficient * math.log(self._m)
        return -mean if self.mirrored else mean

    @property
    def paper_stated_mean(self) -> float:
        """The approximate value -log(q_n)/(50 q_n), reported alongside.

        The exact antiderivative gives -log(50 q_n)/(50 q_n); the closed form
        above is the ground truth and this field only mirrors the commonly
        quoted approximation.
        """
        sign = self.coefficient if not self.mirrored else self.coefficient
        return -sign * math.log(self.q_n) / self._m


def truncate(phi: SingularObservable, q_n: int) -> TruncatedObservable:
    """Truncate a one-sided observable next to its singular approach.

    Two-sided shapes must go through decompose_asymmetric first; smooth parts
    beyond a constant would break the exact closed forms, so they are refused.
    """
    if phi.c_left > 0 and phi.c_right > 0:
        raise UnsupportedShapeError(
            "unsupported-shape: two-sided observables need both-side windows; "
            "decompose first")
    if phi.c_left == 0 and phi.c_right == 0:
        raise UnsupportedShapeError("unsupported-shape: no singularity to truncate")
    if phi.trig:
        raise UnsupportedShapeError(
            "unsupported-shape: closed forms require a constant smooth part")
    if q_n < 1:
        raise ValueError("q_n must be a positive integer")
    return TruncatedObservable(phi, int(q_n), mirrored=(phi.c_left == 0))


@dataclass(frozen=True)
class SymmetricTruncation:
    """Symmetric observable zeroed outside [eta/q_n, 1 - eta/q_n] around x0."""

    base: SingularObservable
    q_n: int
    eta: float

    def __post_init__(self):
        if self.base.classification != "symmetric":
            raise UnsupportedShapeError("symmetric truncation needs cL == cR > 0")
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")

    @property
    def window(self) -> float:
        return self.eta / self.q_n

    def in_cut(self, x: float) -> bool:
        d_left, d_right = self.base._distances(x)
        w = self.window
        return d_right < w or d_left <= w

    @property
    def dk_bound(self) -> float:
        """Stated sum bound 2 q_n / eta for the truncated derivative.

        The derivative of the truncation integrates to 0 by symmetry, so the
        Denjoy-Koksma inequality controls its orbit sums by this constant.
        """
        return 2.0 * self.q_n / self.eta


def truncate_symmetric(phi: SingularObservable, q_n: int, eta: float) -> SymmetricTruncation:
    return SymmetricTruncation(phi, int(q_n), float(eta))
