"""Arbitrary-precision reals, continued fractions, and exact integer polynomials.

``BigReal`` wraps an mpmath float together with the mantissa size it was
produced at.  Every arithmetic operation works at the larger of the two
operand precisions with round-to-nearest (ties to even), which is mpmath's
default rounding and is fixed here for reproducibility.

Continued fraction expansions are certified by the double-run trick: the
expansion is computed at the working precision and again with 64 extra
bits, and only the common prefix of partial quotients is trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import mpmath
from mpmath import mp

MIN_PRECISION_BITS = 64

# Extra mantissa bits used as guard digits inside kernels.
_GUARD_BITS = 64


def _as_mpf(value, prec: int):
    with mp.workprec(prec):
        return mpmath.mpf(value)


@dataclass(frozen=True)
class BigReal:
    """An arbitrary-precision real value with an explicit working precision."""

    value: mpmath.mpf
    precision_bits: int

    def __post_init__(self):
        if self.precision_bits < MIN_PRECISION_BITS:
            raise ValueError(
                f"precision_bits must be >= {MIN_PRECISION_BITS}, "
                f"got {self.precision_bits}"
            )

    # -- constructors -------------------------------------------------

    @classmethod
    def from_int(cls, n: int, precision_bits: int = MIN_PRECISION_BITS) -> "BigReal":
        return cls(_as_mpf(n, precision_bits), precision_bits)

    @classmethod
    def from_str(cls, s: str, precision_bits: int) -> "BigReal":
        return cls(_as_mpf(s, precision_bits), precision_bits)

    @classmethod
    def from_fraction(cls, f: Fraction, precision_bits: int) -> "BigReal":
        with mp.workprec(precision_bits):
            v = mpmath.mpf(f.numerator) / f.denominator
        return cls(v, precision_bits)

    @classmethod
    def from_float(cls, x: float, precision_bits: int = MIN_PRECISION_BITS) -> "BigReal":
        return cls(_as_mpf(x, precision_bits), precision_bits)

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other) -> "BigReal":
        if isinstance(other, BigReal):
            return other
        if isinstance(other, int):
            return BigReal.from_int(other, self.precision_bits)
        if isinstance(other, Fraction):
            return BigReal.from_fraction(other, self.precision_bits)
        if isinstance(other, float):
            return BigReal.from_float(other, self.precision_bits)
        return NotImplemented

    def _binop(self, other, op) -> "BigReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = max(self.precision_bits, other.precision_bits)
        with mp.workprec(prec):
            return BigReal(op(self.value, other.value), prec)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: b / a)

    def __neg__(self):
        return BigReal(-self.value, self.precision_bits)

    def __abs__(self):
        return BigReal(abs(self.value), self.precision_bits)

    def __float__(self):
        return float(self.value)

    def _cmp_value(self, other):
        if isinstance(other, BigReal):
            return other.value
        if isinstance(other, Fraction):
            return mpmath.mpq(other.numerator, other.denominator)
        return other

    def __eq__(self, other):
        return self.value == self._cmp_value(other)

    def __lt__(self, other):
        return self.value < self._cmp_value(other)

    def __le__(self, other):
        return self.value <= self._cmp_value(other)

    def __gt__(self, other):
        return self.value > self._cmp_value(other)

    def __ge__(self, other):
        return self.value >= self._cmp_value(other)

    def __hash__(self):
        return hash((self.value, self.precision_bits))

    def floor(self) -> int:
        with mp.workprec(self.precision_bits + _GUARD_BITS):
            return int(mpmath.floor(self.value))

    # -- serialization -------------------------------------------------

    def to_decimal(self, min_digits: int = 60) -> str:
        """Decimal string carrying at least ``min_digits`` significant digits.

        Enough digits are emitted to make the decimal -> binary round trip
        lossless at ``precision_bits``.
        """
        digits = max(min_digits, int(math.ceil(self.precision_bits * 0.30103)) + 3)
        return mpmath.nstr(
            self.value, digits, strip_zeros=False, min_fixed=1, max_fixed=0
        )

    @classmethod
    def from_decimal(cls, s: str, precision_bits: int) -> "BigReal":
        return cls.from_str(s, precision_bits)

    def scaled_int(self) -> int:
        """Nearest integer to ``value * 2**precision_bits`` (exact)."""
        with mp.workprec(self.precision_bits + _GUARD_BITS):
            return int(mpmath.nint(mpmath.ldexp(self.value, self.precision_bits)))

    def __repr__(self):
        return f"BigReal({mpmath.nstr(self.value, 20)}, prec={self.precision_bits})"


RealLike = Union[BigReal, Fraction, int, float]


def dist_nearest_int(x: RealLike) -> BigReal:
    """Distance from ``x`` to the nearest integer, in [0, 1/2].

    Exact at the working precision; at the midpoint both neighbors attain
    the distance and 1/2 is returned.
    """
    if isinstance(x, Fraction):
        return BigReal.from_fraction(dist_nearest_int_exact(x), MIN_PRECISION_BITS)
    if isinstance(x, int):
        return BigReal.from_int(0)
    if isinstance(x, float):
        x = BigReal.from_float(x)
    with mp.workprec(x.precision_bits + _GUARD_BITS):
        n = mpmath.nint(x.value)
        d = abs(x.value - n)
    with mp.workprec(x.precision_bits):
        return BigReal(+d, x.precision_bits)


def dist_nearest_int_exact(x: Fraction) -> Fraction:
    """Exact rational distance to the nearest integer."""
    r = x - math.floor(x)
    return min(r, 1 - r)


@dataclass(frozen=True)
class ContinuedFraction:
    """Partial quotients and convergents of a real number.

    ``quotients`` holds a1, a2, ... (a0 is kept separately).  Convergents
    p_k/q_k are stored as exact integer pairs starting from p_0/q_0 = a0/1
    and satisfy the standard recurrence.  ``certified_depth`` is the number
    of quotients the double-run certification could vouch for; when it is
    smaller than the requested depth, ``precision_exhausted`` is set and
    only the certified prefix is returned.  ``terminated`` marks an exact
    rational input whose expansion ended early.
    """

    a0: int
    quotients: tuple
    convergents: tuple
    depth: int
    certified_depth: int
    precision_exhausted: bool = False
    terminated: bool = False

    @property
    def q_bar(self) -> float:
        """Largest ratio q_n / q_{n-1} over the stored convergents."""
        qs = [q for _, q in self.convergents]
        if len(qs) < 2:
            return 1.0
        return max(qs[i] / qs[i - 1] for i in range(1, len(qs)))

    @property
    def max_quotient(self) -> int:
        return max(self.quotients) if self.quotients else 0


def _convergents_from(a0: int, quotients: Sequence[int]) -> tuple:
    # Seeds: p_{-1} = 1, q_{-1} = 0, so p_0/q_0 = a0/1.
    pairs = [(a0, 1)]
    p_prev, p_prev2 = a0, 1
    q_prev, q_prev2 = 1, 0
    for a in quotients:
        p = a * p_prev + p_prev2
        q = a * q_prev + q_prev2
        pairs.append((p, q))
        p_prev2, p_prev = p_prev, p
        q_prev2, q_prev = q_prev, q
    return tuple(pairs)


def _raw_quotients(x: mpmath.mpf, depth: int, prec: int):
    """Partial quotients of the mpf ``x`` computed blindly at ``prec`` bits."""
    out = []
    with mp.workprec(prec):
        a0 = int(mpmath.floor(x))
        frac = x - a0
        for _ in range(depth):
            if frac == 0:
                break
            inv = 1 / frac
            a = int(mpmath.floor(inv))
            if a < 1:  # numerical garbage, truncate here
                break
            out.append(a)
            frac = inv - a
    return a0, out


def continued_fraction(x: Union[BigReal, Fraction], depth: int) -> ContinuedFraction:
    """Certified continued fraction expansion of ``x`` to ``depth`` quotients.

    Fractions are expanded exactly by the Euclidean algorithm.  BigReal
    inputs are expanded twice, at their own precision and with 64 extra
    bits; a quotient counts as certified only when the two runs agree.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")

    if isinstance(x, Fraction):
        a0 = x.numerator // x.denominator
        quotients = []
        num, den = x.numerator - a0 * x.denominator, x.denominator
        while num != 0 and len(quotients) < depth:
            den, (a, num) = num, divmod(den, num)
            quotients.append(a)
        terminated = num == 0
        return ContinuedFraction(
            a0=a0,
            quotients=tuple(quotients),
            convergents=_convergents_from(a0, quotients),
            depth=depth,
            certified_depth=len(quotients),
            precision_exhausted=False,
            terminated=terminated,
        )

    prec = x.precision_bits
    a0_lo, qs_lo = _raw_quotients(x.value, depth, prec)
    a0_hi, qs_hi = _raw_quotients(x.value, depth, prec + _GUARD_BITS)
    if a0_lo != a0_hi:
        raise ValueError("precision too low to certify the integer part")
    certified = []
    for a, b in zip(qs_lo, qs_hi):
        if a != b:
            break
        certified.append(a)
    exhausted = len(certified) < depth
    # An exact dyadic rational terminates identically in both runs.
    terminated = (
        len(qs_lo) == len(qs_hi) == len(certified) and len(certified) < depth
    )
    if terminated:
        exhausted = False
    return ContinuedFraction(
        a0=a0_lo,
        quotients=tuple(certified),
        convergents=_convergents_from(a0_lo, certified),
        depth=depth,
        certified_depth=len(certified),
        precision_exhausted=exhausted,
        terminated=terminated,
    )


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with exact integer coefficients, lowest degree first."""

    coefficients: tuple

    def __post_init__(self):
        if not self.coefficients or self.coefficients[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_monic(self) -> bool:
        return self.coefficients[-1] == 1

    def derivative(self) -> "IntPolynomial":
        c = self.coefficients
        return IntPolynomial(tuple(i * c[i] for i in range(1, len(c))))

    def eval_int(self, x: int) -> int:
        """Exact Horner evaluation at an integer point."""
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def eval_fraction(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc


def eval_poly(poly: IntPolynomial, x: RealLike) -> RealLike:
    """Horner evaluation of ``poly`` at ``x``.

    Integer and Fraction arguments are evaluated exactly; BigReal arguments
    are evaluated at their working precision.
    """
    if isinstance(x, int):
        return poly.eval_int(x)
    if isinstance(x, Fraction):
        return poly.eval_fraction(x)
    if isinstance(x, float):
        x = BigReal.from_float(x)
    prec = x.precision_bits
    with mp.workprec(prec):
        acc = mpmath.mpf(0)
        for c in reversed(poly.coefficients):
            acc = acc * x.value + c
    return BigReal(acc, prec)
