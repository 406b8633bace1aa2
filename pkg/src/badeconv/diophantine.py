"""Empirical verification of Diophantine properties.

Badness scans and witness searches run over exact scaled-integer images of
the tuple coordinates: a coordinate beta at P bits is represented by the
integer X = nint(beta * 2**P), so that ||q*beta|| is recovered from
(q*X) mod 2**P with error at most q * 2**-P.  This keeps million-step
scans exact-at-precision without a million arbitrary-precision rounds.
Rational coordinates are handled in exact rational arithmetic so that a
resonant tuple scores exactly zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np
from mpmath import mp

from .errors import ResonanceError
from .precision import BigReal, ContinuedFraction, continued_fraction

# Band width used by the dyadic equidistribution sums; matches the band
# actually spanned by the wavelet supports (2**r0 = 8*pi/3).
R0_DEFAULT = 3 + math.log2(math.pi / 3)

_MIN_SCAN_PRECISION = 200  # ~60 decimal digits, good to q_max = 1e6


@dataclass(frozen=True)
class BadnessReport:
    """Outcome of an exhaustive badness scan.

    ``curve`` holds only record-breaking (q, score) pairs, so it is
    strictly decreasing in score.
    """

    q_max: int
    min_score: BigReal
    argmin_q: int
    curve: tuple
    M: int

    def to_dict(self) -> dict:
        return {
            "q_max": self.q_max,
            "min_score": self.min_score.to_decimal(),
            "argmin_q": self.argmin_q,
            "curve": [[q, s] for q, s in self.curve],
            "M": self.M,
        }

    def curve_csv(self) -> str:
        lines = ["q,score"]
        lines += [f"{q},{s!r}" for q, s in self.curve]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MinkowskiWitness:
    q: int
    p: tuple
    score: float
    bound: float


@dataclass(frozen=True)
class MinkowskiReport:
    """Smallest witness of the simultaneous-approximation bound, if any."""

    witness: Optional[MinkowskiWitness]
    best_q: int
    best_ratio: float  # min over q of score/bound; < 1 iff a witness exists
    q_max: int
    M: int

    def to_dict(self) -> dict:
        d = {
            "q_max": self.q_max,
            "M": self.M,
            "best_q": self.best_q,
            "best_ratio": self.best_ratio,
        }
        if self.witness is not None:
            d["witness"] = {
                "q": self.witness.q,
                "p": list(self.witness.p),
                "score": self.witness.score,
                "bound": self.witness.bound,
            }
        else:
            d["witness"] = None
        return d


@dataclass(frozen=True)
class CfAuditEntry:
    """Continued fraction audit of one tuple coordinate."""

    index: int
    max_quotient: int
    certified_depth: int
    q_bar: float
    precision_exhausted: bool

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "max_quotient": self.max_quotient,
            "certified_depth": self.certified_depth,
            "q_bar": self.q_bar,
            "precision_exhausted": self.precision_exhausted,
        }


@dataclass(frozen=True)
class AlephReport:
    """Inverse-power equidistribution sum over one dyadic band."""

    j: int
    k: int
    r0: float
    M: int
    omega_size: int
    value: float


class _Coord:
    """Scaled-integer view of one coordinate, exact for Fractions."""

    __slots__ = ("num", "den", "rational")

    def __init__(self, beta):
        if isinstance(beta, Fraction):
            self.num = beta.numerator % beta.denominator
            self.den = beta.denominator
            self.rational = True
        elif isinstance(beta, BigReal):
            self.num = beta.scaled_int()
            self.den = 1 << beta.precision_bits
            self.rational = False
        elif isinstance(beta, int):
            self.num, self.den, self.rational = 0, 1, True
        else:
            raise TypeError(f"unsupported coordinate type {type(beta)!r}")

    def dist_parts(self, q: int):
        """(numerator, denominator) of ||q * beta||; exact for rationals."""
        r = (q * self.num) % self.den
        return min(r, self.den - r), self.den

    def nearest_int(self, q: int) -> int:
        prod = q * self.num
        r = prod % self.den
        base = prod // self.den
        return base if 2 * r <= self.den else base + 1


def _coords(beta) -> list:
    coords = [_Coord(b) for b in beta]
    for c, b in zip(coords, beta):
        if isinstance(b, BigReal) and b.precision_bits < _MIN_SCAN_PRECISION:
            raise ValueError(
                f"scan coordinates need >= {_MIN_SCAN_PRECISION} bits, "
                f"got {b.precision_bits}"
            )
    return coords


def _max_dist_float(coords, q: int) -> float:
    best = 0.0
    for c in coords:
        num, den = c.dist_parts(q)
        d = num / den
        if d > best:
            best = d
    return best


def badness_scan(beta: Sequence, q_max: int) -> BadnessReport:
    """Minimum of q**(1/M) * max_i ||q beta_i|| over q = 1..q_max.

    The reported minimum is re-evaluated at the coordinate precision at the
    minimizing q; the record curve is kept in floats.
    """
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    m = len(beta)
    coords = _coords(beta)
    inv_m = 1.0 / m
    best_score = math.inf
    best_q = 1
    curve = []
    for q in range(1, q_max + 1):
        d = _max_dist_float(coords, q)
        score = (q ** inv_m) * d
        if score < best_score:
            best_score = score
            best_q = q
            curve.append((q, score))
            if d == 0.0:
                break
    min_score = _exact_score(beta, coords, best_q, m)
    return BadnessReport(
        q_max=q_max,
        min_score=min_score,
        argmin_q=best_q,
        curve=tuple(curve),
        M=m,
    )


def _exact_score(beta, coords, q: int, m: int) -> BigReal:
    precs = [b.precision_bits for b in beta if isinstance(b, BigReal)]
    prec = max(precs) if precs else 64
    with mp.workprec(prec + 64):
        best = mpmath.mpf(0)
        for c in coords:
            num, den = c.dist_parts(q)
            d = mpmath.mpf(num) / den
            if d > best:
                best = d
        score = mpmath.power(q, mpmath.mpf(1) / m) * best
    with mp.workprec(prec):
        return BigReal(+score, prec)


def minkowski_witness(beta: Sequence, q_max: int) -> MinkowskiReport:
    """Smallest q <= q_max with max_i |beta_i q - p_i| < (M/(M+1)) q**(-1/M)."""
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    m = len(beta)
    coords = _coords(beta)
    c_m = m / (m + 1)
    inv_m = 1.0 / m
    best_ratio = math.inf
    best_q = 1
    for q in range(1, q_max + 1):
        d = _max_dist_float(coords, q)
        bound = c_m * q ** (-inv_m)
        ratio = d / bound
        if ratio < best_ratio:
            best_ratio = ratio
            best_q = q
        if d < bound:
            p = tuple(c.nearest_int(q) for c in coords)
            witness = MinkowskiWitness(q=q, p=p, score=d, bound=bound)
            return MinkowskiReport(
                witness=witness, best_q=q, best_ratio=ratio, q_max=q_max, M=m
            )
    return MinkowskiReport(
        witness=None, best_q=best_q, best_ratio=best_ratio, q_max=q_max, M=m
    )


def cf_audit(beta: Sequence, depth: int) -> list:
    """Per-coordinate continued fraction audit to ``depth`` quotients."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    entries = []
    for i, b in enumerate(beta):
        cf: ContinuedFraction = continued_fraction(b, depth)
        entries.append(
            CfAuditEntry(
                index=i,
                max_quotient=cf.max_quotient,
                certified_depth=cf.certified_depth,
                q_bar=cf.q_bar,
                precision_exhausted=cf.precision_exhausted,
            )
        )
    return entries


def omega_band(j: int, r0: float = R0_DEFAULT) -> range:
    """Positive half of the index band {l : 2**j <= |l| <= 2**(j+r0)}."""
    if j < 0:
        raise ValueError("j must be >= 0")
    lo = 1 << j
    with mp.workprec(96):
        hi = int(mpmath.floor(mpmath.mpf(2) ** (j + mpmath.mpf(r0))))
    return range(lo, hi + 1)


def aleph(beta: Sequence, j: int, k: int, r0: float = R0_DEFAULT) -> AlephReport:
    """Sum of [sum_i ||l beta_i||**2]**(-k) over the band Omega_j.

    Both sign ranges are summed explicitly.  A frequency where every
    coordinate sits exactly on an integer (possible only for rational
    tuples) raises ResonanceError naming the offender.
    """
    if k not in (1, 2, 3, 4):
        raise ValueError("k must be in {1, 2, 3, 4}")
    coords = _coords(beta)
    band = omega_band(j, r0)
    terms = []
    for l in band:
        for sign in (1, -1):
            ssq = 0.0
            resonant = True
            for c in coords:
                num, den = c.dist_parts(sign * l)
                if num != 0:
                    resonant = False
                d = num / den
                ssq += d * d
            if resonant:
                raise ResonanceError(
                    f"sum of squared distances vanishes at l = {sign * l}",
                    offender=sign * l,
                )
            terms.append(ssq ** (-k))
    value = math.fsum(terms)
    return AlephReport(
        j=j, k=k, r0=r0, M=len(beta), omega_size=2 * len(band), value=value
    )


@dataclass(frozen=True)
class GrowthFit:
    exponent: float
    intercept: float
    js: tuple
    values: tuple


def fit_band_growth(js: Sequence[int], values: Sequence[float]) -> GrowthFit:
    """Least-squares slope of log2(value/j) against j."""
    js = list(js)
    ys = [math.log2(v / j) for j, v in zip(js, values)]
    slope, intercept = np.polyfit(np.asarray(js, dtype=float), np.asarray(ys), 1)
    return GrowthFit(
        exponent=float(slope),
        intercept=float(intercept),
        js=tuple(js),
        values=tuple(values),
    )


def aleph_growth_fit(
    beta: Sequence, k: int, j_range: Sequence[int], r0: float = R0_DEFAULT
) -> GrowthFit:
    """Growth exponent of the band sums across >= 5 consecutive levels."""
    js = sorted(j_range)
    if len(js) < 5 or any(b - a != 1 for a, b in zip(js, js[1:])):
        raise ValueError("j_range must span >= 5 consecutive levels")
    values = [aleph(beta, j, k, r0).value for j in js]
    return fit_band_growth(js, values)


def report_to_json(report) -> str:
    return json.dumps(report.to_dict(), indent=1, sort_keys=True)
