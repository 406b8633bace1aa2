"""Construction of badly approximable M-tuples on a prescribed interval.

The pipeline: build the monic integer polynomial
``P(x) = (x - Q)(x - 2Q)...(x - dQ) - 1`` with d = M + 1 and Q = 5(M + 1),
isolate its d real roots (one per bracket ((i - 1/2)Q, (i + 1/2)Q)), read
off the coefficients of the monic polynomial with the first M roots, and
map those coefficients into the target interval by an affine rescale after
reduction modulo the exact integer z = 30 * M**(3*M).

Subtracting integer multiples of z shifts each coefficient by an integer,
which leaves every distance-to-nearest-integer quantity in the badly
approximable property unchanged, so the reduction is harmless and pins the
output inside [a, b).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
from mpmath import mp

from .diophantine import cf_audit
from .errors import BracketViolationError, CollisionError, DegenerateQError
from .precision import BigReal, IntPolynomial

SCHEMA_VERSION = 1
DEFAULT_M_MAX = 8

# Residual target: |P(xi)| <= 2**(-precision_bits // 2).
_NEWTON_MAX_ITER = 400


def coefficient_bound(m: int) -> int:
    """Exact integer bound 30 * m**(3*m) on the tuple coefficients.

    30 * exp(3 m ln m) is an exact integer for integer m, so the rescaling
    modulus z equals the bound itself.
    """
    return 30 * m ** (3 * m)


def default_precision_bits(m: int) -> int:
    q = 5 * (m + 1)
    return max(256, 32 * (m + 1) * math.ceil(math.log2(q)))


@dataclass(frozen=True)
class ConstructionTrace:
    """Everything produced on the way to a tuple, for auditability."""

    M: int
    Q: int
    xi: tuple  # M + 1 refined roots, BigReal
    residuals: tuple  # |P(xi_i)|, BigReal
    alpha: tuple  # M coefficients, BigReal
    z: int
    precision_bits: int


@dataclass(frozen=True)
class BATuple:
    """A constructed tuple together with its construction trace."""

    beta: tuple  # M BigReals in [a, b)
    a: Fraction
    b: Fraction
    M: int
    trace: ConstructionTrace
    cf_audit: tuple = ()

    def beta_floats(self):
        return [float(b) for b in self.beta]


def build_polynomial(m: int, q: int) -> IntPolynomial:
    """Monic integer polynomial prod_{i=1..m} (x - i q) - 1.

    Coefficients are exact; the polynomial evaluates to -1 at every node
    i*q by construction.
    """
    if m < 1:
        raise ValueError("degree must be >= 1")
    if q < 5 * m:
        raise DegenerateQError(f"Q = {q} violates Q >= 5M = {5 * m}")
    coeffs = [1]  # constant polynomial 1, lowest degree first
    for i in range(1, m + 1):
        root = i * q
        new = [0] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            new[k] -= root * c
            new[k + 1] += c
        coeffs = new
    coeffs[0] -= 1
    return IntPolynomial(tuple(coeffs))


def _eval_at(poly: IntPolynomial, x: mpmath.mpf) -> mpmath.mpf:
    acc = mpmath.mpf(0)
    for c in reversed(poly.coefficients):
        acc = acc * x + c
    return acc


def _refine_root(poly, dpoly, lo, hi, target, work_prec):
    """Bisection to ~64 bits, then bracket-guarded Newton to ``target``."""
    with mp.workprec(work_prec):
        flo = _eval_at(poly, lo)
        fhi = _eval_at(poly, hi)
        if flo == 0:
            return lo
        if fhi == 0:
            return hi
        if mpmath.sign(flo) == mpmath.sign(fhi):
            raise BracketViolationError(
                f"no sign change on bracket ({lo}, {hi})"
            )
        slo = mpmath.sign(flo)

        coarse = abs(hi - lo) * mpmath.mpf(2) ** (-64)
        while abs(hi - lo) > coarse:
            mid = (lo + hi) / 2
            fmid = _eval_at(poly, mid)
            if fmid == 0:
                return mid
            if mpmath.sign(fmid) == slo:
                lo = mid
            else:
                hi = mid

        x = (lo + hi) / 2
        for _ in range(_NEWTON_MAX_ITER):
            fx = _eval_at(poly, x)
            if abs(fx) <= target:
                return x
            dfx = _eval_at(dpoly, x)
            if dfx == 0:
                step_ok = False
            else:
                x_new = x - fx / dfx
                step_ok = lo < x_new < hi
            if not step_ok:
                x_new = (lo + hi) / 2
            # keep the sign bracket current
            fn = _eval_at(poly, x_new)
            if fn == 0:
                return x_new
            if mpmath.sign(fn) == slo:
                lo = x_new
            else:
                hi = x_new
            x = x_new
        raise BracketViolationError("root refinement did not converge")


def isolate_roots(poly: IntPolynomial, q: int, precision_bits: int) -> list:
    """One refined root per bracket ((i - 1/2)q, (i + 1/2)q), i = 1..degree.

    Bracket endpoints are validated by exact rational sign evaluation, so a
    failure here signals a genuinely bad polynomial rather than roundoff.
    """
    d = poly.degree
    work_prec = precision_bits + 64
    target = mpmath.mpf(2) ** (-(precision_bits // 2 + 8))
    dpoly = poly.derivative()
    roots = []
    for i in range(1, d + 1):
        lo_exact = Fraction((2 * i - 1) * q, 2)
        hi_exact = Fraction((2 * i + 1) * q, 2)
        s_lo = poly.eval_fraction(lo_exact)
        s_hi = poly.eval_fraction(hi_exact)
        if s_lo == 0 or s_hi == 0 or (s_lo > 0) == (s_hi > 0):
            raise BracketViolationError(
                f"bracket {i}: endpoint signs {s_lo > 0}, {s_hi > 0}"
            )
        with mp.workprec(work_prec):
            lo = mpmath.mpf((2 * i - 1) * q) / 2
            hi = mpmath.mpf((2 * i + 1) * q) / 2
        x = _refine_root(poly, dpoly, lo, hi, target, work_prec)
        with mp.workprec(precision_bits):
            roots.append(BigReal(+x, precision_bits))
    return roots


def solve_coefficients(xi: Sequence[BigReal]) -> list:
    """Coefficients alpha of the monic polynomial with roots ``xi``.

    Returns alpha such that x**M + sum_i alpha_i x**(i-1) equals
    prod_k (x - xi_k).  Expansion through elementary symmetric products is
    used instead of a Vandermonde solve: with nodes of size ~ iQ the
    Vandermonde matrix is hopelessly ill conditioned, while the expansion
    is exact in structure.
    """
    if len(set(float(x) for x in xi)) != len(xi):
        raise ValueError("roots must be pairwise distinct")
    prec = max(x.precision_bits for x in xi)
    with mp.workprec(prec + 64):
        # multiply (x - xi_k) together; coefficients lowest degree first
        acc = [mpmath.mpf(1)]
        for x in xi:
            r = x.value
            new = [mpmath.mpf(0)] * (len(acc) + 1)
            for k, c in enumerate(acc):
                new[k] -= r * c
                new[k + 1] += c
            acc = new
        out = []
        with mp.workprec(prec):
            for c in acc[:-1]:
                out.append(BigReal(+c, prec))
    return out


def rescale_to_interval(
    alpha: Sequence[BigReal],
    a: Fraction,
    b: Fraction,
    trace: Optional[ConstructionTrace] = None,
) -> BATuple:
    """Map coefficients into [a, b) via beta_l = a + ((alpha_l mod z)/z)(b - a).

    z = 30 * M**(3M) exactly.  The mod-z reduction subtracts an integer, so
    all distance-to-nearest-integer quantities are untouched.
    """
    a, b = Fraction(a), Fraction(b)
    if not a < b:
        raise ValueError("need a < b")
    m = len(alpha)
    z = coefficient_bound(m)
    prec = max(x.precision_bits for x in alpha)
    betas = []
    with mp.workprec(prec + 64):
        av = mpmath.mpf(a.numerator) / a.denominator
        bv = mpmath.mpf(b.numerator) / b.denominator
        for x in alpha:
            quot = int(mpmath.floor(x.value / z))
            reduced = x.value - z * quot
            beta = av + (reduced / z) * (bv - av)
            with mp.workprec(prec):
                betas.append(BigReal(+beta, prec))
    for i in range(m):
        for j in range(i + 1, m):
            if betas[i].value == betas[j].value:
                raise CollisionError(
                    f"coordinates {i} and {j} collide at {prec} bits"
                )
    if trace is None:
        trace = ConstructionTrace(
            M=m,
            Q=5 * (m + 1),
            xi=(),
            residuals=(),
            alpha=tuple(alpha),
            z=z,
            precision_bits=prec,
        )
    return BATuple(beta=tuple(betas), a=a, b=b, M=m, trace=trace)


def check_trace(tup: BATuple) -> dict:
    """Evaluate the construction invariants; returns name -> bool."""
    tr = tup.trace
    half = Fraction(1, 2)
    brackets_ok = all(
        (i + 1 - half) * tr.Q < x.value < (i + 1 + half) * tr.Q
        for i, x in enumerate(tr.xi)
    )
    res_bound = mpmath.mpf(2) ** (-(tr.precision_bits // 2))
    residuals_ok = all(r.value <= res_bound for r in tr.residuals)
    alpha_ok = all(abs(x.value) <= tr.z for x in tr.alpha)
    z_ok = tr.z == coefficient_bound(tr.M)
    beta_ok = all(tup.a <= x.value < tup.b for x in tup.beta)
    distinct_ok = len(set(x.value for x in tup.beta)) == tup.M
    return {
        "root_brackets": brackets_ok,
        "residuals": residuals_ok,
        "coefficient_bound": alpha_ok,
        "modulus_exact": z_ok,
        "beta_in_interval": beta_ok,
        "beta_distinct": distinct_ok,
    }


def construct_ba_tuple(
    m: int,
    a: Fraction,
    b: Fraction,
    precision_bits: Optional[int] = None,
    m_max: int = DEFAULT_M_MAX,
    audit_depth: int = 20,
) -> BATuple:
    """Full construction pipeline for an M-tuple on (a, b).

    The returned tuple carries the complete trace (polynomial roots,
    residuals, coefficients, modulus) plus a per-coordinate continued
    fraction audit to ``audit_depth``.
    """
    if not 1 <= m <= m_max:
        raise ValueError(f"M must be in 1..{m_max}, got {m}")
    a, b = Fraction(a), Fraction(b)
    if not a < b:
        raise ValueError("need a < b")
    prec = precision_bits if precision_bits is not None else default_precision_bits(m)
    q = 5 * (m + 1)
    poly = build_polynomial(m + 1, q)
    xi = isolate_roots(poly, q, prec)
    residuals = []
    with mp.workprec(prec + 64):
        for x in xi:
            residuals.append(BigReal(abs(_eval_at(poly, x.value)), prec))
    alpha = solve_coefficients(xi[:m])
    trace = ConstructionTrace(
        M=m,
        Q=q,
        xi=tuple(xi),
        residuals=tuple(residuals),
        alpha=tuple(alpha),
        z=coefficient_bound(m),
        precision_bits=prec,
    )
    tup = rescale_to_interval(alpha, a, b, trace=trace)
    checks = check_trace(tup)
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise BracketViolationError(f"construction invariants failed: {failed}")
    audit = cf_audit(tup.beta, audit_depth)
    return BATuple(
        beta=tup.beta, a=a, b=b, M=m, trace=trace, cf_audit=tuple(audit)
    )


# -- artifact serialization ------------------------------------------------


def tuple_to_dict(tup: BATuple) -> dict:
    tr = tup.trace
    return {
        "schema_version": SCHEMA_VERSION,
        "M": tup.M,
        "Q": tr.Q,
        "a": f"{tup.a.numerator}/{tup.a.denominator}",
        "b": f"{tup.b.numerator}/{tup.b.denominator}",
        "precision_bits": tr.precision_bits,
        "z": str(tr.z),
        "alpha": [x.to_decimal() for x in tr.alpha],
        "xi": [x.to_decimal() for x in tr.xi],
        "residuals": [x.to_decimal() for x in tr.residuals],
        "beta": [x.to_decimal() for x in tup.beta],
        "cf_audit": [entry.to_dict() for entry in tup.cf_audit],
    }


def tuple_from_dict(data: dict) -> BATuple:
    prec = int(data["precision_bits"])
    a = Fraction(data["a"])
    b = Fraction(data["b"])
    m = int(data["M"])
    z = int(data["z"])
    alpha = tuple(BigReal.from_decimal(s, prec) for s in data["alpha"])
    xi = tuple(BigReal.from_decimal(s, prec) for s in data["xi"])
    residuals = tuple(BigReal.from_decimal(s, prec) for s in data["residuals"])
    beta = tuple(BigReal.from_decimal(s, prec) for s in data["beta"])
    trace = ConstructionTrace(
        M=m, Q=int(data["Q"]), xi=xi, residuals=residuals,
        alpha=alpha, z=z, precision_bits=prec,
    )
    return BATuple(beta=beta, a=a, b=b, M=m, trace=trace)


def save_tuple(tup: BATuple, path) -> None:
    with open(path, "w") as fh:
        json.dump(tuple_to_dict(tup), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_tuple(path) -> BATuple:
    with open(path) as fh:
        return tuple_from_dict(json.load(fh))
