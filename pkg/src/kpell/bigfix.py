"""Certified decimal fixed-point reals.

A :class:`FixedReal` is the interval ``[(m - e)/10**s, (m + e)/10**s]`` where
``m`` is the mantissa, ``s`` the decimal scale and ``e`` the error radius in
ulps.  Every operation returns an interval guaranteed to contain the exact
result of the same operation on any points of the input intervals.

Python's ``int`` is the arbitrary-precision integer throughout.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import DomainError, IndeterminateSignError, ParameterError, PrecisionError

Number = Union["FixedReal", int, Fraction]

_DECIMAL_RE = re.compile(r"^\s*([+-]?)(\d*)(?:\.(\d*))?\s*$")


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _round_div(a: int, b: int) -> int:
    """Nearest integer to a/b for b > 0 (ties go up)."""
    return (2 * a + b) // (2 * b)


@dataclass(frozen=True)
class FixedReal:
    mantissa: int
    scale: int
    err: int = 0

    def __post_init__(self) -> None:
        if self.scale < 0:
            raise ParameterError("scale must be non-negative")
        if self.err < 0:
            raise ParameterError("error radius must be non-negative")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_int(cls, n: int, scale: int = 0) -> FixedReal:
        return cls(n * 10**scale, scale, 0)

    @classmethod
    def from_fraction(cls, q: Fraction | int, scale: int) -> FixedReal:
        q = Fraction(q)
        num = q.numerator * 10**scale
        m = _round_div(num, q.denominator)
        return cls(m, scale, 0 if m * q.denominator == num else 1)

    @classmethod
    def from_bounds(cls, lo: Fraction | int, hi: Fraction | int, scale: int) -> FixedReal:
        """Smallest interval at ``scale`` (up to one ulp) containing [lo, hi]."""
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            lo, hi = hi, lo
        p = 10**scale
        lo_i = math.floor(lo * p)
        hi_i = math.ceil(hi * p)
        m = (lo_i + hi_i) // 2
        return cls(m, scale, max(m - lo_i, hi_i - m))

    @classmethod
    def parse(cls, text: str) -> FixedReal:
        """Parse ``[sign]digits[.digits]`` into an exact value."""
        match = _DECIMAL_RE.match(text)
        if not match or not (match.group(2) or match.group(3)):
            raise ParameterError(f"not a decimal number: {text!r}")
        sign, whole, frac = match.group(1), match.group(2) or "0", match.group(3) or ""
        m = int(whole + frac) if (whole + frac) else 0
        return cls(-m if sign == "-" else m, len(frac), 0)

    # -- inspection -------------------------------------------------------

    def lower(self) -> Fraction:
        return Fraction(self.mantissa - self.err, 10**self.scale)

    def upper(self) -> Fraction:
        return Fraction(self.mantissa + self.err, 10**self.scale)

    def mid(self) -> Fraction:
        return Fraction(self.mantissa, 10**self.scale)

    def radius(self) -> Fraction:
        return Fraction(self.err, 10**self.scale)

    @property
    def is_exact(self) -> bool:
        return self.err == 0

    def contains(self, value: Number) -> bool:
        v = _as_fraction(value)
        return self.lower() <= v <= self.upper()

    def overlaps(self, other: FixedReal) -> bool:
        return self.lower() <= other.upper() and other.lower() <= self.upper()

    def certainly_positive(self) -> bool:
        return self.mantissa > self.err

    def certainly_negative(self) -> bool:
        return self.mantissa < -self.err

    def certainly_lt(self, other: Number) -> bool:
        return self.upper() < _lower(other)

    def certainly_gt(self, other: Number) -> bool:
        return self.lower() > _upper(other)

    def cmp_certain(self, other: Number) -> int:
        """-1 or +1 when the order is certified; otherwise PrecisionError."""
        if self.upper() < _lower(other):
            return -1
        if self.lower() > _upper(other):
            return 1
        raise PrecisionError("enclosures overlap; order is undecided")

    def __float__(self) -> float:
        return self.mantissa / 10**self.scale if self.scale < 300 else float(self.mid())

    # -- formatting -------------------------------------------------------

    def __str__(self) -> str:
        m, s = self.mantissa, self.scale
        sign = "-" if m < 0 else ""
        digits = str(abs(m))
        if s == 0:
            return sign + digits
        digits = digits.rjust(s + 1, "0")
        return f"{sign}{digits[:-s]}.{digits[-s:]}"

    def __repr__(self) -> str:
        return f"FixedReal({self}, err={self.err}ulp)"

    def sci(self, digits: int = 4) -> str:
        """Short scientific rendering of the midpoint, for reports."""
        with localcontext() as ctx:
            ctx.prec = digits + 2
            d = Decimal(self.mantissa).scaleb(-self.scale)
            return f"{d:.{digits - 1}e}"

    # -- arithmetic sugar ---------------------------------------------------

    def rescale(self, scale: int) -> FixedReal:
        m, e = _rescale(self.mantissa, self.err, self.scale, scale)
        return FixedReal(m, scale, e)

    def __neg__(self) -> FixedReal:
        return FixedReal(-self.mantissa, self.scale, self.err)

    def __abs__(self) -> FixedReal:
        if self.mantissa < 0:
            return -self
        return self

    def __add__(self, other: Number) -> FixedReal:
        o = _coerce(other, self.scale)
        return fr_add(self, o, max(self.scale, o.scale))

    __radd__ = __add__

    def __sub__(self, other: Number) -> FixedReal:
        o = _coerce(other, self.scale)
        return fr_sub(self, o, max(self.scale, o.scale))

    def __rsub__(self, other: Number) -> FixedReal:
        o = _coerce(other, self.scale)
        return fr_sub(o, self, max(self.scale, o.scale))

    def __mul__(self, other: Number) -> FixedReal:
        o = _coerce(other, self.scale)
        return fr_mul(self, o, max(self.scale, o.scale))

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> FixedReal:
        o = _coerce(other, self.scale)
        return fr_div(self, o, max(self.scale, o.scale))

    def __rtruediv__(self, other: Number) -> FixedReal:
        o = _coerce(other, self.scale)
        return fr_div(o, self, max(self.scale, o.scale))

    def __pow__(self, n: int) -> FixedReal:
        return fr_pow(self, n, self.scale)


def _coerce(x: Number, scale: int) -> FixedReal:
    if isinstance(x, FixedReal):
        return x
    if isinstance(x, int):
        return FixedReal.from_int(x)
    if isinstance(x, Fraction):
        return FixedReal.from_fraction(x, scale)
    raise TypeError(f"cannot combine FixedReal with {type(x).__name__}")


def _as_fraction(x: Number) -> Fraction:
    if isinstance(x, FixedReal):
        return x.mid()
    return Fraction(x)


def _lower(x: Number) -> Fraction:
    return x.lower() if isinstance(x, FixedReal) else Fraction(x)


def _upper(x: Number) -> Fraction:
    return x.upper() if isinstance(x, FixedReal) else Fraction(x)


def _rescale(m: int, e: int, from_scale: int, to_scale: int) -> tuple[int, int]:
    if to_scale >= from_scale:
        f = 10 ** (to_scale - from_scale)
        return m * f, e * f
    d = 10 ** (from_scale - to_scale)
    m2 = _round_div(m, d)
    off = abs(m - m2 * d)  # <= d/2
    return m2, _ceil_div(e + off, d)


def _check_scale(scale: int) -> None:
    if scale < 0:
        raise ParameterError("scale must be non-negative")


# -- core operations --------------------------------------------------------


def fr_add(x: FixedReal, y: FixedReal, scale: int) -> FixedReal:
    _check_scale(scale)
    s = max(x.scale, y.scale)
    fx, fy = 10 ** (s - x.scale), 10 ** (s - y.scale)
    m, e = _rescale(x.mantissa * fx + y.mantissa * fy, x.err * fx + y.err * fy, s, scale)
    return FixedReal(m, scale, e)


def fr_sub(x: FixedReal, y: FixedReal, scale: int) -> FixedReal:
    return fr_add(x, -y, scale)


def fr_mul(x: FixedReal, y: FixedReal, scale: int) -> FixedReal:
    _check_scale(scale)
    m = x.mantissa * y.mantissa
    e = abs(x.mantissa) * y.err + abs(y.mantissa) * x.err + x.err * y.err
    m, e = _rescale(m, e, x.scale + y.scale, scale)
    return FixedReal(m, scale, e)


def fr_div(x: FixedReal, y: FixedReal, scale: int) -> FixedReal:
    _check_scale(scale)
    if abs(y.mantissa) <= y.err:
        raise IndeterminateSignError()
    X, Y = x.mid(), y.mid()
    dx, dy = x.radius(), y.radius()
    # |x/y - X/Y| <= (|X| dy + |Y| dx) / (|Y| (|Y| - dy))
    bound = (abs(X) * dy + abs(Y) * dx) / (abs(Y) * (abs(Y) - dy))
    num = x.mantissa * 10 ** (y.scale + scale)
    den = y.mantissa * 10**x.scale
    if den < 0:
        num, den = -num, -den
    m = _round_div(num, den)
    rounding = Fraction(abs(num - m * den), den)
    e = math.ceil(bound * 10**scale + rounding)
    return FixedReal(m, scale, e)


def _isqrt_ceil(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def fr_sqrt(x: FixedReal, scale: int) -> FixedReal:
    """Certified square root via integer square roots with directed rounding."""
    _check_scale(scale)
    lo, hi = x.lower(), x.upper()
    if hi < 0 or lo < 0:
        raise DomainError("square root of a possibly negative number")
    p = 10 ** (2 * scale)
    lo_i = math.isqrt(math.floor(lo * p))
    hi_i = _isqrt_ceil(math.ceil(hi * p))
    m = (lo_i + hi_i) // 2
    return FixedReal(m, scale, max(m - lo_i, hi_i - m))


# -- logarithm ----------------------------------------------------------------


def _atanh_fixed(a: int, b: int, w: int) -> tuple[int, int]:
    """Fixed-point atanh(a/b) * 10**w for |a/b| <= 1/3.

    Returns (value, error bound in ulps).  Each truncation is off by < 1 ulp;
    the running power keeps an error < 1/(1 - z^2) < 2 ulps, so every term is
    within 3 ulps, and the stopping rule leaves a tail below 4 ulps.
    """
    if a == 0:
        return 0, 0
    if 3 * abs(a) > b:
        raise ParameterError("atanh argument outside the reduced range")
    a2, b2 = a * a, b * b
    t = (a * 10**w) // b
    total = 0
    i = 0
    while t not in (0, -1):
        total += t // (2 * i + 1)
        t = (t * a2) // b2
        i += 1
    return total, 3 * i + 4


@lru_cache(maxsize=64)
def _ln_constants(w: int) -> tuple[int, int, int]:
    """ln 2 and ln(9/8) at scale w, and a shared error bound in ulps."""
    ln2, e2 = _atanh_fixed(1, 3, w)
    ln98, e98 = _atanh_fixed(1, 17, w)
    return 2 * ln2, 2 * ln98, 2 * max(e2, e98)


_LN_98 = math.log(9 / 8)


def _ln_rational(p: int, q: int, w: int) -> tuple[int, int]:
    """ln(p/q) * 10**w with an error bound in ulps, for p, q > 0.

    Reduction: p/q = 2**j * (9/8)**i * r with r within 1/16 of 1, then
    ln r = 2 atanh((r - 1)/(r + 1)).
    """
    j = p.bit_length() - q.bit_length()
    # normalise r0 = p / (q 2**j) into [1, 2)
    P, Q = (p, q << j) if j >= 0 else (p << -j, q)
    if P < Q:
        j -= 1
        P, Q = (p, q << j) if j >= 0 else (p << -j, q)
    r0 = P / Q
    i = max(0, min(6, round(math.log(r0) / _LN_98)))
    P, Q = P * 8**i, Q * 9**i
    s, es = _atanh_fixed(P - Q, P + Q, w)
    ln2, ln98, ec = _ln_constants(w)
    value = 2 * s + j * ln2 + i * ln98
    err = 2 * es + (abs(j) + i) * ec
    return value, err


def fr_ln(x: FixedReal, scale: int) -> FixedReal:
    """Certified natural logarithm, accurate to a couple of ulps for exact input."""
    _check_scale(scale)
    if x.mantissa - x.err <= 0:
        raise DomainError("logarithm of a non-positive number")
    if x.is_exact and x.mantissa == 10**x.scale:
        return FixedReal(0, scale, 0)
    guard = 12 + len(str(x.scale + scale)) + len(str(x.mantissa.bit_length()))
    w = scale + guard
    den = 10**x.scale
    lo_v, lo_e = _ln_rational(x.mantissa - x.err, den, w)
    if x.err:
        hi_v, hi_e = _ln_rational(x.mantissa + x.err, den, w)
    else:
        hi_v, hi_e = lo_v, lo_e
    lo, hi = lo_v - lo_e, hi_v + hi_e
    return FixedReal.from_bounds(Fraction(lo, 10**w), Fraction(hi, 10**w), scale)


def ln_int(n: int, scale: int) -> FixedReal:
    return fr_ln(FixedReal.from_int(n), scale)


def ln_fraction(q: Fraction, scale: int) -> FixedReal:
    """Logarithm of an exact positive rational."""
    q = Fraction(q)
    if q <= 0:
        raise DomainError("logarithm of a non-positive number")
    if q == 1:
        return FixedReal(0, scale, 0)
    w = scale + 12 + len(str(q.numerator.bit_length() + q.denominator.bit_length()))
    v, e = _ln_rational(q.numerator, q.denominator, w)
    return FixedReal.from_bounds(Fraction(v - e, 10**w), Fraction(v + e, 10**w), scale)


# -- powers and constants -------------------------------------------------------


def _pow_directed(base: int, n: int, w: int, up: bool) -> int:
    """Bound on (base/10**w)**n * 10**w for base >= 0, rounding down or up."""
    d = 10**w
    result = d
    b = base
    while n:
        if n & 1:
            result = _ceil_div(result * b, d) if up else (result * b) // d
        n >>= 1
        if n:
            b = _ceil_div(b * b, d) if up else (b * b) // d
    return result


def fr_pow(x: FixedReal, n: int, scale: int) -> FixedReal:
    """x**n for a certainly-positive x (any integer n), by binary powering.

    Lower and upper ends are powered separately with directed rounding.
    """
    _check_scale(scale)
    if n == 0:
        return FixedReal.from_int(1, scale)
    if not x.certainly_positive():
        raise DomainError("fr_pow needs a certainly positive base")
    if n < 0:
        return fr_div(FixedReal.from_int(1, scale), fr_pow(x, -n, scale + 5), scale)
    w = max(scale, x.scale) + len(str(n)) + 4
    lo_b = (x.mantissa - x.err) * 10 ** (w - x.scale)
    hi_b = (x.mantissa + x.err) * 10 ** (w - x.scale)
    lo = _pow_directed(lo_b, n, w, up=False)
    hi = _pow_directed(hi_b, n, w, up=True)
    return FixedReal.from_bounds(Fraction(lo, 10**w), Fraction(hi, 10**w), scale)


def golden_ratio(scale: int) -> FixedReal:
    """Enclosure of (1 + sqrt 5)/2."""
    if scale < 1:
        raise ParameterError("scale must be >= 1")
    w = scale + 2
    r5 = fr_sqrt(FixedReal.from_int(5), w)
    phi = FixedReal(r5.mantissa + 10**w, w, r5.err)
    lo, hi = phi.lower() / 2, phi.upper() / 2
    return FixedReal.from_bounds(lo, hi, scale)


def floor_scaled(x: FixedReal, e: int, mult: int = 1) -> int:
    """Exact floor(mult * 10**e * x); raises PrecisionError when not certain."""
    if e < 0 or mult < 1:
        raise ParameterError("need e >= 0 and mult >= 1")
    num_scale = 10**e * mult
    den = 10**x.scale
    lo = ((x.mantissa - x.err) * num_scale) // den
    hi = ((x.mantissa + x.err) * num_scale) // den
    if lo != hi:
        need = x.scale + max(1, len(str(x.err))) + 2
        raise PrecisionError(
            "insufficient precision: error interval straddles an integer",
            required_scale=max(need, e + len(str(mult)) + 10),
        )
    return lo
