"""Heights, Matveev's lower bound and the analytic bound evaluators.

All logarithms are natural.  Evaluators work with certified FixedReal
enclosures at ``SCALE`` digits after the point; callers compare with
``.upper()``/``.lower()`` rather than the midpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bigfix import FixedReal, fr_ln, fr_sqrt, golden_ratio, ln_fraction, ln_int
from .errors import DomainError, ParameterError
from .pell import dominant_root

SCALE = 40


def _ln(x: FixedReal | int | Fraction) -> FixedReal:
    if isinstance(x, FixedReal):
        return fr_ln(x, SCALE)
    return ln_fraction(Fraction(x), SCALE)


def _fr(x: int | Fraction | FixedReal) -> FixedReal:
    if isinstance(x, FixedReal):
        return x
    return FixedReal.from_fraction(Fraction(x), SCALE)


def log_phi() -> FixedReal:
    return fr_ln(golden_ratio(SCALE + 5), SCALE)


@dataclass(frozen=True)
class MatveevParams:
    t: int
    D: int
    B: FixedReal
    A: tuple[FixedReal, ...]

    def __post_init__(self) -> None:
        if self.t < 1 or self.D < 1:
            raise ParameterError("need t >= 1 and D >= 1")
        if len(self.A) != self.t:
            raise ParameterError(f"expected {self.t} A-values, got {len(self.A)}")
        if any(a.lower() < Fraction(16, 100) for a in self.A):
            raise ParameterError("every A_i must be >= 0.16")
        if self.B.lower() < 1:
            raise ParameterError("B must be >= 1")

    @classmethod
    def of(cls, t: int, D: int, B, A: Sequence) -> MatveevParams:
        return cls(t, D, _fr(B), tuple(_fr(a) for a in A))


@dataclass
class BoundChainReport:
    inputs: dict[str, int]
    constants: dict[str, FixedReal] = field(default_factory=dict)
    bound: FixedReal | None = None


def log_height_rational(p: int, q: int) -> FixedReal:
    """h(p/q) = log max(|p|, q) after reducing the fraction."""
    if q == 0:
        raise DomainError("denominator must be non-zero")
    if q < 0:
        p, q = -p, -q
    g = math.gcd(p, q)
    p, q = p // g, q // g
    return ln_int(max(abs(p), q), SCALE)


def height_bound_fk(k: int) -> FixedReal:
    """Upper bound 4k log(phi) + k log(k+1) for h(f_k(alpha))."""
    if k < 2:
        raise ParameterError("k must be >= 2")
    return 4 * k * log_phi() + k * ln_int(k + 1, SCALE)


def matveev_lower_bound(p: MatveevParams) -> FixedReal:
    """The (negative) lower bound for log|Gamma|."""
    t, D = p.t, p.D
    coeff = FixedReal.from_fraction(Fraction(14, 10) * 30 ** (t + 3) * t**4 * D * D, SCALE)
    coeff = coeff * fr_sqrt(FixedReal.from_int(t), SCALE)
    coeff = coeff * (1 + ln_int(D, SCALE)) * (1 + _ln(p.B))
    for a in p.A:
        coeff = coeff * a
    return -coeff


def gamma1_params(s: int, k: int, n: int, p_s: int) -> MatveevParams:
    """Parameters for p_1^b1...p_s^bs alpha^-n f_k(alpha)^-1 - 1 over Q(alpha)."""
    log_ps = ln_int(p_s, SCALE)
    log_k = ln_int(k, SCALE)
    A = [k * log_ps] * s + [FixedReal.from_int(1), Fraction(9, 2) * k * k * log_k]
    return MatveevParams.of(s + 2, k, Fraction(14, 10) * n, A)


def gamma2_params(s: int, n: int, p_s: int) -> MatveevParams:
    """Parameters for p_1^b1...p_s^bs (10/(5-sqrt5)) phi^-2n - 1 over Q(sqrt5)."""
    log_ps = ln_int(p_s, SCALE)
    A = [2 * log_ps] * s + [log_phi(), 8 * ln_int(10, SCALE)]
    return MatveevParams.of(s + 2, 2, 2 * n, A)


def lemma41_matveev_coefficient(k: int) -> FixedReal:
    """Q(k) with n < Q(k) log n for all n >= 4, from Matveev with s = 4 and p_s = 7.

    (1 + log 1.4n)/log n decreases in n, so evaluating at n = 4 covers all
    n >= 4; the log 1.82 term is absorbed the same way.
    """
    bound = -matveev_lower_bound(gamma1_params(4, k, 4, 7))
    log4 = ln_int(4, SCALE)
    log_alpha = fr_ln(dominant_root(k, SCALE + 5).alpha, SCALE)
    return (bound / log4 + ln_fraction(Fraction(182, 100), SCALE) / log4) / log_alpha


def gamma2_matveev_constant(s: int) -> FixedReal:
    """C(s) with log|Gamma_2| > -C(s) 60^s s^4.5 (log p_s)^s log n for all n >= 4."""
    p_s = 7
    bound = -matveev_lower_bound(gamma2_params(s, 4, p_s))
    norm = FixedReal.from_int(60**s * s**4, SCALE) * fr_sqrt(FixedReal.from_int(s), SCALE)
    norm = norm * ln_int(p_s, SCALE) ** s * ln_int(4, SCALE)
    return bound / norm


def guzman_luca_bound(m: int, T) -> FixedReal:
    """2^m T (log T)^m, valid when T > (4m^2)^m and T > x/(log x)^m."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    T = _fr(T)
    if not T.certainly_gt((4 * m * m) ** m):
        raise ParameterError(f"need T > (4m^2)^m = {(4 * m * m) ** m}")
    return 2**m * T * _ln(T) ** m


def lemma31_bound(s: int, k: int) -> FixedReal:
    """Upper bound 27 s log s + 5 s log k + log(10s + 2k) on log n."""
    if s < 2 or k < 2:
        raise ParameterError("need s >= 2 and k >= 2")
    return 27 * s * ln_int(s, SCALE) + 5 * s * ln_int(k, SCALE) + ln_int(10 * s + 2 * k, SCALE)


def lemma41a_bound(k) -> FixedReal:
    """2.3e23 k^7 (log k)^3; k may be an int or a certified real."""
    kk = _fr(k)
    if kk.lower() < 2:
        raise ParameterError("k must be >= 2")
    return Fraction(23, 10) * 10**23 * kk**7 * _ln(kk) ** 3


def lemma41b_bounds() -> tuple[FixedReal, FixedReal]:
    """(k bound, n bound) when k > 2500, from the phi-approximation branch with s = 4."""
    s = 4
    log_s = ln_int(s, SCALE)
    k_bound = Fraction(13, 10) * 10**15 * FixedReal.from_int(4**6, SCALE) * fr_sqrt(FixedReal.from_int(4), SCALE)
    k_bound = k_bound * (120 * log_s) ** s * log_s
    return k_bound, lemma41a_bound(k_bound)


def thm11_threshold(n: int) -> FixedReal:
    if n < 4:
        raise ParameterError("the bound is stated for n >= 4")
    return _ln(ln_int(n, SCALE)) / 104


def thm11_check(k: int, n: int, pmax: int) -> bool:
    """pmax > (1/104) log log n, decided from a certified enclosure."""
    if k < 2:
        raise ParameterError("k must be >= 2")
    return thm11_threshold(n).certainly_lt(pmax)
