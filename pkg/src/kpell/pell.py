"""k-generalized Pell numbers, their dominant root and Binet-type estimates."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .bigfix import FixedReal, fr_ln, fr_mul, fr_pow, fr_sqrt, golden_ratio, _ceil_div
from .errors import ParameterError, PrecisionError

LOG10_PHI2 = 0.41797905680  # log10(phi^2), only used to size working precision
LOG10_PHI = LOG10_PHI2 / 2


@dataclass(frozen=True)
class PellTerm:
    k: int
    n: int
    value: int


@dataclass(frozen=True)
class DominantRoot:
    """Certified enclosures of alpha(k) and f_k(alpha)."""

    k: int
    alpha: FixedReal
    fk_alpha: FixedReal

    @property
    def scale(self) -> int:
        return self.alpha.scale


def _check_k(k: int) -> None:
    if not isinstance(k, int) or k < 2:
        raise ParameterError(f"k must be an integer >= 2, got {k!r}")


def pell_stream(k: int, n_max: int) -> Iterator[PellTerm]:
    """Yield P_1 .. P_{n_max} keeping only a k-term window and its sum.

    P_n = P_{n-1} + (P_{n-1} + ... + P_{n-k}), so one add per step plus one
    add/subtract to slide the window sum.
    """
    _check_k(k)
    window: deque[int] = deque([0] * (k - 1) + [1], maxlen=k)
    wsum = 1
    prev = 1
    if n_max >= 1:
        yield PellTerm(k, 1, 1)
    for n in range(2, n_max + 1):
        cur = prev + wsum
        wsum += cur - window[0]
        window.append(cur)
        prev = cur
        yield PellTerm(k, n, cur)


def pell_number(k: int, n: int) -> int:
    _check_k(k)
    if n < 2 - k:
        raise ParameterError(f"P_n^({k}) is defined for n >= {2 - k}")
    if n <= 0:
        return 0
    term = None
    for term in pell_stream(k, n):
        pass
    return term.value


def pell_table(k: int, count: int) -> list[int]:
    return [t.value for t in pell_stream(k, count)]


def fibonacci(m: int) -> int:
    """Classical F_m with F_0 = 0, F_1 = F_2 = 1 (fast doubling)."""
    if m < 0:
        raise ParameterError("m must be >= 0")

    def fd(n: int) -> tuple[int, int]:
        if n == 0:
            return 0, 1
        a, b = fd(n >> 1)
        c = a * (2 * b - a)
        d = a * a + b * b
        return (d, c + d) if n & 1 else (c, d)

    return fd(m)[0]


# -- dominant root -------------------------------------------------------------


def _cleared_sign(m: int, w: int, k: int) -> int:
    """Certified sign of g(x) = x^2 - 3x + 1 + x^(1-k) at x = m/10**w (x > 1).

    g has the sign of Psi_k for x > 1 since (x - 1) Psi_k(x) = x^(k-1) g(x).
    Returns 0 when the rounding interval cannot decide.
    """
    d = 10**w
    poly = m * m - 3 * m * d + d * d  # (x^2 - 3x + 1) * 10**(2w), exact
    # (d/m)^(k-1) * 10**(2w), bracketed by directed rounding
    W = 2 * w
    D = 10**W
    base_lo = (d * D) // m
    base_hi = _ceil_div(d * D, m)
    lo, hi = D, D
    b_lo, b_hi, e = base_lo, base_hi, k - 1
    while e:
        if e & 1:
            lo = (lo * b_lo) // D
            hi = _ceil_div(hi * b_hi, D)
        e >>= 1
        if e:
            b_lo = (b_lo * b_lo) // D
            b_hi = _ceil_div(b_hi * b_hi, D)
    if poly + lo > 0:
        return 1
    if poly + hi < 0:
        return -1
    return 0


def _bisect_root(k: int, w: int) -> tuple[int, int]:
    """Integers lo < hi with Psi_k(lo/10^w) < 0 < Psi_k(hi/10^w), hi - lo <= 1."""
    d = 10**w
    phi2 = golden_ratio(w + 2) * golden_ratio(w + 2)
    hi = _ceil_div((phi2.mantissa + phi2.err) * d, 10**phi2.scale)
    # lower end of (2.3), but never below 2 (Psi_k(2) < 0 for all k >= 2)
    lower_23 = fr_mul(phi2, 1 - fr_pow(golden_ratio(w + 2), -k, w + 4), w + 4)
    lo = max(2 * d, ((lower_23.mantissa - lower_23.err) * d) // 10**lower_23.scale)
    if _cleared_sign(lo, w, k) != -1 or _cleared_sign(hi, w, k) != 1:
        raise PrecisionError("cannot bracket the dominant root at this scale", required_scale=w + 10)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        s = _cleared_sign(mid, w, k)
        if s > 0:
            hi = mid
        elif s < 0:
            lo = mid
        else:
            raise PrecisionError("root sign undecided", required_scale=w + 10)
    return lo, hi


def fk(k: int, x: Fraction) -> Fraction:
    """f_k(x) = (x - 1)/((k + 1)x^2 - 3kx + k - 1), exactly."""
    return (x - 1) / ((k + 1) * x * x - 3 * k * x + k - 1)


def dominant_root(k: int, scale: int) -> DominantRoot:
    """Enclose alpha(k) to width 10**-scale by certified bisection.

    f_k is strictly decreasing near alpha (its derivative has numerator
    -(k+1)(x-1)^2 - k), so f_k(alpha) lies between f_k(hi) and f_k(lo).
    """
    _check_k(k)
    if scale < 1:
        raise ParameterError("scale must be >= 1")
    w = scale + 2
    lo, hi = _bisect_root(k, w)
    d = 10**w
    alpha = FixedReal.from_bounds(Fraction(lo, d), Fraction(hi, d), scale)
    f_lo, f_hi = fk(k, Fraction(hi, d)), fk(k, Fraction(lo, d))
    return DominantRoot(k, alpha, FixedReal.from_bounds(f_lo, f_hi, scale))


def binet_scale(n: int, guard: int = 12) -> int:
    """Working digits so that f_k(alpha) * alpha**n is accurate to well below 1/8."""
    return max(0, math.ceil(abs(n) * LOG10_PHI2)) + len(str(abs(n))) + guard


def binet_estimate(root: DominantRoot, n: int) -> FixedReal:
    """Certified enclosure of f_k(alpha) * alpha**n."""
    if n < 2 - root.k:
        raise ParameterError(f"n must be >= {2 - root.k}")
    s = root.scale
    val = fr_mul(root.fk_alpha, fr_pow(root.alpha, n, s), s)
    if val.radius() >= Fraction(1, 8):
        raise PrecisionError(
            f"alpha carries too few digits for n={n}", required_scale=binet_scale(n)
        )
    return val


def binet_error_ok(k: int, n: int, root: DominantRoot | None = None) -> bool:
    """|P_n - f_k(alpha) alpha^n| < 1/2, decided from certified enclosures."""
    if root is None:
        root = dominant_root(k, binet_scale(n))
    est = binet_estimate(root, n)
    p = pell_number(k, n)
    return est.upper() - p < Fraction(1, 2) and p - est.lower() < Fraction(1, 2)


def growth_bounds_hold(root: DominantRoot, n: int, value: int) -> bool:
    """alpha^(n-2) <= value <= alpha^(n-1), certified (n >= 1)."""
    if n < 1:
        raise ParameterError("growth bounds are stated for n >= 1")
    s = root.scale
    low = fr_pow(root.alpha, n - 2, s)
    high = fr_pow(root.alpha, n - 1, s)
    if n - 1 == 0:
        return low.upper() <= value and value == 1
    if low.upper() <= value < high.lower():
        return True
    if low.lower() > value or high.upper() < value:
        return False
    raise PrecisionError("growth bound undecided at this scale", required_scale=2 * s)


def root_interval_holds(root: DominantRoot) -> bool:
    """phi^2 (1 - phi^-k) < alpha < phi^2 and 0.276 < f_k(alpha) < 0.5."""
    s = root.scale + 5
    phi = golden_ratio(s)
    phi2 = fr_mul(phi, phi, s)
    lower = fr_mul(phi2, 1 - fr_pow(phi, -root.k, s), s)
    return (
        root.alpha.certainly_gt(lower)
        and root.alpha.certainly_lt(phi2)
        and root.fk_alpha.certainly_gt(Fraction(276, 1000))
        and root.fk_alpha.certainly_lt(Fraction(1, 2))
    )


def interval_scale(k: int) -> int:
    """Digits needed to separate alpha(k) from phi^2 (their gap is ~ phi^(2-2k)/sqrt 5)."""
    return math.ceil(k * LOG10_PHI2) + 12


def fk_phi2(scale: int) -> FixedReal:
    """f_k(phi^2) = (5 - sqrt 5)/10 for every k."""
    r5 = fr_sqrt(FixedReal.from_int(5), scale + 2)
    return ((5 - r5) / 10).rescale(scale)


def verify_phi_approx(k: int, n: int, scale: int = 30) -> bool:
    """Check |alpha^n - phi^(2n)| < phi^(2n)/phi^(k/2-2) and |f_k(alpha) - f_k(phi^2)| < k/phi^(k-2).

    Both sides of the first inequality are divided by phi^(2n), so only the
    ratio (alpha/phi^2)^n is needed.  Requires n < phi^(k/2).
    """
    _check_k(k)
    if n < 1:
        raise ParameterError("n must be >= 1")
    # decide n < phi^(k/2) via logs
    s0 = 20 + len(str(k))
    half_k_log_phi = fr_ln(golden_ratio(s0 + 2), s0) * Fraction(k, 2)
    ln_n = fr_ln(FixedReal.from_int(n), s0)
    if not ln_n.certainly_lt(half_k_log_phi):
        raise ParameterError(f"case condition n < phi^(k/2) fails for k={k}, n={n}")

    # phi^(-k) is the smallest quantity in play; carry enough digits to see it
    w = scale + math.ceil(k * LOG10_PHI) + len(str(n)) + 10
    root = dominant_root(k, w)
    phi = golden_ratio(w + 4)
    phi2 = fr_mul(phi, phi, w + 4)
    ratio_n = fr_pow(root.alpha / phi2, n, w)
    lhs1 = abs(ratio_n - 1)
    # phi^(2 - k/2) = phi^2 / sqrt(phi)^k
    sqrt_phi = fr_sqrt(phi, w + 4)
    rhs1 = phi2 / fr_pow(sqrt_phi, k, w + 4)
    ok1 = lhs1.upper() < rhs1.lower()

    lhs2 = abs(root.fk_alpha - fk_phi2(w))
    rhs2 = k * fr_pow(phi, 2 - k, w + 4)
    ok2 = lhs2.upper() < rhs2.lower()
    return ok1 and ok2
