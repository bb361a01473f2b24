"""Largest prime factors, 7-smooth decomposition and the smooth-term search."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

from .errors import DomainError, ParameterError
from .pell import PellTerm, fibonacci, pell_stream

SMALL_PRIMES = (2, 3, 5, 7)
DEFAULT_RHO_BUDGET = 10**7
DEFAULT_TRIAL_BOUND = 1000
# Miller-Rabin with the first 13 prime bases is exact below this bound
MR_DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_RANDOM_ROUNDS = 64


@dataclass(frozen=True)
class SmoothCertificate:
    m: int
    exponents: tuple[int, int, int, int] | None
    residual: int = 1

    @property
    def smooth(self) -> bool:
        return self.exponents is not None

    def reconstruct(self) -> int:
        a, b, c, d = self.exponents
        return 2**a * 3**b * 5**c * 7**d


@dataclass
class Factorization:
    m: int
    factors: dict[int, int] = field(default_factory=dict)
    complete: bool = True
    # unfactored cofactor (1 when complete)
    cofactor: int = 1
    # listed factors that passed only the probabilistic test
    probable: set[int] = field(default_factory=set)

    def product(self) -> int:
        out = 1
        for p, e in self.factors.items():
            out *= p**e
        return out * self.cofactor


def seven_smooth_decompose(m: int) -> SmoothCertificate:
    if m <= 0:
        raise DomainError("seven_smooth_decompose needs m >= 1")
    a = (m & -m).bit_length() - 1
    r = m >> a
    exps = [a]
    for p in (3, 5, 7):
        e = 0
        while r % p == 0:
            r //= p
            e += 1
        exps.append(e)
    if r == 1:
        return SmoothCertificate(m, tuple(exps))
    return SmoothCertificate(m, None, r)


def is_seven_smooth(m: int) -> bool:
    return m > 0 and seven_smooth_decompose(m).smooth


# -- primality and rho ----------------------------------------------------------


@lru_cache(maxsize=8)
def primes_up_to(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    return tuple(i for i, f in enumerate(sieve) if f)


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int) -> tuple[bool, bool]:
    """(is prime, certain).  Deterministic below MR_DETERMINISTIC_LIMIT."""
    if n < 2:
        return False, True
    for p in _MR_BASES:
        if n % p == 0:
            return n == p, True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if not all(_mr_round(n, d, s, a) for a in _MR_BASES):
        return False, True
    if n < MR_DETERMINISTIC_LIMIT:
        return True, True
    rng = random.Random(n)
    for _ in range(_MR_RANDOM_ROUNDS):
        if not _mr_round(n, d, s, rng.randrange(2, n - 1)):
            return False, True
    return True, False


def is_prime(n: int) -> bool:
    return is_probable_prime(n)[0]


def pollard_brent(n: int, budget: int, seed: int = 0) -> tuple[int | None, int]:
    """A non-trivial factor of composite n, or None when the budget runs out.

    Returns (factor, iterations used).  Seeds follow a fixed schedule so runs
    are reproducible.
    """
    if n % 2 == 0:
        return 2, 0
    used = 0
    attempt = seed
    while used < budget:
        rng = random.Random(attempt * 1_000_003 + n % 1_000_000_007)
        attempt += 1
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1 and used < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            used += r
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            used += r
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
                used += 1
        if 1 < g < n:
            return g, used
    return None, used


def factorize(m: int, budget: int = DEFAULT_RHO_BUDGET, trial_bound: int = DEFAULT_TRIAL_BOUND) -> Factorization:
    """Trial division to ``trial_bound`` then Pollard-Brent on what remains.

    ``budget`` counts rho iterations per composite.  Whatever cannot be split
    is left in ``cofactor`` and ``complete`` is False; every prime left in the
    cofactor then exceeds ``trial_bound``.
    """
    m = abs(m)
    fac = Factorization(m)
    if m <= 1:
        return fac
    n = m
    for p in primes_up_to(trial_bound):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            fac.factors[p] = e
    stack = [n] if n > 1 else []
    leftovers: list[int] = []
    while stack:
        c = stack.pop()
        prime, certain = is_probable_prime(c)
        if prime:
            fac.factors[c] = fac.factors.get(c, 0) + 1
            if not certain:
                fac.probable.add(c)
                fac.complete = False
            continue
        d, _ = pollard_brent(c, budget)
        if d is None:
            leftovers.append(c)
        else:
            stack.extend((d, c // d))
    for c in leftovers:
        fac.cofactor *= c
        fac.complete = False
    fac.factors = dict(sorted(fac.factors.items()))
    return fac


def largest_prime_factor(
    m: int, budget: int = DEFAULT_RHO_BUDGET, trial_bound: int = DEFAULT_TRIAL_BOUND
) -> tuple[int, bool]:
    """(P(m), True) or (certified lower bound on P(m), False)."""
    if abs(m) <= 1:
        return 1, True
    fac = factorize(m, budget, trial_bound)
    if fac.complete:
        return max(fac.factors), True
    best = max((p for p in fac.factors if p not in fac.probable), default=1)
    # every prime dividing the cofactor or a merely probable prime exceeds the trial bound
    return max(best, trial_bound + 1), False


# -- searches --------------------------------------------------------------------


@dataclass(frozen=True)
class SmoothHit:
    k: int
    n: int
    term: PellTerm
    certificate: SmoothCertificate


def search_smooth_terms(k_range: Iterable[int], n_range: range) -> Iterator[SmoothHit]:
    """Yield every P_n^(k) that is 7-smooth, k outer and n inner."""
    if len(n_range) == 0:
        return
    if n_range.step != 1:
        raise ParameterError("n_range must be contiguous")
    n_lo, n_hi = n_range.start, n_range.stop - 1
    if n_lo < 4:
        raise ParameterError("the search starts at n >= 4")
    for k in k_range:
        for term in pell_stream(k, n_hi):
            if term.n < n_lo:
                continue
            cert = seven_smooth_decompose(term.value)
            if cert.smooth:
                yield SmoothHit(k, term.n, term, cert)


def fibonacci_smooth_case(k: int) -> list[int]:
    """Odd m in [7, 2k+1] with F_m 7-smooth (the n <= k+1 branch)."""
    if k < 3:
        raise ParameterError("k must be >= 3")
    return [m for m in range(7, 2 * k + 2, 2) if is_seven_smooth(fibonacci(m))]
