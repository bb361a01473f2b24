"""Exact LLL reduction, de Weger approximation lattices and the bound-reduction step.

Bases are stored as column vectors (tuples of Python ints).  LLL runs in the
integral formulation (Gram determinants d_i and lambda_ij = d_j mu_ij), so no
rational arithmetic happens inside the main loop; exact Fraction Gram-Schmidt
is kept for verification and for the distance bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .bigfix import FixedReal, floor_scaled, fr_ln, fr_sqrt, ln_fraction, ln_int
from .errors import DegenerateInputError, ParameterError, RankError

Vector = tuple[int, ...]
WORK_SCALE = 40


@dataclass(frozen=True)
class IntLattice:
    basis: tuple[Vector, ...]

    def __post_init__(self) -> None:
        dim = len(self.basis)
        if dim == 0 or any(len(b) != dim for b in self.basis):
            raise ParameterError("basis must be dim column vectors of length dim")

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]]) -> IntLattice:
        return cls(tuple(tuple(int(x) for x in c) for c in cols))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> IntLattice:
        return cls.from_columns(list(zip(*rows)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def rows(self) -> list[list[int]]:
        return [list(r) for r in zip(*self.basis)]

    def determinant(self) -> int:
        return bareiss_det(self.rows())

    def export_rows(self, path: str | Path) -> None:
        """Write the matrix as rows of decimal integers, one per line."""
        text = "\n".join(" ".join(str(x) for x in r) for r in self.rows())
        Path(path).write_text(text + "\n")

    @classmethod
    def import_rows(cls, path: str | Path) -> IntLattice:
        lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
        return cls.from_rows([[int(t) for t in ln.split()] for ln in lines])


@dataclass(frozen=True)
class GramSchmidtData:
    bstar: tuple[tuple[Fraction, ...], ...]
    mu: tuple[tuple[Fraction, ...], ...]
    # squared norms of the b*_i
    norms_sq: tuple[Fraction, ...]


def _dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free Gaussian elimination determinant."""
    m = [list(r) for r in rows]
    n = len(m)
    sign, prev = 1, 1
    for i in range(n - 1):
        if m[i][i] == 0:
            swap = next((r for r in range(i + 1, n) if m[r][i] != 0), None)
            if swap is None:
                return 0
            m[i], m[swap] = m[swap], m[i]
            sign = -sign
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) // prev
        prev = m[i][i]
    return sign * m[n - 1][n - 1]


def gram_schmidt(L: IntLattice) -> GramSchmidtData:
    bstar: list[tuple[Fraction, ...]] = []
    norms: list[Fraction] = []
    mu: list[tuple[Fraction, ...]] = []
    for i, b in enumerate(L.basis):
        row = []
        v = [Fraction(x) for x in b]
        for j in range(i):
            m = _dot(b, bstar[j]) / norms[j]
            row.append(m)
            v = [a - m * c for a, c in zip(v, bstar[j])]
        nv = _dot(v, v)
        if nv == 0:
            raise RankError(f"basis vector {i} is dependent on the previous ones")
        row.append(Fraction(1))
        bstar.append(tuple(v))
        norms.append(nv)
        mu.append(tuple(row))
    return GramSchmidtData(tuple(bstar), tuple(mu), tuple(norms))


def _check_y(y_param: Fraction) -> Fraction:
    y_param = Fraction(y_param)
    if not Fraction(1, 4) < y_param < 1:
        raise ParameterError("the Lovasz constant must lie in (1/4, 1)")
    return y_param


def lll_reduce(L: IntLattice, y_param: Fraction = Fraction(3, 4)) -> IntLattice:
    """Integral LLL (Cohen, Algorithm 2.6.7); indices below are 0-based."""
    y_param = _check_y(y_param)
    p, q = y_param.numerator, y_param.denominator
    b = [list(v) for v in L.basis]
    n = len(b)
    # d[i + 1] = d_i of the 1-based description, d[0] = 1
    d = [1] + [0] * n
    lam = [[0] * n for _ in range(n)]

    def red(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) > d[l + 1]:
            r = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - r * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= r * d[l + 1]
            for i in range(l):
                lam[k][i] -= r * lam[l][i]

    def swap(k: int, kmax: int) -> None:
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        B = (d[k - 1] * d[k + 1] + lm * lm) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lm * t) // d[k]
            lam[i][k - 1] = (B * t + lm * lam[i][k]) // d[k + 1]
        d[k] = B

    d[1] = _dot(b[0], b[0])
    if d[1] == 0:
        raise RankError("zero basis vector")
    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = _dot(b[k], b[j])
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise RankError(f"basis vector {k} is dependent on the previous ones")
                    d[k + 1] = u
        red(k, k - 1)
        lm = lam[k][k - 1]
        if q * (d[k + 1] * d[k - 1] + lm * lm) < p * d[k] * d[k]:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return IntLattice(tuple(tuple(v) for v in b))


def is_reduced(L: IntLattice, y_param: Fraction = Fraction(3, 4), gs: GramSchmidtData | None = None) -> bool:
    """Size reduction and the Lovasz condition, checked exactly."""
    y_param = _check_y(y_param)
    gs = gs or gram_schmidt(L)
    half = Fraction(1, 2)
    for i in range(L.dim):
        if any(abs(gs.mu[i][j]) > half for j in range(i)):
            return False
        if i and gs.norms_sq[i] < (y_param - gs.mu[i][i - 1] ** 2) * gs.norms_sq[i - 1]:
            return False
    return True


# -- de Weger lattices and the bound reduction -------------------------------------


@dataclass(frozen=True)
class LinearFormSpec:
    """|eta0 + x_1 eta_1 + ... + x_k eta_k| <= c3 exp(-c4 H) with |x_i| <= X_i.

    C = C_mult * 10**C_exp.
    """

    etas: tuple[FixedReal, ...]
    X: tuple[int, ...]
    c3: FixedReal
    c4: FixedReal
    C_exp: int
    C_mult: int = 1
    eta0: FixedReal | None = None

    def __post_init__(self) -> None:
        if len(self.etas) != len(self.X) or len(self.etas) < 2:
            raise ParameterError("need at least two etas and one X per eta")
        if not (self.c3.certainly_positive() and self.c4.certainly_positive()):
            raise ParameterError("c3 and c4 must be positive")
        if self.C < max(self.X):
            raise ParameterError("C must be at least max X_i")

    @property
    def C(self) -> int:
        return self.C_mult * 10**self.C_exp

    @property
    def dim(self) -> int:
        return len(self.etas)

    @property
    def S(self) -> int:
        return sum(x * x for x in self.X[:-1])

    @property
    def T(self) -> Fraction:
        return Fraction(1 + sum(self.X), 2)


def build_dweger_lattice(spec: LinearFormSpec) -> tuple[IntLattice, Vector]:
    """Identity on the top rows, floor(C eta_i) along the bottom row."""
    k = spec.dim
    bottom = [floor_scaled(e, spec.C_exp, spec.C_mult) for e in spec.etas]
    if bottom[-1] == 0:
        raise DegenerateInputError("floor(C eta_k) vanishes; the lattice is singular")
    cols = []
    for j in range(k):
        col = [0] * k
        if j < k - 1:
            col[j] = 1
        col[-1] = bottom[j]
        cols.append(tuple(col))
    y = [0] * k
    if spec.eta0 is not None:
        y[-1] = -floor_scaled(spec.eta0, spec.C_exp, spec.C_mult)
    return IntLattice(tuple(cols)), tuple(y)


def _solve(L: IntLattice, y: Sequence[int]) -> list[Fraction]:
    """z with B z = y, by exact Gauss-Jordan elimination."""
    rows = L.rows()
    n = L.dim
    m = [[Fraction(x) for x in r] + [Fraction(y[i])] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise RankError("singular basis")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return [m[i][n] for i in range(n)]


@dataclass(frozen=True)
class DistanceBound:
    c1_sq: Fraction
    sigma: Fraction
    c2_sq: Fraction
    c2: FixedReal  # certified enclosure of sqrt(c2_sq)
    y_in_lattice: bool


def distance_lower_bound(reduced: IntLattice, gs: GramSchmidtData, y: Sequence[int]) -> DistanceBound:
    """c2 = sigma ||b_1|| / c1 with c1 = max_j ||b_1|| / ||b*_j||.

    sigma = 1 if y lies in the lattice; otherwise sigma is the distance from
    z_i to the nearest integer for the largest index i with z_i not integral,
    where z = B^-1 y.
    """
    b1_sq = Fraction(_dot(reduced.basis[0], reduced.basis[0]))
    c1_sq = max(b1_sq / nb for nb in gs.norms_sq)
    z = _solve(reduced, y)
    frac_idx = [i for i, zi in enumerate(z) if zi.denominator != 1]
    if not frac_idx:
        sigma, inside = Fraction(1), True
    else:
        zi = z[frac_idx[-1]]
        sigma, inside = min(zi - math.floor(zi), math.ceil(zi) - zi), False
        if sigma == 0:
            raise DegenerateInputError("z is integral yet y is outside the lattice")
    c2_sq = sigma * sigma * b1_sq / c1_sq
    c2 = fr_sqrt(FixedReal.from_fraction(c2_sq, WORK_SCALE), WORK_SCALE)
    return DistanceBound(c1_sq, sigma, c2_sq, c2, inside)


@dataclass
class ReductionOutcome:
    spec_C: tuple[int, int]  # (C_mult, C_exp)
    c1_sq: Fraction | None
    c2: FixedReal
    S: int
    T: Fraction
    H_value: FixedReal | None = None
    H_new: int | None = None
    retry: bool = False
    # the alternative conclusion of the reduction lemma: x_1 = ... = x_{k-1} = 0
    degenerate_branch: str = ""
    notes: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.H_new is not None


def reduce_bound(spec: LinearFormSpec, c2: FixedReal, c1_sq: Fraction | None = None) -> ReductionOutcome:
    """H <= (log(C c3) - log(sqrt(c2^2 - S) - T)) / c4 whenever c2^2 >= T^2 + S."""
    S, T = spec.S, spec.T
    out = ReductionOutcome((spec.C_mult, spec.C_exp), c1_sq, c2, S, T)
    k = spec.dim
    out.degenerate_branch = f"x_1 = ... = x_{k - 1} = 0 and x_{k} = -floor(C eta0)/floor(C eta_{k})"
    c2_lo = c2.lower()
    if c2_lo <= 0 or c2_lo * c2_lo < T * T + S:
        out.retry = True
        return out
    s = WORK_SCALE
    root = fr_sqrt(FixedReal.from_fraction(c2_lo * c2_lo - S, s), s).lower()
    inner = root - T
    if inner <= 0:
        # only reachable through rounding at the boundary c2^2 = T^2 + S
        out.retry = True
        return out
    log_C = ln_int(spec.C_mult, s) + spec.C_exp * ln_int(10, s)
    H = (log_C + fr_ln(spec.c3, s) - ln_fraction(inner, s)) / spec.c4
    out.H_value = H
    out.H_new = math.ceil(H.upper())
    return out


def reduce_linear_form(spec: LinearFormSpec, y_param: Fraction = Fraction(3, 4)) -> tuple[ReductionOutcome, DistanceBound]:
    """Build the lattice, LLL-reduce it and apply the two lemmas."""
    L, y = build_dweger_lattice(spec)
    R = lll_reduce(L, y_param)
    gs = gram_schmidt(R)
    dist = distance_lower_bound(R, gs, y)
    return reduce_bound(spec, dist.c2, dist.c1_sq), dist
