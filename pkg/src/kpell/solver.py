"""Pipeline orchestration: the smooth-term search, both LLL reductions and the
desk-scale check of the largest-prime-factor lower bound.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from .bigfix import FixedReal, fr_ln, fr_sqrt, golden_ratio, ln_int
from .errors import KPellError, ParameterError
from .lattice import LinearFormSpec, ReductionOutcome, reduce_linear_form
from .linforms import lemma41a_bound, lemma41b_bounds, thm11_check
from .pell import dominant_root, pell_number, pell_stream
from .smooth import DEFAULT_TRIAL_BOUND, largest_prime_factor, search_smooth_terms, seven_smooth_decompose

# (k, n, P_n^(k)) for every 7-smooth term with n >= 4
KNOWN_SOLUTIONS = frozenset({(2, 4, 12), (2, 6, 70), (3, 6, 84), (5, 10, 4116)})
CASE_SPLIT_K = 2500
TAU2_ROUNDS = ((1, 1356), (13, 326), (1, 300))  # C = mult * 10**exp


@dataclass
class PipelineConfig:
    k_min: int = 2
    k_max: int = 100
    n_max: int = 300
    C_exponent: int = 299
    precision_guard: int = 30
    worker_count: int = 1
    budget: int = 2000
    output_path: str | None = None
    case_split: int = CASE_SPLIT_K
    max_retries: int = 3

    def __post_init__(self) -> None:
        if self.k_min < 2:
            raise ParameterError("k_min must be >= 2")
        if self.C_exponent < 1 or self.precision_guard < 5:
            raise ParameterError("C_exponent >= 1 and precision_guard >= 5 required")
        if self.worker_count < 1 or self.budget < 0 or self.max_retries < 0:
            raise ParameterError("worker_count >= 1, budget >= 0, max_retries >= 0 required")

    @property
    def k_range(self) -> range:
        return range(self.k_min, self.k_max + 1)


@dataclass
class RunReport:
    stage: str
    inputs: dict[str, Any]
    outputs: dict[str, Any] = field(default_factory=dict)
    records: list[dict[str, Any]] = field(default_factory=list)
    precision: dict[str, Any] = field(default_factory=dict)
    verdict: bool = True
    # wall-clock seconds; kept out of serialized reports so they stay byte-stable
    timing: float = 0.0


def load_config(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` file; keys may use the CLI spelling (k-min) or k_min."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


# -- smooth-term search ------------------------------------------------------------


def _search_one_k(args: tuple[int, int]) -> tuple[int, list[int]]:
    k, n_max = args
    return k, [h.n for h in search_smooth_terms([k], range(4, n_max + 1))]


def _map(fn, items: list, workers: int) -> Iterable:
    if workers <= 1 or len(items) <= 1:
        return map(fn, items)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _read_checkpoint(path: Path) -> dict[int, list[int]]:
    done: dict[int, list[int]] = {}
    if path.exists():
        for line in path.read_text().splitlines():
            parts = line.split()
            if parts:
                done[int(parts[0])] = [int(p) for p in parts[1:]]
    return done


def run_theorem12_search(cfg: PipelineConfig, checkpoint: str | Path | None = None) -> RunReport:
    """Sweep k in [k_min, k_max], n in [4, n_max] for 7-smooth terms.

    With a checkpoint file each finished k is appended as ``k n1 n2 ...`` (the
    hit indices), and a restart skips the k values already listed.
    """
    t0 = time.perf_counter()
    report = RunReport("search", {"k_min": cfg.k_min, "k_max": cfg.k_max, "n_min": 4, "n_max": cfg.n_max})
    ks = list(cfg.k_range) if cfg.n_max >= 4 else []
    ckpt = Path(checkpoint) if checkpoint else None
    found = _read_checkpoint(ckpt) if ckpt else {}
    found = {k: v for k, v in found.items() if k in set(ks)}
    todo = [(k, cfg.n_max) for k in ks if k not in found]
    fh = ckpt.open("a") if ckpt else None
    try:
        for k, ns in _map(_search_one_k, todo, cfg.worker_count):
            found[k] = ns
            if fh:
                fh.write(" ".join(str(x) for x in [k, *ns]) + "\n")
                fh.flush()
    finally:
        if fh:
            fh.close()
    hits = set()
    for k in sorted(found):
        for n in found[k]:
            value = pell_number(k, n)
            hits.add((k, n, value))
    for k, n, value in sorted(hits):
        a, b, c, d = seven_smooth_decompose(value).exponents
        report.records.append({"k": k, "n": n, "value": value, "a": a, "b": b, "c": c, "d": d})
    expected = {
        s for s in KNOWN_SOLUTIONS if cfg.k_min <= s[0] <= cfg.k_max and 4 <= s[1] <= cfg.n_max
    }
    report.outputs = {"hits": len(hits), "expected": len(expected)}
    report.verdict = hits == expected
    report.timing = time.perf_counter() - t0
    return report


# -- tau_1: the case k <= 2500 ----------------------------------------------------


def _escalated_exponent(spec: LinearFormSpec, outcome: ReductionOutcome) -> int:
    """Smallest C exponent that plausibly clears c2^2 >= T^2 + S.

    c2 grows roughly like C^(1/dim), so the shortfall factor is raised to the
    dimension; a factor 2 margin avoids landing right on the boundary.
    """
    need = fr_sqrt(FixedReal.from_fraction(outcome.T * outcome.T + outcome.S, 0), 2).upper()
    have = max(outcome.c2.lower(), Fraction(1))
    gap = math.log10(2 * need) - math.log10(have)
    return spec.C_exp + max(1, math.ceil(spec.dim * gap))


def tau1_spec(k: int, n_bound: int, C_exp: int, guard: int = 30) -> LinearFormSpec:
    """|-log f_k(alpha) + a log2 + b log3 + c log5 + d log7 - n log(alpha)| < 4/alpha^n.

    The coefficient of log f_k(alpha) is exactly 1, so it goes in eta0 and the
    lattice is five-dimensional.  This matters: f_2(alpha) = sqrt(2)/4 makes the
    six logarithms dependent for k = 2, and for large k alpha and f_k(alpha)
    agree with phi^2 and 1/(sqrt5 phi) to ~0.4k digits, which a homogeneous
    six-term lattice at C = 10^299 cannot tell apart from a relation.

    For k = 2 the relation is exact, log f_2(alpha) = -(3/2) log 2, and the
    doubled homogeneous form (2a - 3) log2 + 2b log3 + 2c log5 + 2d log7
    - 2n log(alpha), bounded by 8/alpha^n, is used.
    """
    s = C_exp + guard
    root = dominant_root(k, s + 5)
    xp = math.ceil(Fraction(14, 10) * n_bound)
    etas = tuple(ln_int(p, s) for p in (2, 3, 5, 7)) + (fr_ln(root.alpha, s),)
    c4 = fr_ln(root.alpha, guard)
    if k == 2:
        X = (2 * xp + 3, 2 * xp, 2 * xp, 2 * xp, 2 * n_bound)
        return LinearFormSpec(etas, X, FixedReal.from_int(8), c4, C_exp)
    eta0 = -fr_ln(root.fk_alpha, s)
    return LinearFormSpec(etas, (xp, xp, xp, xp, n_bound), FixedReal.from_int(4), c4, C_exp, eta0=eta0)


def tau1_naive_spec(k: int, n_bound: int, C_exp: int, guard: int = 30) -> LinearFormSpec:
    """The homogeneous six-term lattice as printed (zero row dropped)."""
    s = C_exp + guard
    root = dominant_root(k, s + 5)
    xp = math.ceil(Fraction(14, 10) * n_bound)
    etas = tuple(ln_int(p, s) for p in (2, 3, 5, 7)) + (fr_ln(root.alpha, s), fr_ln(root.fk_alpha, s))
    c4 = fr_ln(root.alpha, guard)
    return LinearFormSpec(etas, (xp, xp, xp, xp, n_bound, 1), FixedReal.from_int(4), c4, C_exp)


def _reduce_with_escalation(build, C_exp: int, retries: int) -> tuple[ReductionOutcome, list[int]]:
    tried = []
    exp = C_exp
    for _ in range(retries + 1):
        spec = build(exp)
        tried.append(exp)
        outcome, _dist = reduce_linear_form(spec)
        if outcome.ok:
            break
        exp = _escalated_exponent(spec, outcome)
    outcome.notes["C_exponents_tried"] = " ".join(map(str, tried))
    return outcome, tried


def run_tau1_reduction(k: int, cfg: PipelineConfig) -> ReductionOutcome:
    """Bound n for one k <= case_split; H is the exponent n (c4 = log alpha)."""
    if not 2 <= k <= cfg.case_split:
        raise ParameterError(f"k must lie in [2, {cfg.case_split}]")
    n_bound = math.ceil(lemma41a_bound(k).upper())
    outcome, _ = _reduce_with_escalation(
        lambda e: tau1_spec(k, n_bound, e, cfg.precision_guard), cfg.C_exponent, cfg.max_retries
    )
    outcome.notes["k"] = str(k)
    outcome.notes["n_bound_in"] = str(n_bound)
    if outcome.ok:
        outcome.notes["n_max"] = str(math.floor(outcome.H_value.upper()))
    return outcome


def _tau1_worker(args: tuple[int, PipelineConfig]) -> ReductionOutcome:
    return run_tau1_reduction(*args)


def run_tau1_sweep(cfg: PipelineConfig, ks: Iterable[int] | None = None) -> RunReport:
    t0 = time.perf_counter()
    ks = sorted(ks if ks is not None else cfg.k_range)
    report = RunReport("reduce-tau1", {"k": ks if len(ks) <= 20 else f"{ks[0]}..{ks[-1]}", "C_exponent": cfg.C_exponent})
    outcomes = list(_map(_tau1_worker, [(k, cfg) for k in ks], cfg.worker_count))
    for o in outcomes:
        report.records.append(outcome_record(o))
    good = [o for o in outcomes if o.ok]
    report.verdict = len(good) == len(outcomes)
    if good:
        report.outputs["n_max"] = max(int(o.notes["n_max"]) for o in good)
    report.precision = {"guard": cfg.precision_guard}
    report.timing = time.perf_counter() - t0
    return report


# -- tau_2: the case k > 2500 -----------------------------------------------------


def tau2_spec(n_bound: int, C_exp: int, C_mult: int = 1, guard: int = 30) -> LinearFormSpec:
    """2 tau_2 = 2a log2 + 2b log3 + (2c+1) log5 + 2d log7 + (2 - 4n) log(phi).

    10/(5 - sqrt5) = sqrt(5) phi, so the printed six-term form has a relation
    among its logarithms; doubling gives a five-term form with independent
    logarithms and |2 tau_2| < 132 / phi^min(2n, k/2).
    """
    s = C_exp + len(str(C_mult)) + guard
    etas = tuple(ln_int(p, s) for p in (2, 3, 5, 7)) + (fr_ln(golden_ratio(s + 5), s),)
    xp = math.ceil(Fraction(14, 10) * n_bound)
    X = (2 * xp, 2 * xp, 2 * xp + 1, 2 * xp, 4 * n_bound)
    c4 = fr_ln(golden_ratio(guard + 5), guard)
    return LinearFormSpec(etas, X, FixedReal.from_int(132), c4, C_exp, C_mult)


def tau2_naive_spec(n_bound: int, C_exp: int, C_mult: int = 1, guard: int = 30) -> LinearFormSpec:
    """The six-term form exactly as printed (its logarithms are dependent)."""
    s = C_exp + len(str(C_mult)) + guard
    r5 = fr_sqrt(FixedReal.from_int(5), s + 5)
    eta5 = fr_ln(FixedReal.from_int(10, s + 5) / (5 - r5), s)
    etas = tuple(ln_int(p, s) for p in (2, 3, 5, 7)) + (eta5, fr_ln(golden_ratio(s + 5), s))
    xp = math.ceil(Fraction(14, 10) * n_bound)
    c4 = fr_ln(golden_ratio(guard + 5), guard)
    return LinearFormSpec(etas, (xp, xp, xp, xp, 1, 2 * n_bound), FixedReal.from_int(66), c4, C_exp, C_mult)


def run_tau2_chain(cfg: PipelineConfig, rounds=TAU2_ROUNDS) -> list[ReductionOutcome]:
    """Three reductions; after each, k <= 2H and n < lemma41a_bound(k) feed the next."""
    _, n0 = lemma41b_bounds()
    n_bound = math.ceil(n0.upper())
    out = []
    for mult, exp in rounds:
        def build(e: int, nb=n_bound, m=mult, e0=exp) -> LinearFormSpec:
            # an escalated exponent drops the multiplier
            return tau2_spec(nb, e, m if e == e0 else 1, cfg.precision_guard)

        outcome, _ = _reduce_with_escalation(build, exp, cfg.max_retries)
        outcome.notes["n_bound_in"] = str(n_bound)
        out.append(outcome)
        if not outcome.ok:
            break
        k_bound = math.floor(2 * outcome.H_value.upper())
        outcome.notes["k_max"] = str(k_bound)
        n_bound = math.ceil(lemma41a_bound(k_bound).upper())
        outcome.notes["n_bound_out"] = str(n_bound)
    return out


def tau2_report(cfg: PipelineConfig) -> RunReport:
    t0 = time.perf_counter()
    outcomes = run_tau2_chain(cfg)
    report = RunReport("reduce-tau2", {"rounds": [f"{m}e{e}" for m, e in TAU2_ROUNDS]})
    report.records = [outcome_record(o) for o in outcomes]
    last = outcomes[-1]
    report.verdict = len(outcomes) == len(TAU2_ROUNDS) and last.ok and int(last.notes["k_max"]) <= cfg.case_split
    report.outputs["k_max"] = last.notes.get("k_max")
    report.precision = {"guard": cfg.precision_guard}
    report.timing = time.perf_counter() - t0
    return report


# -- prime-factor bound at desk scale -----------------------------------------------------


def run_thm11_verification(cfg: PipelineConfig) -> RunReport:
    """Check the largest-prime-factor lower bound on the configured grid.

    A factorization cut short by the budget still yields a certified lower
    bound on the largest prime factor, which is all the check needs.
    """
    if cfg.n_max < 4:
        raise ParameterError("the bound is stated for n >= 4")
    t0 = time.perf_counter()
    report = RunReport("verify-thm11", {"k_min": cfg.k_min, "k_max": cfg.k_max, "n_max": cfg.n_max, "budget": cfg.budget})
    checked = violations = uncertain = 0
    for k in cfg.k_range:
        for term in pell_stream(k, cfg.n_max):
            if term.n < 4:
                continue
            pmax, exact = largest_prime_factor(term.value, cfg.budget, DEFAULT_TRIAL_BOUND)
            checked += 1
            uncertain += not exact
            if not thm11_check(k, term.n, pmax):
                violations += 1
                report.records.append({"k": k, "n": term.n, "pmax_lower": pmax})
    report.outputs = {"checked": checked, "violations": violations, "partial_factorizations": uncertain}
    report.verdict = violations == 0
    report.timing = time.perf_counter() - t0
    return report


# -- serialization ---------------------------------------------------------------


def outcome_record(o: ReductionOutcome) -> dict[str, Any]:
    mult, exp = o.spec_C
    rec: dict[str, Any] = {
        "C": f"{mult}e{exp}",
        "c2": o.c2.sci(6),
        "S": FixedReal.from_int(o.S).sci(6),
        "T": FixedReal.from_fraction(o.T, 1).sci(6),
        "status": "ok" if o.ok else "retry",
        "H": o.H_value.sci(8) if o.H_value is not None else "",
        "H_new": o.H_new if o.H_new is not None else "",
    }
    rec.update(o.notes)
    return rec


def _plain(x: Any) -> Any:
    if isinstance(x, bool) or x is None or isinstance(x, float):
        return x
    if isinstance(x, int):
        return x if abs(x) < 2**53 else str(x)
    if isinstance(x, (FixedReal, Fraction)):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x if isinstance(x, str) else str(x)


def render_report(report: RunReport, fmt: str = "json") -> str:
    if fmt == "json":
        doc = {
            "stage": report.stage,
            "inputs": report.inputs,
            "outputs": report.outputs,
            "precision": report.precision,
            "records": report.records,
            "verdict": "pass" if report.verdict else "fail",
        }
        return json.dumps(_plain(doc), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        rows = [_plain(r) for r in report.records]
        cols = sorted({c for r in rows for c in r})
        buf = io.StringIO()
        if cols:
            w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        return buf.getvalue()
    raise ParameterError(f"unknown format {fmt!r}")


def emit_report(report: RunReport, fmt: str = "json", path: str | Path | None = None) -> str:
    text = render_report(report, fmt)
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise KPellError(f"cannot write report to {path}: {exc}") from exc
    return text
