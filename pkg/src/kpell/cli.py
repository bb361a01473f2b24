"""Command-line entry point: ``kpell <subcommand> [flags]``.

Exit codes: 0 when every assertion holds, 1 on an assertion violation,
2 on precision, resource or input failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields

from .errors import KPellError
from .solver import (
    PipelineConfig,
    RunReport,
    emit_report,
    load_config,
    run_theorem12_search,
    run_thm11_verification,
    run_tau1_sweep,
    tau2_report,
)

log = logging.getLogger("kpell")

# CLI flag -> PipelineConfig field
_FLAG_FIELDS = {
    "k_min": "k_min",
    "k_max": "k_max",
    "n_max": "n_max",
    "c_exp": "C_exponent",
    "guard": "precision_guard",
    "workers": "worker_count",
    "budget": "budget",
    "out": "output_path",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k-min", type=int)
    common.add_argument("--k-max", type=int)
    common.add_argument("--n-max", type=int)
    common.add_argument("--c-exp", type=int, help="C = 10**c_exp for the tau1 lattice")
    common.add_argument("--guard", type=int, help="extra digits carried beyond C")
    common.add_argument("--workers", type=int)
    common.add_argument("--budget", type=int, help="rho iterations per composite")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--config", help="flat key = value file; flags override it")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="kpell", description="k-generalized Pell numbers with 7-smooth values.")
    sub = p.add_subparsers(dest="cmd", required=True)
    sub.add_parser("pell", parents=[common], help="print P_1..P_n for each k")
    s = sub.add_parser("search", parents=[common], help="search for 7-smooth terms")
    s.add_argument("--checkpoint", help="resume file of finished k values")
    sub.add_parser("reduce-tau1", parents=[common], help="LLL bound on n for each k in range")
    sub.add_parser("reduce-tau2", parents=[common], help="three-round LLL chain for k > 2500")
    sub.add_parser("verify-thm11", parents=[common], help="check the largest prime factor bound")
    sub.add_parser("selftest", parents=[common], help="quick end-to-end sanity run")
    return p


def make_config(args: argparse.Namespace, defaults: dict | None = None) -> PipelineConfig:
    values: dict = dict(defaults or {})
    if args.config:
        known = {f.name: f.type for f in fields(PipelineConfig)}
        for key, raw in load_config(args.config).items():
            name = _FLAG_FIELDS.get(key, key)
            if name not in known:
                raise KPellError(f"unknown config key {key!r}")
            values[name] = raw if name == "output_path" else int(raw)
    for flag, name in _FLAG_FIELDS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[name] = v
    return PipelineConfig(**values)


def _pell_report(cfg: PipelineConfig) -> RunReport:
    from .pell import pell_stream

    rep = RunReport("pell", {"k_min": cfg.k_min, "k_max": cfg.k_max, "n_max": cfg.n_max})
    for k in cfg.k_range:
        for t in pell_stream(k, cfg.n_max):
            rep.records.append({"k": k, "n": t.n, "value": t.value})
    return rep


def _selftest(cfg: PipelineConfig) -> RunReport:
    from .pell import dominant_root, pell_number, root_interval_holds
    from .solver import run_tau1_reduction

    rep = RunReport("selftest", {})
    checks = {
        "P_13^(4) = 69156": pell_number(4, 13) == 69156,
        "root bounds k=2..30": all(root_interval_holds(dominant_root(k, 40)) for k in range(2, 31)),
        "search k<=5 n<=12": run_theorem12_search(PipelineConfig(k_min=2, k_max=5, n_max=12)).verdict,
        "tau1 k=3 bound <= 1500": (run_tau1_reduction(3, PipelineConfig()).H_new or 10**9) <= 1500,
    }
    rep.records = [{"check": name, "ok": ok} for name, ok in checks.items()]
    rep.verdict = all(checks.values())
    return rep


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.cmd == "pell":
            cfg = make_config(args, {"k_max": 10, "n_max": 13})
            rep = _pell_report(cfg)
        elif args.cmd == "search":
            cfg = make_config(args)
            rep = run_theorem12_search(cfg, args.checkpoint)
        elif args.cmd == "reduce-tau1":
            cfg = make_config(args, {"k_max": 10})
            rep = run_tau1_sweep(cfg)
        elif args.cmd == "reduce-tau2":
            cfg = make_config(args)
            rep = tau2_report(cfg)
        elif args.cmd == "verify-thm11":
            cfg = make_config(args, {"k_max": 30, "n_max": 500})
            rep = run_thm11_verification(cfg)
        else:
            cfg = make_config(args)
            rep = _selftest(cfg)
        text = emit_report(rep, args.format, cfg.output_path)
        if cfg.output_path is None:
            sys.stdout.write(text)
        log.info("%s finished in %.2f s", rep.stage, rep.timing)
    except KPellError as exc:
        print(f"kpell: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"kpell: {exc}", file=sys.stderr)
        return 2
    return 0 if rep.verdict else 1


if __name__ == "__main__":
    sys.exit(main())
