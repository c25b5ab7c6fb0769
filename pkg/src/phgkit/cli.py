"""Batch front-end.

Subcommands: check, extract, extend, roundtrip, heisenberg, accept.
Exit codes: 0 pass, 2 check failure, 1 usage or configuration error.
Reports are JSON (decay tables also CSV), written atomically, with seeds
recorded; identical config and corpus give byte-identical files.  The
environment variable GSL_THREADS caps the worker count when several corpus
entries run concurrently.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from phgkit.config import RunConfig
from phgkit.corpus import (EXPANSION_ENTRIES, SYMBOL_ENTRIES, load_entry,
                           load_expansion, standard_grid, verify_entry)
from phgkit.grading import InvalidParameterError, Weights
from phgkit.heisenberg.model import HeisenbergModel
from phgkit.heisenberg import verify as hverify
from phgkit.reports import decay_csv_rows, write_csv, write_json

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_FAIL = 2

_DEFAULT_MODEL = HeisenbergModel(d=2, B=((0.0, -1.0), (1.0, 0.0)))


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("GSL_THREADS", "1")))
    except ValueError:
        return 1


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_json(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg = RunConfig(**{**cfg.payload_flat(), "seed": args.seed})
    if args.out:
        cfg = RunConfig(**{**cfg.payload_flat(), "out_dir": args.out})
    os.makedirs(cfg.out_dir, exist_ok=True)
    return cfg


def _emit(cfg: RunConfig, name: str, payload: dict, decay=None) -> None:
    cfg_payload = cfg.payload()
    cfg_payload.pop("out_dir", None)   # not part of the scientific inputs
    payload = {"config": cfg_payload, **payload}
    write_json(payload, os.path.join(cfg.out_dir, name + ".json"))
    if decay is not None:
        write_csv(decay_csv_rows(decay),
                  ["alpha", "beta", "shell_radius", "sup_value", "constant", "slope"],
                  os.path.join(cfg.out_dir, name + ".csv"))


def cmd_check(args) -> int:
    cfg = _load_config(args)
    entries = dict(SYMBOL_ENTRIES)
    if args.entry and os.path.exists(args.entry):
        from phgkit.corpus import entry_from_file
        try:
            loaded = entry_from_file(args.entry)
        except InvalidParameterError as err:
            print(str(err), file=sys.stderr)
            return EXIT_USAGE
        entries[loaded.name] = loaded
        args = argparse.Namespace(**{**vars(args), "entry": loaded.name})
    if args.entry:
        if args.entry not in entries:
            print(f"unknown corpus entry {args.entry!r}", file=sys.stderr)
            return EXIT_USAGE
        names = [args.entry]
    else:
        names = sorted(cfg.corpus) if cfg.corpus else sorted(entries)
        bad = [n for n in names if n not in entries]
        if bad:
            print(f"unknown corpus entries {bad}", file=sys.stderr)
            return EXIT_USAGE
    if not names:
        print("no corpus entries selected", file=sys.stderr)
        return EXIT_USAGE

    def one(name: str):
        entry = entries[name]
        passed, rep = verify_entry(entry, cfg)
        payload = {"certifies": f"declared class {entry.declared_class}",
                   "entry": name, "declared_class": entry.declared_class,
                   "order": entry.order, "passed": passed,
                   "report": rep.payload()}
        from phgkit.reports import DecayReport
        decay = rep if isinstance(rep, DecayReport) else None
        _emit(cfg, f"check_{name}", payload, decay=decay)
        return name, passed

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        results = dict(pool.map(one, names))
    for name in names:
        print(f"{'PASS' if results[name] else 'FAIL'} {name}")
    if args.entry:
        return EXIT_PASS if results[args.entry] else EXIT_FAIL
    expected = {n: "negative control" not in entries[n].note for n in names}
    matched = all(results[n] == expected[n] for n in names)
    return EXIT_PASS if matched else EXIT_FAIL


def _extension_entry(name: str, cfg: RunConfig):
    from phgkit.symbols.checks import Certificate, hs_check
    entry = SYMBOL_ENTRIES[name]
    if not entry.has_t or entry.declared_class != "hs":
        raise InvalidParameterError(
            f"entry {name!r} is not an extension (class hs with a t slot)")
    sym = load_entry(entry)
    w = Weights(entry.rho)
    gext = standard_grid(entry.rho, cfg, extended=True, n_x=entry.n_x)
    tols = cfg.tolerances
    rep = hs_check(sym, entry.order, w.extended(), gext, k_max=tols.k_max,
                   deriv_max=tols.deriv_max, slope_tolerance=tols.slope_tolerance)
    cert = Certificate("hs", entry.order, rep.passed, detail=rep)
    return sym, w, entry.order, cert, gext


def cmd_extract(args) -> int:
    cfg = _load_config(args)
    from phgkit.phg.expansion import extract_expansion
    from phgkit.symbols.dsl import to_dsl
    try:
        sym, w, m, cert, gext = _extension_entry(args.entry, cfg)
        expn = extract_expansion(sym, m, args.terms, w, cert, grid=gext,
                                 t_switch=cfg.tolerances.t_switch)
    except (InvalidParameterError, KeyError) as err:
        print(str(err), file=sys.stderr)
        return EXIT_USAGE
    payload = {
        "certifies": "expansion extraction", "entry": args.entry, "m": m,
        "rho": list(w.rho),
        "terms": [{"order": t.order, "certificate": t.certificate.kind,
                   "dsl": to_dsl(t.symbol.expr)} for t in expn.terms],
        "remainder_dsl": to_dsl(expn.remainder.expr),
    }
    _emit(cfg, f"extract_{args.entry}", payload)
    print(f"extracted {len(expn.terms)} terms from {args.entry}")
    return EXIT_PASS


def cmd_extend(args) -> int:
    cfg = _load_config(args)
    from phgkit.phg.extension import build_extension, epsilon_schedule
    from phgkit.symbols.checks import hs_check
    from phgkit.symbols.dsl import to_dsl
    if os.path.exists(args.entry):
        from phgkit.corpus import expansion_from_file
        try:
            spec = expansion_from_file(args.entry)
        except InvalidParameterError as err:
            print(str(err), file=sys.stderr)
            return EXIT_USAGE
        args = argparse.Namespace(**{**vars(args), "entry": spec.name})
    elif args.entry in EXPANSION_ENTRIES:
        spec = EXPANSION_ENTRIES[args.entry]
    else:
        print(f"unknown expansion entry {args.entry!r}", file=sys.stderr)
        return EXIT_USAGE
    expn = load_expansion(spec)
    w = Weights(spec.rho)
    grid = standard_grid(spec.rho, cfg, n_x=spec.n_x)
    gext = standard_grid(spec.rho, cfg, extended=True, n_x=spec.n_x)
    sched = epsilon_schedule(expn, w, grid)
    built = build_extension(expn, expn.m, sched, w)
    tols = cfg.tolerances
    rep = hs_check(built.b, expn.m, w.extended(), gext, k_max=tols.k_max,
                   deriv_max=tols.deriv_max, slope_tolerance=tols.slope_tolerance)
    write_json({"config": cfg.payload(), **sched.payload()},
               os.path.join(cfg.out_dir, f"schedule_{args.entry}.json"))
    payload = {"certifies": "extension build", "entry": args.entry,
               "m": expn.m, "rho": list(w.rho), "hs_passed": rep.passed,
               "b_dsl": to_dsl(built.b.expr),
               "j_max_at_2e10_t1": built.j_max(2.0 ** 10, 1.0)}
    first_decay = next(iter(rep.per_s.values()))
    _emit(cfg, f"extend_{args.entry}", payload, decay=first_decay)
    print(f"{'PASS' if rep.passed else 'FAIL'} extension for {args.entry}")
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_roundtrip(args) -> int:
    cfg = _load_config(args)
    from phgkit.phg.roundtrip import roundtrip_expansion, roundtrip_extension
    tols = cfg.tolerances
    try:
        if args.entry in EXPANSION_ENTRIES:
            spec = EXPANSION_ENTRIES[args.entry]
            expn = load_expansion(spec)
            w = Weights(spec.rho)
            rep = roundtrip_expansion(
                expn, w, standard_grid(spec.rho, cfg, n_x=spec.n_x),
                standard_grid(spec.rho, cfg, extended=True, n_x=spec.n_x),
                k_max=tols.k_max, deriv_max=tols.deriv_max,
                slope_tolerance=tols.slope_tolerance, t_switch=tols.t_switch)
        else:
            sym, w, m, cert, gext = _extension_entry(args.entry, cfg)
            entry = SYMBOL_ENTRIES[args.entry]
            rep = roundtrip_extension(
                sym, m, w, standard_grid(entry.rho, cfg, n_x=entry.n_x), gext,
                N=args.terms, k_max=tols.k_max, deriv_max=tols.deriv_max,
                slope_tolerance=tols.slope_tolerance, t_switch=tols.t_switch)
    except (InvalidParameterError, KeyError) as err:
        print(str(err), file=sys.stderr)
        return EXIT_USAGE
    _emit(cfg, f"roundtrip_{args.entry}", rep)
    print(f"{'PASS' if rep['passed'] else 'FAIL'} roundtrip for {args.entry}")
    return EXIT_PASS if rep["passed"] else EXIT_FAIL


_HEIS_TOLS = {
    "algebra": (("associativity_residual", 1e-12), ("automorphism_residual", 1e-12),
                ("left_invariance_residual", 1e-6), ("commutator_residual", 1e-8)),
    "chart": (("flow_consistency_residual", 1e-8), ("zoom_chart_residual", 1e-12),
              ("zoom_action_law_residual", 1e-12)),
    "prop116": (("prop116_residual", 1e-12),),
    "thm108": (("thm108_linf", 1e-6),),
    "prop123": (("prop123_linf", 1e-6),),
}


def cmd_heisenberg(args) -> int:
    cfg = _load_config(args)
    try:
        if args.model:
            with open(args.model) as fh:
                model = HeisenbergModel.from_config(fh.read())
        else:
            model = _DEFAULT_MODEL
    except (OSError, InvalidParameterError, KeyError, ValueError) as err:
        print(f"model configuration error: {err}", file=sys.stderr)
        return EXIT_USAGE
    runners = {
        "algebra": lambda: hverify.algebra_check(model, seed=cfg.seed),
        "chart": lambda: hverify.chart_check(model, seed=cfg.seed),
        "prop116": lambda: hverify.transpose_check(model, seed=cfg.seed),
        "thm108": lambda: hverify.kernel_diagram_check(model),
        "prop123": lambda: hverify.zoom_check(model),
    }
    rep = runners[args.check]()
    rep["seed"] = cfg.seed
    rep["model"] = model.to_config()
    failures = {k: v for k, tol in _HEIS_TOLS[args.check]
                for k, v in [(k, rep.get(k, float("inf")))] if v > tol}
    rep["passed"] = not failures
    _emit(cfg, f"heisenberg_{args.check}", rep)
    print(f"{'PASS' if rep['passed'] else 'FAIL'} heisenberg {args.check}"
          + (f" (over tolerance: {failures})" if failures else ""))
    return EXIT_PASS if rep["passed"] else EXIT_FAIL


def cmd_accept(args) -> int:
    cfg = _load_config(args)
    from phgkit.acceptance import CRITERIA, run_criterion
    if args.criterion and args.criterion not in CRITERIA:
        print(f"unknown criterion {args.criterion!r}; choose from "
              f"{', '.join(sorted(CRITERIA))}", file=sys.stderr)
        return EXIT_USAGE
    names = [args.criterion] if args.criterion else list(CRITERIA)
    results = []
    for name in names:
        rep = run_criterion(name, cfg)
        results.append(rep)
        print(f"{'PASS' if rep['passed'] else 'FAIL'} {name} "
              f"({rep['elapsed_s']}s)")
    summary = {"certifies": "acceptance suite",
               "passed": all(r["passed"] for r in results),
               "criteria": {r["name"]: r for r in results}}
    _emit(cfg, "acceptance", summary)
    return EXIT_PASS if summary["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="phgkit",
                                  description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="report output directory")
        p.add_argument("--seed", type=int, help="override the sampling seed")

    p = sub.add_parser("check", help="verify a corpus entry's declared class")
    common(p)
    p.add_argument("--entry", help="corpus entry name (default: all)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("extract", help="extract the expansion of an extension")
    common(p)
    p.add_argument("--entry", required=True)
    p.add_argument("--terms", type=int, default=3)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("extend", help="build an extension from an expansion")
    common(p)
    p.add_argument("--entry", required=True)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("roundtrip", help="run a full equivalence direction")
    common(p)
    p.add_argument("--entry", required=True)
    p.add_argument("--terms", type=int, default=3)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("heisenberg", help="model checks")
    common(p)
    p.add_argument("check", choices=sorted(_HEIS_TOLS))
    p.add_argument("--model", help="JSON model file {d, B}")
    p.set_defaults(func=cmd_heisenberg)

    p = sub.add_parser("accept", help="run the acceptance suite")
    common(p)
    p.add_argument("--criterion", help="run a single criterion")
    p.set_defaults(func=cmd_accept)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    try:
        return args.func(args)
    except InvalidParameterError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
