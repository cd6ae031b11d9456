"""Command-line front end.

Data goes to stdout (or --out) as JSONL or CSV with every integer
rendered as a decimal string; diagnostics go to stderr. Exit codes:
0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, TextIO

from .arith import DEFAULT_POLICY, EffortPolicy, FactorCache
from . import graph, modsearch
from .tuples import PairRecord

POLICY_ENV = "EMGRAPH_POLICY"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


@dataclass
class RunConfig:
    policy: EffortPolicy
    cache: Optional[FactorCache]
    out: TextIO
    fmt: str


def _default_policy() -> EffortPolicy:
    path = os.environ.get(POLICY_ENV)
    if not path:
        return DEFAULT_POLICY
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    return EffortPolicy(**{k: obj[k] for k in
                           ("trial_bound", "rho_iterations", "ecm_curves",
                            "ecm_b1", "time_budget") if k in obj})


def _add_policy_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trial-bound", type=int, default=None)
    p.add_argument("--rho-iterations", type=int, default=None)
    p.add_argument("--ecm-curves", type=int, default=None)
    p.add_argument("--ecm-b1", type=int, default=None)
    p.add_argument("--time-budget", type=float, default=None)


def _policy_from(args: argparse.Namespace) -> EffortPolicy:
    base = _default_policy()
    fields = {
        "trial_bound": args.trial_bound,
        "rho_iterations": args.rho_iterations,
        "ecm_curves": args.ecm_curves,
        "ecm_b1": args.ecm_b1,
        "time_budget": args.time_budget,
    }
    changes = {k: v for k, v in fields.items() if v is not None}
    if not changes:
        return base
    return EffortPolicy(**{**base.__dict__, **changes})


def _emit(out: TextIO, line: str) -> None:
    out.write(line + "\n")


def _record_csv_row(r: PairRecord, density: object = "") -> str:
    return ",".join([
        " ".join(str(v) for v in r.p.primes),
        " ".join(str(v) for v in r.q.primes),
        str(r.modulus),
        " ".join(str(rc.a) for rc in r.residues),
        r.kind,
        str(density),
    ])


TABLE_HEADER = "tuple,partner,modulus,residues,kind,inverse_density"


def export_tables(records: Sequence[PairRecord]) -> list[str]:
    """CSV rows for record groups, one row per record, grouped by modulus.

    Each group's inverse density (totient over distinct residue classes)
    is repeated on its rows.
    """
    lines = [TABLE_HEADER]
    by_modulus: dict[int, list[PairRecord]] = {}
    for r in records:
        by_modulus.setdefault(r.modulus, []).append(r)
    for m in sorted(by_modulus):
        group = by_modulus[m]
        density = modsearch.density_report(group).inverse_density
        if isinstance(density, Fraction):
            density = f"{density.numerator}/{density.denominator}"
        for r in group:
            lines.append(_record_csv_row(r, density))
    return lines


def _stream_records(records: Iterable[PairRecord], cfg: RunConfig) -> int:
    if cfg.fmt == "csv":
        # csv needs modulus grouping, so collect first
        lines = export_tables(list(records))
        for line in lines:
            _emit(cfg.out, line)
        return 0
    for r in records:
        _emit(cfg.out, r.to_json_line())
    return 0


def _cmd_search_pairs(args: argparse.Namespace, cfg: RunConfig) -> int:
    sc = modsearch.SearchConfig(
        lo=args.lo, hi=args.hi, min_k=args.min_k,
        coprime_to=args.coprime_to,
        irreducible_only=args.irreducible_only,
        worker_count=args.workers)
    return _stream_records(
        modsearch.search_range(sc, checkpoint=args.checkpoint), cfg)


def _cmd_expand(args: argparse.Namespace, cfg: RunConfig) -> int:
    summaries = graph.bfs_levels(args.root, args.max_level, cfg.policy,
                                 cfg.cache, checkpoint=args.checkpoint)
    if cfg.fmt == "csv":
        _emit(cfg.out, "level,nodes,composites")
        for s in summaries:
            _emit(cfg.out, f"{s.level},{s.node_count},{s.composite_count}")
    else:
        for s in summaries:
            _emit(cfg.out, json.dumps({
                "level": str(s.level), "nodes": str(s.node_count),
                "composites": str(s.composite_count)}, sort_keys=True,
                separators=(",", ":")))
    return 0


def _node_obj(nd: graph.Node) -> dict:
    return {"root": str(nd.root), "edges": [str(p) for p in nd.edge_primes],
            "level": str(nd.level), "value": str(nd.value)}


def _cmd_explore(args: argparse.Namespace, cfg: RunConfig) -> int:
    nodes = graph.bounded_explore([args.root], args.bound, args.max_level)
    if args.watch:
        w = graph.WatchList.load(args.watch)
        for nd, rc in graph.watch_hits(nodes, w):
            obj = _node_obj(nd)
            obj["hit_a"] = str(rc.a)
            obj["hit_m"] = str(rc.m)
            _emit(cfg.out, json.dumps(obj, sort_keys=True,
                                      separators=(",", ":")))
    else:
        for nd in nodes:
            _emit(cfg.out, json.dumps(_node_obj(nd), sort_keys=True,
                                      separators=(",", ":")))
    return 0


def _cmd_verify_theorem(args: argparse.Namespace, cfg: RunConfig) -> int:
    rep = graph.verify_double_paths()
    for line in rep.lines():
        _emit(cfg.out, line)
    _emit(cfg.out, "OK" if rep.ok else "FAILED")
    return 0 if rep.ok else 2


def _cmd_sequence(args: argparse.Namespace, cfg: RunConfig) -> int:
    terms = graph.euclid_mullin(args.start, args.steps, cfg.policy,
                                rule=args.rule, cache=cfg.cache)
    for t in terms:
        _emit(cfg.out, str(t))
    if len(terms) < args.steps:
        print(f"stopped after {len(terms)} terms: factoring effort "
              "exhausted", file=sys.stderr)
    return 0


def _cmd_chains(args: argparse.Namespace, cfg: RunConfig) -> int:
    nodes = graph.bounded_explore([args.root], args.bound, args.max_level)
    for nd in graph.unique_chain_scan(nodes, args.ell):
        _emit(cfg.out, json.dumps(_node_obj(nd), sort_keys=True,
                                  separators=(",", ":")))
    return 0


def _cmd_simulate(args: argparse.Namespace, cfg: RunConfig) -> int:
    st = graph.simulate_growth_model(args.k, args.trials, args.seed)
    _emit(cfg.out, json.dumps({
        "k_max": str(st.k_max), "trials": str(st.trials),
        "seed": str(st.seed),
        "ratios": [repr(r) for r in st.ratios],
        "mean": repr(st.mean), "stddev": repr(st.stddev),
    }, sort_keys=True, separators=(",", ":")))
    return 0


def _cmd_tables(args: argparse.Namespace, cfg: RunConfig) -> int:
    source = open(args.records, "r", encoding="utf-8") if args.records \
        else sys.stdin
    try:
        records = [PairRecord.from_json_line(line)
                   for line in source if line.strip()]
    finally:
        if args.records:
            source.close()
    for line in export_tables(records):
        _emit(cfg.out, line)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="emgraph", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache", default=None, help="factor cache file")
    common.add_argument("--out", default=None, help="output file (stdout)")
    common.add_argument("--format", choices=("jsonl", "csv"),
                        default="jsonl")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("search-pairs", parents=[common],
                       help="find equivalent tuple pairs by modulus range")
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--min-k", type=int, default=3)
    p.add_argument("--coprime-to", type=int, default=1)
    p.add_argument("--irreducible-only", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--checkpoint", default=None)
    p.set_defaults(func=_cmd_search_pairs)

    p = sub.add_parser("expand", parents=[common], help="level census from a root")
    p.add_argument("--root", type=int, default=1)
    p.add_argument("--max-level", type=int, required=True)
    p.add_argument("--checkpoint", default=None)
    _add_policy_flags(p)
    p.set_defaults(func=_cmd_expand)

    p = sub.add_parser("explore", parents=[common],
                       help="deep walk following only small-prime edges")
    p.add_argument("--root", type=int, default=1)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--max-level", type=int, required=True)
    p.add_argument("--watch", default=None,
                   help="JSONL residue classes to report hits against")
    p.set_defaults(func=_cmd_explore)

    p = sub.add_parser("verify-theorem", parents=[common],
                       help="check the two known double-path nodes")
    p.set_defaults(func=_cmd_verify_theorem)

    p = sub.add_parser("sequence", parents=[common], help="least/largest prime factor walk")
    p.add_argument("--rule", choices=("least", "largest"), default="least")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--start", type=int, default=1)
    _add_policy_flags(p)
    p.set_defaults(func=_cmd_sequence)

    p = sub.add_parser("chains", parents=[common],
                       help="nodes followed by unique-child runs")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--root", type=int, default=1)
    p.add_argument("--bound", type=int, default=1 << 16)
    p.add_argument("--max-level", type=int, default=10)
    p.set_defaults(func=_cmd_chains)

    p = sub.add_parser("simulate", parents=[common], help="growth model statistics")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("tables", parents=[common], help="render records as grouped CSV")
    p.add_argument("--records", default=None,
                   help="JSONL input file (default stdin)")
    p.set_defaults(func=_cmd_tables)
    return parser


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = sys.stdout
    opened = None
    try:
        if args.out:
            opened = out = open(args.out, "w", encoding="utf-8")
        cfg = RunConfig(
            policy=_policy_from(args) if hasattr(args, "trial_bound")
            else _default_policy(),
            cache=FactorCache(args.cache) if args.cache else None,
            out=out,
            fmt=args.format)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        if opened is not None:
            opened.close()


def main() -> None:
    sys.exit(run(sys.argv[1:]))
