"""Command-line front door.

Single binary with subcommands; every run is reproducible from its config
and seed, both of which are embedded (with a sha256 config hash) in JSON
reports.  Exit codes: 0 success, 1 verification failure, 2 config error.
"""

from __future__ import annotations

import argparse
import csv
import io as std_io
import json
import os
import sys
from typing import List, Optional

import numpy as np

from . import io as codecs
from .analysis import matching_paradox_demo
from .expansion import ExpansionError, ExpansionParams
from .graphs import FiniteGraph, GraphError, make_complete_bipartite
from .sampler import SamplerError, TreeStatsRow, tree_stats
from .tower import (
    ALL,
    DEFAULT_LIMIT,
    LevelSpec,
    Schedule,
    SubsetRule,
    Tower,
    TowerError,
    v0_fraction,
)
from .verification import run_expansion_checks, run_tower_checks


class ConfigError(ValueError):
    pass


def _default_limit() -> int:
    env = os.environ.get("TREELAB_LIMIT")
    if env is None:
        return DEFAULT_LIMIT
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"TREELAB_LIMIT must be an integer, got {env!r}")


def _subset_rule(arg: str, seed: int) -> SubsetRule:
    if arg == "all":
        return ALL
    try:
        size = int(arg)
    except ValueError:
        raise ConfigError(f"--subset must be an integer size or 'all', got {arg!r}")
    return SubsetRule("random", size=size, seed=seed)


def _schedule(args) -> Schedule:
    if args.schedule == "paper":
        return Schedule.paper()
    rule = _subset_rule(args.subset, args.seed)
    steps = max(0, args.levels - 1)
    return Schedule.desk([LevelSpec(args.N, rule)] * steps)


def _tower(args) -> Tower:
    return Tower(args.d, _schedule(args), args.levels, limit=args.limit)


def _config_dict(args, keys: List[str]) -> dict:
    return {k: getattr(args, k) for k in keys}


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_report(args, config: dict, payload: dict) -> None:
    payload = dict(payload)
    payload["config"] = config
    payload["config_hash"] = codecs.config_hash(config)
    payload["seed"] = config.get("seed")
    _emit(args, codecs.dumps(payload) + "\n")


def cmd_params(args) -> int:
    tower = _tower(args)
    lines = [f"d={tower.d} schedule={tower.schedule.mode} depth={tower.depth}"]
    for lvl in tower.levels:
        row = (
            f"level {lvl.n}: kind={lvl.kind} "
            f"size={lvl.size.describe()} edges={lvl.edge_count.describe()}"
        )
        if lvl.N is not None:
            row += f" N={lvl.N.describe()} K={lvl.K.describe()}"
        if lvl.counts is not None:
            row += f" fiber={lvl.counts.fiber_size} v0={lvl.counts.v0_count}"
        lines.append(row)
        if lvl.n >= 2:
            frac = v0_fraction(tower, lvl.n - 1)
            tag = "=" if frac.exact else "<="
            lines.append(
                f"  v0 fraction {tag} {frac.value} "
                f"({'below' if frac.below_threshold else 'NOT below'} "
                f"2^-{lvl.n - 1})"
            )
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_build(args) -> int:
    tower = _tower(args)
    report = tower.report()
    for lvl in tower.levels:
        if lvl.kind == "explicit":
            g = tower.graph(lvl.n)
            report["levels"][lvl.n - 1]["materialized"] = {
                "vertices": g.vertex_count,
                "edges": g.edge_count,
            }
    config = _config_dict(
        args, ["d", "N", "subset", "levels", "schedule", "seed", "limit"]
    )
    _emit_report(args, config, report)
    return 0


def _drop_edge(graph: FiniteGraph, k: int) -> FiniteGraph:
    if not 0 <= k < graph.edge_count:
        raise ConfigError(f"edge index {k} out of range")
    keep = np.ones(graph.edge_count, dtype=bool)
    keep[k] = False
    return FiniteGraph(graph.vertex_count, graph.edges[keep], graph.bipartition)


def cmd_verify(args) -> int:
    tower = _tower(args)
    if args.mutate_drop_edge is not None:
        # harness self-test: corrupt the top explicit level and re-check
        mat = tower.materialized(args.levels)
        checks = run_expansion_checks(
            mat, graph=_drop_edge(mat.graph, args.mutate_drop_edge)
        )
    else:
        checks = run_tower_checks(tower)
    ok = all(c.ok for c in checks)
    config = _config_dict(
        args, ["d", "N", "subset", "levels", "schedule", "seed", "limit"]
    )
    _emit_report(args, config, {
        "ok": ok,
        "checks": [c.as_json() for c in checks],
    })
    return 0 if ok else 1


def cmd_sample(args) -> int:
    tower = _tower(args)
    rows = [
        tree_stats(tower, n, args.radius, args.samples, args.seed)
        for n in range(1, args.levels + 1)
    ]
    buf = std_io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TreeStatsRow.CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_values())
    _emit(args, buf.getvalue())
    return 0


def cmd_demo(args) -> int:
    base = make_complete_bipartite(args.d)
    rule = _subset_rule(args.subset, args.seed)
    params = ExpansionParams(
        base, d=args.d, N=args.N, subset=rule.resolve(base.edge_count)
    )
    report = matching_paradox_demo(params, args.seed, args.limit)
    config = _config_dict(args, ["d", "N", "subset", "seed", "limit"])
    _emit_report(args, config, report)
    return 0


def cmd_export(args) -> int:
    tower = _tower(args)
    graph = tower.graph(args.levels)
    _emit(args, codecs.dumps(codecs.graph_to_json(graph)) + "\n")
    return 0


def cmd_report(args) -> int:
    tower = _tower(args)
    config = _config_dict(
        args, ["d", "N", "subset", "levels", "schedule", "seed", "limit"]
    )
    _emit_report(args, config, tower.report())
    return 0


def _add_common(p: argparse.ArgumentParser, tower_flags: bool = True) -> None:
    p.add_argument("--d", type=int, default=2, help="regularity degree")
    p.add_argument("--N", type=int, default=3, help="profile range size")
    p.add_argument("--subset", default="all",
                   help="orientation subset: integer size or 'all'")
    p.add_argument("--seed", type=int, default=0, help="64-bit seed")
    p.add_argument("--limit", type=int, default=None,
                   help="materialization cap in vertices")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=["json", "csv"], default=None,
                   help="output format (fixed per subcommand)")
    if tower_flags:
        p.add_argument("--levels", type=int, default=2, help="tower depth")
        p.add_argument("--schedule", choices=["paper", "desk"], default="desk")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treelab",
        description="expansion towers, circulations and matchings, exactly",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="print exact or symbolic level sizes")
    _add_common(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("build", help="materialize explicit levels")
    _add_common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run the structural check suite")
    _add_common(p)
    p.add_argument("--mutate-drop-edge", type=int, default=None,
                   help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="ball statistics CSV over seeded samples")
    _add_common(p)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("demo", help="matching-paradox pipeline on one expansion")
    _add_common(p, tower_flags=False)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("export", help="graph JSON of a materialized level")
    _add_common(p)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("report", help="tower report JSON")
    _add_common(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.limit is None:
            args.limit = _default_limit()
        return args.func(args)
    except (ConfigError, TowerError, ExpansionError, GraphError, SamplerError,
            codecs.CodecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
