"""Serialization codecs and deterministic report plumbing.

All JSON output is emitted with sorted keys and fixed separators, so
identical inputs serialize to identical bytes; config hashes are sha256
over that canonical form.
"""

from __future__ import annotations

import hashlib
import json
import re
from fractions import Fraction
from typing import Sequence, Tuple, Union

from .expansion import ExpandedVertex, ExpansionError, ExpansionParams, V0, V1
from .graphs import Circulation, FiniteGraph, GraphError
from .tower import ALL, LevelSpec, Schedule, SubsetRule, TowerError


class CodecError(ValueError):
    pass


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, no whitespace variance."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(obj) -> str:
    return hashlib.sha256(dumps(obj).encode("utf-8")).hexdigest()


# fractions


def fraction_to_str(x: Union[int, Fraction]) -> str:
    return str(Fraction(x))


def fraction_from_str(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise CodecError(f"not a rational: {s!r}") from exc


# graphs


def graph_to_json(graph: FiniteGraph) -> dict:
    out = {
        "vertex_count": graph.vertex_count,
        "edges": graph.edge_list(),
    }
    bip = graph.bipartition
    if bip is not None:
        out["bipartition"] = list(bip)
    return out


def graph_from_json(obj: dict) -> FiniteGraph:
    try:
        return FiniteGraph(
            obj["vertex_count"], obj["edges"], obj.get("bipartition")
        )
    except (KeyError, TypeError, GraphError) as exc:
        raise CodecError(f"bad graph JSON: {exc}") from exc


# circulations


def circulation_to_json(f: Circulation) -> list:
    return [fraction_to_str(v) for v in f.values]


def circulation_from_json(graph: FiniteGraph, arr: Sequence[str]) -> Circulation:
    if len(arr) != graph.edge_count:
        raise CodecError("need one rational per canonical edge")
    return Circulation(graph, [fraction_from_str(s) for s in arr])


# expanded vertices

_V1_RE = re.compile(r"^V1:(\d+):(\d+):\[([0-9,]*)\]$")
_V0_RE = re.compile(r"^V0:(\d+):\[([0-9,]*)\]:(\d+)$")


def _profile_str(profile: Tuple[int, ...]) -> str:
    return "[" + ",".join(str(p) for p in profile) + "]"


def _profile_parse(s: str) -> Tuple[int, ...]:
    if not s:
        return ()
    return tuple(int(p) for p in s.split(","))


def vertex_to_str(x: ExpandedVertex) -> str:
    if isinstance(x, V1):
        return f"V1:{x.slot}:{x.base}:{_profile_str(x.profile)}"
    if isinstance(x, V0):
        return f"V0:{x.base}:{_profile_str(x.profile)}:{x.pad_index}"
    raise CodecError(f"not an expanded vertex: {x!r}")


def vertex_from_str(s: str) -> ExpandedVertex:
    m = _V1_RE.match(s)
    if m:
        return V1(int(m.group(1)), int(m.group(2)), _profile_parse(m.group(3)))
    m = _V0_RE.match(s)
    if m:
        return V0(int(m.group(1)), _profile_parse(m.group(2)), int(m.group(3)))
    raise CodecError(f"bad vertex code: {s!r}")


# expansion parameters


def params_to_json(params: ExpansionParams) -> dict:
    return {
        "base": graph_to_json(params.base),
        "d": params.d,
        "N": params.N,
        "orientation_subset": (
            "all" if params.is_full_subset else list(params.subset)
        ),
    }


def params_from_json(obj: dict) -> ExpansionParams:
    try:
        base = graph_from_json(obj["base"])
        subset = obj["orientation_subset"]
        if subset == "all":
            subset = None
        return ExpansionParams(base, d=obj["d"], N=obj["N"], subset=subset)
    except (KeyError, TypeError, ExpansionError) as exc:
        raise CodecError(f"bad params JSON: {exc}") from exc


# tower configuration


def _subset_rule_to_json(rule: SubsetRule):
    if rule.kind == "all":
        return "all"
    return {"size": rule.size, "seed": rule.seed}


def _subset_rule_from_json(obj) -> SubsetRule:
    if obj == "all":
        return ALL
    if isinstance(obj, dict):
        return SubsetRule("random", size=obj.get("size"), seed=obj.get("seed"))
    raise CodecError(f"bad subset rule: {obj!r}")


def tower_config_to_json(d: int, depth: int, schedule: Schedule) -> dict:
    return {
        "d": d,
        "depth": depth,
        "schedule": {
            "mode": schedule.mode,
            "levels": [
                {"N": spec.N, "subset": _subset_rule_to_json(spec.subset)}
                for spec in schedule.levels
            ],
        },
    }


def tower_config_from_json(obj: dict) -> Tuple[int, int, Schedule]:
    try:
        sched = obj["schedule"]
        levels = tuple(
            LevelSpec(lv["N"], _subset_rule_from_json(lv.get("subset", "all")))
            for lv in sched.get("levels", [])
        )
        mode = sched["mode"]
        schedule = (
            Schedule.paper() if mode == "paper" else Schedule.desk(levels)
        )
        return obj["d"], obj["depth"], schedule
    except (KeyError, TypeError, TowerError) as exc:
        raise CodecError(f"bad tower config JSON: {exc}") from exc
