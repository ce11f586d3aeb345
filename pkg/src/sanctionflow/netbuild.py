"""Directed influence networks from events, and their symmetrized flow form.

The edge rule: for two nodes holding the same entity, the one that listed it
strictly earlier gains one unit of influence over the other. Same-day pairs
contribute nothing (direction is ambiguous at day resolution).
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import PipelineError
from .events import EventSet

LIST_LEVEL = "list"
INSTITUTION_LEVEL = "institution"


@dataclass(frozen=True)
class InfluenceNetwork:
    """Directed weighted graph with integer influence counts.

    adjacency maps (src, dst) -> count; counts are strictly positive and
    self-loops are never stored. Isolated nodes are allowed.
    """

    level: str
    nodes: tuple[str, ...]
    adjacency: Mapping[tuple[str, str], int]

    def total_count(self) -> int:
        return sum(self.adjacency.values())


@dataclass(frozen=True)
class FlowNetwork:
    """Antisymmetric net flow plus symmetric weight per unordered node pair.

    pairs maps (i, j) -> (F_ij, w_ij) with i before j in node order;
    F_ji = -F_ij is implied. Pairs with no interaction are absent; balanced
    pairs (F = 0) are kept because their weight still constrains potentials.
    """

    nodes: tuple[str, ...]
    pairs: Mapping[tuple[str, str], tuple[float, float]]
    weight_mode: str


def _accumulate(dated: Iterable[tuple[str, object]], counts: dict) -> None:
    """Add one precedence count per ordered pair with strictly earlier date."""
    items = list(dated)
    for a, da in items:
        for b, db in items:
            if a != b and da < db:
                counts[(a, b)] = counts.get((a, b), 0) + 1


def build_list_network(events: EventSet) -> InfluenceNetwork:
    """List-level network: one count per (entity, ordered list pair) precedence."""
    per_entity: dict[str, list[tuple[str, object]]] = {}
    for ev in events.events:
        per_entity.setdefault(ev.entity_id, []).append((ev.list_id, ev.date))
    counts: dict[tuple[str, str], int] = {}
    for dated in per_entity.values():
        _accumulate(dated, counts)
    return InfluenceNetwork(level=LIST_LEVEL,
                            nodes=tuple(sorted(events.lists)),
                            adjacency=counts)


def build_institution_network(events: EventSet,
                              lists: set[str] | None = None) -> InfluenceNetwork:
    """Institution-level network over the selected lists (all by default).

    Precedence compares each institution's earliest inclusion date per
    entity, so one entity contributes at most 1 to any ordered pair.
    """
    if lists is not None:
        unknown = sorted(lists - events.lists)
        if unknown:
            raise PipelineError(f"unknown list_id(s) in filter: {unknown}")
    first_date: dict[str, dict[str, object]] = {}  # entity -> issuer -> date
    issuers = set()
    for ev in events.events:
        if lists is not None and ev.list_id not in lists:
            continue
        issuers.add(ev.issuer)
        per = first_date.setdefault(ev.entity_id, {})
        if ev.issuer not in per or ev.date < per[ev.issuer]:
            per[ev.issuer] = ev.date
    counts: dict[tuple[str, str], int] = {}
    for per in first_date.values():
        _accumulate(sorted(per.items()), counts)
    return InfluenceNetwork(level=INSTITUTION_LEVEL,
                            nodes=tuple(sorted(issuers)),
                            adjacency=counts)


def filter_by_category(events: EventSet, category_map: Mapping[str, str],
                       label: str) -> set[str]:
    """Lists carrying the given category label, for category subnetworks."""
    unknown = sorted(set(category_map) - events.lists)
    if unknown:
        raise PipelineError(f"category map names unknown list_id(s): {unknown}")
    selected = {l for l, lab in category_map.items() if lab == label}
    if not selected:
        raise PipelineError(f"no list carries category label '{label}'")
    return selected


def symmetrize(net: InfluenceNetwork, mode: str = "mean") -> FlowNetwork:
    """Fold directed counts into net flow F = A_ij - A_ji and weight w.

    mean mode: w = (A_ij + A_ji) / 2; unit mode: w = 1.
    """
    if mode not in ("mean", "unit"):
        raise PipelineError(f"unknown weight mode '{mode}'")
    order = {n: i for i, n in enumerate(net.nodes)}
    pairs: dict[tuple[str, str], tuple[float, float]] = {}
    for (a, b), count in net.adjacency.items():
        if a == b:
            raise PipelineError(f"self-loop on '{a}'")
        i, j = (a, b) if order[a] < order[b] else (b, a)
        if (i, j) in pairs:
            continue
        a_ij = net.adjacency.get((i, j), 0)
        a_ji = net.adjacency.get((j, i), 0)
        f = float(a_ij - a_ji)
        w = (a_ij + a_ji) / 2.0 if mode == "mean" else 1.0
        pairs[(i, j)] = (f, w)
    return FlowNetwork(nodes=net.nodes, pairs=pairs, weight_mode=mode)


# ---------------------------------------------------------------------------
# Plain-text round-trip formats. Node lines carry a single field; edge lines
# are src<TAB>dst<TAB>count (flow pairs: i<TAB>j<TAB>F<TAB>w). Lines starting
# with '#' are metadata and ignored on read, except the level/mode markers.

def _check_id(node: str) -> str:
    if "\t" in node or "\n" in node:
        raise PipelineError(f"node id {node!r} contains tab/newline")
    return node


def write_network(net: InfluenceNetwork, header: Iterable[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    out.write(f"# level\t{net.level}\n")
    for node in net.nodes:
        out.write(_check_id(node) + "\n")
    for (a, b) in sorted(net.adjacency):
        out.write(f"{_check_id(a)}\t{_check_id(b)}\t{net.adjacency[(a, b)]}\n")
    return out.getvalue()


def read_network(text: str) -> InfluenceNetwork:
    level = INSTITUTION_LEVEL
    nodes: list[str] = []
    adjacency: dict[tuple[str, str], int] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            parts = line[1:].strip().split("\t")
            if parts[0] == "level" and len(parts) == 2:
                level = parts[1]
            continue
        fields = line.split("\t")
        if len(fields) == 1:
            nodes.append(fields[0])
        elif len(fields) == 3:
            try:
                count = int(fields[2])
            except ValueError:
                raise PipelineError(f"line {line_no}: bad count '{fields[2]}'")
            if count <= 0:
                raise PipelineError(f"line {line_no}: non-positive count")
            adjacency[(fields[0], fields[1])] = count
        else:
            raise PipelineError(f"line {line_no}: expected 1 or 3 fields, "
                                f"got {len(fields)}")
    known = set(nodes)
    for (a, b) in adjacency:
        if a not in known or b not in known:
            raise PipelineError(f"edge ({a}, {b}) references undeclared node")
    return InfluenceNetwork(level=level, nodes=tuple(nodes), adjacency=adjacency)


def write_flow(flow: FlowNetwork, header: Iterable[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    out.write(f"# mode\t{flow.weight_mode}\n")
    for node in flow.nodes:
        out.write(_check_id(node) + "\n")
    for (i, j) in sorted(flow.pairs):
        f, w = flow.pairs[(i, j)]
        out.write(f"{i}\t{j}\t{f:.17g}\t{w:.17g}\n")
    return out.getvalue()


def read_flow(text: str) -> FlowNetwork:
    mode = "mean"
    nodes: list[str] = []
    pairs: dict[tuple[str, str], tuple[float, float]] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            parts = line[1:].strip().split("\t")
            if parts[0] == "mode" and len(parts) == 2:
                mode = parts[1]
            continue
        fields = line.split("\t")
        if len(fields) == 1:
            nodes.append(fields[0])
        elif len(fields) == 4:
            try:
                pairs[(fields[0], fields[1])] = (float(fields[2]), float(fields[3]))
            except ValueError:
                raise PipelineError(f"line {line_no}: bad flow/weight value")
        else:
            raise PipelineError(f"line {line_no}: expected 1 or 4 fields, "
                                f"got {len(fields)}")
    return FlowNetwork(nodes=tuple(nodes), pairs=pairs, weight_mode=mode)
