"""Presentation artifacts: potential-fixed layouts, ranked tables, scatter
data, and graph exports (edge table / dot / json).

Layout convention: y is the node's potential (optionally jittered to break
exact overlaps); x minimizes a LinLog-style energy (distance attraction,
log-distance repulsion, weak quadratic gravity) by seeded descent.
"""

from __future__ import annotations

import io
import json
import math
import random
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import PipelineError
from .hodge import HodgeDecomposition, PotentialVector
from .netbuild import InfluenceNetwork
from .community import CommunityPartition

_EPS = 1e-9
_GRAVITY = 0.01


@dataclass(frozen=True)
class LayoutResult:
    positions: dict[str, tuple[float, float]]
    seed: int
    overlap_jitter: float
    energy_history: tuple[float, ...] = ()


def _energy_and_grad(x, y, rows, cols, wgt, n):
    dx = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    dist = np.sqrt(dx * dx + dy * dy)
    np.fill_diagonal(dist, 1.0)
    dist = np.maximum(dist, _EPS)

    energy = _GRAVITY * float(x @ x)
    grad = 2.0 * _GRAVITY * x
    # repulsion: -log distance over all pairs
    energy -= float(np.triu(np.log(dist), 1).sum())
    rep = dx / (dist * dist)
    np.fill_diagonal(rep, 0.0)
    grad -= rep.sum(axis=1)
    # attraction: w * distance over edges
    if len(rows):
        d_e = dist[rows, cols]
        energy += float((wgt * d_e).sum())
        pull = wgt * dx[rows, cols] / d_e
        np.add.at(grad, rows, pull)
        np.add.at(grad, cols, -pull)
    return energy, grad


def layout(net: InfluenceNetwork, potentials: PotentialVector, seed: int = 0,
           jitter: float = 0.0, min_sep: float = 1e-6,
           max_steps: int = 200) -> LayoutResult:
    """1-D LinLog descent on x with y fixed at the potential."""
    missing = [n for n in net.nodes if n not in potentials.phi]
    if missing:
        raise PipelineError(f"potentials missing for nodes: {missing[:5]}")
    nodes = list(net.nodes)
    n = len(nodes)
    if n == 0:
        return LayoutResult(positions={}, seed=seed, overlap_jitter=jitter)
    y = np.array([potentials.phi[v] for v in nodes])
    rng = random.Random(seed)
    if n == 1:
        return LayoutResult(positions={nodes[0]: (0.0, float(y[0]))},
                            seed=seed, overlap_jitter=jitter)
    x = np.array([rng.uniform(-1.0, 1.0) for _ in nodes])

    index = {v: i for i, v in enumerate(nodes)}
    sym: dict[tuple[int, int], float] = {}
    for (a, b), count in net.adjacency.items():
        i, j = index[a], index[b]
        key = (min(i, j), max(i, j))
        sym[key] = sym.get(key, 0.0) + count
    rows = np.array([k[0] for k in sorted(sym)], dtype=int)
    cols = np.array([k[1] for k in sorted(sym)], dtype=int)
    wgt = np.array([sym[k] for k in sorted(sym)])

    energy, grad = _energy_and_grad(x, y, rows, cols, wgt, n)
    history = [energy]
    step = 0.1
    for _ in range(max_steps):
        gnorm = float(np.abs(grad).max(initial=0.0))
        if gnorm < 1e-12:
            break
        # backtracking so the recorded energy never increases
        while step > 1e-14:
            trial = x - step * grad
            e_trial, g_trial = _energy_and_grad(trial, y, rows, cols, wgt, n)
            if e_trial <= energy:
                x, energy, grad = trial, e_trial, g_trial
                history.append(energy)
                step *= 1.5
                break
            step *= 0.5
        else:
            break

    positions = {v: (float(x[i]), float(y[i])) for v, i in index.items()}
    if jitter > 0.0:
        positions = _apply_jitter(positions, nodes, jitter, min_sep, rng)
    return LayoutResult(positions=positions, seed=seed, overlap_jitter=jitter,
                        energy_history=tuple(history))


def _apply_jitter(positions, nodes, jitter, min_sep, rng):
    """Perturb y (bounded by jitter) only for nodes overlapping another."""
    out = dict(positions)
    ordered = sorted(nodes)
    for idx, v in enumerate(ordered):
        xv, yv = out[v]
        crowded = any(
            u != v and math.hypot(out[u][0] - xv, out[u][1] - yv) < min_sep
            for u in ordered)
        if crowded:
            out[v] = (xv, yv + rng.uniform(-jitter, jitter))
    return out


@dataclass(frozen=True)
class TableRow:
    rank: int
    node: str
    name: str
    potential: float
    highlighted: bool


def potential_table(decomp: HodgeDecomposition,
                    names: Mapping[str, str] | None = None,
                    highlight: Iterable[str] = ()) -> list[TableRow]:
    """Rows ranked by descending potential; ties broken by display name."""
    names = names or {}
    marked = set(highlight)
    entries = sorted(
        ((node, names.get(node, node), phi)
         for node, phi in decomp.potentials.phi.items()),
        key=lambda t: (-t[2], t[1]))
    return [TableRow(rank=i + 1, node=node, name=name, potential=phi,
                     highlighted=node in marked)
            for i, (node, name, phi) in enumerate(entries)]


def write_potential_table(rows: list[TableRow],
                          header: Iterable[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    out.write("rank,name,potential,highlighted\n")
    for row in rows:
        flag = "*" if row.highlighted else ""
        out.write(f"{row.rank},{row.name},{row.potential:.3f},{flag}\n")
    return out.getvalue()


def potential_matrix(decomps: Mapping[str, HodgeDecomposition],
                     names: Mapping[str, str] | None = None) -> list[list[str]]:
    """Node x category grid of potentials, '-' where a node is absent."""
    names = names or {}
    categories = sorted(decomps)
    all_nodes = sorted({n for d in decomps.values() for n in d.potentials.phi},
                       key=lambda v: names.get(v, v))
    grid = [["name"] + categories]
    for node in all_nodes:
        row = [names.get(node, node)]
        for cat in categories:
            phi = decomps[cat].potentials.phi.get(node)
            row.append("-" if phi is None else f"{phi:.3f}")
        grid.append(row)
    return grid


@dataclass(frozen=True)
class ScatterData:
    rows: list[tuple[str, float, float]]  # node, pagerank, potential
    correlation: float
    constant_column: bool


def scatter_data(rank, potentials: PotentialVector) -> ScatterData:
    """Per-node (pagerank, potential) pairs with a Pearson summary."""
    if set(rank.scores) != set(potentials.phi):
        raise PipelineError("pagerank and potential node sets differ")
    rows = [(n, rank.scores[n], potentials.phi[n]) for n in sorted(rank.scores)]
    xs = np.array([r[1] for r in rows])
    ys = np.array([r[2] for r in rows])
    constant = bool(len(rows) < 2 or np.ptp(xs) == 0.0 or np.ptp(ys) == 0.0)
    if constant:
        corr = 0.0
    else:
        corr = float(np.corrcoef(xs, ys)[0, 1])
    return ScatterData(rows=rows, correlation=corr, constant_column=constant)


def write_scatter(data: ScatterData, header: Iterable[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    flag = "\tconstant_column" if data.constant_column else ""
    out.write(f"# pearson\t{data.correlation:.17g}{flag}\n")
    out.write("node,pagerank,potential\n")
    for node, pr, phi in data.rows:
        out.write(f"{node},{pr:.17g},{phi:.17g}\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# Graph export. edge_table: node lines with 5 tab-separated fields
# (id, potential, community, x, y), edge lines with 7 (src, dst, count,
# F, w, F_grad, F_circ); '-' marks an unavailable attribute.

def _pair_attrs(decomp, a, b):
    if decomp is None:
        return None
    if (a, b) in decomp.gradient_flow:
        sign, key = 1.0, (a, b)
    elif (b, a) in decomp.gradient_flow:
        sign, key = -1.0, (b, a)
    else:
        return None
    fp = sign * decomp.gradient_flow[key]
    fc = sign * decomp.circular_flow[key]
    return fp + fc, fp, fc


def export_graph(net: InfluenceNetwork,
                 decomp: HodgeDecomposition | None = None,
                 partition: CommunityPartition | None = None,
                 layout_result: LayoutResult | None = None,
                 format: str = "edge_table",
                 header: Iterable[str] = ()) -> str:
    if format not in ("edge_table", "dot", "json_graph"):
        raise PipelineError(f"unknown export format '{format}'")
    for label, mapping in (("decomposition", decomp and decomp.potentials.phi),
                           ("partition", partition and partition.assignment),
                           ("layout", layout_result and layout_result.positions)):
        if mapping is not None:
            missing = [n for n in net.nodes if n not in mapping]
            if missing:
                raise PipelineError(f"{label} misses nodes: {missing[:5]}")

    def node_attrs(v):
        phi = decomp.potentials.phi[v] if decomp else None
        comm = partition.assignment[v] if partition else None
        pos = layout_result.positions[v] if layout_result else None
        return phi, comm, pos

    flows = None
    if decomp is not None:
        flows = {}
        for (a, b) in net.adjacency:
            flows[(a, b)] = _pair_attrs(decomp, a, b)

    if format == "edge_table":
        return _export_edge_table(net, node_attrs, flows, header)
    if format == "dot":
        return _export_dot(net, node_attrs, flows)
    return _export_json(net, node_attrs, flows)


def _fmt(value):
    return "-" if value is None else f"{value:.17g}"


def _export_edge_table(net, node_attrs, flows, header):
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    out.write("# node columns\tid\tpotential\tcommunity\tx\ty\n")
    out.write("# edge columns\tsrc\tdst\tcount\tF\tw\tF_grad\tF_circ\n")
    out.write(f"# level\t{net.level}\n")
    for v in net.nodes:
        phi, comm, pos = node_attrs(v)
        x, y = pos if pos else (None, None)
        comm_s = "-" if comm is None else str(comm)
        out.write(f"{v}\t{_fmt(phi)}\t{comm_s}\t{_fmt(x)}\t{_fmt(y)}\n")
    for (a, b) in sorted(net.adjacency):
        attrs = flows.get((a, b)) if flows else None
        f, fp, fc = attrs if attrs else (None, None, None)
        # w recoverable from the pair tables; emit half-sum of counts here
        w = (net.adjacency.get((a, b), 0) + net.adjacency.get((b, a), 0)) / 2.0
        out.write(f"{a}\t{b}\t{net.adjacency[(a, b)]}\t{_fmt(f)}\t{w:.17g}\t"
                  f"{_fmt(fp)}\t{_fmt(fc)}\n")
    return out.getvalue()


def read_edge_table(text: str) -> InfluenceNetwork:
    """Inverse of the edge_table export, recovering the bare network."""
    level = "institution"
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
        if len(fields) == 5:
            nodes.append(fields[0])
        elif len(fields) == 7:
            adjacency[(fields[0], fields[1])] = int(fields[2])
        else:
            raise PipelineError(f"line {line_no}: expected 5 or 7 fields, "
                                f"got {len(fields)}")
    return InfluenceNetwork(level=level, nodes=tuple(nodes), adjacency=adjacency)


def _dot_quote(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _export_dot(net, node_attrs, flows):
    out = io.StringIO()
    out.write("digraph influence {\n")
    for v in net.nodes:
        phi, comm, pos = node_attrs(v)
        attrs = []
        if phi is not None:
            attrs.append(f'potential="{phi:.6g}"')
        if comm is not None:
            attrs.append(f'community="{comm}"')
        if pos is not None:
            attrs.append(f'pos="{pos[0]:.6g},{pos[1]:.6g}"')
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        out.write(f"  {_dot_quote(v)}{suffix};\n")
    for (a, b) in sorted(net.adjacency):
        attrs = [f'weight="{net.adjacency[(a, b)]}"']
        pair = flows.get((a, b)) if flows else None
        if pair is not None:
            f, fp, fc = pair
            attrs.append(f'F="{f:.6g}"')
            attrs.append(f'F_grad="{fp:.6g}"')
            attrs.append(f'F_circ="{fc:.6g}"')
        out.write(f"  {_dot_quote(a)} -> {_dot_quote(b)} "
                  f"[{', '.join(attrs)}];\n")
    out.write("}\n")
    return out.getvalue()


def _export_json(net, node_attrs, flows):
    nodes = []
    for v in net.nodes:
        phi, comm, pos = node_attrs(v)
        entry = {"id": v}
        if phi is not None:
            entry["potential"] = phi
        if comm is not None:
            entry["community"] = comm
        if pos is not None:
            entry["x"], entry["y"] = pos
        nodes.append(entry)
    links = []
    for (a, b) in sorted(net.adjacency):
        entry = {"source": a, "target": b, "count": net.adjacency[(a, b)]}
        pair = flows.get((a, b)) if flows else None
        if pair is not None:
            entry["F"], entry["F_grad"], entry["F_circ"] = pair
        links.append(entry)
    return json.dumps({"directed": True, "level": net.level,
                       "nodes": nodes, "links": links},
                      indent=2, sort_keys=True) + "\n"
