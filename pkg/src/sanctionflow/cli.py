"""Pipeline driver. Stages communicate only through files; every output
starts with comment-prefixed metadata (tool version + the exact flags) so
any artifact can be regenerated from its header."""

from __future__ import annotations

import argparse
import csv
import sys
from datetime import date as Date
from pathlib import Path

from . import __version__
from .errors import PipelineError
from . import community, events, hodge, netbuild, rank, report, synth


def _header(args: argparse.Namespace) -> list[str]:
    skip = {"func"}
    flags = " ".join(f"--{k.replace('_', '-')}={v}"
                     for k, v in sorted(vars(args).items())
                     if k not in skip and v is not None)
    return [f"sanctionflow {__version__}", f"{args.command} {flags}"]


def _write(path: str, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")


def _load_events(path: str, fmt: str) -> events.EventSet:
    with open(path, "r", encoding="utf-8") as fh:
        return events.parse_events(fh, format=fmt)


def _load_network(path: str) -> netbuild.InfluenceNetwork:
    return netbuild.read_network(Path(path).read_text(encoding="utf-8"))


def _read_category_map(path: str) -> dict[str, str]:
    mapping: dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#") or row[0] == "list_id":
                continue
            if len(row) != 2:
                raise PipelineError(f"category map row {row!r} needs 2 fields")
            mapping[row[0].strip()] = row[1].strip()
    return mapping


def cmd_ingest(args):
    evs = _load_events(args.events, args.format)
    reportv = events.validate_events(evs)
    text = events.serialize_events(evs)
    _write(args.out, "".join(f"# {l}\n" for l in _header(args)) + text)
    print(reportv.summary())
    return 0


def cmd_synth(args):
    config = synth.SynthConfig(
        n_issuers=args.issuers, n_entities=args.entities,
        lists_per_issuer=args.lists_per_issuer, copy_prob=args.copy_prob,
        start=Date.fromisoformat(args.start), window_days=args.window_days)
    evs = synth.synth_generate(config, args.seed)
    text = events.serialize_events(evs)
    _write(args.out, "".join(f"# {l}\n" for l in _header(args)) + text)
    print(f"{len(evs.events)} events, {len(evs.issuers)} issuers, "
          f"{len(evs.entities)} entities")
    return 0


def cmd_build(args):
    evs = _load_events(args.events, args.format)
    selected = None
    if args.category_map or args.label:
        if not (args.category_map and args.label):
            raise PipelineError("--category-map and --label go together")
        mapping = _read_category_map(args.category_map)
        selected = netbuild.filter_by_category(evs, mapping, args.label)
    if args.level == "institution":
        net = netbuild.build_institution_network(evs, selected)
    else:
        if selected is not None:
            raise PipelineError("category filtering applies to the "
                                "institution level")
        net = netbuild.build_list_network(evs)
    _write(args.out, netbuild.write_network(net, header=_header(args)))
    print(f"{len(net.nodes)} nodes, {len(net.adjacency)} edges, "
          f"total count {net.total_count()}")
    return 0


def cmd_symmetrize(args):
    net = _load_network(args.net)
    flow = netbuild.symmetrize(net, mode=args.mode)
    _write(args.out, netbuild.write_flow(flow, header=_header(args)))
    print(f"{len(flow.nodes)} nodes, {len(flow.pairs)} pairs, mode {args.mode}")
    return 0


def cmd_decompose(args):
    net = _load_network(args.net)
    flow = netbuild.symmetrize(net, mode=args.mode)
    system = hodge.assemble_laplacian(flow)
    potentials = hodge.solve_potentials(system, tol=args.tol)
    decomp = hodge.decompose(flow, potentials)
    head = _header(args)
    outdir = Path(args.out)
    _write(str(outdir / "nodes.csv"), hodge.write_node_table(decomp, head))
    _write(str(outdir / "pairs.csv"), hodge.write_pair_table(decomp, flow, head))
    _write(str(outdir / "summary.csv"), hodge.write_summary(decomp, head))
    print(f"{len(flow.nodes)} nodes, {len(flow.pairs)} pairs, "
          f"gradient_ratio {decomp.gradient_ratio:.4f}, "
          f"loop_ratio {decomp.loop_ratio:.4f}")
    return 0


def cmd_communities(args):
    net = _load_network(args.net)
    partition = community.louvain(net, resolution=args.resolution,
                                  seed=args.seed)
    _write(args.out, community.write_partition(partition, header=_header(args)))
    n_comm = len(set(partition.assignment.values()))
    print(f"{len(net.nodes)} nodes, {n_comm} communities, "
          f"Q {partition.modularity:.4f}")
    return 0


def cmd_pagerank(args):
    net = _load_network(args.net)
    ranks = rank.pagerank(net, damping=args.damping, tol=args.tol)
    _write(args.out, rank.write_ranks(ranks, header=_header(args)))
    print(f"{len(net.nodes)} nodes, {ranks.iterations_used} iterations")
    return 0


def cmd_layout(args):
    net = _load_network(args.net)
    potentials = hodge.read_node_table(
        Path(args.potentials).read_text(encoding="utf-8"))
    result = report.layout(net, potentials, seed=args.seed, jitter=args.jitter)
    lines = [f"# {l}\n" for l in _header(args)]
    lines.append("node,x,y\n")
    for node in sorted(result.positions):
        x, y = result.positions[node]
        lines.append(f"{node},{x:.17g},{y:.17g}\n")
    _write(args.out, "".join(lines))
    print(f"{len(net.nodes)} nodes, {len(result.energy_history)} energy steps")
    return 0


def cmd_report(args):
    net = _load_network(args.net)
    head = _header(args)
    outdir = Path(args.out)
    decomp = None
    if args.decomp:
        flow = netbuild.symmetrize(net, mode=args.mode)
        potentials = hodge.read_node_table(
            (Path(args.decomp) / "nodes.csv").read_text(encoding="utf-8"))
        decomp = hodge.decompose(flow, potentials)
        rows = report.potential_table(
            decomp, highlight=set(args.highlight or []))
        _write(str(outdir / "potential_table.csv"),
               report.write_potential_table(rows, head))
    partition = None
    if args.partition:
        assignment = community.read_partition(
            Path(args.partition).read_text(encoding="utf-8"))
        partition = community.CommunityPartition(
            assignment=assignment, modularity=0.0, resolution=0.0, seed=0)
    layout_result = None
    if args.layout:
        positions = {}
        for line in Path(args.layout).read_text(encoding="utf-8").splitlines():
            if not line.strip() or line.startswith("#") or line.startswith("node,"):
                continue
            node, x, y = line.split(",")
            positions[node] = (float(x), float(y))
        layout_result = report.LayoutResult(positions=positions, seed=0,
                                            overlap_jitter=0.0)
    if args.pagerank:
        if decomp is None:
            raise PipelineError("scatter output needs --decomp")
        ranks = rank.read_ranks(Path(args.pagerank).read_text(encoding="utf-8"))
        data = report.scatter_data(ranks, decomp.potentials)
        _write(str(outdir / "scatter.csv"), report.write_scatter(data, head))
    ext = {"edge_table": "tsv", "dot": "dot", "json_graph": "json"}[args.graph_format]
    doc = report.export_graph(net, decomp=decomp, partition=partition,
                              layout_result=layout_result,
                              format=args.graph_format, header=head)
    _write(str(outdir / f"graph.{ext}"), doc)
    print(f"report written to {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sanctionflow",
        description="Influence-network pipeline: ingest, build, decompose, "
                    "communities, pagerank, layout, report.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse/validate events, write canonical form")
    p.add_argument("--events", required=True)
    p.add_argument("--format", choices=["delimited", "line_record"],
                   default="delimited")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="generate synthetic events")
    p.add_argument("--issuers", type=int, required=True)
    p.add_argument("--entities", type=int, required=True)
    p.add_argument("--lists-per-issuer", type=int, default=1)
    p.add_argument("--copy-prob", type=float, default=0.5)
    p.add_argument("--start", default="2010-01-01")
    p.add_argument("--window-days", type=int, default=365)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("build", help="build an influence network from events")
    p.add_argument("--level", choices=["list", "institution"], required=True)
    p.add_argument("--events", required=True)
    p.add_argument("--format", choices=["delimited", "line_record"],
                   default="delimited")
    p.add_argument("--category-map")
    p.add_argument("--label")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("symmetrize", help="net flow + weights per node pair")
    p.add_argument("--net", required=True)
    p.add_argument("--mode", choices=["mean", "unit"], default="mean")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_symmetrize)

    p = sub.add_parser("decompose", help="potential/circulation flow split")
    p.add_argument("--net", required=True)
    p.add_argument("--mode", choices=["mean", "unit"], default="mean")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("communities", help="Louvain modularity communities")
    p.add_argument("--net", required=True)
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("pagerank", help="PageRank scores")
    p.add_argument("--net", required=True)
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pagerank)

    p = sub.add_parser("layout", help="potential-fixed 1-D energy layout")
    p.add_argument("--net", required=True)
    p.add_argument("--potentials", required=True,
                   help="nodes.csv from the decompose stage")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("report", help="tables, scatter data, graph export")
    p.add_argument("--net", required=True)
    p.add_argument("--mode", choices=["mean", "unit"], default="mean")
    p.add_argument("--decomp", help="directory from the decompose stage")
    p.add_argument("--pagerank")
    p.add_argument("--partition")
    p.add_argument("--layout")
    p.add_argument("--highlight", nargs="*")
    p.add_argument("--graph-format",
                   choices=["edge_table", "dot", "json_graph"],
                   default="edge_table")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_report)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
