#!/usr/bin/env python3
"""End-to-end pipeline demo on synthetic data.

Generates events with a planted issuer hierarchy, then drives every CLI
stage through file handoffs into the output directory.

Usage: python3 scripts/run_synth_pipeline.py [outdir] [--seed N]
"""

import argparse
import sys
from pathlib import Path

from sanctionflow.cli import run


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("outdir", nargs="?", default="synth_run")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--issuers", type=int, default=8)
    parser.add_argument("--entities", type=int, default=300)
    parser.add_argument("--copy-prob", type=float, default=0.7)
    args = parser.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    stages = [
        ["synth", "--issuers", str(args.issuers),
         "--entities", str(args.entities),
         "--copy-prob", str(args.copy_prob), "--seed", str(args.seed),
         "--out", str(out / "events.csv")],
        ["ingest", "--events", str(out / "events.csv"),
         "--out", str(out / "canonical.csv")],
        ["build", "--level", "institution",
         "--events", str(out / "canonical.csv"), "--out", str(out / "net.tsv")],
        ["symmetrize", "--net", str(out / "net.tsv"), "--mode", "mean",
         "--out", str(out / "flow.tsv")],
        ["decompose", "--net", str(out / "net.tsv"), "--mode", "mean",
         "--out", str(out / "hodge")],
        ["communities", "--net", str(out / "net.tsv"), "--seed", "1",
         "--out", str(out / "communities.csv")],
        ["pagerank", "--net", str(out / "net.tsv"),
         "--out", str(out / "pagerank.csv")],
        ["layout", "--net", str(out / "net.tsv"),
         "--potentials", str(out / "hodge" / "nodes.csv"),
         "--seed", str(args.seed), "--out", str(out / "layout.csv")],
        ["report", "--net", str(out / "net.tsv"), "--decomp", str(out / "hodge"),
         "--pagerank", str(out / "pagerank.csv"),
         "--partition", str(out / "communities.csv"),
         "--layout", str(out / "layout.csv"),
         "--graph-format", "json_graph", "--out", str(out / "report")],
    ]
    for argv in stages:
        print(f"$ sanctionflow {' '.join(argv)}")
        status = run(argv)
        if status != 0:
            sys.exit(status)
    print(f"\nall artifacts in {out}/")


if __name__ == "__main__":
    main()
