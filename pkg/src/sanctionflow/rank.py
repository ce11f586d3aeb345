"""PageRank by power iteration on the weighted influence network."""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ConvergenceError, PipelineError
from .netbuild import InfluenceNetwork

MAX_ITERATIONS = 10_000


@dataclass(frozen=True)
class RankVector:
    scores: dict[str, float]
    damping: float
    iterations_used: int


def pagerank(net: InfluenceNetwork, damping: float = 0.85,
             tol: float = 1e-12) -> RankVector:
    """Power iteration with out-strength-normalized weights.

    Dangling nodes redistribute their mass uniformly; teleport is uniform.
    Converged when the L1 change between iterations drops below tol.
    """
    if not net.nodes:
        raise PipelineError("empty network")
    if not 0.0 < damping < 1.0:
        raise PipelineError("damping must lie strictly between 0 and 1")
    if tol <= 0:
        raise PipelineError("tolerance must be positive")
    index = {node: i for i, node in enumerate(net.nodes)}
    n = len(net.nodes)
    out_strength = np.zeros(n)
    edges = []
    for (a, b), count in sorted(net.adjacency.items()):
        out_strength[index[a]] += count
        edges.append((index[a], index[b], float(count)))
    src = np.array([e[0] for e in edges], dtype=int)
    dst = np.array([e[1] for e in edges], dtype=int)
    wgt = np.array([e[2] for e in edges])
    dangling = out_strength == 0.0
    safe_out = np.where(dangling, 1.0, out_strength)

    v = np.full(n, 1.0 / n)
    for iteration in range(1, MAX_ITERATIONS + 1):
        contrib = v / safe_out
        nxt = np.zeros(n)
        if len(edges):
            np.add.at(nxt, dst, wgt * contrib[src])
        nxt = damping * (nxt + v[dangling].sum() / n) + (1.0 - damping) / n
        nxt /= nxt.sum()
        delta = float(np.abs(nxt - v).sum())
        v = nxt
        if delta <= tol:
            return RankVector(
                scores={node: float(v[i]) for node, i in index.items()},
                damping=damping, iterations_used=iteration)
    raise ConvergenceError("pagerank hit the iteration cap", residual=delta)


def write_ranks(rank: RankVector, header: Iterable[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    out.write("node,pagerank\n")
    for node in sorted(rank.scores):
        out.write(f"{node},{rank.scores[node]:.17g}\n")
    return out.getvalue()


def read_ranks(text: str, damping: float = 0.85) -> RankVector:
    scores: dict[str, float] = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#") or line.startswith("node,"):
            continue
        node, score = line.split(",")
        scores[node] = float(score)
    return RankVector(scores=scores, damping=damping, iterations_used=0)
