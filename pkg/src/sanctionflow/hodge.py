"""Potential / circulation split of a flow network.

The per-node potential phi minimizes sum_{pairs} (F_ij - w_ij (phi_i - phi_j))^2 / w_ij,
whose normal equation is the weighted graph Laplacian system L phi = f with
f_i the net outflow at node i. Gradient flow is w_ij (phi_i - phi_j); the
circulation is the divergence-free remainder. Potentials are shifted to mean
zero within each connected component.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import ConvergenceError, PipelineError
from .netbuild import FlowNetwork

DENSE_LIMIT = 64  # components up to this size use a direct solve


@dataclass(frozen=True)
class PotentialVector:
    phi: dict[str, float]
    component: dict[str, int]


@dataclass(frozen=True)
class LaplacianSystem:
    nodes: tuple[str, ...]
    weights: dict[tuple[int, int], float]  # index pair (i < j) -> w_ij
    rhs: np.ndarray                        # f_i = net outflow at node i
    components: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class HodgeDecomposition:
    potentials: PotentialVector
    gradient_flow: dict[tuple[str, str], float]
    circular_flow: dict[tuple[str, str], float]
    gradient_ratio: float
    loop_ratio: float
    residual_norm: float


def _components(n: int, pairs: Iterable[tuple[int, int]]) -> tuple[tuple[int, ...], ...]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return tuple(tuple(groups[r]) for r in sorted(groups))


def assemble_laplacian(flow: FlowNetwork) -> LaplacianSystem:
    """Build L (implicitly, via pair weights) and the net-outflow vector."""
    index = {node: i for i, node in enumerate(flow.nodes)}
    n = len(flow.nodes)
    weights: dict[tuple[int, int], float] = {}
    rhs = np.zeros(n)
    for (a, b), (f, w) in flow.pairs.items():
        i, j = index[a], index[b]
        if w <= 0:
            raise PipelineError(f"non-positive weight on pair ({a}, {b})")
        key = (i, j) if i < j else (j, i)
        weights[key] = weights.get(key, 0.0) + w
        rhs[i] += f
        rhs[j] -= f
    return LaplacianSystem(nodes=flow.nodes, weights=weights, rhs=rhs,
                           components=_components(n, weights))


def _dense_solve(weights, rhs, comp):
    """Direct solve of (L + J/n) phi = f; the J/n shift pins the mean to 0."""
    pos = {g: k for k, g in enumerate(comp)}
    n = len(comp)
    lap = np.full((n, n), 1.0 / n)
    for (i, j), w in weights.items():
        a, b = pos[i], pos[j]
        lap[a, a] += w
        lap[b, b] += w
        lap[a, b] -= w
        lap[b, a] -= w
    return np.linalg.solve(lap, rhs[list(comp)])


def _cg_solve(weights, rhs, comp, tol, max_iter):
    """Conjugate gradient on the component Laplacian, re-centered each step."""
    pos = {g: k for k, g in enumerate(comp)}
    n = len(comp)
    rows = np.array([pos[i] for (i, j) in weights])
    cols = np.array([pos[j] for (i, j) in weights])
    wvec = np.array([w for w in weights.values()])

    def matvec(x):
        y = np.zeros(n)
        d = wvec * (x[rows] - x[cols])
        np.add.at(y, rows, d)
        np.add.at(y, cols, -d)
        return y

    b = rhs[list(comp)]
    b = b - b.mean()
    x = np.zeros(n)
    r = b.copy()
    d = r.copy()
    rs = float(r @ r)
    threshold = tol * max(1.0, float(np.abs(b).max(initial=0.0)))
    for _ in range(max_iter):
        if np.abs(matvec(x) - b).max(initial=0.0) <= threshold:
            break
        ad = matvec(d)
        dad = float(d @ ad)
        if dad <= 0.0:
            break
        alpha = rs / dad
        x = x + alpha * d
        x -= x.mean()
        r = r - alpha * ad
        r -= r.mean()
        rs_new = float(r @ r)
        d = r + (rs_new / rs) * d
        rs = rs_new
    return x


def solve_potentials(system: LaplacianSystem, tol: float = 1e-10) -> PotentialVector:
    """Minimum-norm, per-component mean-zero solution of L phi = f.

    Raises ConvergenceError (with the achieved residual) if the CG path
    misses ``tol`` within its iteration cap. Isolated nodes get phi = 0.
    """
    if tol <= 0:
        raise PipelineError("tolerance must be positive")
    n = len(system.nodes)
    phi = np.zeros(n)
    for comp in system.components:
        if len(comp) == 1:
            continue
        members = set(comp)
        comp_weights = {(i, j): w for (i, j), w in system.weights.items()
                        if i in members}
        if len(comp) <= DENSE_LIMIT:
            sol = _dense_solve(comp_weights, system.rhs, comp)
        else:
            sol = _cg_solve(comp_weights, system.rhs, comp, tol,
                            max_iter=100 * len(comp))
        sol = sol - sol.mean()
        phi[list(comp)] = sol

    residual = _residual_inf(system, phi)
    bound = tol * max(1.0, float(np.abs(system.rhs).max(initial=0.0)))
    if residual > bound:
        raise ConvergenceError("potential solve did not reach tolerance",
                               residual=residual)
    component = {}
    for cid, comp in enumerate(system.components):
        for i in comp:
            component[system.nodes[i]] = cid
    return PotentialVector(
        phi={node: float(phi[i]) for i, node in enumerate(system.nodes)},
        component=component,
    )


def _residual_inf(system: LaplacianSystem, phi: np.ndarray) -> float:
    res = -system.rhs.copy()
    for (i, j), w in system.weights.items():
        g = w * (phi[i] - phi[j])
        res[i] += g
        res[j] -= g
    return float(np.abs(res).max(initial=0.0))


def decompose(flow: FlowNetwork, potentials: PotentialVector) -> HodgeDecomposition:
    """Split F into gradient and circular parts and compute their norm shares."""
    if set(potentials.phi) != set(flow.nodes):
        raise PipelineError("potential vector does not cover the flow network's nodes")
    gradient: dict[tuple[str, str], float] = {}
    circular: dict[tuple[str, str], float] = {}
    for (a, b), (f, w) in flow.pairs.items():
        fp = w * (potentials.phi[a] - potentials.phi[b])
        gradient[(a, b)] = fp
        circular[(a, b)] = f - fp
    g_ratio, l_ratio = _ratios(flow, gradient, circular)
    system = assemble_laplacian(flow)
    phi_arr = np.array([potentials.phi[node] for node in flow.nodes])
    return HodgeDecomposition(
        potentials=potentials,
        gradient_flow=gradient,
        circular_flow=circular,
        gradient_ratio=g_ratio,
        loop_ratio=l_ratio,
        residual_norm=_residual_inf(system, phi_arr),
    )


def _ratios(flow, gradient, circular):
    total = grad_norm = loop_norm = 0.0
    for key in sorted(flow.pairs):
        f, w = flow.pairs[key]
        total += f * f / w
        grad_norm += gradient[key] ** 2 / w
        loop_norm += circular[key] ** 2 / w
    if total == 0.0:
        raise PipelineError("all flows are zero; gradient/loop ratios undefined")
    return grad_norm / total, loop_norm / total


def flow_ratios(decomp: HodgeDecomposition, flow: FlowNetwork) -> tuple[float, float]:
    """Recompute (gradient_ratio, loop_ratio) from the stored components."""
    return _ratios(flow, decomp.gradient_flow, decomp.circular_flow)


def solve(flow: FlowNetwork, tol: float = 1e-10) -> HodgeDecomposition:
    """Convenience pipeline: assemble, solve potentials, decompose."""
    return decompose(flow, solve_potentials(assemble_laplacian(flow), tol))


# ---------------------------------------------------------------------------
# Delimited export: node table, pair table, summary (17 significant digits).

def write_node_table(decomp: HodgeDecomposition, header: Iterable[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    out.write("node,component,potential\n")
    for node in sorted(decomp.potentials.phi):
        out.write(f"{node},{decomp.potentials.component[node]},"
                  f"{decomp.potentials.phi[node]:.17g}\n")
    return out.getvalue()


def write_pair_table(decomp: HodgeDecomposition, flow: FlowNetwork,
                     header: Iterable[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    out.write("i,j,F,w,F_grad,F_circ\n")
    for (i, j) in sorted(flow.pairs):
        f, w = flow.pairs[(i, j)]
        out.write(f"{i},{j},{f:.17g},{w:.17g},"
                  f"{decomp.gradient_flow[(i, j)]:.17g},"
                  f"{decomp.circular_flow[(i, j)]:.17g}\n")
    return out.getvalue()


def write_summary(decomp: HodgeDecomposition, header: Iterable[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    out.write("gradient_ratio,loop_ratio,residual_norm\n")
    out.write(f"{decomp.gradient_ratio:.17g},{decomp.loop_ratio:.17g},"
              f"{decomp.residual_norm:.17g}\n")
    return out.getvalue()


def read_node_table(text: str) -> PotentialVector:
    phi: dict[str, float] = {}
    component: dict[str, int] = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#") or line.startswith("node,"):
            continue
        node, comp, value = line.split(",")
        phi[node] = float(value)
        component[node] = int(comp)
    return PotentialVector(phi=phi, component=component)
