"""Rotating-frame feasibility and the time-independent RWA Hamiltonian.

A frame is a set of energies ``eps_k`` (one per level) such that every driven
transition satisfies ``eps_e - eps_g = omega_ge``. Solving this over a
spanning forest of the coupling graph always works; each non-tree edge closes
a cycle and adds one consistency condition on the laser frequencies.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .model import LevelSystem, check_system, coupling_matrix

DEFAULT_FRAME_RTOL = 1e-9


class FrameError(ValueError):
    """Raised when a Hamiltonian is requested for an infeasible frame."""


@dataclass(frozen=True)
class CycleConstraint:
    """One independent loop of the coupling graph.

    ``edges`` lists ``(a, b)`` node pairs around the loop, starting with the
    closing (non-tree) edge. ``residual`` is ``(eps_a - eps_b) - value`` on the
    closing edge once the tree edges have fixed ``eps``: the signed amount by
    which the frequencies around the loop fail to cancel.
    """

    edges: tuple[tuple[int, int], ...]
    residual: float


@dataclass(frozen=True)
class RotatingFrame:
    epsilons: np.ndarray
    feasible: bool
    cycles: tuple[CycleConstraint, ...]
    components: np.ndarray
    tolerance: float

    @property
    def independent_cycle_count(self) -> int:
        return len(self.cycles)

    @property
    def max_residual(self) -> float:
        return max((abs(c.residual) for c in self.cycles), default=0.0)


@dataclass(frozen=True)
class RwaHamiltonian:
    matrix: np.ndarray
    n_ground: int
    detunings: dict[tuple[int, int], float] = field(default_factory=dict)
    # connected component of every level in the graph of nonzero couplings
    components: np.ndarray | None = None

    @property
    def ground_diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)[: self.n_ground]).copy()

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def solve_difference_constraints(n_nodes, constraints, rtol=DEFAULT_FRAME_RTOL):
    """Solve ``eps[a] - eps[b] = value`` for a list of ``(a, b, value)``.

    Works on any graph, bipartite or not. The lowest-numbered node of every
    connected component is pinned to zero and the rest are fixed by a
    breadth-first spanning tree; every leftover edge becomes a
    :class:`CycleConstraint`.

    Returns ``(epsilons, cycles, components, feasible, tol)``.
    """
    adjacency: list[list[tuple[int, int, float]]] = [[] for _ in range(n_nodes)]
    for k, (a, b, value) in enumerate(constraints):
        # stored as: eps[nbr] = eps[node] + sign * value
        adjacency[b].append((a, k, value))
        adjacency[a].append((b, k, -value))

    eps = np.zeros(n_nodes)
    comp = np.full(n_nodes, -1, dtype=int)
    parent: list[tuple[int, int] | None] = [None] * n_nodes
    tree_edges: set[int] = set()
    n_comp = 0
    for root in range(n_nodes):
        if comp[root] >= 0:
            continue
        comp[root] = n_comp
        queue = deque([root])
        while queue:
            node = queue.popleft()
            for nbr, k, delta in adjacency[node]:
                if comp[nbr] < 0:
                    comp[nbr] = n_comp
                    eps[nbr] = eps[node] + delta
                    parent[nbr] = (node, k)
                    tree_edges.add(k)
                    queue.append(nbr)
        n_comp += 1

    scale = max([1.0] + [abs(v) for _, _, v in constraints])
    tol = rtol * scale
    cycles = []
    for k, (a, b, value) in enumerate(constraints):
        if k in tree_edges:
            continue
        residual = (eps[a] - eps[b]) - value
        cycles.append(CycleConstraint(_loop(a, b, parent), float(residual)))
    feasible = all(abs(c.residual) <= tol for c in cycles)
    return eps, tuple(cycles), comp, feasible, tol


def _loop(a, b, parent):
    """Node pairs of the loop closed by edge ``(a, b)`` through the tree."""

    def path_to_root(node):
        out = [node]
        while parent[node] is not None:
            node = parent[node][0]
            out.append(node)
        return out

    pa, pb = path_to_root(a), path_to_root(b)
    common = set(pa) & set(pb)
    lca = next(n for n in pa if n in common)
    up_a = pa[: pa.index(lca) + 1]
    up_b = pb[: pb.index(lca) + 1]
    # a -> b (closing edge), b -> ... -> lca -> ... -> a
    nodes = [b] + up_b[1:] + list(reversed(up_a[:-1]))
    edges = [(a, b)] + list(zip(nodes[:-1], nodes[1:]))
    return tuple(edges)


def _frame_constraints(system: LevelSystem):
    ng = system.n_ground
    return [(ng + c.excited, c.ground, c.frequency) for c in system.couplings]


def solve_frame(system: LevelSystem, rtol: float = DEFAULT_FRAME_RTOL) -> RotatingFrame:
    """Find frame energies with ``eps_excited - eps_ground = omega`` on every laser.

    Zero-magnitude couplings still constrain the frame. Infeasibility is
    reported through ``feasible`` and the cycle residuals, never raised.
    """
    check_system(system)
    eps, cycles, comp, feasible, tol = solve_difference_constraints(
        system.n_levels, _frame_constraints(system), rtol)
    return RotatingFrame(eps, feasible, cycles, comp, tol)


def count_cycles(system: LevelSystem) -> int:
    """Independent loops of the laser graph: edges - touched levels + components."""
    ng = system.n_ground
    edges = {(c.ground, ng + c.excited) for c in system.couplings}
    touched = {n for e in edges for n in e}
    # union-find over touched levels
    parent = {n: n for n in touched}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    n_comp = len({find(n) for n in touched})
    return len(edges) - len(touched) + n_comp


def coupling_components(system: LevelSystem) -> np.ndarray:
    """Component id per level for the graph of couplings with nonzero magnitude."""
    ng = system.n_ground
    constraints = [(ng + c.excited, c.ground, 0.0) for c in system.couplings if c.magnitude > 0]
    _, _, comp, _, _ = solve_difference_constraints(system.n_levels, constraints)
    return comp


def build_hamiltonian(system: LevelSystem, frame: RotatingFrame | None = None) -> RwaHamiltonian:
    """Time-independent Hamiltonian in the rotating frame.

    Diagonal entries are ``E_k - eps_k`` shifted so that the first ground
    level sits at zero; the ground-excited block holds the complex Rabi
    frequencies. Detunings follow ``Delta = E_e - E_g - omega``, which is also
    the excited-minus-ground difference of the diagonal on every laser edge.
    """
    if frame is None:
        frame = solve_frame(system)
    if not frame.feasible:
        raise FrameError(
            f"no time-independent rotating frame: largest cycle residual "
            f"{frame.max_residual:.3e} exceeds {frame.tolerance:.3e}")
    ng = system.n_ground
    diag = system.energies - frame.epsilons
    diag = diag - diag[0]
    H = np.diag(diag).astype(complex)
    V = coupling_matrix(system)
    H[:ng, ng:] = V
    H[ng:, :ng] = V.conj().T
    energies = system.energies
    detunings = {
        (c.ground, c.excited): float(energies[ng + c.excited] - energies[c.ground] - c.frequency)
        for c in system.couplings
    }
    return RwaHamiltonian(H, ng, detunings, coupling_components(system))
