"""Time propagation, steady states and conserved quantities of a Lindblad generator."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from .classify import check_density_matrix
from .linalg import DEFAULT_RANK_RTOL, null_space
from .liouville import Superoperator, build_lindblad, unvec, vec
from .model import DecayChannel, LevelSystem
from .rwa import FrameError, RwaHamiltonian, build_hamiltonian, solve_frame

DEFAULT_T_END = 1e3


class DefectiveKernelError(RuntimeError):
    """Left and right null spaces of the generator differ in dimension."""


@dataclass
class TrajectoryResult:
    times: np.ndarray
    states: np.ndarray  # (n_times, N, N)
    n_ground: int
    labels: tuple[str, ...] = ()

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.einsum("tii->ti", self.states))

    @property
    def purity(self) -> np.ndarray:
        return np.real(np.einsum("tij,tji->t", self.states, self.states))

    @property
    def excited_population(self) -> np.ndarray:
        return self.populations[:, self.n_ground:].sum(axis=1)

    @property
    def trace(self) -> np.ndarray:
        return np.real(np.einsum("tii->t", self.states))

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def projected_populations(self, basis: np.ndarray) -> np.ndarray:
        """``<phi_n| rho(t) |phi_n>`` for the columns ``phi_n`` of ``basis``."""
        return np.real(np.einsum("in,tij,jn->tn", basis.conj(), self.states, basis))


@dataclass
class ConservedQuantitySet:
    left: list[np.ndarray]
    right: list[np.ndarray]
    pairing_condition: float

    def __len__(self):
        return len(self.right)

    @property
    def pairing(self) -> np.ndarray:
        """``Tr(J_k^dagger rho_l)``; the identity after biorthogonalization."""
        J = np.column_stack([vec(j) for j in self.left]) if self.left else np.zeros((0, 0))
        R = np.column_stack([vec(r) for r in self.right]) if self.right else np.zeros((0, 0))
        return J.conj().T @ R

    def values(self, rho: np.ndarray) -> np.ndarray:
        return np.array([np.vdot(vec(J), vec(rho)) for J in self.left])


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def excited_population(rho: np.ndarray, n_ground: int) -> float:
    return float(np.real(np.trace(rho[n_ground:, n_ground:])))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = a - b
    return 0.5 * float(np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T))).sum())


def propagate(L: Superoperator, rho0: np.ndarray, times: Sequence[float]) -> TrajectoryResult:
    """Evolve ``rho0`` under ``L`` and sample at ``times``.

    Each step multiplies by ``expm(L * dt)`` for the step increment; equal
    increments reuse one exponential.
    """
    rho0 = check_density_matrix(rho0)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] != 0:
        raise ValueError("times must be a non-empty 1-D sequence starting at 0")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly ascending")
    n = rho0.shape[0]
    if L.matrix.shape != (n * n, n * n):
        raise ValueError(f"dimension mismatch: generator {L.matrix.shape} for {n}x{n} state")

    states = np.empty((times.size, n, n), dtype=complex)
    states[0] = rho0
    v = vec(rho0)
    cache: dict[float, np.ndarray] = {}
    for k in range(1, times.size):
        dt = float(times[k] - times[k - 1])
        key = round(dt, 12)
        if key not in cache:
            cache[key] = expm(L.matrix * dt)
        v = cache[key] @ v
        states[k] = unvec(v, n)
    return TrajectoryResult(times, states, L.n_ground, L.labels)


def evolve_to(L: Superoperator, rho0: np.ndarray, t: float) -> np.ndarray:
    return propagate(L, rho0, [0.0, t]).final


def relax(L: Superoperator, rho0: np.ndarray, t_end: float = DEFAULT_T_END,
          tol: float = 1e-6) -> tuple[np.ndarray, bool, float]:
    """Propagate to ``t_end`` and check ``|L vec(rho)| < tol``; doubles ``t_end`` once.

    Returns ``(rho, converged, t_used)``.
    """
    rho = evolve_to(L, rho0, t_end)
    if np.linalg.norm(L.matrix @ vec(rho)) < tol:
        return rho, True, t_end
    rho = evolve_to(L, rho0, 2 * t_end)
    return rho, bool(np.linalg.norm(L.matrix @ vec(rho)) < tol), 2 * t_end


def steady_state_basis(L: Superoperator, rtol: float = DEFAULT_RANK_RTOL) -> list[np.ndarray]:
    """Orthonormal basis of the right null space of ``L``, as N x N operators.

    Singular values at or below ``N^2 * s_max * rtol`` count as zero.
    """
    K = null_space(L.matrix, rtol)
    return [unvec(K[:, k]) for k in range(K.shape[1])]


def conserved_quantities(L: Superoperator, rtol: float = DEFAULT_RANK_RTOL) -> ConservedQuantitySet:
    """Biorthogonal left/right null-space pairs of ``L``.

    Left vectors ``J_k`` satisfy ``J_k^dagger L = 0`` so ``Tr(J_k^dagger rho(t))``
    is constant in time. The left basis is rescaled by the inverse pairing
    matrix so that ``Tr(J_k^dagger rho_l) = delta_kl``.
    """
    R = null_space(L.matrix, rtol)
    U = null_space(L.matrix.conj().T, rtol)
    if R.shape[1] != U.shape[1]:
        raise DefectiveKernelError(
            f"right kernel has dimension {R.shape[1]}, left kernel {U.shape[1]}")
    if R.shape[1] == 0:
        return ConservedQuantitySet([], [], 1.0)
    G = U.conj().T @ R
    cond = float(np.linalg.cond(G))
    if not cond < 1.0 / rtol:
        # left and right kernels not paired: zero is a defective eigenvalue
        raise DefectiveKernelError(f"kernel pairing matrix is singular (condition {cond:.3g})")
    J = U @ np.linalg.inv(G).conj().T
    return ConservedQuantitySet([unvec(J[:, k]) for k in range(J.shape[1])],
                                [unvec(R[:, k]) for k in range(R.shape[1])], cond)


def asymptotic_state(cq: ConservedQuantitySet, rho0: np.ndarray) -> np.ndarray:
    """``sum_k Tr(J_k^dagger rho0) rho_k``: the long-time limit from ``rho0``."""
    n = rho0.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for J, R in zip(cq.left, cq.right):
        out += np.vdot(vec(J), vec(rho0)) * R
    return 0.5 * (out + out.conj().T)


def eigenbasis(H: RwaHamiltonian) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of ``H``, most excited-weighted first.

    States without excited weight (dark states) come last; ties are broken
    by ascending energy.
    """
    w, v = np.linalg.eigh(H.matrix)
    weight = np.round(np.sum(np.abs(v[H.n_ground:, :]) ** 2, axis=0), 10)
    order = np.lexsort((w, -weight))
    return w[order], v[:, order]


def projector(n: int, k: int) -> np.ndarray:
    rho = np.zeros((n, n), dtype=complex)
    rho[k, k] = 1.0
    return rho


# --------------------------------------------------------------------------
# parameter scans

@dataclass(frozen=True)
class ScanAxis:
    path: str
    values: np.ndarray

    @classmethod
    def linspace(cls, path: str, start: float, stop: float, num: int) -> "ScanAxis":
        return cls(path, np.linspace(start, stop, int(num)))


@dataclass
class ScanResult:
    axis_a: ScanAxis
    axis_b: ScanAxis
    observable: str
    grid: np.ma.MaskedArray
    meta: dict = field(default_factory=dict)


def _parse_pair(spec: str) -> tuple[int, int]:
    g, e = spec.split(".")
    return int(g) - 1, int(e) - 1


def apply_parameter(system: LevelSystem, path: str, value: float) -> LevelSystem:
    """Return a copy of ``system`` with one parameter changed.

    Paths use 1-based indices:

    ``energy.g.I`` / ``energy.e.J``   level energy
    ``rabi.I.J``                      signed real Rabi frequency (negative = phase pi)
    ``magnitude.I.J``, ``phase.I.J``, ``frequency.I.J``
    ``detuning.I.J``                  sets the laser frequency to give this detuning
    ``rate.I.J``                      decay rate e_J -> g_I
    ``decay_scale``                   multiplies every decay rate
    """
    kind, _, rest = path.partition(".")
    if kind == "decay_scale":
        decays = tuple(DecayChannel(d.ground, d.excited, d.rate * value) for d in system.decays)
        return system.replace(decays=decays)
    if kind == "energy":
        manifold, _, idx = rest.partition(".")
        k = int(idx) - 1
        levels = list(system.ground if manifold == "g" else system.excited)
        if manifold not in ("g", "e") or not 0 <= k < len(levels):
            raise ValueError(f"bad parameter path {path!r}")
        levels[k] = type(levels[k])(levels[k].label, float(value))
        key = "ground" if manifold == "g" else "excited"
        return system.replace(**{key: tuple(levels)})
    if kind == "rate":
        g, e = _parse_pair(rest)
        decays = [d for d in system.decays if not (d.ground == g and d.excited == e)]
        decays.append(DecayChannel(g, e, float(value)))
        return system.replace(decays=tuple(decays))
    if kind not in ("rabi", "magnitude", "phase", "frequency", "detuning"):
        raise ValueError(f"unknown parameter path {path!r}")
    g, e = _parse_pair(rest)
    couplings = list(system.couplings)
    for k, c in enumerate(couplings):
        if c.ground == g and c.excited == e:
            break
    else:
        raise ValueError(f"no coupling on g{g + 1} <-> e{e + 1} for path {path!r}")
    if kind == "rabi":
        new = replace(c, magnitude=abs(value), phase=math.pi if value < 0 else 0.0)
    elif kind == "magnitude":
        new = replace(c, magnitude=float(value))
    elif kind == "phase":
        new = replace(c, phase=float(value))
    elif kind == "frequency":
        new = replace(c, frequency=float(value))
    else:
        gap = system.excited[e].energy - system.ground[g].energy
        new = replace(c, frequency=gap - float(value))
    couplings[k] = new
    return system.replace(couplings=tuple(couplings))


OBSERVABLES: dict[str, Callable[[np.ndarray, int], float]] = {
    "excited_population": excited_population,
    "purity": lambda rho, ng: purity(rho),
}


def asymptotic_observable(system: LevelSystem, observable: str = "excited_population",
                          rho0: np.ndarray | None = None) -> float:
    """Observable of the long-time state; raises ``FrameError`` if no RWA frame exists."""
    frame = solve_frame(system)
    H = build_hamiltonian(system, frame)
    L = build_lindblad(system, H)
    if rho0 is None:
        rho0 = projector(system.n_levels, system.n_ground)
    rho = asymptotic_state(conserved_quantities(L), rho0)
    return OBSERVABLES[observable](rho, system.n_ground)


def scan_threads() -> int:
    env = os.environ.get("DARKSTATE_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def parameter_scan(system: LevelSystem, axis_a: ScanAxis, axis_b: ScanAxis,
                   observable: str = "excited_population", rho0: np.ndarray | None = None,
                   threads: int | None = None) -> ScanResult:
    """Asymptotic ``observable`` over a 2-D grid of parameter values.

    Row ``i`` follows ``axis_a.values[i]``, column ``j`` ``axis_b.values[j]``.
    Grid points without a time-independent frame are masked.
    """
    if observable not in OBSERVABLES:
        raise ValueError(f"unknown observable {observable!r}; choose from {sorted(OBSERVABLES)}")
    shape = (axis_a.values.size, axis_b.values.size)

    def point(ij):
        i, j = ij
        s = apply_parameter(system, axis_a.path, axis_a.values[i])
        s = apply_parameter(s, axis_b.path, axis_b.values[j])
        try:
            return ij, asymptotic_observable(s, observable, rho0)
        except FrameError:
            return ij, None

    data = np.zeros(shape)
    mask = np.zeros(shape, dtype=bool)
    cells = [(i, j) for i in range(shape[0]) for j in range(shape[1])]
    with ThreadPoolExecutor(max_workers=threads or scan_threads()) as pool:
        for (i, j), value in pool.map(point, cells):
            if value is None:
                mask[i, j] = True
            else:
                data[i, j] = value
    return ScanResult(axis_a, axis_b, observable, np.ma.array(data, mask=mask))
