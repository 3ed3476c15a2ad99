"""Dark-state classification from the ground block of the RWA Hamiltonian.

A stationary dark state lives on the ground manifold, commutes with the
ground block ``PHP`` and is annihilated by the coupling block ``QHP``. So the
ground levels are split into groups of equal diagonal energy and, inside each
group, the dark pure states are the kernel of the ``N_e x d_s`` coupling
block restricted to the group's members.

Groups are also split by connected component of the laser graph: levels
that no laser links can be given independent frame energies, so a diagonal
coincidence across components is a choice of frame rather than a physical
degeneracy. The Liouvillian kernel count still merges components that share
an energy, because coherences between them are stationary in the chosen frame.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .linalg import DEFAULT_RANK_RTOL, cluster_values, null_space
from .liouville import Superoperator, vec
from .model import LevelSystem, coupling_matrix
from .rwa import RwaHamiltonian, build_hamiltonian

DEFAULT_DEGENERACY_TOL = 1e-8

CASE_1 = "case1"
CASE_2 = "case2"

# Rabi-condition status of a group
UNCONDITIONAL = "unconditional"
SATISFIED = "satisfied"
TUNABLE = "tunable"
UNSATISFIABLE = "unsatisfiable"


@dataclass
class DegenerateGroup:
    energy: float
    members: tuple[int, ...]
    component: int
    kernel_basis: np.ndarray | None = None
    coupled_excited: tuple[int, ...] = ()
    rank: int = 0
    case: str = CASE_1
    condition: str = UNCONDITIONAL
    rabi_residual: "RabiResidual | None" = None

    @property
    def dimension(self) -> int:
        return len(self.members)

    @property
    def kernel_dim(self) -> int:
        return 0 if self.kernel_basis is None else self.kernel_basis.shape[1]

    @property
    def is_sink(self) -> bool:
        """Single ground level that no laser touches."""
        return self.dimension == 1 and not self.coupled_excited

    @property
    def pure(self) -> bool:
        return self.kernel_dim == 1

    @property
    def conditional_dim(self) -> int:
        """Dark dimension once the Rabi condition is met (rank drops by one)."""
        if self.kernel_dim or self.case == CASE_1:
            return self.kernel_dim
        return self.dimension - self.rank + 1

    def projector(self, n_ground: int) -> np.ndarray:
        P = np.zeros((n_ground, n_ground))
        P[list(self.members), list(self.members)] = 1.0
        return P


@dataclass
class RabiResidual:
    value: complex
    kind: str  # "determinant" or "singular_value"

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def note(self) -> str:
        if self.kind == "determinant":
            return ("determinant of the square coupling block; a dark state exists "
                    "only where it vanishes")
        return ("smallest singular value of the rectangular coupling block; a dark "
                "state exists only where it vanishes")


@dataclass
class DarkClassification:
    groups: list[DegenerateGroup]
    n_ground: int
    n_excited: int
    degeneracy_tol: float
    rank_rtol: float
    liouvillian_kernel_dim: int = 0
    energy_blocks: list[list[int]] = field(default_factory=list)

    @property
    def total_dark_dim(self) -> int:
        return sum(g.kernel_dim for g in self.groups)

    @property
    def unique(self) -> bool:
        return self.liouvillian_kernel_dim == 1

    @property
    def pure_guaranteed(self) -> bool:
        return self.unique

    @property
    def has_dark_state(self) -> bool:
        return self.total_dark_dim > 0

    def dark_groups(self, include_sinks: bool = True) -> list[DegenerateGroup]:
        return [g for g in self.groups if g.kernel_dim and (include_sinks or not g.is_sink)]

    def dark_vectors(self) -> np.ndarray:
        """All kernel vectors as columns over the ground manifold."""
        cols = [g.kernel_basis for g in self.groups if g.kernel_dim]
        if not cols:
            return np.zeros((self.n_ground, 0), dtype=complex)
        return np.hstack(cols)


def degenerate_groups(H: RwaHamiltonian, tol: float = DEFAULT_DEGENERACY_TOL) -> list[DegenerateGroup]:
    """Partition ground levels by (laser-graph component, diagonal energy).

    Within a component, diagonal values are clustered with gaps larger than
    ``tol`` splitting clusters. Singletons are kept. Groups come back sorted
    by energy, then by first member.
    """
    ng = H.n_ground
    diag = H.ground_diagonal
    comps = H.components[:ng] if H.components is not None else np.zeros(ng, dtype=int)
    groups = []
    for comp in np.unique(comps):
        idx = np.flatnonzero(comps == comp)
        for cluster in cluster_values(diag[idx], tol):
            members = tuple(int(idx[k]) for k in cluster)
            groups.append(DegenerateGroup(float(np.mean(diag[list(members)])), members, int(comp)))
    groups.sort(key=lambda g: (g.energy, g.members[0]))
    return groups


def _coupling_block(H: RwaHamiltonian, group: DegenerateGroup) -> np.ndarray:
    """``QHP_s`` as an ``N_e x d_s`` matrix."""
    ng = H.n_ground
    return H.matrix[ng:, list(group.members)]


def rabi_condition_residual(system: LevelSystem, H: RwaHamiltonian,
                            group: DegenerateGroup) -> RabiResidual:
    """How far a case-2 group is from supporting a dark state.

    For a square block (as many coupled excited levels as members) this is
    the determinant of the Rabi-frequency submatrix, rows = members and
    columns = coupled excited levels, so that for two levels it reads
    ``V11 V22 - V12 V21``. Otherwise it is the smallest singular value.
    """
    excited = _coupled_excited(H, group)
    if len(excited) <= group.dimension - 1:
        raise ValueError("case-1 group: a dark state exists for any Rabi frequencies")
    V = coupling_matrix(system)[np.ix_(list(group.members), list(excited))]
    if V.shape[0] == V.shape[1]:
        return RabiResidual(complex(np.linalg.det(V)), "determinant")
    s = np.linalg.svd(V, compute_uv=False)
    return RabiResidual(complex(s[-1]), "singular_value")


def _coupled_excited(H: RwaHamiltonian, group: DegenerateGroup) -> tuple[int, ...]:
    block = _coupling_block(H, group)
    return tuple(int(j) for j in np.flatnonzero(np.any(block != 0, axis=1)))


def tied_condition_satisfiable(system: LevelSystem, group: DegenerateGroup,
                               excited: tuple[int, ...], rel_tol: float = 1e-12) -> bool | None:
    """Can the determinant condition be met by tuning the laser amplitudes?

    Couplings sharing a ``tag`` are one amplitude; untagged couplings are
    independent. Expanding the determinant over permutations and collecting
    terms by the multiset of amplitudes gives a polynomial. A single
    surviving monomial vanishes only when some amplitude is zero, which would
    remove a laser, so the condition is unsatisfiable. Returns ``None`` when
    the block is not square or too large to expand.
    """
    members = list(group.members)
    if len(members) != len(excited) or len(members) > 7:
        return None
    V = coupling_matrix(system)
    tag_of: dict[tuple[int, int], str] = {}
    reference: dict[str, complex] = {}
    for c in system.couplings:
        if c.magnitude == 0:
            continue
        tag = c.tag if c.tag is not None else f"g{c.ground}e{c.excited}"
        tag_of[(c.ground, c.excited)] = tag
        reference.setdefault(tag, c.rabi)

    poly: dict[tuple[str, ...], complex] = {}
    for perm in itertools.permutations(range(len(members))):
        term = 1.0 + 0j
        tags = []
        for row, col in enumerate(perm):
            g, e = members[row], excited[col]
            if V[g, e] == 0:
                break
            tag = tag_of[(g, e)]
            term *= V[g, e] / reference[tag]
            tags.append(tag)
        else:
            key = tuple(sorted(tags))
            poly[key] = poly.get(key, 0) + _perm_sign(perm) * term
    scale = max([1.0] + [abs(v) for v in poly.values()])
    alive = [k for k, v in poly.items() if abs(v) > rel_tol * scale]
    if not alive:
        return True
    return len(alive) > 1


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def dark_subspaces(system: LevelSystem, H: RwaHamiltonian,
                   degeneracy_tol: float = DEFAULT_DEGENERACY_TOL,
                   rank_rtol: float = DEFAULT_RANK_RTOL) -> DarkClassification:
    """Classify every stationary dark state of ``system``.

    Fills each degenerate group with its kernel basis, rank, case label and,
    for case-2 groups, the Rabi-frequency residual and whether the condition
    can be met at all. Phases enter through the complex couplings.
    """
    ng = H.n_ground
    groups = degenerate_groups(H, degeneracy_tol)
    for grp in groups:
        block = _coupling_block(H, grp)
        kernel = null_space(block, rank_rtol)
        basis = np.zeros((ng, kernel.shape[1]), dtype=complex)
        basis[list(grp.members), :] = kernel
        grp.kernel_basis = basis
        grp.rank = grp.dimension - kernel.shape[1]
        grp.coupled_excited = _coupled_excited(H, grp)
        if len(grp.coupled_excited) <= grp.dimension - 1:
            grp.case = CASE_1
            grp.condition = UNCONDITIONAL
            continue
        grp.case = CASE_2
        grp.rabi_residual = rabi_condition_residual(system, H, grp)
        if grp.kernel_dim:
            grp.condition = SATISFIED
        else:
            ok = tied_condition_satisfiable(system, grp, grp.coupled_excited)
            grp.condition = UNSATISFIABLE if ok is False else TUNABLE

    blocks = cluster_values([g.energy for g in groups], degeneracy_tol)
    kernel_dim = sum(sum(groups[k].kernel_dim for k in block) ** 2 for block in blocks)
    return DarkClassification(groups, ng, H.dim - ng, degeneracy_tol, rank_rtol,
                              kernel_dim, blocks)


def classify_system(system: LevelSystem, **kwargs) -> DarkClassification:
    return dark_subspaces(system, build_hamiltonian(system), **kwargs)


# --------------------------------------------------------------------------
# verification of a candidate dark state

@dataclass
class DarkVerdict:
    q_norm: float
    nonhermitian_residual: float
    lindblad_residual: float
    block_defect: float
    tol: float

    @property
    def dark(self) -> bool:
        return max(self.q_norm, self.nonhermitian_residual,
                   self.lindblad_residual, self.block_defect) <= self.tol


def check_density_matrix(rho: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real:.6g}, expected 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -tol:
        raise ValueError("density matrix has negative eigenvalues")
    return rho


def verify_dark(rho: np.ndarray, L: Superoperator, LH: Superoperator,
                classification: DarkClassification | None = None,
                tol: float = 1e-8) -> DarkVerdict:
    """Check a density matrix against every dark-state condition.

    Reports the weight outside the ground block, the residuals under the
    non-Hermitian part and the full generator, and, given a classification,
    the coherence between different energy blocks.
    """
    rho = check_density_matrix(rho)
    ng = L.n_ground
    ground = rho[:ng, :ng]
    outside = rho.copy()
    outside[:ng, :ng] = 0
    q_norm = float(np.linalg.norm(outside))
    lh = float(np.linalg.norm(LH.matrix @ vec(rho)))
    lf = float(np.linalg.norm(L.matrix @ vec(rho)))
    defect = 0.0
    if classification is not None:
        mask = np.zeros((ng, ng), dtype=bool)
        for block in classification.energy_blocks:
            members = [m for k in block for m in classification.groups[k].members]
            mask[np.ix_(members, members)] = True
        defect = float(np.linalg.norm(np.where(mask, 0, ground)))
    return DarkVerdict(q_norm, lh, lf, defect, tol)


def dark_state_oracle_dim(H: RwaHamiltonian,
                          degeneracy_tol: float = DEFAULT_DEGENERACY_TOL,
                          rank_rtol: float = DEFAULT_RANK_RTOL) -> int:
    """Count dark pure states without forming groups.

    For every distinct ground diagonal energy ``E`` a dark vector ``v`` on
    the ground manifold satisfies ``(H - E) v = 0``; summing the null-space
    dimensions of the ground columns of ``H - E`` counts them all.
    """
    ng = H.n_ground
    total = 0
    for cluster in cluster_values(H.ground_diagonal, degeneracy_tol):
        E = float(np.mean(H.ground_diagonal[cluster]))
        A = (H.matrix - E * np.eye(H.dim))[:, :ng]
        total += null_space(A, rank_rtol).shape[1]
    return total
