"""Column-stacked Lindblad superoperators.

Density matrices are vectorized by stacking columns (``order="F"``), under
which ``A @ rho @ B^dagger`` becomes ``kron(B.conj(), A) @ vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import LevelSystem, check_system, rate_matrix
from .rwa import RwaHamiltonian

MAX_LEVELS = 32

FULL = "full"
NON_HERMITIAN = "non_hermitian"
JUMP = "jump"


@dataclass(frozen=True)
class Superoperator:
    matrix: np.ndarray
    kind: str
    labels: tuple[str, ...]
    n_ground: int
    stacking: str = "column"

    @property
    def dim(self) -> int:
        return len(self.labels)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho))

    def __add__(self, other: "Superoperator") -> "Superoperator":
        _check_compatible(self, other)
        return Superoperator(self.matrix + other.matrix, FULL, self.labels, self.n_ground)


@dataclass(frozen=True)
class GammaOperator:
    """Total decay rate of every excited level; zero on the ground manifold."""

    excited_rates: np.ndarray
    n_ground: int

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(np.concatenate([np.zeros(self.n_ground), self.excited_rates]))


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape(dim, dim, order="F")


def sandwich(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix of ``rho -> A rho B^dagger`` in the column-stacked basis."""
    return np.kron(np.conj(B), A)


def _check_compatible(a: Superoperator, b: Superoperator):
    if a.matrix.shape != b.matrix.shape:
        raise ValueError(f"dimension mismatch: {a.matrix.shape} vs {b.matrix.shape}")


def _check_dims(system: LevelSystem, H: RwaHamiltonian):
    check_system(system)
    n = system.n_levels
    if n > MAX_LEVELS:
        raise ValueError(f"{n} levels exceeds the dense limit of {MAX_LEVELS}")
    if H.matrix.shape != (n, n) or H.n_ground != system.n_ground:
        raise ValueError(
            f"dimension mismatch: Hamiltonian {H.matrix.shape} for a {n}-level system")


def _lowering_ops(system: LevelSystem):
    """``(rate, sigma)`` with ``sigma = |g_i><e_j|`` for every positive-rate channel."""
    ng, n = system.n_ground, system.n_levels
    G = rate_matrix(system)
    for i, j in zip(*np.nonzero(G)):
        sigma = np.zeros((n, n))
        sigma[i, ng + j] = 1.0
        yield G[i, j], sigma


def gamma_operator(system: LevelSystem) -> GammaOperator:
    return GammaOperator(rate_matrix(system).sum(axis=0), system.n_ground)


def effective_hamiltonian(system: LevelSystem, H: RwaHamiltonian) -> np.ndarray:
    """Non-Hermitian ``H - i Gamma`` (Gamma = half the decay anticommutator weight).

    The anticommutator term of every dissipator contributes
    ``-(1/2) {sigma^dag sigma, rho}``, so the effective Hamiltonian carries
    ``Gamma / 2`` on each excited level.
    """
    return H.matrix - 0.5j * gamma_operator(system).matrix


def build_nonhermitian(system: LevelSystem, H: RwaHamiltonian) -> Superoperator:
    _check_dims(system, H)
    Heff = effective_hamiltonian(system, H)
    eye = np.eye(system.n_levels)
    # rho Heff^dag = I rho (Heff)^dag maps to kron(conj(Heff), I)
    M = -1j * (sandwich(Heff, eye) - sandwich(eye, Heff))
    return Superoperator(M, NON_HERMITIAN, tuple(system.labels), system.n_ground)


def build_jump(system: LevelSystem) -> Superoperator:
    check_system(system)
    n = system.n_levels
    M = np.zeros((n * n, n * n), dtype=complex)
    for rate, sigma in _lowering_ops(system):
        M += rate * sandwich(sigma, sigma)
    return Superoperator(M, JUMP, tuple(system.labels), system.n_ground)


def build_lindblad(system: LevelSystem, H: RwaHamiltonian) -> Superoperator:
    """Full generator ``-i[H, .] + sum_ij gamma_ij D_ij`` assembled term by term."""
    _check_dims(system, H)
    n = system.n_levels
    eye = np.eye(n)
    Hm = H.matrix
    M = -1j * (sandwich(Hm, eye) - sandwich(eye, Hm.conj().T))
    for rate, sigma in _lowering_ops(system):
        sds = sigma.conj().T @ sigma
        M += rate * (sandwich(sigma, sigma)
                     - 0.5 * sandwich(sds, eye) - 0.5 * sandwich(eye, sds))
    return Superoperator(M, FULL, tuple(system.labels), system.n_ground)


def trace_row(dim: int) -> np.ndarray:
    """Row vector ``vec(I)^T``; ``trace_row @ vec(rho) == Tr rho``."""
    return vec(np.eye(dim))
