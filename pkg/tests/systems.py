"""Random level systems shared by the property and acceptance suites."""

from __future__ import annotations

import numpy as np

from darkstate import DecayChannel, LaserCoupling, Level, LevelSystem

# ground diagonal targets drawn from a small set so degeneracies are common
GROUND_TARGETS = (0.0, 0.0, 0.35, -0.8)


def random_system(rng: np.random.Generator, max_ground: int = 5, max_excited: int = 3,
                  coupling_prob: float = 0.6, dense_decay: bool = True) -> LevelSystem:
    """Random feasible system with forced ground degeneracies.

    Level energies are ``diagonal + eps`` and every laser frequency is
    ``eps_e - eps_g``, so a rotating frame always exists even when the
    couplings form loops.
    """
    ng = int(rng.integers(1, max_ground + 1))
    ne = int(rng.integers(1, max_excited + 1))
    eps_g = rng.uniform(0, 10, ng)
    eps_e = rng.uniform(50, 60, ne)
    diag_g = rng.choice(GROUND_TARGETS, ng)
    diag_e = rng.uniform(-1, 1, ne)
    ground = tuple(Level(f"g{i + 1}", float(diag_g[i] + eps_g[i])) for i in range(ng))
    excited = tuple(Level(f"e{j + 1}", float(diag_e[j] + eps_e[j])) for j in range(ne))
    couplings = tuple(
        LaserCoupling(i, j, float(rng.uniform(0.2, 2.0)), float(rng.uniform(0, 2 * np.pi)),
                      float(eps_e[j] - eps_g[i]))
        for i in range(ng) for j in range(ne) if rng.random() < coupling_prob)
    if dense_decay:
        decays = tuple(DecayChannel(i, j, float(rng.uniform(0.05, 0.5)))
                       for i in range(ng) for j in range(ne))
    else:
        decays = tuple(DecayChannel(int(rng.integers(ng)), j, float(rng.uniform(0.05, 0.5)))
                       for j in range(ne))
    return LevelSystem(ground, excited, couplings, decays)


def random_systems(n: int, seed: int = 20240607, **kw) -> list[LevelSystem]:
    rng = np.random.default_rng(seed)
    return [random_system(rng, **kw) for _ in range(n)]
