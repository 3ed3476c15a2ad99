"""Example systems: Lambda, M (zigzag), four-level fan, paired two-level
systems and the ten Rb-87 D1 hyperfine connectivity schemes.

Published rates are written ``gamma_{jk}`` with ``j`` the excited and ``k``
the ground level (the M-system set has ``gamma_13`` with only two excited
levels, so the other reading is impossible). Energies and laser frequencies
are chosen so that every laser has the requested detuning; only detunings
and frequency cycle sums matter downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .model import DecayChannel, LaserCoupling, Level, LevelSystem

# optical-scale energy of the excited manifold; only differences matter
EXCITED_ENERGY = 100.0


def _laser(system_levels, g, e, magnitude, detuning=0.0, phase=0.0, tag=None):
    """Coupling g_g <-> e_e (1-based) whose frequency gives ``detuning``."""
    ground, excited = system_levels
    gap = excited[e - 1].energy - ground[g - 1].energy
    return LaserCoupling(g - 1, e - 1, magnitude, phase, gap - detuning, tag)


def _decay(g, e, rate):
    return DecayChannel(g - 1, e - 1, rate)


def lambda_system(V11: float = 1.0, V21: float = 1.0,
                  gammas: tuple[float, float] = (0.5, 0.5),
                  detunings: tuple[float, float] = (0.0, 0.0)) -> LevelSystem:
    """Two ground levels sharing one excited level.

    ``gammas`` are the rates e1 -> g1 and e1 -> g2.
    """
    levels = ((Level("g1"), Level("g2")), (Level("e1", EXCITED_ENERGY),))
    couplings = (_laser(levels, 1, 1, V11, detunings[0]),
                 _laser(levels, 2, 1, V21, detunings[1]))
    decays = (_decay(1, 1, gammas[0]), _decay(2, 1, gammas[1]))
    return LevelSystem(*levels, couplings, decays)


M_RABI = {(1, 1): 1.0, (2, 1): 0.56, (2, 2): 0.23, (3, 2): 0.45}
M_EXTRA_RABI = 0.57
# (excited, ground) -> rate
M_RATES = {(1, 1): 0.04, (1, 2): 0.01, (1, 3): 0.09,
           (2, 1): 0.14, (2, 2): 0.02, (2, 3): 0.04}


def m_system(with_extra_coupling: bool = False) -> LevelSystem:
    """Zigzag g1-e1-g2-e2-g3 at resonance, optionally closed by g3-e1.

    The extra laser's frequency is fixed by the loop:
    ``omega_31 = omega_21 + omega_32 - omega_22``.
    """
    ground = tuple(Level(f"g{i}") for i in (1, 2, 3))
    excited = tuple(Level(f"e{j}", EXCITED_ENERGY) for j in (1, 2))
    levels = (ground, excited)
    couplings = [_laser(levels, g, e, v) for (g, e), v in M_RABI.items()]
    if with_extra_coupling:
        w = {(c.ground + 1, c.excited + 1): c.frequency for c in couplings}
        couplings.append(LaserCoupling(2, 0, M_EXTRA_RABI, 0.0,
                                       w[2, 1] + w[3, 2] - w[2, 2]))
    decays = tuple(_decay(g, e, r) for (e, g), r in M_RATES.items())
    return LevelSystem(ground, excited, tuple(couplings), decays)


FAN_RATES = (0.1, 0.2, 0.3, 0.4)
FAN_DETUNING = 1.0
# detuning of the laser on each ground level, per case; the detuned level of
# case b is g1 (then g2 joins it in case c)
FAN_CASES = {
    "a": (0.0, 0.0, 0.0, 0.0),
    "b": (FAN_DETUNING, 0.0, 0.0, 0.0),
    "c": (FAN_DETUNING, FAN_DETUNING, 0.0, 0.0),
    "d": (FAN_DETUNING, 2 * FAN_DETUNING, 0.0, 0.0),
}


def fan_system(case: str = "a", detunings: tuple[float, ...] | None = None,
               rabi: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0),
               rates: tuple[float, ...] = FAN_RATES) -> LevelSystem:
    """Four ground levels driven to one excited level.

    Cases: ``a`` fully degenerate, ``b`` one level detuned, ``c`` two
    degenerate pairs, ``d`` one degenerate pair with the others split.
    """
    if detunings is None:
        try:
            detunings = FAN_CASES[case]
        except KeyError:
            raise ValueError(f"unknown fan case {case!r}; choose from a, b, c, d") from None
    ground = tuple(Level(f"g{i}") for i in range(1, 5))
    excited = (Level("e1", EXCITED_ENERGY),)
    levels = (ground, excited)
    couplings = tuple(_laser(levels, i + 1, 1, rabi[i], detunings[i]) for i in range(4))
    decays = tuple(_decay(i + 1, 1, rates[i]) for i in range(4))
    return LevelSystem(ground, excited, couplings, decays)


PAIR_RATES = {(1, 1): 0.2, (1, 2): 0.5, (2, 1): 0.44, (2, 2): 0.7}


def pair_two_level(V11: complex = 1.0, V12: complex = 1.0, V21: complex = 1.0,
                   V22: complex = 1.0, ground_shift: float = 0.0,
                   rates: dict | None = None) -> LevelSystem:
    """Two ground and two excited levels, all four transitions driven.

    Rabi frequencies may be complex. ``ground_shift`` moves g2 in energy with
    all laser frequencies fixed, which splits the two ground diagonal
    entries by that amount. The closing laser ``omega_21`` always satisfies
    ``omega_21 = omega_11 + omega_22 - omega_12``.
    """
    rates = PAIR_RATES if rates is None else rates
    ground = (Level("g1"), Level("g2"))
    excited = (Level("e1", EXCITED_ENERGY), Level("e2", EXCITED_ENERGY))
    levels = (ground, excited)

    def coupling(g, e, V):
        V = complex(V)
        return _laser(levels, g, e, abs(V), phase=math.atan2(V.imag, V.real))

    c11, c12, c22 = coupling(1, 1, V11), coupling(1, 2, V12), coupling(2, 2, V22)
    c21 = coupling(2, 1, V21)
    c21 = LaserCoupling(1, 0, c21.magnitude, c21.phase,
                        c11.frequency + c22.frequency - c12.frequency)
    shifted = (Level("g1"), Level("g2", ground_shift))
    decays = tuple(_decay(g, e, r) for (e, g), r in rates.items())
    return LevelSystem(shifted, excited, (c11, c12, c21, c22), decays)


# --------------------------------------------------------------------------
# Rb-87 D1 line: 5S1/2 F=2, F=1 -> 5P1/2 F'=1

# Laser A drives F=2 <-> F'=1, laser B drives F=1 <-> F'=1.
RB87_POLARIZATIONS = {
    1: (("sigma+", "sigma-"), ()),
    2: ((), ("sigma+", "sigma-")),
    3: (("sigma+", "sigma-"), ("sigma+", "sigma-")),
    4: (("s", "sigma+", "sigma-"), ()),
    5: ((), ("s", "sigma+", "sigma-")),
    6: (("s",), ("sigma+", "sigma-")),
    7: (("sigma+", "sigma-"), ("s",)),
    8: (("s", "sigma+", "sigma-"), ("sigma+", "sigma-")),
    9: (("sigma+", "sigma-"), ("s", "sigma+", "sigma-")),
    10: (("s", "sigma+", "sigma-"), ("s", "sigma+", "sigma-")),
}
DELTA_M = {"s": 0, "sigma+": 1, "sigma-": -1}

# F=1, m=0 -> F'=1, m'=0 has zero strength (Clebsch-Gordan coefficient
# <1 0; 1 0 | 1 0> = 0), so a linearly polarized B laser skips it.
FORBIDDEN_LINES = frozenset({((1, 0), (1, 0))})

RB87_RATE = 0.1
RB87_RABI = 1.0
# arbitrary scale; lasers are resonant so only the frame matters
RB87_ENERGY = {2: 6.8, 1: 0.0}


def rb87_levels():
    ground = [((2, m), Level(f"F2,m={m:+d}", RB87_ENERGY[2])) for m in range(-2, 3)]
    ground += [((1, m), Level(f"F1,m={m:+d}", RB87_ENERGY[1])) for m in range(-1, 2)]
    excited = [((1, m), Level(f"F'1,m={m:+d}", EXCITED_ENERGY)) for m in range(-1, 2)]
    return ground, excited


def _dipole_allowed(gq, eq) -> bool:
    return abs(eq[1] - gq[1]) <= 1 and (gq, eq) not in FORBIDDEN_LINES


def rb87_scheme(scheme_id: int) -> LevelSystem:
    """Rb-87 D1 connectivity scheme 1..10.

    Ground: F=2 (m=-2..2) then F=1 (m=-1..1); excited F'=1 (m'=-1..1). Each
    polarization of each laser drives every transition with ``m' = m + dm``
    at one common Rabi frequency, tagged ``"A:<pol>"`` or ``"B:<pol>"``.
    Every excited sublevel decays at equal rate to all dipole-connected
    ground sublevels.
    """
    if scheme_id not in RB87_POLARIZATIONS:
        raise ValueError(f"Rb-87 scheme must be 1..10, got {scheme_id!r}")
    ground, excited = rb87_levels()
    ground_levels = tuple(lv for _, lv in ground)
    excited_levels = tuple(lv for _, lv in excited)
    pols_a, pols_b = RB87_POLARIZATIONS[scheme_id]
    couplings = []
    for i, (gq, glv) in enumerate(ground):
        F = gq[0]
        laser, pols = ("A", pols_a) if F == 2 else ("B", pols_b)
        for j, (eq, elv) in enumerate(excited):
            for pol in pols:
                if eq[1] - gq[1] == DELTA_M[pol] and _dipole_allowed(gq, eq):
                    couplings.append(LaserCoupling(i, j, RB87_RABI, 0.0,
                                                   elv.energy - glv.energy, f"{laser}:{pol}"))
    decays = tuple(DecayChannel(i, j, RB87_RATE)
                   for j, (eq, _) in enumerate(excited)
                   for i, (gq, _) in enumerate(ground) if _dipole_allowed(gq, eq))
    return LevelSystem(ground_levels, excited_levels, tuple(couplings), decays)


# --------------------------------------------------------------------------
# registry

@dataclass(frozen=True)
class PresetDescriptor:
    name: str
    description: str
    build: Callable[[], LevelSystem]
    parameters: dict = field(default_factory=dict)


def _registry() -> dict[str, PresetDescriptor]:
    out = {
        "lambda": PresetDescriptor("lambda", "Lambda system at two-photon resonance",
                                   lambda_system, {"V11": 1.0, "V21": 1.0}),
        "m": PresetDescriptor("m", "M (zigzag) system, 3 ground + 2 excited",
                              m_system, dict(M_RABI=M_RABI, M_RATES=M_RATES)),
        "m-loop": PresetDescriptor("m-loop", "M system closed by V31 = 0.57",
                                   lambda: m_system(True), {"V31": M_EXTRA_RABI}),
        "pair": PresetDescriptor("pair", "paired two-level systems at the dark condition",
                                 pair_two_level, {"V": (1, 1, 1, 1)}),
        "pair-bright": PresetDescriptor("pair-bright", "paired two-level systems with V22 = 2",
                                        lambda: pair_two_level(V22=2.0), {"V22": 2.0}),
        "pair-lambda": PresetDescriptor("pair-lambda", "paired system with V12 = V22 = 0",
                                        lambda: pair_two_level(V12=0.0, V22=0.0), {}),
    }
    for case in "abcd":
        out[f"fan-{case}"] = PresetDescriptor(
            f"fan-{case}", f"four-level fan, detuning case {case}",
            (lambda c=case: fan_system(c)), {"detunings": FAN_CASES[case]})
    for k in range(1, 11):
        out[f"rb87-{k}"] = PresetDescriptor(
            f"rb87-{k}", f"Rb-87 hyperfine scheme {k}", (lambda k=k: rb87_scheme(k)),
            {"polarizations": RB87_POLARIZATIONS[k]})
    return out


PRESETS = _registry()


def get_preset(name: str) -> LevelSystem:
    try:
        return PRESETS[name].build()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
