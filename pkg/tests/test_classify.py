import numpy as np
import pytest

from darkstate.classify import (CASE_1, CASE_2, classify_system, dark_state_oracle_dim,
                                dark_subspaces, degenerate_groups, rabi_condition_residual,
                                tied_condition_satisfiable, verify_dark)
from darkstate.liouville import build_lindblad, build_nonhermitian
from darkstate.model import DecayChannel, LaserCoupling, make_system
from darkstate.presets import PRESETS, fan_system, get_preset, lambda_system, pair_two_level
from darkstate.rwa import build_hamiltonian


def lambda_dark_vector(V11, V21):
    v = np.array([V21, -V11], dtype=complex)
    return v / np.linalg.norm(v)


@pytest.mark.parametrize("V11, V21", [(1.0, 1.0), (1.0, 0.3), (0.2, 2.0)])
def test_lambda_closed_form(V11, V21):
    c = classify_system(lambda_system(V11, V21))
    assert c.unique and c.total_dark_dim == 1
    v = c.dark_vectors()[:, 0]
    assert abs(np.vdot(lambda_dark_vector(V11, V21), v)) == pytest.approx(1.0)


def test_lambda_detuned_is_bright():
    c = classify_system(lambda_system(detunings=(0.0, 0.3)))
    assert c.total_dark_dim == 0
    assert [g.dimension for g in c.groups] == [1, 1]


def test_degenerate_groups_split_by_energy():
    H = build_hamiltonian(fan_system("d"))
    groups = degenerate_groups(H)
    assert sorted(g.members for g in groups) == [(0,), (1,), (2, 3)]


@pytest.mark.parametrize("case, dims", [
    ("a", [3]), ("b", [2, 0]), ("c", [1, 1]), ("d", [0, 0, 1])])
def test_fan_group_kernels(case, dims):
    c = classify_system(fan_system(case))
    got = sorted((g.kernel_dim for g in c.groups), reverse=True)
    assert got == sorted(dims, reverse=True)


def test_pair_case_two():
    c = classify_system(pair_two_level())
    (g,) = c.groups
    assert g.case == CASE_2 and g.condition == "satisfied"
    assert g.rabi_residual.magnitude < 1e-12


def test_pair_determinant_residual():
    s = pair_two_level(V11=1.0, V12=0.5, V21=2.0, V22=3.0)
    H = build_hamiltonian(s)
    c = dark_subspaces(s, H)
    (g,) = c.groups
    assert g.condition == "tunable" and g.kernel_dim == 0
    r = rabi_condition_residual(s, H, g)
    assert r.kind == "determinant"
    assert r.value == pytest.approx(1.0 * 3.0 - 0.5 * 2.0)


def test_pair_complex_phase():
    V = np.exp(1j * 0.7)
    dark = classify_system(pair_two_level(V11=V, V12=1.0, V21=1.0, V22=1 / V))
    assert dark.total_dark_dim == 1
    bright = classify_system(pair_two_level(V11=V, V12=1.0, V21=1.0, V22=V))
    assert bright.total_dark_dim == 0


def test_case_one_residual_raises():
    s = lambda_system()
    H = build_hamiltonian(s)
    (g,) = dark_subspaces(s, H).groups
    assert g.case == CASE_1
    with pytest.raises(ValueError):
        rabi_condition_residual(s, H, g)


def test_tied_condition_unsatisfiable_rb87_5():
    c = classify_system(get_preset("rb87-5"))
    (g,) = [g for g in c.groups if g.dimension == 3]
    assert g.case == CASE_2 and g.condition == "unsatisfiable"
    assert g.rabi_residual.value == pytest.approx(-2.0)


def test_untagged_condition_is_tunable():
    s = get_preset("rb87-5")
    untagged = s.replace(couplings=tuple(
        LaserCoupling(c.ground, c.excited, c.magnitude, c.phase, c.frequency)
        for c in s.couplings))
    c = classify_system(untagged)
    (g,) = [g for g in c.groups if g.dimension == 3]
    assert g.condition == "tunable"
    assert tied_condition_satisfiable(untagged, g, g.coupled_excited) is not False


def test_sink_levels_are_dark():
    s = make_system(["g1", "g2"], [("e1", 10.0)],
                    [LaserCoupling(0, 0, 1.0, 0.0, 10.0)],
                    [DecayChannel(0, 0, 0.1), DecayChannel(1, 0, 0.1)])
    c = classify_system(s)
    sinks = [g for g in c.groups if g.is_sink]
    assert [g.members for g in sinks] == [(1,)]
    assert c.unique
    assert c.dark_groups(include_sinks=False) == []


def test_zero_magnitude_coupling_ignored():
    s = lambda_system(V11=1.0, V21=0.0)
    c = classify_system(s)
    assert c.total_dark_dim == 1
    (g,) = [g for g in c.groups if g.kernel_dim]
    assert g.members == (1,)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_oracle_dimension(name):
    s = get_preset(name)
    H = build_hamiltonian(s)
    assert classify_system(s).total_dark_dim == dark_state_oracle_dim(H)


@pytest.mark.parametrize("name", ["lambda", "m", "m-loop", "pair", "fan-d", "rb87-2"])
def test_verify_dark_unique_states(name):
    s = get_preset(name)
    H = build_hamiltonian(s)
    c = dark_subspaces(s, H)
    L, LH = build_lindblad(s, H), build_nonhermitian(s, H)
    for g in c.dark_groups():
        for k in range(g.kernel_dim):
            v = np.zeros(s.n_levels, dtype=complex)
            v[:s.n_ground] = g.kernel_basis[:, k]
            assert verify_dark(np.outer(v, v.conj()), L, LH, c).dark


def test_verify_dark_rejects_bright_state():
    s = lambda_system()
    H = build_hamiltonian(s)
    L, LH = build_lindblad(s, H), build_nonhermitian(s, H)
    rho = np.zeros((3, 3), dtype=complex)
    rho[0, 0] = 1.0
    verdict = verify_dark(rho, L, LH)
    assert not verdict.dark and verdict.lindblad_residual > 0.1


def test_verify_dark_block_defect():
    s = fan_system("c")
    H = build_hamiltonian(s)
    c = dark_subspaces(s, H)
    L, LH = build_lindblad(s, H), build_nonhermitian(s, H)
    v = c.dark_vectors()
    psi = np.zeros(s.n_levels, dtype=complex)
    psi[:4] = (v[:, 0] + v[:, 1]) / np.sqrt(2)
    verdict = verify_dark(np.outer(psi, psi.conj()), L, LH, c)
    assert verdict.block_defect > 0.1 and not verdict.dark


def test_invalid_density_matrix():
    s = lambda_system()
    H = build_hamiltonian(s)
    with pytest.raises(ValueError):
        verify_dark(np.eye(3), build_lindblad(s, H), build_nonhermitian(s, H))


def test_tolerances_recorded():
    c = classify_system(lambda_system(), degeneracy_tol=1e-6, rank_rtol=1e-10)
    assert (c.degeneracy_tol, c.rank_rtol) == (1e-6, 1e-10)


def test_degeneracy_tolerance_controls_grouping():
    s = lambda_system(detunings=(0.0, 1e-7))
    assert classify_system(s).total_dark_dim == 0
    assert classify_system(s, degeneracy_tol=1e-6).groups[0].dimension == 2
