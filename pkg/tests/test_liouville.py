import numpy as np
import pytest
from scipy.linalg import expm

from darkstate.liouville import (MAX_LEVELS, Superoperator, build_jump, build_lindblad,
                                 build_nonhermitian, effective_hamiltonian, gamma_operator,
                                 sandwich, trace_row, unvec, vec)
from darkstate.model import DecayChannel, LaserCoupling, make_system
from darkstate.presets import PRESETS, get_preset, m_system
from darkstate.rwa import build_hamiltonian

from systems import random_systems


def test_vec_is_column_stacking():
    rho = np.arange(4).reshape(2, 2)
    np.testing.assert_array_equal(vec(rho), [0, 2, 1, 3])
    np.testing.assert_array_equal(unvec(vec(rho)), rho)


def test_sandwich_identity():
    rng = np.random.default_rng(0)
    A, B, X = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
    np.testing.assert_allclose(sandwich(A, B) @ vec(X), vec(A @ X @ B.conj().T))


def test_two_level_amplitude_damping():
    gamma = 0.7
    s = make_system(["g"], [("e", 5.0)], decays=[DecayChannel(0, 0, gamma)])
    L = build_lindblad(s, build_hamiltonian(s))
    rho0 = np.array([[0.4, 0.3], [0.3, 0.6]], dtype=complex)
    t = 1.3
    rho = unvec(expm(L.matrix * t) @ vec(rho0))
    assert rho[1, 1].real == pytest.approx(0.6 * np.exp(-gamma * t))
    # coherence decays at gamma / 2; the uncoupled excited level keeps its bare energy
    assert abs(rho[0, 1]) == pytest.approx(0.3 * np.exp(-gamma * t / 2))


def test_decay_free_nonhermitian():
    s = make_system(["g"], [("e", 1.0)], [LaserCoupling(0, 0, 0.4, 0.2, 1.0)])
    H = build_hamiltonian(s).matrix
    I = np.eye(2)
    np.testing.assert_allclose(build_nonhermitian(s, build_hamiltonian(s)).matrix,
                               -1j * (np.kron(I, H) - np.kron(H.T, I)))
    assert not build_jump(s).matrix.any()


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_split_identity_presets(name):
    s = get_preset(name)
    H = build_hamiltonian(s)
    L, LH, J = build_lindblad(s, H), build_nonhermitian(s, H), build_jump(s)
    assert np.abs(LH.matrix + J.matrix - L.matrix).max() < 1e-12
    assert np.abs((LH + J).matrix - L.matrix).max() < 1e-12


def test_trace_preservation_random():
    rng = np.random.default_rng(3)
    for s in random_systems(20, seed=11):
        L = build_lindblad(s, build_hamiltonian(s))
        assert np.abs(trace_row(s.n_levels) @ L.matrix).max() < 1e-12
        X = rng.normal(size=(s.n_levels,) * 2)
        assert abs(trace_row(s.n_levels) @ L.matrix @ vec(X + X.T)) < 1e-10


def test_lambda_unique_zero_eigenvalue():
    s = get_preset("lambda")
    ev = np.linalg.eigvals(build_lindblad(s, build_hamiltonian(s)).matrix)
    assert np.sum(np.abs(ev) < 1e-10) == 1


def test_m_system_nonhermitian_spectrum():
    s = m_system()
    ev = np.linalg.eigvals(build_nonhermitian(s, build_hamiltonian(s)).matrix)
    assert ev.real.max() < 1e-12
    assert np.sum(np.abs(ev.real) < 1e-10) == 1


def test_gamma_operator():
    s = m_system()
    g = gamma_operator(s)
    # e1 decays to g1, g2, g3 at .04, .01, .09
    np.testing.assert_allclose(g.excited_rates, [0.14, 0.20])
    assert np.all(np.diag(g.matrix)[:3] == 0)
    assert not gamma_operator(make_system(["g"], ["e"])).matrix.any()
    single = make_system(["g"], ["e"], decays=[DecayChannel(0, 0, 0.3)])
    assert gamma_operator(single).excited_rates[0] == pytest.approx(0.3)


def test_effective_hamiltonian_half_rate():
    s = make_system(["g"], ["e"], decays=[DecayChannel(0, 0, 0.3)])
    Heff = effective_hamiltonian(s, build_hamiltonian(s))
    assert Heff[1, 1].imag == pytest.approx(-0.15)


def test_superoperator_apply_and_mismatch():
    s = get_preset("lambda")
    H = build_hamiltonian(s)
    L = build_lindblad(s, H)
    rho = np.eye(3) / 3
    np.testing.assert_allclose(L(rho), unvec(L.matrix @ vec(rho)))
    other = get_preset("m")
    with pytest.raises(ValueError):
        L + build_jump(other)
    with pytest.raises(ValueError):
        build_lindblad(other, H)
    assert isinstance(L, Superoperator) and L.stacking == "column"


def test_too_many_levels():
    s = make_system([f"g{k}" for k in range(MAX_LEVELS)], ["e"])
    with pytest.raises(ValueError):
        build_lindblad(s, build_hamiltonian(s))
