import numpy as np
import pytest

from darkstate.model import LaserCoupling, make_system
from darkstate.presets import get_preset, m_system, pair_two_level, rb87_scheme
from darkstate.rwa import (FrameError, build_hamiltonian, count_cycles,
                           solve_difference_constraints, solve_frame)


def lstsq_residual(system):
    """Least-squares oracle: smallest achievable constraint violation."""
    ng = system.n_ground
    A = np.zeros((len(system.couplings), system.n_levels))
    b = np.zeros(len(system.couplings))
    for k, c in enumerate(system.couplings):
        A[k, ng + c.excited], A[k, c.ground], b[k] = 1.0, -1.0, c.frequency
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    return np.abs(A @ x - b).max()


@pytest.mark.parametrize("name, cycles", [
    ("lambda", 0), ("m", 0), ("m-loop", 1), ("pair", 1), ("fan-a", 0), ("rb87-10", 5)])
def test_cycle_counts(name, cycles):
    s = get_preset(name)
    assert count_cycles(s) == cycles
    assert solve_frame(s).independent_cycle_count == cycles


@pytest.mark.parametrize("name", ["lambda", "m", "m-loop", "pair", "fan-c", "rb87-8"])
def test_frame_reproduces_frequencies(name):
    s = get_preset(name)
    f = solve_frame(s)
    assert f.feasible
    for c in s.couplings:
        got = f.epsilons[s.n_ground + c.excited] - f.epsilons[c.ground]
        assert abs(got - c.frequency) <= 1e-10 * abs(c.frequency)


def test_broken_loop_is_infeasible():
    s = m_system(True)
    cs = list(s.couplings)
    c = cs[-1]
    cs[-1] = LaserCoupling(c.ground, c.excited, c.magnitude, c.phase, c.frequency + 0.3)
    bad = s.replace(couplings=tuple(cs))
    f = solve_frame(bad)
    assert not f.feasible
    assert f.max_residual == pytest.approx(0.3, rel=1e-9)
    assert lstsq_residual(bad) > 0.05
    with pytest.raises(FrameError):
        build_hamiltonian(bad)


def test_feasible_matches_lstsq_oracle():
    for name in ("m-loop", "pair", "rb87-10"):
        assert lstsq_residual(get_preset(name)) < 1e-9


def test_tree_always_feasible():
    rng = np.random.default_rng(1)
    for _ in range(20):
        cs = [LaserCoupling(0, 0, 1.0, 0, rng.uniform(1, 100)),
              LaserCoupling(1, 0, 1.0, 0, rng.uniform(1, 100)),
              LaserCoupling(1, 1, 1.0, 0, rng.uniform(1, 100)),
              LaserCoupling(2, 1, 1.0, 0, rng.uniform(1, 100))]
        assert solve_frame(make_system(["a", "b", "c"], ["x", "y"], cs)).feasible


@pytest.mark.parametrize("w12, w23, w13, feasible", [
    (3.0, 4.0, -7.0, True), (3.0, 4.1, -7.0, False), (-2.0, 5.0, -3.0, True),
    (1.0, 1.0, 1.0, False)])
def test_three_level_cyclic_law(w12, w23, w13, feasible):
    # all three levels coupled pairwise, oriented 1->2->3->1
    _, cycles, _, ok, _ = solve_difference_constraints(
        3, [(0, 1, w12), (1, 2, w23), (2, 0, w13)])
    assert ok is feasible
    assert len(cycles) == 1
    assert abs(cycles[0].residual) == pytest.approx(abs(w12 + w23 + w13), abs=1e-12)


def test_edge_order_independence():
    s = rb87_scheme(10)
    base = solve_frame(s)
    rng = np.random.default_rng(7)
    for _ in range(5):
        perm = rng.permutation(len(s.couplings))
        shuffled = s.replace(couplings=tuple(s.couplings[k] for k in perm))
        f = solve_frame(shuffled)
        assert f.feasible == base.feasible
        assert abs(f.max_residual - base.max_residual) <= 1e-10


def test_pair_loop_constraint():
    s = pair_two_level()
    w = {(c.ground, c.excited): c.frequency for c in s.couplings}
    assert w[1, 0] == pytest.approx(w[0, 0] + w[1, 1] - w[0, 1])
    cs = [c if (c.ground, c.excited) != (1, 0) else
          LaserCoupling(1, 0, c.magnitude, c.phase, c.frequency + 1e-3) for c in s.couplings]
    assert not solve_frame(s.replace(couplings=tuple(cs))).feasible


def test_hamiltonian_diagonal_and_detunings():
    s = pair_two_level(ground_shift=0.25)
    H = build_hamiltonian(s)
    assert H.matrix[0, 0] == 0
    np.testing.assert_allclose(H.matrix, H.matrix.conj().T)
    for (g, e), delta in H.detunings.items():
        c = s.coupling(g, e)
        assert delta == pytest.approx(s.excited[e].energy - s.ground[g].energy - c.frequency)
        assert H.matrix[s.n_ground + e, s.n_ground + e].real - H.ground_diagonal[g] == \
            pytest.approx(delta)
    assert H.ground_diagonal[1] == pytest.approx(0.25)


def test_m_loop_relation():
    s = m_system(True)
    w = {(c.ground, c.excited): c.frequency for c in s.couplings}
    assert w[2, 0] == pytest.approx(w[1, 0] + w[2, 1] - w[1, 1])
