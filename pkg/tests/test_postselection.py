import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from spinforge.errors import EmptySectorError, WeightAliasingError
from spinforge.postselection import (
    RotationPlan,
    aliased_weights,
    global_y_rotation,
    hamming_circuit_state,
    hamming_project_circuit,
    hamming_project_direct,
    outcome_for_weight,
    project_sz_encoded,
    sz_projection,
    theta_opt,
    wigner_d,
    wigner_weight,
    wigner_weight_exact,
)
from spinforge.simulator import StateVector, expectation
from spinforge.spin_models import SpinRegister, total_spin_operators

half_spins = st.integers(1, 12).map(lambda k: Fraction(k, 2))


def test_wigner_examples():
    assert wigner_d(1, 1, 0.0) == 1.0
    assert wigner_d(1, 0, math.pi / 2) == pytest.approx(1 / math.sqrt(2))
    assert theta_opt(1, 0) == pytest.approx(math.pi / 2)
    assert theta_opt("1/2", "-1/2") == pytest.approx(math.pi)
    assert theta_opt(0, 0) == 0.0
    assert wigner_weight(1, 0) == 0.5
    assert wigner_weight_exact(3, 3) == 1


@given(half_spins, st.floats(0, math.pi))
def test_row_normalization(s, theta):
    total = sum(wigner_d(s, s - k, theta) ** 2 for k in range(int(2 * s) + 1))
    assert total == pytest.approx(1.0, abs=1e-12)


@given(half_spins, st.data())
def test_weight_is_d_squared_at_optimum(s, data):
    k = data.draw(st.integers(0, int(2 * s)))
    s_z = s - k
    assert wigner_d(s, s_z, theta_opt(s, s_z)) ** 2 == pytest.approx(wigner_weight(s, s_z), abs=1e-12)


def test_theta_opt_beats_grid():
    grid = np.linspace(0, math.pi, 10_001)
    for s_z in range(-5, 6):
        best = max(wigner_d(5, s_z, t) ** 2 for t in grid)
        assert best <= wigner_weight(5, s_z) + 1e-7
        assert abs(grid[np.argmax([wigner_d(5, s_z, t) ** 2 for t in grid])] - theta_opt(5, s_z)) < 1e-3


def test_rotation_plan():
    plan = RotationPlan.for_target(2, 0)
    assert plan.expected_weight == pytest.approx(wigner_weight(2, 0))
    assert RotationPlan.for_target(2, 2).theta_opt == 0.0


def _dense_sy(reg):
    return total_spin_operators(reg)[1].to_dense()


@pytest.mark.parametrize("spins", [["1/2"] * 3, ["1/2", "1"], ["3/2", "1/2"], ["2"]])
def test_rotation_matches_dense_exponential(spins, rng):
    reg = SpinRegister.from_spins(spins)
    psi = StateVector.random(reg.n_qubits, rng)
    want = expm(-0.83j * _dense_sy(reg)) @ psi.amplitudes
    assert np.allclose(global_y_rotation(psi, reg, 0.83).amplitudes, want, atol=1e-10)


def test_rotation_keeps_s2(rng):
    reg = SpinRegister.spin_half_chain(4)
    s2 = total_spin_operators(reg)[3]
    psi = StateVector.random(4, rng)
    out = global_y_rotation(psi, reg, 1.1)
    assert expectation(out, s2) == pytest.approx(expectation(psi, s2), abs=1e-10)


def test_triplet_rotation_weight():
    reg = SpinRegister.spin_half_chain(2)
    out = global_y_rotation(StateVector.basis(2, 0), reg, theta_opt(1, 0))
    triplet0 = np.array([0, 1, 1, 0]) / np.sqrt(2)
    assert abs(np.vdot(triplet0, out.amplitudes)) ** 2 == pytest.approx(0.5)


def test_direct_projection_examples():
    psi = StateVector.basis(4, 0b0110)
    out, p = hamming_project_direct(psi, 2)
    assert p == 1.0 and out.distance(psi) == 0
    psi = StateVector.normalized([1, 1, 1, 0])
    out, p = hamming_project_direct(psi, 1)
    assert p == pytest.approx(2 / 3)
    assert np.allclose(out.amplitudes, np.array([0, 1, 1, 0]) / np.sqrt(2))


@pytest.mark.parametrize("n", [3, 5])
def test_uniform_state_binomial(n):
    psi = StateVector.normalized(np.ones(1 << n))
    for k in range(n + 1):
        assert hamming_project_direct(psi, k)[1] == pytest.approx(math.comb(n, k) / 2 ** n)


def test_empty_sector():
    with pytest.raises(EmptySectorError):
        hamming_project_direct(StateVector.basis(3, 0), 2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_outcome_map_read_from_circuit(n):
    """Run the circuit on each basis state; the readout is deterministic."""
    m = max(1, math.ceil(math.log2(n)))
    for idx in range(1 << n):
        probs = np.sum(np.abs(hamming_circuit_state(StateVector.basis(n, idx), m)) ** 2, axis=1)
        w = bin(idx).count("1")
        assert probs[outcome_for_weight(n, w, m)] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_circuit_matches_direct_on_basis_states(n):
    m_default = max(1, math.ceil(math.log2(n)))
    for idx, w in product(range(1 << n), range(n + 1)):
        psi = StateVector.basis(n, idx)
        m = m_default
        if aliased_weights(n, w, m):
            with pytest.raises(WeightAliasingError):
                hamming_project_circuit(psi, w)
            m = math.ceil(math.log2(n + 1))
        if bin(idx).count("1") != w:
            with pytest.raises(EmptySectorError):
                hamming_project_circuit(psi, w, ancillas=m)
            continue
        got = hamming_project_circuit(psi, w, ancillas=m)
        want = hamming_project_direct(psi, w)
        assert got[0].distance(want[0]) < 1e-10 and abs(got[1] - want[1]) < 1e-10


def test_aliasing_at_power_of_two():
    assert aliased_weights(4, 0, 2) == [4]
    with pytest.raises(WeightAliasingError):
        hamming_project_circuit(StateVector.basis(4, 0), 0)
    assert aliased_weights(6, 0, 3) == []


@given(st.integers(0, 10_000), st.integers(5, 8))
def test_circuit_matches_direct_random(seed, n):
    psi = StateVector.random(n, np.random.default_rng(seed))
    w = seed % (n + 1)
    m = math.ceil(math.log2(n + 1))
    a = hamming_project_circuit(psi, w, ancillas=m)
    b = hamming_project_direct(psi, w)
    assert a[0].distance(b[0]) < 1e-10 and abs(a[1] - b[1]) < 1e-10


def test_encoded_projection_reports_leakage():
    reg = SpinRegister.from_spins(["5/2"])
    amps = np.zeros(8, dtype=complex)
    amps[6:] = 1 / np.sqrt(2)
    with pytest.raises(EmptySectorError) as info:
        project_sz_encoded(StateVector(amps), reg, "1/2")
    assert info.value.leakage == pytest.approx(1.0)
    amps[0] = 1
    res = sz_projection(StateVector.normalized(amps), reg, "5/2")
    assert res.leakage == pytest.approx(0.5) and res.probability == pytest.approx(0.5)


def test_eigenstate_projection_unchanged():
    reg = SpinRegister.from_spins(["2", "1/2"])
    psi = StateVector.basis(reg.n_qubits, 1)  # m = 1 on the spin-2 site, up on the qubit
    out, p = project_sz_encoded(psi, reg, "3/2")
    assert p == 1.0 and out.distance(psi) == 0
