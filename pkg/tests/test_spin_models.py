from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from encoded_reference import SPIN_2, SPIN_52, physical_block
from spinforge.errors import ConfigurationError
from spinforge.pauli import commutator
from spinforge.simulator import diagonalize, expectation
from spinforge.spin_models import (
    BINARY,
    MN_INITIAL_LABELS,
    SpinRegister,
    SpinSite,
    _local_spin_paulis,
    as_half_integer,
    basis_index,
    basis_state,
    heisenberg_ring,
    mn_trimer,
    site_spin_operators,
    sz_balanced_labels,
    total_spin_operators,
)


@pytest.mark.parametrize("spin,ref,levels", [(Fraction(5, 2), SPIN_52, 6), (Fraction(2), SPIN_2, 5)])
def test_encoded_operators_match_reference(spin, ref, levels):
    gen = _local_spin_paulis(spin, BINARY)
    for op, key in zip(gen, "xyz"):
        diff = physical_block(op.to_dense(), levels) - physical_block(ref[key].to_dense(), levels)
        assert np.abs(diff).max() < 1e-10


def test_spin52_sz_expansion():
    sz = _local_spin_paulis(Fraction(5, 2), BINARY)[2]
    assert sz.coeff("ZII") == pytest.approx(3 / 8)
    assert sz.coeff("ZZI") == pytest.approx(1 / 8)


@pytest.mark.parametrize("spin", ["1/2", "1", "3/2", "2", "5/2", "3"])
def test_su2_algebra_on_physical_space(spin):
    site = SpinSite(as_half_integer(spin), BINARY if spin != "1/2" else "direct")
    sx, sy, sz = site_spin_operators(site)
    # zero padding keeps the commutators exact on the whole register
    assert (commutator(sx, sy) - 1j * sz).max_abs_coeff() < 1e-12
    assert (commutator(sy, sz) - 1j * sx).max_abs_coeff() < 1e-12
    assert (commutator(sz, sx) - 1j * sy).max_abs_coeff() < 1e-12
    casimir = (sx * sx + sy * sy + sz * sz).to_dense()
    s = float(site.spin)
    lv = site.levels
    assert np.allclose(casimir[:lv, :lv], s * (s + 1) * np.eye(lv), atol=1e-10)
    assert np.allclose(casimir[lv:, :], 0)


def test_unphysical_codes_are_annihilated():
    site = SpinSite(Fraction(5, 2), BINARY)
    for op in site_spin_operators(site):
        m = op.to_dense()
        assert np.allclose(m[:, 6:], 0) and np.allclose(m[6:, :], 0)


def test_ring_ground_state_is_singlet(ring6):
    reg, H, ops = ring6
    spec = diagonalize(H)
    psi = spec.eigenvectors[0]
    assert spec.ground_energy == pytest.approx(-11.2111025509, abs=1e-8)
    assert abs(expectation(psi, ops[3])) < 1e-10


def test_ring_coupling_count():
    with pytest.raises(ConfigurationError):
        heisenberg_ring(4, [1.0, 2.0])


def test_pite_start_state_sz(ring6):
    reg, _, ops = ring6
    assert sz_balanced_labels(6, 1) == "000011"
    assert expectation(basis_state(reg, "000011"), ops[2]) == pytest.approx(1.0)


@pytest.mark.parametrize("s_star", [2, 3, 4])
def test_mn_start_states_have_target_sz(s_star):
    _, reg = mn_trimer()
    sz = total_spin_operators(reg)[2]
    psi = basis_state(reg, MN_INITIAL_LABELS[s_star])
    assert expectation(psi, sz) == pytest.approx(s_star)


def test_basis_index_labels():
    reg = SpinRegister.from_spins(["5/2", "2"])
    assert basis_index(reg, ("001", "100")) == 1 | (4 << 3)
    assert basis_index(reg, (Fraction(3, 2), -2)) == 1 | (4 << 3)
    with pytest.raises(ConfigurationError):
        basis_index(reg, ("110", "000"))


def test_mn_spectrum_lowest_levels():
    from spinforge.experiments import physical_levels

    H, reg = mn_trimer()
    levels = physical_levels(H, reg, total_spin_operators(reg)[3])
    assert [round(lv.energy, 6) for lv in levels[:4]] == [-1187.5, -997.5, -805.5, -787.5]
    assert [lv.degeneracy for lv in levels[:4]] == [7, 5, 3, 9]


@given(st.lists(st.sampled_from(["1/2", "1", "3/2", "2"]), min_size=1, max_size=3))
def test_total_sz_diagonal_matches_operator(spins):
    reg = SpinRegister.from_spins(spins)
    if reg.n_qubits > 6:
        return
    sz_op = total_spin_operators(reg)[2].to_dense()
    sz, physical = reg.sz_diagonal()
    assert np.allclose(np.diag(sz_op).real, np.where(physical, sz, np.diag(sz_op).real))
    assert np.allclose(sz_op, np.diag(np.diag(sz_op)))


def test_half_integer_parsing():
    assert as_half_integer("5/2") == Fraction(5, 2)
    assert as_half_integer(2.5) == Fraction(5, 2)
    with pytest.raises(ConfigurationError):
        as_half_integer(0.3)
