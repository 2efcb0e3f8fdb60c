from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinforge.errors import ConfigurationError
from spinforge.penalty import (
    LINEAR,
    QUARTIC,
    PenaltyConfig,
    closed_form_spectrum,
    penalty,
    penalty_eigenvalue,
    penalty_gap,
    penalty_linear,
    sector_dimensions,
    swap_expansion,
    validate_ratio,
)
from spinforge.simulator import StateVector, expectation
from spinforge.spin_models import SpinRegister, total_spin_operators


def test_default_cz_midpoint():
    cfg = PenaltyConfig(1, C_S=2.0)
    assert cfg.C_z == 6.0
    assert validate_ratio(cfg)[0]


@pytest.mark.parametrize("ratio,ok", [(2.0, False), (2.01, True), (3.99, True), (4.0, False)])
def test_window_edges(ratio, ok):
    assert validate_ratio(PenaltyConfig(1, C_S=1.0, C_z=ratio))[0] is ok


def test_linear_rejects_outside_window():
    reg = SpinRegister.spin_half_chain(4)
    with pytest.raises(ConfigurationError, match="upper bound"):
        penalty_linear(reg, PenaltyConfig(1, C_S=1.0, C_z=5.0))


def test_linear_rejects_lowered_sz():
    reg = SpinRegister.spin_half_chain(4)
    with pytest.raises(ConfigurationError):
        penalty_linear(reg, PenaltyConfig(1, 0, C_S=1.0))


def test_unreachable_target():
    with pytest.raises(ConfigurationError):
        penalty(SpinRegister.spin_half_chain(3), PenaltyConfig(Fraction(1)))


@pytest.mark.parametrize("kind", [LINEAR, QUARTIC])
def test_all_up_has_zero_penalty(kind):
    n = 4
    reg = SpinRegister.spin_half_chain(n)
    H = penalty(reg, PenaltyConfig(2, C_S=1.5, kind=kind))
    assert abs(expectation(StateVector.basis(n, 0), H)) < 1e-12


@pytest.mark.parametrize("kind", [LINEAR, QUARTIC])
@pytest.mark.parametrize("s_star", [0, 1, 2])
def test_dense_spectrum_matches_closed_form(kind, s_star):
    reg = SpinRegister.spin_half_chain(4)
    cfg = PenaltyConfig(s_star, C_S=1.3, kind=kind)
    evals = np.linalg.eigvalsh(penalty(reg, cfg).to_dense())
    assert np.allclose(evals, closed_form_spectrum([Fraction(1, 2)] * 4, cfg), atol=1e-9)


def test_linear_penalty_on_multiplet():
    cfg = PenaltyConfig(1, C_S=1.0)
    assert penalty_eigenvalue(1, 1, cfg) == 0
    assert penalty_eigenvalue(1, 0, cfg) == pytest.approx(3.0)
    assert penalty_eigenvalue(2, 2, cfg) == pytest.approx(4 - 3)


@given(st.integers(0, 3), st.floats(0.1, 5.0))
def test_gap_is_the_smallest_excitation(s2, C_S):
    s_star = Fraction(s2, 1)
    cfg = PenaltyConfig(s_star, C_S=C_S)
    values = [penalty_eigenvalue(S, S - k, cfg) for S in range(0, 6) for k in range(2 * S + 1)
              if not (S == s_star and k == 0)]
    assert min(values) >= penalty_gap(cfg) - 1e-9


@pytest.mark.parametrize("n", range(2, 9))
def test_swap_expansion_equals_squared_total_spin(n):
    reg = SpinRegister.spin_half_chain(n)
    s2 = total_spin_operators(reg)[3]
    assert (swap_expansion(reg) - s2).max_abs_coeff() < 1e-12


def test_sector_dimensions():
    assert sector_dimensions([Fraction(1, 2)] * 4) == {0: 2, 1: 3, 2: 1}
    mn = sector_dimensions([Fraction(5, 2), Fraction(5, 2), Fraction(2)])
    assert sum((2 * S + 1) * m for S, m in mn.items()) == 6 * 6 * 5


def test_linear_term_count_closed_form():
    from math import comb

    for n in (4, 6, 8):
        reg = SpinRegister.spin_half_chain(n)
        H = penalty(reg, PenaltyConfig(0, C_S=7.5))
        assert len(H) == 3 * comb(n, 2) + n + 1
