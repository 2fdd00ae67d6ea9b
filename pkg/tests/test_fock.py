from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voalab.constructors import bc_system, heisenberg, kac_moody, sl2, virasoro
from voalab.exact import partition_series
from voalab.fock import (
    ModuleSpec,
    build_basis,
    dump_basis,
    graded_dimensions,
    operator_matrix,
    representation_defects,
    supercommutator_on,
)

F = Fraction


def test_heisenberg_dimensions_are_partition_numbers():
    dims = graded_dimensions(ModuleSpec.vacuum(heisenberg(1)), 8)
    P = partition_series(8)
    assert [dims[L] for L in range(9)] == [P[L] for L in range(9)]


def test_bc2_vacuum_sits_above_negative_levels():
    mod = ModuleSpec.vacuum(bc_system(2))
    assert mod.min_level == -1
    assert graded_dimensions(mod, 3) == {-1: 2, 0: 4, 1: 6, 2: 12, 3: 18}
    assert "c(-1) c(0) c(1) |0>" in dump_basis(mod, 0)


def test_basic_action():
    mod = ModuleSpec.vacuum(heisenberg(1))
    assert mod.apply("a", 1, {(("a", -1),): F(1)}) == {(): 1}
    assert mod.apply("a", 0, {(): F(1)}) == {}
    assert mod.format_state((("a", -2), ("a", -1), ("a", -1))) == "a(-2) a(-1)^2 |0>"


def test_weyl_module_zero_mode():
    mod = ModuleSpec(heisenberg(1), {"a": 3}, label="3")
    assert mod.apply("a", 0, {(("a", -1),): F(1)}) == {(("a", -1),): 3}


def test_invalid_thresholds():
    with pytest.raises(ValueError):
        ModuleSpec(heisenberg(1), thresholds={"a": 1})


def test_operator_matrix_rejects_wrong_target():
    mod = ModuleSpec.vacuum(heisenberg(1))
    with pytest.raises(ValueError):
        operator_matrix("a", -1, mod, 1, 1)
    M = operator_matrix("a", -1, mod, 1, 2)
    assert (M.rows, M.cols) == (2, 1)


@pytest.mark.parametrize("alg", [heisenberg(2), kac_moody(sl2(2)), virasoro(3), bc_system(2), bc_system(-1)], ids=str)
def test_realized_brackets_match_the_table(alg):
    assert representation_defects(ModuleSpec.vacuum(alg), 2, 2) == []


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 3), st.data())
@settings(max_examples=40, deadline=None)
def test_heisenberg_commutator_on_random_states(m, k, level, data):
    mod = ModuleSpec.vacuum(heisenberg(1, 3))
    states = build_basis(mod, level)[level]
    s = data.draw(st.sampled_from(states))
    got = supercommutator_on(mod, "a", m, "a", k, {s: F(1)})
    assert got == ({s: F(3 * m)} if m + k == 0 and m else {})


def test_basis_order_is_deterministic():
    mod = ModuleSpec.vacuum(kac_moody(sl2(1)))
    a = build_basis(mod, 3)
    b = build_basis(ModuleSpec.vacuum(kac_moody(sl2(1))), 3)
    assert a == b
