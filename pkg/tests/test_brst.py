from fractions import Fraction

import pytest

from voalab import brst
from voalab.fields import Gen

F = Fraction


@pytest.fixture(scope="module")
def cx26():
    return brst.virasoro_matter(26)


def test_fitted_coefficients(cx26):
    assert cx26.coefficients == (1, 1, 0)


def test_ghost_grading(cx26):
    mod = cx26.module
    assert cx26.min_level == -1
    # the two lowest states are c_1|0> and c_0 c_1|0> in the symmetric convention
    assert cx26.dimension_table()[(-1, 1)] == 1
    assert cx26.dimension_table()[(-1, 2)] == 1
    assert mod.ghost_number((("b", -2), ("c", 1))) == 0


def test_nilpotent_at_26(cx26):
    ok, witness = brst.square_is_zero(cx26)
    assert ok and witness is None


def test_properties_at_26(cx26):
    rep = brst.brst_properties(cx26, window=2, max_level=1)
    assert rep.passed, rep


def test_vacuum_is_closed(cx26):
    assert cx26.delta({(): F(1)}) == {}


def test_b0_anticommutator_is_total_l0(cx26):
    mod = cx26.module
    for s in cx26.basis(1):
        v = {s: F(1)}
        lhs = {}
        for part in (cx26.delta(mod.apply("b", 0, v)), mod.apply("b", 0, cx26.delta(v))):
            for t, c in part.items():
                lhs[t] = lhs.get(t, 0) + c
        lhs = {t: c for t, c in lhs.items() if c}
        assert lhs == cx26.T_total.apply(0, v, mod)


def test_refuses_cohomology_off_26():
    cx = brst.virasoro_matter(25)
    ok, witness = brst.square_is_zero(cx)
    assert not ok and witness is not None
    with pytest.raises(brst.BrstError) as info:
        brst.brst_cohomology(cx, 2, 1)
    assert info.value.witness


def test_cohomology_and_euler_characteristic(cx26):
    # b_0 / L_0 contracts every piece whose total level is nonzero
    for level, ghost, dim in brst.cohomology_table(cx26, levels=(-1, 1)):
        assert dim == 0, (level, ghost)
    # the vacuum spans its graded piece and nothing maps into it
    assert len(cx26.basis(0, 0)) == 1
    assert brst.brst_cohomology(cx26, 0, 0) == 1
    assert brst.brst_cohomology(cx26, 0, 7) == 0
    for level in (-1, 0, 1):
        assert brst.euler_characteristic(cx26, level) == brst.euler_characteristic(cx26, level, from_cohomology=True)


@pytest.mark.parametrize("matter_c,total", [(0, -26), (F(13, 2), F(-39, 2)), (26, 0)])
def test_composite_central_charge(matter_c, total):
    assert brst.composite_central_charge(matter_c) == total


def test_ghost_stress_tensor():
    rep = brst.ghost_virasoro_check(window=3)
    assert rep.central_charge == -26 and rep.passed
    assert brst.ghost_virasoro_check(window=2, n=1).central_charge == -2


def test_matter_names_must_not_clash():
    alg = brst.GHOST_C
    with pytest.raises(ValueError):
        brst.BrstComplex(alg, Gen(alg, "b"))


@pytest.mark.parametrize("make", [lambda: brst.virasoro_matter(3), lambda: brst.heisenberg_matter(2)], ids=["virasoro", "heisenberg"])
def test_direct_c_T_zero_mode_matches_normal_ordered_product(make):
    cx = make()
    for level in range(cx.min_level, 3):
        for s in cx.basis(level):
            v = {s: F(1)}
            assert cx._c_T_zero_mode(v) == cx.pieces[0].apply(0, v, cx.module)
