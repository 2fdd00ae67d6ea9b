from fractions import Fraction
from itertools import permutations
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voalab import blocks
from voalab.constructors import LatticeSpec, bc_system, heisenberg, lattice_voa, virasoro
from voalab.exact import partition_series
from voalab.fock import ModuleSpec

F = Fraction
FT, RF = blocks.FactoredTerm, blocks.RationalFunction


def test_generalized_binomial():
    assert blocks.gen_binom(-1, 3) == -1
    assert blocks.gen_binom(-2, 3) == -4
    assert blocks.gen_binom(3, 5) == 0
    assert blocks.gen_binom(5, 2) == 10


def test_factored_term_normal_form():
    t = FT.of(1, {(2, 1): -1})
    assert t.exponents == (((1, 2), -1),)
    assert t.scalar == -1
    assert str(FT.of(F(3, 2), {(1, 2): -2})) == "(z1-z2)^-2 * (3/2)"
    with pytest.raises(ValueError):
        FT.of(1, {(1, 1): 1})


def test_evaluation_and_poles():
    rf = RF.of(3, [FT.of(1, {(1, 2): -1, (2, 3): 2})])
    assert rf.evaluate([3, 1, F(1, 2)]) == F(1, 8)
    with pytest.raises(ZeroDivisionError):
        rf.evaluate([1, 1, 0])


def test_expansion_of_simple_poles():
    simple = RF.of(2, [FT.of(1, {(1, 2): -1})])
    double = RF.of(2, [FT.of(1, {(1, 2): -2})])
    for r in range(5):
        assert simple.expansion_coefficient([-1 - r, r]) == 1
        assert double.expansion_coefficient([-2 - r, r]) == r + 1
    assert simple.expansion_coefficient([0, -1]) == 0


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.tuples(st.integers(-4, 4), st.integers(-4, 4)))
@settings(max_examples=60, deadline=None)
def test_expansion_matches_series_product(exps, p):
    # a polynomial term expands to itself, so its coefficients are finite sums of binomials
    exps = [abs(e) for e in exps]
    t = FT.of(1, {(1, 2): exps[0], (1, 3): exps[1], (2, 3): exps[2]})
    p1, p2 = p
    p3 = t.degree() - p1 - p2
    want = F(0)
    for a in range(exps[0] + 1):
        for b in range(exps[1] + 1):
            for c in range(exps[2] + 1):
                # (z1-z2)^e0 (z1-z3)^e1 (z2-z3)^e2
                if (exps[0] - a + exps[1] - b, a + exps[2] - c, b + c) == (p1, p2, p3):
                    want += comb(exps[0], a) * comb(exps[1], b) * comb(exps[2], c) * (-1) ** (a + b + c)
    assert t.expansion_coefficient([p1, p2, p3]) == want


def test_heisenberg_two_and_four_points():
    alg = heisenberg(1, 3)
    two = blocks.heisenberg_correlator(alg, ["a", "a"])
    assert str(two) == "(z1-z2)^-2 * (3/1)"
    four = blocks.heisenberg_correlator(alg, ["a"] * 4)
    assert len(four.terms) == 3
    for perm in permutations([1, 2, 3, 4]):
        assert four.permute(perm) == four


def test_bc_correlator_is_antisymmetric_in_like_insertions():
    rf = blocks.bc_correlator(2, list("ccc"))
    assert rf.permute([2, 1, 3]) == rf.scale(-1)
    assert rf.permute([2, 3, 1]) == rf
    mixed = blocks.bc_correlator(2, list("bcccc"))
    assert mixed.permute([1, 3, 2, 4, 5]) == mixed.scale(-1)


def test_bc_selection_rule():
    assert blocks.bc_zero_mode_balance(2) == 3
    assert blocks.bc_correlator(2, list("cc")).is_zero()
    assert blocks.bc_correlator(1, list("bc")).is_zero()
    assert not blocks.bc_correlator(1, list("bcc")).is_zero()


def test_lattice_total_degree():
    voa = lattice_voa(LatticeSpec(((2,),)))
    for charges in ([1, -1], [1, 1, -2], [2, -1, -1], [1, -1, 1, -1]):
        rf = blocks.lattice_correlator(voa, charges)
        assert rf.terms[0].degree() == -sum(q * q for q in charges)
    assert blocks.lattice_correlator(voa, [1, 1]).is_zero()


def test_vacuum_character_is_partition_counting():
    P = partition_series(10)
    got = blocks.character(ModuleSpec.vacuum(heisenberg(1)), 10)
    assert got.to_dict() == {k: P[k] for k in range(11)}
    assert blocks.vacuum_character_oracle(heisenberg(1), 10).to_dict() == got.to_dict()


def test_ghost_graded_character_matches_fermionic_product():
    for n in (0, 1, 2):
        got = blocks.character(ModuleSpec.vacuum(bc_system(n)), 5, ghost=True)
        assert blocks.series_equal(got, blocks.fermionic_character(n, 5), 5)


def test_series_equal_notices_a_missing_sector():
    a = blocks.fermionic_character(1, 4)
    b = dict(a)
    b.pop(0)
    assert not blocks.series_equal(a, b, 4)


def test_global_modes_reach_the_weight():
    assert blocks.global_modes(virasoro(1), 2) == [("L", m) for m in range(-2, 2)]


def test_unstable_truncation_is_reported():
    with pytest.raises(blocks.UnstableTruncation) as info:
        blocks._stable(lambda k: k, 3, "growing")
    assert info.value.values == (3, 4)


@pytest.mark.parametrize("alg", [virasoro(0), virasoro(F(1, 2)), heisenberg(2), bc_system(1)], ids=str)
def test_vacuum_blocks_are_one_dimensional(alg):
    assert blocks.genus0_blocks_dim(ModuleSpec.vacuum(alg), cutoff=3) == 1


def test_charged_fock_module_has_no_coinvariants():
    mod = ModuleSpec(heisenberg(1), {"a": 1}, label="1")
    assert blocks.genus0_blocks_dim(mod, cutoff=2) == 0
