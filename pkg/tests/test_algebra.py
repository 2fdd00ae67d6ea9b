from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voalab.algebra import (
    AlgebraSpec,
    BracketRule,
    GeneratorSpec,
    Poly,
    UnknownGenerator,
    bracket_modes,
    check_axioms,
    normal_order_rewrite,
)
from voalab.constructors import (
    DilatonSpec,
    abelian,
    bc_system,
    dilaton,
    heisenberg,
    kac_moody,
    sl2,
    virasoro,
    virasoro_with_central,
)
from voalab.fock import ModuleSpec

F = Fraction


def test_virasoro_brackets():
    c = F(7, 3)
    alg = virasoro(c)
    assert bracket_modes("L", 1, "L", -1, alg).as_dict() == {("L", 0): 2}
    br = bracket_modes("L", 3, "L", -3, alg)
    assert br.as_dict() == {("L", 0): 6} and br.central == 2 * c
    assert bracket_modes("L", 2, "L", 1, virasoro(0)).as_dict() == {("L", 3): 1}


def test_sl2_brackets():
    alg = kac_moody(sl2(1))
    br = bracket_modes("e", 1, "f", -1, alg)
    assert br.as_dict() == {("h", 0): 1} and br.central == 4  # Q(e, f) = K(e, f) = 4
    for k in range(-3, 4):
        assert bracket_modes("h", 0, "e", k, alg).as_dict() == {("e", k): 2}


def test_bc_brackets():
    alg = bc_system(3)
    assert bracket_modes("b", 2, "c", -2, alg).central == 1
    assert bracket_modes("c", -2, "b", 2, alg).central == 1
    assert bracket_modes("b", 1, "b", -1, alg).is_zero()
    assert [alg[g].ghost for g in ("b", "c")] == [-1, 1]


def test_abelian_kac_moody_is_heisenberg():
    Q = [[2, 1], [1, 2]]
    assert kac_moody(abelian(2, Q)).same_brackets(heisenberg(2, Q))


def test_dilaton_brackets_ignore_lambda():
    assert dilaton(DilatonSpec(0, 1)).same_brackets(dilaton(DilatonSpec(3, 1)))
    # the mode pairing carries the opposite sign of the plain current algebra
    assert dilaton(DilatonSpec(0, 2)).same_brackets(heisenberg(1, -2))


@pytest.mark.parametrize(
    "alg",
    [heisenberg(2), kac_moody(sl2(1)), virasoro(F(1, 2)), bc_system(2), dilaton(DilatonSpec(1, 1))],
    ids=str,
)
def test_constructors_satisfy_axioms(alg):
    assert check_axioms(alg, index_window=4, module_level=2) == []


def test_cocycle_central_term_fails_on_the_vacuum():
    # (c/12) m^3 is a 2-cocycle, so only the vacuum-module check sees it
    bad = virasoro_with_central(Poly.in_m(0, 0, 0, F(1, 12)), 1)
    report = check_axioms(bad, 2)
    assert report and {v.kind for v in report} == {"representation"}


def test_non_cocycle_central_term_fails_jacobi():
    bad = virasoro_with_central(Poly.in_m(0, 0, 0, 0, 0, 1), 1)
    # the first violated triple, (L_2, L_1, L_-3), needs index 3
    assert not any(v.kind == "jacobi" for v in check_axioms(bad, 2))
    report = check_axioms(bad, 3)
    assert any(v.kind == "jacobi" for v in report)
    assert all(len(v.witness) == 6 for v in report if v.kind == "jacobi")


def test_spec_validation():
    with pytest.raises(ValueError):
        AlgebraSpec([GeneratorSpec("x", 1, 1)])
    with pytest.raises(ValueError):
        AlgebraSpec([GeneratorSpec("x", 1), GeneratorSpec("x", 2)])
    with pytest.raises(UnknownGenerator):
        AlgebraSpec([GeneratorSpec("x", 1)], [BracketRule("x", "y")])
    with pytest.raises(ValueError):
        # both orders given, inconsistent with skew-symmetry
        AlgebraSpec(
            [GeneratorSpec("x", 1), GeneratorSpec("y", 1)],
            [BracketRule("x", "y", (), Poly.const(1)), BracketRule("y", "x", (), Poly.const(1))],
        )


modes = st.lists(st.tuples(st.sampled_from(["e", "h", "f"]), st.integers(-2, 2)), max_size=4)


@given(modes)
@settings(max_examples=60, deadline=None)
def test_rewrite_agrees_with_the_module_action(mono):
    alg = kac_moody(sl2(1))
    mod = ModuleSpec.vacuum(alg)
    direct = {(): F(1)}
    for g, m in reversed(mono):
        direct = mod.apply(g, m, direct)
    via = {}
    for word, c in normal_order_rewrite(mono, alg).items():
        v = {(): F(1)}
        for g, m in reversed(word):
            v = mod.apply(g, m, v)
        for s, x in v.items():
            via[s] = via.get(s, 0) + c * x
    assert {s: x for s, x in via.items() if x} == direct


def test_rewrite_examples():
    alg = heisenberg(1)
    assert normal_order_rewrite((("a", 1), ("a", -1)), alg) == {(("a", -1), ("a", 1)): 1, (): 1}
    bc = bc_system(1)
    # a repeated odd mode squares to half its anticommutator
    assert normal_order_rewrite((("b", 1), ("b", 1)), bc) == {}
