from fractions import Fraction
from itertools import product

import pytest

from voalab.constructors import (
    DilatonSpec,
    InvalidLattice,
    InvalidLieData,
    LatticeSpec,
    LieAlgebraData,
    abelian,
    dilaton,
    heisenberg,
    lattice_voa,
    sl2,
)

F = Fraction


def test_sl2_killing_form():
    g = sl2(1)
    assert g.killing() == ((0, 0, 4), (0, 8, 0), (4, 0, 0))
    assert sl2(2).Q == tuple(tuple(2 * x for x in row) for row in g.killing())


def test_lie_data_validation():
    with pytest.raises(InvalidLieData, match="antisymmetry"):
        LieAlgebraData(2, {(0, 1): {0: 1}}, [[1, 0], [0, 1]])
    with pytest.raises(InvalidLieData, match="ad-invariant"):
        LieAlgebraData(2, {(0, 1): {0: 1}, (1, 0): {0: -1}}, [[1, 0], [0, 1]])
    with pytest.raises(ValueError, match="symmetric"):
        abelian(2, [[1, 2], [0, 1]])


def test_jacobi_is_checked():
    # [x, y] = z, [y, z] = x, [z, x] = x fails Jacobi
    sc = {(0, 1): {2: 1}, (1, 0): {2: -1}, (1, 2): {0: 1}, (2, 1): {0: -1}, (2, 0): {0: 1}, (0, 2): {0: -1}}
    with pytest.raises(InvalidLieData, match="Jacobi"):
        LieAlgebraData(3, sc, [[0] * 3] * 3)


def test_dilaton_needs_nonzero_form():
    with pytest.raises(ValueError):
        DilatonSpec(1, 0)
    assert dilaton(DilatonSpec(3, 2)).meta == {"lambda": 3, "Q": 2}


def test_lattice_validation():
    with pytest.raises(InvalidLattice, match="odd"):
        LatticeSpec(((1,),))
    with pytest.raises(InvalidLattice, match="symmetric"):
        LatticeSpec(((2, 1), (0, 2)))
    with pytest.raises(InvalidLattice, match="cocycle"):
        LatticeSpec(((2, -1), (-1, 2)), ((1, 1), (1, 1)))


def test_default_cocycle():
    spec = LatticeSpec(((2, -1), (-1, 2)))
    assert spec.cocycle == ((1, 1), (-1, 1))
    for x, y in product(product(range(-2, 3), repeat=2), repeat=2):
        assert spec.eps(x, y) * spec.eps(y, x) == (-1) ** spec.form(x, y)


def test_a1_sector_weights():
    voa = lattice_voa(LatticeSpec(((2,),)))
    for lam in range(-3, 4):
        assert voa.conformal_weight(lam) == lam * lam
        assert voa.sector(lam).highest_weight.get("a", 0) == 2 * lam


def test_vertex_operator_lowest_mode_hits_vacuum():
    voa = lattice_voa(LatticeSpec(((2,),)))
    # Gamma_1(z) on |-1> starts at z^Q(1,-1) = z^-2, i.e. mode k = 2 - 1 = 1
    out = voa.vertex_operator_mode(1, 1, -1, ())
    assert out == {((0,), ()): voa.spec.eps((1,), (-1,))}
    assert all(nu == (0,) for nu, _ in voa.vertex_operator_mode(1, -2, -1, ()))


@pytest.mark.parametrize("gram,lam,mu", [
    (((2,),), (1,), (1,)),
    (((2, -1), (-1, 2)), (1, 0), (1, 1)),
    (((2, -1), (-1, 2)), (1, 1), (0, 1)),
    (((2, 0), (0, 2)), (1, 0), (0, 1)),
])
def test_vertex_operators_commute_when_the_pairing_is_nonnegative(gram, lam, mu):
    voa = lattice_voa(LatticeSpec(gram))
    assert voa.spec.form(lam, mu) >= 0
    zero = tuple([0] * voa.rank)
    for k, l in product(range(-3, 2), repeat=2):
        for state in ({(zero, ()): F(1)}, voa.heisenberg_apply(voa.names[0], -1, {(zero, ()): F(1)})):
            ab = voa.vertex_operator_apply(lam, k, voa.vertex_operator_apply(mu, l, state))
            ba = voa.vertex_operator_apply(mu, l, voa.vertex_operator_apply(lam, k, state))
            assert ab == ba


def test_heisenberg_scalar_form_means_identity():
    assert heisenberg(3).meta["Q"] == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
