from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voalab.exact import (
    QSeries,
    RatMatrix,
    matrix_rank,
    matrix_rank_kernel,
    partition_series,
    partitions,
    qseries_mul,
    rat,
    rat_str,
)

small = st.integers(min_value=-4, max_value=4)


@st.composite
def matrices(draw, max_dim=5):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    return RatMatrix.from_rows(rows)


def test_rat_refuses_floats():
    with pytest.raises(TypeError):
        rat(0.5)
    assert rat("3/6") == Fraction(1, 2)
    assert rat_str(Fraction(-3, 1)) == "-3" and rat_str(Fraction(2, 4)) == "1/2"


def test_identity_and_row_vector():
    assert matrix_rank_kernel(RatMatrix.identity(2)) == (2, [])
    rank, ker = matrix_rank_kernel(RatMatrix.from_rows([[1, -1]]))
    assert rank == 1 and ker == [[1, 1]]


def test_no_stored_zeros():
    m = RatMatrix.from_rows([[0, 1], [0, 0]])
    assert list(m.entries) == [(0, 1)]


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_kernel_vectors_are_annihilated(m):
    rank, ker = matrix_rank_kernel(m)
    assert rank + len(ker) == m.cols
    for v in ker:
        assert all(x == 0 for x in m.apply(v))


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_rank_of_transpose(m):
    t = RatMatrix(m.cols, m.rows, {(j, i): v for (i, j), v in m.entries.items()})
    assert matrix_rank(m) == matrix_rank(t)


@given(matrices())
@settings(max_examples=30, deadline=None)
def test_kernel_is_deterministic(m):
    assert matrix_rank_kernel(m) == matrix_rank_kernel(RatMatrix(m.rows, m.cols, dict(reversed(list(m.entries.items())))))


def test_partition_examples():
    assert partitions(0) == [()]
    assert len(partitions(4)) == 5 and len(partitions(8)) == 22
    assert partitions(4) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


def test_partitions_match_generating_function():
    P = partition_series(12)
    for n in range(13):
        ps = partitions(n)
        assert len(set(ps)) == len(ps) == P[n]
        assert all(sum(p) == n and list(p) == sorted(p, reverse=True) for p in ps)


def test_qseries_examples():
    a = QSeries.from_dict({0: 1, 2: Fraction(1, 3), 5: -2}, 8)
    assert qseries_mul(a, QSeries.constant(1, 8)) == a
    geo = QSeries.from_dict({e: 1 for e in range(9)}, 8)
    one_minus_q = QSeries.from_dict({0: 1, 1: -1}, 8)
    assert (one_minus_q * geo).to_dict() == {0: 1}
    assert [partition_series(8)[e] for e in range(9)] == [1, 1, 2, 3, 5, 7, 11, 15, 22]


def test_qseries_cutoff_is_the_minimum():
    a = QSeries.from_dict({0: 1}, 5)
    b = QSeries.from_dict({0: 1}, 3)
    assert (a + b).cutoff == 3 and (a * b).cutoff == 3
    with pytest.raises(IndexError):
        (a * b)[4]


@given(st.lists(small, min_size=1, max_size=6).filter(lambda xs: xs[0] != 0))
@settings(max_examples=40, deadline=None)
def test_qseries_inverse(coeffs):
    a = QSeries.from_dict(dict(enumerate(coeffs)), 6)
    prod = a * a.inverse()
    assert prod.to_dict() == {0: 1}
