from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from frtkit.errors import NotInvertible
from frtkit.linalg import (
    QQ,
    Matrix,
    PrimeField,
    SparseEchelon,
    Subspace,
    field_from_descriptor,
    kernel_basis,
    quotient_dim,
    solve,
    sv_from_dense,
)


def qmat(rows):
    return Matrix(QQ, [[Fraction(x) for x in r] for r in rows])


def test_identity_kernel_trivial():
    assert kernel_basis(Matrix.identity(QQ, 2)).dim == 0


def test_row_vector_kernel():
    ker = kernel_basis(qmat([[1, 1]]))
    assert ker.dim == 1
    assert ker.rows == [[Fraction(1), Fraction(-1)]]


def flip_relation_matrix():
    """The 16 degree-two exchange relations of the flip braiding on a
    2-dim module: T_j^p T_i^q - T_i^q T_j^p, written in the 16 monomial
    coordinates (a, b) -> a*4 + b with a = 2i+j as generator index."""
    rows = []
    for i in range(2):
        for j in range(2):
            for p in range(2):
                for q in range(2):
                    vec = [Fraction(0)] * 16
                    g1 = (2 * j + p) * 4 + (2 * i + q)
                    g2 = (2 * i + q) * 4 + (2 * j + p)
                    vec[g1] += 1
                    vec[g2] -= 1
                    rows.append(vec)
    return qmat(rows)


def test_flip_relation_span_and_transpose_kernel():
    m = flip_relation_matrix()
    # independent oracle: sympy rank over the rationals
    srank = sympy.Matrix([[int(x) for x in r] for r in m.rows]).rank()
    assert m.rank() == srank == 6
    assert kernel_basis(m.transpose()).dim == 16 - 6 == 10


def test_solve_identity():
    assert solve(Matrix.identity(QQ, 2), [Fraction(3), Fraction(5)]) == [Fraction(3), Fraction(5)]


def test_solve_free_variable_convention():
    assert solve(qmat([[1, 1]]), [Fraction(2)]) == [Fraction(2), Fraction(0)]


def test_solve_inconsistent():
    assert solve(qmat([[1, 1], [1, 1]]), [Fraction(1), Fraction(2)]) is None


def test_quotient_dims():
    m = flip_relation_matrix()
    sub = m.row_space()
    assert sub.dim == 6
    dim, q = quotient_dim(16, sub)
    assert dim == 10
    zero = Subspace.from_vectors(QQ, 7, [])
    assert quotient_dim(7, zero)[0] == 7
    full = Subspace.from_vectors(QQ, 3, Matrix.identity(QQ, 3).rows)
    assert quotient_dim(3, full)[0] == 0
    # projection kills exactly the subspace, section is a right inverse
    for row in sub.rows:
        assert all(x == 0 for x in q.project(row))
    coords = [Fraction(k + 1) for k in range(10)]
    assert q.project(q.section(coords)) == coords


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=1, max_size=5))
def test_rank_nullity_and_sympy_agreement(rows):
    m = qmat(rows)
    assert m.rank() + kernel_basis(m).dim == m.ncols
    assert m.rank() == sympy.Matrix(rows).rank()


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.integers(0, 6), min_size=3, max_size=3), min_size=1, max_size=4))
def test_prime_field_rank_nullity(rows):
    F = PrimeField(7)
    m = Matrix(F, [[F.of(x) for x in r] for r in rows])
    assert m.rank() + kernel_basis(m).dim == 3
    # canonical determinism
    again = Matrix(F, [[F.of(x) for x in r] for r in rows])
    assert m.rref() == again.rref()


def test_prime_field_basics():
    F = PrimeField(5)
    assert F.parse("7") == 2
    assert F.parse("1/2") == 3  # 2*3 = 6 = 1 mod 5
    assert F.mul(F.inv(3), 3) == F.one
    with pytest.raises(ValueError):
        PrimeField(6)
    assert field_from_descriptor("Fp:11").p == 11
    assert field_from_descriptor("Q") is QQ


def test_inverse_and_not_invertible():
    m = qmat([[1, 2], [3, 4]])
    inv = m.inverse()
    assert m.mul(inv) == Matrix.identity(QQ, 2)
    with pytest.raises(NotInvertible):
        qmat([[1, 1], [1, 1]]).inverse()


def test_sparse_echelon_matches_dense():
    m = flip_relation_matrix()
    ech = SparseEchelon(QQ)
    for row in m.rows:
        ech.add(sv_from_dense(QQ, row))
    assert ech.rank == 6
    sub = m.row_space()
    for row in m.rows:
        assert ech.contains(sv_from_dense(QQ, row))
    probe = [Fraction(1)] + [Fraction(0)] * 15
    dense_red = sub.reduce(probe)
    sparse_red = ech.reduce(sv_from_dense(QQ, probe))
    assert {i: x for i, x in enumerate(dense_red) if x != 0} == sparse_red


def test_rref_is_idempotent_and_deterministic():
    m = qmat([[2, 4, 6], [1, 2, 3], [0, 1, 1]])
    rows1, piv1 = m.rref()
    rows2, piv2 = Matrix(QQ, rows1, 3).rref()
    assert (rows1, piv1) == (rows2, piv2)
