from fractions import Fraction

import pytest

from frtkit.algebra import AlgebraSpec
from frtkit.bimodule import (
    BimoduleMap,
    Bimodule,
    check_bimodule,
    check_bimodule_map,
    find_dual_bases,
    flat_transform,
    left_dual,
    regular_bimodule,
    tensor_over_A,
)
from frtkit.errors import NotProjective
from frtkit.linalg import QQ, Matrix

from conftest import FULL2_ARROWS, flip_matrix


def test_regular_bimodule_passes(map2, upper_triangular):
    assert check_bimodule(regular_bimodule(map2)).passed
    assert check_bimodule(regular_bimodule(upper_triangular)).passed


def test_path_bimodule_passes(path_full2):
    assert check_bimodule(path_full2).passed


def test_identity_is_bimodule_map(qq2):
    assert check_bimodule_map(Matrix.identity(QQ, 2), qq2, qq2).passed


def test_flip_over_k_is_bimodule_map(qq2):
    t = tensor_over_A(qq2, qq2)
    assert t.dim == 4  # trivial base algebra: nothing is identified
    assert check_bimodule_map(flip_matrix(2), t.space, t.space).passed


def test_naive_flip_fails_over_path_bimodule(path_full2):
    t = tensor_over_A(path_full2, path_full2)
    assert t.dim == 8  # composable pairs of the full 2-vertex quiver
    n = path_full2.dim
    flip = Matrix.zero(QQ, t.kdim, t.kdim)
    for i in range(n):
        for j in range(n):
            flip.rows[j * n + i][i * n + j] = Fraction(1)
    # the naive swap does not even descend; check it on the quotient by
    # conjugating with section/projection and testing intertwining
    sec = t.section_matrix()
    proj = t.projection_matrix()
    cand = proj.mul(flip).mul(sec)
    assert not check_bimodule_map(cand, t.space, t.space).passed


def test_tensor_dim_multiplies_over_trivial_algebra(qq2):
    assert tensor_over_A(qq2, qq2).dim == 4


def test_tensor_with_regular_keeps_dim(path_full2, map2):
    t = tensor_over_A(path_full2, regular_bimodule(map2))
    assert t.dim == path_full2.dim
    t2 = tensor_over_A(regular_bimodule(map2), path_full2)
    assert t2.dim == path_full2.dim


def test_tensor_associativity_dims(path_full2):
    m = path_full2
    t12 = tensor_over_A(m, m)
    left = tensor_over_A(t12.space, m)
    t23 = tensor_over_A(m, m)
    right = tensor_over_A(m, t23.space)
    assert left.dim == right.dim == 16  # paths of length 3: 4 * 2 * 2

    # canonical reassociation: transport through the shared k-cube
    F = QQ
    n = m.dim
    cols = []
    for col in range(left.dim):
        amb = left.section([F.one if i == col else F.zero for i in range(left.dim)])
        cube = {}
        for k, c in enumerate(amb):
            if c == F.zero:
                continue
            uv, w = divmod(k, n)
            pair = t12.section([F.one if i == uv else F.zero for i in range(t12.dim)])
            for k2, c2 in enumerate(pair):
                if c2 != F.zero:
                    cube[k2 * n + w] = F.add(cube.get(k2 * n + w, F.zero), F.mul(c, c2))
        # regroup cube (u,v,w) -> u*(dim t23)+class(v,w)
        out = {}
        for k, c in cube.items():
            uvw, w = divmod(k, n)
            u, v = divmod(uvw, n)
            inner = t23.project_sparse({v * n + w: c})
            for pos, cc in inner.items():
                key = u * t23.dim + pos
                out[key] = F.add(out.get(key, F.zero), cc)
        cols.append([right.project_sparse(out).get(i, F.zero) for i in range(right.dim)])
    mat = Matrix(QQ, [[cols[j][i] for j in range(left.dim)] for i in range(right.dim)], left.dim)
    mat.inverse()  # must be invertible


def test_left_dual_of_free_module(qq2):
    pair = left_dual(qq2)
    assert pair.dual.dim == 2
    for i in range(2):
        for j in range(2):
            val = pair.ev(pair.dual.basis_vec(j), qq2.basis_vec(i))
            assert val == [Fraction(1) if i == j else Fraction(0)]


def test_left_dual_of_path_bimodule(path_full2, map2):
    pair = left_dual(path_full2)
    assert pair.dual.dim == 4
    # the dual basis in canonical order pairs arrows with their delta
    # functionals, scaled by the idempotent at the arrow source
    db = find_dual_bases(path_full2, pair)
    assert db.size == 4
    for q, (s, t) in enumerate(FULL2_ARROWS):
        for p in range(4):
            val = pair.ev(db.functionals[q], path_full2.basis_vec(p))
            expect = [Fraction(0), Fraction(0)]
            if p == q:
                expect[s] = Fraction(1)
            assert val == expect


def test_left_dual_of_algebra_as_module(map2):
    pair = left_dual(regular_bimodule(map2))
    assert pair.dual.dim == 2


def test_find_dual_bases_free(qq2):
    db = find_dual_bases(qq2)
    assert db.size == 2
    assert db.certify().passed


def test_not_projective():
    # A = k[x]/(x^2) acting on k through x -> 0
    z, o = Fraction(0), Fraction(1)
    gamma = [[[o, z], [z, o]], [[z, o], [z, z]]]
    a = AlgebraSpec(QQ, 2, gamma, [o, z])
    act = [Matrix.identity(QQ, 1), Matrix.zero(QQ, 1, 1)]
    m = Bimodule(a, 1, act, act)
    assert check_bimodule(m).passed
    with pytest.raises(NotProjective):
        find_dual_bases(m)


def test_flat_transform_of_reindexing_swap(qq2):
    # over a trivial base algebra the plain swap is a bimodule map; its
    # flat is the swap again, up to the canonical reindexing
    t = tensor_over_A(qq2, qq2)
    db = find_dual_bases(qq2)
    f = BimoduleMap(t.space, t.space, flip_matrix(2))
    flat = flat_transform(f, qq2, qq2, db)
    assert flat.matrix == flip_matrix(2)


def test_flat_transform_identity_matrix_is_rank_deficient(qq2):
    # the identity braiding on a 2-dim module has a non-invertible flat;
    # contrast with the swap above
    t = tensor_over_A(qq2, qq2)
    db = find_dual_bases(qq2)
    f = BimoduleMap(t.space, t.space, Matrix.identity(QQ, 4))
    flat = flat_transform(f, qq2, qq2, db)
    assert flat.matrix.rank() == 1


def test_dual_bases_certify_reports_hat(path_full2):
    db = find_dual_bases(path_full2)
    rep = db.certify()
    assert rep.passed
    assert len(rep.entries) == 2  # no hat family attached here
