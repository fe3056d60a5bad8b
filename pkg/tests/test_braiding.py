from fractions import Fraction

import pytest

from frtkit.bimodule import find_dual_bases, tensor_over_A
from frtkit.braiding import (
    braid_power_braiding,
    check_dualizable,
    check_yang_baxter,
    double_extension,
)
from frtkit.errors import NotDualizable, NotYangBaxter
from frtkit.linalg import QQ, Matrix

from conftest import flip_matrix, q2_matrix


@pytest.fixture
def flip_obj(qq2):
    return check_yang_baxter(qq2, find_dual_bases(qq2), flip_matrix(2))


@pytest.fixture
def q2_obj(qq2):
    return check_yang_baxter(qq2, find_dual_bases(qq2), q2_matrix())


def test_flip_satisfies_ybe(flip_obj):
    assert flip_obj.c_inv == flip_obj.c


def test_diagonal_perturbation_of_flip_still_braids(qq2):
    # scaling a diagonal fixed point gives a diagonal-type solution, so it
    # must still certify; only off-pattern perturbations break the braid
    # equation
    ok = flip_matrix(2)
    ok.rows[0][0] = Fraction(2)
    obj = check_yang_baxter(qq2, find_dual_bases(qq2), ok)
    assert obj.c_inv is not None


def test_q2_satisfies_ybe(q2_obj):
    # independent oracle: assemble both sides of the braid equation as
    # explicit 8x8 matrices from the 4x4 braiding
    c = q2_matrix()
    i2 = Matrix.identity(QQ, 2)
    lhs = c.kron(i2).mul(i2.kron(c)).mul(c.kron(i2))
    rhs = i2.kron(c).mul(c.kron(i2)).mul(i2.kron(c))
    assert lhs == rhs
    assert q2_obj.c.mul(q2_obj.c_inv) == Matrix.identity(QQ, 4)


def test_perturbed_flip_rejected(qq2):
    bad = flip_matrix(2)
    bad.rows[1][1] = Fraction(2)  # breaks the braid equation
    with pytest.raises(NotYangBaxter) as err:
        check_yang_baxter(qq2, find_dual_bases(qq2), bad)
    assert "residual" in str(err.value)


def test_perturbed_flip_residual_matches_oracle(qq2):
    bad = flip_matrix(2)
    bad.rows[1][1] = Fraction(2)
    i2 = Matrix.identity(QQ, 2)
    lhs = bad.kron(i2).mul(i2.kron(bad)).mul(bad.kron(i2))
    rhs = i2.kron(bad).mul(bad.kron(i2)).mul(i2.kron(bad))
    assert not lhs.sub(rhs).is_zero()


def test_flip_dualizable(flip_obj):
    cert = check_dualizable(flip_obj)
    # for the swap, both flats are the swap on module x dual
    assert cert.c_flat == flip_matrix(2)
    assert cert.cinv_flat == flip_matrix(2)
    assert cert.c_flatflat == flip_matrix(2)


def test_q2_dualizable(q2_obj):
    cert = check_dualizable(q2_obj)
    assert cert.c_flat.mul(cert.c_flat_inv) == Matrix.identity(QQ, 4)
    assert cert.cinv_flat.mul(cert.cinv_flat_inv) == Matrix.identity(QQ, 4)


def test_identity_braiding_one_dim_fully_trivial(trivial_algebra):
    from frtkit.bimodule import Bimodule

    m = Bimodule(trivial_algebra, 1, [Matrix.identity(QQ, 1)], [Matrix.identity(QQ, 1)])
    obj = check_yang_baxter(m, find_dual_bases(m), Matrix.identity(QQ, 1))
    cert = check_dualizable(obj)
    for mat in (cert.c_flat, cert.c_flat_inv, cert.cinv_flat, cert.cinv_flat_inv, cert.c_flatflat):
        assert mat == Matrix.identity(QQ, 1)
    dbl = double_extension(obj, cert)
    # each 1-dim block map is the identity; the braiding still has to move
    # the mixed summands onto each other, so the matrix is the block swap
    expect = Matrix.zero(QQ, 4, 4)
    for src, tgt in ((0, 0), (1, 2), (2, 1), (3, 3)):
        expect.rows[tgt][src] = Fraction(1)
    assert dbl.c == expect


def test_identity_braiding_two_dim_not_dualizable(qq2):
    obj = check_yang_baxter(qq2, find_dual_bases(qq2), Matrix.identity(QQ, 4))
    with pytest.raises(NotDualizable):
        check_dualizable(obj)


def test_double_extension_flip(flip_obj):
    cert = check_dualizable(flip_obj)
    dbl = double_extension(flip_obj, cert)
    assert dbl.module.dim == 4
    assert dbl.c.nrows == 16
    # restriction to the module-module block is the original braiding
    m = flip_obj.module.dim
    big = dbl.module.dim
    for i in range(m):
        for j in range(m):
            col = dbl.c.rows
            src = i * big + j
            for r in range(m):
                for s in range(m):
                    assert col[r * big + s][src] == flip_obj.c.rows[r * m + s][i * m + j]


def test_double_extension_q2(q2_obj):
    cert = check_dualizable(q2_obj)
    dbl = double_extension(q2_obj, cert)
    assert dbl.c.mul(dbl.c_inv) == Matrix.identity(QQ, 16)


def test_braid_power_one_one_is_c(flip_obj, q2_obj):
    for obj in (flip_obj, q2_obj):
        assert braid_power_braiding(obj, 1, 1) == obj.c


def test_braid_power_one_two_hexagon(q2_obj):
    c = q2_obj.c
    i2 = Matrix.identity(QQ, 2)
    expect = i2.kron(c).mul(c.kron(i2))
    assert braid_power_braiding(q2_obj, 1, 2) == expect


def test_braid_power_two_two_flip_permutation(flip_obj):
    got = braid_power_braiding(flip_obj, 2, 2)
    # oracle: the permutation matrix of (13)(24) on the 4th tensor power
    n = 2
    perm = Matrix.zero(QQ, n**4, n**4)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    src = ((a * n + b) * n + c) * n + d
                    tgt = ((c * n + d) * n + a) * n + b
                    perm.rows[tgt][src] = Fraction(1)
    assert got == perm


def test_braid_power_inverse_roundtrip(q2_obj):
    fwd = braid_power_braiding(q2_obj, 2, 1)
    back = braid_power_braiding(q2_obj, 1, 2)
    # crossing back with the inverse braiding undoes the crossing
    assert fwd.inverse() == _inverse_braid(q2_obj, 1, 2)


def _inverse_braid(obj, m, n):
    from frtkit.chains import BraidBlocks, word_braiding_matrix

    blocks = BraidBlocks(obj.ctx, {(obj.letter.name, obj.letter.name): obj.c_inv})
    return word_braiding_matrix(obj.ctx, blocks, (obj.letter,) * m, (obj.letter,) * n)


def test_braid_power_trivial_blocks(flip_obj):
    assert braid_power_braiding(flip_obj, 0, 2) == Matrix.identity(QQ, 4)
    assert braid_power_braiding(flip_obj, 2, 0) == Matrix.identity(QQ, 4)
