"""Shared fixture data: small algebras, modules and braidings built by hand.

The path bimodule here is constructed independently of frtkit.face_model so
that the two constructions cross-check each other.
"""

from fractions import Fraction

import pytest

from frtkit.algebra import AlgebraSpec, function_algebra
from frtkit.bimodule import Bimodule
from frtkit.linalg import QQ, Matrix


def frac_matrix(rows):
    return Matrix(QQ, [[Fraction(x) for x in r] for r in rows])


@pytest.fixture
def trivial_algebra():
    return AlgebraSpec(QQ, 1, [[[Fraction(1)]]], [Fraction(1)])


@pytest.fixture
def map2():
    return function_algebra(QQ, ["1", "2"])


@pytest.fixture
def upper_triangular():
    """2x2 upper-triangular matrices on the basis E11, E12, E22."""
    z, o = Fraction(0), Fraction(1)
    n = 3
    gamma = [[[z] * n for _ in range(n)] for _ in range(n)]

    def setprod(i, j, k):
        gamma[i][j][k] = o

    setprod(0, 0, 0)  # E11 E11 = E11
    setprod(0, 1, 1)  # E11 E12 = E12
    setprod(1, 2, 1)  # E12 E22 = E12
    setprod(2, 2, 2)  # E22 E22 = E22
    return AlgebraSpec(QQ, n, gamma, [o, z, o])


@pytest.fixture
def qq2(trivial_algebra):
    ident = Matrix.identity(QQ, 2)
    return Bimodule(trivial_algebra, 2, [ident], [ident])


FULL2_ARROWS = [(0, 0), (0, 1), (1, 0), (1, 1)]  # (source, target) over two vertices


def path_bimodule(algebra, arrows):
    z, o = Fraction(0), Fraction(1)
    dim = len(arrows)
    left, right = [], []
    for lam in range(algebra.dim):
        lmat = Matrix.zero(QQ, dim, dim)
        rmat = Matrix.zero(QQ, dim, dim)
        for q, (s, t) in enumerate(arrows):
            if s == lam:
                lmat.rows[q][q] = o
            if t == lam:
                rmat.rows[q][q] = o
        left.append(lmat)
        right.append(rmat)
    return Bimodule(algebra, dim, left, right)


@pytest.fixture
def path_full2(map2):
    return path_bimodule(map2, FULL2_ARROWS)


def flip_matrix(n):
    """The swap on the n^2-dimensional tensor square over a trivial algebra."""
    m = Matrix.zero(QQ, n * n, n * n)
    for i in range(n):
        for j in range(n):
            m.rows[j * n + i][i * n + j] = Fraction(1)
    return m


def q2_matrix():
    """The two-parameter Hecke-type braiding with q = 2 on a 2-dim module."""
    c = Matrix.zero(QQ, 4, 4)
    ent = {
        (0, 0, 0, 0): Fraction(2),
        (0, 1, 1, 0): Fraction(1),
        (1, 0, 0, 1): Fraction(1),
        (1, 0, 1, 0): Fraction(3, 2),
        (1, 1, 1, 1): Fraction(2),
    }
    for (i, j, r, s), v in ent.items():
        c.rows[r * 2 + s][i * 2 + j] = v
    return c
