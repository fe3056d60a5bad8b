from fractions import Fraction

import pytest

from frtkit.algebra import (
    AlgebraSpec,
    check_algebra,
    env_multiply_out,
    env_source,
    env_target,
    enveloping,
    function_algebra,
)
from frtkit.errors import EmptyIndexSet, InvalidAlgebra
from frtkit.linalg import QQ


def test_rationals_as_algebra(trivial_algebra):
    assert check_algebra(trivial_algebra).passed


def test_function_algebra_passes(map2):
    assert check_algebra(map2).passed
    three = function_algebra(QQ, "abc")
    assert three.dim == 3
    assert check_algebra(three).passed
    one = function_algebra(QQ, ["only"])
    assert one.dim == 1
    with pytest.raises(EmptyIndexSet):
        function_algebra(QQ, [])


def test_broken_unit_law_detected():
    z, o = Fraction(0), Fraction(1)
    # e1 e1 = e2, e2 e2 = e1, unit claimed to be e1
    gamma = [[[z, o], [z, z]], [[z, z], [o, z]]]
    rep = check_algebra(AlgebraSpec(QQ, 2, gamma, [o, z]))
    assert not rep.passed
    assert any(c == "unit" for c, _ in rep.failures())


def test_upper_triangular_is_associative(upper_triangular):
    assert check_algebra(upper_triangular).passed
    assert not upper_triangular.is_commutative()


def test_enveloping_trivial(trivial_algebra):
    env = enveloping(trivial_algebra)
    assert env.dim == 1
    assert check_algebra(env).passed


def test_enveloping_map2(map2):
    env = enveloping(map2)
    assert env.dim == 4
    assert check_algebra(env).passed
    assert env.is_commutative()
    # idempotent basis
    for i in range(4):
        e = env.basis_vec(i)
        assert env.mul(e, e) == e


def test_enveloping_upper_triangular(upper_triangular):
    env = enveloping(upper_triangular)
    assert env.dim == 9
    assert check_algebra(env).passed
    assert not env.is_commutative()


def test_enveloping_commutative_iff_base_is(map2, upper_triangular):
    assert enveloping(map2).is_commutative() == map2.is_commutative()
    assert enveloping(upper_triangular).is_commutative() == upper_triangular.is_commutative()


def test_enveloping_rejects_invalid():
    z, o = Fraction(0), Fraction(1)
    gamma = [[[z, o], [z, z]], [[z, z], [o, z]]]
    with pytest.raises(InvalidAlgebra):
        enveloping(AlgebraSpec(QQ, 2, gamma, [o, z]))


def test_source_target_commute(upper_triangular):
    a = upper_triangular
    env = enveloping(a)
    for i in range(a.dim):
        for j in range(a.dim):
            s = env_source(a, a.basis_vec(i))
            t = env_target(a, a.basis_vec(j))
            assert env.mul(s, t) == env.mul(t, s)


def test_env_multiply_out(upper_triangular):
    a = upper_triangular
    for i in range(a.dim):
        for j in range(a.dim):
            u = env_source(a, a.basis_vec(i))
            v = env_target(a, a.basis_vec(j))
            prod = enveloping(a).mul(u, v)
            assert env_multiply_out(a, prod) == a.mul(a.basis_vec(i), a.basis_vec(j))
