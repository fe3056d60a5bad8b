"""Finite-dimensional algebras given by structure constants.

An algebra is described on a chosen basis e_1..e_n by the coordinates of all
basis products e_i e_j together with the coordinate vector of the unit.  The
enveloping algebra and the algebra of functions on a finite set are built
here as well; both are plain `AlgebraSpec` values.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .errors import EmptyIndexSet, InvalidAlgebra
from .linalg import Matrix


@dataclass
class ValidationReport:
    """Outcome of a structural check: named sub-checks with failure details."""

    subject: str
    entries: list = dc_field(default_factory=list)  # (check id, ok, detail)

    def record(self, check, ok, detail=""):
        self.entries.append((check, bool(ok), detail))

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.entries)

    def failures(self):
        return [(c, d) for c, ok, d in self.entries if not ok]

    def __repr__(self):
        state = "pass" if self.passed else "FAIL"
        return f"ValidationReport({self.subject}: {state}, {len(self.entries)} checks)"


class AlgebraSpec:
    """A finite-dimensional algebra over an exact field.

    gamma[i][j] holds the coordinates of e_i * e_j; unit holds the
    coordinates of the multiplicative identity.
    """

    __slots__ = ("field", "dim", "gamma", "unit")

    def __init__(self, field, dim, gamma, unit):
        self.field = field
        self.dim = dim
        self.gamma = tuple(tuple(tuple(v) for v in row) for row in gamma)
        self.unit = tuple(unit)
        if len(self.gamma) != dim or any(len(r) != dim for r in self.gamma):
            raise InvalidAlgebra("structure constant table has wrong shape")
        if any(len(v) != dim for r in self.gamma for v in r):
            raise InvalidAlgebra("structure constant vectors have wrong length")
        if len(self.unit) != dim:
            raise InvalidAlgebra("unit vector has wrong length")

    def zero_vec(self):
        return [self.field.zero] * self.dim

    def mul(self, x, y):
        """Coordinates of the product of two coordinate vectors."""
        F = self.field
        out = self.zero_vec()
        for i, xi in enumerate(x):
            if xi == F.zero:
                continue
            for j, yj in enumerate(y):
                if yj == F.zero:
                    continue
                c = F.mul(xi, yj)
                for k, g in enumerate(self.gamma[i][j]):
                    if g != F.zero:
                        out[k] = F.add(out[k], F.mul(c, g))
        return out

    def left_mult_matrix(self, a):
        """Matrix of x -> a*x on coordinates."""
        F = self.field
        cols = []
        for j in range(self.dim):
            ej = [F.zero] * self.dim
            ej[j] = F.one
            cols.append(self.mul(a, ej))
        return Matrix(F, [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)], self.dim)

    def right_mult_matrix(self, a):
        """Matrix of x -> x*a on coordinates."""
        F = self.field
        cols = []
        for j in range(self.dim):
            ej = [F.zero] * self.dim
            ej[j] = F.one
            cols.append(self.mul(ej, a))
        return Matrix(F, [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)], self.dim)

    def basis_vec(self, i):
        v = [self.field.zero] * self.dim
        v[i] = self.field.one
        return v

    def is_commutative(self):
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if self.gamma[i][j] != self.gamma[j][i]:
                    return False
        return True

    def __repr__(self):
        return f"AlgebraSpec(dim {self.dim} over {self.field.name})"


@dataclass
class AlgebraElement:
    algebra: AlgebraSpec
    coords: tuple

    def __post_init__(self):
        self.coords = tuple(self.coords)
        if len(self.coords) != self.algebra.dim:
            raise InvalidAlgebra("coordinate vector has wrong length")

    def __mul__(self, other):
        if other.algebra is not self.algebra:
            raise InvalidAlgebra("elements of different algebras")
        return AlgebraElement(self.algebra, self.algebra.mul(list(self.coords), list(other.coords)))


def check_algebra(a):
    """Confirm or refute associativity and the unit law, triple by triple."""
    F = a.field
    report = ValidationReport("algebra")
    assoc_fail = []
    for i in range(a.dim):
        for j in range(a.dim):
            ij = list(a.gamma[i][j])
            for k in range(a.dim):
                lhs = a.mul(ij, a.basis_vec(k))
                rhs = a.mul(a.basis_vec(i), list(a.gamma[j][k]))
                if lhs != rhs:
                    assoc_fail.append((i, j, k))
    report.record("associativity", not assoc_fail, f"failing triples: {assoc_fail}" if assoc_fail else "")
    unit_fail = []
    for i in range(a.dim):
        ei = a.basis_vec(i)
        if a.mul(list(a.unit), ei) != ei or a.mul(ei, list(a.unit)) != ei:
            unit_fail.append(i)
    report.record("unit", not unit_fail, f"failing basis elements: {unit_fail}" if unit_fail else "")
    return report


def enveloping(a):
    """The enveloping algebra A (x) A^op on the basis e_i (x) e_j^op.

    Basis index (i, j) is flattened to i*dim + j; the product is
    (a (x) b^op)(c (x) d^op) = ac (x) (db)^op.
    """
    if not check_algebra(a).passed:
        raise InvalidAlgebra("enveloping algebra of an invalid algebra")
    F = a.field
    n = a.dim
    dim = n * n
    gamma = [[None] * dim for _ in range(dim)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                ik = a.gamma[i][k]
                for l in range(n):
                    lj = a.gamma[l][j]
                    vec = [F.zero] * dim
                    for p in range(n):
                        if ik[p] == F.zero:
                            continue
                        for q in range(n):
                            if lj[q] == F.zero:
                                continue
                            vec[p * n + q] = F.add(vec[p * n + q], F.mul(ik[p], lj[q]))
                    gamma[i * n + j][k * n + l] = vec
    unit = [F.zero] * dim
    for i in range(n):
        for j in range(n):
            c = F.mul(a.unit[i], a.unit[j])
            if c != F.zero:
                unit[i * n + j] = c
    return AlgebraSpec(F, dim, gamma, unit)


def env_source(a, x):
    """Embed a in A as a (x) 1 in the enveloping algebra (coordinates)."""
    F = a.field
    n = a.dim
    out = [F.zero] * (n * n)
    for i, xi in enumerate(x):
        if xi == F.zero:
            continue
        for j, uj in enumerate(a.unit):
            if uj != F.zero:
                out[i * n + j] = F.add(out[i * n + j], F.mul(xi, uj))
    return out


def env_target(a, x):
    """Embed a in A^op as 1 (x) a^op in the enveloping algebra (coordinates)."""
    F = a.field
    n = a.dim
    out = [F.zero] * (n * n)
    for j, xj in enumerate(x):
        if xj == F.zero:
            continue
        for i, ui in enumerate(a.unit):
            if ui != F.zero:
                out[i * n + j] = F.add(out[i * n + j], F.mul(ui, xj))
    return out


def env_multiply_out(a, u):
    """Collapse an enveloping-algebra element to A by multiplying the legs."""
    F = a.field
    n = a.dim
    out = [F.zero] * n
    for idx, c in enumerate(u):
        if c == F.zero:
            continue
        i, j = divmod(idx, n)
        prod = a.gamma[i][j]
        for k in range(n):
            if prod[k] != F.zero:
                out[k] = F.add(out[k], F.mul(c, prod[k]))
    return out


def function_algebra(field, labels):
    """The algebra of functions on a finite set, on the delta-function basis."""
    labels = list(labels)
    if not labels:
        raise EmptyIndexSet("function algebra over the empty set")
    n = len(labels)
    gamma = [[[field.one if (i == j and i == k) else field.zero for k in range(n)]
              for j in range(n)] for i in range(n)]
    unit = [field.one] * n
    return AlgebraSpec(field, n, gamma, unit)
