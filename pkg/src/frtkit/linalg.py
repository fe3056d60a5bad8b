"""Exact linear algebra over the rationals or a prime field.

Everything here is deterministic: echelon forms are the canonical reduced
row echelon form, kernels and solutions are derived from it with the
free-variables-set-to-zero convention, so repeated runs produce identical
output bit for bit.
"""

from __future__ import annotations

import heapq
from fractions import Fraction

from .errors import NotInvertible


class Field:
    """Abstract exact field; elements are plain Python objects."""

    name = "?"

    def of(self, n):
        raise NotImplementedError

    def parse(self, s):
        raise NotImplementedError

    def fmt(self, x):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def __repr__(self):
        return self.name


class RationalField(Field):
    """The rationals with arbitrary-precision arithmetic (Fraction elements)."""

    name = "Q"

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def of(self, n):
        return Fraction(n)

    def parse(self, s):
        return Fraction(s)

    def fmt(self, x):
        return str(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("division by zero in Q")
        return 1 / a


class PrimeField(Field):
    """Integers modulo a prime p; elements are ints in [0, p)."""

    def __init__(self, p):
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.name = f"F{p}"
        self.zero = 0
        self.one = 1 % p

    def of(self, n):
        return n % self.p

    def parse(self, s):
        s = s.strip()
        if "/" in s:
            num, den = s.split("/", 1)
            return self.div(self.of(int(num)), self.of(int(den)))
        return self.of(int(s))

    def fmt(self, x):
        return str(x % self.p)

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"division by zero in F{self.p}")
        return pow(a, self.p - 2, self.p)


QQ = RationalField()


def field_from_descriptor(desc):
    """Parse a field descriptor: "Q" or "Fp:<prime>"."""
    if desc == "Q":
        return QQ
    if desc.startswith("Fp:"):
        return PrimeField(int(desc[3:]))
    raise ValueError(f"unknown field descriptor {desc!r}")


# ---------------------------------------------------------------------------
# dense matrices


class Matrix:
    """Dense matrix over an exact field, stored as a list of row lists."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field, rows, ncols=None):
        self.field = field
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            if not self.rows:
                raise ValueError("empty matrix needs an explicit column count")
            ncols = len(self.rows[0])
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")

    @classmethod
    def zero(cls, field, nrows, ncols):
        z = field.zero
        return cls(field, [[z] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, field, n):
        m = cls.zero(field, n, n)
        for i in range(n):
            m.rows[i][i] = field.one
        return m

    def copy(self):
        return Matrix(self.field, self.rows, self.ncols)

    def transpose(self):
        return Matrix(
            self.field,
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            self.nrows,
        )

    def matvec(self, v):
        F = self.field
        out = []
        for row in self.rows:
            acc = F.zero
            for a, x in zip(row, v):
                if a != F.zero and x != F.zero:
                    acc = F.add(acc, F.mul(a, x))
            out.append(acc)
        return out

    def mul(self, other):
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matrix product")
        F = self.field
        ot = other.transpose()
        out = []
        for row in self.rows:
            new = []
            for col in ot.rows:
                acc = F.zero
                for a, b in zip(row, col):
                    if a != F.zero and b != F.zero:
                        acc = F.add(acc, F.mul(a, b))
                new.append(acc)
            out.append(new)
        return Matrix(F, out, other.ncols)

    def add(self, other):
        F = self.field
        return Matrix(
            F,
            [[F.add(a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
            self.ncols,
        )

    def sub(self, other):
        F = self.field
        return Matrix(
            F,
            [[F.sub(a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
            self.ncols,
        )

    def scale(self, c):
        F = self.field
        return Matrix(F, [[F.mul(c, a) for a in r] for r in self.rows], self.ncols)

    def kron(self, other):
        F = self.field
        out = []
        for r1 in self.rows:
            for r2 in other.rows:
                out.append([F.mul(a, b) for a in r1 for b in r2])
        return Matrix(F, out, self.ncols * other.ncols)

    def is_zero(self):
        z = self.field.zero
        return all(a == z for r in self.rows for a in r)

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols} over {self.field.name})"

    def rref(self):
        """Canonical reduced row echelon form; returns (rows, pivot columns)."""
        F = self.field
        rows = [list(r) for r in self.rows]
        pivots = []
        pr = 0
        for pc in range(self.ncols):
            src = None
            for i in range(pr, len(rows)):
                if rows[i][pc] != F.zero:
                    src = i
                    break
            if src is None:
                continue
            rows[pr], rows[src] = rows[src], rows[pr]
            inv = F.inv(rows[pr][pc])
            rows[pr] = [F.mul(inv, a) for a in rows[pr]]
            for i in range(len(rows)):
                if i != pr and rows[i][pc] != F.zero:
                    c = rows[i][pc]
                    rows[i] = [F.sub(a, F.mul(c, b)) for a, b in zip(rows[i], rows[pr])]
            pivots.append(pc)
            pr += 1
            if pr == len(rows):
                break
        return rows[:pr], tuple(pivots)

    def rank(self):
        return len(self.rref()[1])

    def row_space(self):
        rows, pivots = self.rref()
        return Subspace(self.field, self.ncols, rows, pivots)

    def kernel(self):
        return kernel_basis(self)

    def solve(self, b):
        return solve(self, b)

    def inverse(self):
        if self.nrows != self.ncols:
            raise NotInvertible("matrix is not square")
        n = self.nrows
        F = self.field
        aug = Matrix(F, [r + list(i_row) for r, i_row in zip(self.rows, Matrix.identity(F, n).rows)], 2 * n)
        rows, pivots = aug.rref()
        if tuple(range(n)) != pivots[:n] or len(pivots) != n:
            raise NotInvertible("matrix is singular")
        return Matrix(F, [r[n:] for r in rows], n)


class Subspace:
    """Subspace of field^ambient held as a canonical RREF basis."""

    __slots__ = ("field", "ambient", "rows", "pivots")

    def __init__(self, field, ambient, rows, pivots):
        self.field = field
        self.ambient = ambient
        self.rows = [list(r) for r in rows]
        self.pivots = tuple(pivots)

    @classmethod
    def from_vectors(cls, field, ambient, vectors):
        vectors = list(vectors)
        if not vectors:
            return cls(field, ambient, [], ())
        rows, pivots = Matrix(field, vectors, ambient).rref()
        return cls(field, ambient, rows, pivots)

    @property
    def dim(self):
        return len(self.rows)

    def reduce(self, v):
        """Canonical coset representative of v modulo this subspace."""
        F = self.field
        v = list(v)
        for row, pc in zip(self.rows, self.pivots):
            c = v[pc]
            if c != F.zero:
                for j in range(pc, self.ambient):
                    if row[j] != F.zero:
                        v[j] = F.sub(v[j], F.mul(c, row[j]))
        return v

    def contains(self, v):
        z = self.field.zero
        return all(a == z for a in self.reduce(v))

    def contains_subspace(self, other):
        return all(self.contains(r) for r in other.rows)

    def sum(self, other):
        if self.ambient != other.ambient:
            raise ValueError("ambient dimension mismatch")
        return Subspace.from_vectors(self.field, self.ambient, self.rows + other.rows)

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient == other.ambient
            and self.pivots == other.pivots
            and self.rows == other.rows
        )

    def __repr__(self):
        return f"Subspace(dim {self.dim} of {self.ambient} over {self.field.name})"


def kernel_basis(m):
    """Canonical basis of the right kernel {v : m v = 0}."""
    F = m.field
    rows, pivots = m.rref()
    pivset = set(pivots)
    free = [j for j in range(m.ncols) if j not in pivset]
    vecs = []
    for f in free:
        v = [F.zero] * m.ncols
        v[f] = F.one
        for r, pc in zip(rows, pivots):
            v[pc] = F.neg(r[f])
        vecs.append(v)
    return Subspace.from_vectors(F, m.ncols, vecs)


def solve(m, b):
    """One solution of m x = b, or None.

    Canonical choice: echelon-reduce and set all free variables to zero.
    """
    if len(b) != m.nrows:
        raise ValueError("right-hand side length mismatch")
    F = m.field
    aug = Matrix(F, [list(r) + [x] for r, x in zip(m.rows, b)], m.ncols + 1)
    rows, pivots = aug.rref()
    if m.ncols in pivots:
        return None
    x = [F.zero] * m.ncols
    for r, pc in zip(rows, pivots):
        x[pc] = r[m.ncols]
    return x


class Quotient:
    """Quotient of field^ambient by a subspace, with canonical coset coordinates.

    Coset coordinates are the non-pivot coordinates of the canonical
    representative, listed in ascending column order.
    """

    __slots__ = ("field", "ambient", "sub", "free")

    def __init__(self, ambient, sub):
        if sub.ambient != ambient:
            raise ValueError("subspace does not live in the given ambient space")
        self.field = sub.field
        self.ambient = ambient
        self.sub = sub
        pivset = set(sub.pivots)
        self.free = tuple(j for j in range(ambient) if j not in pivset)

    @property
    def dim(self):
        return len(self.free)

    def project(self, v):
        red = self.sub.reduce(v)
        return [red[j] for j in self.free]

    def section(self, coords):
        v = [self.field.zero] * self.ambient
        for j, c in zip(self.free, coords):
            v[j] = c
        return v

    def projection_matrix(self):
        return Matrix(
            self.field,
            [self.project([self.field.one if i == j else self.field.zero for i in range(self.ambient)])
             for j in range(self.ambient)],
            self.dim,
        ).transpose()


def quotient_dim(ambient, sub):
    """Dimension of the quotient plus the canonical projection."""
    q = Quotient(ambient, sub)
    return q.dim, q


# ---------------------------------------------------------------------------
# sparse vectors and echelon forms
#
# Sparse vectors are dicts keyed by any totally ordered hashable column label
# (plain ints, or tuples when a custom elimination order is wanted); values
# are nonzero field elements.


def sv_scale(field, v, c):
    if c == field.zero:
        return {}
    return {k: field.mul(c, x) for k, x in v.items()}


def sv_axpy(field, dst, c, src):
    """dst += c * src, in place; drops entries that cancel to zero."""
    z = field.zero
    for k, x in src.items():
        val = field.add(dst.get(k, z), field.mul(c, x))
        if val == z:
            dst.pop(k, None)
        else:
            dst[k] = val
    return dst


def sv_from_dense(field, v, offset=0):
    z = field.zero
    return {offset + i: x for i, x in enumerate(v) if x != z}


class SparseEchelon:
    """Incremental sparse echelon basis of a span.

    Pivots are the minimal column labels of the stored rows, so choosing
    column labels fixes the elimination order.  Rows are kept forward-reduced
    only; `reduce` still yields the unique representative supported away from
    the pivot set, which is all the quotient machinery needs.
    """

    def __init__(self, field):
        self.field = field
        self.rows = {}  # pivot column -> row dict with that pivot normalized to 1

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, v):
        """Reduce a sparse vector against the basis; returns a new dict."""
        F = self.field
        rows = self.rows
        v = dict(v)
        heap = [k for k in v if k in rows]
        heapq.heapify(heap)
        while heap:
            k = heapq.heappop(heap)
            c = v.get(k)
            if c is None:
                continue
            row = rows[k]
            sv_axpy(F, v, F.neg(c), row)
            for k2 in row:
                if k2 > k and k2 in rows and k2 in v:
                    heapq.heappush(heap, k2)
        return v

    def add(self, v):
        """Insert a vector; returns the reduced residual ({} if dependent)."""
        F = self.field
        v = self.reduce(v)
        if not v:
            return {}
        lead = min(v)
        inv = F.inv(v[lead])
        row = {k: F.mul(inv, x) for k, x in v.items()}
        self.rows[lead] = row
        return row

    def contains(self, v):
        return not self.reduce(v)

    def pivot_set(self):
        return set(self.rows)

    def rows_with_pivot(self, pred):
        return [self.rows[k] for k in sorted(self.rows) if pred(k)]
