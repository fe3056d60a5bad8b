"""Bimodules over a finite-dimensional algebra.

A bimodule is given by one left-action matrix and one right-action matrix
per algebra basis element.  Balanced tensor products are materialized with
an explicit projection/section pair so that later stages can move between
coordinates on M (x)_k N and on M (x)_A N exactly.  Left duals, dual bases
and the flat transform of a braiding-shaped map live here too.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import ValidationReport
from .errors import (
    AlgebraMismatch,
    DimensionMismatch,
    InvalidDualBases,
    NotProjective,
)
from .linalg import Matrix, SparseEchelon, Subspace, solve, sv_from_dense


class Bimodule:
    """A bimodule over an AlgebraSpec, via per-basis action matrices."""

    __slots__ = ("algebra", "dim", "left", "right")

    def __init__(self, algebra, dim, left, right):
        self.algebra = algebra
        self.dim = dim
        self.left = list(left)
        self.right = list(right)
        if len(self.left) != algebra.dim or len(self.right) != algebra.dim:
            raise DimensionMismatch("need one action matrix per algebra basis element")
        for m in self.left + self.right:
            if m.nrows != dim or m.ncols != dim:
                raise DimensionMismatch("action matrix of wrong shape")

    def act_left(self, a):
        """Matrix of x -> a.x for a coordinate vector a over the algebra."""
        F = self.algebra.field
        out = Matrix.zero(F, self.dim, self.dim)
        for t, c in enumerate(a):
            if c != F.zero:
                out = out.add(self.left[t].scale(c))
        return out

    def act_right(self, a):
        F = self.algebra.field
        out = Matrix.zero(F, self.dim, self.dim)
        for t, c in enumerate(a):
            if c != F.zero:
                out = out.add(self.right[t].scale(c))
        return out

    def basis_vec(self, i):
        v = [self.algebra.field.zero] * self.dim
        v[i] = self.algebra.field.one
        return v

    def __repr__(self):
        return f"Bimodule(dim {self.dim} over {self.algebra!r})"


def regular_bimodule(a):
    """The algebra as a bimodule over itself."""
    left = [a.left_mult_matrix(a.basis_vec(i)) for i in range(a.dim)]
    right = [a.right_mult_matrix(a.basis_vec(i)) for i in range(a.dim)]
    return Bimodule(a, a.dim, left, right)


def direct_sum(m, n):
    """Block-diagonal direct sum; coordinates of m come first."""
    if m.algebra is not n.algebra:
        raise AlgebraMismatch("direct sum over different base algebras")
    F = m.algebra.field
    dim = m.dim + n.dim

    def block(x, y):
        out = Matrix.zero(F, dim, dim)
        for i in range(m.dim):
            for j in range(m.dim):
                out.rows[i][j] = x.rows[i][j]
        for i in range(n.dim):
            for j in range(n.dim):
                out.rows[m.dim + i][m.dim + j] = y.rows[i][j]
        return out

    left = [block(a, b) for a, b in zip(m.left, n.left)]
    right = [block(a, b) for a, b in zip(m.right, n.right)]
    return Bimodule(m.algebra, dim, left, right)


def check_bimodule(m):
    """Verify the two action laws and that the actions commute."""
    alg = m.algebra
    F = alg.field
    report = ValidationReport("bimodule")
    ident = Matrix.identity(F, m.dim)
    report.record("left unital", m.act_left(list(alg.unit)) == ident)
    report.record("right unital", m.act_right(list(alg.unit)) == ident)
    bad = []
    for i in range(alg.dim):
        for j in range(alg.dim):
            prod = alg.gamma[i][j]
            if m.left[i].mul(m.left[j]) != m.act_left(list(prod)):
                bad.append(("left", i, j))
            if m.right[j].mul(m.right[i]) != m.act_right(list(prod)):
                bad.append(("right", i, j))
            if m.left[i].mul(m.right[j]) != m.right[j].mul(m.left[i]):
                bad.append(("commute", i, j))
    report.record("action laws", not bad, f"failures: {bad[:8]}" if bad else "")
    return report


@dataclass
class BimoduleMap:
    source: Bimodule
    target: Bimodule
    matrix: Matrix

    def __post_init__(self):
        if self.matrix.nrows != self.target.dim or self.matrix.ncols != self.source.dim:
            raise DimensionMismatch("map matrix shape does not match source/target")


def check_bimodule_map(matrix, src, tgt):
    """Pass iff the matrix intertwines every basis action."""
    if matrix.nrows != tgt.dim or matrix.ncols != src.dim:
        raise DimensionMismatch("map matrix shape does not match source/target")
    report = ValidationReport("bimodule map")
    bad = []
    for t in range(src.algebra.dim):
        if matrix.mul(src.left[t]) != tgt.left[t].mul(matrix):
            bad.append(("left", t))
        if matrix.mul(src.right[t]) != tgt.right[t].mul(matrix):
            bad.append(("right", t))
    report.record("intertwines actions", not bad, f"failures: {bad}" if bad else "")
    return report


class TensorSpace:
    """The balanced tensor product M (x)_A N, materialized.

    Ambient coordinates are the Kronecker basis of M (x)_k N with index
    u*dim(N)+v.  The middle span is the usual balancing subspace; `project`
    maps ambient vectors to canonical coset coordinates and `section` is the
    canonical right inverse.  The quotient carries the outer actions.
    """

    __slots__ = ("left", "right", "kdim", "middle_pivots", "middle", "free", "space")

    def __init__(self, left, right):
        if left.algebra is not right.algebra:
            raise AlgebraMismatch("tensor product over different base algebras")
        alg = left.algebra
        F = alg.field
        self.left = left
        self.right = right
        nd = right.dim
        self.kdim = left.dim * nd

        ech = SparseEchelon(F)
        for t in range(alg.dim):
            rm = left.right[t]
            lm = right.left[t]
            for u in range(left.dim):
                col_r = [rm.rows[i][u] for i in range(left.dim)]
                for v in range(nd):
                    vec = {}
                    for i, c in enumerate(col_r):
                        if c != F.zero:
                            vec[i * nd + v] = c
                    for j in range(nd):
                        c = lm.rows[j][v]
                        if c != F.zero:
                            k = u * nd + j
                            val = F.sub(vec.get(k, F.zero), c)
                            if val == F.zero:
                                vec.pop(k, None)
                            else:
                                vec[k] = val
                    if vec:
                        ech.add(vec)
        self.middle = ech
        self.middle_pivots = ech.pivot_set()
        self.free = tuple(j for j in range(self.kdim) if j not in self.middle_pivots)

        # outer actions descend to the quotient
        dim = len(self.free)
        lefts, rights = [], []
        for t in range(alg.dim):
            lmat = Matrix.zero(F, dim, dim)
            rmat = Matrix.zero(F, dim, dim)
            for col, j in enumerate(self.free):
                u, v = divmod(j, nd)
                lact = {}
                for i in range(left.dim):
                    c = left.left[t].rows[i][u]
                    if c != F.zero:
                        lact[i * nd + v] = c
                for row, val in zip_project(self, lact):
                    lmat.rows[row][col] = val
                ract = {}
                for i in range(nd):
                    c = right.right[t].rows[i][v]
                    if c != F.zero:
                        ract[u * nd + i] = c
                for row, val in zip_project(self, ract):
                    rmat.rows[row][col] = val
            lefts.append(lmat)
            rights.append(rmat)
        self.space = Bimodule(alg, dim, lefts, rights)

    @property
    def dim(self):
        return len(self.free)

    def project_sparse(self, vec):
        """Ambient sparse dict -> quotient coordinate sparse dict."""
        red = self.middle.reduce(vec)
        out = {}
        for pos, j in enumerate(self.free):
            if j in red:
                out[pos] = red[j]
        return out

    def project(self, v):
        F = self.left.algebra.field
        red = self.middle.reduce(sv_from_dense(F, v))
        return [red.get(j, F.zero) for j in self.free]

    def section(self, coords):
        F = self.left.algebra.field
        v = [F.zero] * self.kdim
        for j, c in zip(self.free, coords):
            v[j] = c
        return v

    def section_sparse(self, coords):
        z = self.left.algebra.field.zero
        return {self.free[pos]: c for pos, c in coords.items() if c != z}

    def project_pure(self, u, v_idx):
        """Quotient coordinates of the class of basis tensor e_u (x) e_v."""
        return self.project_sparse({u * self.right.dim + v_idx: self.left.algebra.field.one})

    def projection_matrix(self):
        F = self.left.algebra.field
        cols = []
        for j in range(self.kdim):
            red = self.middle.reduce({j: F.one})
            cols.append([red.get(f, F.zero) for f in self.free])
        return Matrix(F, [[cols[j][i] for j in range(self.kdim)] for i in range(self.dim)], self.kdim)

    def section_matrix(self):
        F = self.left.algebra.field
        out = Matrix.zero(F, self.kdim, self.dim)
        for pos, j in enumerate(self.free):
            out.rows[j][pos] = F.one
        return out

    def middle_subspace(self):
        F = self.left.algebra.field
        rows = []
        for k in sorted(self.middle.rows):
            r = self.middle.rows[k]
            rows.append([r.get(j, F.zero) for j in range(self.kdim)])
        return Subspace.from_vectors(F, self.kdim, rows)


def zip_project(tspace, vec):
    red = tspace.middle.reduce(vec)
    for pos, j in enumerate(tspace.free):
        if j in red:
            yield pos, red[j]


def tensor_over_A(m, n):
    return TensorSpace(m, n)


class DualPair:
    """A module together with its left dual and the evaluation pairing.

    pairing[j][i] is the algebra element <f_j, e_i> for the chosen bases.
    """

    __slots__ = ("module", "dual", "pairing")

    def __init__(self, module, dual, pairing):
        self.module = module
        self.dual = dual
        self.pairing = pairing

    def ev(self, xi, m):
        """<xi, m> in A for coordinate vectors xi (dual) and m (module)."""
        alg = self.module.algebra
        F = alg.field
        out = [F.zero] * alg.dim
        for j, xj in enumerate(xi):
            if xj == F.zero:
                continue
            for i, mi in enumerate(m):
                if mi == F.zero:
                    continue
                c = F.mul(xj, mi)
                for k, p in enumerate(self.pairing[j][i]):
                    if p != F.zero:
                        out[k] = F.add(out[k], F.mul(c, p))
        return out


def left_dual(m):
    """The left dual: left-A-linear maps M -> A with the standard actions.

    The dual is cut out of Hom_k(M, A) by the left-linearity constraints;
    its basis is the canonical kernel basis of that system.
    """
    alg = m.algebra
    F = alg.field
    na, nm = alg.dim, m.dim
    nunk = na * nm  # F[r][c] flattened as r*nm + c
    rows = []
    for t in range(na):
        lmat = alg.left_mult_matrix(alg.basis_vec(t))
        lt = m.left[t]
        for r in range(na):
            for c in range(nm):
                row = [F.zero] * nunk
                for s in range(nm):
                    if lt.rows[s][c] != F.zero:
                        row[r * nm + s] = F.add(row[r * nm + s], lt.rows[s][c])
                for p in range(na):
                    if lmat.rows[r][p] != F.zero:
                        row[p * nm + c] = F.sub(row[p * nm + c], lmat.rows[r][p])
                if any(x != F.zero for x in row):
                    rows.append(row)
    if rows:
        ker = Matrix(F, rows, nunk).kernel()
    else:
        ker = Subspace.from_vectors(F, nunk, Matrix.identity(F, nunk).rows)
    basis = ker.rows
    dim = len(basis)

    def as_matrix(flat):
        return Matrix(F, [[flat[r * nm + c] for c in range(nm)] for r in range(na)], nm)

    def coords_of(flat):
        # basis is in RREF, so in-span coordinates are read off the pivots
        res = list(flat)
        coords = []
        for row, pc in zip(ker.rows, ker.pivots):
            c = res[pc]
            coords.append(c)
            if c != F.zero:
                for j in range(nunk):
                    if row[j] != F.zero:
                        res[j] = F.sub(res[j], F.mul(c, row[j]))
        if any(x != F.zero for x in res):
            raise InvalidDualBases("functional escaped the dual space")
        return coords

    mats = [as_matrix(b) for b in basis]
    lefts, rights = [], []
    for t in range(na):
        # (a.f)(x) = f(x a);  (f.a)(x) = f(x) a
        rt = m.right[t]
        rmulA = alg.right_mult_matrix(alg.basis_vec(t))
        lcols, rcols = [], []
        for fm in mats:
            lcols.append(coords_of([x for row in fm.mul(rt).rows for x in row]))
            rcols.append(coords_of([x for row in rmulA.mul(fm).rows for x in row]))
        lefts.append(Matrix(F, [[lcols[j][i] for j in range(dim)] for i in range(dim)], dim))
        rights.append(Matrix(F, [[rcols[j][i] for j in range(dim)] for i in range(dim)], dim))
    dual = Bimodule(alg, dim, lefts, rights)
    pairing = tuple(
        tuple(tuple(mats[j].rows[r][i] for r in range(na)) for i in range(nm))
        for j in range(dim)
    )
    return DualPair(m, dual, pairing)


class DualBases:
    """A finite family m_i in M, m^i in the dual witnessing projectivity.

    The defining identities are <m^i, m> m_i = m and m^i <xi, m_i> = xi.
    When a compatible third family in the double dual is attached (`hat`),
    the same identities tie the dual bases of M and of its dual together.
    """

    __slots__ = ("pair", "elements", "functionals", "hat_pair", "hat")

    def __init__(self, pair, elements, functionals, hat_pair=None, hat=None):
        if len(elements) != len(functionals):
            raise InvalidDualBases("element and functional families differ in length")
        self.pair = pair
        self.elements = [list(v) for v in elements]
        self.functionals = [list(v) for v in functionals]
        self.hat_pair = hat_pair
        self.hat = [list(v) for v in hat] if hat is not None else None

    @property
    def size(self):
        return len(self.elements)

    def certify(self):
        """Check the dual-basis identities exactly; hat identities if present."""
        M = self.pair.module
        D = self.pair.dual
        F = M.algebra.field
        report = ValidationReport("dual bases")
        ok1 = True
        for u in range(M.dim):
            e = M.basis_vec(u)
            acc = [F.zero] * M.dim
            for mi, fi in zip(self.elements, self.functionals):
                a = self.pair.ev(fi, e)
                img = M.act_left(a).matvec(mi)
                acc = [F.add(x, y) for x, y in zip(acc, img)]
            if acc != e:
                ok1 = False
        report.record("reconstruction", ok1)
        ok2 = True
        for v in range(D.dim):
            xi = D.basis_vec(v)
            acc = [F.zero] * D.dim
            for mi, fi in zip(self.elements, self.functionals):
                a = self.pair.ev(xi, mi)
                img = D.act_right(a).matvec(fi)
                acc = [F.add(x, y) for x, y in zip(acc, img)]
            if acc != xi:
                ok2 = False
        report.record("dual reconstruction", ok2)
        if self.hat is not None:
            hp = self.hat_pair
            ok3 = True
            for v in range(D.dim):
                xi = D.basis_vec(v)
                acc = [F.zero] * D.dim
                for fi, hi in zip(self.functionals, self.hat):
                    a = hp.ev(hi, xi)
                    img = D.act_left(a).matvec(fi)
                    acc = [F.add(x, y) for x, y in zip(acc, img)]
                if acc != xi:
                    ok3 = False
            report.record("hat reconstruction", ok3)
        return report

    def coev_class(self, tspace):
        """Class of sum m^i (x) m_i inside a materialized dual (x)_A module space."""
        F = self.pair.module.algebra.field
        nd = tspace.right.dim
        vec = {}
        for mi, fi in zip(self.elements, self.functionals):
            for j, xj in enumerate(fi):
                if xj == F.zero:
                    continue
                for i, ci in enumerate(mi):
                    if ci == F.zero:
                        continue
                    k = j * nd + i
                    val = F.add(vec.get(k, F.zero), F.mul(xj, ci))
                    if val == F.zero:
                        vec.pop(k, None)
                    else:
                        vec[k] = val
        return tspace.project_sparse(vec)


def find_dual_bases(m, pair=None):
    """Solve for dual bases of M, or raise NotProjective.

    The unknown is the class of sum m^i (x) m_i in dual (x)_A M; it must
    reconstruct every element of M and commute with both A-actions.  The
    canonical echelon solution is sectioned back to dual (x)_k M and split
    into one pair per k-basis vector of M.
    """
    if pair is None:
        pair = left_dual(m)
    alg = m.algebra
    F = alg.field
    D = pair.dual
    tsp = tensor_over_A(D, m)
    q = tsp.dim
    rows = []
    rhs = []
    # reconstruction: contracting the unknown against e_u returns e_u
    sections = [tsp.section([F.one if i == col else F.zero for i in range(q)]) for col in range(q)]
    for u in range(m.dim):
        e = m.basis_vec(u)
        contract = []  # per column: image vector in M of contracting against e_u
        for amb in sections:
            img_total = [F.zero] * m.dim
            for k, c in enumerate(amb):
                if c == F.zero:
                    continue
                j, i = divmod(k, m.dim)
                a = pair.ev(D.basis_vec(j), e)
                img = m.act_left(a).matvec(m.basis_vec(i))
                img_total = [F.add(xx, F.mul(c, yy)) for xx, yy in zip(img_total, img)]
            contract.append(img_total)
        for out_row in range(m.dim):
            rows.append([contract[col][out_row] for col in range(q)])
            rhs.append(F.one if out_row == u else F.zero)
    # centrality: the class is fixed by a |-> (a . gamma - gamma . a)
    sp = tsp.space
    for t in range(alg.dim):
        diff = sp.left[t].sub(sp.right[t])
        for r in range(q):
            rows.append(list(diff.rows[r]))
            rhs.append(F.zero)
    sol = solve(Matrix(F, rows, q), rhs)
    if sol is None:
        raise NotProjective("no finite dual basis family exists")
    amb = tsp.section(sol)
    elements, functionals = [], []
    for u in range(m.dim):
        f = [amb[j * m.dim + u] for j in range(D.dim)]
        if any(x != F.zero for x in f):
            elements.append(m.basis_vec(u))
            functionals.append(f)
    db = DualBases(pair, elements, functionals)
    rep = db.certify()
    if not rep.passed:
        raise InvalidDualBases(f"solved family failed certification: {rep.failures()}")
    return db


def flat_transform(f, v, x, db):
    """The flat of f: V (x) X -> X (x) V, as a map X (x) V* -> V* (x) X.

    Built as (id (x) id (x) eval) o (id (x) f (x) id) o (coev (x) id (x) id)
    on materialized balanced tensor products, using the dual bases of V.
    """
    rep = db.certify()
    if not rep.passed:
        raise InvalidDualBases("flat transform needs certified dual bases")
    if db.pair.module is not v:
        raise InvalidDualBases("dual bases are not for the braided factor")
    alg = v.algebra
    F = alg.field
    dual = db.pair.dual
    vx = tensor_over_A(v, x)
    xv = tensor_over_A(x, v)
    if f.matrix.ncols != vx.dim or f.matrix.nrows != xv.dim:
        raise DimensionMismatch("flat transform input must map V(x)X to X(x)V")
    src = tensor_over_A(x, dual)
    tgt = tensor_over_A(dual, x)
    cols = []
    for col in range(src.dim):
        amb = src.section([F.one if i == col else F.zero for i in range(src.dim)])
        acc = {}
        for k, c0 in enumerate(amb):
            if c0 == F.zero:
                continue
            u, xi_idx = divmod(k, dual.dim)
            xi = dual.basis_vec(xi_idx)
            for vi, fi in zip(db.elements, db.functionals):
                mid = {}
                for i, ci in enumerate(vi):
                    if ci != F.zero:
                        mid[i * x.dim + u] = F.mul(c0, ci)
                proj = vx.project_sparse(mid)
                out = f.matrix.matvec([proj.get(i, F.zero) for i in range(vx.dim)])
                outamb = xv.section(out)
                for k2, c2 in enumerate(outamb):
                    if c2 == F.zero:
                        continue
                    w, z = divmod(k2, v.dim)
                    a = db.pair.ev(xi, v.basis_vec(z))
                    xw = x.act_right(a).matvec(x.basis_vec(w))
                    for j, fij in enumerate(fi):
                        if fij == F.zero:
                            continue
                        for ww, cw in enumerate(xw):
                            if cw == F.zero:
                                continue
                            key = j * x.dim + ww
                            val = F.add(acc.get(key, F.zero), F.mul(F.mul(c2, fij), cw))
                            if val == F.zero:
                                acc.pop(key, None)
                            else:
                                acc[key] = val
        cols.append([tgt.project_sparse(acc).get(i, F.zero) for i in range(tgt.dim)])
    mat = Matrix(F, [[cols[j][i] for j in range(src.dim)] for i in range(tgt.dim)], src.dim)
    return BimoduleMap(src.space, tgt.space, mat)
