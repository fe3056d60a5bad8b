"""Braided objects in bimodules: Yang-Baxter checks, dualizability, doubles.

A braided object is a module with certified dual bases together with an
invertible solution of the braid equation on its balanced tensor square.
Dualizability produces the five derived maps (the two flats, their
inverses, and the double flat) that drive the Hopf-level construction and
the braiding on the sum of the module and its dual.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bimodule import (
    BimoduleMap,
    DualBases,
    check_bimodule_map,
    direct_sum,
    find_dual_bases,
    flat_transform,
    left_dual,
)
from .chains import BraidBlocks, ChainContext, Letter, elementary_swap, word_braiding_matrix
from .errors import NotBimoduleMap, NotInvertible, NotYangBaxter
from .linalg import Matrix


@dataclass
class BraidedObject:
    letter: Letter
    ctx: ChainContext
    c: Matrix
    c_inv: Matrix

    @property
    def module(self):
        return self.letter.module

    @property
    def bases(self):
        return self.letter.bases

    def blocks(self):
        return BraidBlocks(self.ctx, {(self.letter.name, self.letter.name): self.c})

    def tensor_square(self):
        return self.ctx.tensor(self.module, self.module)


def make_letter(name, module, ctx, pair=None, bases=None):
    if pair is None:
        pair = left_dual(module)
    if bases is None:
        bases = find_dual_bases(module, pair)
    return Letter(name, module, pair, bases)


def descend_to_balanced(tsp, kmatrix):
    """Descend a k-level square matrix to the balanced tensor square.

    The matrix must map the balancing subspace into itself; otherwise it
    does not define a map on the quotient and None is returned.
    """
    F = tsp.left.algebra.field
    for piv in sorted(tsp.middle.rows):
        row = tsp.middle.rows[piv]
        img = {}
        for k, c in row.items():
            for r in range(kmatrix.nrows):
                v = kmatrix.rows[r][k]
                if v != F.zero:
                    img[r] = F.add(img.get(r, F.zero), F.mul(c, v))
        img = {k: v for k, v in img.items() if v != F.zero}
        if tsp.middle.reduce(img):
            return None
    cols = []
    for col in range(tsp.dim):
        amb = tsp.section([F.one if i == col else F.zero for i in range(tsp.dim)])
        out = kmatrix.matvec(amb)
        cols.append(tsp.project(out))
    return Matrix(F, [[cols[j][i] for j in range(tsp.dim)] for i in range(tsp.dim)], tsp.dim)


def check_yang_baxter(module, bases, c, coords="tensor_over_A", ctx=None, name="x"):
    """Certify a braided object, or raise with the reason.

    c may be given on the balanced square directly or on the k-linear
    square, in which case it must descend through the projection.
    """
    if ctx is None:
        ctx = ChainContext(module.algebra)
    letter = Letter(name, module, bases.pair, bases)
    tsp = ctx.tensor(module, module)
    if coords == "tensor_over_k":
        if c.nrows != tsp.kdim or c.ncols != tsp.kdim:
            raise NotBimoduleMap("k-level braiding matrix has wrong shape")
        descended = descend_to_balanced(tsp, c)
        if descended is None:
            raise NotBimoduleMap("braiding does not descend to the balanced tensor square")
        c = descended
    rep = check_bimodule_map(c, tsp.space, tsp.space)
    if not rep.passed:
        raise NotBimoduleMap(f"braiding is not a bimodule map: {rep.failures()}")
    obj = BraidedObject(letter, ctx, c, None)
    blocks = obj.blocks()
    word = (letter, letter, letter)
    cube = ctx.chain((module, module, module))
    F = module.algebra.field
    residual = []
    for col in range(cube.dim):
        vec = {col: F.one}
        lhs = vec
        for pos in (0, 1, 0):
            _, lhs = elementary_swap(ctx, blocks, word, pos, lhs)
        rhs = vec
        for pos in (1, 0, 1):
            _, rhs = elementary_swap(ctx, blocks, word, pos, rhs)
        diff = dict(lhs)
        for k, v in rhs.items():
            new = F.sub(diff.get(k, F.zero), v)
            if new == F.zero:
                diff.pop(k, None)
            else:
                diff[k] = new
        if diff:
            residual.append((col, sorted(diff.items())))
    if residual:
        raise NotYangBaxter(f"braid equation fails; residual columns: {residual[:4]}")
    try:
        obj.c_inv = c.inverse()
    except NotInvertible as exc:
        raise NotInvertible(f"braiding is not invertible: {exc}") from exc
    return obj


@dataclass
class DualizabilityCertificate:
    c_flat: Matrix          # M (x) M* -> M* (x) M
    c_flat_inv: Matrix
    cinv_flat: Matrix       # M (x) M* -> M* (x) M
    cinv_flat_inv: Matrix
    c_flatflat: Matrix      # M* (x) M* -> M* (x) M*


def check_dualizable(b):
    """Compute the two flats and invert them; also the double flat."""
    from .errors import NotDualizable

    m = b.module
    dual = b.letter.pair.dual
    tsq = b.tensor_square()
    c_map = BimoduleMap(tsq.space, tsq.space, b.c)
    cinv_map = BimoduleMap(tsq.space, tsq.space, b.c_inv)
    c_flat = flat_transform(c_map, m, m, b.bases).matrix
    cinv_flat = flat_transform(cinv_map, m, m, b.bases).matrix
    try:
        c_flat_inv = c_flat.inverse()
    except NotInvertible as exc:
        raise NotDualizable(f"flat of the braiding is singular: {exc}") from exc
    try:
        cinv_flat_inv = cinv_flat.inverse()
    except NotInvertible as exc:
        raise NotDualizable(f"flat of the inverse braiding is singular: {exc}") from exc
    src = b.ctx.tensor(m, dual)
    tgt = b.ctx.tensor(dual, m)
    flat_map = BimoduleMap(src.space, tgt.space, c_flat)
    c_flatflat = flat_transform(flat_map, m, dual, b.bases).matrix
    return DualizabilityCertificate(c_flat, c_flat_inv, cinv_flat, cinv_flat_inv, c_flatflat)


def double_extension(b, cert):
    """The braiding on module + dual built from the certificate blocks.

    The four blocks are the braiding itself, the inverse of its flat, the
    flat of its inverse, and the double flat; the assembled map is
    re-certified through the Yang-Baxter check.
    """
    ctx = b.ctx
    F = ctx.field
    m = b.module
    dual = b.letter.pair.dual
    big = direct_sum(m, dual)
    tsp = ctx.tensor(big, big)

    # block data: (source block pair) -> (target block pair, k-level columns)
    def klevel(mat, asrc, bsrc):
        src = ctx.tensor(asrc, bsrc)
        cols = {}
        for u in range(asrc.dim):
            for v in range(bsrc.dim):
                coords = src.project_pure(u, v)
                dense = [coords.get(i, F.zero) for i in range(src.dim)]
                out = mat.matvec(dense)
                tgt = ctx.tensor(bsrc, asrc)
                amb = tgt.section(out)
                cols[(u, v)] = {k: c for k, c in enumerate(amb) if c != F.zero}
        return cols

    blocks = {
        (0, 0): (b.c, m, m),
        (0, 1): (cert.cinv_flat, m, dual),
        (1, 0): (cert.c_flat_inv, dual, m),
        (1, 1): (cert.c_flatflat, dual, dual),
    }
    offs = (0, m.dim)
    dims = (m.dim, dual.dim)
    kmat = Matrix.zero(F, tsp.kdim, tsp.kdim)
    for (bi, bj), (mat, asrc, bsrc) in blocks.items():
        cols = klevel(mat, asrc, bsrc)
        for (u, v), col in cols.items():
            src_k = (offs[bi] + u) * big.dim + (offs[bj] + v)
            for k, c in col.items():
                w, z = divmod(k, asrc.dim)
                # target block order is (b, a)
                row_k = (offs[bj] + w) * big.dim + (offs[bi] + z)
                kmat.rows[row_k][src_k] = c
    big_bases = find_dual_bases(big)
    return check_yang_baxter(big, big_bases, kmat, coords="tensor_over_k", ctx=ctx, name="double")


def braid_power_braiding(b, m, n):
    """Braiding of the m-th tensor power past the n-th, as one matrix."""
    letters_u = (b.letter,) * m
    letters_v = (b.letter,) * n
    return word_braiding_matrix(b.ctx, b.blocks(), letters_u, letters_v)
