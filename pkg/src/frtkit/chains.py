"""Materialized tensor words of bimodules.

A word of modules is materialized as a left-nested balanced tensor product.
Each chain knows how to move between its quotient coordinates and the
coordinates of the full k-linear tensor product (mixed-radix integer
indices), which is where multilinear formulas are evaluated.

Letters bundle a module with its dual data; words of letters support the
nested evaluation pairing against the reversed dual word and braidings
assembled from two-letter blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bimodule import Bimodule, DualBases, DualPair, TensorSpace, regular_bimodule
from .linalg import Matrix


@dataclass
class Letter:
    """An object letter: a module plus its left dual and dual bases."""

    name: str
    module: Bimodule
    pair: DualPair
    bases: DualBases

    @property
    def dual_module(self):
        return self.pair.dual

    def __repr__(self):
        return f"Letter({self.name})"


class Chain:
    """A materialized word of modules with k-chain coordinate access."""

    __slots__ = ("ctx", "mods", "space", "kdims", "kdim", "_sub", "_tsp")

    def __init__(self, ctx, mods, space, kdims, sub=None, tsp=None):
        self.ctx = ctx
        self.mods = mods
        self.space = space
        self.kdims = kdims
        self.kdim = 1
        for d in kdims:
            self.kdim *= d
        self._sub = sub
        self._tsp = tsp

    @property
    def dim(self):
        return self.space.dim

    def section_k(self, coords):
        """Chain coordinates (sparse dict) -> k-chain coordinates (sparse dict)."""
        if self._tsp is None:
            return dict(coords)
        F = self.ctx.field
        last = self.mods[-1].dim
        out = {}
        for pos, c in coords.items():
            amb = self._tsp.free[pos]
            u, v = divmod(amb, last)
            for subk, c2 in self._sub.section_k({u: F.one}).items():
                key = subk * last + v
                val = F.add(out.get(key, F.zero), F.mul(c, c2))
                if val == F.zero:
                    out.pop(key, None)
                else:
                    out[key] = val
        return out

    def project_k(self, kvec):
        """k-chain coordinates (sparse dict) -> chain coordinates (sparse dict)."""
        if self._tsp is None:
            return dict(kvec)
        F = self.ctx.field
        last = self.mods[-1].dim
        grouped = {}
        for key, c in kvec.items():
            subk, v = divmod(key, last)
            grouped.setdefault(v, {})[subk] = c
        amb = {}
        for v, sub in grouped.items():
            for u, c in self._sub.project_k(sub).items():
                key = u * last + v
                val = F.add(amb.get(key, F.zero), c)
                if val == F.zero:
                    amb.pop(key, None)
                else:
                    amb[key] = val
        return self._tsp.project_sparse(amb)

    def digits(self, kindex):
        out = []
        for d in reversed(self.kdims):
            kindex, r = divmod(kindex, d)
            out.append(r)
        return tuple(reversed(out))

    def kindex(self, digits):
        idx = 0
        for d, dig in zip(self.kdims, digits):
            idx = idx * d + dig
        return idx

    def basis_class(self, digits):
        """Chain coordinates of the class of a pure k-basis tensor."""
        return self.project_k({self.kindex(digits): self.ctx.field.one})


class ChainContext:
    """Caches balanced tensor products and chains over one base algebra."""

    def __init__(self, algebra):
        self.algebra = algebra
        self.field = algebra.field
        self._tensors = {}
        self._chains = {}
        self._unit_chain = None

    def tensor(self, m, n):
        key = (id(m), id(n))
        got = self._tensors.get(key)
        if got is None:
            got = TensorSpace(m, n)
            self._tensors[key] = got
        return got

    def chain(self, mods):
        mods = tuple(mods)
        key = tuple(id(m) for m in mods)
        got = self._chains.get(key)
        if got is not None:
            return got
        if not mods:
            reg = regular_bimodule(self.algebra)
            got = Chain(self, mods, reg, ())
            got.kdim = self.algebra.dim  # degree-0 coordinates are algebra coordinates
        elif len(mods) == 1:
            got = Chain(self, mods, mods[0], (mods[0].dim,))
        else:
            sub = self.chain(mods[:-1])
            tsp = self.tensor(sub.space, mods[-1])
            got = Chain(self, mods, tsp.space, sub.kdims + (mods[-1].dim,), sub, tsp)
        self._chains[key] = got
        return got

    def concat(self, u, v, xu, xv):
        """Class of (element of chain u) (x) (element of chain v) in chain(u+v).

        Degree-zero factors act through the algebra since chain(()) is the
        regular bimodule.
        """
        F = self.field
        cu, cv = self.chain(u), self.chain(v)
        if not u and not v:
            return dict_mul_alg(self.algebra, xu, xv)
        if not u:
            out = {}
            for t, c in xu.items():
                act = cv.space.left[t]
                for pos, c2 in xv.items():
                    for r in range(act.nrows):
                        val = act.rows[r][pos]
                        if val != F.zero:
                            add_to(F, out, r, F.mul(F.mul(c, c2), val))
            return out
        if not v:
            out = {}
            for t, c in xv.items():
                act = cu.space.right[t]
                for pos, c2 in xu.items():
                    for r in range(act.nrows):
                        val = act.rows[r][pos]
                        if val != F.zero:
                            add_to(F, out, r, F.mul(F.mul(c, c2), val))
            return out
        target = self.chain(u + v)
        ku = cu.section_k(xu)
        kv = cv.section_k(xv)
        kout = {}
        for ia, ca in ku.items():
            for ib, cb in kv.items():
                add_to(F, kout, ia * cv.kdim + ib, F.mul(ca, cb))
        return target.project_k(kout)


def add_to(F, vec, key, val):
    if val == F.zero:
        return
    new = F.add(vec.get(key, F.zero), val)
    if new == F.zero:
        vec.pop(key, None)
    else:
        vec[key] = new


def dict_mul_alg(alg, x, y):
    F = alg.field
    out = {}
    for i, ci in x.items():
        for j, cj in y.items():
            prod = alg.gamma[i][j]
            c = F.mul(ci, cj)
            for k, g in enumerate(prod):
                if g != F.zero:
                    add_to(F, out, k, F.mul(c, g))
    return out


def letter_word_mods(letters):
    return tuple(l.module for l in letters)


def dual_word_mods(letters):
    return tuple(l.dual_module for l in reversed(letters))


def chain_pair(ctx, letters, xi, m):
    """Nested evaluation of a reversed dual-word element against a word element.

    xi lives in chain(dual_word_mods(letters)), m in chain(letter modules);
    the innermost letter is paired first and the result threads outward
    through the right actions.  Returns coordinates in A.
    """
    F = ctx.field
    alg = ctx.algebra
    if not letters:
        # degree zero: both sides are algebra coordinates; <b^op, a> = a b
        out = [F.zero] * alg.dim
        for j, cj in xi.items():
            for i, ci in m.items():
                c = F.mul(ci, cj)
                for k, g in enumerate(alg.gamma[i][j]):
                    if g != F.zero:
                        out[k] = F.add(out[k], F.mul(c, g))
        return out
    d = len(letters)
    mchain = ctx.chain(letter_word_mods(letters))
    dchain = ctx.chain(dual_word_mods(letters))
    km = mchain.section_k(m)
    kxi = dchain.section_k(xi)
    out = [F.zero] * alg.dim
    for ik, cm in km.items():
        mdig = mchain.digits(ik)
        for jk, cx in kxi.items():
            xdig = dchain.digits(jk)  # position p holds the dual of letter d-1-p
            lt = letters[d - 1]
            a = lt.pair.ev(lt.dual_module.basis_vec(xdig[0]), lt.module.basis_vec(mdig[d - 1]))
            for t in range(d - 2, -1, -1):
                lt = letters[t]
                mv = lt.module.act_right(a).matvec(lt.module.basis_vec(mdig[t]))
                a = lt.pair.ev(lt.dual_module.basis_vec(xdig[d - 1 - t]), mv)
            c = F.mul(cm, cx)
            for k, ak in enumerate(a):
                if ak != F.zero:
                    out[k] = F.add(out[k], F.mul(c, ak))
    return out


def chain_dual_bases(ctx, letters):
    """Dual bases of a word, as products of the letters' dual bases.

    Returns (elements, functionals): per multi-index, the class of
    m_{i_1} (x) ... (x) m_{i_d} in the word chain and the class of the
    reversed functionals in the dual-word chain.
    """
    F = ctx.field
    if not letters:
        one = {i: c for i, c in enumerate(ctx.algebra.unit) if c != F.zero}
        return [dict(one)], [dict(one)]
    # build multi-indexed products iteratively
    idxs = [[]]
    for lt in letters:
        idxs = [pre + [i] for pre in idxs for i in range(lt.bases.size)]
    mchain = ctx.chain(letter_word_mods(letters))
    dchain = ctx.chain(dual_word_mods(letters))
    elems, funcs = [], []
    for multi in idxs:
        kvec = {}
        build = [(0, F.one)]
        for t, lt in enumerate(letters):
            vec = lt.bases.elements[multi[t]]
            nxt = []
            for base, coeff in build:
                for i, c in enumerate(vec):
                    if c != F.zero:
                        nxt.append((base * lt.module.dim + i, F.mul(coeff, c)))
            build = nxt
        for k, c in build:
            add_to(F, kvec, k, c)
        elems.append(mchain.project_k(kvec))
        kvec = {}
        build = [(0, F.one)]
        for lt, pos in zip(reversed(letters), range(len(letters))):
            vec = lt.bases.functionals[multi[len(letters) - 1 - pos]]
            nxt = []
            for base, coeff in build:
                for i, c in enumerate(vec):
                    if c != F.zero:
                        nxt.append((base * lt.dual_module.dim + i, F.mul(coeff, c)))
            build = nxt
        for k, c in build:
            add_to(F, kvec, k, c)
        funcs.append(dchain.project_k(kvec))
    return elems, funcs


class BraidBlocks:
    """Two-letter braiding blocks sigma[(a, b)] on materialized pairs."""

    def __init__(self, ctx, blocks):
        self.ctx = ctx
        self.blocks = dict(blocks)  # (name_a, name_b) -> Matrix on tensor(A,B) -> tensor(B,A)
        self._kblocks = {}

    def kblock(self, la, lb):
        """Block lifted to k-tensor coordinates of the two letters."""
        key = (la.name, lb.name)
        got = self._kblocks.get(key)
        if got is not None:
            return got
        ctx = self.ctx
        F = ctx.field
        mat = self.blocks[key]
        src = ctx.tensor(la.module, lb.module)
        tgt = ctx.tensor(lb.module, la.module)
        cols = {}
        for u in range(la.module.dim):
            for v in range(lb.module.dim):
                coords = src.project_pure(u, v)
                dense = [coords.get(i, F.zero) for i in range(src.dim)]
                out = mat.matvec(dense)
                amb = tgt.section(out)
                col = {k: c for k, c in enumerate(amb) if c != F.zero}
                cols[u * lb.module.dim + v] = col
        self._kblocks[key] = cols
        return cols


def elementary_swap(ctx, blocks, word, pos, vec):
    """Apply the two-letter braiding at position pos of a letter word.

    vec is in chain coordinates of the word; the result is in chain
    coordinates of the word with letters pos, pos+1 exchanged, paired with
    the new word.
    """
    F = ctx.field
    la, lb = word[pos], word[pos + 1]
    newword = word[:pos] + (lb, la) + word[pos + 2 :]
    src = ctx.chain(letter_word_mods(word))
    tgt = ctx.chain(letter_word_mods(newword))
    kcols = blocks.kblock(la, lb)
    da, db = la.module.dim, lb.module.dim
    kout = {}
    for kidx, c in src.section_k(vec).items():
        digits = list(src.digits(kidx))
        local = digits[pos] * db + digits[pos + 1]
        for lk, lc in kcols[local].items():
            j, i = divmod(lk, da)  # target order is (b, a)
            nd = list(digits)
            nd[pos] = j
            nd[pos + 1] = i
            add_to(F, kout, tgt.kindex(nd), F.mul(c, lc))
    return newword, tgt.project_k(kout)


def word_braiding_apply(ctx, blocks, u, v, vec):
    """Braid the block of letters u past the block v.

    vec is in chain coordinates of u+v; returns coordinates in chain of
    v+u.  One strand of the left block crosses at a time, rightmost strand
    first, and each strand crosses the right block front to back; this is
    the iterated hexagon expansion of the block braiding.
    """
    word = tuple(u) + tuple(v)
    q = len(v)
    cur = dict(vec)
    for i in range(len(u) - 1, -1, -1):
        for j in range(q):
            word, cur = elementary_swap(ctx, blocks, word, i + j, cur)
    return cur


def word_braiding_matrix(ctx, blocks, u, v):
    """Dense matrix of the block braiding chain(u+v) -> chain(v+u)."""
    F = ctx.field
    src = ctx.chain(letter_word_mods(tuple(u) + tuple(v)))
    tgt = ctx.chain(letter_word_mods(tuple(v) + tuple(u)))
    out = Matrix.zero(F, tgt.dim, src.dim)
    for col in range(src.dim):
        res = word_braiding_apply(ctx, blocks, u, v, {col: F.one})
        for r, c in res.items():
            out.rows[r][col] = c
    return out
