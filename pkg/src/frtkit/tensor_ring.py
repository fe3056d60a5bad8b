"""The tensor ring over the enveloping algebra on a generator bimodule.

Degree d of the ring is the d-fold balanced tensor power of the generator
bimodule over A^e (degree 0 is A^e itself).  Elements are sparse vectors
per degree; two-sided ideal spans are materialized degree by degree, and
inhomogeneous ideals get a filtered quotient with a look-ahead horizon and
a stabilization report instead of an exact answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .chains import ChainContext, Letter, add_to
from .errors import BundleMismatch, InhomogeneousRelations, TruncationExceeded
from .linalg import Matrix, SparseEchelon, Subspace


class GeneratorBundle:
    """Generator data: one block of m (x)_k m^dual pairs per letter.

    The k-basis of the generator space G is laid out block by block; index
    (letter, u, v) with u a module basis index and v a dual basis index is
    offset + u * dim(dual) + v.  Named generators map names like "T[0,1]"
    to specific k-basis vectors.
    """

    def __init__(self, base, env, letters, env_ctx=None, base_ctx=None):
        self.base = base
        self.env = env
        self.letters = tuple(letters)
        self.env_ctx = env_ctx if env_ctx is not None else ChainContext(env)
        self.base_ctx = base_ctx if base_ctx is not None else ChainContext(base)
        self.offsets = []
        off = 0
        for lt in self.letters:
            self.offsets.append(off)
            off += lt.module.dim * lt.dual_module.dim
        self.gdim = off
        self.space = None  # set by the builder (a Bimodule over env with dim gdim)
        self.names = {}

    def gen_index(self, letter_pos, u, v):
        lt = self.letters[letter_pos]
        return self.offsets[letter_pos] + u * lt.dual_module.dim + v

    def gen_decode(self, idx):
        for pos in range(len(self.letters) - 1, -1, -1):
            if idx >= self.offsets[pos]:
                lt = self.letters[pos]
                rest = idx - self.offsets[pos]
                u, v = divmod(rest, lt.dual_module.dim)
                return pos, u, v
        raise IndexError(idx)

    def degree(self, d):
        """Materialized degree-d component as a chain of copies of G."""
        if self.space is None:
            raise BundleMismatch("generator bundle has no materialized space")
        return self.env_ctx.chain((self.space,) * d)

    def degree_dim(self, d):
        return self.degree(d).dim


@dataclass
class NCElement:
    """Finitely supported element of the tensor ring, by degree."""

    bundle: GeneratorBundle
    comps: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.comps = {d: dict(v) for d, v in self.comps.items() if v}

    @classmethod
    def one(cls, bundle):
        F = bundle.env.field
        unit = {i: c for i, c in enumerate(bundle.env.unit) if c != F.zero}
        return cls(bundle, {0: unit})

    @classmethod
    def generator(cls, bundle, idx):
        return cls(bundle, {1: {idx: bundle.env.field.one}})

    @classmethod
    def named(cls, bundle, name):
        return cls.generator(bundle, bundle.names[name])

    def degrees(self):
        return sorted(self.comps)

    def top_degree(self):
        return max(self.comps) if self.comps else None

    def is_zero(self):
        return not self.comps

    def add(self, other):
        self._check(other)
        F = self.bundle.env.field
        out = {d: dict(v) for d, v in self.comps.items()}
        for d, v in other.comps.items():
            tgt = out.setdefault(d, {})
            for k, c in v.items():
                add_to(F, tgt, k, c)
            if not tgt:
                out.pop(d)
        return NCElement(self.bundle, out)

    def scale(self, c):
        F = self.bundle.env.field
        if c == F.zero:
            return NCElement(self.bundle, {})
        return NCElement(self.bundle, {d: {k: F.mul(c, x) for k, x in v.items()} for d, v in self.comps.items()})

    def sub(self, other):
        return self.add(other.scale(self.bundle.env.field.neg(self.bundle.env.field.one)))

    def mul(self, other):
        self._check(other)
        return multiply(self, other)

    def _check(self, other):
        if other.bundle is not self.bundle:
            raise BundleMismatch("elements of different generator bundles")

    def __eq__(self, other):
        return isinstance(other, NCElement) and other.bundle is self.bundle and other.comps == self.comps


def multiply(x, y):
    """Graded product through the canonical degree-component isomorphisms."""
    bundle = x.bundle
    ctx = bundle.env_ctx
    g = bundle.space
    out = {}
    F = bundle.env.field
    for a, xa in x.comps.items():
        for b, yb in y.comps.items():
            vec = ctx.concat((g,) * a, (g,) * b, xa, yb)
            if vec:
                tgt = out.setdefault(a + b, {})
                for k, c in vec.items():
                    add_to(F, tgt, k, c)
                if not tgt:
                    out.pop(a + b)
    return NCElement(bundle, out)


def act_env(bundle, side, t, d, vec):
    """Left or right action of the t-th A^e basis vector on a degree component."""
    space = bundle.degree(d).space
    mat = space.left[t] if side == "left" else space.right[t]
    F = bundle.env.field
    out = {}
    for k, c in vec.items():
        for r in range(mat.nrows):
            v = mat.rows[r][k]
            if v != F.zero:
                add_to(F, out, r, F.mul(c, v))
    return out


def env_closure(bundle, d, vectors):
    """Close a set of degree-d vectors under both A^e actions."""
    ech = SparseEchelon(bundle.env.field)
    queue = []
    for v in vectors:
        row = ech.add(v)
        if row:
            queue.append(row)
    while queue:
        v = queue.pop()
        for side in ("left", "right"):
            for t in range(bundle.env.dim):
                img = act_env(bundle, side, t, d, v)
                row = ech.add(img)
                if row:
                    queue.append(row)
    return [dict(r) for _, r in sorted(ech.rows.items())]


@dataclass
class IdealSpan:
    """Two-sided ideal given by relation elements, with cached degree spans."""

    bundle: GeneratorBundle
    relations: list

    def __post_init__(self):
        for r in self.relations:
            if r.bundle is not self.bundle:
                raise BundleMismatch("relation from a different bundle")
        self._spans = {}

    @property
    def homogeneous(self):
        return all(len(r.comps) <= 1 for r in self.relations)

    def degree_rows(self, d):
        """Echelon rows spanning the degree-d component of the ideal."""
        if not self.homogeneous:
            raise InhomogeneousRelations("degree spans need homogeneous relations")
        got = self._spans.get(d)
        if got is not None:
            return got
        bundle = self.bundle
        F = bundle.env.field
        ech = SparseEchelon(F)
        seeds = [dict(r.comps[d]) for r in self.relations if r.top_degree() == d]
        for v in env_closure(bundle, d, seeds):
            ech.add(v)
        if d > 0:
            g = bundle.space
            ctx = bundle.env_ctx
            for row in self.degree_rows(d - 1):
                for gi in range(bundle.gdim):
                    gv = {gi: F.one}
                    left = ctx.concat((g,), (g,) * (d - 1), gv, row)
                    ech.add(left)
                    right = ctx.concat((g,) * (d - 1), (g,), row, gv)
                    ech.add(right)
        rows = [dict(ech.rows[k]) for k in sorted(ech.rows)]
        self._spans[d] = rows
        return rows

    def degree_span(self, d):
        rows = self.degree_rows(d)
        dim = self.bundle.degree_dim(d)
        F = self.bundle.env.field
        dense = [[r.get(i, F.zero) for i in range(dim)] for r in rows]
        return Subspace.from_vectors(F, dim, dense)


def ideal_degree_span(ideal, d):
    return ideal.degree_span(d)


class GradedQuotient:
    """Per-degree quotients of the tensor ring by a homogeneous ideal."""

    def __init__(self, ideal, max_d):
        self.ideal = ideal
        self.bundle = ideal.bundle
        self.max_d = max_d
        self.filtered = False
        F = self.bundle.env.field
        self._ech = {}
        self._free = {}
        self.dims = []
        for d in range(max_d + 1):
            ech = SparseEchelon(F)
            for row in ideal.degree_rows(d):
                ech.add(row)
            piv = ech.pivot_set()
            free = tuple(i for i in range(self.bundle.degree_dim(d)) if i not in piv)
            self._ech[d] = ech
            self._free[d] = free
            self.dims.append(len(free))

    def project(self, d, vec):
        """Degree-d ring coordinates -> canonical coset coordinates."""
        if d > self.max_d:
            raise TruncationExceeded(f"degree {d} beyond materialized bound {self.max_d}")
        red = self._ech[d].reduce(vec)
        free = self._free[d]
        pos = {k: i for i, k in enumerate(free)}
        return {pos[k]: c for k, c in red.items()}

    def section(self, d, coords):
        free = self._free[d]
        return {free[i]: c for i, c in coords.items()}

    def reduce(self, d, vec):
        if d > self.max_d:
            raise TruncationExceeded(f"degree {d} beyond materialized bound {self.max_d}")
        return self._ech[d].reduce(vec)

    def dim(self, d):
        return self.dims[d]


def graded_quotient_dims(ideal, max_d):
    q = GradedQuotient(ideal, max_d)
    return list(q.dims), q


class FilteredQuotient:
    """Quotient of the filtration by a possibly inhomogeneous ideal.

    The ideal span is computed from products whose top degree stays within
    max_d + h for a look-ahead h; the part supported in filtration <= max_d
    is kept.  If two consecutive look-aheads agree the result is flagged
    stable, otherwise it carries a truncation warning; both outcomes are
    usable, the flag tells how trustworthy the dimensions are.
    """

    def __init__(self, ideal, max_d, horizon):
        self.ideal = ideal
        self.bundle = ideal.bundle
        self.max_d = max_d
        self.horizon = horizon
        self.filtered = True
        F = self.bundle.env.field
        self._key_offs = self._offsets(max_d)
        self.dims_by_horizon = []
        spans = []
        for h in range(horizon + 1):
            rows = self._low_span(max_d + h)
            spans.append(rows)
            self.dims_by_horizon.append(self._filtration_dims(rows))
        self.stabilized = False
        used = horizon
        for h in range(1, horizon + 1):
            if spans[h] == spans[h - 1]:
                self.stabilized = True
                used = h - 1
                break
        self.horizon_used = used
        rows = spans[used]
        self._ech = SparseEchelon(F)
        for r in rows:
            self._ech.add(r)
        piv = self._ech.pivot_set()
        self._free = tuple(k for k in self._all_keys() if k not in piv)
        self.dims = self._filtration_dims(rows)

    # -- key layout: higher degree eliminates first ------------------------
    def _offsets(self, top):
        offs = {}
        off = 0
        for d in range(top, -1, -1):
            offs[d] = off
            off += self.bundle.degree_dim(d)
        return offs

    def key(self, d, i):
        return self._key_offs[d] + i

    def _all_keys(self):
        out = []
        for d in range(self.max_d, -1, -1):
            for i in range(self.bundle.degree_dim(d)):
                out.append(self._key_offs[d] + i)
        return sorted(out)

    def _encode(self, comps, offs):
        vec = {}
        for d, v in comps.items():
            for i, c in v.items():
                vec[offs[d] + i] = c
        return vec

    def _low_span(self, top):
        """Echelon rows of the ideal span with top degree <= top, restricted
        to filtration <= max_d."""
        bundle = self.bundle
        F = bundle.env.field
        offs = self._offsets(top)
        ech = SparseEchelon(F)
        queue = []

        def insert(comps):
            vec = self._encode(comps, offs)
            row = ech.add(vec)
            if row:
                queue.append(row)

        for r in self.ideal.relations:
            t = r.top_degree()
            if t is None or t > top:
                continue
            for side_comps in _env_orbit(bundle, r.comps):
                insert(side_comps)
        g = bundle.space
        ctx = bundle.env_ctx
        boundary = offs[self.max_d] if self.max_d <= top else None
        while queue:
            row = queue.pop()
            comps = _decode(bundle, row, offs, top)
            t = max(comps)
            if t + 1 > top:
                continue
            for gi in range(bundle.gdim):
                gv = {gi: F.one}
                left = {}
                right = {}
                for d, v in comps.items():
                    lv = ctx.concat((g,), (g,) * d, gv, v)
                    if lv:
                        left[d + 1] = lv
                    rv = ctx.concat((g,) * d, (g,), v, gv)
                    if rv:
                        right[d + 1] = rv
                insert(left)
                insert(right)
        # rows whose pivot sits in filtration <= max_d have all their support
        # there (the pivot is the highest-degree coordinate present)
        low = []
        cut = offs[self.max_d]
        for k in sorted(ech.rows):
            if k >= cut:
                low.append({kk - cut: c for kk, c in ech.rows[k].items()})
        return low

    def _filtration_dims(self, rows):
        """Quotient dimension of each filtration step given low-span rows."""
        counts = [0] * (self.max_d + 1)
        for r in rows:
            piv = min(r)
            for d in range(self.max_d + 1):  # offsets decrease with degree
                if piv >= self._key_offs[d]:
                    counts[d] += 1
                    break
        out = []
        for f in range(self.max_d + 1):
            size = sum(self.bundle.degree_dim(d) for d in range(f + 1))
            dead = sum(counts[d] for d in range(f + 1))
            out.append(size - dead)
        return out

    def encode(self, comps):
        """Element components (degree -> sparse vec) to filtered coordinates."""
        if comps and max(comps) > self.max_d:
            raise TruncationExceeded("element sticks out of the filtration")
        return self._encode(comps, self._key_offs)

    def decode(self, vec):
        return _decode(self.bundle, vec, self._key_offs, self.max_d)

    def reduce(self, vec):
        return self._ech.reduce(vec)

    def project(self, comps):
        red = self._ech.reduce(self.encode(comps))
        pos = {k: i for i, k in enumerate(self._free)}
        return {pos[k]: c for k, c in red.items()}

    def section(self, coords):
        return self.decode({self._free[i]: c for i, c in coords.items()})

    def dim(self, f=None):
        if f is None:
            f = self.max_d
        return self.dims[f]


def _env_orbit(bundle, comps):
    """All A^e-action translates (as component dicts) of an element, as a
    spanning family; plain double-sided action orbit closure."""
    F = bundle.env.field
    seen = SparseEchelon(F)
    out = []
    # flatten with a private offset per degree for the closure bookkeeping
    degs = sorted(comps)
    offs = {}
    off = 0
    for d in degs:
        offs[d] = off
        off += bundle.degree_dim(d)

    def flat(c):
        return {offs[d] + i: x for d, v in c.items() for i, x in v.items()}

    queue = [comps]
    if seen.add(flat(comps)):
        out.append(comps)
    while queue:
        cur = queue.pop()
        for side in ("left", "right"):
            for t in range(bundle.env.dim):
                img = {}
                for d, v in cur.items():
                    iv = act_env(bundle, side, t, d, v)
                    if iv:
                        img[d] = iv
                if img and seen.add(flat(img)):
                    out.append(img)
                    queue.append(img)
    return out


def _decode(bundle, vec, offs, top):
    comps = {}
    bounds = sorted((o, d) for d, o in offs.items())
    for k, c in vec.items():
        d = None
        for o, dd in reversed(bounds):
            if k >= o:
                d = dd
                base = o
                break
        comps.setdefault(d, {})[k - base] = c
    return comps


def filtered_quotient(ideal, max_d, horizon):
    return FilteredQuotient(ideal, max_d, horizon)
