"""Right modules (contravariant functors to abelian groups) over a ZCategory.

``M.action[(c, d, k)]`` is the matrix of M(f_k): M(d) -> M(c) for the k-th
basis element f_k of Hom(c, d).  Free modules are tuples of object labels;
a map between free modules is a :class:`FreeMap` whose entry (i, j) is a
morphism c_j -> d_i.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .errors import CategoryMismatch, InputError, InternalInvariantViolation
from .lattice import (AbMap, FpAbGroup, IntMatrix, block_diag, direct_sum, exactness_check, hermite_solve,
                      hstack, homology_at, kernel_basis, lattice_basis, lattice_contains, lattice_coords,
                      subquotient)
from .zcat import Failure, ZCategory


def _zero_group():
    return FpAbGroup(0)


class CModule:
    def __init__(self, C: ZCategory, values, action, name=None):
        self.C = C
        self.values = {c: values.get(c) or _zero_group() for c in C.objects}
        self.action = {}
        for (c, d, k), A in action.items():
            want = (self.values[c].ngens, self.values[d].ngens)
            if A.shape != want:
                raise InputError(f"action matrix for {(c, d, k)} has shape {A.shape}, expected {want}")
            if want[0] and want[1]:
                self.action[(c, d, k)] = A
        self.name = name

    def value(self, c):
        return self.values[c]

    def act(self, c, d, k):
        A = self.action.get((c, d, k))
        if A is None:
            return IntMatrix.zero(self.values[c].ngens, self.values[d].ngens)
        return A

    def act_vec(self, c, d, fvec):
        """Matrix of M(f) for f = sum fvec[k] f_k in Hom(c, d)."""
        out = IntMatrix.zero(self.values[c].ngens, self.values[d].ngens)
        for k, x in enumerate(fvec):
            if x and (c, d, k) in self.action:
                out = out + self.action[(c, d, k)].scale(x)
        return out

    def act_map(self, c, d, k):
        return AbMap(self.values[d], self.values[c], self.act(c, d, k))

    def support(self):
        return [c for c in self.C.objects if not self.values[c].is_trivial()]

    def is_zero(self):
        return not self.support()

    def is_free_valued(self):
        return all(self.values[c].is_free() for c in self.C.objects)

    def total_rank(self):
        return sum(self.values[c].free_rank for c in self.C.objects)

    def ranks(self):
        return {c: self.values[c].invariants() for c in self.C.objects}

    def identity_map(self):
        return CModuleMap(self, self, {c: IntMatrix.identity(self.values[c].ngens) for c in self.C.objects})

    def __repr__(self):
        inner = ", ".join(f"{c}: {self.values[c]!r}" for c in self.support())
        return f"CModule({self.name or self.C.name}; {inner})"


def _same_map(G, H, A, B):
    """A and B induce the same map G -> H."""
    basis = H.rel_basis
    D = A - B
    return all(lattice_contains(basis, col) for col in D.columns())


def validate_module(M: CModule):
    """Functoriality, identities, well-definedness and torsion compatibility."""
    C = M.C
    out = []
    for (c, d, k), A in M.action.items():
        if not AbMap(M.values[d], M.values[c], A).is_well_defined():
            out.append(Failure("action not well defined", (c, d, C.basis(c, d)[k])))
    for (c, d) in C.nonzero_pairs():
        for k, m in enumerate(C.hom_orders(c, d)):
            if m and not AbMap(M.values[d], M.values[c], M.act(c, d, k).scale(m)).is_zero():
                out.append(Failure("action ignores torsion order", (c, d, C.basis(c, d)[k])))
    for c in C.objects:
        G = M.values[c]
        if not _same_map(G, G, M.act(c, c, C.identity[c]), IntMatrix.identity(G.ngens)):
            out.append(Failure("identity acts nontrivially", (c,)))
    if out:
        return out
    for (c, d) in C.nonzero_pairs():
        for e in C.out_targets(d):
            table = C.comp.get((c, d, e))
            for i in range(C.rank(d, e)):
                Ag = M.act(d, e, i)
                for j in range(C.rank(c, d)):
                    lhs = M.act_vec(c, e, table[i][j]) if C.rank(c, e) else \
                        IntMatrix.zero(M.values[c].ngens, M.values[e].ngens)
                    rhs = M.act(c, d, j) @ Ag
                    if not _same_map(M.values[e], M.values[c], lhs, rhs):
                        out.append(Failure("functoriality", (c, d, e, C.basis(d, e)[i], C.basis(c, d)[j])))
    return out


class CModuleMap:
    def __init__(self, source: CModule, target: CModule, components):
        if source.C is not target.C:
            raise CategoryMismatch("modules over different categories")
        self.source, self.target = source, target
        self.components = {}
        for c in source.C.objects:
            A = components.get(c)
            want = (target.values[c].ngens, source.values[c].ngens)
            if A is None:
                A = IntMatrix.zero(*want)
            if A.shape != want:
                raise InputError(f"component at {c} has shape {A.shape}, expected {want}")
            self.components[c] = A

    @property
    def C(self):
        return self.source.C

    def at(self, c):
        return AbMap(self.source.values[c], self.target.values[c], self.components[c])

    def validate(self):
        out = []
        for c in self.C.objects:
            if not self.at(c).is_well_defined():
                out.append(Failure("component not well defined", (c,)))
        for (c, d, k) in set(self.source.action) | set(self.target.action):
            lhs = self.components[c] @ self.source.act(c, d, k)
            rhs = self.target.act(c, d, k) @ self.components[d]
            if not _same_map(self.source.values[d], self.target.values[c], lhs, rhs):
                out.append(Failure("naturality", (c, d, self.C.basis(c, d)[k])))
        return out

    def compose(self, first: "CModuleMap") -> "CModuleMap":
        return CModuleMap(first.source, self.target,
                          {c: self.components[c] @ first.components[c] for c in self.C.objects})

    def is_zero(self):
        return all(self.at(c).is_zero() for c in self.C.objects)

    def is_isomorphism(self):
        return all(self.at(c).is_isomorphism() for c in self.C.objects)

    def kernel(self):
        """(K, inclusion K -> source)."""
        C = self.C
        M = self.source
        bases, values = {}, {}
        for c in C.objects:
            lat = self.at(c).kernel_lattice()
            G, basis = subquotient(lat, M.values[c].rels.columns(), M.values[c].ngens)
            bases[c], values[c] = basis, G
        action = {}
        for (c, d, k), A in M.action.items():
            if not bases[c] or not bases[d]:
                continue
            cols = []
            for b in bases[d]:
                co = lattice_coords(bases[c], A @ b)
                if co is None:
                    raise InternalInvariantViolation("kernel is not a submodule")
                cols.append(co)
            action[(c, d, k)] = IntMatrix.from_cols(cols, len(bases[c]))
        K = CModule(C, values, action)
        incl = CModuleMap(K, M, {c: IntMatrix.from_cols(bases[c], M.values[c].ngens) for c in C.objects})
        return K, incl

    def image(self):
        """(I, inclusion I -> target); I(c) is presented on the generators of M(c)."""
        C = self.C
        M = self.source
        values = {c: FpAbGroup.from_relators(M.values[c].ngens, self.at(c).kernel_lattice()) for c in C.objects}
        I = CModule(C, values, dict(M.action))
        return I, CModuleMap(I, self.target, dict(self.components))

    def cokernel(self):
        C = self.C
        N = self.target
        values = {c: FpAbGroup(N.values[c].ngens, hstack([N.values[c].rels, self.components[c]],
                                                        N.values[c].ngens)) for c in C.objects}
        Q = CModule(C, values, dict(N.action))
        return Q, CModuleMap(N, Q, {c: IntMatrix.identity(N.values[c].ngens) for c in C.objects})


def simplify(M: CModule):
    """Isomorphic module with canonical (diagonal) values.

    Returns ``(M2, to, back)`` with ``to: M -> M2`` and ``back: M2 -> M``.
    """
    C = M.C
    values = {c: M.values[c].canonical() for c in C.objects}
    action = {}
    for (c, d, k), A in M.action.items():
        B = M.values[c].to_canonical @ A @ M.values[d].from_canonical
        if values[c].ngens and values[d].ngens:
            action[(c, d, k)] = _reduce_cols(B, values[c])
    M2 = CModule(C, values, action, M.name)
    to = CModuleMap(M, M2, {c: M.values[c].to_canonical for c in C.objects})
    back = CModuleMap(M2, M, {c: M.values[c].from_canonical for c in C.objects})
    return M2, to, back


def _reduce_cols(A, G):
    """Reduce entries of A row-wise modulo the diagonal orders of a canonical group."""
    rows = A.tolist()
    for i, m in enumerate(G.moduli):
        if m:
            rows[i] = [x % m for x in rows[i]]
    return IntMatrix.from_rows(rows, A.cols)


def zero_module(C):
    return CModule(C, {}, {})


def direct_sum_modules(mods):
    mods = list(mods)
    C = mods[0].C
    values = {c: direct_sum([m.values[c] for m in mods]) for c in C.objects}
    keys = set()
    for m in mods:
        keys |= set(m.action)
    action = {}
    for (c, d, k) in keys:
        action[(c, d, k)] = block_diag([m.act(c, d, k) for m in mods])
    return CModule(C, values, action)


def direct_sum_maps(maps, source, target):
    C = source.C
    return CModuleMap(source, target, {c: block_diag([f.components[c] for f in maps]) for c in C.objects})


# ------------------------------------------------------------- free modules

def representable(C: ZCategory, c) -> CModule:
    """The module h_c = Hom(-, c), acting by precomposition."""
    C.check_object(c)
    return free_module(C, (c,))


class FreeModuleData:
    """Realization of a finite coproduct of representables with offsets."""

    def __init__(self, C, labels):
        self.C = C
        self.labels = tuple(labels)
        for c in self.labels:
            C.check_object(c)
        self.offsets = {}
        for x in C.objects:
            off, o = [], 0
            for c in self.labels:
                off.append(o)
                o += C.rank(x, c)
            self.offsets[x] = (off, o)

    def size(self, x):
        return self.offsets[x][1]

    def split(self, x, vec):
        off, _ = self.offsets[x]
        return [tuple(vec[o:o + self.C.rank(x, c)]) for o, c in zip(off, self.labels)]

    @cached_property
    def module(self):
        C = self.C
        values = {}
        for x in C.objects:
            orders = []
            for c in self.labels:
                orders.extend(C.hom_orders(x, c))
            values[x] = FpAbGroup.diagonal(orders)
        action = {}
        for (x, y) in C.nonzero_pairs():
            for k in range(C.rank(x, y)):
                blocks = []
                for c in self.labels:
                    rx, ry = C.rank(x, c), C.rank(y, c)
                    if rx == 0 or ry == 0:
                        blocks.append(IntMatrix.zero(rx, ry))
                        continue
                    table = C.comp[(x, y, c)]
                    blocks.append(IntMatrix.from_cols([table[i][k] for i in range(ry)], rx))
                A = block_diag(blocks) if blocks else IntMatrix.zero(0, 0)
                if A.rows and A.cols and not A.is_zero():
                    action[(x, y, k)] = A
        return CModule(C, values, action, name="free" + str(list(self.labels)))


_free_cache = {}


def free_data(C, labels):
    key = (id(C), tuple(labels))
    hit = _free_cache.get(key)
    if hit is None or hit.C is not C:
        hit = FreeModuleData(C, labels)
        if len(_free_cache) > 512:
            _free_cache.clear()
        _free_cache[key] = hit
    return hit


def free_module(C, labels) -> CModule:
    return free_data(C, labels).module


@dataclass
class FreeMap:
    """Morphism matrix between free modules: ``cols[j][i]`` is the coefficient
    vector of the entry c_j -> d_i (source ``src[j]``, target ``tgt[i]``)."""
    C: ZCategory
    src: tuple
    tgt: tuple
    cols: list

    def component(self, x):
        C = self.C
        F, G = free_data(C, self.src), free_data(C, self.tgt)
        rows = G.size(x)
        blocks_cols = []
        for j, c in enumerate(self.src):
            rxc = C.rank(x, c)
            for l in range(rxc):
                col = []
                for i, d in enumerate(self.tgt):
                    rxd = C.rank(x, d)
                    if not rxd:
                        continue
                    phi = self.cols[j][i]
                    vec = [0] * rxd
                    if any(phi):
                        table = C.comp[(x, c, d)]
                        for k, a in enumerate(phi):
                            if a:
                                for t, v in enumerate(table[k][l]):
                                    vec[t] += a * v
                    col.extend(C.reduce(x, d, vec))
                blocks_cols.append(col)
        if not blocks_cols:
            return IntMatrix.zero(rows, 0)
        return IntMatrix.from_cols(blocks_cols, rows)

    def realize(self):
        F, G = free_module(self.C, self.src), free_module(self.C, self.tgt)
        return CModuleMap(F, G, {x: self.component(x) for x in self.C.objects})


def yoneda_map(M: CModule, labels, elems) -> CModuleMap:
    """The map from the free module on ``labels`` sending generator j to ``elems[j]`` in M(labels[j])."""
    C = M.C
    F = free_module(C, labels)
    comps = {}
    for x in C.objects:
        cols = []
        for c, m in zip(labels, elems):
            for k in range(C.rank(x, c)):
                cols.append(M.act(x, c, k) @ list(m))
        comps[x] = IntMatrix.from_cols(cols, M.values[x].ngens) if cols else IntMatrix.zero(M.values[x].ngens, 0)
    return CModuleMap(F, M, comps)


def free_cover(M: CModule, order=None):
    """(labels, elements, epimorphism) with one generator per canonical
    generator of M(c) not already reached, scanning objects in ``order``."""
    C = M.C
    objs = list(order) if order is not None else list(C.objects)
    labels, elems = [], []
    for c in objs:
        G = M.values[c]
        if G.is_trivial():
            continue
        span = list(G.rels.columns())
        for cj, m in zip(labels, elems):
            for k in range(C.rank(c, cj)):
                span.append(M.act(c, cj, k) @ list(m))
        L = lattice_basis(span, G.ngens)
        for g in G.gen_vectors():
            if lattice_contains(L, g):
                continue
            labels.append(c)
            elems.append(list(g))
            for k in range(C.rank(c, c)):
                span.append(M.act(c, c, k) @ list(g))
            L = lattice_basis(span, G.ngens)
    eps = yoneda_map(M, labels, elems)
    for c in C.objects:
        if not eps.at(c).is_surjective():
            raise InternalInvariantViolation(f"free cover is not surjective at {c}")
    return tuple(labels), elems, eps


# ------------------------------------------------------------- resolutions

@dataclass
class Resolution:
    module: CModule
    frees: list                 # frees[k] = labels of F_k
    augmentation: CModuleMap    # F_0 -> M
    diffs: list                 # diffs[k]: F_{k+1} -> F_k as FreeMap
    syzygies: list              # syzygies[k] = Ω^{k+1} (values canonical)
    elems: list = field(default_factory=list)    # generators of F_0 as elements of M

    def ranks(self):
        return [len(f) for f in self.frees]

    def syzygy_ranks(self):
        return [s.total_rank() for s in self.syzygies]

    def check_exact(self):
        """Objectwise exactness at every junction; returns failures."""
        C = self.module.C
        out = []
        maps = [d.realize() for d in self.diffs]
        for x in C.objects:
            seq = [m.at(x) for m in reversed(maps)] + [self.augmentation.at(x)]
            zero = AbMap(self.module.values[x], FpAbGroup(0), IntMatrix.zero(0, self.module.values[x].ngens))
            seq.append(zero)
            for j in exactness_check(seq):
                if not j.exact:
                    out.append(Failure("inexact", (x, len(seq) - 2 - j.index)))
        return out


def resolution(M: CModule, length: int, order=None, check=True) -> Resolution:
    """Free resolution F_length -> ... -> F_0 -> M."""
    C = M.C
    labels, elems, eps = free_cover(M, order)
    frees, diffs, syz = [labels], [], []
    prev = eps
    for _ in range(length):
        K, incl = prev.kernel()
        K2, to, back = simplify(K)
        labels_k, elems_k, cov = free_cover(K2, order)
        cols = []
        F_prev = free_data(C, frees[-1])
        for c, m in zip(labels_k, elems_k):
            v = incl.components[c] @ (back.components[c] @ list(m))
            cols.append(F_prev.split(c, v))
        diffs.append(FreeMap(C, labels_k, frees[-1], cols))
        frees.append(labels_k)
        syz.append(K2)
        prev = cov
    R = Resolution(M, frees, eps, diffs, syz, elems)
    if check:
        bad = R.check_exact()
        if bad:
            raise InternalInvariantViolation(f"resolution not exact: {bad[:3]}")
    return R


def syzygy(M: CModule, k: int, order=None) -> CModule:
    if k == 0:
        return M
    return resolution(M, k, order, check=False).syzygies[k - 1]


# ------------------------------------------------------------ Hom and Ext

def hom_free_group(N: CModule, labels):
    return direct_sum([N.values[c] for c in labels])


def coboundary(N: CModule, d: FreeMap) -> AbMap:
    """Hom(d, N): Hom(F_tgt, N) = ⊕ N(d_i) -> Hom(F_src, N) = ⊕ N(c_j)."""
    src = hom_free_group(N, d.tgt)
    tgt = hom_free_group(N, d.src)
    blocks = []
    for j, c in enumerate(d.src):
        row = []
        for i, e in enumerate(d.tgt):
            row.append(N.act_vec(c, e, d.cols[j][i]))
        blocks.append(row)
    rows = []
    for j, c in enumerate(d.src):
        for r in range(N.values[c].ngens):
            line = []
            for i, e in enumerate(d.tgt):
                line.extend(blocks[j][i].row(r))
            rows.append(line)
    M = IntMatrix.from_rows(rows, src.ngens) if rows else IntMatrix.zero(0, src.ngens)
    return AbMap(src, tgt, M)


@dataclass
class ModulePresentation:
    F0: tuple
    elems: list
    F1: tuple
    d1: FreeMap
    eps: CModuleMap

    @cached_property
    def lifts(self):
        """Per object, a matrix lifting generators of M(x) through F0(x)."""
        M = self.eps.target
        out = {}
        for x in M.C.objects:
            G = M.values[x]
            E = self.eps.components[x]
            big = hstack([E, G.rels], G.ngens)
            cols = []
            for g in range(G.ngens):
                e = [1 if i == g else 0 for i in range(G.ngens)]
                s = hermite_solve(big, e)
                if s.x is None:
                    raise InternalInvariantViolation("cover is not surjective")
                cols.append(s.x[:E.cols])
            out[x] = IntMatrix.from_cols(cols, E.cols) if cols else IntMatrix.zero(E.cols, 0)
        return out


def present(M: CModule, order=None) -> ModulePresentation:
    cache = M.__dict__.setdefault("_pres_cache", {})
    key = tuple(order) if order is not None else None
    if key in cache:
        return cache[key]
    R = resolution(M, 1, order, check=False)
    P = ModulePresentation(R.frees[0], R.elems, R.frees[1], R.diffs[0], R.augmentation)
    cache[key] = P
    return P


class HomModule(FpAbGroup):
    """Hom_C(M, N) with generators as CModuleMaps."""

    def __init__(self, M: CModule, N: CModule, order=None):
        if M.C is not N.C:
            raise CategoryMismatch("modules over different categories")
        self.M, self.N = M, N
        P = present(M, order)
        self.P = P
        delta = coboundary(N, P.d1)
        lat = delta.kernel_lattice()
        G, basis = subquotient(lat, delta.source.rels.columns(), delta.source.ngens)
        self._basis = basis
        self._ambient = delta.source
        super().__init__(G.ngens, G.rels)

    def _map_from_vector(self, v):
        M, N, P = self.M, self.N, self.P
        parts, o = [], 0
        for c in P.F0:
            n = N.values[c].ngens
            parts.append(v[o:o + n])
            o += n
        psi = yoneda_map(N, P.F0, parts)
        lifts = P.lifts
        return CModuleMap(M, N, {x: psi.components[x] @ lifts[x] for x in M.C.objects})

    @cached_property
    def generators(self):
        out = []
        for g in self.gen_vectors():
            v = [0] * self._ambient.ngens
            for k, c in enumerate(g):
                if c:
                    v = [a + c * b for a, b in zip(v, self._basis[k])]
            out.append(self._map_from_vector(v))
        return out

    def coords_of(self, phi: CModuleMap):
        P = self.P
        v = []
        for c, m in zip(P.F0, P.elems):
            v.extend(phi.components[c] @ list(m))
        co = lattice_coords(self._basis, v) if self._basis else ([] if not any(v) else None)
        if co is None:
            # v is only defined modulo relations of the values of N
            s = hermite_solve(hstack([IntMatrix.from_cols(self._basis, len(v)) if self._basis
                                      else IntMatrix.zero(len(v), 0), self._ambient.rels], len(v)), v)
            if s.x is None:
                raise InputError("not a natural transformation")
            co = s.x[:len(self._basis)]
        return self.coords(co)


def hom_module(M: CModule, N: CModule, order=None) -> HomModule:
    return HomModule(M, N, order)


def hom_module_direct(M: CModule, N: CModule) -> FpAbGroup:
    """Hom_C(M, N) by solving the naturality system for all components at once."""
    if M.C is not N.C:
        raise CategoryMismatch("modules over different categories")
    C = M.C
    objs = [c for c in C.objects if M.values[c].ngens and N.values[c].ngens]
    off, nvar = {}, 0
    for c in objs:
        off[c] = nvar
        nvar += N.values[c].ngens * M.values[c].ngens
    slack_blocks = []
    eqs = []

    def xidx(c, i, j):
        return off[c] + i * M.values[c].ngens + j

    def add_rows(rows_x, c):
        """rows_x: list of dicts var->coeff, one per entry of an n_c x ? matrix
        equation; a slack block S_c with columns of rels N(c) is added."""
        S = N.values[c].rels
        if S.cols == 0:
            eqs.extend(rows_x)
            return
        ncols = len(rows_x) // N.values[c].ngens
        base = len(slack_blocks)
        slack_blocks.append((S.cols * ncols))
        for r, row in enumerate(rows_x):
            i, col = divmod(r, ncols)
            row = dict(row)
            for l in range(S.cols):
                key = ("s", base, l * ncols + col)
                if S[i, l]:
                    row[key] = -S[i, l]
            eqs.append(row)

    for c in objs:
        R = M.values[c].rels
        n, m = N.values[c].ngens, M.values[c].ngens
        rows = []
        for i in range(n):
            for k in range(R.cols):
                rows.append({xidx(c, i, j): R[j, k] for j in range(m) if R[j, k]})
        if R.cols:
            add_rows(rows, c)
    for (c, d, k) in set(M.action) | set(N.action):
        if c not in off and d not in off:
            continue
        A = M.act(c, d, k)
        B = N.act(c, d, k)
        n = N.values[c].ngens
        md = M.values[d].ngens
        rows = []
        for i in range(n):
            for col in range(md):
                row = {}
                if c in off:
                    for j in range(M.values[c].ngens):
                        if A[j, col]:
                            row[xidx(c, i, j)] = row.get(xidx(c, i, j), 0) + A[j, col]
                if d in off:
                    for t in range(N.values[d].ngens):
                        if B[i, t]:
                            row[xidx(d, t, col)] = row.get(xidx(d, t, col), 0) - B[i, t]
                rows.append(row)
        if rows:
            add_rows(rows, c)
    slack_keys = sorted({k for row in eqs for k in row if isinstance(k, tuple)})
    sidx = {k: nvar + i for i, k in enumerate(slack_keys)}
    total = nvar + len(slack_keys)
    dense = []
    for row in eqs:
        line = [0] * total
        for k, v in row.items():
            line[sidx[k] if isinstance(k, tuple) else k] += v
        if any(line):
            dense.append(line)
    if dense:
        ker = kernel_basis(IntMatrix.from_rows(dense, total))
        L = [v[:nvar] for v in ker]
    else:
        L = [[1 if i == j else 0 for j in range(nvar)] for i in range(nvar)]
    Nlat = []
    for c in objs:
        S = N.values[c].rels
        for j in range(M.values[c].ngens):
            for l in range(S.cols):
                v = [0] * nvar
                for i in range(N.values[c].ngens):
                    v[xidx(c, i, j)] = S[i, l]
                Nlat.append(v)
    return subquotient(L, Nlat, nvar)[0]


def ext_module(M: CModule, N: CModule, i: int, order=None, res: Optional[Resolution] = None) -> FpAbGroup:
    """Ext^i_C(M, N) from a free resolution of M."""
    if M.C is not N.C:
        raise CategoryMismatch("modules over different categories")
    if i < 0:
        raise InputError("negative Ext degree")
    if res is None or len(res.frees) < i + 2:
        res = resolution(M, i + 1, order, check=False)
    return _cohomology(res, N, i)


def _cohomology(res, N, i):
    after = coboundary(N, res.diffs[i])
    if i == 0:
        G = after.source
        before = AbMap(FpAbGroup(0), G, IntMatrix.zero(G.ngens, 0))
    else:
        before = coboundary(N, res.diffs[i - 1])
    return homology_at(before, after)


def pdim_le(M: CModule, n: int, order=None, res: Optional[Resolution] = None) -> bool:
    """pdim M <= n, decided by Ext^1(Ω^n M, Ω^{n+1} M) = 0."""
    if n < 0:
        raise InputError("n must be nonnegative")
    if res is None or len(res.frees) < n + 3:
        res = resolution(M, n + 2, order, check=False)
    target = res.syzygies[n]            # Ω^{n+1}
    if target.is_zero():
        return True
    return _cohomology(_shifted(res, n), target, 1).is_trivial()


def _shifted(res, n):
    """The tail F_{n+2} -> F_{n+1} -> F_n viewed as a resolution of Ω^n."""
    return Resolution(res.module, res.frees[n:], None, res.diffs[n:], res.syzygies[n:])


def pdim_profile(M: CModule, kmax: int, order=None):
    """(verdicts pdim_le(M, k) for k = 0..kmax, syzygy total ranks)."""
    res = resolution(M, kmax + 2, order, check=False)
    verdicts = [pdim_le(M, k, res=res) for k in range(kmax + 1)]
    return verdicts, [M.total_rank()] + res.syzygy_ranks()


# --------------------------------------------------------------- utilities

def random_presented_module(C: ZCategory, rng, ngens=2, nrels=2, bound=2):
    """Cokernel of a random map between random free modules (seeded)."""
    objs = list(C.objects)
    F0 = tuple(rng.choice(objs) for _ in range(ngens))
    F1 = []
    cols = []
    for _ in range(nrels):
        c = rng.choice(objs)
        col = []
        for d in F0:
            col.append(tuple(rng.randint(-bound, bound) for _ in range(C.rank(c, d))))
        F1.append(c)
        cols.append(col)
    phi = FreeMap(C, tuple(F1), F0, cols).realize()
    Q, _ = phi.cokernel()
    return simplify(Q)[0]


def is_isomorphic_rank_le_one(M: CModule, N: CModule) -> bool:
    """Isomorphism test for modules whose values are all 0 or Z."""
    M, _, _ = simplify(M)
    N, _, _ = simplify(N)
    C = M.C
    for c in C.objects:
        if M.values[c].invariants() != N.values[c].invariants():
            return False
        if M.values[c].invariants() not in ((0, ()), (1, ())):
            raise InputError("values must be 0 or Z")
    supp = M.support()
    sign = {}
    for start in supp:
        if start in sign:
            continue
        sign[start] = 1
        stack = [start]
        while stack:
            c = stack.pop()
            for d in supp:
                for k in range(C.rank(c, d)):
                    a, b = M.act(c, d, k)[0, 0], N.act(c, d, k)[0, 0]
                    if abs(a) != abs(b):
                        return False
                    if a == 0:
                        continue
                    # phi_c a = b phi_d  =>  phi_d = phi_c * a / b
                    s = sign[c] * (1 if a == b else -1)
                    if d in sign:
                        if sign[d] != s:
                            return False
                    else:
                        sign[d] = s
                        stack.append(d)
                for k in range(C.rank(d, c)):
                    a, b = M.act(d, c, k)[0, 0], N.act(d, c, k)[0, 0]
                    if abs(a) != abs(b):
                        return False
                    if a == 0:
                        continue
                    s = sign[c] * (1 if a == b else -1)
                    if d in sign:
                        if sign[d] != s:
                            return False
                    else:
                        sign[d] = s
                        stack.append(d)
    return True


def skyscraper(C: ZCategory, c, group: Optional[FpAbGroup] = None) -> CModule:
    """The module with value ``group`` (default Z) at c, zero elsewhere, and
    only the identity of c acting nontrivially."""
    C.check_object(c)
    G = group or FpAbGroup.free(1)
    action = {(c, c, C.identity[c]): IntMatrix.identity(G.ngens)} if G.ngens else {}
    M = CModule(C, {c: G}, action, name=f"sky[{c}]")
    if validate_module(M):
        raise InputError(f"no skyscraper module at {c}: End({c}) has nilpotent-free extra part")
    return M


def check_short_exact(f: CModuleMap, g: CModuleMap):
    """Failures of 0 -> A -f-> B -g-> C -> 0 being exact, checked objectwise."""
    C = f.C
    out = []
    for x in C.objects:
        A, Cx = f.source.values[x], g.target.values[x]
        seq = [AbMap(FpAbGroup(0), A, IntMatrix.zero(A.ngens, 0)), f.at(x), g.at(x),
               AbMap(Cx, FpAbGroup(0), IntMatrix.zero(0, Cx.ngens))]
        try:
            js = exactness_check(seq)
        except Exception as e:      # composable but nonzero composite
            out.append(Failure("not a complex", (x, str(e))))
            continue
        for j in js:
            if not j.exact:
                out.append(Failure("inexact", (x, ["source", "middle", "target"][j.index])))
    return out


def extension_class(f: CModuleMap, g: CModuleMap, order=None):
    """Class of 0 -> A -> B -> C -> 0 in Ext^1(C, A).

    Returns ``(ext_group, cocycle, is_zero)`` where the cocycle lives in
    Hom(F_1, A) for a free resolution F of C.
    """
    A, B, Cm = f.source, f.target, g.target
    cat = A.C
    res = resolution(Cm, 2, order, check=False)
    # lift the generators of F_0 through g
    lifts = []
    for c, m in zip(res.frees[0], res.elems):
        big = hstack([g.components[c], Cm.values[c].rels], Cm.values[c].ngens)
        s = hermite_solve(big, list(m))
        if s.x is None:
            raise InputError("g is not surjective")
        lifts.append(s.x[:B.values[c].ngens])
    psi0 = yoneda_map(B, res.frees[0], lifts)
    d1 = res.diffs[0]
    cocycle = []
    for k, c in enumerate(d1.src):
        v = []
        for part in d1.cols[k]:
            v.extend(part)
        b = psi0.components[c] @ v
        big = hstack([f.components[c], B.values[c].rels], B.values[c].ngens)
        s = hermite_solve(big, b)
        if s.x is None:
            raise InputError("sequence is not exact in the middle")
        cocycle.extend(s.x[:A.values[c].ngens])
    delta1 = coboundary(A, res.diffs[0])
    delta2 = coboundary(A, res.diffs[1])
    ext = homology_at(delta1, delta2)
    span = delta1.matrix.columns() + delta1.target.rels.columns()
    zero = lattice_contains(lattice_basis(span, delta1.target.ngens), cocycle)
    return ext, cocycle, zero
