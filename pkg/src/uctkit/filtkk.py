"""Modules over the filtrated K-theory category of a linearly ordered finite space.

Objects A_{a,b} live on the fat diagonal a <= b <= a+n-1, up to the shift
(a,b) ~ (a+n+1, b+n+1).  Characteristic modules G^{a,b}_{a',b'} have value Z on
the inclusive rectangle a <= a'' <= a', b <= b'' <= b' and identity actions
inside it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InputError, InternalInvariantViolation, NotGorensteinProjective
from .lattice import AbMap, FpAbGroup, IntMatrix, exactness_check, lattice_basis, lattice_contains, subquotient
from .modules import (CModule, CModuleMap, FreeMap, check_short_exact, direct_sum_modules, extension_class,
                      is_isomorphic_rank_le_one, simplify)
from .zcat import Failure, filtkk_cat, fk_canon, fk_domain, fk_label, fk_lift, fk_suspend


@lru_cache(maxsize=None)
def fk_category(n):
    """Shared filtkk_cat(n) instance, so modules built here can be compared."""
    return filtkk_cat(n)


def in_fat_diagonal(n, a, b):
    return a <= b <= a + n - 1


def _n_of(C):
    n = C.info.get("n") if C.info else None
    if n is None:
        raise InputError("module is not over a filtkk category")
    return n


# ---------------------------------------------------------------- G modules

@dataclass(frozen=True)
class CharModuleSpec:
    a: int
    b: int
    a2: int
    b2: int

    def check(self, n):
        if not (self.b <= self.b2 <= self.a + n - 1 and self.a <= self.a2 <= self.b):
            raise InputError(f"corners {self} violate the box constraints for n = {n}")

    def points(self):
        return [(x, y) for x in range(self.a, self.a2 + 1) for y in range(self.b, self.b2 + 1)]

    def __str__(self):
        return f"G^{{{self.a},{self.b}}}_{{{self.a2},{self.b2}}}"


def G(a, b, a2, b2):
    return CharModuleSpec(a, b, a2, b2)


def char_module(n, spec: CharModuleSpec, C=None) -> CModule:
    spec.check(n)
    C = C or fk_category(n)
    pts = spec.points()
    where = {fk_label(n, *p): p for p in pts}
    if len(where) != len(pts):
        raise InternalInvariantViolation("rectangle wraps around the period")
    values = {c: FpAbGroup.free(1) for c in where}
    action = {}
    for c, p in where.items():
        for d in where:
            if C.rank(c, d) and fk_lift(n, p, where[d]) == where[d]:
                action[(c, d, 0)] = IntMatrix.identity(1)
    return CModule(C, values, action, name=str(spec))


def is_gproj(M: CModule) -> bool:
    _n_of(M.C)
    return all(not M.values[c].invariants()[1] for c in M.C.objects)


# ---------------------------------------------------------------- filtration

@dataclass
class Layer:
    position: tuple         # (a, b) in the fundamental domain
    multiplicity: int
    embedding: IntMatrix    # basis of the chain member at the position, canonical coordinates of M


@dataclass
class FiltrationCertificate:
    module: CModule         # the canonical form of the input
    layers: list = field(default_factory=list)
    chain: list = field(default_factory=list)   # chain[i][c] = basis vectors of M_{i+1}(c)

    def total_rank(self):
        return sum(l.multiplicity for l in self.layers)

    def validate(self):
        return check_filtration(self)


def _neighbours(n, a, b):
    """Labels of A_{a,b-1} and A_{a-1,b} that exist in the category."""
    out = []
    if in_fat_diagonal(n, a, b - 1):
        out.append(fk_label(n, a, b - 1))
    if in_fat_diagonal(n, a - 1, b):
        out.append(fk_label(n, a - 1, b))
    return out


def _kernel_at(M, n, lat, a, b):
    """Kernel of f_{a,b} on M/lat, as a lattice in M(A_{a,b}) containing lat."""
    c = fk_label(n, a, b)
    r = M.values[c].ngens
    if not r:
        return []
    rels = []
    targets = _neighbours(n, a, b)
    blocks = []
    for d in targets:
        blocks.append((M.act(d, c, 0), M.values[d].ngens, lat[d]))
    total = sum(k for _, k, _ in blocks)
    if not total:
        return lattice_basis([list(v) for v in IntMatrix.identity(r).columns()], r)
    stacked = []
    for A, k, _ in blocks:
        stacked.extend(A.tolist())
    F = IntMatrix.from_rows(stacked, r)
    off = 0
    for _, k, L in blocks:
        for v in L:
            rels.append([0] * off + list(v) + [0] * (total - off - k))
        off += k
    tgt = FpAbGroup(total, IntMatrix.from_cols(rels, total) if rels else IntMatrix.zero(total, 0))
    return lattice_basis(AbMap(FpAbGroup(r), tgt, F).kernel_lattice(), r)


def filtration(M: CModule) -> FiltrationCertificate:
    C = M.C
    n = _n_of(C)
    if not is_gproj(M):
        raise NotGorensteinProjective("module has a value with torsion")
    M, _, _ = simplify(M)
    lat = {c: [] for c in C.objects}
    cert = FiltrationCertificate(M)
    dom = fk_domain(n)
    remaining = M.total_rank()
    while remaining:
        for (a, b) in dom:
            c = fk_label(n, a, b)
            K = _kernel_at(M, n, lat, a, b)
            ell = len(K) - len(lat[c])
            if ell > 0:
                lat = dict(lat)
                lat[c] = K
                cert.layers.append(Layer((a, b), ell, IntMatrix.from_cols(K, M.values[c].ngens)))
                cert.chain.append({x: list(v) for x, v in lat.items()})
                remaining -= ell
                break
        else:
            raise InternalInvariantViolation("nonzero quotient without a skyscraper kernel")
    return cert


def _is_submodule(M, lat):
    for (c, d, k), A in M.action.items():
        span = lattice_basis(lat[c], M.values[c].ngens) if lat[c] else []
        for v in lat[d]:
            w = A @ v
            if any(w) and not lattice_contains(span, w):
                return False
    return True


def check_filtration(cert: FiltrationCertificate):
    """Independent re-validation of a filtration certificate; returns failures."""
    M = cert.module
    C = M.C
    n = _n_of(C)
    out = []
    if len(cert.layers) != len(cert.chain):
        return [Failure("shape", ("layers and chain differ in length",))]
    prev = {c: [] for c in C.objects}
    for i, (layer, L) in enumerate(zip(cert.layers, cert.chain)):
        if not _is_submodule(M, L):
            out.append(Failure("not a submodule", (i,)))
        pos = fk_label(n, *layer.position)
        for c in C.objects:
            r = M.values[c].ngens
            if not all(lattice_contains(lattice_basis(L[c], r), v) for v in prev[c]):
                out.append(Failure("not increasing", (i, c)))
                continue
            Q, _ = subquotient(L[c] or [], prev[c] or [], r)
            f, t = Q.invariants()
            if c == pos:
                if (f, t) != (layer.multiplicity, ()) or layer.multiplicity < 1:
                    out.append(Failure("layer rank", (i, c, f, t)))
                if [list(v) for v in layer.embedding.columns()] != [list(v) for v in L[c]]:
                    out.append(Failure("embedding", (i, c)))
            elif f or t:
                out.append(Failure("quotient not concentrated", (i, c)))
        prev = L
    for c in C.objects:
        r = M.values[c].ngens
        full, _ = subquotient([list(v) for v in IntMatrix.identity(r).columns()], prev[c], r)
        if not full.is_trivial():
            out.append(Failure("chain does not end at M", (c,)))
    return out


def quotient_by(cert: FiltrationCertificate, i: int) -> CModule:
    """M / M_i for the i-th chain member (i = 0 gives M)."""
    M = cert.module
    if i == 0:
        return M
    L = cert.chain[i - 1]
    C = M.C
    values = {c: FpAbGroup(M.values[c].ngens, IntMatrix.from_cols(L[c], M.values[c].ngens) if L[c]
                           else IntMatrix.zero(M.values[c].ngens, 0)) for c in C.objects}
    Q = CModule(C, values, dict(M.action))
    return simplify(Q)[0]


def random_gproj_module(n, rng: random.Random, max_rank=6) -> CModule:
    """Random module with free values, built by iterated random extensions.

    Start from a characteristic module M and repeatedly replace M by a random
    extension of a characteristic module Y by M (see
    :func:`random_extension`), stopping before the total rank exceeds
    ``max_rank``.  Every module with free values is Gorenstein projective, so
    the result is a valid input for :func:`filtration`.
    """
    C = fk_category(n)
    M = char_module(n, _random_spec(n, rng))
    for _ in range(4 * max_rank):
        Y = char_module(n, _random_spec(n, rng))
        if M.total_rank() + Y.total_rank() > max_rank:
            continue
        M = random_extension(C, M, Y, rng)
    return M


def _random_spec(n, rng):
    a, b = rng.choice(fk_domain(n))
    b2 = rng.randint(b, a + n - 1)
    a2 = rng.randint(a, b)
    return G(a, b, a2, b2)


def random_extension(C, X, Y, rng, bound=2):
    """Pushout of 0 -> Ω -> F_0 -> Y -> 0 along a random map to X.

    A random map phi: F_1 -> X is accepted when it kills the image of F_2
    (so it factors through Ω); then E = (X ⊕ F_0) / {(-phi w, d w)} is an
    extension of Y by X.  Falls back to X ⊕ Y after a few failed draws.
    """
    from .modules import free_module, resolution, yoneda_map
    res = resolution(Y, 2, check=False)
    if not res.frees[1]:
        return direct_sum_modules([X, Y])
    d1 = res.diffs[0].realize()
    d2 = res.diffs[1].realize() if res.frees[2] else None
    for _ in range(8):
        elems = [[rng.randint(-bound, bound) for _ in range(X.values[c].ngens)] for c in res.frees[1]]
        phi = yoneda_map(X, res.frees[1], elems)
        if d2 is not None and not phi.compose(d2).is_zero():
            continue
        S = direct_sum_modules([X, free_module(C, res.frees[0])])
        comps = {}
        for c in C.objects:
            rows = [[-x for x in r] for r in phi.components[c].tolist()] + d1.components[c].tolist()
            comps[c] = IntMatrix.from_rows(rows, d1.components[c].cols) if rows \
                else IntMatrix.zero(0, d1.components[c].cols)
        E, _ = CModuleMap(d1.source, S, comps).cokernel()
        E = simplify(E)[0]
        if is_gproj(E) and E.total_rank() == X.total_rank() + Y.total_rank():
            return E
    return direct_sum_modules([X, Y])


# ---------------------------------------------------------------- triangles

@dataclass(frozen=True)
class TriangleInC:
    n: int
    a: int
    b: int
    b2: int

    def check(self):
        if not (self.a <= self.b < self.b2 <= self.a + self.n - 1):
            raise InputError(f"need a <= b < b' <= a+n-1, got {self}")

    def objects(self, periods=2):
        """Lifted points X_0 -> X_1 -> ... of the 6-periodic sequence."""
        n, a, b, b2 = self.n, self.a, self.b, self.b2
        pts = [(a, b), (a, b2), (b + 1, b2)]
        out = []
        for k in range(2 * periods + 1):
            out.extend(pts)
            pts = [fk_suspend(n, *p) for p in pts]
        return out[:6 * periods + 1]


def triangles(n):
    return [TriangleInC(n, a, b, b2) for a in range(1, n + 2)
            for b in range(a, a + n - 1) for b2 in range(b + 1, a + n)]


def _yoneda_image(n, p, q):
    C = fk_category(n)
    c, d = fk_label(n, *p), fk_label(n, *q)
    if fk_lift(n, p, q) != q:
        raise InternalInvariantViolation(f"{q} is not in the box of {p}")
    f = FreeMap(C, (c,), (d,), [[(1,)]]).realize()
    I, _ = f.image()
    return simplify(I)[0]


@dataclass
class TriangleImages:
    triangle: TriangleInC
    first: CModule
    second: CModule
    first_spec: CharModuleSpec
    second_spec: CharModuleSpec
    first_ok: bool
    second_ok: bool


def triangle_images(n, a, b, b2) -> TriangleImages:
    t = TriangleInC(n, a, b, b2)
    t.check()
    I1 = _yoneda_image(n, (a, b), (a, b2))
    I2 = _yoneda_image(n, (a, b2), (b + 1, b2))
    s1 = G(b2 - n + 1, a, a, b)
    s2 = G(b2 - n + 1, b + 1, a, b2)
    ok1 = is_isomorphic_rank_le_one(I1, char_module(n, s1))
    ok2 = is_isomorphic_rank_le_one(I2, char_module(n, s2))
    return TriangleImages(t, I1, I2, s1, s2, ok1, ok2)


def f_exact_check(M: CModule, t: TriangleInC, periods=2):
    """Exactness of M applied to the representable sequence of t.

    Returns ``(ok, junctions)``; M turns X_0 -> X_1 -> ... into
    M(X_last) -> ... -> M(X_0).
    """
    t.check()
    n = t.n
    if M.C is not fk_category(n) and _n_of(M.C) != n:
        raise InputError("module is over a different filtkk category")
    pts = t.objects(periods)
    maps = []
    for p, q in zip(pts, pts[1:]):
        if fk_lift(n, p, q) != q:
            raise InternalInvariantViolation(f"{q} is not in the box of {p}")
        c, d = fk_label(n, *p), fk_label(n, *q)
        maps.append(AbMap(M.values[d], M.values[c], M.act(c, d, 0)))
    maps.reverse()
    js = exactness_check(maps)
    return all(j.exact for j in js), js


# ---------------------------------------------------------------- sufficient family

@dataclass
class SequenceCheck:
    a: int
    b: int
    exact: bool
    split: bool
    failures: list


@dataclass
class FamilyReport:
    n: int
    triangles: list
    images: list            # list of TriangleImages
    sequences: list         # list of SequenceCheck
    witnesses: dict         # position -> list of steps
    ok: bool


def proof_sequence(n, a, b):
    """0 -> G^{a,a}_{a,b} -> G^{a,b}_{a,b} ⊕ G^{a,a}_{a,a+n-1} -> G^{a,b}_{a,a+n-1} -> 0."""
    C = fk_category(n)
    A = char_module(n, G(a, a, a, b))
    S = char_module(n, G(a, b, a, b))
    P = char_module(n, G(a, a, a, a + n - 1))
    B = direct_sum_modules([S, P])
    Q = char_module(n, G(a, b, a, a + n - 1))
    top = fk_label(n, a, b)
    f, g = {}, {}
    for c in C.objects:
        ra, rb, rq = A.values[c].ngens, B.values[c].ngens, Q.values[c].ngens
        if c == top:
            f[c] = IntMatrix.from_rows([[1], [1]], 1)        # x -> (x, x)
            g[c] = IntMatrix.from_rows([[-1, 1]], 2)         # (s, t) -> t - s
            continue
        # away from (a,b) only the G^{a,a}_{a,a+n-1} summand is present
        f[c] = IntMatrix.identity(1) if ra and rb else IntMatrix.zero(rb, ra)
        g[c] = IntMatrix.identity(1) if rb and rq else IntMatrix.zero(rq, rb)
    return CModuleMap(A, B, f), CModuleMap(B, Q, g)


def sufficient_family(n) -> FamilyReport:
    tris = triangles(n)
    images = [triangle_images(n, t.a, t.b, t.b2) for t in tris]
    reached = {}
    for a, b in fk_domain(n):
        reached[G(b - n + 1, a, a, b)] = [("representable", fk_label(n, a, b))]
    for im in images:
        t = im.triangle
        if im.first_ok:
            reached.setdefault(im.first_spec, [("image", "first", (t.a, t.b, t.b2))])
        if im.second_ok:
            reached.setdefault(im.second_spec, [("image", "second", (t.a, t.b, t.b2))])
    seqs = []
    for a in range(1, n + 2):
        for b in range(a + 1, a + n - 1):
            f, g = proof_sequence(n, a, b)
            bad = f.validate() + g.validate() + check_short_exact(f, g)
            _, _, split = extension_class(f, g)
            seqs.append(SequenceCheck(a, b, not bad, split, bad))
    # closure: an exact sequence with known ends makes the middle known; a
    # direct summand of something known is known
    changed = True
    while changed:
        changed = False
        for s in seqs:
            if not s.exact:
                continue
            a, b = s.a, s.b
            left, right = G(a, a, a, b), G(a, b, a, a + n - 1)
            sky = G(a, b, a, b)
            if left in reached and right in reached and sky not in reached:
                reached[sky] = [("extension", str(left), str(right)),
                                ("retract", str(sky), str(G(a, a, a, a + n - 1)))]
                changed = True
    witnesses = {}
    ok = all(im.first_ok and im.second_ok for im in images) and all(s.exact for s in seqs)
    for a, b in fk_domain(n):
        key = _reached_key(n, reached, a, b)
        if key is None:
            ok = False
            witnesses[(a, b)] = None
        else:
            witnesses[(a, b)] = reached[key]
    return FamilyReport(n, tris, images, seqs, witnesses, ok)


def _reached_key(n, reached, a, b):
    """The reached spec equal to the skyscraper at (a,b), up to periodicity."""
    for spec in reached:
        if spec.a == spec.a2 and spec.b == spec.b2 and fk_canon(n, spec.a, spec.b) == (a, b):
            return spec
    return None
