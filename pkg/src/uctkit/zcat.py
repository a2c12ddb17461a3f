"""Finite Z-linear categories given by Hom bases and structure constants.

``comp[(c, d, e)][i][j]`` is the coefficient vector (over the basis of
Hom(c, e)) of ``g_i ∘ f_j`` where ``f_j`` runs over the basis of Hom(c, d)
and ``g_i`` over the basis of Hom(d, e).  Missing keys mean a zero Hom.

A generator may carry a torsion order (``orders``); 0 means free.  Only the
pure periodic coefficient category uses nonzero orders.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import gcd
from typing import Optional

from .errors import InputError, NotComposable
from .lattice import FpAbGroup, IntMatrix


@dataclass(frozen=True)
class Suspension:
    """Automorphism Σ: object map plus, per pair (c, d), the matrix of
    Hom(c, d) -> Hom(Σc, Σd) on basis coefficients."""
    obj: dict
    mats: dict

    def __call__(self, c):
        return self.obj[c]


@dataclass(frozen=True)
class MorphismElt:
    source: str
    target: str
    coeffs: tuple


@dataclass(frozen=True, eq=False)
class ZCategory:
    name: str
    objects: tuple
    hom_basis: dict
    comp: dict
    identity: dict
    orders: dict = field(default_factory=dict)
    suspension: Optional[Suspension] = None
    info: dict = field(default_factory=dict)

    def basis(self, c, d):
        return self.hom_basis.get((c, d), ())

    def rank(self, c, d):
        return len(self.hom_basis.get((c, d), ()))

    def order(self, c, d, k):
        o = self.orders.get((c, d))
        return o[k] if o else 0

    def hom_orders(self, c, d):
        return self.orders.get((c, d)) or (0,) * self.rank(c, d)

    def is_free(self):
        return not any(any(o) for o in self.orders.values())

    def hom_group(self, c, d):
        return FpAbGroup.diagonal(list(self.hom_orders(c, d)))

    def check_object(self, c):
        if c not in self._objset:
            raise InputError(f"unknown object {c!r}")

    @property
    def _objset(self):
        s = self.__dict__.get("_objset_cache")
        if s is None:
            s = frozenset(self.objects)
            object.__setattr__(self, "_objset_cache", s)
        return s

    def index(self, c, d, name):
        try:
            return self.basis(c, d).index(name)
        except ValueError:
            raise InputError(f"no generator {name!r} in Hom({c}, {d})") from None

    def reduce(self, c, d, vec):
        o = self.orders.get((c, d))
        if not o:
            return tuple(vec)
        return tuple(x % m if m else x for x, m in zip(vec, o))

    def compose_basis(self, c, d, e, i, j):
        """Vector of (basis i of Hom(d,e)) ∘ (basis j of Hom(c,d))."""
        return self.comp[(c, d, e)][i][j]

    def compose_vec(self, c, d, e, gvec, fvec):
        out = [0] * self.rank(c, e)
        if not out:
            return tuple(out)
        table = self.comp.get((c, d, e))
        if table is None:
            return tuple(out)
        for i, gi in enumerate(gvec):
            if not gi:
                continue
            row = table[i]
            for j, fj in enumerate(fvec):
                if fj:
                    v = row[j]
                    s = gi * fj
                    for k, x in enumerate(v):
                        if x:
                            out[k] += s * x
        return self.reduce(c, e, out)

    def elt(self, c, d, name=None, coeffs=None):
        if name is not None:
            v = [0] * self.rank(c, d)
            v[self.index(c, d, name)] = 1
            return MorphismElt(c, d, tuple(v))
        return MorphismElt(c, d, self.reduce(c, d, coeffs))

    def id_elt(self, c):
        return self.elt(c, c, coeffs=self.unit_vector(c))

    def unit_vector(self, c):
        v = [0] * self.rank(c, c)
        v[self.identity[c]] = 1
        return tuple(v)

    def compose(self, g: MorphismElt, f: MorphismElt) -> MorphismElt:
        if f.target != g.source:
            raise NotComposable(f"cannot compose {g.source}->{g.target} after {f.source}->{f.target}")
        for m in (f, g):
            if len(m.coeffs) != self.rank(m.source, m.target):
                raise InputError("coefficient vector does not match the Hom basis")
        return MorphismElt(f.source, g.target, self.compose_vec(f.source, f.target, g.target, g.coeffs, f.coeffs))

    def suspend(self, f: MorphismElt) -> MorphismElt:
        S = self.suspension
        M = S.mats[(f.source, f.target)]
        return MorphismElt(S(f.source), S(f.target), self.reduce(S(f.source), S(f.target), M @ list(f.coeffs)))

    def nonzero_pairs(self):
        return [(c, d) for c in self.objects for d in self.objects if self.rank(c, d)]

    def out_targets(self, c):
        return [d for d in self.objects if self.rank(c, d)]

    def perturbed(self, c, d, e, i, j, k, delta=1):
        """Copy with one structure constant changed (for mutation tests)."""
        comp = dict(self.comp)
        table = [list(row) for row in comp[(c, d, e)]]
        v = list(table[i][j])
        v[k] += delta
        table[i][j] = tuple(v)
        comp[(c, d, e)] = table
        return replace(self, comp=comp)


@dataclass(frozen=True)
class Failure:
    kind: str
    detail: tuple

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def validate_category(C: ZCategory):
    """All failed unit/associativity/torsion/suspension instances."""
    out = []
    obj = C.objects
    for c in obj:
        if C.rank(c, c) == 0 or not (0 <= C.identity.get(c, -1) < C.rank(c, c)):
            out.append(Failure("missing identity", (c,)))
    if out:
        return out
    pairs = C.nonzero_pairs()
    out_by = {c: [d for d in obj if C.rank(c, d)] for c in obj}
    for (c, d) in pairs:
        r = C.rank(c, d)
        for j in range(r):
            e_j = tuple(1 if k == j else 0 for k in range(r))
            want = C.reduce(c, d, e_j)
            left = C.compose_vec(c, d, d, C.unit_vector(d), e_j)
            right = C.compose_vec(c, c, d, e_j, C.unit_vector(c))
            if left != want:
                out.append(Failure("left unit", (c, d, C.basis(c, d)[j])))
            if right != want:
                out.append(Failure("right unit", (c, d, C.basis(c, d)[j])))
    for (c, d) in pairs:
        for e in out_by[d]:
            table = C.comp.get((c, d, e))
            if table is None:
                out.append(Failure("missing composition table", (c, d, e)))
                continue
            oc, og = C.hom_orders(c, d), C.hom_orders(d, e)
            for i in range(C.rank(d, e)):
                for j in range(C.rank(c, d)):
                    v = table[i][j]
                    if len(v) != C.rank(c, e):
                        out.append(Failure("bad vector length", (c, d, e, i, j)))
                        continue
                    for m in (oc[j], og[i]):
                        if m and any(C.reduce(c, e, [m * x for x in v])):
                            out.append(Failure("torsion incompatible", (c, d, e, i, j)))
    if out:
        return out
    for (c, d) in pairs:
        rcd = C.rank(c, d)
        for e in out_by[d]:
            rde = C.rank(d, e)
            for f in out_by[e]:
                ref = C.rank(e, f)
                for h in range(ref):
                    hv = tuple(1 if k == h else 0 for k in range(ref))
                    for g in range(rde):
                        gv = tuple(1 if k == g else 0 for k in range(rde))
                        hg = C.compose_vec(d, e, f, hv, gv)
                        for j in range(rcd):
                            fv = tuple(1 if k == j else 0 for k in range(rcd))
                            lhs = C.compose_vec(c, d, f, hg, fv)
                            rhs = C.compose_vec(c, e, f, hv, C.compose_vec(c, d, e, gv, fv))
                            if lhs != rhs:
                                out.append(Failure("associativity",
                                                   (c, d, e, f, C.basis(e, f)[h], C.basis(d, e)[g],
                                                    C.basis(c, d)[j])))
    if C.suspension is not None:
        out.extend(_validate_functor(C, C.suspension.obj, C.suspension.mats, "suspension"))
    return out


def _validate_functor(C, omap, mats, label):
    out = []
    if sorted(omap.get(c, "") for c in C.objects) != sorted(C.objects):
        return [Failure(f"{label} not a bijection on objects", ())]
    for (c, d) in C.nonzero_pairs():
        Sc, Sd = omap[c], omap[d]
        M = mats.get((c, d))
        if M is None or M.shape != (C.rank(Sc, Sd), C.rank(c, d)):
            out.append(Failure(f"{label} matrix shape", (c, d)))
            continue
        if M.rows != M.cols or abs(M.det()) != 1:
            out.append(Failure(f"{label} not invertible on Hom", (c, d)))
    if out:
        return out

    def S(c, d, v):
        if (c, d) not in mats:
            return ()
        return C.reduce(omap[c], omap[d], mats[(c, d)] @ list(v))

    for c in C.objects:
        if S(c, c, C.unit_vector(c)) != C.unit_vector(omap[c]):
            out.append(Failure(f"{label} does not preserve identity", (c,)))
    for (c, d) in C.nonzero_pairs():
        for e in C.out_targets(d):
            rcd, rde = C.rank(c, d), C.rank(d, e)
            for i in range(rde):
                gv = tuple(1 if k == i else 0 for k in range(rde))
                for j in range(rcd):
                    fv = tuple(1 if k == j else 0 for k in range(rcd))
                    lhs = S(c, e, C.compose_vec(c, d, e, gv, fv))
                    rhs = C.compose_vec(omap[c], omap[d], omap[e], S(d, e, gv), S(c, d, fv))
                    if lhs != rhs:
                        out.append(Failure(f"{label} not multiplicative", (c, d, e, i, j)))
    return out


def build_category(name, objects, homs, compose_fn, identity, orders=None, suspension=None, info=None):
    """Assemble a ZCategory from basis lists and a function computing products.

    ``compose_fn(c, d, e, i, j)`` returns the vector of g_i ∘ f_j.
    """
    homs = {k: tuple(v) for k, v in homs.items() if v}
    comp = {}
    for c in objects:
        for d in objects:
            if (c, d) not in homs:
                continue
            for e in objects:
                if (d, e) not in homs or (c, e) not in homs:
                    continue
                comp[(c, d, e)] = [[tuple(compose_fn(c, d, e, i, j)) for j in range(len(homs[(c, d)]))]
                                   for i in range(len(homs[(d, e)]))]
    for c in objects:
        for d in objects:
            if (c, d) not in homs:
                continue
            for e in objects:
                if (d, e) in homs and (c, e) not in homs:
                    comp[(c, d, e)] = [[() for _ in homs[(c, d)]] for _ in homs[(d, e)]]
    C = ZCategory(name, tuple(objects), homs, comp, dict(identity), dict(orders or {}), suspension, dict(info or {}))
    if orders:
        reduced = {}
        for key, table in comp.items():
            c, _, e = key
            reduced[key] = [[C.reduce(c, e, v) for v in row] for row in table]
        object.__setattr__(C, "comp", reduced)
    return C


def identity_suspension(C: ZCategory, omap):
    """Suspension that keeps generator names (Hom(c,d) -> Hom(Σc,Σd) by name)."""
    mats = {}
    for (c, d) in C.nonzero_pairs():
        src = C.basis(c, d)
        tgt = C.basis(omap[c], omap[d])
        rows = [[1 if src[j] == tgt[i] else 0 for j in range(len(src))] for i in range(len(tgt))]
        mats[(c, d)] = IntMatrix.from_rows(rows, len(src))
    return Suspension(dict(omap), mats)


def with_suspension(C: ZCategory, S: Suspension):
    return replace(C, suspension=S)


# -------------------------------------------------------------- constructors

def groupoid_cat(table, labels=None, name="groupoid"):
    """One-object category Z[G] from a multiplication table ``table[g][h] = gh``."""
    n = len(table)
    if any(len(r) != n for r in table) or any(sorted(r) != list(range(n)) for r in table):
        raise InputError("not a group multiplication table")
    unit = [g for g in range(n) if all(table[g][h] == h for h in range(n))]
    if len(unit) != 1:
        raise InputError("multiplication table has no unique identity")
    labels = list(labels) if labels else [f"g{i}" for i in range(n)]
    obj = "*"

    def comp(c, d, e, i, j):
        v = [0] * n
        v[table[i][j]] = 1
        return v

    return build_category(name, [obj], {(obj, obj): labels}, comp, {obj: unit[0]},
                          info={"group_table": [list(r) for r in table]})


def cyclic_group_table(n):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def symmetric_group_table(k):
    from itertools import permutations
    perms = sorted(permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    # (g h)(x) = g(h(x))
    return [[index[tuple(g[h[x]] for x in range(k))] for h in perms] for g in perms]


def periodic_complex_cat(pi):
    """The category with objects c_0..c_{π-1}, arrows d_i: c_i -> c_{i-1} and d_{i-1} d_i = 0."""
    from .rewriting import Presentation, compile_presentation
    if pi < 1:
        raise InputError("period must be at least 1")
    verts = [f"c{i}" for i in range(pi)]
    arrows = {f"d{i}": (f"c{i}", f"c{(i - 1) % pi}") for i in range(pi)}
    rels = [{(f"d{i}", f"d{(i - 1) % pi}"): 1} for i in range(pi)]
    bounds = {}
    for i in range(pi):
        bounds[(verts[i], verts[i])] = bounds.get((verts[i], verts[i]), 0) + 1
        key = (verts[i], verts[(i - 1) % pi])
        bounds[key] = bounds.get(key, 0) + 1
    C = compile_presentation(Presentation(verts, arrows, rels), bounds, name=f"periodic_complex({pi})")
    omap = {f"c{i}": f"c{(i + 1) % pi}" for i in range(pi)}
    rename = {f"d{i}": f"d{(i + 1) % pi}" for i in range(pi)}
    return with_suspension(C, _renaming_functor(C, omap, rename))


def _renaming_functor(C, omap, arrow_map):
    """Functor induced by an arrow renaming on a compiled category (basis = words)."""
    words = C.info["words"]
    nf = C.info["normal_form"]
    mats = {}
    for (c, d) in C.nonzero_pairs():
        cols = []
        for w in words[(c, d)]:
            key, vec = nf(tuple(arrow_map[a] for a in w), omap[c])
            if key != (omap[c], omap[d]):
                raise InputError("renaming does not respect endpoints")
            cols.append(vec)
        mats[(c, d)] = IntMatrix.from_cols(cols, C.rank(omap[c], omap[d]))
    return Suspension(dict(omap), mats)


# ---------------------------------------------------- pure periodic category

def ppc_label(a, shift=0):
    base = "Z" if a == 0 else f"Z/{a}"
    return ("S" if shift % 2 else "") + base


def _k0(a, b):
    if a == 0 and b == 0:
        return 1
    return b // gcd(a, b)


def pure_periodic_cat(N):
    """Σ^i Z/a (i mod 2, a = 0 or 2 <= a <= N) inside the 2-periodic derived category.

    Generators: ``red_{a,b}`` in degree 0 sends 1 to b/(a,b) in Z/b;
    ``bock_{a,b}`` in Hom(Z/a, ΣZ/b) is the class of 1 in Ext(Z/a, Z/b) = Z/(a,b).
    Composites (multiplying representatives):

    * red_{b,c} ∘ red_{a,b} = (k(a,b) k(b,c) mod c) / k(a,c) · red_{a,c}, k(a,b) = b/(a,b)
    * red_{b,c} ∘ bock_{a,b} = k(b,c) · bock_{a,c}
    * bock_{a,b} ∘ red_{a',a} = (a' k(a',a) / a) · bock_{a',b}
    * bock ∘ bock = 0

    Σ keeps generator names, so Σ² = id.
    """
    if N < 0:
        raise InputError("torsion bound must be nonnegative")
    vals = [0] + list(range(2, N + 1))
    objects = [ppc_label(a, s) for s in (0, 1) for a in vals]
    key = {ppc_label(a, s): (a, s) for s in (0, 1) for a in vals}
    homs, orders, gens = {}, {}, {}
    for c in objects:
        a, s = key[c]
        for d in objects:
            b, t = key[d]
            if s == t:
                if a == 0:
                    order = b
                elif b == 0:
                    continue
                else:
                    order = gcd(a, b)
                kind = "red"
            else:
                if a == 0:
                    continue
                order = gcd(a, b) if b else a
                kind = "bock"
            if order == 1:
                continue
            homs[(c, d)] = [f"{kind}_{{{a},{b}}}"]
            orders[(c, d)] = (order,)
            gens[(c, d)] = (kind, a, b)

    def comp(c, d, e, i, j):
        k1, a, b = gens[(c, d)]
        k2, b2, cc = gens[(d, e)]
        k3, _, _ = gens[(c, e)]
        if k1 == "red" and k2 == "red":
            x = _k0(a, b) * _k0(b, cc)
            if cc:
                x %= cc
            v, rem = divmod(x, _k0(a, cc))
            if rem:
                raise AssertionError("composite is not a multiple of the generator")
        elif k1 == "bock" and k2 == "red":
            v = _k0(b, cc)
        elif k1 == "red" and k2 == "bock":
            v = (a * _k0(a, b)) // b
        else:
            v = 0
        return [v]

    ident = {c: 0 for c in objects}
    C = build_category(f"pure_periodic({N})", objects, homs, comp, ident, orders=orders,
                       info={"objects": {c: list(key[c]) for c in objects}})
    omap = {ppc_label(a, s): ppc_label(a, s + 1) for s in (0, 1) for a in vals}
    return with_suspension(C, identity_suspension(C, omap))


# ------------------------------------------------------ filtrated KK category

def fk_canon(n, a, b):
    """Representative of (a, b) with 1 <= a <= n+1 under (a,b) ~ (a+n+1, b+n+1)."""
    k = (a - 1) // (n + 1)
    return (a - k * (n + 1), b - k * (n + 1))


def fk_label(n, a, b):
    a, b = fk_canon(n, a, b)
    return f"A[{a},{b}]"


def fk_domain(n):
    return [(a, b) for a in range(1, n + 2) for b in range(a, a + n)]


def fk_in_box(n, src, tgt):
    a, b = src
    a2, b2 = tgt
    return a <= a2 <= b and b <= b2 <= a + n - 1


def fk_lift(n, src, tgt):
    """The lift of tgt lying in the box of src, or None."""
    a, b = src
    for k in range(-2, 3):
        t = (tgt[0] + k * (n + 1), tgt[1] + k * (n + 1))
        if fk_in_box(n, (a, b), t):
            return t
    return None


def fk_suspend(n, a, b):
    return (b + 1, a + n)


def fk_serre(n, a, b):
    return (b, a + n - 1)


def filtkk_cat(n):
    """Filtrated K-theory category for X = {1..n}: one rank-one Hom per box point."""
    if n < 1:
        raise InputError("n must be at least 1")
    dom = fk_domain(n)
    label = {p: fk_label(n, *p) for p in dom}
    homs = {}
    for p in dom:
        for q in dom:
            t = fk_lift(n, p, q)
            if t is not None:
                homs[(label[p], label[q])] = [f"alpha^{{{p[0]},{p[1]}}}_{{{t[0]},{t[1]}}}"]
    pos = {label[p]: p for p in dom}

    def comp(c, d, e, i, j):
        p = pos[c]
        mid = fk_lift(n, p, pos[d])
        end = fk_lift(n, mid, pos[e])
        return [1 if fk_in_box(n, p, end) else 0]

    C = build_category(f"filtkk({n})", [label[p] for p in dom], homs, comp, {label[p]: 0 for p in dom},
                       info={"n": n, "points": {label[p]: list(p) for p in dom}})
    omap = {label[p]: fk_label(n, *fk_suspend(n, *p)) for p in dom}
    mats = {}
    for (c, d) in C.nonzero_pairs():
        mats[(c, d)] = IntMatrix.identity(1)
    return with_suspension(C, Suspension(omap, mats))


# ---------------------------------------------------------- Köhler category

def koehler_presentation(p):
    """Quiver and relations ρ1–ρ5 (with their Σ-copies) for C(p)-equivariant KK.

    Arrow ``aij`` is the α from A_j to A_i (A_j -> A_i); the prefix ``S``
    marks the Σ-image.  Paths are written in travel order.
    """
    from .rewriting import Presentation
    V = ["A0", "A1", "A2", "SA0", "SA1", "SA2"]
    base = {
        "t0": ("A0", "A0"), "s1": ("A1", "A1"), "s2": ("A2", "A2"), "t2": ("A2", "A2"),
        "a10": ("A0", "A1"), "a01": ("A1", "A0"), "a20": ("A0", "A2"), "a02": ("A2", "A0"),
        "a12": ("A2", "SA1"), "a21": ("SA1", "A2"),
    }

    def S(x):
        return x[1:] if x.startswith("S") else "S" + x

    arrows = dict(base)
    for k, (s, t) in base.items():
        arrows[S(k)] = (S(s), S(t))

    def N(x, k=p):
        return {(x,) * i: 1 for i in range(k)}

    def one_minus(x, v):
        return {(): 1, (x,): -1}

    def rel(lhs, rhs_terms, vertex=None):
        r = {lhs: 1}
        for w, c in rhs_terms.items():
            r[w] = r.get(w, 0) - c
        return r

    rels = []
    zero_pairs = [("Sa10", "a21"), ("a12", "Sa01"), ("a21", "a02"), ("a20", "a12"), ("a02", "a10"),
                  ("a01", "a20")]
    for x, y in zero_pairs:
        rels.append(({(x, y): 1}, arrows[x][0]))
        rels.append(({(S(x), S(y)): 1}, arrows[S(x)][0]))
    for pre in ("", "S"):
        def A(x):
            return S(x) if pre else x
        rels.append((rel((A("a10"), A("a01")), N(A("t0"))), arrows[A("t0")][0]))
        rels.append((rel((A("a01"), A("a10")), N(A("s1"))), arrows[A("s1")][0]))
        rels.append((rel((A("a20"), A("a02")), one_minus(A("t0"), None)), arrows[A("t0")][0]))
        rels.append((rel((A("a02"), A("a20")), one_minus(A("t2"), None)), arrows[A("t2")][0]))
        # a21 goes from the Σ-copy of A1 into A2
        rels.append((rel((A("a21"), A("a12")), one_minus(S(A("s1")), None)), arrows[A("a21")][0]))
        rels.append((rel((A("a12"), A("a21")), one_minus(A("s2"), None)), arrows[A("a12")][0]))
        r5 = {}
        for w, c in list(N(A("t2")).items()) + list(N(A("s2")).items()):
            r5[w] = r5.get(w, 0) + c
        r5[()] = r5.get((), 0) - p
        rels.append((r5, arrows[A("t2")][0]))
    weights = {a: (p if "a" in a else 1) for a in arrows}
    return Presentation(V, arrows, rels, weights)


def koehler_rank_bounds(p):
    b = {}

    def both(x, y, r):
        b[(x, y)] = r
        b[("S" + x if not x.startswith("S") else x[1:], "S" + y if not y.startswith("S") else y[1:])] = r

    both("A0", "A0", p)
    both("A1", "A1", p)
    both("A2", "A2", 2 * (p - 1))
    both("A0", "A1", 1)
    both("A1", "A0", 1)
    for x, y in [("A0", "A2"), ("A2", "A0"), ("A1", "SA2"), ("SA2", "A1")]:
        both(x, y, p - 1)
    return b


def koehler_cat(p, degree_cap=None):
    """Köhler's presentation compiled by bounded rewriting; Σ swaps the S-prefix."""
    from .rewriting import compile_presentation
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise InputError("p must be prime")
    P = koehler_presentation(p)
    C = compile_presentation(P, koehler_rank_bounds(p), degree_cap=degree_cap, name=f"koehler({p})")

    def S(x):
        return x[1:] if x.startswith("S") else "S" + x

    return with_suspension(C, _renaming_functor(C, {v: S(v) for v in C.objects}, {a: S(a) for a in P.arrows}))
