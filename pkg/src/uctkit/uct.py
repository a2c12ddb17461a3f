"""π-periodic complexes of free abelian groups, stable Homs and the UCT sequence.

Indexing is cohomological: d^i: X^i -> X^{i+1 mod π}.  Suspension is
(ΣX)^i = X^{i+1} with differential -d.  A degree-i map X -> Y is a chain
map X -> Σ^i Y; stable Homs are chain maps modulo null-homotopic ones.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import gcd
from typing import Optional

from .errors import InputError, InternalInvariantViolation
from .lattice import (AbMap, FpAbGroup, IntMatrix, direct_sum, ext1_group, hermite_solve, hom_group, kernel_basis,
                      lattice_coords, subquotient)
from .modules import CModule, pdim_le, resolution, yoneda_map
from .zcat import ZCategory, pure_periodic_cat


# ------------------------------------------------------------ complexes

@dataclass
class PeriodicComplex:
    pi: int
    ranks: list
    diffs: list         # diffs[i]: ranks[i+1 mod pi] x ranks[i]

    def __post_init__(self):
        if self.pi < 1:
            raise InputError("period must be at least 1")
        if len(self.ranks) != self.pi or len(self.diffs) != self.pi:
            raise InputError("need one rank and one differential per degree")
        for i, d in enumerate(self.diffs):
            want = (self.ranks[(i + 1) % self.pi], self.ranks[i])
            if d.shape != want:
                raise InputError(f"d^{i} has shape {d.shape}, expected {want}")
        for i in range(self.pi):
            if not (self.d(i + 1) @ self.d(i)).is_zero():
                raise InputError(f"d^{(i + 1) % self.pi} d^{i} is not zero")

    def d(self, i):
        return self.diffs[i % self.pi]

    def rank(self, i):
        return self.ranks[i % self.pi]

    def shift(self, k=1):
        """Σ^k X."""
        sign = -1 if k % 2 else 1
        ranks = [self.rank(i + k) for i in range(self.pi)]
        diffs = [self.d(i + k).scale(sign) for i in range(self.pi)]
        return PeriodicComplex(self.pi, ranks, diffs)

    def is_zero(self):
        return not any(self.ranks)

    def to_json(self):
        from .jsonio import matrix_out
        return {"pi": self.pi, "ranks": list(self.ranks), "differentials": [matrix_out(d) for d in self.diffs]}

    @classmethod
    def from_json(cls, obj):
        from .jsonio import matrix_in
        try:
            pi = int(obj["pi"])
            ranks = [int(r) for r in obj["ranks"]]
            diffs = []
            for i, m in enumerate(obj["differentials"]):
                M = matrix_in(m)
                want = (ranks[(i + 1) % pi], ranks[i])
                if M.shape != want and (M.rows == 0 or M.cols == 0):
                    M = IntMatrix.zero(*want)
                diffs.append(M)
        except (KeyError, TypeError, ValueError, IndexError) as e:
            raise InputError(f"malformed complex: {e}") from None
        return cls(pi, ranks, diffs)


def zero_complex(pi):
    return PeriodicComplex(pi, [0] * pi, [IntMatrix.zero(0, 0)] * pi)


def unit_complex(pi, degree=0):
    """Z concentrated in one degree."""
    ranks = [1 if i == degree % pi else 0 for i in range(pi)]
    diffs = [IntMatrix.zero(ranks[(i + 1) % pi], ranks[i]) for i in range(pi)]
    if pi == 1:
        diffs = [IntMatrix.zero(1, 1)]
    return PeriodicComplex(pi, ranks, diffs)


def moore_complex(pi, m, degree=0):
    """Homology Z/m in ``degree``: Z in degrees degree-1 and degree, d = m between them."""
    if pi == 1:
        return PeriodicComplex(1, [2], [IntMatrix.from_rows([[0, m], [0, 0]], 2)])
    lo, hi = (degree - 1) % pi, degree % pi
    ranks = [0] * pi
    ranks[lo] = ranks[hi] = 1
    diffs = [IntMatrix.zero(ranks[(i + 1) % pi], ranks[i]) for i in range(pi)]
    diffs[lo] = IntMatrix.from_rows([[m]], 1)
    return PeriodicComplex(pi, ranks, diffs)


def direct_sum_complexes(parts):
    pi = parts[0].pi
    ranks = [sum(p.rank(i) for p in parts) for i in range(pi)]
    diffs = []
    for i in range(pi):
        off_r, off_c = 0, 0
        nr, nc = ranks[(i + 1) % pi], ranks[i]
        M = [[0] * nc for _ in range(nr)]
        for p in parts:
            D = p.d(i)
            for r in range(D.rows):
                for c in range(D.cols):
                    M[off_r + r][off_c + c] = D[r, c]
            off_r += p.rank(i + 1)
            off_c += p.rank(i)
        diffs.append(IntMatrix.from_rows(M, nc) if nr else IntMatrix.zero(0, nc))
    return PeriodicComplex(pi, ranks, diffs)


def conjugate(X: PeriodicComplex, P):
    """The isomorphic complex P^{i+1} d^i (P^i)^{-1}; P[i] unimodular, given with inverses as pairs."""
    diffs = []
    for i in range(X.pi):
        Pn, _ = P[(i + 1) % X.pi]
        _, Qi = P[i]
        diffs.append(Pn @ X.d(i) @ Qi)
    return PeriodicComplex(X.pi, list(X.ranks), diffs)


def _random_unimodular(rng, n, steps=2):
    P, Q = IntMatrix.identity(n), IntMatrix.identity(n)
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        k = rng.choice((-1, 1))
        E = [[int(r == c) for c in range(n)] for r in range(n)]
        Ei = [[int(r == c) for c in range(n)] for r in range(n)]
        E[i][j], Ei[i][j] = k, -k
        P = IntMatrix.from_rows(E, n) @ P
        Q = Q @ IntMatrix.from_rows(Ei, n)
    return P, Q


def random_complex(rng: random.Random, pi=2, max_rank=4, bound=6, max_torsion=None):
    """Random π-periodic complex of free groups, ranks <= max_rank, entries <= bound.

    Built as a sum of elementary pieces (Z in one degree, Moore pieces Z -m-> Z,
    contractible Z -1-> Z) conjugated by small unimodular changes of basis;
    over Z every such complex has this shape, so nothing is excluded in kind.
    """
    top = max_torsion or bound
    for _ in range(100):
        parts = []
        ranks = [0] * pi
        for _ in range(rng.randint(0, 2 * max_rank)):
            i = rng.randrange(pi)
            kind = rng.random()
            if kind < 0.3:
                piece = unit_complex(pi, i)
            else:
                m = 1 if kind < 0.45 else rng.randint(0, top)
                piece = moore_complex(pi, m, i)
            new = [r + piece.rank(k) for k, r in enumerate(ranks)]
            if max(new) > max_rank:
                continue
            ranks = new
            parts.append(piece)
        if not parts:
            return zero_complex(pi)
        X = direct_sum_complexes(parts)
        P = [_random_unimodular(rng, X.rank(i)) for i in range(pi)]
        Y = conjugate(X, P)
        if all(abs(x) <= bound for d in Y.diffs for r in d.tolist() for x in r):
            return Y
    return X


# ------------------------------------------------------------ homology

@dataclass
class GradedGroup:
    groups: list            # groups[i] presented on the cycle basis
    cycles: list            # cycles[i] = basis of ker d^i

    def invariants(self):
        return [G.invariants() for G in self.groups]

    def coords(self, i, z):
        """Presentation coordinates of a cycle of degree i."""
        c = lattice_coords(self.cycles[i], list(z))
        if c is None:
            raise InputError("not a cycle")
        return c


def homology(X: PeriodicComplex) -> GradedGroup:
    groups, cycles = [], []
    for i in range(X.pi):
        r = X.rank(i)
        Z = kernel_basis(X.d(i)) if r else []
        B = X.d(i - 1).columns() if X.rank(i - 1) and r else []
        G, basis = subquotient(Z, [b for b in B if any(b)], r)
        groups.append(G)
        cycles.append(basis)
    return GradedGroup(groups, cycles)


# ------------------------------------------------------------ stable Hom

@dataclass
class ChainMap:
    source: PeriodicComplex
    target: PeriodicComplex     # already shifted: a chain map source -> target
    mats: list

    def is_chain_map(self):
        X, Y = self.source, self.target
        return all((Y.d(k) @ self.mats[k] - self.mats[(k + 1) % X.pi] @ X.d(k)).is_zero() for k in range(X.pi))


def _layout(X, Yp):
    out, off = [], 0
    for k in range(X.pi):
        out.append((off, Yp.rank(k), X.rank(k)))
        off += Yp.rank(k) * X.rank(k)
    return out, off


def _unflatten(v, X, Yp):
    lay, _ = _layout(X, Yp)
    mats = []
    for off, r, c in lay:
        rows = [list(v[off + i * c: off + (i + 1) * c]) for i in range(r)]
        mats.append(IntMatrix.from_rows(rows, c) if r else IntMatrix.zero(0, c))
    return mats


def _flatten(mats):
    out = []
    for M in mats:
        for row in M.tolist():
            out.extend(row)
    return out


def _operator_matrix(fn, n_in, n_out):
    cols = []
    for j in range(n_in):
        e = [0] * n_in
        e[j] = 1
        cols.append(fn(e))
    return IntMatrix.from_cols(cols, n_out) if cols else IntMatrix.zero(n_out, 0)


class StableHom(FpAbGroup):
    """Chain maps X -> Σ^i Y modulo homotopy.

    Presented on a basis of the chain-map lattice with the homotopy lattice
    as relations; :meth:`coords_of` gives canonical coordinates.
    """

    def __init__(self, X: PeriodicComplex, Y: PeriodicComplex, degree=0):
        if X.pi != Y.pi:
            raise InputError("complexes have different periods")
        self.X, self.Y, self.degree = X, Y, degree
        Yp = Y.shift(degree)
        self.Yp = Yp
        pi = X.pi
        lay, N = _layout(X, Yp)
        n_eq = sum(Yp.rank(k + 1) * X.rank(k) for k in range(pi))

        def commutator(v):
            f = _unflatten(v, X, Yp)
            out = []
            for k in range(pi):
                out.extend(_flatten([Yp.d(k) @ f[k] - f[(k + 1) % pi] @ X.d(k)]))
            return out

        E = _operator_matrix(commutator, N, n_eq)
        Z = kernel_basis(E) if N else []
        # homotopies h^k: X^k -> Yp^{k-1}
        hl = [(Yp.rank(k - 1), X.rank(k)) for k in range(pi)]
        NH = sum(r * c for r, c in hl)

        def boundary(v):
            hs, off = [], 0
            for r, c in hl:
                rows = [list(v[off + i * c: off + (i + 1) * c]) for i in range(r)]
                hs.append(IntMatrix.from_rows(rows, c) if r else IntMatrix.zero(0, c))
                off += r * c
            f = [Yp.d(k - 1) @ hs[k] + hs[(k + 1) % pi] @ X.d(k) for k in range(pi)]
            return _flatten(f)

        H = _operator_matrix(boundary, NH, N)
        G, basis = subquotient(Z, [h for h in H.columns() if any(h)], N)
        self.basis = basis
        super().__init__(G.ngens, G.rels)

    def chain_map(self, v):
        """Chain map for presentation coordinates v."""
        flat = [0] * sum(Yr * Xr for _, Yr, Xr in _layout(self.X, self.Yp)[0])
        for c, b in zip(v, self.basis):
            if c:
                flat = [x + c * y for x, y in zip(flat, b)]
        return ChainMap(self.X, self.Yp, _unflatten(flat, self.X, self.Yp))

    def generators(self):
        return [self.chain_map(g) for g in self.gen_vectors()]

    def presentation_coords(self, f: ChainMap):
        c = lattice_coords(self.basis, _flatten(f.mats))
        if c is None:
            raise InputError("not a chain map between these complexes")
        return c

    def coords_of(self, f: ChainMap):
        return self.coords(self.presentation_coords(f))


def stable_hom(X, Y, degree=0) -> StableHom:
    return StableHom(X, Y, degree)


def compose(g: ChainMap, f: ChainMap, shift_g=0) -> ChainMap:
    """g ∘ f where g is a map out of f.target up to ``shift_g`` suspensions of its source."""
    pi = f.source.pi
    mats = [g.mats[(k + shift_g) % pi] @ f.mats[k] for k in range(pi)]
    tgt = g.target.shift(shift_g)
    return ChainMap(f.source, tgt, mats)


def identity_map(X):
    return ChainMap(X, X, [IntMatrix.identity(X.rank(k)) for k in range(X.pi)])


def induced_on_homology(f: ChainMap, HX: GradedGroup, HY: GradedGroup):
    """Maps H^i(f): H^i X -> H^i(target) as AbMaps."""
    out = []
    for i in range(f.source.pi):
        cols = [HY.coords(i, f.mats[i] @ list(z)) for z in HX.cycles[i]]
        n = HY.groups[i].ngens
        M = IntMatrix.from_cols(cols, n) if cols else IntMatrix.zero(n, 0)
        out.append(AbMap(HX.groups[i], HY.groups[i], M))
    return out


# ------------------------------------------------------------ restricted Yoneda

def _object_key(C: ZCategory, c):
    a, s = C.info["objects"][c]
    return int(a), int(s)


def realize_object(a, s=0):
    """The 2-periodic complex of Σ^s Z/a (a = 0 gives Z)."""
    X = unit_complex(2, 0) if a == 0 else moore_complex(2, a, 0)
    return X.shift(s) if s % 2 else X


def realize_generator(C: ZCategory, c, d) -> ChainMap:
    """Chain-map representative of the basis generator of Hom(c, d) in pure_periodic_cat."""
    (a, s), (b, t) = _object_key(C, c), _object_key(C, d)
    X, Y = realize_object(a, 0), realize_object(b, 0)
    if s == t:
        # red_{a,b}: 1 -> b/(a,b) in degree 0, forced in degree 1
        g = gcd(a, b)
        f0 = b // g if b else 1
        m0 = IntMatrix.from_rows([[f0]], 1)
        m1 = IntMatrix.from_rows([[a // g]], 1) if a and b else IntMatrix.zero(Y.rank(1), X.rank(1))
        base = ChainMap(X, Y, [m0, m1])
    else:
        # bock_{a,b}: Z/a -> ΣZ/b, zero in degree 0, 1 in degree 1
        SY = Y.shift(1)
        m0 = IntMatrix.zero(SY.rank(0), X.rank(0))
        m1 = IntMatrix.from_rows([[1]], 1)
        base = ChainMap(X, SY, [m0, m1])
    if s % 2:
        return ChainMap(base.source.shift(1), base.target.shift(1), [base.mats[1], base.mats[0]])
    return base


def torsion_bound(X: PeriodicComplex):
    top = 2
    for G in homology(X).groups:
        for d in G.torsion:
            top = max(top, d)
    return top


def restricted_yoneda(X: PeriodicComplex, C: Optional[ZCategory] = None) -> CModule:
    """The module c -> Hom(c, X) over pure_periodic_cat."""
    if X.pi != 2:
        raise InputError("restricted Yoneda is defined for 2-periodic complexes")
    C = C or pure_periodic_cat(torsion_bound(X))
    S = {c: stable_hom(realize_object(*_object_key(C, c)), X, 0) for c in C.objects}
    values = {c: S[c].canonical() for c in C.objects}
    gens = {c: S[c].generators() for c in C.objects}
    action = {}
    for (c, d) in C.nonzero_pairs():
        if not values[c].ngens or not values[d].ngens:
            continue
        phi = realize_generator(C, c, d)
        cols = []
        for g in gens[d]:
            cols.append(S[c].coords_of(compose(g, phi)))
        action[(c, d, 0)] = IntMatrix.from_cols(cols, values[c].ngens)
    M = CModule(C, values, action, name="h(X)")
    M.stable_homs = S
    return M


def yoneda_comparison(C: ZCategory, d):
    """The map representable(d) -> restricted_yoneda(realization of d) hitting the identity."""
    X = realize_object(*_object_key(C, d))
    M = restricted_yoneda(X, C)
    ident = M.stable_homs[d].coords_of(identity_map(X))
    F = yoneda_map(M, (d,), [ident])
    return M, F


# ------------------------------------------------------------ UCT

@dataclass
class UCTReport:
    ext_term: FpAbGroup
    middle_term: FpAbGroup
    hom_term: FpAbGroup
    h_matrix: IntMatrix             # middle (canonical) -> hom (canonical)
    surjective: bool
    kernel: FpAbGroup
    kernel_matches_ext: bool
    xi_matrix: Optional[IntMatrix] = None
    xi_bijective: Optional[bool] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def exact(self):
        ok = self.surjective and self.kernel_matches_ext
        if self.xi_bijective is not None:
            ok = ok and self.xi_bijective
        return ok

    def to_json(self):
        from .jsonio import group_out, matrix_out
        out = {"ext_term": group_out(self.ext_term), "middle_term": group_out(self.middle_term),
               "hom_term": group_out(self.hom_term), "h": matrix_out(self.h_matrix),
               "surjective": self.surjective, "kernel": group_out(self.kernel),
               "kernel_matches_ext": self.kernel_matches_ext, "exact": self.exact}
        if self.xi_matrix is not None:
            out["xi"] = matrix_out(self.xi_matrix)
            out["xi_bijective"] = self.xi_bijective
        return out


def _cone(f: ChainMap):
    """Cone^i = X^{i+1} ⊕ Y^i with d = [[-d_X, 0], [f, d_Y]]."""
    X, Y = f.source, f.target
    pi = X.pi
    ranks = [X.rank(i + 1) + Y.rank(i) for i in range(pi)]
    diffs = []
    for i in range(pi):
        nr, nc = ranks[(i + 1) % pi], ranks[i]
        M = [[0] * nc for _ in range(nr)]
        A, F, B = X.d(i + 1), f.mats[(i + 1) % pi], Y.d(i)
        xr, xc = X.rank(i + 2), X.rank(i + 1)
        for r in range(A.rows):
            for c in range(A.cols):
                M[r][c] = -A[r, c]
        for r in range(F.rows):
            for c in range(F.cols):
                M[xr + r][c] = F[r, c]
        for r in range(B.rows):
            for c in range(B.cols):
                M[xr + r][xc + c] = B[r, c]
        diffs.append(IntMatrix.from_rows(M, nc) if nr else IntMatrix.zero(0, nc))
    return PeriodicComplex(pi, ranks, diffs)


def _solve(A: IntMatrix, b):
    if not any(b):
        return [0] * A.cols
    s = hermite_solve(A, b)
    if s.x is None:
        raise InternalInvariantViolation("expected a boundary")
    return list(s.x)


def xi_class(f: ChainMap, HX: GradedGroup, HY: GradedGroup, exts):
    """Ext class of 0 -> H*Y -> H*Cone(f) -> H*ΣX -> 0 for f with H*(f) = 0.

    ``exts[i]`` is Ext^1(H^{i+1}X, H^iY); returns concatenated canonical coordinates.
    """
    X, Y = f.source, f.target
    pi = X.pi
    out = []
    for i in range(pi):
        Gx = HX.groups[(i + 1) % pi]
        zs = HX.cycles[(i + 1) % pi]
        F = f.mats[(i + 1) % pi]
        # lift each generator z_j of H^{i+1}X to a cone cycle (z_j, y_j)
        ys = []
        for z in zs:
            ys.append(_solve(Y.d(i), [-x for x in F @ list(z)]) if Y.rank(i) else [])
        values = []
        for col in Gx.rels.columns():
            zsum = [0] * X.rank(i + 1)
            ysum = [0] * Y.rank(i)
            for r, z, y in zip(col, zs, ys):
                if r:
                    zsum = [a + r * b for a, b in zip(zsum, z)]
                    ysum = [a + r * b for a, b in zip(ysum, y)]
            w = _solve(X.d(i), zsum) if X.rank(i) else []
            cyc = [a + b for a, b in zip(ysum, f.mats[i] @ w)] if w else ysum
            values.append(HY.coords(i, cyc) if Y.rank(i) else [])
        if exts[i].ngens:
            out.extend(exts[i].class_of(values))
    return out


def uct_sequence(X: PeriodicComplex, Y: PeriodicComplex, explicit_xi=False) -> UCTReport:
    if X.pi != Y.pi:
        raise InputError("complexes have different periods")
    pi = X.pi
    HX, HY = homology(X), homology(Y)
    homs = [hom_group(HX.groups[i], HY.groups[i]) for i in range(pi)]
    exts = [ext1_group(HX.groups[(i + 1) % pi], HY.groups[i]) for i in range(pi)]
    hom_term = direct_sum([H.canonical() for H in homs])
    ext_term = direct_sum([E.canonical() for E in exts])
    S = stable_hom(X, Y, 0)
    middle = S.canonical()
    cols = []
    for g in S.generators():
        v = []
        for H, m in zip(homs, induced_on_homology(g, HX, HY)):
            v.extend(H.coords(m))
        cols.append(v)
    Hm = IntMatrix.from_cols(cols, hom_term.ngens) if cols else IntMatrix.zero(hom_term.ngens, 0)
    h = AbMap(middle, hom_term, Hm)
    surj = h.is_surjective()
    K, incl = h.kernel()
    report = UCTReport(ext_term, middle, hom_term, Hm, surj, K, K.invariants() == ext_term.invariants())
    if explicit_xi:
        xcols = []
        for kv in incl.matrix.columns():
            f = S.chain_map(S.from_canonical @ list(kv))
            xcols.append(xi_class(f, HX, HY, exts))
        Xm = IntMatrix.from_cols(xcols, ext_term.ngens) if xcols else IntMatrix.zero(ext_term.ngens, 0)
        xi = AbMap(K, ext_term, Xm)
        report.xi_matrix = Xm
        report.xi_bijective = xi.is_well_defined() and xi.is_isomorphism()
    return report


def dichotomy_probe(X: PeriodicComplex, k=1, C: Optional[ZCategory] = None):
    """pdim_le(restricted_yoneda(X), k) with the syzygy-rank profile."""
    M = restricted_yoneda(X, C)
    res = resolution(M, k + 2, check=False)
    ok = pdim_le(M, k, res=res)
    return {"pdim_le": ok, "k": k, "ranks": res.ranks(), "module_rank": M.total_rank()}
