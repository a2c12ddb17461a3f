"""Exact integer linear algebra and finitely presented abelian groups.

Everything here works over Python integers, so there is no overflow.
A group ``FpAbGroup(g, R)`` is Z^g modulo the span of the columns of R.

>>> G = FpAbGroup(2, IntMatrix.from_rows([[2, 4], [6, 8]]))
>>> G.invariants()
(0, (2, 4))
>>> hom_group(FpAbGroup.cyclic(4), FpAbGroup.cyclic(6)).invariants()
(0, (2,))
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Optional, Sequence

from .errors import DimensionMismatch, InternalInvariantViolation, InputError, NonzeroComposite, NotComposable


def identity_rows(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul_rows(A, B, inner=None, ncols=None):
    if inner is None:
        inner = len(B)
    if ncols is None:
        ncols = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [0] * ncols
        for k in range(inner):
            a = row[k]
            if a:
                bk = B[k]
                for j in range(ncols):
                    if bk[j]:
                        acc[j] += a * bk[j]
        out.append(acc)
    return out


def transpose_rows(A, ncols=None):
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*A)]


class IntMatrix:
    """Immutable integer matrix stored row-major."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, rows: int, cols: int, entries: Sequence[int]):
        entries = tuple(int(x) for x in entries)
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise DimensionMismatch(f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self.entries = entries
        self._hash = None

    @classmethod
    def from_rows(cls, rows, ncols=None):
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch("ragged rows")
        return cls(len(rows), ncols, [x for r in rows for x in r])

    @classmethod
    def from_cols(cls, cols, nrows):
        return cls.from_rows(transpose_rows(list(cols), nrows), len(cols))

    @classmethod
    def identity(cls, n):
        return cls.from_rows(identity_rows(n), n)

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols, [0] * (rows * cols))

    def tolist(self):
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def row(self, i):
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def col(self, j):
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def columns(self):
        return [self.col(j) for j in range(self.cols)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def T(self):
        return IntMatrix.from_rows(transpose_rows(self.tolist(), self.cols), self.rows)

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
            return IntMatrix.from_rows(matmul_rows(self.tolist(), other.tolist(), self.cols, other.cols), other.cols)
        v = list(other)
        if len(v) != self.cols:
            raise DimensionMismatch("vector length does not match matrix")
        return [sum(a * b for a, b in zip(r, v)) for r in self.tolist()]

    def __add__(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in sum")
        return IntMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in difference")
        return IntMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return IntMatrix(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, k):
        return IntMatrix(self.rows, self.cols, [k * a for a in self.entries])

    def is_zero(self):
        return not any(self.entries)

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r})" if self.rows else f"IntMatrix.zero(0, {self.cols})"

    def det(self):
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        return determinant(self.tolist())


def hstack(mats, nrows):
    rows = [[] for _ in range(nrows)]
    for m in mats:
        if m.rows != nrows:
            raise DimensionMismatch("hstack row mismatch")
        for i, r in enumerate(m.tolist()):
            rows[i].extend(r)
    return IntMatrix.from_rows(rows, sum(m.cols for m in mats))


def block_diag(mats):
    nr = sum(m.rows for m in mats)
    nc = sum(m.cols for m in mats)
    rows = []
    off = 0
    for m in mats:
        for r in m.tolist():
            rows.append([0] * off + r + [0] * (nc - off - m.cols))
        off += m.cols
    return IntMatrix.from_rows(rows, nc) if nr else IntMatrix.zero(0, nc)


def determinant(A):
    """Bareiss fraction-free determinant of a square list-of-rows matrix."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def _qround(a, b):
    """Quotient q with |a - q*b| <= |b|/2."""
    q, r = divmod(a, b)
    if 2 * abs(r) > abs(b):
        q += 1
    return q


# ---------------------------------------------------------------- Smith form

@dataclass(frozen=True)
class SmithForm:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self):
        return [self.D[i, i] for i in range(min(self.D.rows, self.D.cols))]

    @property
    def rank(self):
        return sum(1 for d in self.diagonal if d)


def _snf_lists(A, m, n):
    D = [list(r) for r in A]
    U = identity_rows(m)
    V = identity_rows(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        rd, rs = D[dst], D[src]
        for k in range(n):
            if rs[k]:
                rd[k] -= q * rs[k]
        ud, us = U[dst], U[src]
        for k in range(m):
            if us[k]:
                ud[k] -= q * us[k]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for r in D:
            if r[src]:
                r[dst] -= q * r[src]
        for r in V:
            if r[src]:
                r[dst] -= q * r[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            clean = True
            p = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, _qround(D[i][t], p))
                    if D[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, _qround(D[t][j], p))
                    if D[t][j]:
                        clean = False
            if not clean:
                best = None
                for i in range(t, m):
                    if D[i][t] and (best is None or abs(D[i][t]) < best[0]):
                        best = (abs(D[i][t]), i, t)
                for j in range(t + 1, n):
                    if D[t][j] and abs(D[t][j]) < best[0]:
                        best = (abs(D[t][j]), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, -1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


def smith_normal_form(A: IntMatrix) -> SmithForm:
    """Smith form with transforms: ``U @ A @ V == D``.

    Pivots are chosen by smallest absolute value, ties broken by lowest row
    then lowest column, so the transforms are reproducible.
    """
    U, D, V = _snf_lists(A.tolist(), A.rows, A.cols)
    return SmithForm(IntMatrix.from_rows(U, A.rows), IntMatrix.from_rows(D, A.cols), IntMatrix.from_rows(V, A.cols))


# -------------------------------------------------------------- Hermite form

def hnf_rows(A, ncols, transform=False):
    """Row Hermite normal form of a list-of-rows matrix.

    Returns ``(H, T, rank)`` with ``H = T A``; the first ``rank`` rows of H
    are nonzero with increasing pivots, positive pivot entries and entries
    above each pivot reduced into ``[0, pivot)``.  T is None unless requested.
    """
    H = [list(r) for r in A]
    m = len(H)
    T = identity_rows(m) if transform else None
    r = 0
    for j in range(ncols):
        if r == m:
            break
        while True:
            piv = None
            for i in range(r, m):
                x = H[i][j]
                if x and (piv is None or abs(x) < abs(H[piv][j])):
                    piv = i
            if piv is None:
                break
            if piv != r:
                H[r], H[piv] = H[piv], H[r]
                if T is not None:
                    T[r], T[piv] = T[piv], T[r]
            p = H[r][j]
            done = True
            hr = H[r]
            for i in range(r + 1, m):
                if H[i][j]:
                    q = _qround(H[i][j], p)
                    hi = H[i]
                    for k in range(j, ncols):
                        if hr[k]:
                            hi[k] -= q * hr[k]
                    if T is not None:
                        ti, tr = T[i], T[r]
                        for k in range(m):
                            if tr[k]:
                                ti[k] -= q * tr[k]
                    if hi[j]:
                        done = False
            if done:
                break
        if H[r][j] == 0:
            continue
        if H[r][j] < 0:
            H[r] = [-x for x in H[r]]
            if T is not None:
                T[r] = [-x for x in T[r]]
        p = H[r][j]
        hr = H[r]
        for i in range(r):
            q = H[i][j] // p
            if q:
                hi = H[i]
                for k in range(j, ncols):
                    if hr[k]:
                        hi[k] -= q * hr[k]
                if T is not None:
                    ti, tr = T[i], T[r]
                    for k in range(m):
                        if tr[k]:
                            ti[k] -= q * tr[k]
        r += 1
    return H, T, r


def lattice_basis(vectors, dim):
    """Canonical (Hermite) basis of the lattice spanned by ``vectors`` in Z^dim."""
    vecs = [list(v) for v in vectors if any(v)]
    if not vecs:
        return []
    H, _, r = hnf_rows(vecs, dim)
    return H[:r]


def _pivots(basis):
    out = []
    for row in basis:
        out.append(next(j for j, x in enumerate(row) if x))
    return out


def lattice_coords(basis, v):
    """Coordinates of v in a Hermite basis, or None when v is not in the lattice."""
    w = list(v)
    coeffs = []
    for row in basis:
        j = next(k for k, x in enumerate(row) if x)
        q, rem = divmod(w[j], row[j])
        if rem:
            return None
        coeffs.append(q)
        if q:
            for k in range(j, len(w)):
                if row[k]:
                    w[k] -= q * row[k]
    if any(w):
        return None
    return coeffs


def lattice_contains(basis, v):
    return lattice_coords(basis, v) is not None


def same_lattice(vs, ws, dim):
    return lattice_basis(vs, dim) == lattice_basis(ws, dim)


def kernel_basis(A: IntMatrix):
    """Hermite basis (as a list of vectors) of the integer kernel of A."""
    if A.cols == 0:
        return []
    At = transpose_rows(A.tolist(), A.cols) if A.rows else [[] for _ in range(A.cols)]
    H, T, r = hnf_rows(At, A.rows, transform=True)
    return lattice_basis(T[r:], A.cols)


def reduce_mod_lattice(v, basis):
    """Symmetric reduction of v against a Hermite basis."""
    w = list(v)
    for row in basis:
        j = next(k for k, x in enumerate(row) if x)
        q = _qround(w[j], row[j])
        if q:
            w = [a - q * b for a, b in zip(w, row)]
    return w


@dataclass(frozen=True)
class Solution:
    x: Optional[list]
    kernel: list

    @property
    def solvable(self):
        return self.x is not None


def hermite_solve(A: IntMatrix, b) -> Solution:
    """One integer solution of ``A x = b`` (or None) plus a kernel basis."""
    b = [int(x) for x in b]
    if len(b) != A.rows:
        raise DimensionMismatch(f"right-hand side has length {len(b)}, expected {A.rows}")
    sf = smith_normal_form(A)
    d = sf.diagonal
    Ub = sf.U @ b
    y = [0] * A.cols
    for i, ub in enumerate(Ub):
        di = d[i] if i < len(d) else 0
        if di == 0:
            if ub:
                return Solution(None, kernel_basis(A))
        else:
            if ub % di:
                return Solution(None, kernel_basis(A))
            y[i] = ub // di
    x = sf.V @ y
    ker = kernel_basis(A)
    return Solution(reduce_mod_lattice(x, ker), ker)


# ------------------------------------------------------------------ groups

class FpAbGroup:
    """Finitely presented abelian group Z^ngens / (columns of rels)."""

    def __init__(self, ngens: int, rels: Optional[IntMatrix] = None):
        if rels is None:
            rels = IntMatrix.zero(ngens, 0)
        if rels.rows != ngens:
            raise DimensionMismatch(f"relation matrix has {rels.rows} rows for {ngens} generators")
        self.ngens = ngens
        self.rels = rels

    @classmethod
    def free(cls, n):
        return cls(n)

    @classmethod
    def cyclic(cls, m):
        return cls(1, IntMatrix(1, 1, [m]))

    @classmethod
    def from_invariants(cls, free_rank, torsion=()):
        orders = list(torsion) + [0] * free_rank
        return cls.diagonal(orders)

    @classmethod
    def diagonal(cls, orders):
        n = len(orders)
        cols = [[orders[i] if k == i else 0 for k in range(n)] for i in range(n) if orders[i]]
        return cls(n, IntMatrix.from_cols(cols, n))

    @classmethod
    def from_relators(cls, ngens, relators):
        return cls(ngens, IntMatrix.from_cols([list(r) for r in relators], ngens))

    @cached_property
    def _smith(self):
        U, D, V = _snf_lists(self.rels.tolist(), self.ngens, self.rels.cols)
        diag = [D[i][i] if i < self.rels.cols else 0 for i in range(self.ngens)]
        return U, diag, V

    @cached_property
    def rel_basis(self):
        return lattice_basis(self.rels.columns(), self.ngens)

    @cached_property
    def kept(self):
        return [i for i, d in enumerate(self._smith[1]) if d != 1]

    @cached_property
    def moduli(self):
        """Orders of the canonical generators (0 means infinite)."""
        return [self._smith[1][i] for i in self.kept]

    @cached_property
    def _uinv(self):
        U = self._smith[0]
        H, T, _ = hnf_rows(U, self.ngens, transform=True)
        # U is unimodular so its Hermite form is the identity and T = U^{-1}
        return T

    def invariants(self):
        torsion = tuple(d for d in self.moduli if d)
        return (len(self.moduli) - len(torsion), torsion)

    @property
    def free_rank(self):
        return self.invariants()[0]

    @property
    def torsion(self):
        return self.invariants()[1]

    @property
    def rank(self):
        """Number of canonical generators."""
        return len(self.kept)

    def is_free(self):
        return not self.torsion

    def is_trivial(self):
        return not self.kept

    def order(self):
        f, t = self.invariants()
        if f:
            return None
        out = 1
        for d in t:
            out *= d
        return out

    def isomorphic(self, other):
        return self.invariants() == other.invariants()

    def coords(self, v):
        """Canonical coordinates of the element represented by v."""
        v = list(v)
        if len(v) != self.ngens:
            raise DimensionMismatch("element has wrong length")
        U, diag, _ = self._smith
        out = []
        for i in self.kept:
            x = sum(a * b for a, b in zip(U[i], v) if a and b)
            d = diag[i]
            out.append(x % d if d else x)
        return out

    def is_zero_element(self, v):
        return not any(self.coords(v))

    def same_element(self, v, w):
        return self.is_zero_element([a - b for a, b in zip(v, w)])

    @cached_property
    def to_canonical(self):
        """Matrix sending presentation coordinates to canonical coordinates."""
        U = self._smith[0]
        return IntMatrix.from_rows([U[i] for i in self.kept], self.ngens)

    @cached_property
    def from_canonical(self):
        """Columns are the canonical generators written in the presentation."""
        Ui = self._uinv
        return IntMatrix.from_rows([[Ui[r][i] for i in self.kept] for r in range(self.ngens)], len(self.kept))

    def gen_vectors(self):
        return self.from_canonical.columns()

    def canonical(self):
        return FpAbGroup.diagonal(self.moduli)

    def same_presentation(self, other):
        return self.ngens == other.ngens and self.rel_basis == other.rel_basis

    def identity_map(self):
        return AbMap(self, self, IntMatrix.identity(self.ngens))

    def zero_map_to(self, other):
        return AbMap(self, other, IntMatrix.zero(other.ngens, self.ngens))

    def __repr__(self):
        f, t = self.invariants()
        parts = [f"Z/{d}" for d in t] + (["Z" if f == 1 else f"Z^{f}"] if f else [])
        return "FpAbGroup(" + (" + ".join(parts) if parts else "0") + ")"


def direct_sum(groups):
    groups = list(groups)
    n = sum(g.ngens for g in groups)
    return FpAbGroup(n, block_diag([g.rels for g in groups]) if groups else IntMatrix.zero(0, 0))


def subquotient(L_gens, N_gens, dim):
    """The group L/N for lattices N <= L in Z^dim.

    Returns ``(group, basis)``: coordinate i of the group corresponds to the
    vector ``basis[i]``.
    """
    Lb = lattice_basis(L_gens, dim)
    rels = []
    for v in N_gens:
        c = lattice_coords(Lb, v)
        if c is None:
            raise InternalInvariantViolation("subquotient: N is not contained in L")
        if any(c):
            rels.append(c)
    return FpAbGroup.from_relators(len(Lb), rels), Lb


def _solution_lattice(M: IntMatrix, S: IntMatrix):
    """Hermite basis of {x : M x in span(S)}."""
    g = M.cols
    if g == 0:
        return []
    if M.rows == 0:
        return identity_rows(g)
    big = hstack([M, -S], M.rows)
    ker = kernel_basis(big)
    return lattice_basis([v[:g] for v in ker], g)


@dataclass(frozen=True, eq=False)
class AbMap:
    source: FpAbGroup
    target: FpAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.ngens, self.source.ngens):
            raise DimensionMismatch(
                f"map matrix {self.matrix.shape} does not match {self.target.ngens}x{self.source.ngens}")

    def __call__(self, v):
        return self.matrix @ list(v)

    def is_well_defined(self):
        basis = self.target.rel_basis
        return all(lattice_contains(basis, self.matrix @ c) for c in self.source.rels.columns())

    def compose(self, first: "AbMap") -> "AbMap":
        """``self ∘ first``."""
        if first.target.ngens != self.source.ngens:
            raise NotComposable("maps are not composable")
        return AbMap(first.source, self.target, self.matrix @ first.matrix)

    def is_zero(self):
        basis = self.target.rel_basis
        return all(lattice_contains(basis, c) for c in self.matrix.columns())

    def equals(self, other):
        return (self - other).is_zero()

    def __sub__(self, other):
        return AbMap(self.source, self.target, self.matrix - other.matrix)

    def __add__(self, other):
        return AbMap(self.source, self.target, self.matrix + other.matrix)

    @cached_property
    def _kernel_lattice(self):
        return _solution_lattice(self.matrix, self.target.rels)

    def kernel(self):
        """(K, inclusion K -> source)."""
        K, basis = subquotient(self._kernel_lattice, self.source.rels.columns(), self.source.ngens)
        return K, AbMap(K, self.source, IntMatrix.from_cols(basis, self.source.ngens))

    def image(self):
        """(I, inclusion I -> target); I is presented on the source generators."""
        I = FpAbGroup.from_relators(self.source.ngens, self._kernel_lattice)
        return I, AbMap(I, self.target, self.matrix)

    def cokernel(self):
        C = FpAbGroup(self.target.ngens, hstack([self.target.rels, self.matrix], self.target.ngens))
        return C, AbMap(self.target, C, IntMatrix.identity(self.target.ngens))

    def image_lattice(self):
        return lattice_basis(self.matrix.columns() + self.target.rels.columns(), self.target.ngens)

    def kernel_lattice(self):
        return self._kernel_lattice

    def is_injective(self):
        return self.kernel()[0].is_trivial()

    def is_surjective(self):
        return self.cokernel()[0].is_trivial()

    def is_isomorphism(self):
        return self.is_injective() and self.is_surjective()

    def canonical_matrix(self):
        """Matrix of the map between canonical coordinates (entries unreduced)."""
        return self.target.to_canonical @ self.matrix @ self.source.from_canonical


def homology_at(f: AbMap, g: AbMap) -> FpAbGroup:
    """ker g / im f for ``A -f-> B -g-> C``."""
    B = g.source
    H, _ = subquotient(g.kernel_lattice(), f.matrix.columns() + B.rels.columns(), B.ngens)
    return H


# ------------------------------------------------------------- Hom and Ext

def _cyclic_hom(d, e):
    """Hom(Z/d, Z/e) as (order, value of the generator at 1); 0 means Z."""
    if d == 0:
        return e, 1
    if e == 0:
        return 1, 0
    c = gcd(d, e)
    return c, e // c


class HomGroup(FpAbGroup):
    """Hom(G, H) with explicit generators and a coordinate map."""

    def __init__(self, G: FpAbGroup, H: FpAbGroup):
        self.G, self.H = G, H
        self._slots = []
        orders = []
        for j, e in enumerate(H.moduli):
            for i, d in enumerate(G.moduli):
                order, val = _cyclic_hom(d, e)
                if order != 1:
                    self._slots.append((j, i, val, order))
                    orders.append(order)
        base = FpAbGroup.diagonal(orders)
        super().__init__(base.ngens, base.rels)

    def slot_matrix(self, k):
        j, i, val, _ = self._slots[k]
        Xc = [[0] * self.G.rank for _ in range(self.H.rank)]
        Xc[j][i] = val
        return self.H.from_canonical @ IntMatrix.from_rows(Xc, self.G.rank) @ self.G.to_canonical

    @cached_property
    def generators(self):
        """Canonical generators as AbMaps G -> H."""
        out = []
        for col in self.from_canonical.columns():
            M = IntMatrix.zero(self.H.ngens, self.G.ngens)
            for k, c in enumerate(col):
                if c:
                    M = M + self.slot_matrix(k).scale(c)
            out.append(AbMap(self.G, self.H, M))
        return out

    def slot_coords(self, f: AbMap):
        Xc = self.H.to_canonical @ f.matrix @ self.G.from_canonical
        out = []
        for j, i, val, order in self._slots:
            x = Xc[j, i]
            e = self.H.moduli[j]
            if e:
                x %= e
            if x % val:
                raise InputError("matrix is not a homomorphism between these groups")
            q = x // val
            out.append(q % order if order else q)
        return out

    def coords(self, f):
        if isinstance(f, AbMap):
            return super().coords(self.slot_coords(f))
        return super().coords(f)


def hom_group(G: FpAbGroup, H: FpAbGroup) -> HomGroup:
    """Hom(G, H); see :class:`HomGroup` for generators and coordinates."""
    return HomGroup(G, H)


class Ext1Group(FpAbGroup):
    """Ext^1(G, H) = Hom(rel, H) / restrictions, from the canonical presentation of G."""

    def __init__(self, G: FpAbGroup, H: FpAbGroup):
        self.G, self.H = G, H
        _, diag, _ = G._smith
        self._slots = []
        orders = []
        for i, d in enumerate(diag):
            if d <= 1:
                continue
            for j, e in enumerate(H.moduli):
                order = gcd(d, e) if e else d
                if order != 1:
                    self._slots.append((i, j, order))
                    orders.append(order)
        base = FpAbGroup.diagonal(orders)
        super().__init__(base.ngens, base.rels)

    def class_of(self, values):
        """Class of the cocycle taking value ``values[k]`` (an element of H)
        on the k-th relator column of G."""
        G, H = self.G, self.H
        values = [list(v) for v in values]
        if len(values) != G.rels.cols or any(len(v) != H.ngens for v in values):
            raise DimensionMismatch("cocycle values do not match the presentation")
        _, diag, V = G._smith
        out = []
        cache = {}
        for i in range(G.rels.cols):
            w = [sum(V[k][i] * values[k][l] for k in range(G.rels.cols)) for l in range(H.ngens)]
            if i >= len(diag) or diag[i] == 0:
                if not H.is_zero_element(w):
                    raise InputError("values do not define a homomorphism on the relation lattice")
            cache[i] = H.coords(w)
        for i, j, order in self._slots:
            out.append(cache[i][j] % order)
        return self.coords(out)


def ext1_group(G: FpAbGroup, H: FpAbGroup) -> Ext1Group:
    return Ext1Group(G, H)


# ---------------------------------------------------------------- exactness

@dataclass(frozen=True)
class Junction:
    index: int
    exact: bool
    kernel: FpAbGroup
    image: FpAbGroup
    homology: FpAbGroup


def exactness_check(maps: Sequence[AbMap]):
    """Verdict at each junction ``maps[k]``, ``maps[k+1]`` of a complex.

    Raises NotComposable or NonzeroComposite before judging exactness.
    """
    maps = list(maps)
    for k in range(len(maps) - 1):
        f, g = maps[k], maps[k + 1]
        if not f.target.same_presentation(g.source):
            raise NotComposable(f"maps {k} and {k + 1} are not composable")
        if not g.compose(f).is_zero():
            raise NonzeroComposite(f"composite at junction {k} is nonzero", junction=k)
    out = []
    for k in range(len(maps) - 1):
        f, g = maps[k], maps[k + 1]
        B = g.source
        klat = g.kernel_lattice()
        ilat = f.image_lattice()
        K, _ = subquotient(klat, B.rels.columns(), B.ngens)
        I, _ = subquotient(ilat, B.rels.columns(), B.ngens)
        Hh, _ = subquotient(klat, ilat, B.ngens)
        out.append(Junction(k, klat == ilat, K, I, Hh))
    return out
