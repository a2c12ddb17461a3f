"""Finite certificates for Gorenstein criteria.

* Serre certificates: a functor S and functionals λ_c on Hom(c, Sc) whose
  pairings Hom(c,d) x Hom(d,Sc) -> Z are perfect.
* Frobenius functionals on endomorphism rings free over Z.
* Matrix factorizations and the 2-periodic complexes they induce over U = R/(w).
* Boundary certificates (S, μ, Frobenius functionals, factorization witnesses).

The library only checks certificates; producing them is done offline.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .errors import InputError, NotGorensteinProjective
from .lattice import (AbMap, FpAbGroup, IntMatrix, block_diag, exactness_check, kernel_basis, lattice_basis,
                      lattice_coords, same_lattice)
from .zcat import Failure, Suspension, ZCategory, _renaming_functor, _validate_functor, fk_domain, fk_label, \
    fk_serre


@dataclass
class Report:
    ok: bool
    checks: dict
    failures: list
    certificate: dict = field(default_factory=dict)

    def to_json(self):
        return {"ok": self.ok, "checks": dict(self.checks),
                "failures": [{"kind": f.kind, "detail": [str(x) for x in f.detail]} for f in self.failures],
                "certificate": self.certificate}


def _report(checks, failures, certificate=None):
    ok = all(checks.values()) and not failures
    return Report(ok, checks, failures, certificate or {})


# ------------------------------------------------------------- polynomials

class Poly:
    """Polynomial over Z in named variables; terms map exponent tuples to coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        self.terms = {tuple(e): c for e, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, vars, c):
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, vars, name):
        e = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, {e: 1})

    def _check(self, other):
        if isinstance(other, int):
            return Poly.const(self.vars, other)
        if other.vars != self.vars:
            raise InputError("polynomials over different variables")
        return other

    def __add__(self, other):
        other = self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return Poly(self.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Poly(self.vars, t)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Poly.const(self.vars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.vars, other)
        return isinstance(other, Poly) and self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (sum(e), e)):
            c = self.terms[e]
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return "+".join(parts).replace("+-", "-")

    __repr__ = __str__

    def evaluate(self, U: "FGRing", images):
        """Image under the ring map sending each variable to ``images[var]`` in U."""
        out = U.zero()
        pw = {}
        for e, c in self.terms.items():
            x = U.one()
            for v, k in zip(self.vars, e):
                if k:
                    key = (v, k)
                    if key not in pw:
                        pw[key] = U.power(images[v], k)
                    x = U.mul(x, pw[key])
            out = U.add(out, U.scale(x, c))
        return out


_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*\*?\s*((?:[A-Za-z_]\w*(?:\^\d+)?\s*\*?\s*)*)")


def parse_poly(text, vars):
    """Parse sums of monomials such as ``1 + t + t^2`` or ``3*s^2*t - 1``."""
    vars = tuple(vars)
    s = str(text).replace(" ", "")
    if not s:
        raise InputError("empty polynomial")
    out = Poly(vars)
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise InputError(f"cannot parse polynomial {text!r}")
        sign, coeff, mono = m.groups()
        if not coeff and not mono:
            raise InputError(f"cannot parse polynomial {text!r}")
        c = int(coeff) if coeff else 1
        if sign == "-":
            c = -c
        e = [0] * len(vars)
        for part in filter(None, mono.split("*")):
            name, _, k = part.partition("^")
            if name not in vars:
                raise InputError(f"unknown variable {name!r} in {text!r}")
            e[vars.index(name)] += int(k) if k else 1
        out = out + Poly(vars, {tuple(e): c})
        pos = m.end()
    return out


def norm_poly(vars, x, p):
    """N(x) = 1 + x + ... + x^{p-1}."""
    v = Poly.var(vars, x)
    out = Poly.const(vars, 0)
    for k in range(p):
        out = out + v ** k
    return out


# ----------------------------------------------------------------- rings

@dataclass
class FGRing:
    """Ring free of finite rank over Z: ``table[i][j]`` is the vector of e_i * e_j."""
    labels: tuple
    table: list
    unit: tuple

    @property
    def rank(self):
        return len(self.labels)

    def zero(self):
        return (0,) * self.rank

    def one(self):
        return tuple(self.unit)

    def basis_vector(self, i):
        return tuple(1 if k == i else 0 for k in range(self.rank))

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def scale(self, x, c):
        return tuple(c * a for a in x)

    def mul(self, x, y):
        out = [0] * self.rank
        for i, a in enumerate(x):
            if not a:
                continue
            row = self.table[i]
            for j, b in enumerate(y):
                if b:
                    for k, v in enumerate(row[j]):
                        if v:
                            out[k] += a * b * v
        return tuple(out)

    def power(self, x, k):
        out = self.one()
        for _ in range(k):
            out = self.mul(out, x)
        return out

    def left_matrix(self, a):
        """Matrix of y -> a*y."""
        return IntMatrix.from_cols([self.mul(a, self.basis_vector(k)) for k in range(self.rank)], self.rank)

    def right_matrix(self, a):
        """Matrix of y -> y*a."""
        return IntMatrix.from_cols([self.mul(self.basis_vector(k), a) for k in range(self.rank)], self.rank)

    def validate(self):
        out = []
        n = self.rank
        for i in range(n):
            e = self.basis_vector(i)
            if self.mul(self.one(), e) != e or self.mul(e, self.one()) != e:
                out.append(Failure("unit", (self.labels[i],)))
        for i in range(n):
            for j in range(n):
                ij = self.table[i][j]
                for k in range(n):
                    lhs = self.mul(ij, self.basis_vector(k))
                    rhs = self.mul(self.basis_vector(i), self.table[j][k])
                    if lhs != rhs:
                        out.append(Failure("associativity", (self.labels[i], self.labels[j], self.labels[k])))
        return out

    def is_commutative(self):
        return all(self.table[i][j] == self.table[j][i] for i in range(self.rank) for j in range(self.rank))

    def change_basis(self, P: IntMatrix):
        """The same ring on the basis given by the columns of the unimodular matrix P."""
        if P.rows != P.cols or P.rows != self.rank or abs(P.det()) != 1:
            raise InputError("basis change must be unimodular")
        from .lattice import hnf_rows
        _, Pinv, _ = hnf_rows(P.tolist(), self.rank, transform=True)
        Pi = IntMatrix.from_rows(Pinv, self.rank)
        new = [P.col(k) for k in range(self.rank)]
        table = [[tuple(Pi @ list(self.mul(new[i], new[j]))) for j in range(self.rank)]
                 for i in range(self.rank)]
        unit = tuple(Pi @ list(self.unit))
        return FGRing(tuple(f"b{k}" for k in range(self.rank)), table, unit), Pi

    @classmethod
    def from_category(cls, C: ZCategory, c):
        """End(c) with product x*y = x∘y."""
        n = C.rank(c, c)
        if any(C.hom_orders(c, c)):
            raise InputError(f"End({c}) is not free over Z")
        table = C.comp[(c, c, c)]
        return cls(C.basis(c, c), [[tuple(table[i][j]) for j in range(n)] for i in range(n)],
                   C.unit_vector(c))

    @classmethod
    def cyclic_group_ring(cls, p, var="t"):
        """Z[t]/(1 - t^p) on the basis 1, t, ..., t^{p-1}."""
        labels = tuple("1" if k == 0 else (var if k == 1 else f"{var}^{k}") for k in range(p))
        table = [[tuple(1 if m == (i + j) % p else 0 for m in range(p)) for j in range(p)] for i in range(p)]
        return cls(labels, table, tuple(1 if m == 0 else 0 for m in range(p)))

    @classmethod
    def truncated(cls, n, var="x"):
        """Z[x]/(x^n)."""
        labels = tuple("1" if k == 0 else f"{var}^{k}" for k in range(n))
        table = [[tuple(1 if (i + j) == m else 0 for m in range(n)) for j in range(n)] for i in range(n)]
        return cls(labels, table, tuple(1 if m == 0 else 0 for m in range(n)))

    @classmethod
    def boundary_ring(cls, p):
        """Z[s,t]/(N(s)+N(t)-p, (1-s)(1-t)) on the basis 1, s..s^{p-1}, t..t^{p-2}.

        Normal form: st = s + t - 1, s^p = 1 and t^{p-1} = p - N(s) - (1 + t + ... + t^{p-2}).
        """
        labels = ["1"] + [f"s^{k}" if k > 1 else "s" for k in range(1, p)] + \
                 [f"t^{k}" if k > 1 else "t" for k in range(1, p - 1)]
        idx = {("s", 0): 0, ("t", 0): 0}
        for k in range(1, p):
            idx[("s", k)] = k
        for k in range(1, p - 1):
            idx[("t", k)] = p - 1 + k
        n = len(labels)
        memo = {}

        def nf(i, j):
            """Normal form of s^i t^j as a coefficient vector."""
            if (i, j) in memo:
                return memo[(i, j)]
            v = [0] * n
            if j == 0:
                v[idx[("s", i % p)]] += 1
            elif i == 0:
                if j < p - 1:
                    v[idx[("t", j)]] += 1
                else:
                    # t^j = t^{j-p+1} * (p - N(s) - sum_{k<p-1} t^k)
                    r = j - (p - 1)
                    w = _scale(nf(0, r), p)
                    for k in range(p):
                        w = _add(w, _neg(nf(k, r)))
                    for k in range(p - 1):
                        w = _add(w, _neg(nf(0, r + k)))
                    v = w
            else:
                v = _add(_add(nf(i, j - 1), nf(i - 1, j)), _neg(nf(i - 1, j - 1)))
            memo[(i, j)] = v
            return v

        mono = [(0, 0)] + [(k, 0) for k in range(1, p)] + [(0, k) for k in range(1, p - 1)]
        table = []
        for a in mono:
            row = []
            for b in mono:
                row.append(tuple(nf(a[0] + b[0], a[1] + b[1])))
            table.append(row)
        return cls(tuple(labels), table, tuple(1 if m == 0 else 0 for m in range(n)))


def _add(x, y):
    return [a + b for a, b in zip(x, y)]


def _neg(x):
    return [-a for a in x]


def _scale(x, c):
    return [c * a for a in x]


def frobenius_gram(U: FGRing, lam):
    lam = list(lam)
    if len(lam) != U.rank:
        raise InputError("functional has the wrong length")
    return IntMatrix.from_rows([[sum(a * b for a, b in zip(lam, U.table[i][j])) for j in range(U.rank)]
                                for i in range(U.rank)], U.rank)


def check_frobenius_over_Z(U: FGRing, lam):
    """(ok, Gram): ok iff (x, y) -> λ(xy) is unimodular on the Z-basis of U."""
    G = frobenius_gram(U, lam)
    return abs(G.det()) == 1, G


# ------------------------------------------------------------ Serre data

@dataclass
class SerreData:
    obj: dict          # object bijection
    mats: dict         # (c, d) -> matrix Hom(c,d) -> Hom(Sc, Sd)
    lam: dict          # c -> row vector on the basis of Hom(c, Sc)

    def functor(self):
        return Suspension(dict(self.obj), dict(self.mats))


def _apply(C, omap, mats, c, d, v):
    if (c, d) not in mats:
        return ()
    return C.reduce(omap[c], omap[d], mats[(c, d)] @ list(v))


def _unit(n, i):
    return tuple(1 if k == i else 0 for k in range(n))


def _pair(lam, v):
    return sum(a * b for a, b in zip(lam, v))


def check_serre(C: ZCategory, s: SerreData) -> Report:
    failures = []
    checks = {"hom_finite": True, "locally_bounded": True}
    if not C.is_free():
        checks["hom_finite"] = False
        failures.append(Failure("Hom groups not free over Z", ()))
        return _report(checks, failures)
    func = _validate_functor(C, s.obj, s.mats, "serre functor")
    checks["automorphism"] = not func
    failures.extend(func)
    if func:
        return _report(checks, failures)
    S = s.obj
    for c in C.objects:
        lam = list(s.lam.get(c, ()))
        if len(lam) != C.rank(c, S[c]):
            failures.append(Failure("functional has the wrong length", (c,)))
    if failures:
        checks["trace"] = checks["perfect"] = False
        return _report(checks, failures)
    trace_ok = True
    for (c, d) in C.nonzero_pairs():
        Sc = S[c]
        for j in range(C.rank(d, Sc)):
            g = _unit(C.rank(d, Sc), j)
            for i in range(C.rank(c, d)):
                f = _unit(C.rank(c, d), i)
                lhs = _pair(s.lam[c], C.compose_vec(c, d, Sc, g, f))
                Sf = _apply(C, S, s.mats, c, d, f)
                rhs = _pair(s.lam[d], C.compose_vec(d, Sc, S[d], Sf, g))
                if lhs != rhs:
                    trace_ok = False
                    failures.append(Failure("trace condition", (c, d, C.basis(c, d)[i], C.basis(d, Sc)[j],
                                                                lhs, rhs)))
    checks["trace"] = trace_ok
    perfect = True
    grams = {}
    for c in C.objects:
        for d in C.objects:
            r1, r2 = C.rank(c, d), C.rank(d, S[c])
            if r1 != r2:
                perfect = False
                failures.append(Failure("non-square Gram", (c, d, r1, r2)))
                continue
            if r1 == 0:
                continue
            G = IntMatrix.from_rows([[_pair(s.lam[c], C.compose_vec(c, d, S[c], _unit(r2, j), _unit(r1, i)))
                                      for j in range(r2)] for i in range(r1)], r2)
            grams[f"{c}|{d}"] = G.tolist()
            if abs(G.det()) != 1:
                perfect = False
                failures.append(Failure("non-unimodular Gram", (c, d, G.tolist())))
    checks["perfect"] = perfect
    cert = {}
    if trace_ok and perfect:
        cert = {"statement": "Serre functor relative to Z; the category is 1-Gorenstein",
                "gorenstein_dimension_bound": 1, "objects": len(C.objects)}
    return _report(checks, failures, cert)


def filtkk_serre_data(C: ZCategory) -> SerreData:
    n = C.info["n"]
    pts = C.info["points"]
    obj = {c: fk_label(n, *fk_serre(n, *pts[c])) for c in C.objects}
    mats = {(c, d): IntMatrix.identity(1) for (c, d) in C.nonzero_pairs()}
    lam = {c: [1] for c in C.objects}
    return SerreData(obj, mats, lam)


def periodic_serre_data(C: ZCategory) -> SerreData:
    pi = len(C.objects)
    obj = {f"c{i}": f"c{(i - 1) % pi}" for i in range(pi)}
    F = _renaming_functor(C, obj, {f"d{i}": f"d{(i - 1) % pi}" for i in range(pi)})
    lam = {}
    for i in range(pi):
        c = f"c{i}"
        basis = C.basis(c, obj[c])
        lam[c] = [1 if b == f"d{i}" else 0 for b in basis]
    return SerreData(F.obj, F.mats, lam)


def identity_serre_data(C: ZCategory) -> SerreData:
    """S = id with λ_c = coefficient of the identity."""
    obj = {c: c for c in C.objects}
    mats = {(c, d): IntMatrix.identity(C.rank(c, d)) for (c, d) in C.nonzero_pairs()}
    lam = {c: list(C.unit_vector(c)) for c in C.objects}
    return SerreData(obj, mats, lam)


# ------------------------------------------------------ matrix factorizations

@dataclass
class MatrixFactorization:
    """A, B square over a ring with AB = BA = w I.

    ``ring`` is either a tuple of variable names (polynomials over Z) or an
    FGRing (entries are coefficient vectors).
    """
    ring: object
    w: object
    A: list
    B: list

    @property
    def size(self):
        return len(self.A)

    def transpose(self):
        return MatrixFactorization(self.ring, self.w, [list(r) for r in zip(*self.A)],
                                   [list(r) for r in zip(*self.B)])


def _ring_ops(ring):
    if isinstance(ring, FGRing):
        return ring.zero(), ring.add, ring.mul, (lambda x, y: x == y)
    vars = tuple(ring)
    return Poly(vars), (lambda x, y: x + y), (lambda x, y: x * y), (lambda x, y: x == y)


def _matmul_over(ring, X, Y):
    zero, add, mul, _ = _ring_ops(ring)
    n = len(X)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = zero
            for k in range(n):
                acc = add(acc, mul(X[i][k], Y[k][j]))
            row.append(acc)
        out.append(row)
    return out


def verify_matrix_factorization(mf: MatrixFactorization) -> bool:
    n = mf.size
    if any(len(r) != n for r in mf.A) or len(mf.B) != n or any(len(r) != n for r in mf.B):
        return False
    zero, _, _, eq = _ring_ops(mf.ring)
    for P in (_matmul_over(mf.ring, mf.A, mf.B), _matmul_over(mf.ring, mf.B, mf.A)):
        for i in range(n):
            for j in range(n):
                if not eq(P[i][j], mf.w if i == j else zero):
                    return False
    return True


@dataclass
class UModule:
    """A right U-module free over Z: ``basis`` spans it inside U^n, ``action[k]``
    is the matrix of m -> m * e_k in that basis."""
    U: FGRing
    basis: list
    action: list

    @property
    def rank(self):
        return len(self.basis)


@dataclass
class CompleteResolution:
    U: FGRing
    A: IntMatrix          # x -> A x on U^n, expanded over Z
    B: IntMatrix
    dualA: IntMatrix      # y -> y A on row vectors
    dualB: IntMatrix
    junctions: list
    dual_junctions: list

    @property
    def exact(self):
        return all(j.exact for j in self.junctions)

    @property
    def dual_exact(self):
        return all(j.exact for j in self.dual_junctions)


def reduce_entries(mf: MatrixFactorization, U: FGRing, images=None):
    """Entries of A and B as elements of U."""
    if isinstance(mf.ring, FGRing):
        if mf.ring is not U and mf.ring != U:
            raise InputError("factorization lives over a different ring")
        return [list(r) for r in mf.A], [list(r) for r in mf.B], tuple(mf.w)
    if images is None:
        raise InputError("a polynomial factorization needs variable images in U")
    for v in mf.ring:
        if v not in images or len(images[v]) != U.rank:
            raise InputError(f"missing or malformed image of {v}")
    ev = lambda q: q.evaluate(U, images)
    return ([[ev(x) for x in r] for r in mf.A], [[ev(x) for x in r] for r in mf.B], ev(mf.w))


def _expand(U: FGRing, M, side):
    n = len(M)
    blocks = []
    for i in range(n):
        row = []
        for j in range(n):
            if side == "left":
                row.append(U.left_matrix(M[i][j]))
            else:
                # (y M)_i = sum_j y_j M[j][i]
                row.append(U.right_matrix(M[j][i]))
        blocks.append(row)
    r = U.rank
    rows = []
    for i in range(n):
        for a in range(r):
            line = []
            for j in range(n):
                line.extend(blocks[i][j].row(a))
            rows.append(line)
    return IntMatrix.from_rows(rows, n * r)


def build_mf_module(mf: MatrixFactorization, U: FGRing, images=None, relations=()):
    """The complete resolution ... -B-> U^n -A-> U^n -B-> ... and M = Img(A)."""
    if not verify_matrix_factorization(mf):
        raise InputError("not a matrix factorization")
    if U.validate():
        raise InputError("U is not an associative unital ring")
    for rel in relations:
        if any(rel.evaluate(U, images)):
            raise InputError(f"ring map does not kill {rel}")
    A, B, w = reduce_entries(mf, U, images)
    if any(w):
        raise InputError("w does not vanish in U")
    n, r = mf.size, U.rank
    Ai, Bi = _expand(U, A, "left"), _expand(U, B, "left")
    Ad, Bd = _expand(U, A, "right"), _expand(U, B, "right")
    F = FpAbGroup.free(n * r)
    m = lambda X: AbMap(F, F, X)
    junctions = exactness_check([m(Bi), m(Ai), m(Bi)])
    dual = exactness_check([m(Ad), m(Bd), m(Ad)])
    res = CompleteResolution(U, Ai, Bi, Ad, Bd, junctions, dual)
    for name, js in (("complex", junctions), ("dual", dual)):
        for j in js:
            if not j.exact:
                raise NotGorensteinProjective(f"{name} is not exact at junction {j.index}")
    basis = lattice_basis(Ai.columns(), n * r)
    action = []
    for k in range(r):
        R = block_diag([U.right_matrix(U.basis_vector(k))] * n)
        cols = [lattice_coords(basis, R @ b) for b in basis]
        if any(c is None for c in cols):
            raise NotGorensteinProjective("image of A is not a right submodule")
        action.append(IntMatrix.from_cols(cols, len(basis)))
    M = UModule(U, basis, action)
    _check_pairing(U, A, M, n)
    return res, M


def _module_dual_lattice(U: FGRing, M: UModule):
    """Z-basis of Hom_U(M, U) as flattened r x m matrices."""
    r, m = U.rank, M.rank
    nvar = r * m
    eqs = []
    for k in range(r):
        RM = M.action[k]
        RU = U.right_matrix(U.basis_vector(k))
        # Φ RM - RU Φ = 0
        for i in range(r):
            for j in range(m):
                row = [0] * nvar
                for t in range(m):
                    row[i * m + t] += RM[t, j]
                for t in range(r):
                    row[t * m + j] -= RU[i, t]
                eqs.append(row)
    if not eqs:
        return [list(_unit(nvar, i)) for i in range(nvar)]
    return lattice_basis(kernel_basis(IntMatrix.from_rows(eqs, nvar)), nvar)


def _check_pairing(U, A, M: UModule, n):
    """β(f_i ⊗ m_j) = a_ij, and the coordinate functionals generate Hom_U(M, U)."""
    r = U.rank
    Bm = IntMatrix.from_cols(M.basis, n * r)
    for j in range(n):
        col = []
        for i in range(n):
            col.extend(A[i][j])
        # m_j = A e_j is the j-th column of A
        if lattice_coords(M.basis, col) is None:
            raise NotGorensteinProjective("generator m_j is not in M")
        for i in range(n):
            if tuple(col[i * r:(i + 1) * r]) != tuple(A[i][j]):
                raise NotGorensteinProjective("pairing does not give the entries of A")
    dual = _module_dual_lattice(U, M)
    funcs = []
    for i in range(n):
        for k in range(r):
            # m -> e_k * m_i
            Lk = U.left_matrix(U.basis_vector(k))
            P = IntMatrix.from_rows([[Lk[a, b - i * r] if i * r <= b < (i + 1) * r else 0
                                      for b in range(n * r)] for a in range(r)], n * r)
            funcs.append(list((P @ Bm).entries))
    if not same_lattice(funcs, dual, r * M.rank):
        raise NotGorensteinProjective("coordinate functionals do not generate Hom_U(M, U)")


def double_dual_check(mf: MatrixFactorization, U: FGRing, images=None):
    """Transpose twice returns the same module (underlying groups and actions agree)."""
    _, M = build_mf_module(mf, U, images)
    _, M2 = build_mf_module(mf.transpose().transpose(), U, images)
    return M.rank == M2.rank and all(a == b for a, b in zip(M.action, M2.action))


# ------------------------------------------------------------- boundary

@dataclass
class BoundaryData:
    obj: dict
    mats: dict
    mu: dict         # d -> matrix (rank End(d)) x (rank Hom(d, Sd))


def identity_boundary_data(C: ZCategory) -> BoundaryData:
    obj = {c: c for c in C.objects}
    mats = {(c, d): IntMatrix.identity(C.rank(c, d)) for (c, d) in C.nonzero_pairs()}
    mu = {c: IntMatrix.identity(C.rank(c, c)) for c in C.objects}
    return BoundaryData(obj, mats, mu)


def _precompose_matrix(C, c, d, k):
    """Matrix of x -> x ∘ e_k on Hom(c, d) for e_k in End(c)."""
    r = C.rank(c, d)
    if r == 0:
        return IntMatrix.zero(0, 0)
    table = C.comp[(c, c, d)]
    return IntMatrix.from_cols([table[i][k] for i in range(r)], r)


def _right_hom_lattice(C, src_pair, d):
    """Z-basis of right End(d)-module maps Hom(d, x) -> End(d), flattened."""
    _, x = src_pair
    m, r = C.rank(d, x), C.rank(d, d)
    nvar = r * m
    if nvar == 0:
        return []
    eqs = []
    for k in range(r):
        P = _precompose_matrix(C, d, x, k)
        Q = _precompose_matrix(C, d, d, k)
        for i in range(r):
            for j in range(m):
                row = [0] * nvar
                for t in range(m):
                    row[i * m + t] += P[t, j]
                for t in range(r):
                    row[t * m + j] -= Q[i, t]
                eqs.append(row)
    return lattice_basis(kernel_basis(IntMatrix.from_rows(eqs, nvar)), nvar)


def _check_mu_bimodule(C, b: BoundaryData, d):
    out = []
    Sd = b.obj[d]
    mu = b.mu[d]
    rS, r = C.rank(d, Sd), C.rank(d, d)
    if mu.shape != (r, rS):
        return [Failure("μ has the wrong shape", (d,))]
    for k in range(r):
        e = _unit(r, k)
        Se = _apply(C, b.obj, b.mats, d, d, e)
        for j in range(rS):
            x = _unit(rS, j)
            right = (mu @ list(C.compose_vec(d, d, Sd, x, e)), C.compose_vec(d, d, d, tuple(mu @ list(x)), e))
            if tuple(right[0]) != tuple(right[1]):
                out.append(Failure("μ not right linear", (d, C.basis(d, Sd)[j], C.basis(d, d)[k])))
            left = (mu @ list(C.compose_vec(d, Sd, Sd, Se, x)), C.compose_vec(d, d, d, e, tuple(mu @ list(x))))
            if tuple(left[0]) != tuple(left[1]):
                out.append(Failure("μ not left linear", (d, C.basis(d, Sd)[j], C.basis(d, d)[k])))
    return out


def check_condition4(C: ZCategory, b: BoundaryData):
    """ψ_{c,d}: Hom(c,d) -> Hom_{End(d)}(Hom(d, Sc), End(d)), f -> μ_d(S(f) ∘ -), is bijective."""
    out = []
    for d in C.objects:
        out.extend(_check_mu_bimodule(C, b, d))
    if out:
        return out
    for c in C.objects:
        Sc = b.obj[c]
        for d in C.objects:
            Sd = b.obj[d]
            target = _right_hom_lattice(C, (d, Sc), d)
            m = C.rank(d, Sc)
            images = []
            for i in range(C.rank(c, d)):
                Sf = _apply(C, b.obj, b.mats, c, d, _unit(C.rank(c, d), i))
                cols = []
                for j in range(m):
                    cols.append(b.mu[d] @ list(C.compose_vec(d, Sc, Sd, Sf, _unit(m, j))))
                flat = [cols[j][a] for a in range(C.rank(d, d)) for j in range(m)]
                images.append(flat)
            dim = C.rank(d, d) * m
            ok = len(images) == len(target) and (dim == 0 or same_lattice(images, target, dim))
            if ok and images:
                ok = len(lattice_basis(images, dim)) == len(images)
            if not ok:
                out.append(Failure("ψ not an isomorphism", (c, d, len(images), len(target))))
    return out


def check_condition3(C: ZCategory, obj):
    out = []
    for c in C.objects:
        inc = {d for d in C.objects if C.rank(d, c)}
        outg = {d for d in C.objects if C.rank(c, d)}
        if {obj[d] for d in inc} != outg:
            out.append(Failure("S does not map incoming onto outgoing", (c, sorted(inc), sorted(outg))))
    return out


def _named_endomorphism(C, c, name):
    """Coefficient vector of a basis name, or of a path ``x*y`` (= x∘y) in a compiled category."""
    if name == "id_" + c:
        return C.unit_vector(c)
    if name in C.basis(c, c):
        return _unit(C.rank(c, c), C.basis(c, c).index(name))
    nf = C.info.get("normal_form")
    if nf is None:
        raise InputError(f"{name} is not a basis element of End({c})")
    try:
        key, vec = nf(tuple(reversed(name.split("*"))), c)
    except (KeyError, IndexError):
        raise InputError(f"{name} is not a path in End({c})") from None
    if key != (c, c):
        raise InputError(f"{name} is not an endomorphism of {c}")
    return tuple(vec)


def _ring_from_cert(C, c, ring_spec):
    U = FGRing.from_category(C, c)
    vars = tuple(ring_spec["vars"])
    images = {}
    for v in vars:
        img = ring_spec["images"][v]
        if isinstance(img, str):
            vec = _named_endomorphism(C, c, img)
        else:
            vec = tuple(int(x) for x in img)
        images[v] = vec
    rels = [parse_poly(q, vars) for q in ring_spec.get("relations", [])]
    return U, vars, images, rels


def mf_from_cert(spec, vars):
    A = [[parse_poly(x, vars) for x in row] for row in spec["A"]]
    B = [[parse_poly(x, vars) for x in row] for row in spec["B"]]
    return MatrixFactorization(vars, parse_poly(spec["w"], vars), A, B)


def check_gproj_certificate(C: ZCategory, c, d, spec):
    """Hom(c, d) as a right End(c)-module is matched with a module from a
    matrix factorization (or a free basis) by an equivariant Z-isomorphism."""
    r = C.rank(c, c)
    actions = [_precompose_matrix(C, c, d, k) for k in range(r)]
    if "free" in spec:
        gens = [tuple(int(x) for x in g) for g in spec["free"]]
        cols = []
        for g in gens:
            for k in range(r):
                cols.append(C.compose_vec(c, c, d, g, _unit(r, k)))
        X = IntMatrix.from_cols(cols, C.rank(c, d)) if cols else IntMatrix.zero(C.rank(c, d), 0)
        if X.rows != X.cols or (X.rows and abs(X.det()) != 1):
            return [Failure("free marker: generators are not a basis", (c, d))]
        return []
    U, vars, images, rels = _ring_from_cert(C, c, spec["ring"])
    mf = mf_from_cert(spec["mf"], vars)
    try:
        _, M = build_mf_module(mf, U, images, rels)
    except (InputError, NotGorensteinProjective) as e:
        return [Failure("factorization certificate rejected", (c, d, str(e)))]
    X = IntMatrix.from_rows([[int(x) for x in row] for row in spec["iso"]], M.rank)
    if X.shape != (C.rank(c, d), M.rank) or X.rows != X.cols or abs(X.det()) != 1:
        return [Failure("isomorphism matrix not invertible", (c, d))]
    for k in range(r):
        if X @ M.action[k] != actions[k] @ X:
            return [Failure("isomorphism not End-equivariant", (c, d, C.basis(c, c)[k]))]
    return []


def check_boundary(C: ZCategory, b: BoundaryData, certificates) -> Report:
    failures = []
    checks = {"locally_bounded": True}
    if not C.is_free():
        return _report({"hom_free": False}, [Failure("Hom groups not free over Z", ())])
    func = _validate_functor(C, b.obj, b.mats, "S")
    checks["automorphism"] = not func
    failures.extend(func)
    if func:
        return _report(checks, failures)
    f3 = check_condition3(C, b.obj)
    checks["condition3"] = not f3
    failures.extend(f3)
    f4 = check_condition4(C, b)
    checks["condition4"] = not f4
    failures.extend(f4)
    f5 = []
    gp = certificates.get("gproj", {})
    for c in C.objects:
        for d in C.objects:
            if c == d or not C.rank(c, d):
                continue
            spec = gp.get(f"{c}->{d}")
            if spec is None:
                f5.append(Failure("missing Gorenstein-projective certificate", (c, d)))
                continue
            f5.extend(check_gproj_certificate(C, c, d, spec))
    checks["condition5"] = not f5
    failures.extend(f5)
    f1 = []
    frob = certificates.get("frobenius", {})
    for c in C.objects:
        lam = frob.get(c)
        if lam is None:
            f1.append(Failure("missing Frobenius functional", (c,)))
            continue
        ok, G = check_frobenius_over_Z(FGRing.from_category(C, c), [int(x) for x in lam])
        if not ok:
            f1.append(Failure("Frobenius Gram not unimodular", (c, G.tolist())))
    checks["condition1"] = not f1
    failures.extend(f1)
    cert = {}
    if not failures:
        cert = {"statement": "boundary conditions hold; Gorenstein dimension equals that of the boundary",
                "boundary_dimension_bound": 1}
    return _report(checks, failures, cert)


def load_certificates(name):
    """Bundled certificate file, e.g. ``koehler2``."""
    try:
        text = resources.files("uctkit").joinpath("data", "certs", f"{name}.json").read_text()
    except FileNotFoundError:
        raise InputError(f"no bundled certificates named {name!r}") from None
    return json.loads(text)


def boundary_ring_images(p):
    """Images of s and t in FGRing.boundary_ring(p)."""
    U = FGRing.boundary_ring(p)
    s = U.basis_vector(1)
    t = U.basis_vector(p) if p > 2 else U.scale(s, -1)
    return U, {"s": s, "t": t}


def equivariant_factorizations(p):
    """The three factorizations of the equivariant KK example with their rings.

    Returns a list of (name, mf, U, images, relations, expected rank of M).
    """
    V = ("t",)
    U1 = FGRing.cyclic_group_ring(p)
    t = Poly.var(V, "t")
    w = 1 - t ** p
    out = [("(N(t), 1-t)", MatrixFactorization(V, w, [[norm_poly(V, "t", p)]], [[1 - t]]), U1,
            {"t": U1.basis_vector(1)}, [], 1),
           ("(1-t, N(t))", MatrixFactorization(V, w, [[1 - t]], [[norm_poly(V, "t", p)]]), U1,
            {"t": U1.basis_vector(1)}, [], p - 1)]
    V2 = ("s", "t")
    s2, t2 = Poly.var(V2, "s"), Poly.var(V2, "t")
    U2, im = boundary_ring_images(p)
    rel = norm_poly(V2, "s", p) + norm_poly(V2, "t", p) - p
    out.append(("(1-t, 1-s)", MatrixFactorization(V2, (1 - s2) * (1 - t2), [[1 - t2]], [[1 - s2]]), U2, im,
                [rel], p - 1))
    return out
