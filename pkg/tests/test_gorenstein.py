import copy
import random

import pytest
from hypothesis import given, settings, strategies as st

from uctkit.errors import InputError
from uctkit.gorenstein import (FGRing, MatrixFactorization, Poly, SerreData, boundary_ring_images,
                               build_mf_module, check_boundary, check_frobenius_over_Z, check_serre,
                               double_dual_check, filtkk_serre_data, identity_boundary_data,
                               identity_serre_data, load_certificates, norm_poly, equivariant_factorizations,
                               parse_poly, periodic_serre_data, verify_matrix_factorization)
from uctkit.lattice import IntMatrix
from uctkit.zcat import (cyclic_group_table, filtkk_cat, groupoid_cat, koehler_cat, periodic_complex_cat,
                         symmetric_group_table)


def serre_cases():
    for n in (1, 2, 3, 4):
        C = filtkk_cat(n)
        yield C, filtkk_serre_data(C)
    for pi in (1, 2, 3, 4):
        C = periodic_complex_cat(pi)
        yield C, periodic_serre_data(C)
    for table in (cyclic_group_table(2), cyclic_group_table(3), symmetric_group_table(3)):
        C = groupoid_cat(table)
        yield C, identity_serre_data(C)


def test_serre_certificates_pass_and_ranks_match():
    for C, s in serre_cases():
        r = check_serre(C, s)
        assert r.ok, (C.name, r.failures[:3])
        assert r.certificate["gorenstein_dimension_bound"] == 1
        for c in C.objects:
            for d in C.objects:
                assert C.rank(c, d) == C.rank(d, s.obj[c])


def test_serre_mutations_fail_with_witness():
    for C, s in serre_cases():
        zero = SerreData(s.obj, s.mats, {c: [0] * len(v) for c, v in s.lam.items()})
        r = check_serre(C, zero)
        assert not r.ok and any(f.kind == "non-unimodular Gram" for f in r.failures)
    C = filtkk_cat(2)
    s = filtkk_serre_data(C)
    ident = identity_serre_data(C)
    r = check_serre(C, SerreData(ident.obj, ident.mats, {c: [1] for c in C.objects}))
    assert not r.ok and any(f.kind == "non-square Gram" for f in r.failures)
    bad = dict(s.obj)
    a, b = C.objects[0], C.objects[1]
    bad[a], bad[b] = bad[b], bad[a]
    r = check_serre(C, SerreData(bad, s.mats, s.lam))
    assert not r.ok and r.failures
    # a sign flip on one functional breaks the trace condition
    C = periodic_complex_cat(2)
    s = periodic_serre_data(C)
    lam = dict(s.lam)
    lam["c0"] = [-x for x in lam["c0"]]
    r = check_serre(C, SerreData(s.obj, s.mats, lam))
    assert not r.checks["trace"]
    assert any(f.kind == "trace condition" for f in r.failures)


def test_frobenius_examples():
    U = FGRing.cyclic_group_ring(5)
    ok, G = check_frobenius_over_Z(U, U.unit)
    assert ok
    assert all(sorted(r) == [0, 0, 0, 0, 1] for r in G.tolist())
    Z = FGRing(("1",), [[(1,)]], (1,))
    assert check_frobenius_over_Z(Z, [1])[0]
    D = FGRing.truncated(2)
    ok, G = check_frobenius_over_Z(D, [1, 0])
    assert not ok and G.tolist() == [[1, 0], [0, 0]]
    assert check_frobenius_over_Z(D, [0, 1])[0]


def _unimodular(rng, n, steps=6):
    P = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        P[i] = [a + c * b for a, b in zip(P[i], P[j])]
    if rng.random() < 0.5:
        P[0] = [-x for x in P[0]]
    return IntMatrix.from_rows(P, n)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["group2", "group3", "bd3", "trunc2", "trunc3"]))
def test_frobenius_verdict_invariant_under_basis_change(seed, which):
    rng = random.Random(seed)
    U = {"group2": FGRing.cyclic_group_ring(2), "group3": FGRing.cyclic_group_ring(3),
         "bd3": FGRing.boundary_ring(3), "trunc2": FGRing.truncated(2),
         "trunc3": FGRing.truncated(3)}[which]
    lam = [rng.randint(-1, 1) for _ in range(U.rank)]
    P = _unimodular(rng, U.rank)
    V, _ = U.change_basis(P)
    assert V.validate() == []
    lam2 = [sum(lam[i] * P[i, k] for i in range(U.rank)) for k in range(U.rank)]
    assert check_frobenius_over_Z(U, lam)[0] == check_frobenius_over_Z(V, lam2)[0]


def test_polynomials():
    V = ("s", "t")
    p = parse_poly("1 + t + t^2 - 3*s*t^2", V)
    assert p == norm_poly(V, "t", 3) - 3 * Poly.var(V, "s") * Poly.var(V, "t") ** 2
    assert parse_poly(str(p), V) == p
    with pytest.raises(InputError):
        parse_poly("1 + u", V)
    with pytest.raises(InputError):
        parse_poly("1 + (t", V)


def test_verify_matrix_factorization_examples():
    V = ("t",)
    t = Poly.var(V, "t")
    for p in (2, 3, 5):
        assert verify_matrix_factorization(MatrixFactorization(V, 1 - t ** p, [[norm_poly(V, "t", p)]], [[1 - t]]))
    V2 = ("s", "t")
    s, t2 = Poly.var(V2, "s"), Poly.var(V2, "t")
    assert verify_matrix_factorization(MatrixFactorization(V2, (1 - s) * (1 - t2), [[1 - t2]], [[1 - s]]))
    w = 1 - t ** 3
    assert verify_matrix_factorization(MatrixFactorization(V, w, [[Poly.const(V, 1)]], [[w]]))
    assert not verify_matrix_factorization(MatrixFactorization(V, w, [[1 - t]], [[1 + t]]))
    U = FGRing.cyclic_group_ring(3)
    one, tt = U.one(), U.basis_vector(1)
    assert verify_matrix_factorization(MatrixFactorization(U, U.zero(), [[U.sub(one, tt)]],
                                                           [[U.add(U.add(one, tt), U.mul(tt, tt))]]))


def test_equivariant_factorizations_and_ranks():
    for p in (2, 3, 5):
        for name, mf, U, images, rels, rank in equivariant_factorizations(p):
            res, M = build_mf_module(mf, U, images, rels)
            assert res.exact and res.dual_exact
            assert len(res.junctions) == 2 and len(res.dual_junctions) == 2
            assert M.rank == rank, (p, name)
    # case (i): M = U/(1-t) = Z with t acting trivially
    _, mf, U, images, _, _ = equivariant_factorizations(2)[0]
    _, M = build_mf_module(mf, U, images)
    assert [a.tolist() for a in M.action] == [[[1]], [[1]]]


def test_unit_factorization_gives_free_module():
    U = FGRing.cyclic_group_ring(3)
    V = ("t",)
    w = 1 - Poly.var(V, "t") ** 3
    _, M = build_mf_module(MatrixFactorization(V, w, [[Poly.const(V, 1)]], [[w]]), U,
                           {"t": U.basis_vector(1)})
    assert M.rank == U.rank


def test_w_must_vanish():
    U = FGRing.cyclic_group_ring(3)
    V = ("t",)
    t = Poly.var(V, "t")
    with pytest.raises(InputError):
        build_mf_module(MatrixFactorization(V, 1 - t ** 2, [[1 + t]], [[1 - t]]), U, {"t": U.basis_vector(1)})


def _conjugate(mf, P, Pinv, Q, Qinv, vars):
    """(P A Q, Q^{-1} B P^{-1}) over polynomials."""
    def lift(M):
        return [[Poly.const(vars, M[i, j]) for j in range(M.cols)] for i in range(M.rows)]

    def mul(X, Y):
        n = len(X)
        return [[sum((X[i][k] * Y[k][j] for k in range(n)), Poly(vars)) for j in range(n)] for i in range(n)]
    return MatrixFactorization(vars, mf.w, mul(mul(lift(P), mf.A), lift(Q)), mul(mul(lift(Qinv), mf.B), lift(Pinv)))


def _inverse(P):
    from uctkit.lattice import hnf_rows
    _, T, _ = hnf_rows(P.tolist(), P.cols, transform=True)
    return IntMatrix.from_rows(T, P.cols)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5]))
def test_random_factorizations_are_exact_and_dual_exact(seed, p):
    rng = random.Random(seed)
    V = ("t",)
    t = Poly.var(V, "t")
    U = FGRing.cyclic_group_ring(p)
    pieces = [(norm_poly(V, "t", p), 1 - t), (1 - t, norm_poly(V, "t", p)),
              (Poly.const(V, 1), 1 - t ** p), (1 - t ** p, Poly.const(V, 1))]
    chosen = [rng.choice(pieces) for _ in range(rng.randint(1, 3))]
    n = len(chosen)
    A = [[chosen[i][0] if i == j else Poly(V) for j in range(n)] for i in range(n)]
    B = [[chosen[i][1] if i == j else Poly(V) for j in range(n)] for i in range(n)]
    mf = MatrixFactorization(V, 1 - t ** p, A, B)
    P, Q = _unimodular(rng, n), _unimodular(rng, n)
    mf2 = _conjugate(mf, P, _inverse(P), Q, _inverse(Q), V)
    assert verify_matrix_factorization(mf2)
    images = {"t": U.basis_vector(1)}
    res, M = build_mf_module(mf2, U, images)
    assert res.exact and res.dual_exact
    ranks = {0: 1, 1: p - 1, 2: p, 3: 0}
    assert M.rank == sum(ranks[pieces.index(c)] for c in chosen)
    assert double_dual_check(mf2, U, images)


def test_boundary_ring_matches_koehler_endomorphisms():
    for p in (2, 3):
        C = koehler_cat(p)
        U, im = boundary_ring_images(p)
        assert U.rank == C.rank("A2", "A2") == 2 * (p - 1)
        # ring map U -> End(A2) determined by s -> s2, t -> t2
        nf = C.info["normal_form"]
        s2 = tuple(nf(("s2",), "A2")[1])
        t2 = tuple(nf(("t2",), "A2")[1])
        E = FGRing.from_category(C, "A2")
        cols = []
        for lab in U.labels:
            if lab == "1":
                cols.append(E.one())
            else:
                var, _, k = lab.partition("^")
                cols.append(E.power(s2 if var == "s" else t2, int(k) if k else 1))
        phi = IntMatrix.from_cols(cols, E.rank)
        assert abs(phi.det()) == 1
        for i in range(U.rank):
            for j in range(U.rank):
                lhs = phi @ list(U.table[i][j])
                assert tuple(lhs) == E.mul(cols[i], cols[j])


@pytest.fixture(scope="module")
def koehler():
    return {p: koehler_cat(p) for p in (2, 3)}


def test_boundary_certificates_pass(koehler):
    for p, C in koehler.items():
        r = check_boundary(C, identity_boundary_data(C), load_certificates(f"koehler{p}"))
        assert r.ok, r.failures[:3]
        assert set(r.checks) >= {"condition1", "condition3", "condition4", "condition5"}


def test_boundary_mutations(koehler):
    C = koehler[2]
    cert = load_certificates("koehler2")
    b = identity_boundary_data(C)
    b.mu = dict(b.mu, A0=b.mu["A0"].scale(2))
    r = check_boundary(C, b, cert)
    assert not r.checks["condition4"] and r.failures[0].detail
    bad = copy.deepcopy(cert)
    key = "A0->A2" if "A0->A2" in bad["gproj"] else sorted(bad["gproj"])[0]
    bad["gproj"][key]["iso"] = [["2" if i == j else "0" for j, _ in enumerate(row)]
                                for i, row in enumerate(bad["gproj"][key]["iso"])]
    r = check_boundary(C, identity_boundary_data(C), bad)
    assert not r.checks["condition5"] and r.checks["condition4"]
    bad = copy.deepcopy(cert)
    bad["frobenius"]["A2"] = ["0"] * C.rank("A2", "A2")
    r = check_boundary(C, identity_boundary_data(C), bad)
    assert not r.checks["condition1"]
    bad = copy.deepcopy(cert)
    del bad["gproj"]["A1->A0"]
    assert not check_boundary(C, identity_boundary_data(C), bad).checks["condition5"]


def test_missing_certificate_bundle():
    with pytest.raises(InputError):
        load_certificates("koehler7")
