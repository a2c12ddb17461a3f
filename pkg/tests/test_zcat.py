import random

import pytest

from uctkit.errors import InconsistentRelations, NotComposable, RankNotStabilized
from uctkit.rewriting import Presentation, compile_presentation
from uctkit.zcat import (cyclic_group_table, filtkk_cat, fk_domain, fk_in_box, fk_label, groupoid_cat,
                         koehler_cat, koehler_presentation, periodic_complex_cat, pure_periodic_cat,
                         symmetric_group_table, validate_category)


def klein_table():
    return [[i ^ j for j in range(4)] for i in range(4)]


def builtins():
    for pi in (1, 2, 3, 4):
        yield periodic_complex_cat(pi)
    for n in (1, 2, 3, 4):
        yield filtkk_cat(n)
    for N in (0, 2, 5, 12):
        yield pure_periodic_cat(N)
    for k in range(1, 7):
        yield groupoid_cat(cyclic_group_table(k))
    yield groupoid_cat(symmetric_group_table(3))
    yield groupoid_cat(klein_table())


@pytest.fixture(scope="module")
def koehler():
    return {p: koehler_cat(p) for p in (2, 3)}


def test_builtins_validate(koehler):
    for C in list(builtins()) + list(koehler.values()):
        assert validate_category(C) == [], C.name


def test_perturbed_constant_is_reported():
    C = filtkk_cat(2)
    bad = C.perturbed("A[1,1]", "A[1,2]", "A[1,2]", 0, 0, 0, 1)
    report = validate_category(bad)
    assert report
    assert any("A[1,1]" in f.detail and "A[1,2]" in f.detail for f in report)
    G = groupoid_cat(cyclic_group_table(3)).perturbed("*", "*", "*", 1, 2, 0, 1)
    assert any(f.kind in ("associativity", "left unit", "right unit") for f in validate_category(G))


def test_suspension_is_an_involution_on_two_periodic_instances(koehler):
    cats = [periodic_complex_cat(2), pure_periodic_cat(6)] + [filtkk_cat(n) for n in (1, 2, 3)]
    for C in cats + list(koehler.values()):
        S = C.suspension
        for c in C.objects:
            assert S(S(c)) == c
        for (c, d) in C.nonzero_pairs():
            M = S.mats[(S(c), S(d))] @ S.mats[(c, d)]
            for k in range(C.rank(c, d)):
                col = M.col(k)
                e = [1 if i == k else 0 for i in range(C.rank(c, d))]
                assert C.reduce(c, d, col) == C.reduce(c, d, e)


def test_compose_identity_and_filtkk_composites():
    C = filtkk_cat(2)
    f = C.elt("A[1,1]", "A[1,2]", "alpha^{1,1}_{1,2}")
    assert C.compose(C.id_elt("A[1,2]"), f) == f
    g = C.elt("A[1,2]", "A[2,2]", "alpha^{1,2}_{2,2}")
    # the composite leaves the box of (1,1): zero, and Hom(A11, A22) = 0 as well
    assert C.compose(g, f).coeffs == ()
    assert C.rank("A[1,1]", "A[2,2]") == 0
    with pytest.raises(NotComposable):
        C.compose(f, g)
    D = filtkk_cat(3)
    f = D.elt("A[1,1]", "A[1,2]", "alpha^{1,1}_{1,2}")
    g = D.elt("A[1,2]", "A[1,3]", "alpha^{1,2}_{1,3}")
    assert D.compose(g, f) == D.elt("A[1,1]", "A[1,3]", "alpha^{1,1}_{1,3}")
    h = D.elt("A[1,3]", "A[2,3]", "alpha^{1,3}_{2,3}")
    assert not any(D.compose(h, D.compose(g, f)).coeffs)


def test_filtkk_box_rule():
    for n in (1, 2, 3, 4):
        C = filtkk_cat(n)
        dom = fk_domain(n)
        for p in dom:
            for q in dom:
                lifts = [(q[0] + k * (n + 1), q[1] + k * (n + 1)) for k in range(-3, 4)]
                inbox = [t for t in lifts if fk_in_box(n, p, t)]
                assert len(inbox) <= 1
                assert C.rank(fk_label(n, *p), fk_label(n, *q)) == len(inbox)


def test_periodic_complex_presentation():
    C = periodic_complex_cat(3)
    assert C.basis("c0", "c0") == ("id_c0",)
    assert C.basis("c1", "c0") == ("d1",)
    assert C.rank("c0", "c1") == 0
    one = periodic_complex_cat(1)
    assert one.basis("c0", "c0") == ("id_c0", "d0")


def _arrow(C, a, src):
    key, vec = C.info["normal_form"]((a,), src)
    return key, tuple(vec)


def _evaluate(C, P, poly, vertex):
    from uctkit.zcat import MorphismElt
    total = None
    for word, coeff in poly.items():
        if word:
            src = P.arrows[word[0]][0]
            key, vec = _arrow(C, word[0], src)
            m = MorphismElt(key[0], key[1], vec)
            for a in word[1:]:
                k2, v2 = _arrow(C, a, P.arrows[a][0])
                m = C.compose(MorphismElt(k2[0], k2[1], v2), m)
        else:
            m = C.id_elt(vertex)
        v = tuple(coeff * x for x in m.coeffs)
        total = v if total is None else tuple(a + b for a, b in zip(total, v))
    return total


def test_koehler_relations_hold_in_tables(koehler):
    for p, C in koehler.items():
        P = koehler_presentation(p)
        for r in P.relations:
            poly, vertex = r
            assert not any(_evaluate(C, P, poly, vertex)), (p, poly)


def test_koehler_endomorphism_rings(koehler):
    C = koehler[2]
    assert C.rank("A0", "A0") == 2
    t = C.elt("A0", "A0", "t0")
    assert C.compose(t, t) == C.id_elt("A0")
    for p, C in koehler.items():
        assert C.rank("A2", "A2") == 2 * (p - 1)
        t = C.elt("A0", "A0", "t0")
        x = C.id_elt("A0")
        for _ in range(p):
            x = C.compose(t, x)
        assert x == C.id_elt("A0")
        s2, t2 = _arrow(C, "s2", "A2")[1], _arrow(C, "t2", "A2")[1]
        assert C.compose_vec("A2", "A2", "A2", s2, t2) == C.compose_vec("A2", "A2", "A2", t2, s2)


def test_compile_rejects_killed_identity():
    P = Presentation(["v"], {"x": ("v", "v")}, [({(): 1}, "v"), {("x", "x"): 1}])
    with pytest.raises(InconsistentRelations):
        compile_presentation(P, {("v", "v"): 2})


def test_compile_rejects_torsion():
    P = Presentation(["v", "w"], {"x": ("v", "w")}, [{("x",): 2}])
    with pytest.raises(InconsistentRelations):
        compile_presentation(P, {("v", "v"): 1, ("w", "w"): 1, ("v", "w"): 1})


def test_compile_rank_checks():
    P = Presentation(["v"], {"x": ("v", "v")}, [{("x", "x", "x"): 1}])
    assert compile_presentation(P, {("v", "v"): 3}, degree_cap=8).basis("v", "v") == ("id_v", "x", "x*x")
    with pytest.raises(RankNotStabilized):
        compile_presentation(P, {("v", "v"): 2}, degree_cap=8)
    # products of basis paths reach weight 4, beyond the default cap of 2
    with pytest.raises(RankNotStabilized):
        compile_presentation(P, {("v", "v"): 3})
    free = Presentation(["v"], {"x": ("v", "v")}, [])
    with pytest.raises(RankNotStabilized):
        compile_presentation(free, {("v", "v"): 3}, degree_cap=4)


def test_compile_independent_of_arrow_order(koehler):
    P = koehler_presentation(3)
    rng = random.Random(4)
    items = list(P.arrows.items())
    rng.shuffle(items)
    rels = list(P.relations)
    rng.shuffle(rels)
    Q = Presentation(list(reversed(P.vertices)), dict(items), rels, dict(P.weights))
    from uctkit.zcat import koehler_rank_bounds
    D = compile_presentation(Q, koehler_rank_bounds(3))
    C = koehler[3]
    assert C.hom_basis == D.hom_basis
    for key, table in C.comp.items():
        assert D.comp[key] == table


def test_pure_periodic_table_examples():
    C = pure_periodic_cat(12)
    assert C.hom_group("Z/6", "Z/4").invariants() == (0, (2,))
    assert C.basis("Z/6", "Z/4") == ("red_{6,4}",)
    assert C.rank("Z", "SZ") == 0
    assert C.hom_group("Z", "Z").invariants() == (1, ())
    assert C.basis("Z", "Z") == ("red_{0,0}",)
    assert C.rank("Z/5", "Z") == 0
    assert C.hom_group("Z/4", "SZ").invariants() == (0, (4,))
    assert C.hom_group("Z", "Z/7").invariants() == (0, (7,))


def test_groupoid_rejects_bad_table():
    from uctkit.errors import InputError
    with pytest.raises(InputError):
        groupoid_cat([[0, 1], [0, 1]])
