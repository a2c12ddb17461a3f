import random

import pytest
from hypothesis import given, settings, strategies as st

from uctkit.errors import InputError, NotGorensteinProjective
from uctkit.filtkk import (G, TriangleInC, char_module, check_filtration, f_exact_check, filtration, fk_category,
                           is_gproj, proof_sequence, quotient_by, random_gproj_module, sufficient_family,
                           triangle_images, triangles)
from uctkit.lattice import FpAbGroup, IntMatrix
from uctkit.modules import (CModuleMap, check_short_exact, extension_class, is_isomorphic_rank_le_one,
                            representable, skyscraper, validate_module, zero_module)
from uctkit.zcat import fk_domain, fk_label


def test_char_module_examples():
    S = char_module(2, G(1, 1, 1, 1))
    assert S.support() == ["A[1,1]"]
    M = char_module(2, G(1, 1, 1, 2))
    assert sorted(M.support()) == ["A[1,1]", "A[1,2]"]
    assert M.act("A[1,1]", "A[1,2]", 0).tolist() == [[1]]
    assert is_isomorphic_rank_le_one(M, representable(fk_category(2), "A[1,2]"))
    with pytest.raises(InputError):
        char_module(2, G(1, 1, 2, 1))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_representables_are_char_modules(n):
    C = fk_category(n)
    for a, b in fk_domain(n):
        M = char_module(n, G(b - n + 1, a, a, b))
        assert validate_module(M) == []
        assert is_gproj(M)
        assert is_isomorphic_rank_le_one(M, representable(C, fk_label(n, a, b)))


def test_is_gproj_rejects_torsion():
    C = fk_category(2)
    assert not is_gproj(skyscraper(C, "A[1,1]", FpAbGroup.from_invariants(0, [2])))
    S = skyscraper(C, "A[1,1]")
    times2 = CModuleMap(S, S, {"A[1,1]": IntMatrix.from_rows([[2]], 1)})
    Q, _ = times2.cokernel()
    assert not is_gproj(Q)
    with pytest.raises(NotGorensteinProjective):
        filtration(Q)


def test_filtration_examples():
    C = fk_category(2)
    assert filtration(zero_module(C)).layers == []
    c = filtration(skyscraper(C, "A[1,1]"))
    assert [(l.position, l.multiplicity) for l in c.layers] == [((1, 1), 1)]
    c = filtration(char_module(2, G(1, 1, 1, 2)))
    assert [(l.position, l.multiplicity) for l in c.layers] == [((1, 1), 1), ((1, 2), 1)]
    assert check_filtration(c) == []


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_filtration_of_representables(n):
    C = fk_category(n)
    for a, b in fk_domain(n):
        R = representable(C, fk_label(n, a, b))
        cert = filtration(R)
        assert check_filtration(cert) == []
        assert cert.total_rank() == R.total_rank()


def test_filtration_certificate_mutations_fail():
    cert = filtration(char_module(3, G(1, 2, 2, 3)))
    assert check_filtration(cert) == []
    cert.layers[0].multiplicity += 1
    assert check_filtration(cert)
    cert = filtration(char_module(3, G(1, 2, 2, 3)))
    cert.chain.pop()
    cert.layers.pop()
    assert any(f.kind == "chain does not end at M" for f in check_filtration(cert))
    cert = filtration(char_module(3, G(1, 2, 2, 3)))
    cert.chain[0], cert.chain[-1] = cert.chain[-1], cert.chain[0]
    assert check_filtration(cert)


def test_filtration_with_multiplicity():
    from uctkit.modules import direct_sum_modules
    S = skyscraper(fk_category(2), "A[2,3]")
    cert = filtration(direct_sum_modules([S, S, S]))
    assert [(l.position, l.multiplicity) for l in cert.layers] == [((2, 3), 3)]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_random_gproj_filtration(seed, n):
    M = random_gproj_module(n, random.Random(seed), max_rank=6)
    assert is_gproj(M) and validate_module(M) == []
    cert = filtration(M)
    assert check_filtration(cert) == []
    assert cert.total_rank() == M.total_rank()
    # the tail of the certificate is the certificate of the quotient
    i = len(cert.layers) // 2
    tail = filtration(quotient_by(cert, i))
    assert [(l.position, l.multiplicity) for l in tail.layers] == \
        [(l.position, l.multiplicity) for l in cert.layers[i:]]


def test_triangle_image_examples():
    t = triangle_images(2, 1, 1, 2)
    # the formula G^{b'-n+1,a}_{a,b} gives the skyscraper here; G^{0,1}_{1,1} is h_{A11} itself
    assert t.first_spec == G(1, 1, 1, 1) and t.first_ok
    assert not is_isomorphic_rank_le_one(t.first, char_module(2, G(0, 1, 1, 1)))
    t = triangle_images(3, 1, 1, 3)
    assert t.second_spec == G(1, 2, 1, 3) and t.second_ok
    for M in (t.first, t.second):
        assert all(M.values[c].invariants() in ((0, ()), (1, ())) for c in M.C.objects)
    with pytest.raises(InputError):
        triangle_images(2, 1, 2, 2)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_all_triangle_images(n):
    for t in triangles(n):
        r = triangle_images(n, t.a, t.b, t.b2)
        assert r.first_ok and r.second_ok, t


def test_image_verdict_detects_wrong_rectangle():
    t = triangle_images(3, 1, 1, 3)
    assert not is_isomorphic_rank_le_one(t.second, char_module(3, G(1, 2, 1, 2)))
    assert not is_isomorphic_rank_le_one(t.second, char_module(3, G(1, 3, 1, 3)))


@pytest.mark.parametrize("n", [2, 3])
def test_representables_are_f_exact(n):
    C = fk_category(n)
    for t in triangles(n):
        for a, b in fk_domain(n):
            assert f_exact_check(representable(C, fk_label(n, a, b)), t)[0]
        assert f_exact_check(zero_module(C), t)[0]


def test_skyscraper_is_not_f_exact():
    ok, js = f_exact_check(skyscraper(fk_category(2), "A[1,1]"), TriangleInC(2, 1, 1, 2))
    assert not ok
    assert any(not j.exact for j in js)


def test_sufficient_family():
    r1 = sufficient_family(1)
    assert r1.ok and r1.triangles == [] and r1.sequences == []
    assert all(w[0][0] == "representable" for w in r1.witnesses.values())
    r2 = sufficient_family(2)
    assert r2.ok and r2.sequences == []
    r3 = sufficient_family(3)
    assert r3.ok
    assert all(s.exact and not s.split for s in r3.sequences)
    assert r3.witnesses[(1, 2)][0][0] == "extension"


def test_proof_sequence_non_split():
    f, g = proof_sequence(3, 1, 2)
    assert f.validate() == [] and g.validate() == []
    assert check_short_exact(f, g) == []
    ext, cocycle, split = extension_class(f, g)
    assert not split
    assert ext.invariants() == (1, ())


def test_split_sequence_has_zero_class():
    from uctkit.modules import direct_sum_modules
    C = fk_category(3)
    X, Y = char_module(3, G(1, 1, 1, 2)), char_module(3, G(2, 2, 2, 3))
    E = direct_sum_modules([X, Y])
    inc = {c: IntMatrix.from_cols([[1] + [0] * Y.values[c].ngens] if X.values[c].ngens else [],
                                  E.values[c].ngens) if X.values[c].ngens else IntMatrix.zero(E.values[c].ngens, 0)
           for c in C.objects}
    proj = {}
    for c in C.objects:
        rx, ry = X.values[c].ngens, Y.values[c].ngens
        proj[c] = IntMatrix.from_rows([[0] * rx + [1] * ry] if ry else [], rx + ry) if ry \
            else IntMatrix.zero(0, rx)
    f, g = CModuleMap(X, E, inc), CModuleMap(E, Y, proj)
    assert check_short_exact(f, g) == []
    assert extension_class(f, g)[2]
