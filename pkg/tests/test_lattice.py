import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import (all_groups, brute_ext_order, brute_hom_order, determinantal_divisors,
                     linear_hom, random_matrix, scrambled)
from uctkit.errors import DimensionMismatch, NonzeroComposite, NotComposable
from uctkit.lattice import (AbMap, FpAbGroup, IntMatrix, exactness_check, ext1_group, hermite_solve,
                            hom_group, homology_at, kernel_basis, lattice_basis, smith_normal_form)


def M(rows):
    return IntMatrix.from_rows(rows)


def check_smith(A):
    sf = smith_normal_form(A)
    assert sf.U @ A @ sf.V == sf.D
    assert abs(sf.U.det()) == 1 and abs(sf.V.det()) == 1
    d = sf.diagonal
    for i in range(A.rows):
        for j in range(A.cols):
            if i != j:
                assert sf.D[i, j] == 0
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert d[:len(nz)] == nz
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    return sf


def test_smith_examples():
    sf = check_smith(IntMatrix.identity(2))
    assert sf.D == IntMatrix.identity(2) and sf.U == IntMatrix.identity(2) and sf.V == IntMatrix.identity(2)
    assert check_smith(IntMatrix.zero(2, 3)).D.is_zero()
    assert check_smith(M([[2, 4], [6, 8]])).diagonal == [2, 4]


def test_smith_empty_shapes():
    check_smith(IntMatrix.zero(0, 3))
    check_smith(IntMatrix.zero(3, 0))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.randoms(use_true_random=False))
def test_smith_matches_determinantal_divisors(m, n, rnd):
    A = random_matrix(rnd, m, n, 20)
    sf = check_smith(IntMatrix.from_rows(A, n))
    nz = [x for x in sf.diagonal if x]
    assert nz == determinantal_divisors(A)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.randoms(use_true_random=False))
def test_smith_independent_of_row_column_order(m, n, rnd):
    A = random_matrix(rnd, m, n, 30)
    rows = list(range(m))
    cols = list(range(n))
    rnd.shuffle(rows)
    rnd.shuffle(cols)
    B = [[A[i][j] for j in cols] for i in rows]
    assert (smith_normal_form(IntMatrix.from_rows(A, n)).D
            == smith_normal_form(IntMatrix.from_rows(B, n)).D)


def test_smith_large_entries_exact():
    A = M([[10 ** 30, 3], [7, 10 ** 25 + 1]])
    check_smith(A)


def test_hermite_solve_examples():
    s = hermite_solve(M([[2]]), [4])
    assert s.x == [2] and s.kernel == []
    assert hermite_solve(M([[2]]), [3]).x is None
    s = hermite_solve(M([[2, 3]]), [1])
    assert s.x == [-1, 1] and s.kernel == [[3, -2]]
    with pytest.raises(DimensionMismatch):
        hermite_solve(M([[2, 3]]), [1, 2])


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.randoms(use_true_random=False))
def test_hermite_solve_random(m, n, rnd):
    A = IntMatrix.from_rows(random_matrix(rnd, m, n, 9), n)
    x0 = [rnd.randint(-5, 5) for _ in range(n)]
    s = hermite_solve(A, A @ x0)
    assert s.x is not None and A @ s.x == A @ x0
    for k in s.kernel:
        assert not any(A @ k)
    # rank-nullity
    assert len(s.kernel) == n - smith_normal_form(A).rank


def test_kernel_basis_is_saturated():
    A = M([[2, 4, 6]])
    K = kernel_basis(A)
    assert len(K) == 2
    assert lattice_basis(K + [[-2, 1, 0], [-3, 0, 1]], 3) == K


def test_group_canonical_forms():
    G = FpAbGroup(3, M([[2, 0], [0, 3], [0, 0]]))
    assert G.invariants() == (1, (6,))
    assert repr(G) == "FpAbGroup(Z/6 + Z)"
    assert FpAbGroup.cyclic(1).is_trivial()
    assert FpAbGroup.from_invariants(2, (2, 4)).invariants() == (2, (2, 4))
    assert G.order() is None and FpAbGroup.cyclic(12).order() == 12


def test_hom_examples():
    H = FpAbGroup(2, M([[4], [2]]))
    assert hom_group(FpAbGroup.free(1), H).isomorphic(H)
    assert hom_group(FpAbGroup.cyclic(4), FpAbGroup.cyclic(6)).invariants() == (0, (2,))
    for a in range(2, 9):
        assert hom_group(FpAbGroup.cyclic(a), FpAbGroup.free(1)).is_trivial()


def test_hom_generators_are_maps_and_coords_roundtrip():
    rng = random.Random(3)
    G = scrambled(1, (2, 4), rng)
    H = scrambled(1, (6,), rng)
    Hm = hom_group(G, H)
    for k, f in enumerate(Hm.generators):
        assert f.is_well_defined()
        e = [0] * Hm.rank
        e[k] = 1
        assert Hm.coords(f) == e


def test_ext_examples():
    Z = FpAbGroup.free(1)
    assert ext1_group(Z, FpAbGroup.cyclic(6)).is_trivial()
    assert ext1_group(FpAbGroup.cyclic(4), FpAbGroup.cyclic(6)).invariants() == (0, (2,))
    for a in range(2, 9):
        assert ext1_group(FpAbGroup.cyclic(a), Z).invariants() == (0, (a,))


def test_ext_class_of_cocycle():
    # 0 -> Z -> Z -> Z/4 -> 0: cocycle on the relator 4 is the value in Z/6
    E = ext1_group(FpAbGroup.cyclic(4), FpAbGroup.cyclic(6))
    assert E.class_of([[1]]) == [1]
    assert E.class_of([[2]]) == [0]
    assert E.class_of([[3]]) == [1]


def test_oracle_equivalence_all_small_groups():
    rng = random.Random(0)
    groups = all_groups(3, 8)
    for fG, tG in groups:
        G = scrambled(fG, tG, rng)
        for fH, tH in groups:
            H = scrambled(fH, tH, rng)
            E = ext1_group(G, H)
            assert E.order() == brute_ext_order(list(tG) + [0] * fG, list(tH) + [0] * fH)
            Hm = hom_group(G, H)
            if fH == 0:
                assert Hm.order() == brute_hom_order(list(tG) + [0] * fG, list(tH))


def test_hom_matches_linear_system_and_is_presentation_invariant():
    rng = random.Random(1)
    groups = all_groups(2, 6)
    for fG, tG in groups:
        for fH, tH in groups:
            G1, G2 = scrambled(fG, tG, rng), scrambled(fG, tG, rng)
            H1, H2 = scrambled(fH, tH, rng), scrambled(fH, tH, rng)
            a = hom_group(G1, H1).invariants()
            assert a == hom_group(G2, H2).invariants() == linear_hom(G1, H1).invariants()
            assert ext1_group(G1, H1).invariants() == ext1_group(G2, H2).invariants()


def test_map_kernel_image_cokernel():
    Z = FpAbGroup.free(1)
    two = AbMap(Z, Z, M([[2]]))
    assert two.kernel()[0].is_trivial()
    assert two.cokernel()[0].invariants() == (0, (2,))
    assert two.image()[0].invariants() == (1, ())
    Z6 = FpAbGroup.cyclic(6)
    f = AbMap(Z6, Z6, M([[2]]))
    assert f.is_well_defined()
    assert f.kernel()[0].invariants() == (0, (2,))
    assert f.image()[0].invariants() == (0, (3,))
    assert not AbMap(FpAbGroup.cyclic(4), Z6, M([[1]])).is_well_defined()


def test_exactness_examples():
    Z = FpAbGroup.free(1)
    Z2 = FpAbGroup.cyclic(2)
    O = FpAbGroup.free(0)
    seq = [AbMap(O, Z, IntMatrix.zero(1, 0)), AbMap(Z, Z, M([[2]])), AbMap(Z, Z2, M([[1]])),
           AbMap(Z2, O, IntMatrix.zero(0, 1))]
    assert all(j.exact for j in exactness_check(seq))
    zero = AbMap(Z, Z, M([[0]]))
    (j,) = exactness_check([zero, zero])
    assert not j.exact
    assert j.kernel.invariants() == (1, ()) and j.image.is_trivial()
    assert homology_at(zero, zero).invariants() == (1, ())


def test_exactness_errors():
    Z = FpAbGroup.free(1)
    one = AbMap(Z, Z, M([[1]]))
    with pytest.raises(NonzeroComposite) as e:
        exactness_check([one, one])
    assert e.value.junction == 0
    with pytest.raises(NotComposable):
        exactness_check([one, AbMap(FpAbGroup.free(2), Z, M([[1, 0]]))])


def test_periodic_group_ring_sequence_exact():
    # U = Z[t]/(1-t^2) with basis {1, t}; multiplication by N(t) = 1+t and by 1-t
    U = FpAbGroup.free(2)
    N = AbMap(U, U, M([[1, 1], [1, 1]]))
    D = AbMap(U, U, M([[1, -1], [-1, 1]]))
    verdicts = exactness_check([N, D, N, D, N])
    assert all(j.exact for j in verdicts)
