from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from excm import intmat
from excm.errors import EnumerationBudgetExceeded, NotSublatticeError, SingularBasisError
from excm.lattice import (
    Lattice,
    count_hnf_shapes,
    enumerate_sublattices,
    enumerate_superlattices,
    hnf,
    index_of_sublattice,
    is_primitive,
    saturate,
    snf,
)

from oracles import count_index_n, index_n_shapes


def square(k, lo=-6, hi=6):
    return st.lists(st.lists(st.integers(lo, hi), min_size=k, max_size=k), min_size=k, max_size=k)


nonsingular = st.integers(1, 4).flatmap(square).filter(lambda m: intmat.det(m) != 0)


def unimodular_from(ops, k):
    m = [list(r) for r in intmat.identity(k)]
    for i, j, c in ops:
        i, j = i % k, j % k
        if i != j:
            for row in m:
                row[j] += c * row[i]
    return intmat.as_matrix(m)


ops = st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-3, 3)), max_size=8)


def test_hnf_example():
    h = hnf([[2, 0], [1, 3]])
    assert h == ((2, 0), (1, 3))
    assert hnf([[4, 6], [0, 2]]) == ((2, 0), (2, 4))


def test_hnf_rejects_dependent_columns():
    with pytest.raises(SingularBasisError):
        hnf([[1, 2], [2, 4]])


def test_snf_example():
    d, u, v = snf([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert [d[i][i] for i in range(3)] == [2, 6, 12]
    assert intmat.matmul(intmat.matmul(u, ((2, 4, 4), (-6, 6, 12), (10, -4, -16))), v) == d


@given(nonsingular, ops)
def test_hnf_is_a_basis_invariant(m, change):
    k = len(m)
    u = unimodular_from(change, k)
    assert hnf(m) == hnf(intmat.matmul(m, u))


@given(nonsingular)
def test_hnf_shape(m):
    h = hnf(m)
    k = len(h)
    for j in range(k):
        assert h[j][j] > 0
        assert all(h[i][j] == 0 for i in range(j))
        assert all(0 <= h[j][i] < h[j][j] for i in range(j))
    assert abs(intmat.det(h)) == abs(intmat.det(m))


@given(st.integers(1, 4).flatmap(lambda k: square(k, -9, 9)))
def test_snf_divisibility_and_transforms(m):
    d, u, v = snf(m)
    assert intmat.is_unimodular(u) and intmat.is_unimodular(v)
    assert intmat.matmul(intmat.matmul(u, m), v) == d
    diag = [d[i][i] for i in range(len(d))]
    assert all(x >= 0 for x in diag)
    assert all(d[i][j] == 0 for i in range(len(d)) for j in range(len(d)) if i != j)
    for a, b in zip(diag, diag[1:]):
        assert (a == 0 and b == 0) or (a != 0 and b % a == 0)


@given(nonsingular, nonsingular)
def test_det_multiplicative(a, b):
    if len(a) == len(b):
        assert intmat.det(intmat.matmul(a, b)) == intmat.det(a) * intmat.det(b)


@given(nonsingular)
def test_inverse_roundtrip(m):
    inv = intmat.inverse(m)
    assert intmat.matmul(m, inv) == intmat.identity(len(m))


def test_lattice_json_roundtrip():
    lat = Lattice.from_basis([(Fraction(1, 2), 1, 0), (0, 3, 1)])
    back = Lattice.from_json(lat.to_json())
    assert back == lat
    assert lat.to_json()["rank"] == 2


def test_lattice_canonical_under_rational_scaling():
    a = Lattice.from_basis([(1, 1), (1, -1)])
    b = Lattice.from_basis([(2, 0), (1, -1)])
    assert a == b
    assert a.scaled(Fraction(1, 2)).denominator == 2


@given(nonsingular, ops)
def test_equal_lattices_from_different_bases(m, change):
    k = len(m)
    u = unimodular_from(change, k)
    a = Lattice.from_matrix(m)
    b = Lattice.from_matrix(intmat.matmul(m, u))
    assert a == b
    assert a.volume() == abs(intmat.det(m))


def test_index_and_containment():
    big = Lattice.standard(2)
    small = Lattice.from_basis([(2, 0), (0, 3)])
    assert index_of_sublattice(small, big) == 6
    with pytest.raises(NotSublatticeError):
        index_of_sublattice(big, small)
    assert big.contains((5, -7)) and not small.contains((1, 0))


@given(nonsingular, st.integers(0, 3))
def test_index_multiplicative(m, extra):
    k = len(m)
    sub = Lattice.from_matrix(m)
    top = Lattice.standard(k)
    mid = sub + Lattice.from_basis([tuple(int(i == extra % k) for i in range(k))], k)
    assert index_of_sublattice(sub, top) == abs(intmat.det(m))
    assert index_of_sublattice(sub, mid) * index_of_sublattice(mid, top) == index_of_sublattice(sub, top)


def test_saturation_example():
    sub = Lattice.from_basis([(2, 4, 0)], 3)
    sat = saturate(sub, Lattice.standard(3))
    assert sat == Lattice.from_basis([(1, 2, 0)], 3)
    assert index_of_sublattice(sub, sat) == 2
    assert not is_primitive(sub, Lattice.standard(3))


@given(st.lists(st.integers(-8, 8), min_size=4, max_size=4), st.lists(st.integers(-8, 8), min_size=4, max_size=4))
def test_saturation_is_idempotent(v, w):
    if intmat.rank(intmat.from_columns([tuple(v), tuple(w)], 4)) < 2:
        return
    top = Lattice.standard(4)
    sub = Lattice.from_basis([tuple(v), tuple(w)], 4)
    sat = saturate(sub, top)
    assert saturate(sat, top) == sat
    assert sat.contains_lattice(sub)
    # saturation is minimal: no proper superlattice in the same span is primitive
    assert is_primitive(sat, top)


@pytest.mark.parametrize("k,n", [(1, 7), (2, 1), (2, 6), (2, 12), (3, 4), (3, 12), (4, 6)])
def test_sublattice_counts_match_closed_form(k, n):
    assert count_hnf_shapes(k, n) == count_index_n(k, n)
    assert count_index_n(k, n) == sum(1 for _ in index_n_shapes(k, n))


@pytest.mark.parametrize("n", [1, 2, 3, 6, 10])
def test_enumerate_sublattices_of_z2(n):
    subs = enumerate_sublattices(Lattice.standard(2), n)
    assert len(subs) == count_index_n(2, n)
    assert len(set(subs)) == len(subs)
    assert all(index_of_sublattice(s, Lattice.standard(2)) == n for s in subs)


def test_enumerate_sublattices_of_a_skew_lattice():
    base = Lattice.from_basis([(1, 1, 0), (0, 2, 1), (0, 0, 3)])
    subs = enumerate_sublattices(base, 4)
    assert len(subs) == count_index_n(3, 4)
    assert all(base.contains_lattice(s) and index_of_sublattice(s, base) == 4 for s in subs)


def test_enumeration_budget():
    with pytest.raises(EnumerationBudgetExceeded):
        enumerate_sublattices(Lattice.standard(4), 64, budget=100)


def subgroups_of_order(n, order):
    """Subgroups of (Z/n)^2 of the given order, by brute force over generator pairs."""
    elems = [(a, b) for a in range(n) for b in range(n)]
    seen = set()
    for g in elems:
        for h in elems:
            grp = frozenset(((i * g[0] + j * h[0]) % n, (i * g[1] + j * h[1]) % n) for i in range(n) for j in range(n))
            if len(grp) == order:
                seen.add(grp)
    return seen


@pytest.mark.parametrize("n,index", [(2, 2), (2, 4), (3, 3), (4, 4), (6, 6)])
def test_superlattices_match_subgroup_count(n, index):
    base = Lattice.standard(2)
    sups = enumerate_superlattices(base, n, index=index)
    assert len(sups) == len(subgroups_of_order(n, index))
    for m in sups:
        assert m.contains_lattice(base)
        assert base.scaled(Fraction(1, n)).contains_lattice(m)
        assert index_of_sublattice(base, m) == index
