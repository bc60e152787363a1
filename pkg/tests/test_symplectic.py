import random
from math import isqrt

import pytest
from hypothesis import given, strategies as st

from excm import intmat
from excm.errors import DegenerateFormError, FormNotIntegralError, GluePreconditionError
from excm.lattice import Lattice, saturate
from excm.surfaces import random_unimodular
from excm.symplectic import (
    SymplecticLattice,
    discriminant,
    glue_disc_check,
    j_form,
    orthogonal_complement,
    restrict_form,
    symplectic_basis,
)


def test_standard_form():
    s = SymplecticLattice.standard(2)
    assert s.is_perfect()
    assert s.pair((1, 0, 0, 0), (0, 1, 0, 0)) == 1
    assert s.pair((0, 1, 0, 0), (1, 0, 0, 0)) == -1
    assert s.pair((1, 0, 0, 0), (0, 0, 0, 1)) == 0
    assert discriminant(SymplecticLattice.standard(1, 5)) == 25


def test_rejects_bad_gram():
    with pytest.raises(ValueError):
        SymplecticLattice(Lattice.standard(2), ((1, 0), (0, 0)))
    with pytest.raises(ValueError):
        SymplecticLattice(Lattice.standard(2), ((0, 1), (1, 0)))
    with pytest.raises(DegenerateFormError):
        SymplecticLattice(Lattice.standard(2), ((0, 0), (0, 0)))


def test_restriction_to_isotropic_plane_is_degenerate():
    s = SymplecticLattice.standard(2)
    plane = Lattice.from_basis([(1, 0, 0, 0), (0, 0, 1, 0)])
    with pytest.raises(DegenerateFormError) as info:
        restrict_form(s, plane)
    assert info.value.gram == ((0, 0), (0, 0))


def test_restriction_not_integral():
    s = SymplecticLattice.standard(1)
    half = Lattice.from_basis([(1, 0), (0, 1)]).scaled(0.5)
    with pytest.raises(FormNotIntegralError):
        restrict_form(s, half)


def random_gram(seed, k=2, bound=4):
    rng = random.Random(seed)
    divisors = []
    d = 1
    for _ in range(k):
        d *= rng.randint(1, bound)
        divisors.append(d)
    g = intmat.block_diag(*[((0, x), (-x, 0)) for x in divisors])
    u = random_unimodular(rng, 2 * k)
    return intmat.matmul(intmat.matmul(intmat.transpose(u), g), u), tuple(divisors)


@given(st.integers(0, 10**6), st.integers(1, 3))
def test_symplectic_basis_recovers_divisors(seed, k):
    g, divisors = random_gram(seed, k)
    s = SymplecticLattice(Lattice.standard(2 * k), g)
    p, found = symplectic_basis(s)
    assert found == divisors
    assert intmat.is_unimodular(p)
    expect = intmat.block_diag(*[((0, x), (-x, 0)) for x in found])
    assert intmat.matmul(intmat.matmul(intmat.transpose(p), g), p) == expect
    assert discriminant(s) == intmat.det(expect)


@given(st.integers(0, 10**6))
def test_discriminant_is_a_square(seed):
    g, divisors = random_gram(seed, 2, 6)
    d = discriminant(SymplecticLattice(Lattice.standard(4), g))
    assert d == (divisors[0] * divisors[1]) ** 2


def test_glue_disc_on_coordinate_planes():
    s = SymplecticLattice.standard(2)
    l1 = Lattice.from_basis([(1, 0, 0, 0), (0, 1, 0, 0)])
    l2 = Lattice.from_basis([(0, 0, 1, 0), (0, 0, 0, 1)])
    assert glue_disc_check(s, l1, l2) == (1, 1, 1)


def test_glue_disc_on_a_tilted_plane():
    s = SymplecticLattice.standard(2)
    l1 = Lattice.from_basis([(1, 0, 0, 0), (0, 3, 0, 1)])
    assert restrict_form(s, l1).gram == ((0, 3), (-3, 0))
    l2 = orthogonal_complement(s, l1)
    assert glue_disc_check(s, l1, l2) == (9, 9, 9)


def test_glue_preconditions_named_in_order():
    s = SymplecticLattice.standard(2)
    l1 = Lattice.from_basis([(1, 0, 0, 0), (0, 1, 0, 0)])
    l2 = Lattice.from_basis([(0, 0, 1, 0), (0, 0, 0, 1)])
    with pytest.raises(GluePreconditionError, match="form not perfect"):
        glue_disc_check(s.rescaled(2), l1, l2)
    with pytest.raises(GluePreconditionError, match="not a sublattice"):
        glue_disc_check(s, l1.scaled(0.5), l2)
    with pytest.raises(GluePreconditionError, match="not primitive"):
        glue_disc_check(s, l1.scaled(2), l2)
    skew = Lattice.from_basis([(0, 0, 1, 0), (0, 1, 0, 1)])
    with pytest.raises(GluePreconditionError, match="not orthogonal"):
        glue_disc_check(s, l1, skew)
    with pytest.raises(GluePreconditionError, match="sum not of finite index"):
        glue_disc_check(s, l1, Lattice.from_basis([(0, 0, 1, 0)], 4))


@given(st.integers(0, 10**6))
def test_orthogonal_complement_is_saturated_and_orthogonal(seed):
    rng = random.Random(seed)
    u = random_unimodular(rng, 4)
    g = intmat.matmul(intmat.matmul(intmat.transpose(u), j_form(2)), u)
    s = SymplecticLattice(Lattice.standard(4), g)
    v = tuple(rng.randint(-5, 5) for _ in range(4))
    w = tuple(rng.randint(-5, 5) for _ in range(4))
    if intmat.rank(intmat.from_columns([v, w], 4)) < 2 or s.pair(v, w) == 0:
        return
    l1 = saturate(Lattice.from_basis([v, w]), s.lattice)
    l2 = orthogonal_complement(s, l1)
    d1, d2, idx = glue_disc_check(s, l1, l2)
    assert d1 == d2 == idx
    assert isqrt(d1) ** 2 == d1
