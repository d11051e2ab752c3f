import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermconic import bitangent
from fermconic.bitangent import BaseLocus, EmptyKernel, PointP4
from fermconic.polyalg import QQ, PrimeField

F = PrimeField(1013)
distinct = st.lists(st.integers(1, 1012), min_size=5, max_size=5, unique=True)


def test_point_equality_is_projective():
    assert PointP4((1, 2, 3, 4, 5)) == PointP4((2, 4, 6, 8, 10))
    assert PointP4((1, 2, 3, 4, 5)) != PointP4((1, 2, 3, 4, 6))
    with pytest.raises(ValueError):
        PointP4((0, 0, 0, 0, 0))
    with pytest.raises(ValueError):
        PointP4((1, 2, 3))


@given(distinct)
def test_kernel_sums_vanish(us):
    U = PointP4(tuple(us), F)
    M = bitangent.kernel_factors(U)[2]
    for m in (0, 1, 4, 5):
        assert sum(Mi * pow(u, m, 1013) for Mi, u in zip(M, us)) % 1013 == 0


@given(distinct)
def test_iota_twists_m_by_fifth_powers(us):
    U = PointP4(tuple(us), F)
    M = bitangent.m_map(U)
    twisted = PointP4(tuple(m * pow(u, 5, 1013) for m, u in zip(M, us)), F)
    assert bitangent.m_map(bitangent.iota(U)) == twisted


def test_iota_is_an_involution_projectively():
    U = PointP4((1, 2, 3, 5, 7), QQ)
    assert bitangent.iota(bitangent.iota(U)) == U


@settings(max_examples=20)
@given(distinct)
def test_fifth_roots_of_m_give_bitangent_points(us):
    # p = 1013 is not 1 mod 5, so fifth roots exist and are unique
    U = PointP4(tuple(us), F)
    M = bitangent.m_map(U)
    e = pow(5, -1, 1012)
    c = [pow(m, e, 1013) for m in M]
    P = PointP4(tuple(c), F)
    Q = PointP4(tuple(ci * u % 1013 for ci, u in zip(c, us)), F)
    assert all(r == 0 for r in bitangent.contact_residuals(P, Q))


def test_base_locus_on_small_field_matches_classifier():
    G = PrimeField(5)
    for us in itertools.product(range(5), repeat=5):
        if not any(us):
            continue
        U = PointP4(us, G)
        in_locus = not isinstance(bitangent.base_locus_classify(U), bitangent.NotInBaseLocus)
        try:
            bitangent.m_map(U)
            raised = False
        except BaseLocus:
            raised = True
        assert raised == in_locus, us


def test_equal_pairs_lie_in_the_base_locus():
    with pytest.raises(BaseLocus):
        bitangent.m_map(PointP4((1, 1, 2, 2, 3), QQ))


@pytest.mark.parametrize("ks", [(0, 0, 2, 2), (1, 3, 0, 2), (1, 1, 1, 1)])
def test_exceptional_tag_recovers_planted_twist(ks):
    G = PrimeField(13)
    i_unit = G.sqrt(G.convert(-1))
    P = PointP4((1, 2, 3, 4, 6), G)
    tag = bitangent.exceptional_tag(P, bitangent.sigma(P, ks, i_unit))
    assert tag.found and tag.k == ks
    assert tag.nontrivial == any(ks)


def test_exceptional_tag_without_unit_tries_even_twists_only():
    P = PointP4((1, 2, 3, 4, 6), QQ)
    Q = PointP4((1, -2, 3, -4, 6), QQ)
    tag = bitangent.exceptional_tag(P, Q)
    assert tag.even_only and tag.k == (2, 0, 2, 0)
    assert not bitangent.exceptional_tag(P, PointP4((1, 2, 3, 4, 7), QQ)).found


@pytest.mark.parametrize("d", [1, 2])
def test_dwork_planted_curves_round_trip(d):
    rng = random.Random(d)
    for _ in range(5):
        inst = bitangent.plant_dwork_instance(1009, d, rng)
        sol = bitangent.dwork_cover_solve(inst.roots, d, PrimeField(1009))
        assert sol.certified
        assert PointP4(sol.fifth_powers, PrimeField(1009)) == PointP4(inst.fifth_powers, PrimeField(1009))
        assert sol.lifts == 625


def test_dwork_random_roots_give_no_curve():
    rng = random.Random(3)
    G = PrimeField(1009)
    empty = 0
    for _ in range(5):
        roots = [[rng.randrange(1009) for _ in range(3)] for _ in range(5)]
        try:
            bitangent.dwork_cover_solve(roots, 2, G)
        except EmptyKernel:
            empty += 1
    assert empty == 5


def test_dwork_shape_is_validated():
    with pytest.raises(ValueError):
        bitangent.dwork_cover_solve([[1, 2]] * 4, 1, PrimeField(1009))


def test_reports_pass():
    assert bitangent.bitangent_report(samples=5).ok
    assert bitangent.dwork_roundtrip(count=5).ok
