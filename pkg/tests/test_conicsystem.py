import json
import random

import pytest

from fermconic import conicsystem, oracle
from fermconic.conicsystem import STable, build_system, explicit_roots, factor_certificate
from fermconic.polyalg import DegenerateExtension, PrimeField

P = 101


@pytest.fixture(scope="module")
def generic():
    return conicsystem.generic_system()


def test_recursion_vanishes_through_k2(generic):
    res = conicsystem.recursion_residuals(generic)
    assert all(r.is_zero() for r in res[:3])


def test_higher_residuals_are_the_five_equations(generic):
    rep = conicsystem.recursion_report(generic)
    assert rep.check("k=3 residual = -(E1 x^2 + E2 y^2)")
    assert rep.check("k=4 residual = -(E3 x + E4 y)")
    assert rep.check("k=5 residual = -E5")


def test_equation_degrees_in_d(generic):
    assert generic.degrees() == (1, 1, 2, 2, 2)


def test_swap_of_tangency_points(generic):
    assert conicsystem.tau_check(generic).ok


def test_flambda_expansion_matches_substitution():
    assert conicsystem.flambda_symbolic_check()


def test_discriminant_lemma():
    assert conicsystem.discriminant_check(samples=2).ok


@pytest.mark.parametrize("seed", range(5))
def test_planted_conic_is_a_solution_with_certificate(seed):
    rng = random.Random(seed)
    inst = oracle.planted_instance(P, rng)
    F = PrimeField(P)
    S = STable(inst.s_table(), F)
    alpha, beta, d = inst.source["conic"]
    system = build_system(S, alpha, beta, F)
    assert all(F.is_zero(v) for v in system.evaluate(d))
    cert = factor_certificate(S, alpha, beta, d, F)
    assert cert.f * cert.g == cert.F
    assert (alpha, beta, d) in conicsystem.solve_system_fp(S, F)


def test_wrong_d_breaks_the_certificate():
    inst = oracle.planted_instance(P, random.Random(9))
    F = PrimeField(P)
    alpha, beta, d = inst.source["conic"]
    with pytest.raises(conicsystem.CertificateFailure):
        factor_certificate(STable(inst.s_table(), F), alpha, beta, (d + 1) % P, F)


def test_explicit_roots_solve_the_quadratics():
    F = PrimeField(P)
    inst = oracle.planted_instance(P, random.Random(4))
    S = STable(inst.s_table(), F)
    roots = explicit_roots(S, F)
    assert roots is not None
    for a in roots["alpha"]:
        assert (S[3, 0] * a * a + 2 * S[3, 1] * a + S[3, 2]) % P == 0
    for b in roots["beta"]:
        assert (S[2, 0] * b * b + 2 * S[1, 1] * b + S[0, 2]) % P == 0


def test_explicit_roots_linear_branch():
    F = PrimeField(P)
    S = STable({(2, 0): 0, (1, 1): 3, (0, 2): 5, (3, 0): 1, (3, 1): 0, (3, 2): -4 % P}, F)
    roots = explicit_roots(S, F)
    assert roots["beta"] == [F.div(-5 % P, 6)]
    assert sorted(roots["alpha"]) == [2, P - 2]


def test_numeric_frame_rejects_repeated_u():
    with pytest.raises(DegenerateExtension):
        conicsystem.numeric_frame([1, 2, 2, 3, 4], P)


def test_numeric_frame_structural_zeros():
    frame = conicsystem.numeric_frame([1, 2, 3, 5, 8], 1000003)
    for mn in conicsystem.STRUCTURAL_ZEROS:
        assert frame.S[mn] == 0


def test_export_is_json_serialisable():
    data = conicsystem.export_system(1)
    assert [e["name"] for e in data["equations"]] == ["E1", "E2", "E3", "E4", "E5"]
    assert len(data["relations"]) == 2
    assert {"alpha", "beta", "d"} <= set(data["variables"])
    json.loads(json.dumps(data))
