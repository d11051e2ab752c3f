import json
import random

import pytest

from fermconic import oracle
from fermconic.oracle import IdentityCheck, PrimeTooLarge, SectionInstance
from fermconic.polyalg import PolyRing, QQ

P = 101


def test_identity_test_accepts_true_identity():
    ring = PolyRing(("x", "y"), QQ)
    x, y = ring.gens()
    verdict = oracle.identity_test(IdentityCheck((x + y) ** 3, x ** 3 + 3 * x * x * y + 3 * x * y * y + y ** 3))
    assert verdict.passed and verdict.bound <= 2.0 ** -40 and verdict.witness is None


def test_identity_test_returns_witness_for_false_identity():
    ring = PolyRing(("x", "y"), QQ)
    x, y = ring.gens()
    verdict = oracle.identity_test(IdentityCheck((x + y) ** 2, x ** 2 + y ** 2, name="bad"))
    assert not verdict.passed
    pt = verdict.witness
    assert (2 * pt["x"] * pt["y"]) % oracle.MERSENNE61 != 0


def test_identity_test_refuses_small_prime():
    ring = PolyRing(("x",), QQ)
    x = ring.gen("x")
    with pytest.raises(ValueError):
        oracle.identity_test(IdentityCheck(x ** 10, x ** 10, p=101))


def test_standard_identities_meet_the_bound():
    assert all(v.passed and v.bound <= oracle.SZ_TARGET for v in oracle.standard_identity_checks())


@pytest.mark.parametrize("seed", range(3))
def test_planted_conic_found_by_both_sides(seed):
    inst = oracle.planted_instance(P, random.Random(seed))
    assert inst.singular_at_p_and_q()
    ok, sys_sols, brute = oracle.compare(inst)
    assert ok
    assert tuple(inst.source["conic"]) in brute


def test_brute_force_cofactors_multiply_back():
    inst = oracle.planted_instance(P, random.Random(11))
    ring = inst.poly().ring
    x, y, z = ring.gens()
    found = oracle.brute_force_conics(inst, with_cofactors=True)
    assert found
    for conic, g in found:
        f = x * y - x * z * conic.beta - y * z * conic.alpha + z * z * conic.d
        assert f * ring.from_dict(g) == inst.poly()


def test_random_bitangent_sections_carry_no_conics():
    insts, _ = oracle.sample_admissible(P, random.Random(5), 3)
    for inst in insts:
        ok, sys_sols, brute = oracle.compare(inst)
        assert ok and not brute


def test_swap_of_tangency_points_preserves_agreement():
    inst = oracle.planted_instance(P, random.Random(2))
    alpha, beta, d = inst.source["conic"]
    ok, _, brute = oracle.compare(inst.swapped())
    assert ok and (beta, alpha, d) in brute


def test_s3_family_conic_is_enumerated():
    inst, conic = oracle.s3_family_instance(P, random.Random(1))
    assert inst.singular_at_p_and_q()
    ok, _, brute = oracle.compare(inst)
    assert ok and conic in brute


def test_exceptional_family_sections_agree():
    for inst in oracle.exceptional_samples(P, random.Random(3), 2):
        assert oracle.compare(inst)[0]


def test_exceptional_instance_requires_curve_point():
    with pytest.raises(ValueError):
        oracle.exceptional_instance(2, 1, 1, 1, P)


def test_prime_guards():
    inst = oracle.planted_instance(103, random.Random(0))
    with pytest.raises(PrimeTooLarge):
        oracle.brute_force_conics(inst)
    with pytest.raises(PrimeTooLarge):
        oracle.cross_validate(samples=1, p=103)
    with pytest.raises(ValueError):
        oracle.brute_force_conics(oracle.planted_instance(5, random.Random(0)))


def test_instance_json_and_replay(tmp_path):
    inst = oracle.planted_instance(P, random.Random(8))
    data = inst.to_json()
    again = SectionInstance.from_json(json.loads(json.dumps(data)))
    assert again.coeffs == inst.coeffs and again.s_table() == inst.s_table()
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(data))
    ok, sys_sols, brute = oracle.replay(str(path))
    assert ok and brute


def test_small_cross_validation_run():
    rep = oracle.cross_validate(samples=3, seed=1, exceptional=1, planted=1)
    assert rep.ok
    assert rep.samples == rep.agreed == 3
    payload = rep.to_json()
    assert payload["ok"] and json.dumps(payload)
    assert rep.lines()[-1] == "overall: OK"
