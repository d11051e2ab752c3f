import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermconic import conicsystem, symfun
from fermconic.polyalg import PrimeField
from fermconic.symfun import E_RING, U_RING, Report, build_kernel, newton_s, weighted_power_sum

P = 1000003


def esym_values(us, p):
    F = PrimeField(p)
    ring = U_RING.with_domain(F)
    gens = ring.gens()
    return {f"e{k}": symfun.elementary(gens, k, ring).evaluate(dict(zip(U_RING.vars, us))) for k in range(1, 6)}


def test_kernel_vanishing_moments():
    kernel = build_kernel()
    for m in (0, 1, 4, 5):
        assert weighted_power_sum(kernel, m).is_zero()
    assert weighted_power_sum(kernel, 2) == kernel.delta * kernel.esym.e[2]


def test_splitting_of_elementary_functions():
    assert build_kernel().esym.check_splitting()


@pytest.mark.parametrize("m", [6, 7, 8])
def test_newton_recurrence_agrees_with_direct_quotient(m):
    kernel = build_kernel()
    direct = weighted_power_sum(kernel, m).divide_exact(kernel.delta)
    assert symfun.to_u(newton_s(m)) == direct


def test_newton_rejects_negative_index():
    with pytest.raises(ValueError):
        newton_s(-1)


@settings(max_examples=5, deadline=None)
@given(st.lists(st.integers(1, P - 1), min_size=5, max_size=5, unique=True), st.sampled_from([1, 2]))
def test_ebasis_tables_match_numeric_frames(us, option):
    """S_mn from the e-basis route equals the frame computed pointwise from M_i, u_i and l_i."""
    frame = conicsystem.numeric_frame(us, P, option)
    table = symfun.option1_table() if option == 1 else symfun.option2_table()
    point = esym_values(us, P)
    F = PrimeField(P)
    for (m, n) in [(2, 0), (3, 0), (1, 1), (2, 1), (0, 2), (1, 2), (0, 3)]:
        val = table[m, n].map_coeffs(F.convert, E_RING.with_domain(F)).evaluate(point)
        assert val == frame.S[m, n], (m, n)


def test_involution_report_records_exponent_discrepancy():
    rep = symfun.involution_relations()
    assert rep.ok
    assert len(rep.notes) == 3 and all("does not hold" in n for n in rep.notes)


def test_seed_values_for_both_frames():
    assert symfun.seeds_report(symfun.option1_table(), "option 1").ok
    assert symfun.seeds_report(symfun.option2_table(), "option 2").ok


def test_option2_closed_forms():
    rep = symfun.option2_initial_values()
    assert rep.check("S'_21 = prod n_i")
    assert rep.check("S'_02 = -e2 e3^2 S80 prod n_i")
    assert rep.check("S'_12 e2 + S'_02 e3 = e2^2e3^2(e1e2^2e4-e1e2e3^2-e2^2e5+e3^3) prod n_i")


def test_triple_identities_need_minus_e2():
    rep = symfun.base_locus_identities()
    literal = [c for c in rep.checks if c["name"].startswith("triple") and c.get("gated", True)]
    corrected = [c for c in rep.checks if c["name"].endswith("with -e2")]
    assert len(literal) == len(corrected) == 10
    assert all(c["ok"] for c in corrected)
    assert not any(c["ok"] for c in literal)


def test_tau_swap_reverses_ebasis():
    e1, e2, e3, e4, e5 = E_RING.gens()
    assert symfun.tau_swap_ebasis(e1 * e2, 2) == e4 * e3
    assert symfun.tau_swap_ebasis(e1, 2) == e4 * e5


def test_is_symmetric():
    u0, u1, *_ = U_RING.gens()
    assert symfun.is_symmetric(symfun.to_u(newton_s(6)))
    assert not symfun.is_symmetric(u0 - u1, random.Random(1), samples=30)


def test_report_gating():
    rep = Report("demo")
    rep.add("holds", True)
    rep.add("informational", False, gated=False)
    assert rep.ok and not rep.failed()
    assert rep.lines()[-1] == "informational: no"
    rep.add("broken", False, residual="x")
    assert not rep.ok
    assert rep.failed()[0]["residual"] == "x"
    assert rep.lines()[-1] == "broken: FAIL"
