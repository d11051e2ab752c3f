import pytest

from fermconic import casestudy


@pytest.fixture(scope="module")
def report():
    return casestudy.casestudy_report()


def test_s_table_matches_closed_forms():
    assert casestudy.smn_report().ok
    assert casestudy.exceptional_smn() == casestudy.displayed_smn()


def test_points_span_tangent_hyperplane():
    assert casestudy.tangent_hyperplane_check()


def test_q1_equals_q2_and_f3_f4(report):
    assert report.check("q1 = q2")
    assert report.check("f3 = -20 t^2(t-1)^2 a^5 b^5 c^5")
    assert report.check("f4 = -20 t^2(t-1)^2 a^5 b^5 c^5")


def test_f5_specializations(report):
    assert report.check("f5|t=0 = 2b^20(b^20-1)")
    assert report.check("f5|b+c=0 = 2(t-1)^8b^20(b^20-1)")
    # the other two hold in the corrected form
    assert report.check("f5|t=1 = 2a^20(a^20-1) (mod curve)")
    assert report.check("f5|c=0 = 2b^20(b^20-1)")
    assert not report.check("f5|t=1 = a^4(a^20-1)")


def test_q_structure_first_four_equations():
    rep = casestudy.q_structure_report(samples=2)
    assert rep.ok
    for k in range(1, 5):
        assert any(c["name"].startswith(f"E{k}(") and c["ok"] for c in rep.checks)


def test_solution_families():
    assert casestudy.classify_solutions().ok


def test_orbit_witnesses_exist():
    assert casestudy.orbit_witnesses().ok


def test_normal_form_detects_membership():
    ring = casestudy.tabc_ring().with_domain(casestudy.PrimeField(181))
    t, a, b, c = ring.gens()
    rel = (t - 1, "t")
    assert casestudy.normal_form((t - 1) * a, [rel]).is_zero()
    assert not casestudy.normal_form(t * a, [rel]).is_zero()


def test_z2z2_example():
    assert casestudy.verify_example_z2z2().ok


def test_s3_example_with_corrected_curve():
    rep = casestudy.verify_example_s3()
    assert rep.check("conic divides F_psi on the plane (curve with +5 psi^2 a b^2 c^2)")
    assert rep.check("cofactor proportional to e3 - e1 e2 + psi e1 x3 x4")
    assert rep.check("psi=0: cofactor is -5 (x0+x1)(x0+x2)(x1+x2)")
    assert not rep.check("conic divides F_psi on the plane (displayed curve)")


def test_line_count_constant():
    assert casestudy.lines_contribution_constant() == 2875
    assert casestudy.constants_report().ok
