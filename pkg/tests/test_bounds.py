import numpy as np
import pytest

from hodgebench.bounds import (
    GeometryCase,
    equality_case_diagnostics,
    main_lower_bound,
    minimal_upper_bound_constant,
    parallel_restriction_check,
    special_killing_relation,
    upper_bound_degree_one,
    upper_bound_degree_p,
    verdict_table,
    verdicts_to_json,
    xia_bound,
)
from hodgebench.exterior import AlternatingForm
from hodgebench.meshes import generate_ball, generate_torus
from hodgebench.spectrum import sphere_hodge_oracle


# ---------------------------------------------------------------------------
# analytic sphere equalities


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("radius", [1.0, 2.0, 0.5])
def test_sphere_lower_bound_equality(n, radius):
    case = GeometryCase.sphere(n, radius)
    for p in range(1, (n + 1) // 2 + 1):
        verdict = main_lower_bound(case, p)
        assert verdict.satisfied
        assert verdict.tightness <= 1e-12


@pytest.mark.parametrize("radius", [1.0, 3.0])
def test_sphere_xia_equality(radius):
    for n in (1, 2, 3, 4):
        verdict = xia_bound(GeometryCase.sphere(n, radius))
        assert verdict.satisfied
        assert verdict.tightness <= 1e-12
        assert np.isclose(verdict.rhs, n / radius**2)


def test_circle_upper_bound_equality():
    verdict = upper_bound_degree_one(GeometryCase.sphere(1, 1.0))
    assert verdict.satisfied
    assert verdict.tightness <= 1e-12
    assert verdict.lhs == 1.0 and verdict.rhs == 1.0


def test_sphere_upper_bound_degree_one_satisfied():
    verdict = upper_bound_degree_one(GeometryCase.sphere(2, 1.0))
    assert verdict.satisfied
    assert verdict.lhs == 2.0 and verdict.rhs == 4.0


def test_upper_bound_degree_p_sharp_at_middle():
    # odd spheres at the middle degree: p^2 <= p * p with equality
    for p in (2, 3, 4):
        n = 2 * p - 1
        verdict = upper_bound_degree_p(GeometryCase.sphere(n, 1.0), p)
        assert verdict.satisfied
        assert verdict.tightness <= 1e-12
        assert np.isclose(verdict.lhs, p * p)


def test_upper_bound_degree_p_alpha():
    verdict = upper_bound_degree_p(GeometryCase.sphere(4, 1.0), 2)
    assert verdict.geometry["alpha"] == 3  # max(2, 4-2+1)
    assert verdict.satisfied


def test_upper_bound_degree_p_range_error():
    with pytest.raises(ValueError):
        upper_bound_degree_p(GeometryCase.sphere(4, 1.0), 1)


def test_minimal_variant_constant():
    assert np.isclose(minimal_upper_bound_constant(3, 2), 2.0 / 3.0)


def test_convex_lower_bound_dominates_isotropic():
    # for sigma_p >= p*c the product bound dominates p(n-p+1)c^2
    case = GeometryCase.sphere(4, 2.0)
    c = case.sigma(1)
    for p in range(1, 3):
        verdict = main_lower_bound(case, p)
        assert verdict.rhs >= p * (4 - p + 1) * c * c - 1e-12


# ---------------------------------------------------------------------------
# special Killing relation


def test_special_killing_values():
    value, verdict = special_killing_relation(1.0, 1, 2)
    assert value == 2.0
    assert verdict.satisfied and verdict.tightness <= 1e-12

    # threshold case: degree p, number 1 gives the sphere eigenvalue
    for n in (3, 4, 5):
        for p in range(1, n):
            value, verdict = special_killing_relation(1.0, p - 1, n)
            lam, _ = sphere_hodge_oracle(n, p)
            assert np.isclose(value, lam)
            assert verdict.satisfied

    value, verdict = special_killing_relation(0.0, 1, 3)
    assert value == 0.0
    assert verdict.satisfied


def test_special_killing_scaling():
    # c scales like 1/radius^2
    for c in (0.25, 4.0):
        value, verdict = special_killing_relation(c, 1, 3)
        assert np.isclose(value, c * 2 * 2)
        assert verdict.satisfied


def test_special_killing_rejects_negative_number():
    with pytest.raises(ValueError):
        special_killing_relation(-1.0, 1, 3)


# ---------------------------------------------------------------------------
# parallel restriction identities (delegated check)


def test_parallel_restriction_on_spheres():
    xi = AlternatingForm(3, 2, [1.0, -2.0, 0.5])
    for radius in (1.0, 2.0):
        res1, res2 = parallel_restriction_check(radius, xi)
        assert res1 <= 1e-8
        assert res2 <= 1e-8


# ---------------------------------------------------------------------------
# mesh-backed cases


@pytest.fixture(scope="module")
def ellipsoid_case():
    return GeometryCase.ellipsoid(1.0, 1.0, 1.2, 3)


def test_ellipsoid_verdicts_satisfied(ellipsoid_case):
    lower = main_lower_bound(ellipsoid_case, 1)
    assert lower.satisfied
    assert lower.slack > 0
    x = xia_bound(ellipsoid_case)
    assert x.satisfied and x.slack > 0
    upper = upper_bound_degree_one(ellipsoid_case)
    assert upper.satisfied and upper.slack > 0


def test_ellipsoid_applicability_flags(ellipsoid_case):
    assert ellipsoid_case.sigma(1) > 0
    assert ellipsoid_case.h1_trivial()


def test_lower_bound_inapplicable_when_not_convex():
    torus_case = GeometryCase.from_surface_mesh(generate_torus(16, 8))
    verdict = main_lower_bound(torus_case, 1)
    assert verdict.status == "inapplicable"
    assert not verdict.applicable


def test_upper_bound_gate_on_torus():
    torus_case = GeometryCase.from_surface_mesh(generate_torus(16, 8))
    verdict = upper_bound_degree_one(torus_case)
    assert verdict.status == "inapplicable"
    assert "H^1" in verdict.note


def test_duality_consistent_rhs():
    case = GeometryCase.sphere(4, 1.3)
    n = 4
    for p in (1, 2):
        a = main_lower_bound(case, p)
        # the dual-degree formulation multiplies the same two numbers
        assert np.isclose(a.rhs, case.sigma(n - p + 1) * case.sigma(p))


def test_out_of_range_p_is_inapplicable():
    case = GeometryCase.sphere(3, 1.0)
    verdict = main_lower_bound(case, 3)  # p > (n+1)/2
    assert verdict.status == "inapplicable"


# ---------------------------------------------------------------------------
# equality-case diagnostics


def test_ball_diagnostics_analytic():
    report = equality_case_diagnostics(2, p=1, radius=1.0)
    assert report.satisfied
    ratio = dict((c[0], c) for c in report.checks)["area_over_volume"]
    assert np.isclose(ratio[1], 3.0)

    report_r = equality_case_diagnostics(3, p=2, radius=2.0)
    assert report_r.satisfied


def test_ball_diagnostics_mesh():
    report = equality_case_diagnostics(generate_ball(3), p=1)
    assert report.satisfied
    got = dict((c[0], c) for c in report.checks)["area_over_volume"][1]
    assert abs(got - 3.0) / 3.0 < 0.02


# ---------------------------------------------------------------------------
# verdict plumbing


def test_verdict_semantics():
    verdict = xia_bound(GeometryCase.sphere(2, 1.0))
    assert verdict.satisfied == (verdict.slack >= -verdict.tolerance * max(abs(verdict.lhs), abs(verdict.rhs)))
    d = verdict.to_dict()
    assert d["name"] == "xia_bound"
    assert d["status"] == "satisfied"


def test_verdict_table_and_json(tmp_path):
    verdicts = [
        xia_bound(GeometryCase.sphere(2, 1.0)),
        upper_bound_degree_one(GeometryCase.sphere(2, 1.0)),
    ]
    table = verdict_table(verdicts)
    assert "xia_bound" in table and "satisfied" in table
    path = tmp_path / "verdicts.json"
    verdicts_to_json(verdicts, path, extra={"run": 1})
    import json

    data = json.loads(path.read_text())
    assert len(data["verdicts"]) == 2
    assert data["run"] == 1
