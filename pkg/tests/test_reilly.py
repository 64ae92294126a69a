import numpy as np
import pytest

from hodgebench.curvature import CurvatureTerm
from hodgebench.exterior import AlternatingForm
from hodgebench.fields import FormField, ScalarField, named_form_field, named_scalar_field
from hodgebench.meshes import generate_ball
from hodgebench.reilly import (
    SphereSurface,
    check_commutation,
    check_derivative_formulas,
    check_stokes,
    evaluate_classical_reilly,
    evaluate_reilly,
    restriction_identity_residuals,
    run_reilly_levels,
    sphere_sample_points,
)

BALL2 = generate_ball(2)
BALL3 = generate_ball(3)
VOL = 4 * np.pi / 3
AREA = 4 * np.pi


def residual_decreases(values, floor=1e-10):
    return all(cur <= max(prev, floor) for prev, cur in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# classical identity


def test_constant_field_all_zero():
    ledger = evaluate_classical_reilly(BALL2, named_scalar_field("constant"))
    assert ledger.lhs == 0.0
    assert all(abs(v) < 1e-14 for k, v in ledger.terms.items())


def test_linear_x1_boundary_cancellation():
    ledgers = run_reilly_levels([1, 2, 3], named_scalar_field("linear-x1"))
    rel = [l.relative_residual for l in ledgers]
    assert abs(ledgers[-1].residual) <= 0.05 * AREA
    assert residual_decreases(rel)
    # interior terms vanish for a linear function
    assert ledgers[-1].terms["hessian_energy"] == 0.0
    assert ledgers[-1].lhs == 0.0


def test_radial_sq_closed_forms():
    ledger = evaluate_classical_reilly(BALL3, named_scalar_field("radial-sq"))
    vol = BALL3.volume()
    area = BALL3.area()
    assert abs(ledger.lhs - 9 * vol) < 1e-10  # (lap f)^2 = 9 exactly
    assert abs(ledger.terms["hessian_energy"] - 3 * vol) < 1e-10
    assert abs(ledger.terms["boundary_mean_normal_sq"] - 2 * area) < 0.05 * 2 * area
    assert abs(ledger.terms["boundary_normal_laplacian"]) < 0.05 * area
    assert abs(ledger.terms["boundary_shape_gradient"]) < 0.05 * area
    assert ledger.relative_residual < 0.05
    # against the smooth values
    assert abs(ledger.lhs - 12 * np.pi) < 0.05 * 12 * np.pi


def test_classical_residual_decreases_for_cubic():
    # icosahedral symmetry integrates degree <= 5 boundary integrands
    # exactly; x1^3 (degree-6 combinations) shows the genuine quadrature
    # error, which must shrink strictly under refinement
    f = ScalarField(
        lambda p: p[:, 0] ** 3,
        lambda p: np.stack([3 * p[:, 0] ** 2, np.zeros(len(p)), np.zeros(len(p))], axis=1),
        lambda p: np.einsum("m,ij->mij", 6 * p[:, 0], np.diag([1.0, 0.0, 0.0])),
        name="x1cubed",
    )
    ledgers = run_reilly_levels([1, 2, 3], f)
    rel = [l.relative_residual for l in ledgers]
    assert rel[0] > 1e-5  # a real error, not a symmetry zero
    assert rel[1] < rel[0] and rel[2] < rel[1]
    assert rel[-1] < 0.05


def test_classical_fd_matches_analytic():
    analytic = evaluate_classical_reilly(BALL2, named_scalar_field("radial-sq"))
    fd = evaluate_classical_reilly(BALL2, ScalarField(lambda p: 0.5 * (p**2).sum(axis=1), name="fd"))
    for name in analytic.terms:
        assert abs(analytic.terms[name] - fd.terms[name]) < 1e-5


def test_fd_disabled_raises():
    f = ScalarField(lambda p: p[:, 0], name="no-derivs")
    with pytest.raises(ValueError):
        evaluate_classical_reilly(BALL2, f, allow_fd=False)


def test_discrete_shape_source():
    ledger = evaluate_classical_reilly(BALL3, named_scalar_field("radial-sq"), shape_source="discrete")
    assert ledger.relative_residual < 0.05
    assert ledger.meta["shape_source"] == "discrete"


# ---------------------------------------------------------------------------
# p-form identity


def test_x2dx1_ledger_balances():
    ledger = evaluate_reilly(BALL3, named_form_field("x2dx1"))
    vol = BALL3.volume()
    assert abs(ledger.lhs - vol) < 1e-10  # |dw|^2 = 1, dw = -dx1^dx2
    assert abs(ledger.terms["dirichlet_energy"] - vol) < 1e-10
    assert ledger.relative_residual < 0.05
    # boundary terms against smooth closed forms
    assert abs(ledger.terms["boundary_shape_term"] - 8 * np.pi / 5) < 0.05 * 8 * np.pi / 5
    assert abs(ledger.terms["normal_cross_term"] + 8 * np.pi / 5) < 0.05 * 8 * np.pi / 5


def test_x2dx1_residual_decreases():
    ledgers = run_reilly_levels([1, 2, 3], named_form_field("x2dx1"))
    rel = [l.relative_residual for l in ledgers]
    assert residual_decreases(rel)


@pytest.mark.parametrize("name", ["parallel-dx1", "parallel-dx12"])
def test_parallel_forms_reduce_to_boundary_identity(name):
    ledger = evaluate_reilly(BALL3, named_form_field(name))
    vol = BALL3.volume()
    # interior terms vanish
    assert ledger.lhs <= 1e-3 * vol
    assert ledger.terms["dirichlet_energy"] <= 1e-3 * vol
    assert ledger.terms["curvature_energy"] == 0.0
    # cross and boundary terms cancel
    cross = ledger.terms["normal_cross_term"]
    bnd = ledger.terms["boundary_shape_term"]
    assert abs(cross + bnd) < 0.05 * max(abs(cross), abs(bnd))


def test_boundary_forms_agree_pointwise():
    for name in ("x2dx1", "parallel-dx1", "parallel-dx12", "x1-vol"):
        ledger = evaluate_reilly(BALL2, named_form_field(name))
        assert ledger.terms["boundary_forms_max_gap"] < 1e-8


def test_top_degree_field_balances():
    ledger = evaluate_reilly(BALL3, named_form_field("x1-vol"))
    vol = BALL3.volume()
    # d of a top form vanishes; delta carries the whole left side
    assert abs(ledger.lhs - vol) < 1e-10
    assert abs(ledger.terms["normal_cross_term"]) < 1e-12
    assert abs(ledger.terms["boundary_shape_term"]) < 1e-12
    assert ledger.relative_residual < 1e-10


def test_constant_curvature_term_enters_ledger():
    kappa = 0.7
    ledger = evaluate_reilly(
        BALL2, named_form_field("x2dx1"), curvature=CurvatureTerm.constant(kappa)
    )
    want = 1 * (3 - 1) * kappa * ledger.terms["form_l2_norm_sq"]
    assert abs(ledger.terms["curvature_energy"] - want) < 1e-12
    with pytest.raises(ValueError):
        evaluate_reilly(
            BALL2, named_form_field("x2dx1"), curvature=CurvatureTerm.operator_bound(0.5)
        )


def test_pform_discrete_shape_source():
    ledger = evaluate_reilly(BALL3, named_form_field("x2dx1"), shape_source="discrete")
    assert ledger.relative_residual < 0.05


def test_dec_cross_term_diagnostic():
    for name in ("x2dx1", "parallel-dx12"):
        ledger = evaluate_reilly(BALL3, named_form_field(name), include_dec=True)
        analytic = ledger.terms["normal_cross_term"]
        dec = ledger.terms["dec_cross_term"]
        assert abs(dec - analytic) < 0.05 * abs(analytic)


def test_ledger_json(tmp_path):
    ledger = evaluate_reilly(BALL2, named_form_field("x2dx1"))
    path = tmp_path / "ledger.json"
    ledger.to_json(path, extra={"note": "t"})
    import json

    data = json.loads(path.read_text())
    assert data["kind"] == "p-form"
    assert "boundary_shape_term" in data["terms"]
    assert data["note"] == "t"


# ---------------------------------------------------------------------------
# pointwise identities


SPHERE = SphereSurface(1.0)
POINTS = sphere_sample_points(10)


@pytest.mark.parametrize("name", ["parallel-dx1", "parallel-dx12", "x2dx1", "x1-vol"])
def test_commutation_identities_fd(name):
    res1, res2 = check_commutation(named_form_field(name), SPHERE, POINTS, h=1e-4)
    assert res1 < 1e-6
    assert res2 < 1e-6


def test_commutation_identities_analytic():
    for name in ("parallel-dx1", "x2dx1"):
        res1, res2 = check_commutation(
            named_form_field(name), SPHERE, POINTS, method="analytic"
        )
        assert res1 < 1e-12
        assert res2 < 1e-12


def test_commutation_for_differential_field():
    # w = df for f = |x|^2/2: identities reduce to statements about d(f_N)
    df = named_scalar_field("radial-sq").differential()
    res1, res2 = check_commutation(df, SPHERE, POINTS, h=1e-4)
    assert res1 < 1e-4
    assert res2 < 1e-4


def test_commutation_zero_field():
    res1, res2 = check_commutation(FormField.zero(1), SPHERE, POINTS, h=1e-4)
    assert res1 == 0.0
    assert res2 == 0.0


@pytest.mark.parametrize("name", ["parallel-dx1", "parallel-dx12", "x2dx1"])
def test_derivative_formulas_fd(name):
    res1, res2 = check_derivative_formulas(named_form_field(name), SPHERE, POINTS, h=1e-4)
    assert res1 < 1e-6
    assert res2 < 1e-6


def test_derivative_formulas_df_and_zero():
    df = named_scalar_field("radial-sq").differential()
    res1, res2 = check_derivative_formulas(df, SPHERE, POINTS, h=1e-4)
    assert res1 < 1e-4 and res2 < 1e-4
    z1, z2 = check_derivative_formulas(FormField.zero(2), SPHERE, POINTS, h=1e-4)
    assert z1 == 0.0 and z2 == 0.0


def test_restriction_identities_unit_sphere():
    for degree in (1, 2):
        from math import comb

        for slot in range(comb(3, degree)):
            coeffs = np.zeros(comb(3, degree))
            coeffs[slot] = 1.0
            res1, res2 = restriction_identity_residuals(AlternatingForm(3, degree, coeffs))
            assert res1 <= 1e-8
            assert res2 <= 1e-8


def test_restriction_identities_scale_to_zero():
    # both sides shrink like 1/radius: residuals stay at numerical noise
    xi = AlternatingForm(3, 1, [0.3, -1.2, 0.5])
    for radius in (1.0, 10.0, 1e3):
        res1, res2 = restriction_identity_residuals(xi, radius=radius)
        assert res1 < 1e-10 and res2 < 1e-10


def test_restriction_identities_higher_dim():
    xi = AlternatingForm(5, 2, np.arange(10, dtype=float) - 4.5)
    res1, res2 = restriction_identity_residuals(xi, radius=2.0)
    assert res1 < 1e-10 and res2 < 1e-10


# ---------------------------------------------------------------------------
# integrated adjointness


def test_stokes_scalar_pair():
    omega = FormField(
        0,
        lambda p: p[:, 0:1],
        lambda p: np.tile(np.array([[[1.0, 0.0, 0.0]]]), (len(p), 1, 1)),
        name="x1",
    )
    residual, relative = check_stokes(BALL3, omega, named_form_field("parallel-dx1"))
    assert relative < 0.03


def test_stokes_polynomial_pair():
    # <d(x2 dx1), x2^2 dx1^dx2> integrates to -4 pi / 15: nonzero balance
    omega = named_form_field("x2dx1")

    def phi_val(p):
        out = np.zeros((len(p), 3))
        out[:, 0] = p[:, 1] ** 2
        return out

    def phi_jac(p):
        out = np.zeros((len(p), 3, 3))
        out[:, 0, 1] = 2 * p[:, 1]
        return out

    phi = FormField(2, phi_val, phi_jac, name="x2sq-dx12")
    residual, relative = check_stokes(BALL3, omega, phi)
    assert relative < 0.03


def test_stokes_structural_zero():
    zero = FormField.zero(2)
    residual, relative = check_stokes(BALL2, named_form_field("x2dx1"), zero)
    assert residual == 0.0
