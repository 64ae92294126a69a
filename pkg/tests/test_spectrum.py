import json
from math import comb

import numpy as np
import pytest

from hodgebench.meshes import MeshComplex, MeshError, generate_icosphere, generate_torus, merge_meshes
from hodgebench.spectrum import (
    SolverError,
    assemble_dec,
    sphere_hodge_oracle,
    spectrum_functions,
    spectrum_one_forms,
    spectrum_two_forms,
)


def shifted_copy(mesh, offset):
    return MeshComplex(mesh.vertices + np.asarray(offset), mesh.cells)


# ---------------------------------------------------------------------------
# DEC assembly


def test_incidence_shapes_icosahedron():
    dec = assemble_dec(generate_icosphere(0, 1.0))
    assert dec.d0.shape == (30, 12)
    assert dec.d1.shape == (20, 30)


def test_chain_complex_exact():
    for mesh in (generate_icosphere(1, 1.0), generate_torus(10, 6)):
        dec = assemble_dec(mesh)
        assert abs((dec.d1 @ dec.d0).toarray()).max() == 0.0


def test_dual_area_partition():
    mesh = generate_icosphere(2, 1.3)
    dec = assemble_dec(mesh)
    assert abs(dec.star0.sum() - mesh.area()) < 1e-10


def test_star_positive_on_sphere():
    dec = assemble_dec(generate_icosphere(3, 1.0))
    assert (dec.star0 > 0).all()
    assert (dec.star1 > 0).all()
    assert not dec.clamped_star0 and not dec.clamped_star1


def test_strict_mode_raises_on_torus():
    torus = generate_torus(24, 12)
    with pytest.raises(MeshError) as err:
        assemble_dec(torus, strict=True)
    assert err.value.code == "nonpositive_weight"
    # default mode clamps instead
    dec = assemble_dec(torus)
    assert len(dec.clamped_star1) > 0
    assert (dec.star1 > 0).all()


# ---------------------------------------------------------------------------
# function spectrum


def test_sphere_lambda1_cluster():
    rep = spectrum_functions(generate_icosphere(3, 1.0), 8)
    lam1 = rep.first_positive()
    assert abs(lam1 - 2.0) / 2.0 < 0.02
    cluster = rep.clusters[1]
    assert cluster[1] == 3
    assert (rep.eigenvalues >= -1e-10).all()


def test_sphere_radius_scaling_law():
    rep = spectrum_functions(generate_icosphere(3, 2.0), 4)
    assert abs(rep.first_positive() - 0.5) / 0.5 < 0.02


def test_disjoint_spheres_zero_multiplicity():
    a = generate_icosphere(2, 1.0)
    both = merge_meshes(a, shifted_copy(a, [5.0, 0.0, 0.0]))
    rep = spectrum_functions(both, 4)
    assert rep.families[:2] == ["harmonic", "harmonic"]
    assert rep.count("harmonic") == 2


def test_zero_eigenvalue_present():
    rep = spectrum_functions(generate_icosphere(1, 1.0), 3)
    assert rep.eigenvalues[0] < rep.zero_tol


# ---------------------------------------------------------------------------
# one- and two-form spectra


def test_one_form_families_on_sphere():
    mesh = generate_icosphere(3, 1.0)
    dec = assemble_dec(mesh)
    rep0 = spectrum_functions(mesh, 6, dec=dec)
    rep1 = spectrum_one_forms(mesh, 8, dec=dec)
    rep2 = spectrum_two_forms(mesh, 5, dec=dec)

    # exact family duplicates the nonzero function spectrum
    lam0 = rep0.first_positive()
    lam1_exact = rep1.first_positive("exact")
    assert abs(lam0 - lam1_exact) / lam0 < 1e-8

    # coexact family duplicates the exact 2-form family (Hodge duality)
    lam1_coexact = rep1.first_positive("coexact")
    lam2_exact = rep2.first_positive("exact")
    assert abs(lam1_coexact - lam2_exact) / lam2_exact < 1e-8

    # closed sphere: no harmonic 1-forms, one harmonic 2-form
    assert rep1.count("harmonic") == 0
    assert rep2.families[0] == "harmonic"

    # S^2 self-dual case: both families converge to the same value 2
    assert abs(lam1_exact - 2.0) < 0.05
    assert abs(lam1_coexact - 2.0) < 0.05


def test_torus_harmonic_count():
    rep = spectrum_one_forms(generate_torus(24, 12), 6)
    assert rep.count("harmonic") == 2
    assert rep.families[:2] == ["harmonic", "harmonic"]
    assert (rep.eigenvalues >= -1e-10).all()


def test_full_spectrum_family_counts():
    # full eigenproblem on small clamp-free closed surfaces: family counts
    # add up to the edge count, with b1 harmonics
    for mesh, b1 in ((generate_icosphere(0, 1.0), 0), (generate_icosphere(1, 1.0), 0)):
        ne = mesh.n_edges
        rep = spectrum_one_forms(mesh, ne)
        assert len(rep.eigenvalues) == ne
        assert rep.count("harmonic") == b1
        assert rep.count("exact") + rep.count("coexact") == ne - b1
        # exact eigenvalues biject with nonzero function eigenvalues
        nv = mesh.n_vertices
        rep0 = spectrum_functions(mesh, nv)
        nonzero0 = [l for l, f in zip(rep0.eigenvalues, rep0.families) if f != "harmonic"]
        exact1 = [l for l, f in zip(rep.eigenvalues, rep.families) if f == "exact"]
        assert len(nonzero0) == len(exact1)
        assert np.allclose(sorted(nonzero0), sorted(exact1), rtol=1e-8, atol=1e-8)


def test_full_spectrum_of_clamped_mesh_rejected():
    torus = generate_torus(8, 6)
    with pytest.raises(SolverError):
        spectrum_one_forms(torus, torus.n_edges)


def test_lambda_1p_is_min_over_families():
    rep = spectrum_one_forms(generate_icosphere(2, 1.0), 8)
    lam = rep.first_eigenvalue()
    assert lam == min(rep.first_positive("exact"), rep.first_positive("coexact"))


# ---------------------------------------------------------------------------
# sphere oracle


def test_sphere_oracle_values():
    assert sphere_hodge_oracle(2, 1) == (2.0, 3)
    assert sphere_hodge_oracle(3, 2) == (4.0, 6)
    for p in range(1, 6):
        lam, mult = sphere_hodge_oracle(2 * p - 1, p)
        assert lam == p * p
        assert mult == comb(2 * p, p)


def test_sphere_oracle_duality_symmetry():
    for n in range(1, 11):
        for p in range(1, n + 1):
            lam, mult = sphere_hodge_oracle(n, p)
            lam_dual, mult_dual = sphere_hodge_oracle(n, n - p + 1)
            assert lam == lam_dual
            assert mult == mult_dual


def test_sphere_oracle_range_errors():
    with pytest.raises(ValueError):
        sphere_hodge_oracle(3, 0)
    with pytest.raises(ValueError):
        sphere_hodge_oracle(3, 4)


# ---------------------------------------------------------------------------
# reports


def test_report_serialization(tmp_path):
    rep = spectrum_functions(generate_icosphere(1, 1.0), 5)
    jpath = tmp_path / "spec.json"
    cpath = tmp_path / "spec.csv"
    rep.to_json(jpath, extra={"note": "test"})
    rep.to_csv(cpath)
    data = json.loads(jpath.read_text())
    assert data["degree"] == 0
    assert len(data["eigenvalues"]) == 5
    assert data["note"] == "test"
    lines = cpath.read_text().strip().splitlines()
    assert lines[0] == "value,family,cluster"
    assert len(lines) == 6


def test_solver_error_on_bad_k():
    with pytest.raises(ValueError):
        spectrum_functions(generate_icosphere(1, 1.0), 0)
