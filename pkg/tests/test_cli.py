import json

import numpy as np
import pytest

from hodgebench.cli import (
    EXIT_NO_CONVERGENCE,
    EXIT_OK,
    EXIT_VALIDATION,
    EXIT_VIOLATION,
    main,
    parse_geometry,
)
from hodgebench.bounds import GeometryCase
from hodgebench.meshes import MeshComplex, generate_torus


def test_parse_geometry_specs():
    assert parse_geometry("icosphere:2").n_vertices == 162
    assert parse_geometry("icosphere:1,2.0").vertices.max() > 1.5
    assert parse_geometry("ball:1").kind == "solid"
    assert parse_geometry("ellipsoid:1,1,1.2").metadata["semi_axes"] == [1.0, 1.0, 1.2]
    assert parse_geometry("torus:12,8").genus() == 1
    case = parse_geometry("sphere:3,2.0")
    assert isinstance(case, GeometryCase)
    assert case.radius == 2.0
    with pytest.raises(ValueError):
        parse_geometry("klein:1")


def test_spectrum_command(tmp_path, capsys):
    code = main(["spectrum", "--geometry", "icosphere:2", "--k", "6", "--out", str(tmp_path)])
    assert code == EXIT_OK
    data = json.loads((tmp_path / "spectrum.json").read_text())
    assert data["version"]
    assert data["config"]["command"] == "spectrum"
    assert len(data["eigenvalues"]) == 6
    lam1 = sorted(v for v in data["eigenvalues"] if v > 1e-6)[0]
    assert abs(lam1 - 2.0) < 0.1
    csv_text = (tmp_path / "spectrum.csv").read_text()
    assert csv_text.startswith("value,family,cluster")
    out = capsys.readouterr().out
    assert "first cluster" in out


def test_spectrum_torus_off_harmonics(tmp_path):
    torus = generate_torus(16, 8)
    off = tmp_path / "torus.off"
    torus.save_off(off)
    code = main(
        ["spectrum", "--mesh", str(off), "--p", "1", "--k", "5", "--out", str(tmp_path)]
    )
    assert code == EXIT_OK
    data = json.loads((tmp_path / "spectrum.json").read_text())
    assert data["families"].count("harmonic") == 2


def test_spectrum_invalid_mesh_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.off"
    bad.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n")
    code = main(["spectrum", "--mesh", str(bad), "--out", str(tmp_path)])
    assert code == EXIT_VALIDATION
    assert "error" in capsys.readouterr().err


def test_spectrum_solver_failure_exit_code(tmp_path, capsys):
    from hodgebench.cli import EXIT_SOLVER

    torus = generate_torus(8, 6)
    off = tmp_path / "torus.off"
    torus.save_off(off)
    # full spectra of clamped meshes are refused by the solver
    code = main(
        ["spectrum", "--mesh", str(off), "--p", "1", "--k", str(torus.n_edges), "--out", str(tmp_path)]
    )
    assert code == EXIT_SOLVER
    assert "solver error" in capsys.readouterr().err


def test_reilly_command_classical(tmp_path, capsys):
    code = main(
        ["reilly", "--field", "linear-x1", "--levels", "1..2", "--out", str(tmp_path)]
    )
    assert code == EXIT_OK
    data = json.loads((tmp_path / "reilly.json").read_text())
    assert data["kind"] == "classical"
    lines = (tmp_path / "reilly_convergence.csv").read_text().splitlines()
    assert lines[0].startswith("# version=")
    assert lines[1] == "level,n_vertices,residual,relative_residual"
    assert len(lines) == 4


def test_reilly_command_pform(tmp_path):
    code = main(["reilly", "--field", "x2dx1", "--levels", "2", "--out", str(tmp_path)])
    assert code == EXIT_OK
    data = json.loads((tmp_path / "reilly.json").read_text())
    assert data["kind"] == "p-form"
    assert data["relative_residual"] < 0.05


def test_reilly_zero_field(tmp_path):
    code = main(["reilly", "--field", "zero", "--levels", "1..2", "--out", str(tmp_path)])
    assert code == EXIT_OK
    data = json.loads((tmp_path / "reilly.json").read_text())
    assert data["lhs"] == 0.0


def test_reilly_unknown_field(tmp_path, capsys):
    code = main(["reilly", "--field", "nope", "--out", str(tmp_path)])
    assert code == EXIT_VALIDATION


def test_reilly_on_loaded_tet_mesh(tmp_path):
    from hodgebench.meshes import generate_ball, save_tet

    path = tmp_path / "ball.tet"
    save_tet(generate_ball(2), path)
    code = main(["reilly", "--mesh", str(path), "--field", "x2dx1", "--out", str(tmp_path)])
    assert code == EXIT_OK
    data = json.loads((tmp_path / "reilly.json").read_text())
    assert data["meta"]["shape_source"] == "discrete"
    assert data["relative_residual"] < 0.05


def test_bounds_sphere_suite(tmp_path, capsys):
    code = main(["bounds", "--suite", "spheres", "--out", str(tmp_path)])
    assert code == EXIT_OK
    data = json.loads((tmp_path / "bounds.json").read_text())
    assert all(v["status"] != "violated" for v in data["verdicts"])
    # equalities are tight on spheres
    tight = [v for v in data["verdicts"] if v["name"] == "p_form_lower_bound"]
    assert all(v["tightness"] <= 1e-12 for v in tight)
    out = capsys.readouterr().out
    assert "xia_bound" in out


def test_bounds_theorem_filter(tmp_path):
    code = main(
        ["bounds", "--suite", "spheres", "--theorem", "killing", "--out", str(tmp_path)]
    )
    assert code == EXIT_OK
    data = json.loads((tmp_path / "bounds.json").read_text())
    assert data["verdicts"]
    assert all(v["name"] == "special_killing_eigenvalue" for v in data["verdicts"])


def test_bounds_single_geometry(tmp_path):
    code = main(
        ["bounds", "--geometry", "ellipsoid:1,1,1.2,2", "--out", str(tmp_path)]
    )
    assert code == EXIT_OK
    data = json.loads((tmp_path / "bounds.json").read_text())
    names = {v["name"] for v in data["verdicts"]}
    assert "xia_bound" in names


def test_bounds_ball_suite(tmp_path, capsys):
    code = main(["bounds", "--suite", "balls", "--out", str(tmp_path)])
    assert code == EXIT_OK
    data = json.loads((tmp_path / "bounds.json").read_text())
    assert len(data["equality_diagnostics"]) == 2
    assert all(d["satisfied"] for d in data["equality_diagnostics"])


def test_config_file_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"geometry": "icosphere:1", "k": 4}))
    code = main(["--config", str(cfg), "spectrum", "--out", str(tmp_path)])
    assert code == EXIT_OK
    data = json.loads((tmp_path / "spectrum.json").read_text())
    assert len(data["eigenvalues"]) == 4


def test_deterministic_outputs(tmp_path):
    out = tmp_path / "run"
    args = ["spectrum", "--geometry", "icosphere:2", "--p", "1", "--k", "6",
            "--seed", "3", "--out", str(out)]
    assert main(args) == EXIT_OK
    first = (out / "spectrum.json").read_bytes()
    assert main(args) == EXIT_OK
    second = (out / "spectrum.json").read_bytes()
    assert first == second


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
