"""Command-line interface: subcommands, exit codes, report round-trips."""

import csv
import io
import json
import math

import numpy as np
import pytest

from cslsurf.cli import main
from cslsurf.geometry import box_mesh, mesh_to_stl


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


SPHERE = '{"type":"sphere","radius":"1 um"}'
CYL_X = '{"type":"cylinder","radius":"1 um","length":"5 um","axis":"x"}'


class TestTensors:
    def test_sphere_diagonal(self, capsys):
        report = run_json(capsys, "tensors", "--shape", SPHERE)
        s = np.array(report["results"]["surface_tensor"])
        expected = 4 * math.pi / 3 * (1e-6) ** 2
        assert np.allclose(np.diag(s), expected, rtol=1e-10, atol=0)
        assert report["results"]["area"] == pytest.approx(4 * math.pi * 1e-12, rel=1e-12)

    def test_cylinder_axis_component(self, capsys):
        report = run_json(capsys, "tensors", "--shape", CYL_X)
        s = np.array(report["results"]["surface_tensor"])
        assert s[0, 0] == pytest.approx(2 * math.pi * 1e-12, rel=1e-10, abs=0)

    def test_unit_normalization_in_config(self, capsys):
        report = run_json(capsys, "tensors", "--shape",
                          '{"type":"sphere","radius":"1e-4 cm"}',
                          "--sigma", "1e-5 cm")
        assert report["config"]["shape"]["radius"] == pytest.approx(1e-6, rel=1e-12)
        assert report["config"]["params"]["localization_length"] == pytest.approx(1e-7, rel=1e-12)

    def test_mesh_input(self, capsys, tmp_path):
        path = tmp_path / "cube.stl"
        path.write_bytes(mesh_to_stl(box_mesh(1e-6, 1e-6, 1e-6)))
        report = run_json(capsys, "tensors", "--mesh", str(path))
        assert report["results"]["volume"] == pytest.approx(1e-18, rel=1e-6)
        assert report["results"]["area"] == pytest.approx(6e-12, rel=1e-6)

    def test_origin_override_changes_rotational_tensor(self, capsys):
        base = run_json(capsys, "tensors", "--shape", SPHERE)
        moved = run_json(capsys, "tensors", "--shape", SPHERE,
                         "--origin", "2 um,0,0")
        s0 = np.array(base["results"]["rotational_surface_tensor"])
        s1 = np.array(moved["results"]["rotational_surface_tensor"])
        assert np.linalg.norm(s0) < 1e-30
        assert np.linalg.norm(s1) > 0


class TestRates:
    def test_missing_density_is_usage_error(self, capsys):
        code, out, err = run(capsys, "rates", "--shape", SPHERE)
        assert code == 1
        assert "density" in err

    def test_sphere_heating_fraction(self, capsys):
        report = run_json(capsys, "rates", "--shape", SPHERE,
                          "--density", "2 g/cm^3")
        frac = report["results"]["com_heating_fraction"]
        assert frac == pytest.approx(3 * (1e-7 / 1e-6) ** 4, rel=1e-12)

    def test_inertia_convention_flag(self, capsys):
        a = run_json(capsys, "rates", "--shape", CYL_X, "--density", "1000")
        b = run_json(capsys, "rates", "--shape", CYL_X, "--density", "1000",
                     "--inertia-convention", "second_moment")
        assert (a["results"]["rotational_heating_watts"]
                != b["results"]["rotational_heating_watts"])


class TestValidate:
    def test_large_sphere_passes(self, capsys):
        code, out, err = run(capsys, "validate", "--shape",
                             '{"type":"sphere","radius":"40 um"}',
                             "--sigma", "1 um", "--density", "1000")
        assert code == 0
        report = json.loads(out)
        errors = report["results"]["pairwise_relative_errors"]
        assert all(v < 0.01 for v in errors.values())

    def test_small_sphere_fails_tolerance(self, capsys):
        code, out, err = run(capsys, "validate", "--shape",
                             '{"type":"sphere","radius":"3 um"}',
                             "--sigma", "1 um", "--density", "1000",
                             "--tolerance", "0.01")
        assert code == 2
        report = json.loads(out)
        assert report["results"]["passed"] is False

    def test_box_off_diagonals_stay_small(self, capsys):
        # a 6-10 sigma box is inside the surface-formula breakdown regime,
        # so the tolerance gate may trip; the point here is the symmetry
        # of the oracle tensors themselves
        code, out, err = run(capsys, "validate", "--shape",
                             '{"type":"box","size":["10 um","8 um","6 um"]}',
                             "--sigma", "1 um", "--density", "1000")
        assert code in (0, 2)
        report = json.loads(out)
        for key in ("gradient_integral", "kspace_integral"):
            t = np.array(report["results"][key])
            off = t - np.diag(np.diag(t))
            assert np.max(np.abs(off)) < 1e-6 * np.trace(t)

    def test_voxel_cap_is_resource_error(self, capsys):
        code, out, err = run(capsys, "validate", "--shape", SPHERE,
                             "--max-voxels", "1000")
        assert code == 3


class TestSweep:
    def test_length_sweep_constant_longitudinal(self, capsys):
        code, out, err = run(capsys, "sweep", "--shape", CYL_X,
                             "--variable", "L", "--values", "2 um,10 um,50 um",
                             "--density", "1000", "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        lam = [float(r["lambda_axis"]) for r in rows]
        assert max(lam) - min(lam) <= 5e-3 * lam[0]
        lengths = [float(r["value"]) for r in rows]
        assert lengths == pytest.approx([2e-6, 1e-5, 5e-5], rel=1e-12)

    def test_cone_angle_sweep_matches_sine(self, capsys):
        code, out, err = run(
            capsys, "sweep", "--shape",
            '{"type":"cone_capped_cylinder","radius":"1 um","length":"4 um",'
            '"apex_angle":"90 deg","axis":"x"}',
            "--variable", "theta", "--values", "30 deg,60 deg,90 deg,120 deg",
            "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        flat_face = 2 * math.pi * (1e-6) ** 2
        for row in rows:
            theta = float(row["value"])
            ratio = float(row["s_axis"]) / flat_face
            assert ratio == pytest.approx(math.sin(theta / 2), rel=1e-6)

    def test_gap_sweep_integer_multiplication(self, capsys):
        code, out, err = run(
            capsys, "sweep", "--shape",
            '{"type":"gapped_cylinder","radius":"1 um","length":"10 um",'
            '"gap_count":0,"gap_width":"0.5 um","axis":"x"}',
            "--variable", "N", "--values", "0,1,2,3,4", "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        base = float(rows[0]["s_axis"])
        for n, row in enumerate(rows):
            assert float(row["s_axis"]) == pytest.approx((n + 1) * base, rel=1e-10)

    def test_eccentricity_sweep(self, capsys):
        code, out, err = run(
            capsys, "sweep", "--shape",
            '{"type":"elliptic_cylinder","semi_axis_a":"1 um","semi_axis_b":"1 um",'
            '"length":"3 um"}',
            "--variable", "e", "--values", "0.1,0.2", "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        got = [float(r["srot_axis"]) for r in rows]
        # leading order (e^4/4) pi a^3 L
        for e, val in zip((0.1, 0.2), got):
            lead = e**4 / 4 * math.pi * (1e-6) ** 3 * 3e-6
            assert val == pytest.approx(lead, rel=0.05, abs=0)

    def test_unknown_variable(self, capsys):
        code, out, err = run(capsys, "sweep", "--shape", SPHERE,
                             "--variable", "R", "--values", "")
        assert code == 1


class TestDephasing:
    def test_rate_matches_quadratic_form(self, capsys):
        report = run_json(capsys, "dephasing", "--shape", SPHERE,
                          "--density", "2 g/cm^3", "--delta", "1e-9 m,0,0")
        lam = np.array(report["results"]["dephasing_matrix"])
        rate = report["results"]["rate_per_second"]
        assert rate == pytest.approx(lam[0, 0] * 1e-18, rel=1e-12, abs=0)
        assert report["results"]["quadratic_regime_warning"] is False

    def test_warning_flag_beyond_validity(self, capsys):
        report = run_json(capsys, "dephasing", "--shape", SPHERE,
                          "--density", "1000", "--delta", "5e-8 m,0,0")
        assert report["results"]["quadratic_regime_warning"] is True

    def test_exact_cross_check(self, capsys):
        report = run_json(capsys, "dephasing", "--shape",
                          '{"type":"sphere","radius":"3 um"}',
                          "--density", "1000", "--delta", "1e-8 m,0,0", "--exact")
        rel = report["results"]["quadratic_vs_exact_relative"]
        assert rel < 0.05

    def test_missing_delta(self, capsys):
        code, out, err = run(capsys, "dephasing", "--shape", SPHERE,
                             "--density", "1000")
        assert code == 1


class TestPlumbing:
    def test_config_file_and_flag_override(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({
            "shape": {"type": "sphere", "radius": "1 um"},
            "density": "3 g/cm^3",
            "resolution": 16,
        }))
        report = run_json(capsys, "rates", "--config", str(cfg),
                          "--density", "1000")
        assert report["config"]["density"] == 1000.0
        assert report["config"]["resolution"] == 16

    def test_both_shape_sources_rejected(self, capsys, tmp_path):
        path = tmp_path / "cube.stl"
        path.write_bytes(mesh_to_stl(box_mesh(1e-6, 1e-6, 1e-6)))
        code, out, err = run(capsys, "tensors", "--shape", SPHERE,
                             "--mesh", str(path))
        assert code == 1

    def test_json_report_roundtrips(self, capsys):
        code, out, err = run(capsys, "tensors", "--shape", SPHERE)
        assert code == 0
        parsed = json.loads(out)
        re_emitted = json.dumps(parsed, indent=2, sort_keys=True) + "\n"
        assert re_emitted == out
        assert json.loads(re_emitted) == parsed

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, out, err = run(capsys, "tensors", "--shape", SPHERE,
                             "--out", str(path))
        assert code == 0
        assert out == ""
        assert json.loads(path.read_text())["command"] == "tensors"

    def test_bad_shape_json(self, capsys):
        code, out, err = run(capsys, "tensors", "--shape", '{"type":"torus"}')
        assert code == 1

    def test_bad_quantity(self, capsys):
        code, out, err = run(capsys, "tensors", "--shape",
                             '{"type":"sphere","radius":"1 parsec"}')
        assert code == 1

    def test_resolution_overflow_is_resource_error(self, capsys):
        code, out, err = run(capsys, "tensors", "--shape", SPHERE,
                             "--resolution", "100000")
        assert code == 3

    def test_no_shape(self, capsys):
        code, out, err = run(capsys, "rates", "--density", "1000")
        assert code == 1

    def test_csv_key_value_fallback(self, capsys):
        code, out, err = run(capsys, "tensors", "--shape", SPHERE,
                             "--format", "csv")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["key", "value"]
        keys = {r[0] for r in rows[1:]}
        assert "results.area" in keys
