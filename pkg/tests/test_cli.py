"""Command-line contract: golden outputs, exit codes, error shape, atomicity."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from spherecov import GegenbauerBasis, multiquadric_kernel, multiquadric_sequence
from spherecov.cli import main

LEGENDRE = GegenbauerBasis.from_index(0.5)

SPHERE_CONST = {"kind": "sphere", "d": 2, "coeffs": [1.0]}
SPHERE_DEGREE_ONE = {"kind": "sphere", "d": 2, "coeffs": [0.0, 1.0]}
ST_GAUSS = {
    "kind": "sphere_time",
    "d": 2,
    "terms": [{"a": 1.0, "charfn": {"family": "gaussian", "params": {"sigma": 1.0}}}],
}
ST_TWO_GAUSS = {
    "kind": "sphere_time",
    "d": 2,
    "terms": [
        {"a": 0.5, "charfn": {"family": "gaussian", "params": {"sigma": 2.0}}},
        {"a": 0.5, "charfn": {"family": "gaussian", "params": {"sigma": 2.0}}},
    ],
}
ST_MIXED = {
    "kind": "sphere_time",
    "d": 2,
    "terms": [
        {"a": 0.5, "charfn": {"family": "gaussian", "params": {"sigma": 1.0}}},
        {"a": 0.5, "charfn": {"family": "exponential", "params": {"rate": 1.0}}},
    ],
}
PROD_A11 = {"kind": "product_spheres", "d1": 2, "d2": 2, "matrix": [[0.0, 0.0], [0.0, 1.0]]}
PROD_OUTER = {
    "kind": "product_spheres",
    "d1": 2,
    "d2": 2,
    "matrix": [[0.1, 0.1], [0.4, 0.4]],
}
PROD_IDENTITY = {"kind": "product_spheres", "d1": 2, "d2": 2, "matrix": [[0.5, 0.0], [0.0, 0.5]]}


@pytest.fixture
def spec_file(tmp_path):
    def write(doc, name="kernel.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_coeffs(out):
    pairs = [line.split(",") for line in out.strip().splitlines()]
    assert [int(n) for n, _ in pairs] == list(range(len(pairs)))
    return np.array([float(a) for _, a in pairs])


class TestEval:
    def test_sphere_golden(self, capsys, spec_file):
        code, out, err = run(capsys, "eval", spec_file(SPHERE_CONST), "--x", "0.3")
        assert code == 0 and err == ""
        assert out == "0.3,1.0\n"

    def test_sphere_time_golden(self, capsys, spec_file):
        code, out, _ = run(capsys, "eval", spec_file(ST_GAUSS), "--x", "1", "--t", "1")
        assert code == 0
        assert out == "1,1,0.6065306597126334\n"

    def test_product_golden(self, capsys, spec_file):
        code, out, _ = run(capsys, "eval", spec_file(PROD_A11), "--x1", "0.3", "--x2", "-0.4")
        assert code == 0
        assert out == "0.3,-0.4,-0.12\n"

    def test_grid_covers_domain(self, capsys, spec_file):
        code, out, _ = run(capsys, "eval", spec_file(SPHERE_CONST), "--grid", "5")
        assert code == 0
        rows = [line.split(",") for line in out.strip().splitlines()]
        assert [float(r[0]) for r in rows] == [-1.0, -0.5, 0.0, 0.5, 1.0]
        assert all(float(r[1]) == 1.0 for r in rows)

    def test_grid_sphere_time_has_both_axes(self, capsys, spec_file):
        code, out, _ = run(capsys, "eval", spec_file(ST_GAUSS), "--grid", "3", "--t-max", "2.0")
        assert code == 0
        rows = [line.split(",") for line in out.strip().splitlines()]
        assert len(rows) == 9
        assert {float(r[1]) for r in rows} == {0.0, 1.0, 2.0}

    def test_missing_argument_is_validation_error(self, capsys, spec_file):
        code, out, err = run(capsys, "eval", spec_file(SPHERE_CONST))
        assert code == 2 and out == ""
        payload = json.loads(err)
        assert payload["error"] == 2 and "message" in payload

    def test_wrong_argument_for_kind(self, capsys, spec_file):
        code, _, _ = run(capsys, "eval", spec_file(SPHERE_CONST), "--x", "0.1", "--t", "0.5")
        assert code == 2

    def test_out_of_domain_is_exit_3(self, capsys, spec_file):
        code, _, err = run(capsys, "eval", spec_file(SPHERE_CONST), "--x", "1.5")
        assert code == 3
        assert json.loads(err)["error"] == 3

    def test_bad_spec_file_is_exit_2(self, capsys, tmp_path):
        code, _, err = run(capsys, "eval", str(tmp_path / "missing.json"), "--x", "0.0")
        assert code == 2
        assert json.loads(err)["error"] == 2

    def test_grid_rejects_point_flags(self, capsys, spec_file):
        code, _, _ = run(capsys, "eval", spec_file(SPHERE_CONST), "--grid", "5", "--x", "0.3")
        assert code == 2


class TestCoeffs:
    def test_legendre3_golden(self, capsys):
        code, out, err = run(capsys, "coeffs", "--lambda", "0.5", "--nmax", "6", "--expr", "legendre3")
        assert code == 0 and err == ""
        coeffs = parse_coeffs(out)
        assert abs(coeffs[3] - 1.0) <= 1e-10
        assert np.all(np.abs(np.delete(coeffs, 3)) <= 1e-10)

    def test_xsquared_golden(self, capsys):
        code, out, _ = run(capsys, "coeffs", "--lambda", "0.5", "--nmax", "4", "--expr", "xsquared")
        assert code == 0
        coeffs = parse_coeffs(out)
        assert_allclose(coeffs[0], 1.0 / 3.0, rtol=0, atol=1e-12)
        assert_allclose(coeffs[2], 2.0 / 3.0, rtol=0, atol=1e-12)
        assert np.all(np.abs(coeffs[[1, 3, 4]]) <= 1e-12)

    def test_multiquadric_table_golden(self, capsys, tmp_path):
        xs = np.linspace(-1.0, 1.0, 801).tolist()
        table = tmp_path / "table.csv"
        table.write_text(
            "\n".join(f"{x!r},{multiquadric_kernel(0.4, 0.5, x)!r}" for x in xs) + "\n",
            encoding="utf-8",
        )
        code, out, _ = run(capsys, "coeffs", "--lambda", "0.5", "--nmax", "25", "--table", str(table))
        assert code == 0
        recovered = parse_coeffs(out)
        expected = multiquadric_sequence(0.4, LEGENDRE, 25).coeffs
        assert float(np.abs(recovered - expected).max()) <= 1e-6

    def test_tail_warning_on_short_truncation(self, capsys):
        code, out, err = run(capsys, "coeffs", "--lambda", "0.5", "--nmax", "5", "--expr", "legendre3")
        assert code == 0
        assert parse_coeffs(out).size == 6
        assert err.startswith("warning:")

    def test_unknown_expression(self, capsys):
        code, _, err = run(capsys, "coeffs", "--lambda", "0.5", "--expr", "mystery")
        assert code == 2
        assert "mystery" in json.loads(err)["message"]

    def test_table_and_expr_conflict(self, capsys, tmp_path):
        table = tmp_path / "t.csv"
        table.write_text("0,1\n", encoding="utf-8")
        code, _, _ = run(capsys, "coeffs", "--lambda", "0.5", "--expr", "x", "--table", str(table))
        assert code == 2

    def test_malformed_table(self, capsys, tmp_path):
        table = tmp_path / "bad.csv"
        table.write_text("0.0,1.0\n0.5\n", encoding="utf-8")
        code, _, err = run(capsys, "coeffs", "--lambda", "0.5", "--nmax", "1", "--table", str(table))
        assert code == 2
        assert json.loads(err)["error"] == 2

    def test_table_too_small(self, capsys, tmp_path):
        table = tmp_path / "small.csv"
        table.write_text("0.0,1.0\n0.5,1.0\n", encoding="utf-8")
        code, _, _ = run(capsys, "coeffs", "--lambda", "0.5", "--nmax", "10", "--table", str(table))
        assert code == 2

    def test_table_coverage_check(self, capsys, tmp_path):
        xs = np.linspace(-0.5, 0.5, 200).tolist()
        table = tmp_path / "narrow.csv"
        table.write_text("\n".join(f"{x!r},1.0" for x in xs) + "\n", encoding="utf-8")
        code, _, _ = run(capsys, "coeffs", "--lambda", "0.5", "--nmax", "10", "--table", str(table))
        assert code == 2


class TestCertify:
    def test_x_is_pd(self, capsys):
        code, out, _ = run(capsys, "certify", "--lambda", "0.5", "--nmax", "10", "--expr", "x")
        assert code == 0
        assert json.loads(out)["verdict"] == "PD"

    def test_negx_witness(self, capsys):
        code, out, _ = run(capsys, "certify", "--lambda", "0.5", "--nmax", "10", "--expr", "negx")
        assert code == 4
        cert = json.loads(out)
        assert cert["verdict"] == "NotPD"
        assert cert["witness"]["kind"] == "coefficient"
        assert cert["witness"]["index"] == 1

    def test_xsquared_is_pd(self, capsys):
        code, out, _ = run(capsys, "certify", "--lambda", "0.5", "--nmax", "10", "--expr", "xsquared")
        assert code == 0
        assert json.loads(out)["verdict"] == "PD"

    def test_inconclusive_exit_code(self, capsys, tmp_path):
        xs = np.linspace(-1.0, 1.0, 2001).tolist()
        table = tmp_path / "mq.csv"
        table.write_text(
            "\n".join(f"{x!r},{multiquadric_kernel(0.8, 0.5, x)!r}" for x in xs) + "\n",
            encoding="utf-8",
        )
        code, out, _ = run(capsys, "certify", "--lambda", "0.5", "--nmax", "10", "--table", str(table))
        assert code == 5
        assert json.loads(out)["verdict"] == "Inconclusive"


class TestSeparable:
    def test_outer_product_matrix(self, capsys, spec_file):
        code, out, _ = run(capsys, "separable", spec_file(PROD_OUTER))
        assert code == 0
        verdict = json.loads(out)
        assert verdict["separable"] is True
        b = np.asarray(verdict["row_factors"])
        c = np.asarray(verdict["col_factors"])
        assert_allclose(np.outer(b, c), np.asarray(PROD_OUTER["matrix"]), rtol=0, atol=1e-12)

    def test_identity_matrix(self, capsys, spec_file):
        code, out, _ = run(capsys, "separable", spec_file(PROD_IDENTITY))
        assert code == 0
        verdict = json.loads(out)
        assert verdict["separable"] is False
        assert verdict["minor"] == [0, 0, 1, 1]
        assert_allclose(verdict["value"], 0.25, rtol=1e-12)

    def test_all_equal_charfns(self, capsys, spec_file):
        code, out, _ = run(capsys, "separable", spec_file(ST_TWO_GAUSS))
        assert code == 0
        assert json.loads(out) == {"separable": True}

    def test_mixed_charfns(self, capsys, spec_file):
        code, out, _ = run(capsys, "separable", spec_file(ST_MIXED))
        assert code == 0
        assert json.loads(out) == {"separable": False}

    def test_sphere_kind_rejected(self, capsys, spec_file):
        code, _, _ = run(capsys, "separable", spec_file(SPHERE_CONST))
        assert code == 2


class TestSimulate:
    def _points_file(self, tmp_path):
        path = tmp_path / "points.csv"
        path.write_text("1,0,0\n0,1,0\n0,0,1\n", encoding="utf-8")
        return str(path)

    @staticmethod
    def _data_rows(text):
        lines = [l for l in text.splitlines() if l and not l.startswith("#")]
        assert lines[0].startswith("sample,")
        return np.array([[float(v) for v in l.split(",")[1:]] for l in lines[1:]])

    def test_constant_kernel_rows_constant(self, capsys, spec_file, tmp_path):
        code, out, _ = run(
            capsys,
            "simulate",
            spec_file(SPHERE_CONST),
            "--points", self._points_file(tmp_path),
            "--samples", "2",
            "--seed", "7",
            "--jitter", "0",
        )
        assert code == 0
        rows = self._data_rows(out)
        assert rows.shape == (2, 3)
        assert float((rows.max(axis=1) - rows.min(axis=1)).max()) <= 1e-12

    def test_byte_identical_reruns(self, capsys, spec_file, tmp_path):
        spec = spec_file(SPHERE_DEGREE_ONE)
        out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        for out in (out1, out2):
            code, _, _ = run(
                capsys, "simulate", spec, "--random", "4", "--samples", "3",
                "--seed", "11", "--out", out,
            )
            assert code == 0
        with open(out1, "rb") as f1, open(out2, "rb") as f2:
            assert f1.read() == f2.read()

    def test_degree_one_monte_carlo(self, capsys, spec_file, tmp_path):
        points = tmp_path / "two.csv"
        points.write_text(f"0,0,1\n{math.sqrt(3.0) / 2.0!r},0,0.5\n", encoding="utf-8")
        code, out, _ = run(
            capsys,
            "simulate",
            spec_file(SPHERE_DEGREE_ONE),
            "--points", str(points),
            "--samples", "10000",
            "--seed", "13",
        )
        assert code == 0
        rows = self._data_rows(out)
        cov = float(np.cov(rows, rowvar=False, ddof=1)[0, 1])
        assert abs(cov - 0.5) <= 0.04

    def test_spectral_matches_tolerance(self, capsys, spec_file, tmp_path):
        points = tmp_path / "two.csv"
        points.write_text(f"0,0,1\n{math.sqrt(3.0) / 2.0!r},0,0.5\n", encoding="utf-8")
        code, out, _ = run(
            capsys,
            "simulate",
            spec_file(SPHERE_DEGREE_ONE),
            "--points", str(points),
            "--samples", "10000",
            "--seed", "17",
            "--method", "spectral",
        )
        assert code == 0
        rows = self._data_rows(out)
        cov = float(np.cov(rows, rowvar=False, ddof=1)[0, 1])
        assert abs(cov - 0.5) <= 0.04

    def test_spectral_wrong_kind_is_exit_3(self, capsys, spec_file, tmp_path):
        code, _, err = run(
            capsys, "simulate", spec_file(ST_GAUSS), "--random", "3",
            "--seed", "0", "--method", "spectral",
        )
        assert code == 3
        assert json.loads(err)["error"] == 3

    def test_spectral_wrong_dimension_is_exit_3(self, capsys, spec_file):
        spec = spec_file({"kind": "sphere", "d": 3, "coeffs": [1.0]})
        code, _, _ = run(capsys, "simulate", spec, "--random", "3", "--seed", "0", "--method", "spectral")
        assert code == 3

    def test_no_partial_file_on_failure(self, capsys, spec_file, tmp_path):
        bad = tmp_path / "bad_points.csv"
        bad.write_text("2,0,0\n0,1,0\n", encoding="utf-8")
        out = tmp_path / "field.csv"
        code, _, _ = run(
            capsys, "simulate", spec_file(SPHERE_CONST), "--points", str(bad),
            "--seed", "0", "--out", str(out),
        )
        assert code == 3
        assert not out.exists()
        assert list(tmp_path.glob(".spherecov-*")) == []

    def test_wrong_column_count(self, capsys, spec_file, tmp_path):
        bad = tmp_path / "narrow.csv"
        bad.write_text("1,0\n0,1\n", encoding="utf-8")
        code, _, _ = run(capsys, "simulate", spec_file(SPHERE_CONST), "--points", str(bad), "--seed", "0")
        assert code == 2

    def test_ragged_points_file(self, capsys, spec_file, tmp_path):
        bad = tmp_path / "ragged.csv"
        bad.write_text("1,0,0\n0,1\n", encoding="utf-8")
        code, _, _ = run(capsys, "simulate", spec_file(SPHERE_CONST), "--points", str(bad), "--seed", "0")
        assert code == 2

    def test_spacetime_points_include_time_column(self, capsys, spec_file, tmp_path):
        points = tmp_path / "st.csv"
        points.write_text("1,0,0,0.0\n0,1,0,0.5\n", encoding="utf-8")
        code, out, _ = run(
            capsys, "simulate", spec_file(ST_GAUSS), "--points", str(points),
            "--samples", "2", "--seed", "3",
        )
        assert code == 0
        assert self._data_rows(out).shape == (2, 2)

    def test_env_seed_matches_flag(self, capsys, spec_file, monkeypatch):
        spec = spec_file(SPHERE_DEGREE_ONE)
        monkeypatch.setenv("SPHERECOV_SEED", "23")
        code, out_env, _ = run(capsys, "simulate", spec, "--random", "3", "--samples", "2")
        assert code == 0
        monkeypatch.delenv("SPHERECOV_SEED")
        code, out_flag, _ = run(capsys, "simulate", spec, "--random", "3", "--samples", "2", "--seed", "23")
        assert code == 0
        assert out_env == out_flag

    def test_bad_env_seed(self, capsys, spec_file, monkeypatch):
        monkeypatch.setenv("SPHERECOV_SEED", "lucky")
        code, _, _ = run(capsys, "simulate", spec_file(SPHERE_CONST), "--random", "2")
        assert code == 2

    def test_degree_cap_requires_spectral(self, capsys, spec_file):
        code, _, _ = run(
            capsys, "simulate", spec_file(SPHERE_CONST), "--random", "2",
            "--seed", "0", "--degree-cap", "5",
        )
        assert code == 2


class TestRoundTrip:
    def test_grid_output_feeds_coeffs(self, capsys, spec_file, tmp_path):
        seq = multiquadric_sequence(0.3, LEGENDRE, 60)
        spec = spec_file({"kind": "sphere", "d": 2, "coeffs": [float(a) for a in seq.coeffs]})
        code, out, _ = run(capsys, "eval", spec, "--grid", "401")
        assert code == 0
        table = tmp_path / "sampled.csv"
        table.write_text(out, encoding="utf-8")
        code, out, _ = run(capsys, "coeffs", "--lambda", "0.5", "--nmax", "25", "--table", str(table))
        assert code == 0
        recovered = parse_coeffs(out)
        assert float(np.abs(recovered - seq.coeffs[:26]).max()) <= 1e-6


class TestEntryPoints:
    def test_module_invocation(self, tmp_path):
        spec = tmp_path / "kernel.json"
        spec.write_text(json.dumps(SPHERE_CONST), encoding="utf-8")
        result = subprocess.run(
            [sys.executable, "-m", "spherecov", "eval", str(spec), "--x", "0.3"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert result.stdout == "0.3,1.0\n"

    def test_module_invocation_error_shape(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "spherecov", "eval", str(tmp_path / "nope.json"), "--x", "0"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 2
        payload = json.loads(result.stderr)
        assert payload["error"] == 2

    def test_usage_error_is_exit_2(self):
        result = subprocess.run(
            [sys.executable, "-m", "spherecov", "eval"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 2
        assert json.loads(result.stderr)["error"] == 2
