import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from hybrid_dicke.cli import main
from hybrid_dicke.figures import DEFAULT_N_LIST, FIGURES

from oracles import dense_hamiltonian

POINT_FIG2CD = ["--Omega", "1", "--omega", "1", "--alpha", "2", "--g0", "0.251", "--n", "1"]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def usage_exit(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    return info.value.code


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestPoint:
    def test_plain_dicke_critical(self, capsys):
        code, out, _ = run(["point", "--Omega", "1", "--omega", "1", "--chi", "1",
                            "--alpha", "0", "--g0", "0", "--n", "0"], capsys)
        assert code == 0 and json.loads(out)["phase"] == "critical"

    def test_reversed_point(self, capsys):
        code, out, _ = run(["point", *POINT_FIG2CD, "--chi", "0.05"], capsys)
        rec = json.loads(out)
        assert code == 0 and rec["psi_q"] == pytest.approx(0.525, abs=1e-9)

    def test_lambda_flag(self, capsys):
        _, a, _ = run(["point", *POINT_FIG2CD, "--lambda", "0.025"], capsys)
        _, b, _ = run(["point", *POINT_FIG2CD, "--chi", "0.05"], capsys)
        assert json.loads(a)["psi_q"] == pytest.approx(json.loads(b)["psi_q"], rel=1e-14)

    def test_unstable_is_not_an_error(self, capsys):
        code, out, _ = run(["point", *POINT_FIG2CD, "--chi", "0.04"], capsys)
        assert code == 0 and json.loads(out)["phase"] == "unstable"

    @pytest.mark.parametrize("argv", [
        ["point", *POINT_FIG2CD, "--chi", "0.05", "--lambda", "0.1"],
        ["point", *POINT_FIG2CD],
        ["point", "--Omega", "1", "--chi", "0.1"],
        ["point", *POINT_FIG2CD, "--chi", "0.05", "--bogus", "1"],
        ["point", "--Omega", "-1", "--omega", "1", "--alpha", "0", "--g0", "0", "--n", "0", "--chi", "1"],
        [],
    ])
    def test_usage_errors(self, argv, capsys):
        assert usage_exit(argv) == 2


class TestSweep:
    def test_fig2_sweep(self, tmp_path, capsys):
        code, out, _ = run(["sweep", "--g0", "0.249", "--n", "1", "--axis", "chi=0.01:0.2:400",
                            "--out", str(tmp_path)], capsys)
        assert code == 0 and out.strip() == str(tmp_path / "manifest.json")
        assert len((tmp_path / "sweep.csv").read_text().splitlines()) == 401

    def test_2d_manifest_echoes_axes(self, tmp_path, capsys):
        run(["sweep", *POINT_FIG2CD, "--axis", "chi=0.03:0.12:11", "--axis", "g0=0.24:0.27:5",
             "--out", str(tmp_path)], capsys)
        meta = json.loads((tmp_path / "manifest.json").read_text())
        assert [(a["name"], a["start"], a["stop"], a["count"]) for a in meta["axes"]] == [
            ("chi", 0.03, 0.12, 11), ("g0", 0.24, 0.27, 5)]
        assert sum(meta["status_counts"].values()) == 55

    def test_repeat_and_manifest_rerun_identical(self, tmp_path, capsys):
        argv = ["sweep", *POINT_FIG2CD, "--axis", "chi=0.03:0.12:21", "--axis", "g0=0.24:0.27:7"]
        run(argv + ["--out", str(tmp_path / "a")], capsys)
        run(argv + ["--out", str(tmp_path / "b"), "--workers", "2"], capsys)
        run(["sweep", "--manifest", str(tmp_path / "a" / "manifest.json"),
             "--out", str(tmp_path / "c")], capsys)
        for name in ("sweep.csv", "manifest.json"):
            ref = (tmp_path / "a" / name).read_bytes()
            assert (tmp_path / "b" / name).read_bytes() == ref
            assert (tmp_path / "c" / name).read_bytes() == ref

    @pytest.mark.parametrize("axis", ["chi=0.2:0.1:3", "chi=1", "mu=0:1:3"])
    def test_malformed_axis(self, axis, tmp_path):
        assert usage_exit(["sweep", "--axis", axis, "--out", str(tmp_path)]) == 2

    def test_ed_backend_needs_n(self, tmp_path):
        assert usage_exit(["sweep", "--axis", "chi=0:1:3", "--backend", "ed", "--out", str(tmp_path)]) == 2

    def test_missing_manifest_is_runtime_failure(self, tmp_path, capsys):
        code, _, err = run(["sweep", "--manifest", str(tmp_path / "nope.json"),
                            "--out", str(tmp_path)], capsys)
        assert code == 1 and "error" in err


class TestEd:
    def test_small_n_matches_dense_oracle(self, tmp_path, capsys):
        code, _, _ = run(["ed", "--N", "2", "--axis", "chi=0:1.5:4", "--frame", "original",
                          "--fock-cutoff", "40", "--out", str(tmp_path)], capsys)
        assert code == 0
        rows = read_csv(tmp_path / "ed_N2.csv")
        assert len(rows) == 4
        for row in rows:
            chi = float(row["chi"])
            M = int(row["cutoff_used"])
            H = dense_hamiltonian(1.0, 1.0, chi / 2, 0.0, 0.0, 0, 1.0, 2, M)
            # 12 significant digits are written; compare at that resolution
            assert float(row["ground_energy"]) == pytest.approx(np.linalg.eigvalsh(H)[0], abs=1e-10)

    def test_decoupled_column(self, tmp_path, capsys):
        run(["ed", "--N", "3", "--axis", "chi=0:0.5:2", "--out", str(tmp_path)], capsys)
        row = read_csv(tmp_path / "ed_N3.csv")[0]
        assert float(row["psi_q"]) == 0 and float(row["ground_energy"]) == pytest.approx(-1.5)
        assert row["psi_q_inf"] == "0"

    def test_manifest_aggregates(self, tmp_path, capsys):
        run(["ed", "--N", "2", "--N", "4", "--g0", "0.249", "--n", "1",
             "--axis", "chi=0.02:0.1:3", "--out", str(tmp_path)], capsys)
        meta = json.loads((tmp_path / "manifest.json").read_text())
        assert meta["N"] == [2, 4] and meta["all_converged"] is True
        assert [s["file"] for s in meta["studies"]] == ["ed_N2.csv", "ed_N4.csv"]

    def test_unstable_points_recorded(self, tmp_path, capsys):
        run(["ed", "--N", "2", *POINT_FIG2CD[:-2], "--n", "1", "--axis", "chi=0.03:0.05:2",
             "--out", str(tmp_path)], capsys)
        assert [r["status"] for r in read_csv(tmp_path / "ed_N2.csv")] == ["unstable", "ok"]

    def test_requires_n(self, tmp_path):
        assert usage_exit(["ed", "--axis", "chi=0:1:3", "--out", str(tmp_path)]) == 2

    def test_requires_chi_axis(self, tmp_path):
        assert usage_exit(["ed", "--N", "2", "--axis", "g0=0:0.1:3", "--out", str(tmp_path)]) == 2


class TestFigure:
    def test_unknown_name(self, tmp_path):
        assert usage_exit(["figure", "fig9z", "--out", str(tmp_path)]) == 2

    def test_fig2a_gap_closes_at_critical_coupling(self, tmp_path, capsys):
        code, out, _ = run(["figure", "fig2a", "--out", str(tmp_path)], capsys)
        assert code == 0
        rows = read_csv(tmp_path / "fig2a_n1.csv")
        chi = np.array([float(r["chi"]) for r in rows])
        gap = np.array([float(r["omega_minus"]) for r in rows])
        k = int(np.argmin(gap))
        assert abs(chi[k] - 0.06325) < (chi[1] - chi[0])
        assert gap[k] < 0.02

    def test_fig4c_no_transition(self, tmp_path, capsys):
        run(["figure", "fig4c", "--out", str(tmp_path)], capsys)
        rows = read_csv(tmp_path / "fig4c_n0.csv")
        assert len(rows) == 121 * 121
        assert all(float(r["psi_q"]) == 0 for r in rows if r["status"] == "ok")
        contours = json.loads((tmp_path / "fig4c_n0_contours.json").read_text())
        assert contours["psi_q@1e-06"] == []

    def test_fig5_presets_use_default_n_list(self):
        for name in ("fig5a", "fig5b", "fig5c"):
            for series in FIGURES[name].series:
                assert series.backend == "ed" and tuple(series.n_list) == DEFAULT_N_LIST == (4, 10, 40, 100)

    def test_fig3c_has_dressed_coupling(self, tmp_path, capsys):
        run(["figure", "fig3c", "--out", str(tmp_path)], capsys)
        rows = read_csv(tmp_path / "fig3c_n1.csv")
        ok = [r for r in rows if r["status"] == "ok"]
        assert ok and all(r["chi_n"] for r in ok)
        chi = float(ok[0]["chi"])
        assert float(ok[0]["chi_n"]) == pytest.approx(chi / math.sqrt(1 + 2 * chi**2 - 1.004), rel=1e-9)


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "hybrid_dicke.cli", "point", *POINT_FIG2CD, "--chi", "0.1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["phase"] == "normal"
