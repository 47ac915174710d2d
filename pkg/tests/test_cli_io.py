"""End-to-end tests for file formats and the command-line front-end."""

import json
import math

import numpy as np
import pytest

from majorana_jm import io
from majorana_jm.cli import main
from majorana_jm.matching import degree2_ensemble
from majorana_jm.povm import ParentPovmSpec, sharpness_table
from majorana_jm.sampling import FermionicState, HamiltonianSpec, simulate_shots


class TestMatrixText:
    def test_round_trip_full_precision(self):
        rng = np.random.default_rng(0)
        arr = rng.standard_normal((5, 5))
        assert np.array_equal(io.matrix_from_text(io.matrix_to_text(arr)), arr)

    def test_file_round_trip(self, tmp_path):
        arr = degree2_ensemble(3).matrices[0].entries
        path = tmp_path / "m.txt"
        io.write_matrix_text(path, arr)
        assert np.array_equal(io.read_matrix_text(path), arr)


class TestEnsembleArchive:
    def test_round_trip(self, tmp_path):
        ens = degree2_ensemble(3)
        path = tmp_path / "ens.zip"
        io.write_ensemble_archive(path, ens)
        loaded = io.read_ensemble_archive(path)
        assert loaded.n_modes == 3 and loaded.degree_k == 1
        for a, b in zip(ens.matrices, loaded.matrices):
            assert np.array_equal(a.entries, b.entries)
        assert loaded.coverage.min_eta == pytest.approx(0.5, abs=1e-12)

    def test_metadata_cycles(self, tmp_path):
        import zipfile

        ens = degree2_ensemble(3)
        path = tmp_path / "ens.zip"
        io.write_ensemble_archive(path, ens)
        with zipfile.ZipFile(path) as zf:
            meta = json.loads(zf.read("metadata.json"))
            names = set(zf.namelist())
        assert {"metadata.json", "matrix_1.txt", "matrix_2.txt", "coverage.csv"} <= names
        assert meta["pi_cycles"] == [[1], [2, 3], [4, 5], [6]]
        assert meta["sigma_cycles"][1] == [[1, 3], [2, 5], [4, 6]]


class TestStateJson:
    def test_pure_round_trip(self):
        state = FermionicState.random_pure(2, np.random.default_rng(1))
        back = io.state_from_json(io.state_to_json(state))
        assert np.allclose(back.vector, state.vector)

    def test_density_round_trip(self):
        state = FermionicState.maximally_mixed(2)
        back = io.state_from_json(io.state_to_json(state))
        assert np.allclose(back.density_matrix, state.density_matrix)

    def test_rejects_junk(self):
        with pytest.raises(ValueError):
            io.state_from_json({"n_modes": 1})


class TestShotLog:
    def test_format(self):
        parent = ParentPovmSpec(degree2_ensemble(2))
        state = FermionicState.basis_state(2)
        batch = simulate_shots(state, parent, 4, np.random.default_rng(0))
        text = io.shot_log_csv(batch)
        lines = text.strip().splitlines()
        assert lines[0] == "shot_id,r,x_bits,q_bits"
        assert len(lines) == 5
        shot_id, r, xb, qb = lines[1].split(",")
        assert int(r) in (1, 2)
        assert int(xb, 16) < 2 ** 4
        assert int(qb, 16) < 2 ** 2


class TestRngSubstreams:
    def test_labels_are_independent(self):
        a = io.rng_for(7, "simulate").integers(0, 1 << 30, 4)
        b = io.rng_for(7, "coins").integers(0, 1 << 30, 4)
        c = io.rng_for(7, "simulate").integers(0, 1 << 30, 4)
        assert np.array_equal(a, c)
        assert not np.array_equal(a, b)


class TestCli:
    def run(self, *argv):
        return main(list(argv))

    def test_construct_worked_example(self, tmp_path, capsys):
        out = tmp_path / "ens.zip"
        code = self.run("construct", "--n", "3", "--k", "1", "--out", str(out))
        assert code == 0
        info = json.loads(capsys.readouterr().out)
        assert info["n_matrices"] == 2
        assert info["min_eta"] == pytest.approx(0.5, abs=1e-12)
        assert out.exists() and (tmp_path / "ens.zip.coverage.csv").exists()
        loaded = io.read_ensemble_archive(out)
        printed_o2 = np.array(
            [
                [0, 0, 1, 0, 1, 0],
                [1, 0, 0, 0, 0, 1],
                [0, 0, 1, 0, -1, 0],
                [0, 1, 0, 1, 0, 0],
                [1, 0, 0, 0, 0, -1],
                [0, 1, 0, -1, 0, 0],
            ]
        ) / math.sqrt(2.0)
        assert np.max(np.abs(loaded.matrices[1].entries - printed_o2)) < 1e-15

    def test_construct_degree4(self, tmp_path, capsys):
        out = tmp_path / "ens4.zip"
        code = self.run(
            "construct", "--n", "6", "--k", "2", "--N", "9", "--seed", "7",
            "--out", str(out),
        )
        assert code == 0
        info = json.loads(capsys.readouterr().out)
        assert info["min_eta"] > 0

    def test_construct_invalid_degree_exit4(self, tmp_path, capsys):
        code = self.run(
            "construct", "--n", "3", "--k", "2", "--seed", "1",
            "--out", str(tmp_path / "x.zip"),
        )
        assert code == 4
        assert "invalid" in capsys.readouterr().err

    def test_construct_needs_seed(self, tmp_path):
        code = self.run("construct", "--n", "6", "--k", "2", "--out", str(tmp_path / "x.zip"))
        assert code == 4

    def test_validate_and_sharpness(self, tmp_path, capsys):
        out = tmp_path / "ens.zip"
        assert self.run("construct", "--n", "2", "--k", "1", "--out", str(out)) == 0
        capsys.readouterr()
        assert self.run("validate", "--ensemble", str(out)) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["uncovered"] == []
        assert report["dense_checks"][0]["completeness_residual"] < 1e-10
        table_path = tmp_path / "sharp.csv"
        assert self.run("sharpness", "--ensemble", str(out), "--out", str(table_path)) == 0
        lines = table_path.read_text().strip().splitlines()
        assert lines[0] == "S,r,R,eta_RS,eta_S,eta_effective"
        assert len(lines) == 1 + math.comb(4, 2)

    def test_robustness_values(self, tmp_path, capsys):
        assert self.run("robustness", "--n", "2", "--k", "2") == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["value"] == pytest.approx(1 / math.sqrt(3), abs=1e-9)
        assert rep["status"] == "ok"
        assert self.run("robustness", "--n", "2", "--k", "1") == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["value"] == pytest.approx(0.5, abs=1e-9)

    def test_robustness_budget_fallback(self, capsys):
        assert self.run("robustness", "--n", "5", "--k", "2", "--budget", "8") == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["status"] == "budget-exceeded"
        assert rep["value"] is None
        assert rep["bounds"]["thm2_upper"] is not None

    def test_simulate_and_estimate(self, tmp_path, capsys):
        ens = tmp_path / "ens.zip"
        assert self.run("construct", "--n", "2", "--k", "1", "--out", str(ens)) == 0
        state = FermionicState.random_pure(2, np.random.default_rng(5))
        state_path = tmp_path / "state.json"
        state_path.write_text(io.state_to_json(state))
        log = tmp_path / "shots.csv"
        code = self.run(
            "simulate", "--state", str(state_path), "--ensemble", str(ens),
            "--shots", "200", "--seed", "3", "--out", str(log),
        )
        assert code == 0
        assert len(log.read_text().strip().splitlines()) == 201
        capsys.readouterr()
        rep_path = tmp_path / "est.json"
        code = self.run(
            "estimate", "--state", str(state_path), "--ensemble", str(ens),
            "--targets", "gamma[1,3],gamma[2,4]", "--shots", "20000",
            "--seed", "3", "--out", str(rep_path),
        )
        assert code == 0
        report = json.loads(rep_path.read_text())
        for entry in report["estimates"]:
            exact = state.expectation(tuple(entry["target"]))
            assert abs(entry["estimate"] - exact) < 5 * entry["stderr"]

    def test_estimate_exact_mode(self, tmp_path):
        ens = tmp_path / "ens.zip"
        assert self.run("construct", "--n", "2", "--k", "1", "--out", str(ens)) == 0
        state = FermionicState.random_pure(2, np.random.default_rng(8))
        state_path = tmp_path / "state.json"
        state_path.write_text(io.state_to_json(state))
        ham_path = tmp_path / "ham.json"
        ham_path.write_text(json.dumps({"terms": [[[1, 2], 0.5], [[1, 3], -0.25]]}))
        rep_path = tmp_path / "est.json"
        code = self.run(
            "estimate", "--state", str(state_path), "--ensemble", str(ens),
            "--targets", "gamma[1,3]", "--hamiltonian", str(ham_path),
            "--shots", "0", "--out", str(rep_path),
        )
        assert code == 0
        report = json.loads(rep_path.read_text())
        assert report["mode"] == "exact"
        (entry,) = report["estimates"]
        assert entry["estimate"] == pytest.approx(state.expectation((1, 3)), abs=1e-10)
        ham = HamiltonianSpec((((1, 2), 0.5), ((1, 3), -0.25)))
        assert report["hamiltonian"]["estimate"] == pytest.approx(
            ham.expectation(state), abs=1e-10
        )

    def test_estimate_uncovered_exit5(self, tmp_path, capsys):
        # identity-like single rotation covers only the standard pairs
        from majorana_jm.matching import custom_ensemble

        ens_path = tmp_path / "ident.zip"
        io.write_ensemble_archive(ens_path, custom_ensemble(2, 1, [np.eye(4)]))
        state_path = tmp_path / "state.json"
        state_path.write_text(io.state_to_json(FermionicState.basis_state(2)))
        code = self.run(
            "estimate", "--state", str(state_path), "--ensemble", str(ens_path),
            "--targets", "gamma[1,3]", "--shots", "0",
        )
        assert code == 5
        assert "uncovered" in capsys.readouterr().err

    def test_estimate_dimension_mismatch_exit4(self, tmp_path):
        ens = tmp_path / "ens.zip"
        assert self.run("construct", "--n", "2", "--k", "1", "--out", str(ens)) == 0
        state_path = tmp_path / "state.json"
        state_path.write_text(io.state_to_json(FermionicState.basis_state(3)))
        code = self.run(
            "estimate", "--state", str(state_path), "--ensemble", str(ens),
            "--targets", "gamma[1,2]", "--shots", "0",
        )
        assert code == 4

    def test_missing_file_exit2(self, tmp_path):
        code = self.run("validate", "--ensemble", str(tmp_path / "missing.zip"))
        assert code == 2

    def test_compare_csv(self, tmp_path):
        out = tmp_path / "cmp.csv"
        assert self.run("compare", "--n-range", "2:6", "--k", "1", "--out", str(out)) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("n,k,eta_construction")
        assert len(lines) == 6
        rows = [ln.split(",") for ln in lines[1:]]
        for col in (4, 5, 6):  # shadow_jm_bound, ho_bound, thm2_upper decrease in n
            values = [float(r[col]) for r in rows]
            assert all(a > b for a, b in zip(values, values[1:]))
        ternary = [float(r[3]) for r in rows]
        assert all(a >= b for a, b in zip(ternary, ternary[1:]))

    def test_byte_identical_reruns(self, tmp_path):
        ens = tmp_path / "ens.zip"
        assert self.run("construct", "--n", "2", "--k", "1", "--out", str(ens)) == 0
        state_path = tmp_path / "state.json"
        state_path.write_text(io.state_to_json(FermionicState.basis_state(2)))
        outs = []
        for tag in ("a", "b"):
            rep = tmp_path / f"est_{tag}.json"
            code = self.run(
                "estimate", "--state", str(state_path), "--ensemble", str(ens),
                "--targets", "gamma[1,2],gamma[1,3]", "--shots", "5000",
                "--seed", "17", "--out", str(rep),
            )
            assert code == 0
            outs.append(rep.read_bytes())
        assert outs[0] == outs[1]

    def test_config_file_defaults(self, tmp_path, capsys):
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"budget": 8}))
        assert self.run(
            "robustness", "--n", "5", "--k", "2", "--config", str(conf)
        ) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["status"] == "budget-exceeded"

    def test_threads_flag_does_not_change_results(self, tmp_path, capsys):
        outs = []
        for threads in ("1", "3"):
            assert self.run("robustness", "--n", "2", "--k", "2", "--threads", threads) == 0
            outs.append(capsys.readouterr().out)
        assert outs[0] == outs[1]


class TestMixedDegreeHamiltonian:
    def test_table_serves_multiple_degrees(self):
        ens = degree2_ensemble(3)
        table = sharpness_table(ens)
        # degree-4 assignments come from the same rotations, built lazily
        eta4 = table.mean_sharpness((1, 2, 3, 4))
        assert eta4 >= 0.0
        row = table.row_for((1, 3))
        assert row.eta_s == pytest.approx(0.5, abs=1e-12)
