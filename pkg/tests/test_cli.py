import csv
import hashlib
import json

import numpy as np
import pytest

from rtnqubit.cli import main
from rtnqubit.noise import EnvironmentTopology, SwitchingRates, lambda_unbalanced
from rtnqubit.dynamics import negativity_bell_closed_form
from rtnqubit.nonmarkov import nm_surface


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(x) for x in row] for row in body])
    return header, data


class TestLambdaCommand:
    def test_columns_and_first_row(self, tmp_path):
        out = tmp_path / "o"
        rc = main([
            "lambda", "--out", str(out), "--n", "4", "--gamma0", "1", "--gamma1", "5",
            "--horizon", "5", "--time-step", "0.01",
        ])
        assert rc == 0
        header, data = read_csv(out / "lambda_n4_g01_g15.csv")
        assert header == ["tau", "re_lambda", "im_lambda", "abs_lambda"]
        assert list(data[0]) == [0.0, 1.0, 0.0, 1.0]
        assert np.all(data[:, 3] <= 1.0 + 1e-12)

    def test_round_trip_is_exact(self, tmp_path):
        out = tmp_path / "o"
        main(["lambda", "--out", str(out), "--n", "2", "--gamma0", "0.3",
              "--gamma1", "7.7", "--horizon", "3", "--time-step", "0.3"])
        _, data = read_csv(out / "lambda_n2_g00p3_g17p7.csv")
        values = lambda_unbalanced(2, SwitchingRates(0.3, 7.7), data[:, 0])
        assert np.array_equal(data[:, 1], values.real)
        assert np.array_equal(data[:, 2], values.imag)

    def test_balanced_flag_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["lambda", "--n", "2", "--gamma0", "2", "--gamma1", "2",
                "--horizon", "2", "--time-step", "0.1"]
        main(args + ["--out", str(a)])
        main(args + ["--out", str(b), "--balanced"])
        name = "lambda_n2_g02_g12.csv"
        assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_balanced_flag_rejects_unequal_rates(self, tmp_path):
        rc = main(["lambda", "--out", str(tmp_path), "--gamma0", "1",
                   "--gamma1", "2", "--balanced"])
        assert rc == 1


class TestNegativityCommand:
    def test_initial_time_and_single_qubit_square(self, tmp_path):
        out = tmp_path / "o"
        rc = main([
            "negativity", "--out", str(out), "--topology", "ie",
            "--gamma0-presets", "1", "--grid-min", "0.5", "--grid-max", "1.5",
            "--grid-step", "0.5", "--horizon", "4", "--time-step", "0.05",
        ])
        assert rc == 0
        _, data = read_csv(out / "fig1_ie_g01.csv")
        at_zero = data[data[:, 0] == 0.0]
        assert np.all(at_zero[:, 2] == 1.0)
        for g1 in (0.5, 1.0, 1.5):
            block = data[data[:, 1] == g1]
            sq = negativity_bell_closed_form(
                EnvironmentTopology.SINGLE_QUBIT, SwitchingRates(1.0, g1), block[:, 0]
            )
            assert np.max(np.abs(block[:, 2] - sq**2)) < 1e-12

    def test_common_environment_doubles_oscillation_frequency(self, tmp_path):
        out = tmp_path / "o"
        main([
            "negativity", "--out", str(out), "--gamma0-presets", "0.1",
            "--grid-min", "0.1", "--grid-max", "0.1", "--grid-step", "1",
            "--horizon", "20", "--time-step", "0.01",
        ])

        def peak_spacing(name):
            _, data = read_csv(out / name)
            curve = data[:, 2]
            peaks = [
                i for i in range(1, len(curve) - 1)
                if curve[i] > curve[i - 1] and curve[i] > curve[i + 1]
            ]
            gaps = np.diff(data[peaks, 0])
            return gaps.mean()

        ratio = peak_spacing("fig1_ie_g00p1.csv") / peak_spacing("fig1_ce_g00p1.csv")
        assert abs(ratio - 2.0) <= 0.2

    def test_unknown_topology_is_invalid_config(self, tmp_path):
        assert main(["negativity", "--out", str(tmp_path), "--topology", "bogus"]) == 1


class TestRevivalsCommand:
    def test_map_symmetry_and_regimes(self, tmp_path):
        out = tmp_path / "o"
        rc = main([
            "revivals", "--out", str(out), "--grid-min", "0.5", "--grid-max", "3.0",
            "--grid-step", "0.5", "--horizon", "20", "--time-step", "0.01",
        ])
        assert rc == 0
        _, data = read_csv(out / "fig2_revivals.csv")
        n = 6
        ie = data[:, 2].reshape(n, n)
        ce = data[:, 3].reshape(n, n)
        assert np.array_equal(ie, ie.T)
        assert np.array_equal(ce, ce.T)
        assert ie[0, 0] == 1.0 and ie[-1, -1] == 0.0   # 0.5 oscillates, 3.0 does not
        assert ce[-1, -1] == 1.0                       # 3.0 still below the cusp rate 4


class TestNonmarkovCommand:
    def test_surface_matches_library(self, tmp_path):
        out = tmp_path / "o"
        rc = main([
            "nonmarkov", "--out", str(out), "--grid-min", "0.5", "--grid-max", "2.5",
            "--grid-step", "1.0", "--end", "10", "--time-step", "0.001",
        ])
        assert rc == 0
        _, data = read_csv(out / "fig3_nonmarkov.csv")
        gammas = np.array([0.5, 1.5, 2.5])
        expect = nm_surface(gammas, end=10.0, step=1e-3)
        assert np.array_equal(data[:, 2].reshape(3, 3), expect)
        assert data[-1, 2] == 0.0


class TestTeleportCommand:
    def test_surfaces_and_advantage(self, tmp_path):
        out = tmp_path / "o"
        rc = main([
            "teleport", "--out", str(out), "--gamma0-presets", "1",
            "--grid-min", "0.5", "--grid-max", "1.5", "--grid-step", "0.5",
            "--horizon", "3", "--time-step", "0.1",
        ])
        assert rc == 0
        _, fid = read_csv(out / "fig4_fid_g01.csv")
        assert np.all(fid[fid[:, 0] == 0.0][:, 2] == 1.0)
        assert np.all((fid[:, 2] >= 1 / 3 - 1e-12) & (fid[:, 2] <= 1.0 + 1e-12))
        _, adv = read_csv(out / "fig4_adv_g01.csv")
        on_diagonal = adv[adv[:, 1] == 1.0]
        assert not on_diagonal[:, 2].any()


VALIDATE_ARGS = [
    "validate", "--draws", "6", "--trajectories", "5000", "--neg-draws", "10",
    "--teleport-draws", "5", "--quadrature-draws", "1", "--seed", "99",
]


class TestValidateCommand:
    def test_passes_and_is_deterministic(self, tmp_path, capsys):
        out1, out2, out3 = (tmp_path / n for n in "abc")
        assert main(VALIDATE_ARGS + ["--out", str(out1)]) == 0
        assert main(VALIDATE_ARGS + ["--out", str(out2)]) == 0
        assert main(VALIDATE_ARGS + ["--out", str(out3), "--threads", "3"]) == 0
        capsys.readouterr()
        report = (out1 / "validation_report.txt").read_bytes()
        assert report == (out2 / "validation_report.txt").read_bytes()
        assert report == (out3 / "validation_report.txt").read_bytes()
        assert b"overall PASS" in report

    def test_manifest_records_checksums(self, tmp_path, capsys):
        out = tmp_path / "o"
        main(VALIDATE_ARGS + ["--out", str(out)])
        capsys.readouterr()
        manifest = json.loads((out / "manifest_validate.json").read_text())
        assert manifest["trajectory_rng"] == "splitmix64"
        assert manifest["config"]["seed"] == 99
        entry = manifest["outputs"][0]
        digest = hashlib.sha256((out / entry["path"]).read_bytes()).hexdigest()
        assert digest == entry["sha256"]

    def test_corrupted_factor_is_detected(self, tmp_path, capsys):
        out = tmp_path / "o"
        rc = main(VALIDATE_ARGS + ["--out", str(out), "--inject-lambda-offset", "0.05"])
        capsys.readouterr()
        assert rc == 2
        assert b"FAIL" in (out / "validation_report.txt").read_bytes()


class TestConfigFile:
    def test_file_values_and_flag_precedence(self, tmp_path, capsys):
        cfg = tmp_path / "run.ini"
        cfg.write_text("[common]\nseed = 5\n[lambda]\ngamma0 = 2.5\ngamma1 = 0.5\n")
        out = tmp_path / "o"
        rc = main([
            "lambda", "--config", str(cfg), "--out", str(out),
            "--gamma1", "4.0", "--horizon", "1", "--time-step", "0.5",
        ])
        assert rc == 0
        manifest = json.loads((out / "manifest_lambda.json").read_text())
        assert manifest["config"]["gamma0"] == 2.5   # from file
        assert manifest["config"]["gamma1"] == 4.0   # flag wins
        assert manifest["config"]["seed"] == 5

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.ini"
        cfg.write_text("[lambda]\nfrequency = 3\n")
        assert main(["lambda", "--config", str(cfg), "--out", str(tmp_path)]) == 1

    def test_usage_errors_map_to_invalid_config(self, tmp_path, capsys):
        assert main(["lambda", "--no-such-flag"]) == 1
        assert main(["--help"]) == 0
        capsys.readouterr()

    def test_manifest_replay_reproduces_payload(self, tmp_path):
        out = tmp_path / "o"
        main(["lambda", "--out", str(out), "--n", "2", "--gamma0", "0.4",
              "--gamma1", "6.1", "--horizon", "2", "--time-step", "0.1"])
        manifest = json.loads((out / "manifest_lambda.json").read_text())
        cfg = manifest["config"]
        replay_out = tmp_path / "replay"
        rc = main([
            "lambda", "--out", str(replay_out),
            "--n", repr(cfg["n"]),
            "--gamma0", repr(cfg["gamma0"]), "--gamma1", repr(cfg["gamma1"]),
            "--horizon", repr(cfg["horizon"]), "--time-step", repr(cfg["time_step"]),
            "--seed", str(cfg["seed"]), "--threads", str(cfg["threads"]),
        ])
        assert rc == 0
        name = manifest["outputs"][0]["path"]
        assert (out / name).read_bytes() == (replay_out / name).read_bytes()

    @pytest.mark.parametrize(
        "args",
        [
            ["lambda", "--grid-step", "-1"],
            ["lambda", "--gamma0", "-2"],
            ["nonmarkov", "--end", "0"],
            ["validate", "--draws", "0"],
            ["lambda", "--backend", "fortran"],
        ],
    )
    def test_invalid_values_exit_one(self, tmp_path, args):
        assert main(args + ["--out", str(tmp_path)]) == 1
