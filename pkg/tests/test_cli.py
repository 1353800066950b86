import json
import os
from pathlib import Path
from unittest.mock import MagicMock, patch

import pytest

from sepscan import cli
from sepscan.config import SEED_VARIABLE
from sepscan.enums import Ensemble, Metric, Proposal
from sepscan.exceptions import InfeasibleSliceError
from sepscan.views import CheckResult

SAMPLE_CURVE = str(Path(os.path.dirname(__file__)) / "sample_curve.csv")


class TestParseArgs:
    def test_curve(self) -> None:
        # Act
        namespace = cli.parse_args(["curve", "--ensemble=real", "--bins=50", "--seed=4"])

        # Assert
        assert namespace.func is cli.curve
        assert namespace.ensemble == Ensemble.REAL
        assert namespace.bins == 50
        assert namespace.seed == 4
        assert namespace.group_samples == 250

    def test_prob_defaults_to_fewer_group_samples(self) -> None:
        # Act
        namespace = cli.parse_args(["prob", "--metric=bures", "--proposal=bures"])

        # Assert
        assert namespace.metric == Metric.BURES
        assert namespace.proposal == Proposal.BURES_ADAPTED
        assert namespace.group_samples == 100

    def test_build_config_converts_pairs(self) -> None:
        # Arrange
        argv = ["fit", "--in", SAMPLE_CURVE, "--interval", "0.2", "0.4", "--exclude", "0.3"]
        namespace = cli.parse_args(argv)

        # Act
        config = cli.build_config(namespace)

        # Assert
        assert config.command == "fit"
        assert config.input == SAMPLE_CURVE
        assert config.interval == (0.2, 0.4)
        assert config.excluded == (0.3,)


    def test_jump_and_plot_options(self) -> None:
        # Arrange
        jumps_argv = ["jumps", "--in", SAMPLE_CURVE, "--standardised"]
        fit_argv = ["fit", "--in", SAMPLE_CURVE, "--interval", "0.2", "0.4", "--plot", "fit.svg"]
        plot_argv = ["plot", "--in", SAMPLE_CURVE, "--out", "p.svg", "--labels", "real", "complex"]

        # Act
        jumps_config = cli.build_config(cli.parse_args(jumps_argv))
        fit_config = cli.build_config(cli.parse_args(fit_argv))
        plot_config = cli.build_config(cli.parse_args(plot_argv))

        # Assert
        assert jumps_config.standardised
        assert fit_config.plot_out == "fit.svg"
        assert plot_config.labels == ("real", "complex")
        assert plot_config.to_dict()["labels"] == ["real", "complex"]


class TestRun:
    def test_curve_to_stdout(self, capsys: pytest.CaptureFixture) -> None:
        # Arrange
        argv = ["curve", "--ensemble=real", "--bins=4", "--spectra-per-bin=2", "--group-samples=3"]

        # Act
        code = cli.run(argv + ["--quiet"])

        # Assert
        out = capsys.readouterr().out
        rows = out.splitlines()
        assert code == 0
        assert rows[0] == "# ensemble=real"
        assert rows[rows.index("c,sigma,n,separable,stderr") + 1 :] == rows[-3:]

    @patch.object(cli, "create_engine")
    def test_prob_emits_json(
        self, patch_create_engine: MagicMock, capsys: pytest.CaptureFixture
    ) -> None:
        # Arrange
        patch_create_engine.return_value.probability.return_value = {"estimate": 0.25}

        # Act
        code = cli.run(["prob", "--quiet"])

        # Assert
        assert code == 0
        assert json.loads(capsys.readouterr().out) == {"estimate": 0.25}

    def test_fit_writes_json_to_out(self, tmp_path: Path) -> None:
        # Arrange
        out = tmp_path / "fit.json"

        # Act
        code = cli.run(["fit", "--in", SAMPLE_CURVE, "--interval", "0.05", "0.45", "--out", str(out)])

        # Assert
        payload = json.loads(out.read_text())
        assert code == 0
        assert payload["command"] == "fit"
        assert payload["n_bins"] == 4
        assert payload["out"] == str(out)

    def test_fit_writes_a_chart(self, tmp_path: Path) -> None:
        # Arrange
        chart = tmp_path / "fit.svg"
        argv = ["fit", "--in", SAMPLE_CURVE, "--interval", "0.05", "0.45", "--plot", str(chart)]

        # Act
        code = cli.run(argv + ["--quiet"])

        # Assert
        assert code == 0
        assert "<svg" in chart.read_text()

    def test_seed_variable_overrides_flag(
        self, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture
    ) -> None:
        # Arrange
        monkeypatch.setenv(SEED_VARIABLE, "99")

        # Act
        code = cli.run(["absep", "--n-lambda=500", "--seed=1", "--quiet"])

        # Assert
        assert code == 0
        assert json.loads(capsys.readouterr().out)["seed"] == 99

    def test_unknown_ensemble_is_a_usage_error(self) -> None:
        # Act
        code = cli.run(["curve", "--ensemble=quaternion"])

        # Assert
        assert code == 2

    def test_invalid_count_is_a_configuration_error(self, capsys: pytest.CaptureFixture) -> None:
        # Act
        code = cli.run(["curve", "--bins=0"])

        # Assert
        assert code == 2
        assert "--bins must be positive" in capsys.readouterr().err

    def test_missing_curve_is_a_configuration_error(self) -> None:
        # Act
        code = cli.run(["jumps", "--in", "no_such_curve.csv"])

        # Assert
        assert code == 2

    def test_bures_with_uniform_proposal_is_a_numerical_error(self) -> None:
        # Act
        code = cli.run(["prob", "--metric=bures", "--proposal=uniform", "--n-lambda=100", "--quiet"])

        # Assert
        assert code == 3

    @patch.object(cli, "create_engine")
    def test_infeasible_slice_is_a_numerical_error(self, patch_create_engine: MagicMock) -> None:
        # Arrange
        patch_create_engine.return_value.dispersion.side_effect = InfeasibleSliceError(0.5, 10)

        # Act
        code = cli.run(["dispersion", "--c=0.5"])

        # Assert
        assert code == 3

    @patch.object(cli, "create_validator")
    def test_failed_validation(self, patch_create_validator: MagicMock) -> None:
        # Arrange
        patch_create_validator.return_value.run.return_value = [
            CheckResult("werner_boundary", True),
            CheckResult("haar_unitary", False),
        ]

        # Act
        code = cli.run(["validate"])

        # Assert
        assert code == 1

    @patch.object(cli, "create_validator")
    def test_passed_validation(self, patch_create_validator: MagicMock) -> None:
        # Arrange
        patch_create_validator.return_value.run.return_value = [CheckResult("werner_boundary", True)]

        # Act
        code = cli.run(["validate"])

        # Assert
        assert code == 0


class TestMain:
    @patch.object(cli, "run")
    def test_main_exits_with_the_run_code(self, patch_run: MagicMock) -> None:
        # Arrange
        patch_run.return_value = 3

        # Act + Assert
        with patch.object(cli.sys, "argv", ["sepscan", "validate"]):
            with pytest.raises(SystemExit) as exc_info:
                cli.main()
        assert exc_info.value.code == 3
        patch_run.assert_called_once_with(["validate"])
