import json
import math
import os
from pathlib import Path
from unittest.mock import MagicMock, patch

import pytest

from sepscan import engine
from sepscan.config import RunConfig
from sepscan.curves import SeparabilityCurve
from sepscan.engine import Engine, svg_path, to_json
from sepscan.enums import Ensemble, Metric
from sepscan.exceptions import ConfigurationError, CurveFormatError
from sepscan.measures import Estimate, MeasureSpec
from sepscan.views import NullCurveReporter, NullEstimateReporter

from .fake_curves import load_step_curve, load_test_curve

SAMPLE_CURVE = str(Path(os.path.dirname(__file__)) / "sample_curve.csv")


def create_test_engine(**kwargs) -> Engine:
    return Engine(RunConfig(**kwargs), NullCurveReporter(), NullEstimateReporter())


class TestEngine:
    def test_spec_follows_ensemble(self) -> None:
        # Arrange
        sut = create_test_engine(command="prob", ensemble=Ensemble.REAL, metric=Metric.BURES)

        # Act + Assert
        assert sut.spec == MeasureSpec(Metric.BURES, beta=1)

    def test_curve_writes_csv_and_svg(self, tmp_path: Path) -> None:
        # Arrange
        out = tmp_path / "real.csv"
        sut = create_test_engine(
            command="curve",
            ensemble=Ensemble.REAL,
            bins=6,
            spectra_per_bin=2,
            group_samples=5,
            out=str(out),
        )

        # Act
        curve = sut.curve()

        # Assert
        assert SeparabilityCurve.read_csv(str(out)).bins == curve.bins
        assert (tmp_path / "real.svg").exists()

    @patch.object(engine, "separability_probability")
    def test_probability_payload(self, patch_probability: MagicMock) -> None:
        # Arrange
        patch_probability.return_value = Estimate(0.25, 0.01)
        sut = create_test_engine(command="prob", n_lambda=1_000, group_samples=10, seed=3)

        # Act
        payload = sut.probability()

        # Assert
        assert payload["command"] == "prob"
        assert payload["seed"] == 3
        assert payload["estimate"] == 0.25
        assert payload["stderr"] == 0.01
        assert payload["target"] == pytest.approx(8 / 33)
        assert payload["deviation"] == pytest.approx(0.25 - 8 / 33)
        args = patch_probability.call_args
        assert args.args[:5] == (MeasureSpec(Metric.HS, beta=2), Ensemble.COMPLEX, 1_000, 10, 3)

    def test_curve_probability_uses_the_curve_ensemble(self) -> None:
        # Arrange
        sut = create_test_engine(command="curveprob", input=SAMPLE_CURVE, n_lambda=2_000)

        # Act
        payload = sut.curve_probability()

        # Assert
        assert 0.0 < payload["estimate"] < 1.0
        assert payload["target"] == pytest.approx(8 / 17)

    def test_absolute_probability_without_target(self) -> None:
        # Arrange
        sut = create_test_engine(
            command="absep", ensemble=Ensemble.REAL, metric=Metric.BURES, n_lambda=2_000
        )

        # Act
        payload = sut.absolute_probability()

        # Assert
        assert payload["target"] is None
        assert payload["deviation"] is None
        assert payload["metric"] == "bures"

    def test_jumps(self, tmp_path: Path) -> None:
        # Arrange
        path = tmp_path / "step.csv"
        load_step_curve().to_csv(str(path))
        sut = create_test_engine(command="jumps", input=str(path))

        # Act
        payload = sut.jumps()

        # Assert
        assert payload["threshold"] == 6.0
        assert payload["c_locations"] == pytest.approx([0.5])
        assert payload["standardised"] is False

    @patch.object(engine, "detect_jumps")
    def test_jumps_passes_the_standardised_mode(self, patch_detect_jumps: MagicMock) -> None:
        # Arrange
        patch_detect_jumps.return_value.to_dict.return_value = {"n_jumps": 0}
        sut = create_test_engine(command="jumps", input=SAMPLE_CURVE, standardised=True)

        # Act
        payload = sut.jumps()

        # Assert
        assert payload["n_jumps"] == 0
        assert patch_detect_jumps.call_args.kwargs == {"standardised": True}

    def test_fit(self, tmp_path: Path) -> None:
        # Arrange
        path = tmp_path / "line.csv"
        load_test_curve(lambda c: 1.2 - 2.7 * c, bin_count=500).to_csv(str(path))
        sut = create_test_engine(
            command="fit", input=str(path), interval=(0.204, 0.34), excluded=(0.294,)
        )

        # Act
        payload = sut.fit()

        # Assert
        assert payload["slope"] == pytest.approx(-2.7)
        assert payload["intercept"] == pytest.approx(1.2)
        assert payload["excluded"] == [0.294]
        assert payload["excluded_bins"] == pytest.approx([0.294])

    @patch.object(engine, "plot_curves")
    def test_fit_draws_the_line_over_the_window(self, patch_plot_curves: MagicMock) -> None:
        # Arrange
        sut = create_test_engine(
            command="fit", input=SAMPLE_CURVE, interval=(0.05, 0.45), plot_out="fit.svg"
        )

        # Act
        payload = sut.fit()

        # Assert
        (curves, path), kwargs = patch_plot_curves.call_args
        assert path == "fit.svg"
        assert len(curves) == 1
        assert kwargs["window"] == (0.05, 0.45)
        assert kwargs["fits"][0].slope == payload["slope"]

    def test_fit_requires_an_interval(self) -> None:
        # Arrange
        sut = create_test_engine(command="fit", input=SAMPLE_CURVE)

        # Act + Assert
        with pytest.raises(ConfigurationError):
            sut.fit()

    def test_crossings(self, tmp_path: Path) -> None:
        # Arrange
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        load_test_curve(lambda c: 1.0 - c, n_trials=1_000_000).to_csv(str(a))
        load_test_curve(lambda c: 0.91 - 0.5 * c, n_trials=1_000_000).to_csv(str(b))
        sut = create_test_engine(command="cross", input=str(a), overlay=str(b))

        # Act
        payload = sut.crossings()

        # Assert
        assert payload["crossings"] == pytest.approx([0.18], abs=1e-6)

    def test_crossings_require_an_overlay(self) -> None:
        # Arrange
        sut = create_test_engine(command="cross", input=SAMPLE_CURVE)

        # Act + Assert
        with pytest.raises(ConfigurationError):
            sut.crossings()

    @patch.object(engine, "ansatz_dispersion")
    def test_dispersion_requires_c(self, patch_dispersion: MagicMock) -> None:
        # Arrange
        sut = create_test_engine(command="dispersion")

        # Act + Assert
        with pytest.raises(ConfigurationError):
            sut.dispersion()
        patch_dispersion.assert_not_called()

    def test_dispersion(self) -> None:
        # Arrange
        sut = create_test_engine(command="dispersion", c=0.4, spectra_per_bin=30, group_samples=100)

        # Act
        payload = sut.dispersion()

        # Assert
        assert set(payload) >= {"mean", "between_variance", "binomial_variance", "excess_ratio"}
        assert payload["c"] == 0.4

    def test_plot(self, tmp_path: Path) -> None:
        # Arrange
        out = tmp_path / "plot.svg"
        sut = create_test_engine(
            command="plot", input=SAMPLE_CURVE, overlay=SAMPLE_CURVE, derivative=True, out=str(out)
        )

        # Act
        sut.plot()

        # Assert
        assert out.exists()

    @patch.object(engine, "plot_curves")
    def test_plot_passes_labels(self, patch_plot_curves: MagicMock) -> None:
        # Arrange
        sut = create_test_engine(
            command="plot", input=SAMPLE_CURVE, overlay=SAMPLE_CURVE, out="plot.svg", labels=("a", "b")
        )

        # Act
        sut.plot()

        # Assert
        assert patch_plot_curves.call_args.kwargs["labels"] == ("a", "b")
        assert patch_plot_curves.call_args.kwargs["offsets"] is None

    def test_plot_requires_out(self) -> None:
        # Arrange
        sut = create_test_engine(command="plot", input=SAMPLE_CURVE)

        # Act + Assert
        with pytest.raises(ConfigurationError):
            sut.plot()

    def test_missing_curve_file(self) -> None:
        # Arrange
        sut = create_test_engine(command="jumps", input="no_such_curve.csv")

        # Act + Assert
        with pytest.raises(CurveFormatError):
            sut.jumps()


class TestHelpers:
    def test_svg_path(self) -> None:
        # Assert
        assert svg_path("out/real.csv") == "out/real.svg"
        assert svg_path("curve") == "curve.svg"

    def test_to_json(self) -> None:
        # Act
        content = to_json({"estimate": 0.25, "target": None})

        # Assert
        assert json.loads(content) == {"estimate": 0.25, "target": None}

    def test_to_json_writes_non_finite_values_as_null(self) -> None:
        # Act
        content = to_json({"magnitudes": [1.0, math.inf], "relative_drop": math.nan, "z": -math.inf})

        # Assert
        assert "Infinity" not in content and "NaN" not in content
        assert json.loads(content) == {"magnitudes": [1.0, None], "relative_drop": None, "z": None}
