import math

import numpy as np
import pytest

from sepscan.exceptions import InvalidInputError
from sepscan.jumps import Jump, JumpReport, _runs, detect_jumps

from .fake_curves import load_binomial_curve, load_step_curve, load_test_curve


def small_step(c: np.ndarray) -> np.ndarray:
    return np.where(c < 0.5, 0.95, 0.89)


class TestDetectJumps:
    def test_flags_the_halving_at_one_half(self) -> None:
        # Arrange
        curve = load_step_curve()

        # Act
        report = detect_jumps(curve)

        # Assert
        assert len(report) == 1
        jump = report.jumps[0]
        assert jump.c_location == pytest.approx(0.5)
        assert jump.robust_z < -6.0
        assert jump.relative_drop == pytest.approx(0.5, abs=0.05)

    def test_near_finds_the_jump_within_one_bin(self) -> None:
        # Arrange
        curve = load_step_curve(bin_count=200)

        # Act
        jump = detect_jumps(curve).near(0.5, curve.width)

        # Assert
        assert jump is not None
        assert jump.magnitude > 0.8

    def test_smooth_noisy_curve_reports_nothing(self) -> None:
        # Arrange
        curve = load_test_curve(lambda c: 0.9 - 0.6 * c, noise=0.002)

        # Act
        report = detect_jumps(curve)

        # Assert
        assert len(report) == 0
        assert report.near(0.5, 0.1) is None

    def test_flat_curve_reports_nothing(self) -> None:
        # Arrange
        curve = load_test_curve(lambda c: np.full_like(c, 0.4))

        # Act
        report = detect_jumps(curve)

        # Assert
        assert report.jumps == ()

    def test_zero_mad_falls_back_to_standard_deviation(self) -> None:
        # Arrange
        curve = load_test_curve(lambda c: np.where(c < 0.5, 0.6, 0.3))

        # Act
        report = detect_jumps(curve)

        # Assert
        assert [jump.c_location for jump in report] == pytest.approx([0.5])

    def test_threshold_is_reported(self) -> None:
        # Arrange
        curve = load_step_curve()

        # Act
        report = detect_jumps(curve, z_threshold=8.0)

        # Assert
        assert report.to_dict()["threshold"] == 8.0
        assert report.to_dict()["c_locations"] == pytest.approx([0.5])

    def test_standardised_mode_ignores_heteroscedastic_noise(self) -> None:
        # Arrange
        curve = load_binomial_curve(lambda c: 0.5 * np.exp(-10.0 * c))

        # Act
        raw = detect_jumps(curve)
        standardised = detect_jumps(curve, standardised=True)

        # Assert
        assert len(raw) > 0
        assert len(standardised) == 0
        assert standardised.to_dict()["standardised"] is True

    def test_standardised_mode_keeps_a_real_step(self) -> None:
        # Arrange
        curve = load_binomial_curve(small_step)

        # Act
        report = detect_jumps(curve, standardised=True)

        # Assert
        assert report.near(0.5, curve.width) is not None

    def test_raises_for_short_curves(self) -> None:
        # Arrange
        curve = load_test_curve(lambda c: 1.0 - c, bin_count=40)

        # Act + Assert
        with pytest.raises(InvalidInputError):
            detect_jumps(curve)


class TestJump:
    def test_magnitude_and_relative_drop(self) -> None:
        # Arrange
        sut = Jump(0.5, -20.0, 0.6, 0.3)

        # Assert
        assert sut.magnitude == pytest.approx(1.0)
        assert sut.relative_drop == pytest.approx(0.5)

    def test_magnitude_of_a_drop_to_zero_is_infinite(self) -> None:
        # Arrange
        sut = Jump(0.5, -20.0, 0.6, 0.0)

        # Assert
        assert sut.magnitude == math.inf

    def test_rising_jump_has_a_negative_drop(self) -> None:
        # Arrange
        sut = Jump(0.5, 7.0, 0.2, 0.4)

        # Assert
        assert sut.magnitude == pytest.approx(1.0)
        assert sut.relative_drop == pytest.approx(-1.0)


class TestJumpReport:
    def test_near_picks_the_strongest(self) -> None:
        # Arrange
        sut = JumpReport((Jump(0.49, 7.0, 0.5, 0.4), Jump(0.51, -12.0, 0.5, 0.3)), 6.0)

        # Act
        jump = sut.near(0.5, 0.02)

        # Assert
        assert jump is not None
        assert jump.c_location == 0.51

    def test_to_dict_is_flat(self) -> None:
        # Arrange
        sut = JumpReport((Jump(0.3, 7.0, 0.2, 0.4), Jump(0.5, -20.0, 0.6, 0.0)), 6.0, standardised=True)

        # Act
        values = sut.to_dict()

        # Assert
        lists = [value for value in values.values() if isinstance(value, list)]
        assert all(not isinstance(value, (dict, tuple)) for value in values.values())
        assert all(isinstance(item, float) for value in lists for item in value)
        assert values["n_jumps"] == 2
        assert values["c_locations"] == [0.3, 0.5]
        assert values["magnitudes"] == [pytest.approx(1.0), math.inf]
        assert values["relative_drops"] == [pytest.approx(-1.0), pytest.approx(1.0)]
        assert values["standardised"] is True


class TestRuns:
    def test_runs(self) -> None:
        # Arrange
        mask = np.array([True, True, False, False, True, False, True])

        # Act + Assert
        assert _runs(mask) == [(0, 2), (4, 5), (6, 7)]

    def test_no_runs(self) -> None:
        # Act + Assert
        assert _runs(np.zeros(4, dtype=bool)) == []


class TestCalibration:
    def test_constant_curve_is_quiet_in_most_replicates(self) -> None:
        # Arrange
        curves = [load_binomial_curve(lambda c: np.full_like(c, 0.5), seed=seed) for seed in range(100)]

        # Act
        quiet = sum(len(detect_jumps(curve)) == 0 for curve in curves)

        # Assert
        assert quiet >= 95

    def test_small_step_is_found_within_one_bin_in_every_replicate(self) -> None:
        # Arrange
        curves = [load_binomial_curve(small_step, seed=seed) for seed in range(100)]

        # Act
        found = sum(detect_jumps(curve).near(0.5, curve.width) is not None for curve in curves)

        # Assert
        assert found == 100
