import pytest
from pydantic import ValidationError

from bessel_subord.cli.service import VerificationService
from bessel_subord.config import Settings


class TestSettings:
    def test_defaults(self):
        settings = Settings()
        assert settings.output_format == "table"
        assert settings.threads == 1
        assert settings.series.truncation_order == 64
        assert not settings.grid.refine

    @pytest.mark.parametrize("name", ["ode", "implication", "denominator_guard"])
    @pytest.mark.parametrize("value", [0.0, -1e-9])
    def test_tolerances_must_be_positive(self, name, value):
        with pytest.raises(ValidationError, match=name):
            Settings(tolerances={name: value})

    def test_skip_fraction_below_one(self):
        with pytest.raises(ValidationError, match="max_skip_fraction"):
            Settings(tolerances={"max_skip_fraction": 1.0})

    def test_threads_at_least_one(self):
        with pytest.raises(ValidationError):
            Settings(threads=0)

    def test_nested_environment(self, monkeypatch):
        monkeypatch.setenv("BESSEL_SUBORD_GRID__ANGULAR_SAMPLES", "8192")
        monkeypatch.setenv("BESSEL_SUBORD_GRID__REFINE", "true")
        settings = Settings()
        assert settings.grid.angular_samples == 8192
        assert settings.grid.refine

    def test_disk_grid_carries_refine(self):
        grid = Settings(grid={"radii": [0.5, 0.9], "angular_samples": 256, "refine": True}).grid.to_disk_grid()
        assert grid.radii == (0.5, 0.9)
        assert grid.angular_samples == 256
        assert grid.refine

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            Settings.load(tmp_path / "absent.toml")

    def test_load_layers_overrides_over_file(self, tmp_path):
        config = tmp_path / "bessel.toml"
        config.write_text("seed = 7\nthreads = 3\n")
        settings = Settings.load(config, seed=11)
        assert settings.seed == 11
        assert settings.threads == 3


class TestParameterBox:
    def test_default_box_is_full(self):
        box = VerificationService(Settings()).parameter_box()
        assert len(box) == 125
        assert min(par.kappa.real for par in box) == pytest.approx(0.5)
        assert max(par.kappa.real for par in box) == pytest.approx(4.5)

    def test_pole_points_are_reported(self, log_messages):
        settings = Settings(sweep={"p_values": [-0.5, 0.0, 0.5, 1.0, 1.5]})
        box = VerificationService(settings).parameter_box()
        # p = -1/2, b = 0 puts kappa at 0 for all five c values
        assert len(box) == 120
        assert len([m for m in log_messages if "parameter box drops p=-0.5 b=0.0" in m]) == 5

    def test_kappa_box_exclusions(self):
        service = VerificationService(Settings())
        assert len(service.kappa_box()) == 25
        assert len(service.kappa_box(exclude=(1.0, 2.0))) == 20
