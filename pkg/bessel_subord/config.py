from pathlib import Path
from typing import Literal

from loguru import logger
from pydantic import BaseModel, Field, model_validator
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    TomlConfigSettingsSource,
)

from bessel_subord.series.models import DiskGrid


class SeriesSettings(BaseModel):
    truncation_order: int = Field(default=64, ge=2, description="Truncation degree N")


class GridSettings(BaseModel):
    radii: list[float] = Field(default_factory=lambda: [0.5, 0.9, 0.99, 0.999])
    angular_samples: int = Field(default=4096, ge=256)
    refine: bool = False

    def to_disk_grid(self) -> DiskGrid:
        return DiskGrid(
            radii=tuple(self.radii), angular_samples=self.angular_samples, refine=self.refine
        )


class ToleranceSettings(BaseModel):
    # identity checks, max relative residual
    ode: float = 1e-11
    recursion: float = 1e-11
    closed_form: float = 1e-10
    hypergeometric: float = 1e-13
    ratio: float = 1e-8
    # implication checks
    implication: float = 1e-9
    implication_floor: float = 1e-15
    premise_margin: float = 1e-6
    denominator_guard: float = 1e-6
    max_skip_fraction: float = 0.05
    boundary: float = 1e-12


class SweepSettings(BaseModel):
    # 5 x 5 x 5 box with Re(kappa) = p + (b+1)/2 in [0.5, 4.5]
    p_values: list[float] = Field(default_factory=lambda: [0.0, 0.5, 1.0, 1.5, 2.0])
    b_values: list[float] = Field(default_factory=lambda: [0.0, 1.0, 2.0, 3.0, 4.0])
    c_values: list[complex] = Field(default_factory=lambda: [-2.0, -1.0, 0.5, 1.0, 2.0])
    kappa_values: list[complex] = Field(default_factory=lambda: [0.5, 1.0, 1.5, 2.5, 4.0])
    chain_c_values: list[complex] = Field(default_factory=lambda: [-2.0, -1.0, 0.0, 1.0, 2.0])
    random_family_size: int = Field(default=5, ge=0)
    random_family_version: str = "v1"


class AuditSettings(BaseModel):
    M: float = Field(default=1.0, gt=0)
    kappa: complex = 2.0
    theta_samples: int = Field(default=64, ge=1)
    k_grid: list[float] = Field(default_factory=lambda: [1.0, 1.25, 1.5, 2.0, 4.0, 10.0])
    l_offsets: list[float] = Field(default_factory=lambda: [0.0, 1.0, 10.0])


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=str(Path(__file__).resolve().parent.parent / ".env"),
        env_file_encoding="utf-8",
        env_prefix="BESSEL_SUBORD_",
        case_sensitive=False,
        # BESSEL_SUBORD_GRID__ANGULAR_SAMPLES=8192 reaches nested groups
        env_nested_delimiter="__",
        extra="ignore",
    )

    log_level: str = "WARNING"
    seed: int = 20240611
    output_format: Literal["table", "json-lines", "csv"] = "table"
    threads: int = Field(default=1, ge=1)

    # Nested Groups
    series: SeriesSettings = Field(default_factory=SeriesSettings)
    grid: GridSettings = Field(default_factory=GridSettings)
    tolerances: ToleranceSettings = Field(default_factory=ToleranceSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    audit: AuditSettings = Field(default_factory=AuditSettings)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # CLI flags > TOML file > environment > .env > defaults
        return (
            init_settings,
            TomlConfigSettingsSource(settings_cls),
            env_settings,
            dotenv_settings,
        )

    @model_validator(mode="after")
    def tolerances_must_be_positive(self) -> "Settings":
        for name, value in self.tolerances.model_dump().items():
            if value <= 0:
                raise ValueError(f"Tolerance '{name}' must be positive, got {value}")
        if self.tolerances.max_skip_fraction >= 1:
            raise ValueError("max_skip_fraction must be below 1")
        return self

    @classmethod
    def load(cls, config_file: Path | None = None, **overrides) -> "Settings":
        """Build settings, layering an optional TOML file under the explicit overrides."""
        if config_file is None:
            return cls(**overrides)
        if not Path(config_file).is_file():
            raise FileNotFoundError(f"Config file not found: {config_file}")

        class FileSettings(cls):
            model_config = SettingsConfigDict(toml_file=str(config_file))

        return FileSettings(**overrides)

    def log_summary(self) -> None:
        """Log the effective configuration."""
        logger.info("--- Config summary ---")
        logger.info(f"seed={self.seed} threads={self.threads}")
        logger.info(f"format={self.output_format} N={self.series.truncation_order}")
        logger.info(f"grid radii={self.grid.radii} angles={self.grid.angular_samples} refine={self.grid.refine}")
        logger.info(f"tolerances={self.tolerances.model_dump()}")
        logger.info(
            f"sweep box |p|={len(self.sweep.p_values)} |b|={len(self.sweep.b_values)} "
            f"|c|={len(self.sweep.c_values)} family={self.sweep.random_family_size}"
            f"@{self.sweep.random_family_version}"
        )
        logger.info(f"audit M={self.audit.M} kappa={self.audit.kappa}")
