"""
Application configuration using Pydantic Settings plus the declarative
pipeline configuration file
"""

import hashlib
import json
from datetime import date
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Any, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from carbon_hedge.core.errors import ConfigError
from carbon_hedge.models.embedding import WeightTransform
from carbon_hedge.models.factor import FactorDirection, FactorSource
from carbon_hedge.models.graph import GainTransform
from carbon_hedge.models.regression import ModelName


class Settings(BaseSettings):
    """Process-level settings"""

    model_config = SettingsConfigDict(
        env_file=[
            ".env",  # Current directory
            str(Path(__file__).parent.parent.parent / ".env"),  # Project root
        ],
        env_file_encoding="utf-8",
        case_sensitive=True,
        env_ignore_empty=True,
        extra="ignore",
    )

    # Project Info
    PROJECT_NAME: str = "Carbon Hedge Network"
    VERSION: str = "0.1.0"

    # Logging
    LOG_LEVEL: str = Field(default="INFO", description="Root log level")
    LOG_FORMAT: str = Field(
        default="%(asctime)s %(levelname)s %(name)s: %(message)s",
        description="logging format string",
    )

    # Execution defaults
    DEFAULT_THREADS: int = Field(default=1, ge=1, description="Worker threads")
    DEFAULT_OUTPUT_DIR: str = Field(default="runs", description="Output directory")

    # Environment
    ENVIRONMENT: str = Field(default="development", description="Environment name")


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()


class FactorScale(str, Enum):
    """Units of the factor file"""
    DECIMAL = "decimal"
    PERCENT = "percent"


class Rebalance(str, Enum):
    """Factor membership schedule"""
    NONE = "none"
    YEARLY = "yearly"


class GraphMode(str, Enum):
    """One graph per factor, or all factor nodes in a single graph"""
    PER_FACTOR = "per_factor"
    JOINT = "joint"


class ExcessReturns(str, Enum):
    """Dependent-variable convention for regressions"""
    AUTO = "auto"
    ALWAYS = "always"
    NEVER = "never"


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class DataConfig(_Section):
    """Input files"""
    prices: Optional[Path] = Field(None, description="Price panel file")
    factors: Optional[Path] = Field(None, description="Factor panel file")
    scores: Optional[Path] = Field(None, description="Score table file")
    granular_scores: Optional[Path] = Field(None, description="Ticker x indicator file")
    granular_mapping: Optional[Path] = Field(None, description="indicator_label,class file")
    factor_scale: FactorScale = Field(default=FactorScale.DECIMAL)
    score_as_of: Optional[date] = Field(None, description="Score snapshot selector")

    @model_validator(mode="after")
    def _granular_pair(self) -> "DataConfig":
        if (self.granular_scores is None) != (self.granular_mapping is None):
            raise ValueError("granular_scores and granular_mapping go together")
        return self


class WindowConfig(_Section):
    """Sample window"""
    start: date = Field(default=date(2015, 1, 1))
    end: date = Field(default=date(2020, 12, 31))

    @model_validator(mode="after")
    def _ordered(self) -> "WindowConfig":
        if not self.start < self.end:
            raise ValueError(f"window start {self.start} must precede end {self.end}")
        return self


class FactorConfig(_Section):
    """One sustainability factor to build"""
    name: str = Field(..., min_length=1, pattern=r"^[A-Za-z0-9_]+$")
    source: FactorSource
    direction: FactorDirection = Field(default=FactorDirection.HIGH_MINUS_LOW)
    quantile: float = Field(default=0.30, gt=0, lt=0.5)


def _default_factors() -> list[FactorConfig]:
    return [
        FactorConfig(name="CO2", source=FactorSource.EMISSION),
        FactorConfig(name="ESG", source=FactorSource.ESG),
        FactorConfig(name="ESGP", source=FactorSource.ESG_PROMISED),
        FactorConfig(name="ESGR", source=FactorSource.ESG_REALIZED),
    ]


class GraphConfig(_Section):
    """Correlation graph and TMFG"""
    gain: GainTransform = Field(default=GainTransform.SQUARE)
    residualize_factors: bool = Field(default=False)
    mode: GraphMode = Field(default=GraphMode.PER_FACTOR)


class WalksConfig(_Section):
    """node2vec walk hyperparameters (seed derived from the master seed)"""
    p: float = Field(default=1.0, gt=0)
    q: float = Field(default=1.0, gt=0)
    num_walks: int = Field(default=20, ge=1)
    walk_length: int = Field(default=80, ge=2)
    weight_transform: WeightTransform = Field(default=WeightTransform.CLIP)


class TrainingSection(_Section):
    """Skip-gram hyperparameters (seed derived from the master seed)"""
    dim: int = Field(default=2, ge=2)
    window: int = Field(default=10, ge=1)
    negatives: int = Field(default=5, ge=0)
    epochs: int = Field(default=5, ge=1)
    batch_pairs: int = Field(default=128, ge=1)
    learning_rate: float = Field(default=0.025, gt=0)
    min_learning_rate: float = Field(default=0.0001, gt=0)


class PortfolioConfig(_Section):
    """Portfolio sizes"""
    k_close_far: int = Field(default=30, ge=1)
    k_longshort: int = Field(default=15, ge=1)
    n_random: int = Field(default=30, ge=1)
    arithmetic: bool = Field(default=False, description="Aggregate simple returns")


class EconometricsConfig(_Section):
    """Regression settings"""
    models: list[ModelName] = Field(
        default_factory=lambda: [ModelName.CAPM, ModelName.FF3, ModelName.FF5]
    )
    lag: Union[Literal["auto"], int] = Field(default="auto")
    excess_returns: ExcessReturns = Field(default=ExcessReturns.AUTO)

    @model_validator(mode="after")
    def _check_lag(self) -> "EconometricsConfig":
        if isinstance(self.lag, int) and self.lag < 0:
            raise ValueError("lag must be non-negative")
        return self


class MetricsConfig(_Section):
    """Performance metric settings"""
    annualize: bool = Field(default=True)
    periods_per_year: int = Field(default=252, ge=1)
    omega_threshold: float = Field(default=0.0)


class PipelineConfig(_Section):
    """Complete declarative run configuration"""
    data: DataConfig = Field(default_factory=DataConfig)
    window: WindowConfig = Field(default_factory=WindowConfig)
    factors: list[FactorConfig] = Field(default_factory=_default_factors, min_length=1)
    rebalance: Rebalance = Field(default=Rebalance.NONE)
    graph: GraphConfig = Field(default_factory=GraphConfig)
    walks: WalksConfig = Field(default_factory=WalksConfig)
    training: TrainingSection = Field(default_factory=TrainingSection)
    portfolios: PortfolioConfig = Field(default_factory=PortfolioConfig)
    econometrics: EconometricsConfig = Field(default_factory=EconometricsConfig)
    metrics: MetricsConfig = Field(default_factory=MetricsConfig)
    seed: int = Field(default=42, ge=0, description="Master seed")
    threads: int = Field(default=1, ge=1, description="1 forces the deterministic path")
    output_dir: Path = Field(default=Path("runs/latest"))
    plots: bool = Field(default=True)

    @model_validator(mode="after")
    def _unique_factors(self) -> "PipelineConfig":
        names = [f.name for f in self.factors]
        if len(set(names)) != len(names):
            raise ValueError("factor names must be unique")
        return self

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def load_pipeline_config(path: Optional[Path] = None, **overrides: Any) -> PipelineConfig:
    """Load a YAML config (or a run manifest) and apply dotted-key overrides"""
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                raw = yaml.safe_load(handle) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"cannot read config {path}: {e}")
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must be a mapping")
        # A manifest embeds the config it was produced from
        if "config" in raw and "artifacts" in raw:
            raw = raw["config"]
        raw = _resolve_paths(raw, Path(path).parent)

    for dotted, value in overrides.items():
        if value is None:
            continue
        _set_dotted(raw, dotted, value)

    try:
        return PipelineConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}")


def _resolve_paths(raw: dict[str, Any], base: Path) -> dict[str, Any]:
    """Resolve relative data paths against the config file directory"""
    data = raw.get("data")
    if isinstance(data, dict):
        for key in ("prices", "factors", "scores", "granular_scores", "granular_mapping"):
            value = data.get(key)
            if value and not Path(value).is_absolute():
                data[key] = str((base / value).resolve())
    return raw


def _set_dotted(raw: dict[str, Any], dotted: str, value: Any) -> None:
    node = raw
    parts = dotted.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = value
