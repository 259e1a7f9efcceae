"""
Settings
Environment defaults (.env) and the flat KEY=value pipeline configuration file
"""

import os
from pathlib import Path
from typing import Dict, Literal, Mapping, Optional, Union

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from config.presets import (
    HORIZON_ENSEMBLES,
    KIND_DISPLAY,
    learner_from_preset_name,
    learner_preset,
    pipeline_preset,
)
from models.data_models import TimeSliceConfig
from models.errors import ConfigurationError
from models.learner_specs import (
    COMPONENTS,
    LEVEL,
    EnsembleAssignment,
    LearnerKind,
    LearnerSpec,
    PipelineVariant,
    parse_learner_spec,
)

load_dotenv()

DEFAULT_DATA_FILE = "amazon_fire_spots.csv"

# File keys that map one-to-one onto RunConfig fields
SCALAR_KEYS = (
    "DATA_PATH", "LAG", "SPLIT_RATIO", "PCA_THRESHOLD", "HORIZON", "PRESET", "OUTPUT_DIR",
    "SEED", "JOBS", "SELECTION", "SLICE_INITIAL_WINDOW", "SLICE_STEP", "SLICE_GROWING",
    "SEASONAL_SPAN", "DROP_REMAINDER", "TRAIN_ONLY_DECOMPOSITION", "HARVEY_CORRECTION",
)
# Prefixes of per-component learner keys: <PREFIX>_KIND, <PREFIX>_PRESET, <PREFIX>_<PARAM>
LEARNER_PREFIXES = {"SEASONAL": "seasonal", "TREND": "trend", "REMAINDER": "remainder", "LEARNER": LEVEL}


def data_dir() -> Path:
    return Path(os.getenv("FIRE_FORECAST_DATA_DIR", "data"))


def log_dir(default: Path) -> Path:
    return Path(os.getenv("FIRE_FORECAST_LOG_DIR", str(default)))


def log_level() -> str:
    return os.getenv("FIRE_FORECAST_LOG_LEVEL", "INFO").upper()


def default_jobs() -> int:
    try:
        return int(os.getenv("FIRE_FORECAST_JOBS", "-1"))
    except ValueError as e:
        raise ConfigurationError(f"FIRE_FORECAST_JOBS must be an integer: {e}") from e


class RunConfig(BaseModel):
    """One CLI run; defaults reproduce the lag-10, 70/30, 95%-variance pipeline"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    data_path: Path = Path(DEFAULT_DATA_FILE)
    lag: int = Field(10, ge=1)
    split_ratio: float = Field(0.70, gt=0, le=1)
    pca_threshold: float = Field(0.95, gt=0, le=1)
    horizon: int = Field(1, ge=1, le=2)
    preset: Optional[str] = None
    output_dir: Path = Path("output")
    seed: int = 0
    jobs: int = Field(default_factory=default_jobs)
    selection: Literal["validation", "test"] = "validation"
    slice_initial_window: int = Field(120, ge=1)
    slice_step: int = Field(1, ge=1)
    slice_growing: bool = True
    seasonal_span: Optional[int] = Field(None, ge=3)
    drop_remainder: bool = False
    train_only_decomposition: bool = False
    harvey_correction: bool = False
    learners: Dict[str, Dict[str, str]] = Field(default_factory=dict)

    def resolved_data_path(self) -> Path:
        """Relative paths missing from the working directory fall back to FIRE_FORECAST_DATA_DIR"""
        if self.data_path.is_absolute() or self.data_path.exists():
            return self.data_path
        return data_dir() / self.data_path

    def slice_config(self, horizon: Optional[int] = None) -> TimeSliceConfig:
        return TimeSliceConfig(
            initial_window=self.slice_initial_window,
            horizon=horizon or self.horizon,
            growing=self.slice_growing,
            step=self.slice_step,
        )

    @property
    def follows_horizon(self) -> bool:
        """No preset and no explicit learners: each horizon gets its own ensemble"""
        return self.preset is None and not self.learners

    def variant_fields(self) -> Dict[str, object]:
        return {
            "lag": self.lag,
            "pca_threshold": self.pca_threshold,
            "seasonal_span": self.seasonal_span,
            "drop_remainder": self.drop_remainder,
            "train_only_decomposition": self.train_only_decomposition,
        }

    def learner_for(self, component: str) -> LearnerSpec:
        """
        <COMPONENT>_KIND alone loads that component's preset; a preset name
        and/or explicit hyperparameters refine it
        """
        entry = dict(self.learners[component])
        kind = entry.pop("kind", None)
        if kind is None:
            raise ConfigurationError(f"learner for '{component}' needs a KIND")
        preset = entry.pop("preset", None)
        if preset:
            return learner_from_preset_name(kind, preset, **entry)
        if not entry:
            return learner_preset(kind, component)
        return parse_learner_spec({"kind": kind, **entry})

    def pipeline_variant(self, horizon: Optional[int] = None) -> PipelineVariant:
        """Explicit learners win over PRESET; without either, the ensemble of the horizon"""
        horizon = horizon or self.horizon
        fields = self.variant_fields()
        try:
            if LEVEL in self.learners:
                learner = self.learner_for(LEVEL)
                name = KIND_DISPLAY[learner.kind][1]
                return PipelineVariant(name=name, mode="nondecomposed", learner=learner, **fields)
            configured = [c for c in COMPONENTS if c in self.learners]
            if configured:
                missing = [c for c in COMPONENTS if c not in self.learners]
                if missing:
                    raise ConfigurationError(f"ensemble learners missing for {missing}")
                assignment = EnsembleAssignment(
                    **{c: self.learner_for(c) for c in COMPONENTS}, horizon=horizon
                )
                return PipelineVariant(
                    name=f"STL-{assignment.label()}", assignment=assignment, **fields
                )
            return pipeline_preset(self.preset or HORIZON_ENSEMBLES[horizon][0], **fields)
        except ValidationError as e:
            raise ConfigurationError(f"invalid pipeline configuration: {e}") from e


def _split_learner_key(key: str):
    for prefix, component in LEARNER_PREFIXES.items():
        if key.startswith(prefix + "_"):
            return component, key[len(prefix) + 1:].lower()
    return None, None


def parse_config_values(values: Mapping[str, Optional[str]]) -> Dict[str, object]:
    """Maps raw KEY=value pairs onto RunConfig fields"""
    fields: Dict[str, object] = {}
    learners: Dict[str, Dict[str, str]] = {}
    for raw_key, raw_value in values.items():
        key = raw_key.strip().upper()
        value = (raw_value or "").strip()
        if key in SCALAR_KEYS:
            if value == "":
                continue
            fields[key.lower()] = value
            continue
        component, param = _split_learner_key(key)
        if component is None or not param:
            raise ConfigurationError(f"unknown configuration key '{raw_key}'")
        if param == "kind":
            LearnerKind(value.upper().replace("-", "").replace("_", ""))
        learners.setdefault(component, {})[param] = value
    if learners:
        fields["learners"] = learners
    return fields


def load_run_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, object]] = None,
) -> RunConfig:
    """
    Reads the pipeline file (if any) and applies CLI overrides; overrides win

    Raises:
        ConfigurationError: missing file, unknown key or invalid value
    """
    fields: Dict[str, object] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigurationError(f"configuration file not found: {path}")
        try:
            fields.update(parse_config_values(dotenv_values(path)))
        except ValueError as e:
            raise ConfigurationError(f"{path}: {e}") from e
    for key, value in (overrides or {}).items():
        if value is not None:
            fields[key] = value
    try:
        return RunConfig(**fields)
    except ValidationError as e:
        raise ConfigurationError(f"invalid configuration: {e}") from e
