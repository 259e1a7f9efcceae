"""
Learner and pipeline specifications
Declarative, validated, immutable configuration objects (pydantic)
"""

from enum import Enum
from typing import Annotated, Dict, Literal, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from models.data_models import StlConfig
from models.errors import ConfigurationError

COMPONENTS = ("seasonal", "trend", "remainder")
LEVEL = "level"  # the single "component" of a nondecomposed pipeline


class LearnerKind(str, Enum):
    """Learner kinds; declaration order is the grid-search tie-break order"""
    KNN = "KNN"
    MARS = "MARS"
    SVR = "SVR"
    GLMBOOST = "GLMBOOST"
    CUBIST = "CUBIST"
    MLP = "MLP"

    @property
    def order(self) -> int:
        return list(LearnerKind).index(self)


class _SpecBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def learner_kind(self) -> LearnerKind:
        return LearnerKind(self.kind)

    def hyperparameters(self) -> Dict[str, object]:
        return self.model_dump(exclude={"kind"})

    def label(self) -> str:
        params = ", ".join(f"{key}={value}" for key, value in self.hyperparameters().items())
        return f"{self.kind}({params})"


class KnnSpec(_SpecBase):
    kind: Literal["KNN"] = "KNN"
    k: int = Field(5, ge=1)


class MarsSpec(_SpecBase):
    kind: Literal["MARS"] = "MARS"
    max_terms: int = Field(9, ge=1)
    degree: int = Field(1, ge=1, le=2)
    penalty: float = Field(3.0, ge=0)  # GCV cost per knot


class SvrSpec(_SpecBase):
    kind: Literal["SVR"] = "SVR"
    sigma: float = Field(0.1, gt=0)
    cost: float = Field(1.0, gt=0)
    epsilon: float = Field(0.1, ge=0)  # on standardized targets
    max_iter: int = Field(100_000, ge=1)


class GlmBoostSpec(_SpecBase):
    kind: Literal["GLMBOOST"] = "GLMBOOST"
    iterations: int = Field(100, ge=1)
    step_length: float = Field(0.1, gt=0, le=1)


class CubistSpec(_SpecBase):
    kind: Literal["CUBIST"] = "CUBIST"
    committees: int = Field(1, ge=1)
    instances: int = Field(0, ge=0)


class MlpSpec(_SpecBase):
    kind: Literal["MLP"] = "MLP"
    hidden_units: int = Field(5, ge=1)
    epochs: int = Field(2000, ge=1)
    learning_rate: float = Field(0.01, gt=0)
    seed: int = 0


LearnerSpec = Annotated[
    Union[KnnSpec, MarsSpec, SvrSpec, GlmBoostSpec, CubistSpec, MlpSpec],
    Field(discriminator="kind"),
]
_LEARNER_SPEC_ADAPTER = TypeAdapter(LearnerSpec)


def parse_learner_spec(data: Mapping[str, object]) -> LearnerSpec:
    """
    Builds a LearnerSpec from a plain mapping (config file, CLI)

    Args:
        data: mapping with a 'kind' key plus kind-specific hyperparameters

    Raises:
        ConfigurationError: unknown kind or invalid hyperparameter
    """
    payload = {str(key).lower(): value for key, value in data.items()}
    if "kind" not in payload:
        raise ConfigurationError("learner specification needs a 'kind'")
    payload["kind"] = str(payload["kind"]).upper().replace("-", "").replace("_", "")
    try:
        return _LEARNER_SPEC_ADAPTER.validate_python(payload)
    except ValidationError as e:
        raise ConfigurationError(f"invalid learner specification {dict(data)}: {e}") from e


class EnsembleAssignment(BaseModel):
    """Learner per STL component"""
    model_config = ConfigDict(frozen=True)

    seasonal: LearnerSpec
    trend: LearnerSpec
    remainder: LearnerSpec
    horizon: Literal[1, 2] = 1

    def specs(self) -> Dict[str, LearnerSpec]:
        return {component: getattr(self, component) for component in COMPONENTS}

    def kinds(self) -> Tuple[LearnerKind, ...]:
        return tuple(spec.learner_kind for spec in self.specs().values())

    def label(self) -> str:
        return "/".join(kind.value for kind in self.kinds())


class PipelineVariant(BaseModel):
    """
    One forecasting pipeline: decomposed (learner per STL component)
    or nondecomposed (single learner on the raw series)
    """
    model_config = ConfigDict(frozen=True)

    name: str = "pipeline"
    mode: Literal["decomposed", "nondecomposed"] = "decomposed"
    assignment: Optional[EnsembleAssignment] = None
    learner: Optional[LearnerSpec] = None
    lag: int = Field(10, ge=1)
    pca_threshold: float = Field(0.95, gt=0, le=1)
    seasonal_span: Optional[int] = Field(None, ge=3)
    inner_iterations: int = Field(2, ge=0)
    outer_iterations: int = Field(1, ge=0)
    drop_remainder: bool = False
    train_only_decomposition: bool = False

    @model_validator(mode="after")
    def _check_mode(self) -> "PipelineVariant":
        if self.mode == "decomposed" and self.assignment is None:
            raise ValueError("decomposed pipeline needs an assignment")
        if self.mode == "nondecomposed" and self.learner is None:
            raise ValueError("nondecomposed pipeline needs a learner")
        if self.seasonal_span is not None and self.seasonal_span % 2 == 0:
            raise ValueError(f"seasonal_span must be odd, got {self.seasonal_span}")
        return self

    @property
    def is_decomposed(self) -> bool:
        return self.mode == "decomposed"

    def component_specs(self) -> Dict[str, LearnerSpec]:
        """Learner per modelled component, in summation order"""
        if not self.is_decomposed:
            return {LEVEL: self.learner}
        specs = self.assignment.specs()
        if self.drop_remainder:
            specs.pop("remainder")
        return specs

    def stl_config(self, period: int = 12) -> StlConfig:
        return StlConfig.for_period(
            period,
            seasonal_span=self.seasonal_span,
            inner_iterations=self.inner_iterations,
            outer_iterations=self.outer_iterations,
        )
