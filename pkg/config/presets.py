"""
Presets Configuration
Centralized storage for learner hyperparameters, named pipelines and
published reference values of the Amazon fire-spot study
"""

from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

from models.errors import ConfigurationError
from models.learner_specs import (
    EnsembleAssignment,
    LearnerKind,
    LearnerSpec,
    PipelineVariant,
    parse_learner_spec,
)

# Component keys used in preset names: paper-<component> (tuned-<component> also accepted)
PRESET_COMPONENTS = ("seasonal", "trend", "remainder", "nondecomposed")
PRESET_PREFIXES = ("paper-", "tuned-")

# Control hyperparameters per learner and component
LEARNER_PRESETS: Dict[str, Dict[str, Dict[str, object]]] = {
    "KNN": {
        "seasonal": {"k": 9},
        "trend": {"k": 5},
        "remainder": {"k": 11},
        "nondecomposed": {"k": 7},
    },
    "MARS": {
        "seasonal": {"max_terms": 9, "degree": 1},
        "trend": {"max_terms": 3, "degree": 1},
        "remainder": {"max_terms": 9, "degree": 1},
        "nondecomposed": {"max_terms": 2, "degree": 1},
    },
    "SVR": {
        "seasonal": {"sigma": 0.0996, "cost": 4},
        "trend": {"sigma": 0.9212, "cost": 2},
        "remainder": {"sigma": 0.0881, "cost": 0.25},
        "nondecomposed": {"sigma": 0.2105, "cost": 2},
    },
    "GLMBOOST": {
        "seasonal": {"iterations": 250},
        "trend": {"iterations": 50},
        "remainder": {"iterations": 100},
        "nondecomposed": {"iterations": 250},
    },
    "CUBIST": {
        "seasonal": {"committees": 1, "instances": 5},
        "trend": {"committees": 1, "instances": 5},
        "remainder": {"committees": 1, "instances": 0},
        "nondecomposed": {"committees": 10, "instances": 0},
    },
    "MLP": {
        "seasonal": {"hidden_units": 9},
        "trend": {"hidden_units": 9},
        "remainder": {"hidden_units": 1},
        "nondecomposed": {"hidden_units": 1},
    },
}

# Display names used in reports
KIND_DISPLAY = {
    "KNN": ("STL-KNN", "k-NN"),
    "MARS": ("STL-MARS", "MARS"),
    "SVR": ("STL-SVR", "SVR"),
    "GLMBOOST": ("STL-GLMBoost", "GLMBoost"),
    "CUBIST": ("STL-CUBIST", "CUBIST"),
    "MLP": ("STL-MLP", "MLP"),
}

# Heterogeneous ensembles chosen per horizon
HORIZON_ENSEMBLES = {
    1: ("STL-Ensemble-1", ("SVR", "MARS", "GLMBOOST")),
    2: ("STL-Ensemble-2", ("CUBIST", "KNN", "MLP")),
}

# Models compared against each ensemble
COMPARISON_KINDS = {
    1: ("MARS", "SVR", "GLMBOOST"),
    2: ("KNN", "CUBIST", "MLP"),
}

# Published statistics of the lag-embedded targets, all / training / test
PUBLISHED_SPLIT_STATS = {
    "all": {"count": 245, "max": 73141, "min": 70, "mean": 9427, "median": 3131, "std": 13249.01},
    "train": {"count": 171, "max": 73141, "min": 70, "mean": 10273, "median": 3175, "std": 14788.60},
    "test": {"count": 74, "max": 36569, "min": 379, "mean": 7473, "median": 2792, "std": 8477.56},
}

# PCA components needed for 95% of variance
PUBLISHED_PCA_COMPONENTS = {"decomposed": 6, "nondecomposed": 7}

# Published test-set scores; DM is against the ensemble of the same horizon
PUBLISHED_SCORES: Dict[int, Dict[str, Dict[str, float]]] = {
    1: {
        "STL-Ensemble-1": {"rrmse": 0.3197, "r2": 0.9132},
        "STL-MARS": {"rrmse": 0.3903, "r2": 0.8957, "dm": -0.8191, "p_value": 0.4154},
        "STL-SVR": {"rrmse": 0.3470, "r2": 0.9000, "dm": -1.8836, "p_value": 0.0636},
        "STL-GLMBoost": {"rrmse": 0.5961, "r2": 0.6818, "dm": -3.2631, "p_value": 0.0016},
        "MARS": {"rrmse": 0.6661, "r2": 0.5911, "dm": -3.4462, "p_value": 0.0009},
        "SVR": {"rrmse": 0.6540, "r2": 0.6742, "dm": -2.5824, "p_value": 0.0118},
        "GLMBoost": {"rrmse": 0.6395, "r2": 0.5542, "dm": -3.8813, "p_value": 0.00024},
    },
    2: {
        "STL-Ensemble-2": {"rrmse": 0.6311, "r2": 0.8186},
        "STL-KNN": {"rrmse": 1.4046, "r2": 0.7236, "dm": -6.1844, "p_value": 9.8633e-10},
        "STL-CUBIST": {"rrmse": 3.5327, "r2": 0.5425, "dm": -9.3799, "p_value": 6.4036e-20},
        "STL-MLP": {"rrmse": 1.7753, "r2": 0.3504, "dm": -7.8515, "p_value": 1.2964e-14},
        "k-NN": {"rrmse": 0.6641, "r2": 0.6490, "dm": -5.1354, "p_value": 3.5252e-07},
        "CUBIST": {"rrmse": 0.7482, "r2": 0.5856, "dm": -8.3402, "p_value": 3.1566e-16},
        "MLP": {"rrmse": 0.8575, "r2": 0.0581, "dm": -17.1809, "p_value": 1.1203e-56},
    },
}


def learner_preset(kind: str, component: str, **overrides) -> LearnerSpec:
    """
    Loads a learner preset

    Args:
        kind: learner kind (KNN, MARS, SVR, GLMBOOST, CUBIST, MLP)
        component: seasonal, trend, remainder, nondecomposed (or 'level')
        overrides: hyperparameters replacing the preset values
    """
    kind = LearnerKind(str(kind).upper().replace("-", "")).value
    component = "nondecomposed" if component == "level" else component
    if component not in PRESET_COMPONENTS:
        raise ConfigurationError(f"unknown preset component '{component}'")
    params = dict(LEARNER_PRESETS[kind][component])
    params.update(overrides)
    return parse_learner_spec({"kind": kind, **params})


def learner_from_preset_name(kind: str, preset: str, **overrides) -> LearnerSpec:
    """Resolves names like 'paper-seasonal' or its alias 'tuned-seasonal'"""
    for prefix in PRESET_PREFIXES:
        if preset.startswith(prefix):
            return learner_preset(kind, preset[len(prefix):], **overrides)
    raise ConfigurationError(f"unknown learner preset '{preset}'")


def homogeneous_assignment(kind: str, horizon: int = 1) -> EnsembleAssignment:
    return EnsembleAssignment(
        seasonal=learner_preset(kind, "seasonal"),
        trend=learner_preset(kind, "trend"),
        remainder=learner_preset(kind, "remainder"),
        horizon=horizon,
    )


def ensemble_assignment(kinds: Sequence[str], horizon: int = 1) -> EnsembleAssignment:
    seasonal, trend, remainder = kinds
    return EnsembleAssignment(
        seasonal=learner_preset(seasonal, "seasonal"),
        trend=learner_preset(trend, "trend"),
        remainder=learner_preset(remainder, "remainder"),
        horizon=horizon,
    )


def pipeline_preset(name: str, **variant_fields) -> PipelineVariant:
    """
    Named pipelines

    stl-ensemble-1, stl-ensemble-2, stl-<kind> (homogeneous decomposed)
    and <kind> (nondecomposed), with the preset hyperparameters.
    """
    key = name.lower()
    for horizon, (display, kinds) in HORIZON_ENSEMBLES.items():
        if key == display.lower():
            return PipelineVariant(
                name=display,
                mode="decomposed",
                assignment=ensemble_assignment(kinds, horizon),
                **variant_fields,
            )
    kind_key = key[len("stl-"):] if key.startswith("stl-") else key
    kind_key = kind_key.replace("-", "").upper()
    if kind_key not in LEARNER_PRESETS:
        raise ConfigurationError(
            f"unknown pipeline preset '{name}', expected one of {pipeline_preset_names()}"
        )
    stl_name, plain_name = KIND_DISPLAY[kind_key]
    if key.startswith("stl-"):
        return PipelineVariant(
            name=stl_name,
            mode="decomposed",
            assignment=homogeneous_assignment(kind_key),
            **variant_fields,
        )
    return PipelineVariant(
        name=plain_name,
        mode="nondecomposed",
        learner=learner_preset(kind_key, "nondecomposed"),
        **variant_fields,
    )


def pipeline_preset_names() -> List[str]:
    names = [display.lower() for display, _ in HORIZON_ENSEMBLES.values()]
    names += [f"stl-{kind.lower()}" for kind in LEARNER_PRESETS]
    names += [kind.lower() for kind in LEARNER_PRESETS]
    return names


def expand_grid(
    kind: str,
    component: str,
    grid: Optional[Mapping[str, Iterable[object]]] = None,
) -> List[LearnerSpec]:
    """
    Learner specs for every point of a hyperparameter grid around a preset

    Args:
        kind: learner kind
        component: preset component
        grid: {hyperparameter: values}; missing hyperparameters keep the preset value

    Returns:
        Specs in grid order (last key varies fastest)
    """
    if not grid:
        return [learner_preset(kind, component)]
    keys = list(grid)
    return [
        learner_preset(kind, component, **dict(zip(keys, values)))
        for values in product(*(list(grid[key]) for key in keys))
    ]
