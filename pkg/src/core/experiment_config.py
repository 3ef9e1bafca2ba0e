# src/core/experiment_config.py

"""
Experiment configuration: file loading (JSON, or YAML through PyYAML), merging
over EnvironmentConfig defaults and field validation. Every validation failure
raises ConfigError naming the offending field.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from configs.environment import EnvironmentConfig
from src.core.dynamics import SCHEMES
from src.core.errors import ConfigError
from src.core.majorant import MAX_SERIES_N, MAX_SERIES_R

EXPERIMENTS = ("spectrum", "gaps", "simulate", "packet", "scaling", "kp-check")
MODELS = ("toda", "fpu", "harmonic")


def load_config_file(path):
    """
    Read a JSON or YAML config file into a dict.

    Raises:
        ConfigError: missing file, unparsable content or a non-mapping document
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError("config", f"cannot parse {path.name}: {e}") from e
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path.name} must contain a mapping at top level")
    return data


def _require_int(params, name, minimum=None, maximum=None):
    value = params[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name, f"must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(name, f"must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ConfigError(name, f"must be <= {maximum}, got {value}")
    return value


def _require_float(params, name, minimum=None, strict=False):
    value = params[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"must be a number, got {value!r}")
    if minimum is not None and (value <= minimum if strict else value < minimum):
        relation = ">" if strict else ">="
        raise ConfigError(name, f"must be {relation} {minimum}, got {value}")
    return float(value)


def _require_choice(params, name, choices):
    if params[name] not in choices:
        raise ConfigError(name, f"must be one of {list(choices)}, got {params[name]!r}")


def _require_n_list(params, name, min_length=1):
    values = params[name]
    if not isinstance(values, list) or len(values) < min_length:
        raise ConfigError(name, f"must be a list of at least {min_length} lattice sizes")
    for value in values:
        if isinstance(value, bool) or not isinstance(value, int) or value < 2:
            raise ConfigError(name, f"every N must be an integer >= 2, got {value!r}")


def _validate_dynamics(params):
    _require_choice(params, "model", MODELS)
    _require_float(params, "beta")
    _require_int(params, "steps", minimum=0)
    _require_choice(params, "integrator", SCHEMES)
    if params["dt"] is not None:
        _require_float(params, "dt", minimum=0.0, strict=True)


def _validate(experiment, params):
    if "n" in params:
        _require_int(params, "n", minimum=2)
    if "seed" in params:
        _require_int(params, "seed", minimum=0)
    if "amplitude" in params:
        _require_float(params, "amplitude", minimum=0.0)

    if experiment in ("gaps", "simulate"):
        _validate_dynamics(params)
        _require_int(params, "gap_every", minimum=0)
    if experiment == "simulate":
        _require_int(params, "sample_every", minimum=1)
    if experiment == "packet":
        _require_n_list(params, "n_values")
        models = params["models"]
        if not isinstance(models, list) or not models or any(m not in ("toda", "fpu") for m in models):
            raise ConfigError("models", f"must be a non-empty list drawn from ['toda', 'fpu'], got {models!r}")
        _require_float(params, "beta")
        _require_float(params, "R", minimum=0.0, strict=True)
        _require_float(params, "sigma", minimum=0.0)
        _require_float(params, "s", minimum=0.0)
        _require_float(params, "phase")
        _require_float(params, "t_max", minimum=0.0, strict=True)
        _require_int(params, "max_steps", minimum=1)
        if params["workers"] is not None:
            _require_int(params, "workers", minimum=1)
        _require_choice(params, "integrator", SCHEMES)
        _require_int(params, "sample_every", minimum=1)
        if params["dt"] is not None:
            _require_float(params, "dt", minimum=0.0, strict=True)
        if params["fit_k_max"] is not None:
            _require_int(params, "fit_k_max", minimum=2)
        start = _require_float(params, "fit_t_start", minimum=0.0)
        if start >= 1.0:
            raise ConfigError("fit_t_start", f"must be a fraction in [0, 1), got {start}")
    if experiment == "scaling":
        _require_n_list(params, "n_values", min_length=4)
        _require_float(params, "s", minimum=0.0)
        _require_float(params, "sigma", minimum=0.0)
        _require_int(params, "crosscheck_max_n", minimum=0)
    if experiment == "kp-check":
        _require_int(params, "n_max", minimum=1, maximum=MAX_SERIES_N)
        _require_int(params, "r_max", minimum=1, maximum=MAX_SERIES_R)
        _require_int(params, "max_degree", minimum=2, maximum=EnvironmentConfig.MAX_DEGREE)
        _require_int(params, "n_vars", minimum=1, maximum=4)
        _require_float(params, "rho", minimum=0.0, strict=True)
        _require_int(params, "trials", minimum=1)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    output_dir: str = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment '{self.experiment}', expected one of {EXPERIMENTS}")
        _validate(self.experiment, self.params)

    @classmethod
    def build(cls, experiment, overrides=None, seed=None, output_dir=None):
        """
        Merge overrides over the experiment defaults and validate.

        Args:
            experiment: experiment name
            overrides: user parameters (unknown keys are rejected)
            seed: command-line seed, wins over the config value
            output_dir: command-line output directory
        """
        if experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment '{experiment}', expected one of {EXPERIMENTS}")
        params = EnvironmentConfig.get_experiment_defaults(experiment)
        overrides = dict(overrides or {})
        overrides.pop("experiment", None)
        for key, value in overrides.items():
            if key not in params:
                raise ConfigError(key, f"not a parameter of experiment '{experiment}'")
            params[key] = value
        if seed is not None:
            params["seed"] = seed
        return cls(experiment, params, EnvironmentConfig.get_output_dir(output_dir))

    @classmethod
    def from_file(cls, experiment, path, seed=None, output_dir=None):
        data = load_config_file(path)
        named = data.get("experiment")
        if named is not None and named != experiment:
            raise ConfigError("experiment", f"config is for '{named}', command asked for '{experiment}'")
        return cls.build(experiment, data, seed=seed, output_dir=output_dir)

    def get(self, name, default=None):
        return self.params.get(name, default)

    def __getitem__(self, name):
        if name not in self.params:
            raise ConfigError(name, f"missing from the '{self.experiment}' configuration")
        return self.params[name]

    def to_dict(self):
        """Config echo used for hashing and summaries; the output directory is excluded"""
        return {"experiment": self.experiment, **self.params}
